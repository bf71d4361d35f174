"""Time-frequency channel identification: symbol, cross terms, recovery."""

import cmath
import math

import numpy as np
import pytest

from pronykit import channel
from pronykit.annihilator import (
    RecoveryConfig,
    ShiftCombination,
    run_recovery,
    validate_symbol,
)
from pronykit.errors import SpuriousRootError

from conftest import random_channel_model


class TestCharacter:
    def test_at_origin(self):
        assert channel.eval_character((0.0, 0.0), (0.3, -0.7)) == 1.0

    def test_half_time_shift(self):
        # gamma = (1/2, 0) against g = (0, 1): exp(-2 pi i * 1/2) = -1
        val = channel.eval_character((0.5, 0.0), (0.0, 1.0))
        assert abs(val - (-1.0)) < 1e-15

    def test_half_frequency_shift(self):
        # gamma = (0, 1/2) against g = (1, 0): exp(2 pi i * 1/2) = -1
        val = channel.eval_character((0.0, 0.5), (1.0, 0.0))
        assert abs(val - (-1.0)) < 1e-15

    def test_bilinear_antisymmetry(self):
        # swapping gamma and g conjugates the phase
        gamma, g = (0.3, 0.8), (0.1, 0.4)
        a = channel.eval_character(gamma, g)
        b = channel.eval_character(g, gamma)
        assert abs(a - b.conjugate()) < 1e-15


class TestSymbol:
    def test_value_at_origin(self):
        assert abs(channel.channel_symbol((0.0, 0.0)) - (1.0 + 1j)) < 1e-15

    def test_value_at_center(self):
        # |h|^2 = 3 at (1/2, 1/2) and the two terms share phase pi/4
        val = channel.channel_symbol((0.5, 0.5))
        expected = math.sqrt(1.5) * (1.0 + 1j)
        assert abs(val - expected) < 1e-12

    def test_explicit_form(self):
        for t, nu in [(0.1, 0.9), (0.7, 0.2), (0.0, 0.5)]:
            direct = (cmath.exp(2j * math.pi * t / 12.0)
                      + 1j * cmath.exp(-2j * math.pi * nu / 12.0))
            assert abs(channel.channel_symbol((t, nu)) - direct) < 1e-14

    def test_modulus_bounds(self):
        # |h|^2 = 2 + 2 sin(pi (t + nu)/6) stays within [2, 4] on the square
        grid = np.linspace(0.0, 1.0, 21)
        for t in grid:
            for nu in grid:
                m2 = abs(channel.channel_symbol((t, nu))) ** 2
                assert 2.0 - 1e-12 <= m2 <= 4.0 + 1e-12

    def test_naive_single_term_not_injective(self):
        # b = 1, g = (1, 1): h(t, nu) = exp(2 pi i (nu - t)) only sees nu - t
        terms = ShiftCombination(((1.0 + 0.0j, (1.0, 1.0)),))
        setup = channel.ChannelProbeSetup(shift_terms=terms)
        a = channel.channel_symbol((0.25, 0.25), setup)
        b = channel.channel_symbol((0.0, 0.0), setup)
        assert abs(a - 1.0) < 1e-15
        assert abs(a - b) < 1e-15


class TestGoodhInverse:
    def test_origin(self):
        t, nu = channel.goodh_inverse(1.0 + 1j)
        assert abs(t) < 1e-12 and abs(nu) < 1e-12

    def test_center(self):
        t, nu = channel.goodh_inverse(math.sqrt(1.5) * (1.0 + 1j))
        assert abs(t - 0.5) < 1e-12
        assert abs(nu - 0.5) < 1e-12

    def test_zero_rejected(self):
        with pytest.raises(SpuriousRootError):
            channel.goodh_inverse(0.0)

    def test_far_point_rejected(self):
        # |z|^2 = 25 makes the first arcsine argument 11.5
        with pytest.raises(SpuriousRootError):
            channel.goodh_inverse(5.0)

    def test_roundtrip_on_grid(self):
        grid = np.linspace(0.0, 1.0, 33, endpoint=False)
        worst = 0.0
        for t in grid:
            for nu in grid:
                tt, nn = channel.goodh_inverse(channel.channel_symbol((t, nu)))
                worst = max(worst, abs(tt - t), abs(nn - nu))
        assert worst < 1e-9

    def test_snaps_into_unit_square(self):
        t, nu = channel.goodh_inverse(
            channel.channel_symbol((1.0 - 1e-15, 0.3)))
        assert 0.0 <= t < 1.0
        assert 0.0 <= nu < 1.0


class TestCrossTerm:
    def test_base_value(self):
        val = channel.gaussian_cross_term((0.0, 0.0))
        assert abs(val - math.sqrt(math.pi / 2.0)) < 1e-13

    def test_unit_time_shift_modulus(self):
        val = channel.gaussian_cross_term((1.0, 0.0))
        expected = math.sqrt(math.pi / 2.0) * math.exp(-0.5)
        assert abs(abs(val) - expected) < 1e-13

    def test_modulus_independent_of_probe(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            gamma = tuple(rng.uniform(-1.0, 1.0, 2))
            s = tuple(rng.uniform(-1.0, 1.0, 2))
            a = abs(channel.gaussian_cross_term(gamma, s))
            b = abs(channel.gaussian_cross_term(gamma, (0.0, 0.0)))
            assert abs(a - b) < 1e-13

    def test_never_vanishes_on_square(self):
        floor = math.sqrt(math.pi / 2.0) * math.exp(-(1.0 + math.pi ** 2) / 2.0)
        grid = np.linspace(0.0, 1.0, 13)
        for t in grid:
            for nu in grid:
                assert abs(channel.gaussian_cross_term((t, nu))) >= floor - 1e-12


class TestMeasure:
    def test_empty_model_zero_record(self):
        model = channel.ChannelModel(())
        rec = channel.channel_measure(model, channel.DEFAULT_SETUP, L=4)
        assert rec.L == 4
        assert np.all(rec.values == 0)

    def test_single_path_frozen_values(self):
        # path at the origin with unit gain: y_l = h(0,0)^l * m_0(0)
        model = channel.ChannelModel((((0.0, 0.0), 1.0),))
        rec = channel.channel_measure(model, channel.DEFAULT_SETUP, L=2)
        base = math.sqrt(math.pi / 2.0)
        expected = [base, (1.0 + 1j) * base, 2j * base]
        for l, want in enumerate(expected):
            assert abs(rec.values[l, 0] - want) < 1e-12

    def test_linear_in_gains(self):
        rng = np.random.default_rng(23)
        m1 = random_channel_model(rng, 2)
        doubled = channel.ChannelModel(
            tuple((g, 2.0 * c) for g, c in m1.paths))
        r1 = channel.channel_measure(m1, channel.DEFAULT_SETUP, L=5)
        r2 = channel.channel_measure(doubled, channel.DEFAULT_SETUP, L=5)
        assert np.max(np.abs(r2.values - 2.0 * r1.values)) < 1e-12

    def test_zero_gain_rejected(self):
        with pytest.raises(Exception, match="nonzero"):
            channel.ChannelModel((((0.1, 0.2), 0.0),))

    def test_duplicate_paths_rejected(self):
        with pytest.raises(Exception, match="duplicate"):
            channel.ChannelModel((((0.1, 0.2), 1.0), ((0.1, 0.2), 2.0)))


class TestValidateSymbol:
    def test_default_symbol_passes(self):
        inst = channel.make_instance()
        n = 16
        grid = [(i / n, j / n) for i in range(n) for j in range(n)]
        report = validate_symbol(inst, grid)
        assert report.passed
        assert report.min_modulus > 1.4  # sqrt(2) floor
        assert report.max_roundtrip < 1e-9

    def test_naive_symbol_fails(self):
        terms = ShiftCombination(((1.0 + 0.0j, (1.0, 1.0)),))
        inst = channel.make_instance(channel.ChannelProbeSetup(shift_terms=terms))
        n = 8
        grid = [(i / n, j / n) for i in range(n) for j in range(n)]
        report = validate_symbol(inst, grid)
        assert not report.injective_pass
        assert not report.passed


class TestRecovery:
    def test_two_path_round_trip(self):
        model = channel.ChannelModel(
            (((0.2, 0.7), 1.0 + 0.5j), ((0.6, 0.1), -2.0)))
        cfg = RecoveryConfig(kappa=2, M=1)
        rec = channel.channel_measure(model, channel.DEFAULT_SETUP, cfg.min_L)
        result = run_recovery(rec, channel.make_instance(), cfg)
        assert result.warnings == ()
        got = sorted(result.spectrum)
        want = sorted(g for g, _ in model.paths)
        for (t, nu), (tt, nn) in zip(want, got):
            assert channel.torus_distance((t, nu), (tt, nn)) < 1e-9
        gains = {g: c for g, c in model.paths}
        for mode in result.model.modes:
            g = min(gains, key=lambda p: channel.torus_distance(p, mode.gamma))
            assert abs(mode.coeffs[0] - gains[g]) < 1e-8

    @pytest.mark.parametrize("trial", range(10))
    def test_random_round_trips(self, trial):
        # a longer record plus coordinate refinement: a path whose gain and
        # cross term are both small is poorly determined from the minimal
        # record, so the tight budgets need the extra shifts
        rng = np.random.default_rng(7000 + trial)
        n_paths = int(rng.integers(1, 5))
        model = random_channel_model(rng, n_paths)
        cfg = RecoveryConfig(kappa=4, M=1)
        rec = channel.channel_measure(model, channel.DEFAULT_SETUP, 23)
        result = run_recovery(rec, channel.make_instance(), cfg,
                              refine_iterations=2)
        assert result.warnings == ()
        assert len(result.spectrum) == n_paths
        gains = {g: c for g, c in model.paths}
        for mode in result.model.modes:
            g = min(gains, key=lambda p: channel.torus_distance(p, mode.gamma))
            assert channel.torus_distance(g, mode.gamma) < 1e-6
            assert abs(mode.coeffs[0] - gains[g]) < 1e-5

    @pytest.mark.parametrize("trial", range(10))
    def test_short_record_round_trips(self, trial):
        # at the minimal record length the support is still exact but the
        # coordinates of weakly weighted paths carry a few more digits of error
        rng = np.random.default_rng(7000 + trial)
        n_paths = int(rng.integers(1, 5))
        model = random_channel_model(rng, n_paths)
        cfg = RecoveryConfig(kappa=4, M=1)
        rec = channel.channel_measure(model, channel.DEFAULT_SETUP, cfg.min_L)
        result = run_recovery(rec, channel.make_instance(), cfg)
        assert len(result.spectrum) == n_paths
        gains = {g: c for g, c in model.paths}
        for mode in result.model.modes:
            g = min(gains, key=lambda p: channel.torus_distance(p, mode.gamma))
            assert channel.torus_distance(g, mode.gamma) < 1e-4
            assert abs(mode.coeffs[0] - gains[g]) < 1e-3

    def test_refinement_tightens_coordinates(self):
        from pronykit.annihilator import _refine_spectrum

        rng = np.random.default_rng(42)
        model = random_channel_model(rng, 3)
        truth = sorted(g for g, _ in model.paths)
        inst = channel.make_instance()
        rec = channel.channel_measure(model, channel.DEFAULT_SETUP, 15)
        pert = [(t + 3e-5, nu - 2e-5) for t, nu in truth]
        got = _refine_spectrum(list(pert), rec, inst, 3)
        err = max(channel.torus_distance(a, b)
                  for a, b in zip(sorted(got), truth))
        assert err < 1e-9

    def test_torus_distance_wraps(self):
        assert channel.torus_distance((0.01, 0.0), (0.99, 0.0)) < 0.0201
        assert abs(channel.torus_distance((0.0, 0.1), (0.0, 0.4)) - 0.3) < 1e-15
