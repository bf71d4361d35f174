"""Forward synthesis dispatch, quadrature checks, brute-force annihilator."""

import math

import numpy as np
import pytest

from pronykit import channel, classic, confluent, dynamical, oracle
from pronykit.annihilator import RecoveryConfig, minimal_annihilator
from pronykit.errors import ContractViolationError
from pronykit.numerics import polynomial_roots

from conftest import random_classic_model


class TestSynthesize:
    def test_classic_dispatch(self):
        req = oracle.SynthesisRequest(
            kind="classic", L=3, model=([0.0, 0.5], [1.0, 1.0]))
        rec = oracle.synthesize(req)
        assert np.allclose(rec.values[:, 0], [2.0, 0.0, 2.0, 0.0], atol=1e-14)

    def test_confluent_dispatch(self):
        req = oracle.SynthesisRequest(
            kind="confluent", L=1, model=[(0.0, (0.0, 1.0))])
        rec = oracle.synthesize(req)
        assert np.allclose(rec.values[:, 0], [0.0, 1.0], atol=1e-14)

    def test_dynamical_dispatch(self):
        prob = dynamical.on_grid_problem(4, I=(0,))
        x0 = np.zeros(4, dtype=np.complex128)
        x0[1] = 1.0
        req = oracle.SynthesisRequest(kind="dynamical", L=3, model=x0,
                                      setup=prob)
        rec = oracle.synthesize(req)
        direct = dynamical.dynamical_measure(prob, x0, 3)
        assert np.array_equal(rec.values, direct.values)

    def test_dynamical_needs_problem(self):
        with pytest.raises(ContractViolationError, match="DynamicalProblem"):
            oracle.synthesize(oracle.SynthesisRequest(
                kind="dynamical", L=3, model=np.zeros(4)))

    def test_channel_dispatch_accepts_path_list(self):
        req = oracle.SynthesisRequest(
            kind="channel", L=2, model=[((0.0, 0.0), 1.0)])
        rec = oracle.synthesize(req)
        direct = channel.channel_measure(
            channel.ChannelModel((((0.0, 0.0), 1.0),)),
            channel.DEFAULT_SETUP, 2)
        assert np.array_equal(rec.values, direct.values)

    def test_unknown_kind(self):
        with pytest.raises(ContractViolationError, match="unknown"):
            oracle.synthesize(oracle.SynthesisRequest(
                kind="mystery", L=3, model=None))

    def test_noise_requires_seed(self):
        req = oracle.SynthesisRequest(
            kind="classic", L=3, model=([0.25], [1.0]), noise_sigma=0.1)
        with pytest.raises(ContractViolationError, match="seed"):
            oracle.synthesize(req)

    def test_noise_reproducible(self):
        base = dict(kind="classic", L=63, model=([0.25], [1.0]),
                    noise_sigma=0.1)
        a = oracle.synthesize(oracle.SynthesisRequest(**base, seed=5))
        b = oracle.synthesize(oracle.SynthesisRequest(**base, seed=5))
        c = oracle.synthesize(oracle.SynthesisRequest(**base, seed=6))
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_noise_scale(self):
        clean = oracle.synthesize(oracle.SynthesisRequest(
            kind="classic", L=4095, model=([0.25], [1.0])))
        noisy = oracle.synthesize(oracle.SynthesisRequest(
            kind="classic", L=4095, model=([0.25], [1.0]),
            noise_sigma=0.5, seed=9))
        diff = noisy.values - clean.values
        # E|n|^2 = sigma^2 for circularly symmetric complex noise
        rms = float(np.sqrt(np.mean(np.abs(diff) ** 2)))
        assert abs(rms - 0.5) < 0.05

    def test_negative_sigma_rejected(self):
        with pytest.raises(ContractViolationError, match="nonnegative"):
            oracle.synthesize(oracle.SynthesisRequest(
                kind="classic", L=3, model=([0.25], [1.0]),
                noise_sigma=-1.0))


class TestQuadrature:
    def test_base_value(self):
        val = oracle.quadrature_inner_product((0.0, 0.0))
        assert abs(val - math.sqrt(math.pi / 2.0)) < 1e-11

    def test_unit_shift_modulus(self):
        val = oracle.quadrature_inner_product((1.0, 0.0))
        expected = math.sqrt(math.pi / 2.0) * math.exp(-0.5)
        assert abs(abs(val) - expected) < 1e-10

    def test_agrees_with_closed_form(self):
        rng = np.random.default_rng(77)
        worst = 0.0
        for _ in range(100):
            gamma = tuple(rng.uniform(-2.0, 2.0, 2))
            s = tuple(rng.uniform(-2.0, 2.0, 2))
            q = oracle.quadrature_inner_product(gamma, s)
            c = channel.gaussian_cross_term(gamma, s)
            worst = max(worst, abs(q - c))
        assert worst < 1e-10


class TestBruteForce:
    def test_two_mode_example(self):
        p = oracle.brute_force_annihilator([2.0, 0.0, 2.0, 0.0], 2)
        assert np.allclose(p.coeffs, [-1.0, 0.0, 1.0], atol=1e-12)

    def test_inflated_degree_grows_zero_root(self):
        # one mode at z = i needs degree 1; at forced degree 2 the extra
        # factor is z, never a spurious nonzero root
        p = oracle.brute_force_annihilator([1.0, 1j, -1.0, -1j], 2)
        assert np.allclose(p.coeffs, [0.0, -1j, 1.0], atol=1e-12)

    def test_zero_record(self):
        p = oracle.brute_force_annihilator(np.zeros(8), 3)
        assert np.allclose(p.coeffs, [0.0, 0.0, 0.0, 1.0], atol=0)

    def test_degree_bounds(self):
        with pytest.raises(ContractViolationError, match="1..6"):
            oracle.brute_force_annihilator([1.0, 0.5, 0.25], 7)
        with pytest.raises(ContractViolationError, match="1..6"):
            oracle.brute_force_annihilator([1.0, 0.5, 0.25], 0)

    def test_record_too_short(self):
        with pytest.raises(ContractViolationError, match="L >="):
            oracle.brute_force_annihilator([1.0, 0.5], 3)

    @pytest.mark.parametrize("trial", range(20))
    def test_nonzero_roots_match_minimal(self, trial):
        # half the trials run at the exact degree, half with one forced
        # extra zero root; nonzero root sets must agree either way
        rng = np.random.default_rng(8800 + trial)
        kappa = int(rng.integers(1, 4))
        freqs, coeffs = random_classic_model(rng, kappa, min_sep=0.05)
        inflate = trial % 2
        degree = kappa + inflate
        L = 2 * degree - 1 if 2 * degree - 1 > degree else degree
        rec = classic.synthesize(freqs, coeffs, max(L, 2 * kappa - 1))
        brute = oracle.brute_force_annihilator(rec, degree)
        cfg = RecoveryConfig(kappa=degree, M=1)
        ann = minimal_annihilator(rec, cfg)
        brute_nonzero = sorted(
            (z for z in polynomial_roots(brute.coeffs) if abs(z) > 1e-8),
            key=lambda z: (z.real, z.imag))
        assert len(brute_nonzero) == len(ann.r_min)
        for b, m in zip(brute_nonzero, sorted(ann.r_min,
                                              key=lambda z: (z.real, z.imag))):
            assert abs(b - m) < 1e-8
