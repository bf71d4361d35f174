"""Time-frequency channel identification.

A channel applies a finite combination of time-frequency shifts,
X = sum c_gamma pi_gamma with pi_(t,nu) u(r) = exp(2 pi i r nu) u(r + t)
and paths gamma = (t, nu) in [0,1)^2. Probing with shifted Gaussians and
iterating an operator built from two fixed shifts yields measurements

    y_l(s) = sum_gamma c_gamma h(gamma)^l m_gamma(s),

where m_gamma(s) is the Gaussian cross term below and h is the symbol of
the shift combination under the symplectic character. The default
combination is tuned so h(t, nu) = exp(2 pi i t/12) + i exp(-2 pi i nu/12),
which is injective and bounded away from zero on the unit square and has
the closed-form inverse goodh_inverse.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .annihilator import (
    InstanceDescriptor,
    MeasurementRecord,
    ShiftCombination,
)
from .classic import circle_distance, wrap_unit
from .errors import ContractViolationError, SpuriousRootError

_PI = math.pi

# Composed with eval_character these two terms give exactly
# exp(2 pi i t/12) + i exp(-2 pi i nu/12); note the sign of the g's,
# forced by the character convention.
DEFAULT_SHIFT_TERMS = ShiftCombination((
    (1.0 + 0.0j, (0.0, -1.0 / 12.0)),
    (1j, (-1.0 / 12.0, 0.0)),
))


def eval_character(gamma, g) -> complex:
    """Symplectic character of gamma = (t, nu) evaluated at g = (x, xi)."""
    t, nu = gamma
    x, xi = g
    return cmath.exp(2j * _PI * (x * nu - t * xi))


@dataclass(frozen=True)
class ChannelProbeSetup:
    """Probe points (the set K) and the shift combination driving B."""

    probes: tuple = ((0.0, 0.0),)
    shift_terms: ShiftCombination = field(default=DEFAULT_SHIFT_TERMS)

    def __post_init__(self):
        probes = tuple((float(t), float(nu)) for t, nu in self.probes)
        if not probes:
            raise ContractViolationError("need at least one probe point")
        object.__setattr__(self, "probes", probes)

    @property
    def S(self) -> int:
        return len(self.probes)

    @property
    def is_default_symbol(self) -> bool:
        return self.shift_terms == DEFAULT_SHIFT_TERMS


DEFAULT_SETUP = ChannelProbeSetup()


@dataclass(frozen=True)
class ChannelModel:
    """Propagation paths: ((t, nu), gain) with distinct (t, nu) and gain != 0."""

    paths: tuple

    def __post_init__(self):
        paths = tuple(((float(g[0]), float(g[1])), complex(c))
                      for g, c in self.paths)
        if any(c == 0 for _, c in paths):
            raise ContractViolationError("path gains must be nonzero")
        points = [g for g, _ in paths]
        if len(set(points)) != len(points):
            raise ContractViolationError("duplicate path coordinates")
        object.__setattr__(self, "paths", paths)


def channel_symbol(gamma, setup: ChannelProbeSetup = DEFAULT_SETUP) -> complex:
    """h(gamma) = sum_n b_n * character(gamma, g_n)."""
    return sum(b * eval_character(gamma, g) for b, g in setup.shift_terms.terms)


def _symbol_gradient(gamma, setup: ChannelProbeSetup):
    """(dh/dt, dh/dnu) at gamma."""
    t, nu = gamma
    dt = 0.0 + 0.0j
    dnu = 0.0 + 0.0j
    for b, (x, xi) in setup.shift_terms.terms:
        char = b * cmath.exp(2j * _PI * (x * nu - t * xi))
        dt += char * (-2j * _PI * xi)
        dnu += char * (2j * _PI * x)
    return dt, dnu


def goodh_inverse(z: complex, tol: float = 1e-9):
    """Invert the default symbol on [0,1)^2.

    Writing a = pi t/6 and b = pi nu/6, the squared modulus of
    h = exp(2ia) + i exp(-2ib) satisfies (|h|^2 - 2)/2 = sin(a + b) while
    (x^2 - y^2)/|h|^2 = sin(b - a), so two arcsines separate t and nu.
    Arguments drifting past the principal range by more than tol, or
    results outside the unit square, mark z as having no preimage.
    """
    z = complex(z)
    x, y = z.real, z.imag
    m2 = x * x + y * y
    if m2 == 0.0:
        raise SpuriousRootError("0 is not a symbol value", root=z)
    s_sum = (m2 - 2.0) / 2.0
    s_diff = (x * x - y * y) / m2

    def _clamped_asin(v):
        if abs(v) > 1.0:
            if abs(v) > 1.0 + tol:
                raise SpuriousRootError(
                    f"arcsin argument {v:.6f} outside [-1, 1]", root=z)
            v = math.copysign(1.0, v)
        return math.asin(v)

    arc_sum = _clamped_asin(s_sum)
    arc_diff = _clamped_asin(s_diff)
    t = (3.0 / _PI) * (arc_sum - arc_diff)
    nu = (3.0 / _PI) * (arc_sum + arc_diff)

    def _snap(v):
        if v < 0.0:
            if v < -tol:
                raise SpuriousRootError(
                    f"preimage coordinate {v:.3e} below 0", root=z)
            return 0.0
        if v >= 1.0:
            if v >= 1.0 + tol:
                raise SpuriousRootError(
                    f"preimage coordinate {v:.3e} at or above 1", root=z)
            return math.nextafter(1.0, 0.0)
        return v

    return (_snap(t), _snap(nu))


def gaussian_cross_term(gamma, s=(0.0, 0.0)) -> complex:
    """<pi_gamma pi_s u, pi_s u> for the window u(r) = exp(-r^2), in closed form.

    Completing the square in the cross-ambiguity integral gives the base
    value sqrt(pi/2) exp(-(t^2 + pi^2 nu^2)/2) exp(-pi i t nu); conjugating
    by the probe shift only multiplies by a symplectic phase, so the
    modulus never depends on s and never vanishes.
    """
    t, nu = float(gamma[0]), float(gamma[1])
    ts, ns = float(s[0]), float(s[1])
    phase = cmath.exp(2j * _PI * (t * ns - ts * nu))
    base = (math.sqrt(_PI / 2.0)
            * math.exp(-(t * t + (_PI * nu) ** 2) / 2.0)
            * cmath.exp(-1j * _PI * t * nu))
    return phase * base


def _cross_term_gradient(gamma, s):
    """(dm/dt, dm/dnu) at gamma, via the log-derivative of the closed form."""
    t, nu = gamma
    ts, ns = s
    m = gaussian_cross_term(gamma, s)
    dt = m * (2j * _PI * ns - t - 1j * _PI * nu)
    dnu = m * (-2j * _PI * ts - _PI * _PI * nu - 1j * _PI * t)
    return dt, dnu


def channel_measure(model: ChannelModel, setup: ChannelProbeSetup,
                    L: int) -> MeasurementRecord:
    """values(l, s) = sum over paths of c h(gamma)^l m_gamma(s)."""
    values = np.zeros((L + 1, setup.S), dtype=np.complex128)
    for gamma, c in model.paths:
        h = channel_symbol(gamma, setup)
        cross = np.array([gaussian_cross_term(gamma, s) for s in setup.probes])
        power = 1.0 + 0.0j
        for l in range(L + 1):
            values[l, :] += c * power * cross
            power *= h
    return MeasurementRecord(values)


def torus_distance(a, b) -> float:
    """Euclidean distance on the torus [0,1)^2."""
    return math.hypot(circle_distance(a[0], b[0]), circle_distance(a[1], b[1]))


def make_instance(setup: Optional[ChannelProbeSetup] = None) -> InstanceDescriptor:
    """Descriptor for channel identification with the given probe setup.

    Only the default shift combination carries a closed-form inverse; any
    other combination must pass validate_symbol and be inverted by other
    means (or run under several combinations with intersect_spectra).
    """
    setup = DEFAULT_SETUP if setup is None else setup

    def symbol(gamma):
        return channel_symbol(gamma, setup)

    def mode_columns(gamma, L, probes):
        h = symbol(gamma)
        cross = np.array([gaussian_cross_term(gamma, s) for s in probes])
        powers = np.ones(L + 1, dtype=np.complex128)
        for l in range(1, L + 1):
            powers[l] = powers[l - 1] * h
        return np.outer(powers, cross).reshape(-1, 1)

    def mode_columns_gradient(gamma, L, probes):
        h = symbol(gamma)
        dh_dt, dh_dnu = _symbol_gradient(gamma, setup)
        cross = np.array([gaussian_cross_term(gamma, s) for s in probes])
        pairs = [_cross_term_gradient(gamma, s) for s in probes]
        dcross_dt = np.array([p[0] for p in pairs])
        dcross_dnu = np.array([p[1] for p in pairs])
        powers = np.ones(L + 1, dtype=np.complex128)
        for l in range(1, L + 1):
            powers[l] = powers[l - 1] * h
        dpowers = np.zeros(L + 1, dtype=np.complex128)
        dpowers[1:] = np.arange(1, L + 1) * powers[:-1]
        out = []
        for dh, dcross in ((dh_dt, dcross_dt), (dh_dnu, dcross_dnu)):
            block = (np.outer(dpowers * dh, cross)
                     + np.outer(powers, dcross)).reshape(-1, 1)
            out.append(block)
        return out

    def coefficient_system(F, L, probes):
        if not F:
            return np.zeros(((L + 1) * len(probes), 0), dtype=np.complex128)
        return np.hstack([mode_columns(g, L, probes) for g in F])

    return InstanceDescriptor(
        name="channel",
        symbol=symbol,
        symbol_inverse=goodh_inverse if setup.is_default_symbol else None,
        omega_contains=lambda g: (0.0 <= g[0] < 1.0) and (0.0 <= g[1] < 1.0),
        coefficient_system=coefficient_system,
        mode_dimension=1,
        probes=setup.probes,
        coordinate_key=lambda g: (float(g[0]), float(g[1])),
        coordinate_distance=torus_distance,
        coordinate_params=lambda g: (float(g[0]), float(g[1])),
        params_coordinate=lambda p: (wrap_unit(p[0]), wrap_unit(p[1])),
        mode_columns=mode_columns,
        mode_columns_gradient=mode_columns_gradient,
    )
