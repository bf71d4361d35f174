"""Off-grid exponential recovery on the circle.

Signals are finite sums x(t) = sum_j c_j exp(2 pi i gamma_j t) with
frequencies gamma_j in [0, 1). The operator driving the measurements is a
finite combination of translations; the default is the unit translation,
whose symbol gamma -> exp(2 pi i gamma) turns y_l into the plain samples
x(l) and the whole pipeline into classical exponential fitting.
"""

from __future__ import annotations

import cmath
import math
from typing import Optional, Sequence

import numpy as np

from .annihilator import InstanceDescriptor, MeasurementRecord, ShiftCombination
from .errors import ContractViolationError, SpuriousRootError

TWO_PI = 2.0 * math.pi

# B = T(1), translation by one sampling step
DEFAULT_SHIFTS = ShiftCombination(((1.0 + 0.0j, 1.0),))


def wrap_unit(t: float) -> float:
    """Representative of t in [0, 1)."""
    t = float(t) % 1.0
    # t % 1.0 can round up to exactly 1.0 for tiny negative inputs
    return 0.0 if t >= 1.0 else t


def circle_distance(a: float, b: float) -> float:
    """Distance between two frequencies on the circle R/Z."""
    d = abs(wrap_unit(a) - wrap_unit(b))
    return min(d, 1.0 - d)


def classic_symbol(gamma: float) -> complex:
    """Symbol of the unit translation: the unit-circle point at angle 2*pi*gamma."""
    return cmath.exp(TWO_PI * 1j * gamma)


def classic_symbol_inverse(z: complex, root_match_tol: float = 1e-6) -> float:
    """Frequency in [0, 1) whose symbol is z; z must sit near the unit circle."""
    z = complex(z)
    if abs(abs(z) - 1.0) > root_match_tol:
        raise SpuriousRootError(
            f"|z| = {abs(z):.6e} is not within {root_match_tol:.1e} of the "
            "unit circle", root=z)
    return wrap_unit(cmath.phase(z) / TWO_PI)


def shift_symbol(shifts: ShiftCombination):
    """Symbol gamma -> sum_n b_n exp(2 pi i gamma g_n) of a translation combination."""

    def h(gamma: float) -> complex:
        return sum(b * cmath.exp(TWO_PI * 1j * float(gamma) * g)
                   for b, g in shifts.terms)

    return h


def _shift_symbol_derivative(shifts: ShiftCombination):
    def dh(gamma: float) -> complex:
        return sum(b * (TWO_PI * 1j * g) * cmath.exp(TWO_PI * 1j * float(gamma) * g)
                   for b, g in shifts.terms)

    return dh


def _power_columns(nodes: np.ndarray, L: int) -> np.ndarray:
    """(L+1) x len(nodes) matrix of powers nodes**l, with 0**0 = 1."""
    out = np.ones((L + 1, nodes.size), dtype=np.complex128)
    for l in range(1, L + 1):
        out[l] = out[l - 1] * nodes
    return out


def classic_coefficient_system(F: Sequence[float], L: int) -> np.ndarray:
    """Vandermonde matrix with entry (l, j) = exp(2 pi i gamma_j l).

    Maps mode coefficients to the samples x(0..L); full column rank for
    distinct frequencies whenever |F| <= L + 1.
    """
    freqs = [float(g) for g in F]
    if len(set(wrap_unit(g) for g in freqs)) != len(freqs):
        raise ContractViolationError("duplicate frequencies in F")
    nodes = np.array([classic_symbol(g) for g in freqs], dtype=np.complex128)
    return _power_columns(nodes, L)


def synthesize(frequencies: Sequence[float], coefficients: Sequence[complex],
               L: int, shifts: Optional[ShiftCombination] = None) -> MeasurementRecord:
    """Forward model y_l = sum_j c_j h(gamma_j)^l (= x(l) for the default B)."""
    shifts = DEFAULT_SHIFTS if shifts is None else shifts
    freqs = [float(g) for g in frequencies]
    c = np.asarray(list(coefficients), dtype=np.complex128)
    if len(freqs) != c.size:
        raise ContractViolationError(
            f"{len(freqs)} frequencies but {c.size} coefficients")
    h = shift_symbol(shifts)
    nodes = np.array([h(g) for g in freqs], dtype=np.complex128)
    values = _power_columns(nodes, L) @ c
    return MeasurementRecord(values.reshape(-1, 1))


def make_instance(shifts: Optional[ShiftCombination] = None) -> InstanceDescriptor:
    """Descriptor for the circle instance under a chosen translation combination.

    The default combination has the closed-form inverse above. A custom
    combination gets symbol_inverse = None: run validate_symbol on a grid
    first and invert through whatever structure makes it injective (or use
    several combinations and intersect the recovered spectra).
    """
    shifts = DEFAULT_SHIFTS if shifts is None else shifts
    h = shift_symbol(shifts)
    dh = _shift_symbol_derivative(shifts)
    is_default = shifts == DEFAULT_SHIFTS

    def coefficient_system(F, L, probes):
        freqs = [float(g) for g in F]
        if len(set(wrap_unit(g) for g in freqs)) != len(freqs):
            raise ContractViolationError("duplicate frequencies in F")
        nodes = np.array([h(g) for g in freqs], dtype=np.complex128)
        return _power_columns(nodes, L)

    def mode_columns(gamma, L, probes):
        return _power_columns(np.array([h(gamma)], dtype=np.complex128), L)

    def mode_columns_gradient(gamma, L, probes):
        col = _power_columns(np.array([h(gamma)], dtype=np.complex128), L)
        grad = np.zeros_like(col)
        # d/dgamma h^l = l h^(l-1) h', written without dividing by h
        grad[1:, 0] = np.arange(1, L + 1) * col[:-1, 0] * dh(gamma)
        return [grad]

    return InstanceDescriptor(
        name="classic",
        symbol=h,
        symbol_inverse=classic_symbol_inverse if is_default else None,
        omega_contains=lambda g: 0.0 <= float(g) < 1.0,
        coefficient_system=coefficient_system,
        mode_dimension=1,
        coordinate_key=lambda g: (float(g),),
        coordinate_distance=circle_distance,
        coordinate_params=lambda g: (float(g),),
        params_coordinate=lambda p: wrap_unit(p[0]),
        mode_columns=mode_columns,
        mode_columns_gradient=mode_columns_gradient,
    )
