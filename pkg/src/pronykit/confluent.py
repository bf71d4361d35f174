"""Exponential sums with polynomial amplitudes.

x(t) = sum_gamma q_gamma(t) exp(2 pi i gamma t) where each q_gamma is a
nonzero polynomial of degree at most D. Under the unit translation every
frequency spans an invariant block of dimension deg q + 1, so the core
runs with M = D + 1 and the annihilator acquires a root of that
multiplicity at the symbol value. The coefficient solve uses the
confluent generalization of the Vandermonde system, columns k^m theta^k.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .annihilator import InstanceDescriptor, MeasurementRecord
from .classic import (
    TWO_PI,
    circle_distance,
    classic_symbol,
    classic_symbol_inverse,
    wrap_unit,
)
from .errors import ContractViolationError, NonUniqueCoefficientsWarning
from .numerics import least_squares_solve, numerical_rank


@dataclass(frozen=True, eq=False)
class PolynomialMode:
    """One frequency with its amplitude polynomial (ascending coefficients)."""

    gamma: float
    q_coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "gamma", float(self.gamma))
        q = np.atleast_1d(np.asarray(self.q_coeffs, dtype=np.complex128))
        if q.size == 0 or not np.any(q):
            raise ContractViolationError("amplitude polynomial must be nonzero")
        q.setflags(write=False)
        object.__setattr__(self, "q_coeffs", q)

    @property
    def degree(self) -> int:
        return self.q_coeffs.size - 1


def confluent_sample(modes: Sequence[PolynomialMode], t: float) -> complex:
    """x(t) = sum over modes of q(t) exp(2 pi i gamma t)."""
    total = 0.0 + 0.0j
    for mode in modes:
        q = 0.0 + 0.0j
        for coeff in mode.q_coeffs[::-1]:
            q = q * t + coeff
        total += q * np.exp(TWO_PI * 1j * mode.gamma * t)
    return complex(total)


def _index_powers(K: int, D: int) -> np.ndarray:
    """(K+1) x (D+1) matrix of k^m with 0^0 = 1; exact in floats at desk scale."""
    out = np.ones((K + 1, D + 1))
    ks = np.arange(K + 1, dtype=float)
    for m in range(1, D + 1):
        out[:, m] = out[:, m - 1] * ks
    return out


def confluent_system(thetas: Sequence[complex], D: int, K: int) -> np.ndarray:
    """(K+1) x N(D+1) matrix; block n holds columns k^m theta_n^k, m = 0..D.

    Invertible when square with pairwise distinct nodes, which is what
    makes the polynomial amplitudes recoverable from K+1 samples.
    """
    if D < 0 or K < 0:
        raise ContractViolationError("D and K must be nonnegative")
    nodes = [complex(z) for z in thetas]
    if len(set(nodes)) != len(nodes):
        raise ContractViolationError("duplicate nodes in confluent system")
    kpow = _index_powers(K, D)
    cols = []
    for theta in nodes:
        tpow = np.ones(K + 1, dtype=np.complex128)
        for k in range(1, K + 1):
            tpow[k] = tpow[k - 1] * theta
        for m in range(D + 1):
            cols.append(kpow[:, m] * tpow)
    if not cols:
        return np.zeros((K + 1, 0), dtype=np.complex128)
    return np.column_stack(cols)


def recover_polynomials(F: Sequence[float], samples: Sequence[complex],
                        D: int) -> list:
    """Amplitude polynomials from integer samples, least squares per block.

    The system is confluent_system of the symbol values at F with K + 1 =
    len(samples) rows. A rank-deficient system still returns the
    minimum-norm representative but warns that it is not unique.
    """
    y = np.asarray(list(samples), dtype=np.complex128).reshape(-1)
    freqs = [float(g) for g in F]
    width = D + 1
    if y.size < len(freqs) * width:
        raise ContractViolationError(
            f"need at least {len(freqs) * width} samples, got {y.size}")
    system = confluent_system([classic_symbol(g) for g in freqs], D, y.size - 1)
    c = least_squares_solve(system, y)
    if numerical_rank(system, 1e-10) < system.shape[1]:
        _warnings.warn(
            "confluent coefficient system is rank deficient; returning one "
            "least-squares representative", NonUniqueCoefficientsWarning,
            stacklevel=2)
    out = []
    for j, g in enumerate(freqs):
        chunk = c[j * width : (j + 1) * width]
        # an exactly-zero block cannot form a valid mode; drop it
        if np.any(chunk):
            out.append(PolynomialMode(g, chunk))
    return out


def synthesize(modes: Sequence[PolynomialMode], L: int) -> MeasurementRecord:
    """Integer samples x(0..L) of the given modes as a scalar record."""
    values = np.array([confluent_sample(modes, float(l)) for l in range(L + 1)],
                      dtype=np.complex128)
    return MeasurementRecord(values.reshape(-1, 1))


def make_instance(D: int) -> InstanceDescriptor:
    """Descriptor with M = D + 1 under the unit translation.

    Every recovered frequency gets a full coefficient block of length
    D + 1; trailing entries come back (numerically) zero when the true
    amplitude degree is smaller.
    """
    if D < 0:
        raise ContractViolationError("D must be nonnegative")
    width = D + 1

    def coefficient_system(F, L, probes):
        freqs = [float(g) for g in F]
        if len(set(wrap_unit(g) for g in freqs)) != len(freqs):
            raise ContractViolationError("duplicate frequencies in F")
        return confluent_system([classic_symbol(g) for g in freqs], D, L)

    def mode_columns(gamma, L, probes):
        return confluent_system([classic_symbol(gamma)], D, L)

    def mode_columns_gradient(gamma, L, probes):
        # d/dgamma k^m theta^k = 2 pi i k^(m+1) theta^k, theta = e^(2 pi i gamma)
        kpow = _index_powers(L, D + 1)
        theta = classic_symbol(gamma)
        tpow = np.ones(L + 1, dtype=np.complex128)
        for k in range(1, L + 1):
            tpow[k] = tpow[k - 1] * theta
        grad = np.column_stack(
            [TWO_PI * 1j * kpow[:, m + 1] * tpow for m in range(width)])
        return [grad]

    return InstanceDescriptor(
        name="confluent",
        symbol=classic_symbol,
        symbol_inverse=classic_symbol_inverse,
        omega_contains=lambda g: 0.0 <= float(g) < 1.0,
        coefficient_system=coefficient_system,
        mode_dimension=width,
        mode_width=lambda gamma: width,
        coordinate_key=lambda g: (float(g),),
        coordinate_distance=circle_distance,
        coordinate_params=lambda g: (float(g),),
        params_coordinate=lambda p: wrap_unit(p[0]),
        mode_columns=mode_columns,
        mode_columns_gradient=mode_columns_gradient,
    )
