"""Dense complex linear algebra used by every recovery pipeline.

Four operations: minimum-norm least squares, numerical rank, polynomial
root finding, and the matrix exponential. The heavy lifting lives in the
kernel backend (compiled when available, pure Python otherwise); this module
owns validation, tolerances, and the polynomial container.

All functions are pure and hold no state; tolerances are explicit keyword
arguments, never hidden constants.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernel
from .errors import ContractViolationError

_EPS = float(np.finfo(np.float64).eps)


def kernel_backend() -> str:
    """Name of the kernel serving this process: 'compiled' or 'python'."""
    return _kernel.BACKEND


def as_complex_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and convert to a 2-D complex128 array with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise ContractViolationError(f"{name} must be 2-D, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ContractViolationError(f"{name} contains non-finite entries")
    return a


def as_complex_vector(v, name: str = "vector") -> np.ndarray:
    a = np.asarray(v, dtype=np.complex128)
    if a.ndim != 1:
        raise ContractViolationError(f"{name} must be 1-D, got shape {a.shape}")
    if a.size and not np.all(np.isfinite(a)):
        raise ContractViolationError(f"{name} contains non-finite entries")
    return a


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Complex polynomial, coefficients in ascending degree order.

    The constant 1 is the trivial annihilator; the zero polynomial is
    disallowed, and any other leading coefficient must be nonzero.
    """

    coeffs: np.ndarray = field()

    def __post_init__(self):
        c = as_complex_vector(self.coeffs, "coeffs")
        if c.size == 0:
            raise ContractViolationError("polynomial needs at least one coefficient")
        if c.size > 1 and c[-1] == 0:
            raise ContractViolationError("leading coefficient must be nonzero")
        if c.size == 1 and c[0] == 0:
            raise ContractViolationError("the zero polynomial is not representable")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs[-1] == 1)

    def __call__(self, z):
        """Horner evaluation; accepts scalars or arrays."""
        z = np.asarray(z, dtype=np.complex128)
        acc = np.full(z.shape, self.coeffs[-1], dtype=np.complex128)
        for c in self.coeffs[-2::-1]:
            acc = acc * z + c
        return acc if acc.shape else complex(acc)

    @classmethod
    def from_roots(cls, roots: Iterable[complex]) -> "Polynomial":
        """Monic polynomial with the given roots (with multiplicity)."""
        coeffs = np.array([1.0 + 0.0j])
        for r in roots:
            coeffs = np.convolve(coeffs, np.array([-complex(r), 1.0 + 0.0j]))
        return cls(coeffs)


def least_squares_solve(m, rhs, rcond: float | None = None) -> np.ndarray:
    """Minimum-norm least-squares solution of m @ x = rhs.

    Uses the rank-revealing SVD of m; singular values at or below
    ``rcond * sigma_max`` are treated as zero. The default rcond is
    ``max(rows, cols) * machine epsilon``.
    """
    a = as_complex_matrix(m)
    b = as_complex_vector(rhs, "rhs")
    rows, cols = a.shape
    if rows != b.size:
        raise ContractViolationError(
            f"rhs length {b.size} does not match row count {rows}"
        )
    if rcond is None:
        rcond = max(rows, cols) * _EPS
    u, s, v = _kernel.jacobi_svd(a)
    x = np.zeros(cols, dtype=np.complex128)
    if s.size == 0 or s[0] == 0.0:
        return x
    cutoff = rcond * s[0]
    for k in range(s.size):
        if s[k] > cutoff:
            x += v[:, k] * (np.vdot(u[:, k], b) / s[k])
    return x


def numerical_rank(m, rel_tol: float) -> int:
    """Number of singular values exceeding rel_tol times the largest one.

    The zero matrix has rank 0.
    """
    if rel_tol <= 0:
        raise ContractViolationError("rel_tol must be positive")
    a = as_complex_matrix(m)
    if a.size == 0:
        return 0
    _, s, _ = _kernel.jacobi_svd(a)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def singular_values(m) -> np.ndarray:
    """All singular values of m, descending."""
    a = as_complex_matrix(m)
    _, s, _ = _kernel.jacobi_svd(a)
    return s


def orthonormal_range(m, rcond: float | None = None) -> np.ndarray:
    """Orthonormal basis of the numerical column space, as columns.

    Directions with singular value at or below ``rcond * sigma_max`` do
    not count; the default rcond matches least_squares_solve.
    """
    a = as_complex_matrix(m)
    if rcond is None:
        rcond = max(a.shape) * _EPS
    u, s, _ = _kernel.jacobi_svd(a)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros((a.shape[0], 0), dtype=np.complex128)
    keep = int(np.count_nonzero(s > rcond * s[0]))
    return u[:, :keep]


def polynomial_roots(p) -> np.ndarray:
    """All ``degree`` roots of p, with multiplicity, in no particular order.

    Exact zero low-order coefficients are deflated first (those roots are
    exactly 0); the remaining factor goes to the simultaneous-iteration
    root finder. Every returned root z satisfies
    |p(z)| <= 1e-8 * max|coeff| * max(1, |z|)^degree.
    """
    if isinstance(p, Polynomial):
        coeffs = p.coeffs
    else:
        coeffs = as_complex_vector(p, "coeffs")
    if coeffs.size < 2:
        raise ContractViolationError("root finding needs degree >= 1")
    if coeffs[-1] == 0:
        raise ContractViolationError("leading coefficient must be nonzero")

    n_zero = 0
    while n_zero < coeffs.size - 1 and coeffs[n_zero] == 0:
        n_zero += 1
    zeros = np.zeros(n_zero, dtype=np.complex128)
    reduced = coeffs[n_zero:]
    if reduced.size < 2:
        return zeros
    monic = reduced / reduced[-1]
    roots = _kernel.aberth_roots(monic)
    return np.concatenate([zeros, roots])


def matrix_exponential(m) -> np.ndarray:
    """e^m for a square matrix, by scaling and squaring."""
    a = as_complex_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ContractViolationError(f"matrix must be square, got {a.shape}")
    if a.shape[0] == 0:
        return np.zeros((0, 0), dtype=np.complex128)
    return np.asarray(_kernel.expm_taylor(a))
