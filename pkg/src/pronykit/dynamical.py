"""Sparse dynamical sampling in finite dimension.

The state obeys x' = Ax, so x(beta*l) = B^l x0 with B = exp(beta*A).
Measurements take inner products of the evolving state with a fixed
subset of an orthonormal sampling basis. Given a known generalized
eigenbasis of A, the pipeline recovers which eigenmodes carry the initial
state and with what coefficients.

Omega is the finite known spectrum of A; inverting the symbol
z = exp(beta*lambda) is a nearest-match over that finite set, which
sidesteps the branch ambiguity of the complex logarithm entirely.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .annihilator import InstanceDescriptor, MeasurementRecord
from .errors import (
    ContractViolationError,
    SpuriousRootError,
    SymbolNotInjectiveError,
)
from .numerics import as_complex_matrix, matrix_exponential

_CHAIN_TOL = 1e-9
_ORTHO_TOL = 1e-9
_OBSERVABILITY_FLOOR = 1e-12
_INJECTIVITY_FLOOR = 1e-9


@dataclass(frozen=True, eq=False)
class GeneralizedEigenbasis:
    """Eigenvalues of A with Jordan chains spanning C^d.

    entries[n] = (lambda, (x^1, ..., x^m)) where A x^1 = lambda x^1 and
    (A - lambda I) x^j = x^(j-1). The same eigenvalue may appear in
    several entries (one per chain). Relations are only checkable against
    A, so validation happens when a DynamicalProblem is assembled.
    """

    entries: tuple

    def __post_init__(self):
        norm = []
        for value, chain in self.entries:
            vecs = tuple(np.asarray(v, dtype=np.complex128).reshape(-1)
                         for v in chain)
            if not vecs:
                raise ContractViolationError("empty Jordan chain")
            norm.append((complex(value), vecs))
        if not norm:
            raise ContractViolationError("eigenbasis has no entries")
        object.__setattr__(self, "entries", tuple(norm))

    @property
    def dimension(self) -> int:
        return self.entries[0][1][0].size

    @property
    def eigenvalues(self) -> tuple:
        """Distinct eigenvalues, in first-appearance order."""
        seen = []
        for value, _ in self.entries:
            if all(value != s for s in seen):
                seen.append(value)
        return tuple(seen)

    def vectors_for(self, value: complex, tol: float = 1e-9) -> list:
        """All chain vectors attached to eigenvalues matching value."""
        out = []
        for ev, chain in self.entries:
            if abs(ev - value) <= tol * (1.0 + abs(ev)):
                out.extend(chain)
        return out


@dataclass(frozen=True, eq=False)
class DynamicalProblem:
    """Generator, eigenstructure, sampling setup, and time step.

    sample_basis holds the orthonormal vectors e_1..e_d as columns; I
    selects which of them are observed. Assembly validates the chain
    relations, the joint span, orthonormality, and that beta keeps
    lambda -> exp(beta*lambda) injective on the spectrum.
    """

    A: np.ndarray
    basis: GeneralizedEigenbasis
    sample_basis: np.ndarray
    I: tuple
    beta: float

    def __post_init__(self):
        a = as_complex_matrix(self.A, "generator")
        d = a.shape[0]
        if a.shape != (d, d):
            raise ContractViolationError("generator must be square")
        sb = as_complex_matrix(self.sample_basis, "sample basis")
        if sb.shape != (d, d):
            raise ContractViolationError("sample basis must be d x d")
        gram = sb.conj().T @ sb
        if np.max(np.abs(gram - np.eye(d))) > _ORTHO_TOL:
            raise ContractViolationError("sample basis is not orthonormal")
        idx = tuple(sorted(set(int(i) for i in self.I)))
        if not idx:
            raise ContractViolationError("sampled index set I is empty")
        if idx[0] < 0 or idx[-1] >= d:
            raise ContractViolationError(f"sample index out of range 0..{d - 1}")
        beta = float(self.beta)
        if beta <= 0:
            raise ContractViolationError("beta must be positive")

        # chain relations against A, then the joint span
        all_vectors = []
        for value, chain in self.basis.entries:
            prev = None
            for vec in chain:
                if vec.size != d:
                    raise ContractViolationError("chain vector has wrong length")
                scale = np.linalg.norm(vec)
                if scale == 0:
                    raise ContractViolationError("zero vector in Jordan chain")
                resid = a @ vec - value * vec
                if prev is not None:
                    resid = resid - prev
                if np.linalg.norm(resid) > _CHAIN_TOL * (1.0 + abs(value)) * scale:
                    raise ContractViolationError(
                        f"Jordan chain relation fails for eigenvalue {value!r}")
                prev = vec
                all_vectors.append(vec)
        if len(all_vectors) != d:
            raise ContractViolationError(
                f"eigenbasis has {len(all_vectors)} vectors, need exactly {d}")
        if np.linalg.matrix_rank(np.column_stack(all_vectors)) < d:
            raise ContractViolationError("eigenbasis does not span C^d")

        values = self.basis.eigenvalues
        for i in range(len(values)):
            for j in range(i + 1, len(values)):
                gap = abs(cmath.exp(beta * values[i]) - cmath.exp(beta * values[j]))
                if gap <= _INJECTIVITY_FLOOR:
                    raise SymbolNotInjectiveError(
                        f"symbol not injective for beta = {beta}: eigenvalues "
                        f"{values[i]!r} and {values[j]!r} collide in the image")

        a.setflags(write=False)
        sb.setflags(write=False)
        object.__setattr__(self, "A", a)
        object.__setattr__(self, "sample_basis", sb)
        object.__setattr__(self, "I", idx)
        object.__setattr__(self, "beta", beta)

    @property
    def dimension(self) -> int:
        return self.A.shape[0]

    @cached_property
    def probes(self) -> np.ndarray:
        """Sampled basis vectors as columns, shape (d, |I|)."""
        return self.sample_basis[:, list(self.I)]


def build_propagator(prob: DynamicalProblem) -> np.ndarray:
    """exp(beta*A). The norm guard keeps the series evaluation honest."""
    m = prob.beta * prob.A
    if float(np.max(np.sum(np.abs(m), axis=0))) > 50.0:
        raise ContractViolationError("'beta * A' norm exceeds 50; rescale time")
    return matrix_exponential(m)


def dynamical_measure(prob: DynamicalProblem, x0: Sequence[complex],
                      L: int) -> MeasurementRecord:
    """values(l, s) = <B^l x0, e_s> for s in I, by repeated application of B."""
    state = np.asarray(x0, dtype=np.complex128).reshape(-1)
    if state.size != prob.dimension:
        raise ContractViolationError(
            f"x0 has length {state.size}, expected {prob.dimension}")
    B = build_propagator(prob)
    probes_h = prob.probes.conj().T
    rows = np.empty((L + 1, len(prob.I)), dtype=np.complex128)
    for l in range(L + 1):
        rows[l, :] = probes_h @ state
        if l < L:
            state = B @ state
    return MeasurementRecord(rows)


def dynamical_symbol_inverse(z: complex, prob: DynamicalProblem,
                             tol: float) -> complex:
    """The unique eigenvalue of A whose symbol value is within tol of z."""
    z = complex(z)
    matches = [lam for lam in prob.basis.eigenvalues
               if abs(cmath.exp(prob.beta * lam) - z) <= tol]
    if not matches:
        raise SpuriousRootError(
            f"no eigenvalue maps within {tol:.1e} of root {z!r}", root=z)
    if len(matches) > 1:
        raise SymbolNotInjectiveError(
            f"symbol not injective for this beta at tolerance {tol:.1e}: "
            f"{matches!r} all map near {z!r}")
    return matches[0]


def check_observability(prob: DynamicalProblem) -> bool:
    """True iff every chain head has a nonzero projection onto the probes.

    The projection of the eigenvector x^1 onto span{e_s : s in I} is what
    the measurements can see of that eigenmode; an orthogonal head makes
    the mode invisible no matter how many iterates are taken.
    """
    probes_h = prob.probes.conj().T
    for _, chain in prob.basis.entries:
        head = chain[0]
        if np.linalg.norm(probes_h @ head) <= _OBSERVABILITY_FLOOR:
            return False
    return True


def assemble_state(basis: GeneralizedEigenbasis,
                   components: Sequence) -> np.ndarray:
    """x0 = sum of c * (chain vector m of entry n); components: (n, m, c)."""
    x0 = np.zeros(basis.dimension, dtype=np.complex128)
    for n, m, c in components:
        _, chain = basis.entries[int(n)]
        x0 += complex(c) * chain[int(m)]
    return x0


def make_instance(prob: DynamicalProblem) -> InstanceDescriptor:
    """Descriptor over Omega = spectrum(A) with the probes baked in."""
    B = build_propagator(prob)
    eigenvalues = prob.basis.eigenvalues
    beta = prob.beta

    def symbol(lam):
        return cmath.exp(beta * complex(lam))

    def symbol_inverse(z):
        # nearest eigenvalue; the pipeline's round-trip check rejects bad fits
        return min(eigenvalues, key=lambda lam: abs(symbol(lam) - complex(z)))

    def omega_contains(lam):
        lam = complex(lam)
        return any(abs(lam - ev) <= 1e-9 * (1.0 + abs(ev)) for ev in eigenvalues)

    def mode_width(lam):
        return len(prob.basis.vectors_for(complex(lam)))

    def coefficient_system(F, L, probes):
        cols = []
        for lam in F:
            vecs = prob.basis.vectors_for(complex(lam))
            if not vecs:
                raise ContractViolationError(
                    f"{lam!r} is not an eigenvalue of the generator")
            for vec in vecs:
                state = vec.copy()
                col = np.empty((L + 1, probes.shape[1]), dtype=np.complex128)
                for l in range(L + 1):
                    col[l, :] = probes.conj().T @ state
                    if l < L:
                        state = B @ state
                cols.append(col.reshape(-1))
        if not cols:
            return np.zeros(((L + 1) * probes.shape[1], 0), dtype=np.complex128)
        return np.column_stack(cols)

    return InstanceDescriptor(
        name="dynamical",
        symbol=symbol,
        symbol_inverse=symbol_inverse,
        omega_contains=omega_contains,
        coefficient_system=coefficient_system,
        mode_dimension=max(len(chain) for _, chain in prob.basis.entries),
        probes=prob.probes,
        mode_width=mode_width,
        coordinate_key=lambda lam: (complex(lam).real, complex(lam).imag),
        coordinate_distance=lambda a, b: abs(complex(a) - complex(b)),
    )


def on_grid_problem(d: int, I: Sequence[int] = (0,),
                    beta: float = 1.0) -> DynamicalProblem:
    """Diagonal generator with spectrum 2 pi i k/d and a Fourier sampling basis.

    With x0 supported on standard basis vectors, the sampled channel is a
    plain exponential sum in the frequencies k/d: the on-grid reduction
    of the circle instance.
    """
    if d < 2:
        raise ContractViolationError("need dimension >= 2")
    ks = np.arange(d)
    A = np.diag(2j * math.pi / d * ks)
    entries = []
    for k in range(d):
        e = np.zeros(d, dtype=np.complex128)
        e[k] = 1.0
        entries.append((2j * math.pi * k / d, (e,)))
    fourier = np.exp(2j * math.pi * np.outer(ks, ks) / d) / math.sqrt(d)
    return DynamicalProblem(A=A, basis=GeneralizedEigenbasis(tuple(entries)),
                            sample_basis=fourier, I=tuple(I), beta=beta)
