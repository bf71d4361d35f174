"""Instance-independent spectral recovery.

The pipeline: stack measurements into a block Hankel system, find the
minimal monic annihilating polynomial of the record, keep its nonzero
roots, pull them back through the symbol inverse to spectral points, and
solve a linear system for the mode coefficients. Everything
instance-specific arrives through an InstanceDescriptor.

Measurement layout: values[l, s] is measurement index l on output channel
s. Wherever a record is flattened into a right-hand side, the order is
row-major over (l, s); coefficient-system builders must follow it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Sequence

import numpy as np

from .errors import (
    ContractViolationError,
    NotEnoughMeasurementsError,
    SpuriousRootError,
)
from .numerics import (
    Polynomial,
    as_complex_matrix,
    least_squares_solve,
    numerical_rank,
    orthonormal_range,
    polynomial_roots,
)

# ---------------------------------------------------------------------------
# data containers


@dataclass(frozen=True, eq=False)
class MeasurementRecord:
    """Measurements y_l in C^S for l = 0..L, stored as an (L+1, S) matrix."""

    values: np.ndarray

    def __post_init__(self):
        v = as_complex_matrix(self.values, "measurements")
        if v.shape[0] < 2:
            raise ContractViolationError("need at least two measurements (L >= 1)")
        if v.shape[1] < 1:
            raise ContractViolationError("need at least one output channel")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def L(self) -> int:
        return self.values.shape[0] - 1

    @property
    def S(self) -> int:
        return self.values.shape[1]

    @classmethod
    def from_samples(cls, samples) -> "MeasurementRecord":
        """Scalar record (S = 1) from a flat sequence."""
        v = np.asarray(samples, dtype=np.complex128).reshape(-1, 1)
        return cls(v)

    def scaled(self, factor: complex) -> "MeasurementRecord":
        return MeasurementRecord(self.values * factor)


@dataclass(frozen=True)
class RecoveryConfig:
    """Knobs of the recovery pipeline.

    kappa bounds the spectrum cardinality and M the per-point coefficient
    block size, so kappa*M bounds the annihilator degree. All tolerances
    are explicit here; nothing else in the pipeline hides an epsilon.

    rank_rel_tol separates signal singular values from roundoff. On
    noiseless data the roundoff tail of the block Hankel stays below
    ~3e-15 relative while a genuinely present mode can sink to ~4e-13
    when its coefficient is small and the nodes cluster, so the default
    sits between the two. Raise it toward 1e-8 for noisy measurements.

    root_cluster_tol merges root clusters that stem from one multiple
    root, and only applies when M > 1 (simple roots are never merged).
    A multiplicity-m root whose polynomial coefficients carry error eps
    splits into m fragments of radius about eps^(1/m); at realistic
    conditioning the fragments of a triple root sit up to ~1e-2 apart,
    so the linkage radius must clear that. Merged clusters are polished
    against the annihilation equations afterwards, which removes the
    splitting error, but the grouping itself must be right: the radius
    has to stay below the closest legitimate root separation. Shrink it
    for spectra packed tighter than ~4e-2 in symbol space.
    """

    kappa: int
    M: int = 1
    rank_rel_tol: float = 1e-13
    zero_root_tol: float = 1e-8
    root_match_tol: float = 1e-6
    root_cluster_tol: float = 2e-2
    residual_warn_tol: float = 1e-6

    def __post_init__(self):
        if self.kappa < 1 or self.M < 1:
            raise ContractViolationError("kappa and M must be >= 1")
        for name in ("rank_rel_tol", "zero_root_tol", "root_match_tol",
                     "root_cluster_tol", "residual_warn_tol"):
            if getattr(self, name) <= 0:
                raise ContractViolationError(f"{name} must be positive")

    @property
    def degree_budget(self) -> int:
        return self.kappa * self.M

    @property
    def min_L(self) -> int:
        return 2 * self.degree_budget - 1


@dataclass(frozen=True)
class AnnihilatorResult:
    """Minimal annihilator of a record plus extraction diagnostics.

    r_min holds the distinct nonzero roots (cluster centroids, sorted by
    real then imaginary part); multiplicities aligns with r_min.
    annihilation_residual is max_k ||sum_l alpha_l y_{l+k}|| relative to
    max_l ||y_l||. saturated means the rank hit the degree budget with a
    residual too large to certify the model order.
    """

    poly: Polynomial
    r_min: tuple
    hankel_rank: int
    multiplicities: tuple = ()
    annihilation_residual: float = 0.0
    saturated: bool = False


@dataclass(frozen=True)
class ShiftCombination:
    """A finite combination sum_n b_n T(g_n) defining the operator B.

    The coefficient b_n is complex and nonzero; the shift g_n is whatever
    the instance's group uses (a real number, a pair, ...). The symbol is
    h(gamma) = sum_n b_n * character(gamma, g_n) with the character
    supplied by the instance.
    """

    terms: tuple

    def __post_init__(self):
        terms = tuple((complex(b), g) for b, g in self.terms)
        if not terms:
            raise ContractViolationError("need at least one shift term")
        if any(b == 0 for b, _ in terms):
            raise ContractViolationError("shift coefficients must be nonzero")
        object.__setattr__(self, "terms", terms)


@dataclass(frozen=True, eq=False)
class Mode:
    """One spectral point with its coefficient vector (length <= M)."""

    gamma: Any
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.atleast_1d(np.asarray(self.coeffs, dtype=np.complex128))
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True)
class SparseSignalModel:
    """A sparse spectral model: distinct points gamma with coefficients."""

    modes: tuple

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))

    @property
    def spectrum(self) -> tuple:
        return tuple(m.gamma for m in self.modes)

    def __len__(self) -> int:
        return len(self.modes)


def _default_key(gamma):
    if isinstance(gamma, complex):
        return (gamma.real, gamma.imag)
    try:
        return tuple(float(x) for x in gamma)
    except TypeError:
        return (float(gamma),)


def _default_distance(a, b):
    ka, kb = _default_key(a), _default_key(b)
    return math.sqrt(sum((x - y) ** 2 for x, y in zip(ka, kb)))


@dataclass(frozen=True)
class InstanceDescriptor:
    """Everything the generic pipeline needs to know about one instance.

    symbol maps a spectral point to the complex eigenvalue through which B
    acts on it; symbol_inverse undoes that on Omega (None when no inverse
    is available, e.g. a deliberately non-injective setup under study).
    coefficient_system(F, L, probes) returns the forward matrix whose rows
    follow the record's (l, s) row-major flattening.

    The optional fields power refinement and reporting: coordinate_key
    orders spectral points deterministically, coordinate_distance is the
    instance metric (circle, torus, plane), mode_width gives the
    coefficient block size per point, and the params/columns callables
    expose a smooth parametrization for Gauss-Newton polish.
    """

    name: str
    symbol: Callable[[Any], complex]
    symbol_inverse: Optional[Callable[[complex], Any]]
    omega_contains: Callable[[Any], bool]
    coefficient_system: Callable[[Sequence, int, Any], np.ndarray]
    mode_dimension: int
    probes: Any = None
    mode_width: Callable[[Any], int] = field(default=lambda gamma: 1)
    coordinate_key: Callable[[Any], tuple] = field(default=_default_key)
    coordinate_distance: Callable[[Any, Any], float] = field(default=_default_distance)
    coordinate_params: Optional[Callable[[Any], tuple]] = None
    params_coordinate: Optional[Callable[[tuple], Any]] = None
    mode_columns: Optional[Callable[[Any, int, Any], np.ndarray]] = None
    mode_columns_gradient: Optional[Callable[[Any, int, Any], list]] = None

    @property
    def supports_refinement(self) -> bool:
        return (self.coordinate_params is not None
                and self.params_coordinate is not None
                and self.mode_columns is not None
                and self.mode_columns_gradient is not None)


# ---------------------------------------------------------------------------
# pipeline stages


def build_block_hankel(meas: MeasurementRecord, degree: int) -> np.ndarray:
    """Block Hankel matrix of the annihilator system at the given degree.

    Per channel s, rows k = 0..L-degree hold (y_k(s), ..., y_{k+degree}(s));
    the per-channel blocks are stacked vertically, so a single annihilator
    must serve every channel. Shape: (S*(L-degree+1), degree+1).
    """
    if degree < 1:
        raise ContractViolationError("degree must be >= 1")
    L, S = meas.L, meas.S
    required = 2 * degree - 1
    if L < required:
        raise NotEnoughMeasurementsError(
            f"not enough measurements: have L = {L}, need L >= {required} "
            f"for degree {degree}",
            required_L=required,
        )
    n_shifts = L - degree + 1
    blocks = []
    for s in range(S):
        chan = meas.values[:, s]
        block = np.empty((n_shifts, degree + 1), dtype=np.complex128)
        for k in range(n_shifts):
            block[k, :] = chan[k : k + degree + 1]
        blocks.append(block)
    return np.vstack(blocks)


def _cluster_roots(roots: np.ndarray, radius: float):
    """Single-linkage clustering; returns (centroids, sizes) sorted."""
    n = roots.size
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= radius:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj
    groups = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(roots[i])
    clustered = [(complex(np.mean(g)), len(g)) for g in groups.values()]
    clustered.sort(key=lambda item: (item[0].real, item[0].imag))
    centroids = tuple(c for c, _ in clustered)
    sizes = tuple(m for _, m in clustered)
    return centroids, sizes


def _coeffs_from_structure(n_zero: int, centers, mults,
                           drop: int = -1) -> np.ndarray:
    """Ascending coefficients of z^n_zero * prod (z - c_j)^(m_j).

    drop >= 0 lowers that center's multiplicity by one (used for the
    derivative with respect to c_drop).
    """
    c = np.array([1.0 + 0.0j])
    for j, (center, m) in enumerate(zip(centers, mults)):
        reps = m - 1 if j == drop else m
        factor = np.array([-complex(center), 1.0 + 0.0j])
        for _ in range(reps):
            c = np.convolve(c, factor)
    if n_zero:
        c = np.concatenate([np.zeros(n_zero, dtype=np.complex128), c])
    return c


def _polish_clusters(hankel: np.ndarray, n_zero: int, centers, mults,
                     iterations: int = 3):
    """Gauss-Newton on the annihilation residual in root coordinates.

    The least-squares solve determines the monomial coefficients only up
    to the Hankel's conditioning, and a multiplicity-m root amplifies
    coefficient error to its m-th root. Parametrizing the polynomial by
    its distinct roots with fixed multiplicities removes both effects:
    the residual is smooth in the centers and its Jacobian columns
    -m_j * z^k * p(z)/(z - c_j) are well scaled for separated clusters.
    Keeps the best iterate; exact-data inputs converge in one step.
    """
    cur = np.array(centers, dtype=np.complex128)
    if cur.size == 0:
        return centers

    def residual_of(vec):
        return hankel @ _coeffs_from_structure(n_zero, vec, mults)

    best = cur.copy()
    best_norm = float(np.linalg.norm(residual_of(cur)))
    for _ in range(iterations):
        f = residual_of(cur)
        jac = np.empty((hankel.shape[0], cur.size), dtype=np.complex128)
        for j in range(cur.size):
            dcoeffs = _coeffs_from_structure(n_zero, cur, mults, drop=j)
            dcoeffs = np.append(-mults[j] * dcoeffs, 0.0)
            jac[:, j] = hankel @ dcoeffs
        step = least_squares_solve(jac, -f)
        cur = cur + step
        norm = float(np.linalg.norm(residual_of(cur)))
        if norm < best_norm:
            best, best_norm = cur.copy(), norm
    return tuple(complex(c) for c in best)


def minimal_annihilator(meas: MeasurementRecord,
                        cfg: RecoveryConfig) -> AnnihilatorResult:
    """Minimal monic annihilating polynomial of the measurement record.

    The degree budget is kappa*M. The rank r of the block Hankel at that
    budget is the minimal annihilator degree; a first estimate of the
    monic degree-r polynomial comes from least squares on the first r
    Hankel columns against the negated column r, and its clustered roots
    are then polished against the annihilation equations directly. The
    all-zero record yields the trivial annihilator 1 with no roots.
    """
    budget = cfg.degree_budget
    if meas.L < cfg.min_L:
        raise NotEnoughMeasurementsError(
            f"not enough measurements: have L = {meas.L}, need L >= {cfg.min_L} "
            f"for kappa*M = {budget}",
            required_L=cfg.min_L,
        )
    scale = float(np.max(np.abs(meas.values)))
    if scale == 0.0:
        return AnnihilatorResult(
            poly=Polynomial(np.array([1.0 + 0.0j])),
            r_min=(), hankel_rank=0,
        )

    hankel = build_block_hankel(meas, budget)
    rank = numerical_rank(hankel, cfg.rank_rel_tol)
    degree = min(rank, budget)

    if degree == 0:
        return AnnihilatorResult(
            poly=Polynomial(np.array([1.0 + 0.0j])),
            r_min=(), hankel_rank=rank,
        )

    alpha = least_squares_solve(hankel[:, :degree], -hankel[:, degree])
    roots = polynomial_roots(np.concatenate([alpha, [1.0 + 0.0j]]))
    nonzero = roots[np.abs(roots) > cfg.zero_root_tol]
    n_zero = degree - nonzero.size

    # multiplicity > 1 requires M > 1; with M = 1 nearby roots are
    # genuinely distinct and must not be merged
    cluster_radius = cfg.root_cluster_tol if cfg.M > 1 else 0.0
    r_min, mults = _cluster_roots(nonzero, cluster_radius)

    check = build_block_hankel(meas, degree)
    r_min = _polish_clusters(check, n_zero, r_min, mults)
    coeffs = _coeffs_from_structure(n_zero, r_min, mults)
    poly = Polynomial(coeffs)

    # residual of the annihilation identity over every available shift,
    # per shift k across channels, relative to the largest measurement
    res_by_shift = (check @ coeffs).reshape(meas.S, meas.L - degree + 1)
    denom = float(np.max(np.linalg.norm(meas.values, axis=1)))
    residual = float(np.max(np.linalg.norm(res_by_shift, axis=0))) / denom

    saturated = rank > budget or (rank == budget
                                  and residual > cfg.residual_warn_tol)

    return AnnihilatorResult(
        poly=poly,
        r_min=r_min,
        hankel_rank=rank,
        multiplicities=mults,
        annihilation_residual=residual,
        saturated=saturated,
    )


def _invert_root(root, inst: InstanceDescriptor, cfg: RecoveryConfig):
    if inst.symbol_inverse is None:
        raise SpuriousRootError(
            f"instance {inst.name!r} has no symbol inverse", root=root)
    gamma = inst.symbol_inverse(root)
    if not inst.omega_contains(gamma):
        raise SpuriousRootError(
            f"inverted point {gamma!r} lies outside Omega", root=root)
    err = abs(inst.symbol(gamma) - root)
    if err > cfg.root_match_tol:
        raise SpuriousRootError(
            f"root {root!r} round-trips with error {err:.3e} "
            f"(> {cfg.root_match_tol:.1e})", root=root)
    return gamma


def recover_spectrum(ann: AnnihilatorResult, inst: InstanceDescriptor,
                     cfg: RecoveryConfig) -> tuple:
    """Pull each nonzero annihilator root back to a spectral point.

    Raises SpuriousRootError for any root without a preimage in Omega
    within root_match_tol; silent dropping would hide model mismatch.
    The result is sorted by the instance's coordinate order.
    """
    gammas = [_invert_root(root, inst, cfg) for root in ann.r_min]
    gammas.sort(key=inst.coordinate_key)
    return tuple(gammas)


@dataclass(frozen=True)
class CoefficientFit:
    """Least-squares coefficient solve: model, relative residual, warnings."""

    model: SparseSignalModel
    residual: float
    warnings: tuple = ()


def recover_coefficients(F: Sequence, meas: MeasurementRecord,
                         inst: InstanceDescriptor,
                         rank_rel_tol: float = 1e-10,
                         drop_tol: float = 1e-10) -> CoefficientFit:
    """Solve the instance's coefficient system for the points in F.

    The minimum-norm least-squares solution is reported together with its
    relative residual. A rank-deficient system attaches a non-uniqueness
    warning (the solution is then one representative of an affine
    family). Modes whose whole coefficient vector stays below drop_tol
    are removed.
    """
    rhs = meas.values.reshape(-1)
    rhs_norm = float(np.linalg.norm(rhs))
    warnings_: list = []
    F = list(F)
    if not F:
        if rhs_norm > 0:
            warnings_.append("empty spectrum cannot explain nonzero measurements")
            return CoefficientFit(SparseSignalModel(()), 1.0, tuple(warnings_))
        return CoefficientFit(SparseSignalModel(()), 0.0)

    system = as_complex_matrix(
        inst.coefficient_system(F, meas.L, inst.probes), "coefficient system")
    widths = [inst.mode_width(g) for g in F]
    if system.shape != (rhs.size, sum(widths)):
        raise ContractViolationError(
            f"coefficient system shape {system.shape} does not match "
            f"measurements x unknowns ({rhs.size}, {sum(widths)})")

    x = least_squares_solve(system, rhs)
    if rhs_norm > 0:
        residual = float(np.linalg.norm(system @ x - rhs)) / rhs_norm
    else:
        residual = 0.0
    if numerical_rank(system, rank_rel_tol) < system.shape[1]:
        warnings_.append("non-unique coefficients: system is rank deficient")

    modes = []
    offset = 0
    for gamma, width in zip(F, widths):
        chunk = x[offset : offset + width]
        offset += width
        if float(np.max(np.abs(chunk))) >= drop_tol:
            modes.append(Mode(gamma, chunk))
    modes.sort(key=lambda m: inst.coordinate_key(m.gamma))
    return CoefficientFit(SparseSignalModel(tuple(modes)), residual,
                          tuple(warnings_))


def _refine_spectrum(F: list, meas: MeasurementRecord,
                     inst: InstanceDescriptor, iterations: int) -> list:
    """Variable-projection Gauss-Newton polish of the spectral coordinates.

    Coefficients are eliminated exactly at each step (solve for c given
    the coordinates, then one Newton step on the coordinates). Since the
    residual is orthogonal to the span of the current model columns, the
    coordinate Jacobian must be projected off that span too; the raw
    Jacobian would overlap the directions the coefficient re-solve
    absorbs and the step would stall or drift. Steps are halved while
    they grow the residual and the lowest-residual iterate wins, so the
    polish never leaves the coordinates worse than it found them.
    Requires the instance to expose a smooth parametrization; instances
    with a discrete Omega simply do not.
    """
    rhs = meas.values.reshape(-1)

    def evaluate(ps):
        gammas = [inst.params_coordinate(tuple(p)) for p in ps]
        cols = [inst.mode_columns(g, meas.L, inst.probes) for g in gammas]
        system = np.hstack(cols)
        c = least_squares_solve(system, rhs)
        resid = rhs - system @ c
        return gammas, cols, system, c, resid

    params = [list(inst.coordinate_params(g)) for g in F]
    gammas, cols, system, c, resid = evaluate(params)
    best_norm = float(np.linalg.norm(resid))
    best_params = [list(p) for p in params]
    for _ in range(iterations):
        jac_cols = []
        offset = 0
        for j, g in enumerate(gammas):
            width = cols[j].shape[1]
            cj = c[offset : offset + width]
            offset += width
            for dcols in inst.mode_columns_gradient(g, meas.L, inst.probes):
                jac_cols.append(dcols @ cj)
        jac = np.column_stack(jac_cols)
        q = orthonormal_range(system)
        jac = jac - q @ (q.conj().T @ jac)
        # real Gauss-Newton step on the stacked real/imag system
        jr = np.vstack([jac.real, jac.imag])
        rr = np.concatenate([resid.real, resid.imag])
        step = least_squares_solve(jr, rr).real
        # a full step amplifies roundoff along weakly identified
        # directions (e.g. a low-gain path among strong ones), so halve
        # while the residual grows and hand back the best visit overall
        scale = 1.0
        for attempt in range(4):
            candidate = [list(p) for p in params]
            k = 0
            for p in candidate:
                for idx in range(len(p)):
                    p[idx] += scale * step[k]
                    k += 1
            state = evaluate(candidate)
            norm = float(np.linalg.norm(state[4]))
            if norm <= best_norm or attempt == 3:
                break
            scale *= 0.5
        params = candidate
        gammas, cols, system, c, resid = state
        if norm < best_norm:
            best_norm = norm
            best_params = [list(p) for p in params]
    return [inst.params_coordinate(tuple(p)) for p in best_params]


@dataclass(frozen=True)
class RecoveryResult:
    """Full pipeline output: the model plus every diagnostic."""

    model: SparseSignalModel
    spectrum: tuple
    annihilator: AnnihilatorResult
    coefficient_residual: float
    warnings: tuple = ()
    spurious_roots: tuple = ()


def run_recovery(meas: MeasurementRecord, inst: InstanceDescriptor,
                 cfg: RecoveryConfig, on_spurious: str = "raise",
                 refine_iterations: int = 0) -> RecoveryResult:
    """Annihilator, spectrum, coefficients, in that order.

    on_spurious='warn' records unmatchable roots as warnings and carries
    on with the rest (the batch/CLI behavior); 'raise' propagates them.
    refine_iterations > 0 adds Gauss-Newton polish of the recovered
    coordinates on instances that support it.
    """
    if on_spurious not in ("raise", "warn"):
        raise ContractViolationError("on_spurious must be 'raise' or 'warn'")
    ann = minimal_annihilator(meas, cfg)

    gammas = []
    spurious = []
    warnings_: list = []
    for root in ann.r_min:
        try:
            gammas.append(_invert_root(root, inst, cfg))
        except SpuriousRootError as exc:
            if on_spurious == "raise":
                raise
            spurious.append(root)
            warnings_.append(f"spurious root {root!r}: {exc}")
    gammas.sort(key=inst.coordinate_key)

    if refine_iterations > 0 and gammas and inst.supports_refinement:
        gammas = _refine_spectrum(gammas, meas, inst, refine_iterations)
        gammas.sort(key=inst.coordinate_key)

    if ann.saturated:
        warnings_.append(
            "rank saturation: annihilator degree hit the kappa*M budget "
            f"with residual {ann.annihilation_residual:.3e}; "
            "the true model may need a larger kappa")

    fit = recover_coefficients(gammas, meas, inst)
    warnings_.extend(fit.warnings)
    if fit.residual > cfg.residual_warn_tol:
        warnings_.append(
            f"coefficient fit residual {fit.residual:.3e} exceeds "
            f"{cfg.residual_warn_tol:.1e}; model may not explain the data")

    return RecoveryResult(
        model=fit.model,
        spectrum=tuple(m.gamma for m in fit.model.modes),
        annihilator=ann,
        coefficient_residual=fit.residual,
        warnings=tuple(warnings_),
        spurious_roots=tuple(spurious),
    )


# ---------------------------------------------------------------------------
# symbol validation


@dataclass(frozen=True)
class SymbolValidation:
    """Grid certificate for the recovery hypotheses on the symbol.

    Injectivity and nonvanishing are necessary for unambiguous root
    inversion; the round-trip error checks the inverse actually inverts.
    """

    grid_size: int
    min_pair_separation: float
    min_modulus: float
    max_roundtrip: float
    roundtrip_available: bool
    injective_pass: bool
    nonvanishing_pass: bool
    roundtrip_pass: bool

    @property
    def passed(self) -> bool:
        return (self.injective_pass and self.nonvanishing_pass
                and self.roundtrip_pass)


def validate_symbol(inst: InstanceDescriptor, grid: Sequence,
                    roundtrip_tol: float = 1e-9,
                    separation_floor: float = 1e-12) -> SymbolValidation:
    """Check injectivity, nonvanishing, and inverse round-trip on a grid."""
    grid = list(grid)
    if len(grid) < 2:
        raise ContractViolationError("validation grid needs at least 2 points")
    values = np.array([inst.symbol(g) for g in grid], dtype=np.complex128)

    min_sep = math.inf
    chunk = 256
    for start in range(0, len(values), chunk):
        block = values[start : start + chunk]
        diff = np.abs(block[:, None] - values[None, start:])
        # row i is global index start+i, column j is global start+j; only
        # pairs with j > i count, the rest (self and duplicates) mask to inf
        rows, cols = np.indices(diff.shape)
        diff[cols <= rows] = np.inf
        if diff.size:
            min_sep = min(min_sep, float(np.min(diff)))

    min_mod = float(np.min(np.abs(values)))

    max_rt = 0.0
    roundtrip_available = inst.symbol_inverse is not None
    if roundtrip_available:
        for g, z in zip(grid, values):
            try:
                back = inst.symbol_inverse(z)
            except SpuriousRootError:
                max_rt = math.inf
                break
            max_rt = max(max_rt, inst.coordinate_distance(back, g))

    return SymbolValidation(
        grid_size=len(grid),
        min_pair_separation=min_sep,
        min_modulus=min_mod,
        max_roundtrip=max_rt,
        roundtrip_available=roundtrip_available,
        injective_pass=min_sep > separation_floor,
        nonvanishing_pass=min_mod > separation_floor,
        roundtrip_pass=(not roundtrip_available) or max_rt <= roundtrip_tol,
    )


def intersect_spectra(spectra: Sequence[Sequence], distance: Callable,
                      tol: float = 1e-6) -> tuple:
    """Spectral points common to several recovery runs.

    The escape hatch when a single operator's symbol is not injective:
    recover once per shift combination and keep the candidates of the
    first run that reappear, within tol of the given metric, in every
    other run. Points are returned in first-run order.
    """
    spectra = [list(s) for s in spectra]
    if not spectra:
        return ()
    return tuple(g for g in spectra[0]
                 if all(any(distance(g, other) <= tol for other in rest)
                        for rest in spectra[1:]))
