"""Forward synthesis and independent numerical checks.

synthesize dispatches ground truth through the instance modules and can
add seeded circularly-symmetric complex Gaussian noise. The quadrature
rule and the fixed-degree annihilator below are written directly against
the definitions, on plain numpy, independent of the library's kernel and
pipeline; tests hold one implementation against the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from . import channel as _channel
from . import classic as _classic
from . import confluent as _confluent
from . import dynamical as _dynamical
from .annihilator import MeasurementRecord
from .errors import ContractViolationError
from .numerics import Polynomial


@dataclass(frozen=True, eq=False)
class SynthesisRequest:
    """Ground truth plus sampling parameters for one forward evaluation.

    model and setup are kind-specific:
      classic    model = (frequencies, coefficients), setup = ShiftCombination or None
      confluent  model = list of PolynomialMode (or (gamma, q_coeffs) pairs)
      dynamical  model = initial state vector x0, setup = DynamicalProblem
      channel    model = ChannelModel (or list of ((t, nu), gain)), setup = ChannelProbeSetup or None
    """

    kind: str
    L: int
    model: Any
    setup: Any = None
    noise_sigma: float = 0.0
    seed: Optional[int] = None


def synthesize(req: SynthesisRequest) -> MeasurementRecord:
    """Exact forward evaluation, with optional seeded complex Gaussian noise."""
    if req.noise_sigma < 0:
        raise ContractViolationError("noise_sigma must be nonnegative")
    if req.noise_sigma > 0 and req.seed is None:
        raise ContractViolationError(
            "noisy synthesis needs an explicit seed so failures reproduce")

    if req.kind == "classic":
        freqs, coeffs = req.model
        record = _classic.synthesize(freqs, coeffs, req.L, shifts=req.setup)
    elif req.kind == "confluent":
        modes = [m if isinstance(m, _confluent.PolynomialMode)
                 else _confluent.PolynomialMode(*m) for m in req.model]
        record = _confluent.synthesize(modes, req.L)
    elif req.kind == "dynamical":
        if not isinstance(req.setup, _dynamical.DynamicalProblem):
            raise ContractViolationError(
                "dynamical synthesis needs a DynamicalProblem as setup")
        record = _dynamical.dynamical_measure(req.setup, req.model, req.L)
    elif req.kind == "channel":
        model = (req.model if isinstance(req.model, _channel.ChannelModel)
                 else _channel.ChannelModel(tuple(req.model)))
        setup = req.setup if req.setup is not None else _channel.DEFAULT_SETUP
        record = _channel.channel_measure(model, setup, req.L)
    else:
        raise ContractViolationError(f"unknown instance kind {req.kind!r}")

    if req.noise_sigma > 0:
        rng = np.random.default_rng(req.seed)
        shape = record.values.shape
        noise = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
        record = MeasurementRecord(
            record.values + req.noise_sigma / math.sqrt(2.0) * noise)
    return record


# ---------------------------------------------------------------------------
# quadrature oracle for the Gaussian cross term


def _trapezoid(f, a: float, b: float, n: int) -> complex:
    xs = np.linspace(a, b, n + 1)
    ys = f(xs)
    h = (b - a) / n
    return complex(h * (0.5 * ys[0] + ys[1:-1].sum() + 0.5 * ys[-1]))


def quadrature_inner_product(gamma, s=(0.0, 0.0)) -> complex:
    """<pi_gamma pi_s u, pi_s u> by composite trapezoid on [-8, 8].

    The window pi_s u and the outer shift are evaluated literally; the
    step is halved until the value is stable to 1e-12. Trapezoid on a
    rapidly decaying smooth integrand converges geometrically, so the
    loop terminates after one or two refinements.
    """
    t, nu = float(gamma[0]), float(gamma[1])
    ts, ns = float(s[0]), float(s[1])

    def window(r):
        return np.exp(2j * math.pi * r * ns) * np.exp(-((r + ts) ** 2))

    def integrand(r):
        return np.exp(2j * math.pi * r * nu) * window(r + t) * np.conj(window(r))

    half_width = 8.0
    n = 4096
    prev = _trapezoid(integrand, -half_width, half_width, n)
    for _ in range(8):
        n *= 2
        cur = _trapezoid(integrand, -half_width, half_width, n)
        if abs(cur - prev) <= 1e-12:
            return cur
        prev = cur
    return prev


# ---------------------------------------------------------------------------
# fixed-degree annihilator, solved the long way


def _stacked_hankel(values: np.ndarray, degree: int) -> np.ndarray:
    L = values.shape[0] - 1
    rows = []
    for s in range(values.shape[1]):
        for k in range(L - degree + 1):
            rows.append(values[k : k + degree + 1, s])
    return np.array(rows)


def brute_force_annihilator(meas, degree: int) -> Polynomial:
    """Monic fixed-degree annihilator with as many low-order zeros as possible.

    Solves the full homogeneous system at the given degree by least
    squares, then greedily forces alpha_0, alpha_1, ... to zero for as
    long as the system stays satisfiable (residual below 1e-10 times the
    measurement scale). The all-zero record therefore returns z^degree.
    Deliberately straightforward; small degrees only.
    """
    if degree < 1 or degree > 6:
        raise ContractViolationError("brute force is for degrees 1..6")
    if not isinstance(meas, MeasurementRecord):
        arr = np.asarray(meas, dtype=np.complex128)
        meas = (MeasurementRecord.from_samples(arr) if arr.ndim == 1
                else MeasurementRecord(arr))
    if meas.L < degree:
        raise ContractViolationError(
            f"need L >= {degree}, have L = {meas.L}")

    hankel = _stacked_hankel(meas.values, degree)
    scale = float(np.max(np.abs(meas.values)))
    threshold = 1e-10 * scale

    def solve_with_zeros(k):
        """Force alpha_0..alpha_{k-1} = 0; return (coeffs, residual)."""
        coeffs = np.zeros(degree + 1, dtype=np.complex128)
        coeffs[degree] = 1.0
        rhs = -hankel[:, degree]
        if k < degree:
            sub = hankel[:, k:degree]
            sol, *_ = np.linalg.lstsq(sub, rhs, rcond=None)
            coeffs[k:degree] = sol
        residual = float(np.linalg.norm(hankel @ coeffs))
        return coeffs, residual

    best, _ = solve_with_zeros(0)
    for k in range(1, degree + 1):
        coeffs, residual = solve_with_zeros(k)
        if residual <= threshold:
            best = coeffs
        else:
            break
    return Polynomial(best)
