"""Command line surface: synth | recover | validate-symbol | batch.

File format is JSON with a top-level "kind" discriminator. Complex
numbers are two-element arrays [re, im]; matrices are row-major nested
arrays. Reports are built with a fixed field order and no timestamps, so
identical inputs produce byte-identical output; --timing opts into a
wall-clock field at the cost of that guarantee.

Exit codes: 0 clean, 1 completed with warnings (spurious roots, rank
saturation, failed validation), 2 malformed input, 3 I/O or internal
failure. PRONY_LOG=debug|info|warning|error sets the log level.
"""

from __future__ import annotations

import argparse
import cmath
import json
import logging
import math
import os
import sys
import time
import traceback
from typing import Optional

import numpy as np

from . import channel as _channel
from . import classic as _classic
from . import confluent as _confluent
from . import dynamical as _dynamical
from . import oracle as _oracle
from .annihilator import (
    MeasurementRecord,
    RecoveryConfig,
    ShiftCombination,
    run_recovery,
    validate_symbol,
)
from .errors import ContractViolationError

log = logging.getLogger("pronykit")

_KINDS = ("classic", "confluent", "dynamical", "channel")


class SchemaError(ContractViolationError):
    """Input file does not match the documented JSON layout."""


# ---------------------------------------------------------------------------
# JSON primitives


def _require(obj, field: str, where: str):
    if not isinstance(obj, dict) or field not in obj:
        raise SchemaError(f"missing required field {field!r} in {where}")
    return obj[field]


def _real(v, where: str) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{where} must be a number")
    v = float(v)
    if not math.isfinite(v):
        raise SchemaError(f"{where} must be finite")
    return v


def _count(v, where: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise SchemaError(f"{where} must be an integer")
    return v


def _cplx(v, where: str) -> complex:
    if not (isinstance(v, list) and len(v) == 2):
        raise SchemaError(f"{where} must be a two-element [re, im] array")
    return complex(_real(v[0], where), _real(v[1], where))


def _c2j(z: complex) -> list:
    return [float(z.real), float(z.imag)]


def _pair(v, where: str) -> tuple:
    if not (isinstance(v, list) and len(v) == 2):
        raise SchemaError(f"{where} must be a two-element array")
    return (_real(v[0], where), _real(v[1], where))


def _matrix(v, where: str) -> np.ndarray:
    if not (isinstance(v, list) and v and all(isinstance(r, list) for r in v)):
        raise SchemaError(f"{where} must be a nested array")
    return np.array([[_cplx(x, where) for x in row] for row in v])


def _load_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _dump_json(doc, path: Optional[str]) -> None:
    text = json.dumps(doc, indent=2) + "\n"
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# instance (re)construction from file parameters


def _shift_terms_from(doc, where: str, planar: bool) -> ShiftCombination:
    if not isinstance(doc, list) or not doc:
        raise SchemaError(f"{where} must be a nonempty array of shift terms")
    terms = []
    for i, item in enumerate(doc):
        term_where = f"{where}[{i}]"
        b = _cplx(_require(item, "b", term_where), f"{term_where}.b")
        g_raw = _require(item, "g", term_where)
        g = _pair(g_raw, f"{term_where}.g") if planar else _real(
            g_raw, f"{term_where}.g")
        terms.append((b, g))
    return ShiftCombination(tuple(terms))


def _dynamical_problem_from(inst: dict, where: str) -> _dynamical.DynamicalProblem:
    if "on_grid" in inst:
        grid = inst["on_grid"]
        d = _count(_require(grid, "dimension", f"{where}.on_grid"),
                   f"{where}.on_grid.dimension")
        beta = _real(grid.get("beta", 1.0), f"{where}.on_grid.beta")
        idx = grid.get("sampled_indices", [0])
        if not isinstance(idx, list) or not idx:
            raise SchemaError(f"{where}.on_grid.sampled_indices must be a "
                              "nonempty array")
        return _dynamical.on_grid_problem(
            d, tuple(_count(i, "sampled index") for i in idx), beta)
    generator = _matrix(_require(inst, "generator", where), f"{where}.generator")
    basis_doc = _require(inst, "basis", where)
    entries = []
    for i, entry in enumerate(basis_doc):
        ew = f"{where}.basis[{i}]"
        value = _cplx(_require(entry, "eigenvalue", ew), f"{ew}.eigenvalue")
        chain = [[_cplx(x, f"{ew}.chain") for x in vec]
                 for vec in _require(entry, "chain", ew)]
        entries.append((value, tuple(np.array(v) for v in chain)))
    sample_basis = _matrix(_require(inst, "sample_basis", where),
                           f"{where}.sample_basis")
    idx = _require(inst, "sampled_indices", where)
    beta = _real(_require(inst, "beta", where), f"{where}.beta")
    return _dynamical.DynamicalProblem(
        A=generator, basis=_dynamical.GeneralizedEigenbasis(tuple(entries)),
        sample_basis=sample_basis,
        I=tuple(_count(i, "sampled index") for i in idx), beta=beta)


def _build_instance(kind: str, inst: dict, where: str):
    """Descriptor plus whatever the grid for validate-symbol should be."""
    if kind == "classic":
        shifts = (_shift_terms_from(inst["shifts"], f"{where}.shifts", False)
                  if "shifts" in inst else None)
        return _classic.make_instance(shifts), None
    if kind == "confluent":
        D = _count(_require(inst, "degree_bound", where), f"{where}.degree_bound")
        return _confluent.make_instance(D), None
    if kind == "dynamical":
        prob = _dynamical_problem_from(inst, where)
        return _dynamical.make_instance(prob), prob
    if kind == "channel":
        terms = (_shift_terms_from(inst["shifts"], f"{where}.shifts", True)
                 if "shifts" in inst else _channel.DEFAULT_SHIFT_TERMS)
        probes = tuple(_pair(p, f"{where}.probes") for p in inst["probes"]) \
            if "probes" in inst else ((0.0, 0.0),)
        setup = _channel.ChannelProbeSetup(probes=probes, shift_terms=terms)
        return _channel.make_instance(setup), setup
    raise SchemaError(f"unknown kind {kind!r}; expected one of {_KINDS}")


def _instance_doc(kind: str, problem: dict) -> dict:
    """The parameters a measurement file must carry to rebuild the instance."""
    inst = {}
    if kind in ("classic", "channel") and "shifts" in problem:
        inst["shifts"] = problem["shifts"]
    if kind == "confluent":
        inst["degree_bound"] = _require(problem, "degree_bound", "problem")
    if kind == "channel" and "probes" in problem:
        inst["probes"] = problem["probes"]
    if kind == "dynamical":
        for key in ("on_grid", "generator", "basis", "sample_basis",
                    "sampled_indices", "beta"):
            if key in problem:
                inst[key] = problem[key]
        if "on_grid" not in inst and "generator" not in inst:
            raise SchemaError(
                "missing required field 'on_grid' (or a full generator "
                "description) in problem")
    return inst


# ---------------------------------------------------------------------------
# synth


def _synth_request(problem: dict, seed) -> tuple:
    kind = _require(problem, "kind", "problem")
    if kind not in _KINDS:
        raise SchemaError(f"unknown kind {kind!r}; expected one of {_KINDS}")
    L = _count(_require(problem, "L", "problem"), "L")
    kappa = _count(_require(problem, "kappa", "problem"), "kappa")
    model_doc = _require(problem, "model", "problem")
    sigma = _real(problem.get("noise_sigma", 0.0), "noise_sigma")
    inst_doc = _instance_doc(kind, problem)

    if kind == "classic":
        freqs = [_real(t, "model.frequencies") for t in
                 _require(model_doc, "frequencies", "model")]
        coeffs = [_cplx(c, "model.coefficients") for c in
                  _require(model_doc, "coefficients", "model")]
        shifts = (_shift_terms_from(problem["shifts"], "problem.shifts", False)
                  if "shifts" in problem else None)
        req = _oracle.SynthesisRequest("classic", L, (freqs, coeffs), shifts,
                                       sigma, seed)
        M = 1
    elif kind == "confluent":
        D = _count(_require(problem, "degree_bound", "problem"), "degree_bound")
        modes = []
        for i, m in enumerate(_require(model_doc, "modes", "model")):
            mw = f"model.modes[{i}]"
            gamma = _real(_require(m, "frequency", mw), f"{mw}.frequency")
            q = [_cplx(c, f"{mw}.q_coeffs") for c in _require(m, "q_coeffs", mw)]
            if len(q) > D + 1:
                raise SchemaError(f"{mw}.q_coeffs longer than degree_bound + 1")
            modes.append(_confluent.PolynomialMode(gamma, q))
        req = _oracle.SynthesisRequest("confluent", L, modes, None, sigma, seed)
        M = D + 1
    elif kind == "dynamical":
        prob = _dynamical_problem_from(inst_doc, "problem")
        support = [_count(i, "model.support") for i in
                   _require(model_doc, "support", "model")]
        coeffs = [_cplx(c, "model.coefficients") for c in
                  _require(model_doc, "coefficients", "model")]
        if len(support) != len(coeffs):
            raise SchemaError("model.support and model.coefficients must "
                              "have equal length")
        x0 = _dynamical.assemble_state(
            prob.basis, [(n, 0, c) for n, c in zip(support, coeffs)])
        req = _oracle.SynthesisRequest("dynamical", L, x0, prob, sigma, seed)
        M = max(len(chain) for _, chain in prob.basis.entries)
    else:
        paths = []
        for i, p in enumerate(_require(model_doc, "paths", "model")):
            pw = f"model.paths[{i}]"
            paths.append(((_real(_require(p, "t", pw), f"{pw}.t"),
                           _real(_require(p, "nu", pw), f"{pw}.nu")),
                          _cplx(_require(p, "gain", pw), f"{pw}.gain")))
        inst, setup = _build_instance(kind, inst_doc, "problem")
        req = _oracle.SynthesisRequest("channel", L,
                                       _channel.ChannelModel(tuple(paths)),
                                       setup, sigma, seed)
        M = 1
    if "M" in problem:
        M = _count(problem["M"], "M")
    return req, inst_doc, {"kappa": kappa, "M": M}, model_doc


def cmd_synth(args) -> int:
    problem = _load_json(args.problem)
    req, inst_doc, config, model_doc = _synth_request(problem, args.seed)
    record = _oracle.synthesize(req)
    out = {
        "kind": req.kind,
        "L": record.L,
        "channels": record.S,
        "values": [[_c2j(v) for v in row] for row in record.values],
        "config": config,
        "instance": inst_doc,
        "truth": model_doc,
    }
    _dump_json(out, args.output)
    log.info("synthesized %s record: L=%d, S=%d", req.kind, record.L, record.S)
    return 0


# ---------------------------------------------------------------------------
# recover


def _config_from(measurement: dict, args) -> RecoveryConfig:
    fields = {}
    fields.update(measurement.get("config", {}))
    if getattr(args, "config", None):
        override = _load_json(args.config)
        if not isinstance(override, dict):
            raise SchemaError("--config file must hold a JSON object")
        fields.update(override)
    for item in getattr(args, "tolerance", None) or []:
        if "=" not in item:
            raise SchemaError(f"--tolerance expects key=value, got {item!r}")
        key, _, value = item.partition("=")
        try:
            fields[key] = float(value)
        except ValueError:
            raise SchemaError(f"--tolerance value for {key!r} is not a number")
    if "kappa" not in fields:
        raise SchemaError("missing required field 'kappa' in config")
    known = {"kappa", "M", "rank_rel_tol", "zero_root_tol", "root_match_tol",
             "root_cluster_tol", "residual_warn_tol"}
    unknown = sorted(set(fields) - known)
    if unknown:
        raise SchemaError(f"unknown config fields: {', '.join(unknown)}")
    fields["kappa"] = int(fields["kappa"])
    fields["M"] = int(fields.get("M", 1))
    return RecoveryConfig(**fields)


def _gamma_to_json(kind: str, gamma):
    if kind in ("classic", "confluent"):
        return float(gamma)
    if kind == "dynamical":
        return _c2j(complex(gamma))
    return [float(gamma[0]), float(gamma[1])]


def _report(kind: str, result, cfg: RecoveryConfig) -> dict:
    ann = result.annihilator
    return {
        "kind": kind,
        "config": {
            "kappa": cfg.kappa,
            "M": cfg.M,
            "rank_rel_tol": cfg.rank_rel_tol,
            "zero_root_tol": cfg.zero_root_tol,
            "root_match_tol": cfg.root_match_tol,
            "root_cluster_tol": cfg.root_cluster_tol,
            "residual_warn_tol": cfg.residual_warn_tol,
        },
        "model": {"modes": [{"gamma": _gamma_to_json(kind, m.gamma),
                             "coefficients": [_c2j(c) for c in m.coeffs]}
                            for m in result.model.modes]},
        "spectrum": [_gamma_to_json(kind, g) for g in result.spectrum],
        "annihilator": {
            "coefficients": [_c2j(c) for c in ann.poly.coeffs],
            "nonzero_roots": [_c2j(r) for r in ann.r_min],
            "multiplicities": list(ann.multiplicities),
            "hankel_rank": ann.hankel_rank,
            "residual": ann.annihilation_residual,
            "saturated": ann.saturated,
        },
        "coefficient_residual": result.coefficient_residual,
        "warnings": list(result.warnings),
        "spurious_roots": [_c2j(r) for r in result.spurious_roots],
    }


def _recover_one(measurement: dict, args) -> tuple:
    """(report dict, exit code) for one measurement document."""
    kind = _require(measurement, "kind", "measurement")
    if kind not in _KINDS:
        raise SchemaError(f"unknown kind {kind!r}; expected one of {_KINDS}")
    values = _require(measurement, "values", "measurement")
    record = MeasurementRecord(_matrix(values, "measurement.values"))
    inst, _extra = _build_instance(kind, measurement.get("instance", {}),
                                   "measurement.instance")
    cfg = _config_from(measurement, args)
    started = time.perf_counter()
    result = run_recovery(record, inst, cfg, on_spurious="warn",
                          refine_iterations=getattr(args, "refine", 0) or 0)
    elapsed = time.perf_counter() - started
    report = _report(kind, result, cfg)
    if getattr(args, "timing", False):
        report["timing"] = {"seconds": elapsed}
    code = 1 if (result.warnings or result.spurious_roots) else 0
    log.info("recovered %d mode(s), hankel rank %d, exit %d",
             len(result.model.modes), result.annihilator.hankel_rank, code)
    return report, code, result, measurement


def cmd_recover(args) -> int:
    measurement = _load_json(args.measurement)
    report, code, result, _ = _recover_one(measurement, args)
    _dump_json(report, args.output)
    if args.plot:
        _write_plot(args.plot, measurement, result)
    return code


# ---------------------------------------------------------------------------
# validate-symbol


def _validation_grid(kind: str, extra, n: int):
    if kind in ("classic", "confluent"):
        return [k / n for k in range(n)]
    if kind == "channel":
        return [(a / n, b / n) for a in range(n) for b in range(n)]
    # dynamical: Omega is already finite
    return list(extra.basis.eigenvalues)


def cmd_validate_symbol(args) -> int:
    problem = _load_json(args.problem)
    kind = _require(problem, "kind", "problem")
    if kind not in _KINDS:
        raise SchemaError(f"unknown kind {kind!r}; expected one of {_KINDS}")
    inst_source = problem.get("instance", problem)
    inst, extra = _build_instance(kind, inst_source, "problem")
    grid = _validation_grid(kind, extra, args.grid)
    report = validate_symbol(inst, grid)
    doc = {
        "kind": kind,
        "grid_size": report.grid_size,
        "min_pair_separation": report.min_pair_separation,
        "min_modulus": report.min_modulus,
        "max_roundtrip": (None if not report.roundtrip_available
                          else report.max_roundtrip),
        "injective_pass": report.injective_pass,
        "nonvanishing_pass": report.nonvanishing_pass,
        "roundtrip_pass": report.roundtrip_pass,
        "passed": report.passed,
    }
    _dump_json(doc, args.output)
    return 0 if report.passed else 1


# ---------------------------------------------------------------------------
# batch


def cmd_batch(args) -> int:
    doc = _load_json(args.batchfile)
    items = _require(doc, "items", "batch file")
    if not isinstance(items, list):
        raise SchemaError("batch 'items' must be an array")
    reports = []
    worst = 0
    for i, item in enumerate(items):
        try:
            report, code, _result, _m = _recover_one(item, args)
        except (SchemaError, ContractViolationError) as exc:
            report, code = {"error": str(exc)}, 2
        reports.append(report)
        worst = max(worst, code)
        log.debug("batch item %d finished with exit %d", i, code)
    _dump_json({"reports": reports}, args.output)
    return worst


# ---------------------------------------------------------------------------
# SVG scatter of recovered vs. true spectral points


def _plot_points(kind: str, gammas):
    if kind in ("classic", "confluent"):
        return [(math.cos(2 * math.pi * float(g)), math.sin(2 * math.pi * float(g)))
                for g in gammas]
    if kind == "dynamical":
        return [(complex(g).real, complex(g).imag) for g in gammas]
    return [(float(g[0]), float(g[1])) for g in gammas]


def _truth_spectrum(kind: str, truth: dict):
    if truth is None:
        return []
    if kind == "classic":
        return [_real(t, "truth") for t in truth.get("frequencies", [])]
    if kind == "confluent":
        return [_real(m["frequency"], "truth") for m in truth.get("modes", [])]
    if kind == "channel":
        return [(_real(p["t"], "truth"), _real(p["nu"], "truth"))
                for p in truth.get("paths", [])]
    return []


def _write_plot(path: str, measurement: dict, result) -> None:
    kind = measurement["kind"]
    rec = _plot_points(kind, list(result.spectrum))
    true = _plot_points(kind, _truth_spectrum(kind, measurement.get("truth")))
    pts = rec + true
    if not pts:
        pts = [(0.0, 0.0)]
    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    lo_x, hi_x = min(xs), max(xs)
    lo_y, hi_y = min(ys), max(ys)
    span = max(hi_x - lo_x, hi_y - lo_y, 1e-3)
    pad = 0.1 * span
    size = 420.0

    def sx(x):
        return 10.0 + (x - lo_x + pad) / (span + 2 * pad) * (size - 20.0)

    def sy(y):
        return size - 10.0 - (y - lo_y + pad) / (span + 2 * pad) * (size - 20.0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0f}" '
        f'height="{size:.0f}" viewBox="0 0 {size:.0f} {size:.0f}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    for x, y in true:
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="7" '
                     'fill="none" stroke="#2a6" stroke-width="1.5"/>')
    for x, y in rec:
        parts.append(f'<circle cx="{sx(x):.2f}" cy="{sy(y):.2f}" r="2.5" '
                     'fill="#c33"/>')
    parts.append('<text x="12" y="16" font-family="monospace" font-size="11">'
                 f'{kind}: recovered (dots) vs truth (rings)</text>')
    parts.append("</svg>")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(parts) + "\n")


# ---------------------------------------------------------------------------
# entry point


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pronykit",
        description="Spectral recovery from iterated operator measurements.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_synth = sub.add_parser("synth", help="synthesize measurements from "
                                           "a ground-truth problem file")
    p_synth.add_argument("problem")
    p_synth.add_argument("-o", "--output", default=None,
                         help="measurement file (default stdout)")
    p_synth.add_argument("--seed", type=int, default=None,
                         help="seed for the noise generator")
    p_synth.set_defaults(func=cmd_synth)

    p_rec = sub.add_parser("recover", help="run recovery on a measurement file")
    p_rec.add_argument("measurement")
    p_rec.add_argument("-o", "--output", default=None,
                       help="report file (default stdout)")
    p_rec.add_argument("--config", default=None,
                       help="JSON file overriding the recovery config")
    p_rec.add_argument("--tolerance", action="append", metavar="KEY=VALUE",
                       help="override one config field (repeatable)")
    p_rec.add_argument("--refine", type=int, default=0,
                       help="Gauss-Newton polish iterations")
    p_rec.add_argument("--timing", action="store_true",
                       help="include wall-clock timing in the report "
                            "(breaks byte determinism)")
    p_rec.add_argument("--plot", default=None, metavar="SVG",
                       help="write a scatter of recovered vs true points")
    p_rec.set_defaults(func=cmd_recover)

    p_val = sub.add_parser("validate-symbol",
                           help="check symbol injectivity and inverse "
                                "round-trip on a grid")
    p_val.add_argument("problem")
    p_val.add_argument("-o", "--output", default=None)
    p_val.add_argument("--grid", type=int, default=64,
                       help="grid resolution per axis (default 64)")
    p_val.set_defaults(func=cmd_validate_symbol)

    p_batch = sub.add_parser("batch", help="recover every measurement in a "
                                           "batch file")
    p_batch.add_argument("batchfile")
    p_batch.add_argument("-o", "--output", default=None)
    p_batch.add_argument("--config", default=None)
    p_batch.add_argument("--tolerance", action="append", metavar="KEY=VALUE")
    p_batch.add_argument("--refine", type=int, default=0)
    p_batch.add_argument("--timing", action="store_true")
    p_batch.set_defaults(func=cmd_batch)
    return parser


def main(argv=None) -> int:
    level = os.environ.get("PRONY_LOG", "").strip().upper()
    if level:
        logging.basicConfig(level=getattr(logging, level, logging.WARNING))
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 2
    except (SchemaError, ContractViolationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except Exception:  # pragma: no cover - safety net
        traceback.print_exc()
        return 3


if __name__ == "__main__":
    sys.exit(main())
