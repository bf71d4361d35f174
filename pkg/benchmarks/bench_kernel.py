"""Compare the compiled kernel against the pure-Python fallback.

Each backend runs in its own subprocess (the choice is frozen at import
time), timing the three primitives plus a full recovery workload:

    python3 benchmarks/bench_kernel.py

Child invocations use --worker; there is no reason to pass it by hand.
"""

import argparse
import json
import os
import subprocess
import sys
import time


def best_of(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - start)
    return best


def run_worker():
    import numpy as np

    from pronykit import RecoveryConfig, channel, classic, confluent, numerics
    from pronykit import run_recovery

    rng = np.random.default_rng(99)
    timings = {"backend": numerics.kernel_backend()}

    svd_mats = [
        rng.normal(size=(24, 8)) + 1j * rng.normal(size=(24, 8)),
        rng.normal(size=(64, 16)) + 1j * rng.normal(size=(64, 16)),
    ]

    def svd_work():
        for m in svd_mats:
            for _ in range(40):
                numerics.singular_values(m)

    roots_poly = numerics.Polynomial.from_roots(
        np.exp(2j * np.pi * rng.uniform(size=12)))

    def roots_work():
        for _ in range(200):
            numerics.polynomial_roots(roots_poly)

    herm = rng.normal(size=(16, 16)) + 1j * rng.normal(size=(16, 16))
    skew = herm - herm.conj().T

    def expm_work():
        for _ in range(40):
            numerics.matrix_exponential(skew)

    def pipeline_work():
        for trial in range(20):
            r = np.random.default_rng(trial)
            freqs = np.sort(r.uniform(0, 1, 5))
            if np.min(np.diff(freqs)) < 1e-2:
                freqs = np.linspace(0.05, 0.85, 5) + 0.01 * trial
            coeffs = r.normal(size=5) + 1j * r.normal(size=5)
            rec = classic.synthesize(freqs, coeffs, 9)
            run_recovery(rec, classic.make_instance(), RecoveryConfig(kappa=5))
        for trial in range(5):
            modes = [confluent.PolynomialMode(0.1 + 0.3 * n, [1.0] * 3)
                     for n in range(3)]
            rec = confluent.synthesize(modes, 17)
            run_recovery(rec, confluent.make_instance(2),
                         RecoveryConfig(kappa=3, M=3))
        for trial in range(5):
            model = channel.ChannelModel((
                ((0.15, 0.65), 1.0 + 0.5j),
                ((0.55, 0.2), -2.0 + 0.0j),
                ((0.85, 0.9), 0.3j),
            ))
            rec = channel.channel_measure(model, channel.DEFAULT_SETUP, 15)
            run_recovery(rec, channel.make_instance(),
                         RecoveryConfig(kappa=3), refine_iterations=2)

    timings["jacobi_svd"] = best_of(svd_work)
    timings["aberth_roots"] = best_of(roots_work)
    timings["expm_taylor"] = best_of(expm_work)
    timings["recovery_pipeline"] = best_of(pipeline_work, repeats=3)
    print(json.dumps(timings))


def run_comparison():
    results = {}
    for backend in ("compiled", "python"):
        env = dict(os.environ, PRONY_KERNEL=backend)
        proc = subprocess.run(
            [sys.executable, os.path.abspath(__file__), "--worker"],
            env=env, capture_output=True, text=True)
        if proc.returncode != 0:
            print(f"{backend}: unavailable ({proc.stderr.strip().splitlines()[-1]})")
            continue
        results[backend] = json.loads(proc.stdout)

    if not results:
        print("no backend produced timings")
        return 1

    keys = ["jacobi_svd", "aberth_roots", "expm_taylor", "recovery_pipeline"]
    header = f"{'workload':<20}" + "".join(f"{b:>12}" for b in results)
    if len(results) == 2:
        header += f"{'speedup':>10}"
    print(header)
    print("-" * len(header))
    for key in keys:
        row = f"{key:<20}"
        times = [results[b][key] for b in results]
        for t in times:
            row += f"{t * 1e3:>10.2f}ms"
        if len(times) == 2:
            row += f"{times[1] / times[0]:>9.1f}x"
        print(row)
    return 0


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--worker", action="store_true",
                        help="time the currently selected backend and emit JSON")
    args = parser.parse_args()
    if args.worker:
        run_worker()
        return 0
    return run_comparison()


if __name__ == "__main__":
    sys.exit(main())
