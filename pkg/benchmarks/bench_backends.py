#!/usr/bin/env python3
"""Throughput comparison of the compiled and pure-Python kernel backends.

Backend selection is fixed at import time by STABLE_JACOBI_BACKEND, so each
measurement runs in a child process with the variable set.  Two kernels are
timed per stability exponent:

* ``stable_draws``   — raw draw generation (one substream);
* ``batch_weighted_sums`` — the full per-path reduction used by the
  verification experiments (draws + row dot products, nothing stored).

Usage::

    python3 benchmarks/bench_backends.py
    python3 benchmarks/bench_backends.py --paths 50000 --threads 4
"""
from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time

BACKENDS = ("native", "python")


def _time_best(fn, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def worker(args) -> int:
    import numpy as np

    from stable_jacobi import kernels

    results = {"backend": kernels.BACKEND, "cases": []}
    rng = np.random.default_rng(0)
    W = rng.standard_normal((args.rows, args.n_steps))
    for chi in args.chi:
        t_draws = _time_best(
            lambda: kernels.stable_draws(chi, 42, 0, args.n_draws),
            args.repeats)
        t_sums = _time_best(
            lambda: kernels.batch_weighted_sums(chi, 42, W, args.paths,
                                                threads=args.threads),
            args.repeats)
        results["cases"].append({
            "chi": chi,
            "draws_per_s": args.n_draws / t_draws,
            "cells_per_s": args.paths * args.n_steps / t_sums,
        })
    json.dump(results, sys.stdout)
    return 0


def _run_backend(backend, args):
    cmd = [sys.executable, os.path.abspath(__file__), "--worker",
           "--n-draws", str(args.n_draws), "--paths", str(args.paths),
           "--n-steps", str(args.n_steps), "--rows", str(args.rows),
           "--repeats", str(args.repeats), "--threads", str(args.threads),
           "--chi", ",".join(str(c) for c in args.chi)]
    env = dict(os.environ, STABLE_JACOBI_BACKEND=backend)
    proc = subprocess.run(cmd, env=env, capture_output=True, text=True)
    if proc.returncode != 0:
        return None, proc.stderr.strip().splitlines()[-1:]
    return json.loads(proc.stdout), None


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--worker", action="store_true",
                        help=argparse.SUPPRESS)
    parser.add_argument("--n-draws", type=int, default=2_000_000)
    parser.add_argument("--paths", type=int, default=20_000)
    parser.add_argument("--n-steps", type=int, default=4096)
    parser.add_argument("--rows", type=int, default=4)
    parser.add_argument("--repeats", type=int, default=3)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--chi", type=lambda s: [float(v) for v in s.split(",")],
                        default=[1.0, 1.5, 2.0])
    args = parser.parse_args(argv)

    if args.worker:
        return worker(args)

    reports = {}
    for backend in BACKENDS:
        report, err = _run_backend(backend, args)
        if report is None:
            print(f"[{backend}] unavailable: {' '.join(err or ['?'])}")
        else:
            assert report["backend"] == backend, report
            reports[backend] = report

    if not reports:
        return 1
    print(f"draws={args.n_draws:,}  paths={args.paths:,} x "
          f"steps={args.n_steps:,} x rows={args.rows}  "
          f"threads={args.threads}  (best of {args.repeats})\n")
    header = (f"{'chi':>5}  {'kernel':<20} "
              + "".join(f"{b + ' M/s':>14}" for b in BACKENDS)
              + f"{'speedup':>10}")
    print(header)
    print("-" * len(header))
    for i, chi in enumerate(args.chi):
        for kernel, key in (("stable_draws", "draws_per_s"),
                            ("batch_weighted_sums", "cells_per_s")):
            rates = {b: reports[b]["cases"][i][key] / 1e6
                     for b in reports}
            cells = "".join(
                f"{rates[b]:>14.1f}" if b in rates else f"{'-':>14}"
                for b in BACKENDS)
            if len(rates) == 2:
                ratio = f"{rates['native'] / rates['python']:>9.2f}x"
            else:
                ratio = f"{'-':>10}"
            print(f"{chi:>5.2f}  {kernel:<20} {cells}{ratio}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
