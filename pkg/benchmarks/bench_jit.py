#!/usr/bin/env python3
"""Benchmark the numba-accelerated kernels against the pure-numpy fallback.

Runs the same workload twice in subprocesses, once with ``WDBOUNDS_JIT=1``
and once with ``WDBOUNDS_JIT=0`` (the flag is read at import time, so a
fresh interpreter is needed per mode), and prints a timing table.

Usage::

    python benchmarks/bench_jit.py [--sizes 20,40,60] [--repeats 5]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKLOAD = r"""
import json
import sys
import time

import numpy as np

from wdbounds._jit import JIT_ENABLED
from wdbounds.curvature import kappa_ctmc
from wdbounds.markov import ProbVec
from wdbounds.models import random_instance
from wdbounds.transport import wasserstein

sizes = json.loads(sys.argv[1])
repeats = int(sys.argv[2])

# warm-up: trigger numba compilation (cached) outside the timed region
gen, metric, p0 = random_instance(8, 0, metric_kind="graph")
wasserstein(p0, ProbVec(np.full(8, 1 / 8)), metric)
kappa_ctmc(gen, metric, 1, 2)

rows = []
for n in sizes:
    gen, metric, p0 = random_instance(n, n, metric_kind="graph")
    rng = np.random.default_rng(n)
    pairs = [(ProbVec(rng.dirichlet(np.ones(n))), ProbVec(rng.dirichlet(np.ones(n))))
             for _ in range(repeats)]

    t0 = time.perf_counter()
    acc = 0.0
    for p, q in pairs:
        acc += wasserstein(p, q, metric).value
    t_w1 = (time.perf_counter() - t0) / repeats

    t0 = time.perf_counter()
    for k in range(repeats):
        r = 1 + k % (n - 1)
        acc += kappa_ctmc(gen, metric, r, r + 1)
    t_kappa = (time.perf_counter() - t0) / repeats

    rows.append({"n": n, "w1_s": t_w1, "kappa_s": t_kappa, "checksum": acc})

print(json.dumps({"jit": JIT_ENABLED, "rows": rows}))
"""


def run_mode(jit: str, sizes: list[int], repeats: int) -> dict:
    env = dict(os.environ, WDBOUNDS_JIT=jit)
    proc = subprocess.run(
        [sys.executable, "-c", WORKLOAD, json.dumps(sizes), str(repeats)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    return json.loads(proc.stdout)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--sizes", default="20,40,60", help="comma list of state counts")
    parser.add_argument("--repeats", type=int, default=5, help="solves per measurement")
    args = parser.parse_args()
    sizes = [int(s) for s in args.sizes.split(",")]

    jit = run_mode("1", sizes, args.repeats)
    plain = run_mode("0", sizes, args.repeats)

    print(f"numba path active: {jit['jit']}; fallback path active: {not plain['jit']}")
    header = f"{'n':>5} {'w1 jit':>12} {'w1 numpy':>12} {'speedup':>8}   " \
             f"{'kappa jit':>12} {'kappa numpy':>12} {'speedup':>8}"
    print(header)
    print("-" * len(header))
    for row_j, row_p in zip(jit["rows"], plain["rows"]):
        if abs(row_j["checksum"] - row_p["checksum"]) > 1e-6:
            print(f"WARNING: checksums differ at n={row_j['n']}", file=sys.stderr)
        sp_w = row_p["w1_s"] / row_j["w1_s"] if row_j["w1_s"] > 0 else float("inf")
        sp_k = row_p["kappa_s"] / row_j["kappa_s"] if row_j["kappa_s"] > 0 else float("inf")
        print(
            f"{row_j['n']:>5} {row_j['w1_s']:>12.6f} {row_p['w1_s']:>12.6f} {sp_w:>7.2f}x   "
            f"{row_j['kappa_s']:>12.6f} {row_p['kappa_s']:>12.6f} {sp_k:>7.2f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
