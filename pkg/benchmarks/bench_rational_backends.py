#!/usr/bin/env python3
"""Benchmark the two exact-rational backends on the oracle's hot loop.

The evaluator and the exhaustive oracle spend their time in rational
arithmetic.  The package selects the GMP-backed gmpy2.mpq backend at import
when available and falls back to the stdlib fractions.Fraction; this script
measures both on the same workload (full bit-grid forward passes of the
10-10-2 fixture) by re-running itself in a subprocess per backend.

Usage: python3 benchmarks/bench_rational_backends.py [--points N]
"""

import argparse
import os
import subprocess
import sys
import time
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
FIXTURE = REPO / "tests" / "fixtures" / "bitvec_1_1.json"


def measure(points: int) -> tuple:
    from nnequiv.model import load_network_file
    from nnequiv.oracle import DiscreteDomain, exhaustive_check
    from nnequiv.rational import BACKEND
    from nnequiv.relations import EquivalenceRelation

    net = load_network_file(str(FIXTURE))
    domain = DiscreteDomain.bits(net.input_dim)
    relation = EquivalenceRelation.strict()
    rounds = max(1, points // domain.cardinality)
    start = time.perf_counter()
    for _ in range(rounds):
        result = exhaustive_check(net, net, relation, domain)
        assert result.equivalent
    elapsed = time.perf_counter() - start
    checked = rounds * domain.cardinality
    return BACKEND, checked, elapsed


def run_child(backend: str, points: int) -> tuple:
    env = dict(os.environ, NNEQUIV_RATIONAL=backend)
    out = subprocess.run(
        [sys.executable, __file__, "--child", "--points", str(points)],
        capture_output=True,
        text=True,
        env=env,
        check=True,
    )
    name, checked, elapsed = out.stdout.strip().split()
    return name, int(checked), float(elapsed)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--points", type=int, default=4096, help="grid points per backend")
    parser.add_argument("--child", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.child:
        name, checked, elapsed = measure(args.points)
        print(name, checked, elapsed)
        return 0

    rows = []
    for backend in ("gmpy2", "fraction"):
        try:
            rows.append(run_child(backend, args.points))
        except subprocess.CalledProcessError as exc:
            if backend == "gmpy2":
                print("gmpy2 backend unavailable, skipping:", exc.stderr.strip()[:200])
                continue
            raise
    print(f"{'backend':<10} {'points':>8} {'seconds':>9} {'points/s':>10}")
    for name, checked, elapsed in rows:
        print(f"{name:<10} {checked:>8} {elapsed:>9.3f} {checked / elapsed:>10.0f}")
    if len(rows) == 2:
        speedup = rows[1][2] / rows[0][2]
        print(f"\n{rows[0][0]} is {speedup:.1f}x faster than {rows[1][0]} on this workload")
    return 0


if __name__ == "__main__":
    sys.exit(main())
