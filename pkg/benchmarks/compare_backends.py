"""Throughput of the compiled extension against the pure-Python fallback.

    python benchmarks/compare_backends.py --bits 512,4096 --cases 200

Each row times the same seeded operands on both backends, after checking
both against the oracle. The pure backend is slow, so keep --cases small.
"""
import argparse
import sys

from lanearith import _backend
from lanearith.bench import BenchReport, emit_csv, run_bench

JOBS = (
    ("add", 8, "dot"), ("add", "scalar", "dot"), ("sub", 8, "dot"),
    ("add", 8, "oracle"), ("mul", 8, "mulwords"), ("mul", 8, "karatsuba"),
)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bits", default="512,4096")
    ap.add_argument("--cases", type=int, default=200)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)

    if _backend.compiled is None:
        print("compiled backend not built; nothing to compare", file=sys.stderr)
        return 1
    sizes = [int(b) for b in args.bits.split(",")]
    rows = []
    print(f"{'op':>3} {'bits':>6} {'w':>6} {'kernel':<10} {'compiled ops/s':>15} "
          f"{'pure ops/s':>12} {'speedup':>9}")
    for bits in sizes:
        for op, w, kernel in JOBS:
            got = {}
            for name in ("compiled", "pure"):
                rep = run_bench(op, bits, w, args.reps, args.seed, args.cases,
                                kernels=(kernel,), backend=_backend.get(name))
                if rep.exit_code:
                    print(rep.format(), file=sys.stderr)
                    return 1
                got[name] = rep.rows[0]
                rows.append(rep.rows[0])
            c, p = got["compiled"].ops_per_sec, got["pure"].ops_per_sec
            print(f"{op:>3} {bits:>6} {w!s:>6} {kernel:<10} {c:>15.0f} {p:>12.0f} {c / p:>8.0f}x")
    if args.csv:
        emit_csv(BenchReport(rows=rows), args.csv)
    return 0


if __name__ == "__main__":
    sys.exit(main())
