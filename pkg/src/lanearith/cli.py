"""Command line: ``lanearith {gen,verify,bench,stats}``.

Exit status: 0 pass, 1 mismatch, 2 usage error.
"""
import argparse
import sys

from . import _backend
from .bench import KERNELS, BenchReport, emit_csv, run_bench, run_stats, run_verify
from .limbcore import ContractError, LimbError
from .testgen import (
    CATEGORIES, DEFAULT_SIZES, OPS, PATHOLOGICAL, RngSpec, gen_corpus, read_vectors, write_vectors,
)

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE = 0, 1, 2


def _width(s):
    if s == "scalar":
        return s
    if s in ("2", "4", "8"):
        return int(s)
    raise argparse.ArgumentTypeError("width must be 2, 4, 8 or scalar")


def _sizes(s):
    try:
        sizes = tuple(int(x) for x in s.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {s!r}") from None
    if not sizes or any(b <= 0 or b % 64 for b in sizes):
        raise argparse.ArgumentTypeError("sizes must be positive multiples of 64")
    return sizes


def _seed(s):
    v = int(s, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError("seed must fit in 64 unsigned bits")
    return v


def _kernels(s):
    ks = tuple(x for x in s.split(",") if x)
    for k in ks:
        if k not in KERNELS:
            raise argparse.ArgumentTypeError(f"unknown kernel {k!r}; choose from {', '.join(KERNELS)}")
    return ks


def _categories(value):
    if value is None or value == "none":
        return ()
    if value == "all":
        return PATHOLOGICAL
    return (value,)


def _common(p):
    p.add_argument("--op", choices=OPS, default="add")
    p.add_argument("--bits", type=_sizes, default=DEFAULT_SIZES,
                   help="comma-separated operand sizes in bits")
    p.add_argument("--seed", type=_seed, default=1)
    p.add_argument("--cases", type=int, default=1000, help="random cases per size")


def build_parser():
    ap = argparse.ArgumentParser(prog="lanearith", description=__doc__.splitlines()[0])
    ap.add_argument("--backend", choices=("auto", "compiled", "pure"), default="auto",
                    help="kernel backend (bench times this one; verify always uses the default)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    g = sub.add_parser("gen", help="write a JSONL test-vector corpus")
    _common(g)
    g.add_argument("--pathological", choices=PATHOLOGICAL + ("all", "none"), default="none")
    g.add_argument("--pathological-cases", type=int, default=1000)
    g.add_argument("-o", "--out", default="-", help="output path, '-' for stdout")

    v = sub.add_parser("verify", help="check a corpus against one or more kernels")
    _common(v)
    v.add_argument("corpus", nargs="?", help="JSONL corpus; generated from --seed if omitted")
    v.add_argument("--width", type=_width, default=8)
    v.add_argument("--kernel", type=_kernels, default=("dot",))
    v.add_argument("--pathological", choices=PATHOLOGICAL + ("all", "none"), default="none")
    v.add_argument("--pathological-cases", type=int, default=1000)
    v.add_argument("--theta", type=int, default=4)

    b = sub.add_parser("bench", help="time kernels, 20 runs with 95% confidence intervals")
    _common(b)
    b.add_argument("--width", type=_width, default=8)
    b.add_argument("--kernel", type=_kernels, default=("dot", "oracle"))
    b.add_argument("--pathological", choices=CATEGORIES, default="random",
                   help="operand category to time")
    b.add_argument("--reps", type=int, default=20)
    b.add_argument("--theta", type=int, default=4)
    b.add_argument("--instrument", action="store_true", help="per-phase tick breakdown")
    b.add_argument("--compare-backends", action="store_true",
                   help="time every available backend, one row each")
    b.add_argument("--csv", help="write rows to this CSV file")

    s = sub.add_parser("stats", help="exhaustive carry census and 64-bit carry frequency")
    s.add_argument("--kmax", type=int, default=12)
    s.add_argument("--samples", type=int, default=10**7)
    s.add_argument("--seed", type=_seed, default=5489)
    return ap


def _corpus(args):
    return gen_corpus(RngSpec(args.seed), (args.op,), args.bits, args.cases, ("random",)) + (
        gen_corpus(RngSpec(args.seed), (args.op,), args.bits, args.pathological_cases,
                   _categories(args.pathological))
    )


def _gen(args):
    cases = _corpus(args)
    if args.out == "-":
        for c in cases:
            sys.stdout.write(c.to_json() + "\n")
    else:
        write_vectors(cases, args.out)
        print(f"wrote {len(cases)} cases to {args.out}", file=sys.stderr)
    return EXIT_OK


def _verify(args):
    cases = read_vectors(args.corpus) if args.corpus else _corpus(args)
    report = run_verify(cases, args.kernel, args.width, args.theta)
    print(report.format())
    print(f"{len(cases)} cases, {len(report.mismatches)} mismatches")
    return report.exit_code


def _bench(args):
    backends = _backend.available() if args.compare_backends else [args.backend]
    rows, status = [], EXIT_OK
    for name in backends:
        be = _backend.impl if name == "auto" else _backend.get(name)
        for bits in args.bits:
            rep = run_bench(args.op, bits, args.width, args.reps, args.seed, args.cases,
                            args.pathological, args.kernel, args.instrument, args.theta, be)
            print(rep.format())
            rows.extend(rep.rows)
            if rep.exit_code:
                status = EXIT_MISMATCH
    if args.csv:
        emit_csv(BenchReport(rows=rows), args.csv)
    return status


def _stats(args):
    rep = run_stats(args.kmax, args.samples, args.seed)
    print(rep.format())
    ok = rep.census_ok and (not args.samples or abs(rep.mc_frequency - 0.5) <= 0.001)
    return EXIT_OK if ok else EXIT_MISMATCH


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return {"gen": _gen, "verify": _verify, "bench": _bench, "stats": _stats}[args.cmd](args)
    except (ContractError, LimbError, OSError) as e:
        print(f"lanearith: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
