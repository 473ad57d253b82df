"""Verification runs, timing, per-phase breakdowns and carry statistics.

Throughput numbers come from this harness's own loop (ticks per operation
and operations per second); they approximate, but do not reproduce, any
external benchmark score.
"""
import csv
import math
import time
from dataclasses import dataclass, field, fields

import numpy as np
from scipy import stats as sps

from . import _backend
from .limbcore import ContractError
from .oracle import (
    carry_census, census_closed_form, oracle_add_batch, oracle_mul_batch, oracle_sub_batch,
)
from .testgen import OperandStream, RngSpec, expected_for
from .vecaddsub import PHASES, add_batch, sub_batch, width_code
from .vecmul import (
    MUL_PHASES, KaratsubaConfig, karatsuba_batch, karatsuba_operands, mul_4x4_batch,
    mul_words_batch, mul_words_batch_stats,
)

KERNELS = ("dot", "mulwords", "mul4x4", "karatsuba", "oracle")
KERNEL_OPS = {
    "dot": ("add", "sub", "mul"),
    "mulwords": ("mul",),
    "mul4x4": ("mul",),
    "karatsuba": ("mul",),
    "oracle": ("add", "sub", "mul"),
}
REPETITIONS = 20
NAN = float("nan")


@dataclass
class TimerSource:
    kind: str
    name: str
    note: str
    ticks_per_second: float

    @classmethod
    def of(cls, be=None):
        be = be or _backend.impl
        name = be.timer_name()
        if name.startswith("rdtsc"):
            return cls("cycle-counter", name, "serialized time-stamp counter, reference cycles",
                       _calibrate(be))
        return cls("monotonic-clock", name, "nanoseconds, no cycle counter in use", 1e9)


_rates = {}


def _calibrate(be, span=0.05):
    if be.NAME not in _rates:
        p0, t0 = time.perf_counter(), be.ticks()
        while time.perf_counter() - p0 < span:
            pass
        p1, t1 = time.perf_counter(), be.ticks()
        _rates[be.NAME] = (t1 - t0) / (p1 - p0)
    return _rates[be.NAME]


@dataclass(eq=False)
class BenchRow:
    op: str
    bits: int
    w: str
    kernel: str
    cases: int
    ticks_per_op_mean: float = NAN
    ci95: float = NAN
    pct_load_add: float = NAN
    pct_carry_gen: float = NAN
    pct_carry_add: float = NAN
    pct_overflow: float = NAN
    pct_gather: float = NAN
    pct_compute: float = NAN
    pct_align: float = NAN
    pct_reduce: float = NAN
    pct_carry_pass: float = NAN
    carry_add_ratio: float = NAN
    phase4_rate: float = NAN
    mismatches: int = 0
    total_ticks: int = 0
    ops_per_sec: float = NAN
    timer: str = ""
    backend: str = ""

    def __eq__(self, other):
        if not isinstance(other, BenchRow):
            return NotImplemented
        for f in fields(self):
            x, y = getattr(self, f.name), getattr(other, f.name)
            if isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y):
                continue
            if x != y:
                return False
        return True


COLUMNS = tuple(f.name for f in fields(BenchRow))


@dataclass
class Mismatch:
    index: int
    op: str
    bits: int
    category: str
    kernel: str


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    cases: int = 0
    timer: TimerSource = None
    notes: list = field(default_factory=list)

    @property
    def exit_code(self):
        return 1 if self.mismatches else 0

    def format(self):
        out = []
        for r in self.rows:
            line = (f"{r.op:>3} {r.bits:>6} w={r.w:<6} {r.kernel:<10} [{r.backend}] "
                    f"cases={r.cases:<7} mismatches={r.mismatches}")
            if not math.isnan(r.ticks_per_op_mean):
                line += f"  {r.ticks_per_op_mean:.1f} +/- {r.ci95:.1f} {r.timer}/op"
            if not math.isnan(r.phase4_rate):
                line += f"  phase4={r.phase4_rate:.4g}"
            if not math.isnan(r.carry_add_ratio):
                line += f"  carry/add={r.carry_add_ratio:.2f}"
            out.append(line)
        for m in self.mismatches:
            out.append(f"MISMATCH case {m.index}: {m.op} {m.bits} bits {m.category} ({m.kernel})")
        out.extend(self.notes)
        return "\n".join(out)


def _check_kernel(kernel):
    if kernel not in KERNEL_OPS:
        raise ContractError(f"unknown kernel {kernel!r}; choose from {', '.join(KERNELS)}")


def _mul_w(w):
    return 1 if w == "scalar" else w


def run_kernel(kernel, op, A, B, w=8, theta=4, backend=None):
    """Run one kernel over a batch; returns ``(values, flags or None)``."""
    _check_kernel(kernel)
    if op not in KERNEL_OPS[kernel]:
        raise ContractError(f"kernel {kernel!r} does not do {op}")
    if kernel == "oracle":
        if op == "add":
            return oracle_add_batch(A, B, backend)
        if op == "sub":
            return oracle_sub_batch(A, B, backend)
        return oracle_mul_batch(A, B, backend), None
    if op in ("add", "sub"):
        S, flag, _ = (add_batch if op == "add" else sub_batch)(A, B, w, backend)
        return S, flag
    if kernel == "mul4x4":
        return mul_4x4_batch(A, B, backend), None
    if kernel == "karatsuba":
        return karatsuba_batch(A, B, KaratsubaConfig(theta, 8 if w == "scalar" else w), backend), None
    return mul_words_batch(A, B, 64, _mul_w(w), backend), None


def _applies(kernel, op, bits):
    return op in KERNEL_OPS[kernel] and (kernel != "mul4x4" or bits == 256)


def run_verify(cases, kernels=("dot",), w=8, theta=4):
    """Check every case against its stored expected value.

    Cases are grouped by (op, size) and run as batches. A kernel that cannot
    handle a group (e.g. ``mul4x4`` on add cases) skips it with a note.
    """
    for k in kernels:
        _check_kernel(k)
    width_code(w)
    report = BenchReport(cases=len(cases), timer=TimerSource.of())
    groups = {}
    for i, c in enumerate(cases):
        groups.setdefault((c.op, c.bits), []).append(i)
    for kernel in kernels:
        for (op, bits), idx in sorted(groups.items()):
            if not _applies(kernel, op, bits):
                report.notes.append(f"note: {kernel} skipped {len(idx)} {op} cases at {bits} bits")
                continue
            A = np.stack([cases[i].a for i in idx])
            B = np.stack([cases[i].b for i in idx])
            E = np.stack([cases[i].expected for i in idx])
            V, F = run_kernel(kernel, op, A, B, w, theta)
            bad = np.any(V != E, axis=1)
            if F is not None:
                flags = np.array([cases[i].flag for i in idx], dtype=np.uint8)
                bad |= F != flags
            for j in np.flatnonzero(bad):
                c = cases[idx[j]]
                report.mismatches.append(Mismatch(idx[j], op, bits, c.category, kernel))
            report.rows.append(BenchRow(op, bits, str(w), kernel, len(idx),
                                        mismatches=int(bad.sum()),
                                        backend=_backend.impl.NAME))
    return report


_TIME_KIND = {
    ("dot", "add"): "add", ("dot", "sub"): "sub", ("dot", "mul"): "mul_words",
    ("oracle", "add"): "oracle_add", ("oracle", "sub"): "oracle_sub",
    ("oracle", "mul"): "oracle_mul",
    ("mulwords", "mul"): "mul_words", ("mul4x4", "mul"): "mul_4x4",
    ("karatsuba", "mul"): "karatsuba",
}


def mean_ci95(samples):
    """Mean and half-width of the two-sided 95% t interval."""
    x = np.asarray(samples, dtype=float)
    if len(x) < 2:
        return float(x.mean()) if len(x) else NAN, NAN
    half = sps.t.ppf(0.975, len(x) - 1) * x.std(ddof=1) / math.sqrt(len(x))
    return float(x.mean()), float(half)


CACHE_BUDGET = 1 << 16


def time_blocked(be, kind, A, B, width=8, theta=4, budget=CACHE_BUDGET):
    """Ticks for one pass over all rows, timed in cache-sized blocks.

    Each block runs once untimed to warm the cache, then once timed, so the
    figure reflects the kernel rather than memory bandwidth.
    """
    n, m = A.shape
    if n == 0 or m == 0:
        return 0
    out = 4 * m + 2 if kind in ("mul_words", "mul_4x4", "karatsuba", "oracle_mul") else m
    rows = max(1, budget // (8 * (2 * m + out)))
    total = 0
    for s in range(0, n, rows):
        a, b = A[s:s + rows], B[s:s + rows]
        be.time_batch(kind, a, b, width, theta, 64)
        total += int(be.time_batch(kind, a, b, width, theta, 64))
    return total


def ablation(be, op, A, B, code, repetitions=REPETITIONS):
    """Per-operation ticks of each add/sub phase, by truncating the kernel.

    Variants stop after phase 1 (load, add, store), after carry generation,
    and after the carry add and check; the full kernel adds the overflow
    fix-up. Each bucket is the median difference of consecutive variants.
    """
    kinds = (f"{op}_p1", f"{op}_p2", f"{op}_p3", op)
    per = {k: [] for k in kinds}
    for _ in range(repetitions):
        for k in kinds:
            per[k].append(time_blocked(be, k, A, B, code) / A.shape[0])
    v = [float(np.median(per[k])) for k in kinds]
    return {
        "load_add": v[0],
        "carry_gen": max(0.0, v[1] - v[0]),
        "carry_add": max(0.0, v[2] - v[1]),
        "overflow": max(0.0, v[3] - v[2]),
    }


def carry_ratio(buckets):
    if not buckets["load_add"]:
        return NAN
    return (buckets["carry_gen"] + buckets["carry_add"] + buckets["overflow"]) / buckets["load_add"]


def _pcts(ticks, names):
    total = sum(ticks.values())
    if not total:
        return {n: NAN for n in names}
    return {n: 100.0 * ticks[n] / total for n in names}


def run_bench(op="add", bits=512, w=8, repetitions=REPETITIONS, seed=0, cases=10000,
              category="random", kernels=("dot", "oracle"), instrument=False, theta=4,
              backend=None):
    """Time each kernel over one generated batch; one row per kernel.

    Every kernel is checked against the oracle first; a kernel with any
    mismatch gets no row, only entries in ``report.mismatches``.
    """
    be = _backend.get(backend) if isinstance(backend, str) else (backend or _backend.impl)
    for k in kernels:
        _check_kernel(k)
    code = width_code(w)
    timer = TimerSource.of(be)
    report = BenchReport(cases=cases, timer=timer)
    if timer.kind != "cycle-counter":
        report.notes.append(f"note: no cycle counter, timing with {timer.name}")
    spec = RngSpec(seed).derive(op, bits, category)
    A, B = OperandStream(spec, bits, category, op).take(cases)
    E, F = expected_for(op, A, B)
    for kernel in kernels:
        if not _applies(kernel, op, bits):
            report.notes.append(f"note: {kernel} does not run {op} at {bits} bits")
            continue
        V, G = run_kernel(kernel, op, A, B, w, theta, be)
        bad = np.any(V != E, axis=1)
        if G is not None:
            bad |= G != F
        if bad.any():
            for j in np.flatnonzero(bad):
                report.mismatches.append(Mismatch(int(j), op, bits, category, kernel))
            continue
        row = BenchRow(op, bits, str(w), kernel, cases, timer=timer.name, backend=be.NAME)
        TA, TB = (karatsuba_operands(A, B, KaratsubaConfig(theta)) if kernel == "karatsuba"
                  else (A, B))
        kind = _TIME_KIND[(kernel, op)]
        tw = code if kind in ("add", "sub", "karatsuba") else _mul_w(w)
        if kind == "karatsuba" and tw == 0:
            tw = 8
        runs = [time_blocked(be, kind, TA, TB, tw, theta) for _ in range(repetitions)]
        per_op = [t / cases for t in runs] if cases else [NAN]
        row.ticks_per_op_mean, row.ci95 = mean_ci95(per_op)
        row.total_ticks = sum(runs)
        if cases and row.ticks_per_op_mean > 0:
            row.ops_per_sec = timer.ticks_per_second / row.ticks_per_op_mean
        if kernel == "dot" and op in ("add", "sub"):
            fired = (add_batch if op == "add" else sub_batch)(A, B, w, be)[2]
            row.phase4_rate = np.count_nonzero(fired) / cases if cases else NAN
            if instrument and cases:
                buckets = ablation(be, op, A, B, code, repetitions)
                for p, v in _pcts(buckets, PHASES).items():
                    setattr(row, "pct_" + p, v)
                row.carry_add_ratio = carry_ratio(buckets)
        elif instrument and kind == "mul_words":
            _, ticks = mul_words_batch_stats(A, B, 64, _mul_w(w), be)
            for p, v in _pcts(ticks, MUL_PHASES).items():
                setattr(row, "pct_" + p, v)
        report.rows.append(row)
    return report


@dataclass
class StatsReport:
    census: list
    mc_samples: int
    mc_frequency: float

    expected_frequency = 0.5 - 2.0 ** -65

    @property
    def census_ok(self):
        return all(r[1] == r[2] and r[3] == r[4] for r in self.census)

    def format(self):
        out = ["k  maxed(enum)  maxed(closed)  carries(enum)  carries(closed)  match"]
        for k, me, mc, ce, cc in self.census:
            out.append(f"{k:<2} {me:>11}  {mc:>13}  {ce:>13}  {cc:>15}  "
                       f"{'yes' if (me, ce) == (mc, cc) else 'NO'}")
        if self.mc_samples:
            out.append(f"64-bit carry frequency over {self.mc_samples} additions: "
                       f"{self.mc_frequency:.6f} (expected {self.expected_frequency:.6f})")
        return "\n".join(out)


def carry_frequency(samples, seed=5489, block=1 << 20, backend=None):
    """Fraction of uniformly random 64-bit limb pairs whose sum overflows."""
    be = _backend.get(backend) if isinstance(backend, str) else (backend or _backend.impl)
    rng = be.MT64(seed)
    buf = np.empty(2 * block, dtype=np.uint64)
    carries = 0
    done = 0
    while done < samples:
        n = min(block, samples - done)
        v = buf[: 2 * n]
        rng.fill(v)
        x, y = v[:n], v[n:]
        carries += int(np.count_nonzero(x + y < x))
        done += n
    return carries / samples if samples else NAN


def run_stats(k_max=12, samples=10**7, seed=5489):
    rows = []
    for k in range(1, k_max + 1):
        me, ce = carry_census(k)
        mc, cc = census_closed_form(k)
        rows.append((k, me, mc, ce, cc))
    return StatsReport(rows, samples, carry_frequency(samples, seed) if samples else NAN)


def emit_csv(report, path):
    with open(path, "w", newline="") as f:
        wr = csv.writer(f)
        wr.writerow(COLUMNS)
        for r in report.rows:
            wr.writerow([repr(v) if isinstance(v, float) else v
                         for v in (getattr(r, c) for c in COLUMNS)])


def read_csv(path):
    types = {f.name: f.type for f in fields(BenchRow)}
    rows = []
    with open(path, newline="") as f:
        rd = csv.DictReader(f)
        if tuple(rd.fieldnames or ()) != COLUMNS:
            raise ValueError(f"{path}: unexpected CSV header")
        for rec in rd:
            vals = {}
            for c in COLUMNS:
                t = types[c]
                vals[c] = float(rec[c]) if t in (float, "float") else (
                    int(rec[c]) if t in (int, "int") else rec[c])
            rows.append(BenchRow(**vals))
    return BenchReport(rows=rows)
