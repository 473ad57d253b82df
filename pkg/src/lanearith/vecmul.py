"""Column-wise ("vertical and crosswise") multiplication.

Five stages: gather every cross pair ``(a_i, b_j)`` grouped by output column
``i + j``, form all partial products independently, deposit the low half in
column ``c`` and the high half in ``c + 1``, sum each column, then run one
sequential carry pass.

The stage functions below expose each step on explicit buffers for
inspection and testing. The ``dot_mul_*`` entry points run the fused
compiled kernels. Fixed 5x5 (52-bit limbs, IFMA when present) and 4x4
(64-bit limbs via 52-bit repacking) base cases back a Karatsuba recursion.
"""
from dataclasses import dataclass

import numpy as np

from ._backend import impl
from .limbcore import (
    UNSATURATED, ContractError, RadixConfig, as_limbs, pack_64_to_52, pad, unpack_52_to_64,
    zeros,
)
from .vecaddsub import timer_overhead, width_code

MUL_PHASES = ("gather", "compute", "align", "reduce", "carry_pass")
ACC_BITS = 128


def num_pairs(c, m):
    return min(c + 1, m, 2 * m - 1 - c)


@dataclass
class ColumnBuffers:
    """Gathered operands, partial-product halves and column sums for one product."""

    m: int
    ma: np.ndarray
    mb: np.ndarray
    column: np.ndarray
    p_lo: np.ndarray = None
    p_hi: np.ndarray = None
    k: int = 64
    columns: list = None

    @property
    def counts(self):
        return [num_pairs(c, self.m) for c in range(2 * self.m - 1)]


@dataclass(frozen=True)
class KaratsubaConfig:
    threshold: int = 4
    w: int = 8

    def __post_init__(self):
        if self.threshold < 1:
            raise ContractError("Karatsuba threshold must be at least 1")
        _kara_width(self.w)


def _mul_width(w):
    # partial products need a real chunk width; "scalar" means chunks of one
    if w == "scalar":
        return 1
    if isinstance(w, int) and not isinstance(w, bool) and 1 <= w <= 8:
        return w
    raise ContractError(f"multiplication width must be in 1..8 or 'scalar', not {w!r}")


def _square_pair(a, b, cfg):
    a = as_limbs(a, cfg)
    b = as_limbs(b, cfg)
    if len(a) != len(b):
        raise ContractError(f"operands differ in length ({len(a)} vs {len(b)} limbs)")
    return a, b


def gather_columns(a, b):
    """Lay out every pair ``(a_i, b_j)`` by column ``i + j``, ``i`` ascending."""
    a, b = _square_pair(a, b, 64)
    m = len(a)
    ii, cc = [], []
    for c in range(2 * m - 1):
        lo = max(0, c - m + 1)
        for i in range(lo, lo + num_pairs(c, m)):
            ii.append(i)
            cc.append(c)
    ii = np.array(ii, dtype=np.intp)
    cc = np.array(cc, dtype=np.intp)
    return ColumnBuffers(m=m, ma=a[ii], mb=b[cc - ii], column=cc)


def compute_partials(buf, k=64, w=8, order=None):
    """Fill ``p_lo``/``p_hi`` with each product split at bit ``k``.

    Entries are produced chunk by chunk (``w`` at a time); ``order`` permutes
    the chunk evaluation order, which must not change anything.
    """
    RadixConfig(k)
    step = _mul_width(w)
    n = len(buf.ma)
    mask = (1 << k) - 1
    lo = zeros(n)
    hi = zeros(n)
    starts = list(range(0, n, step))
    if order is not None:
        if sorted(order) != list(range(len(starts))):
            raise ContractError("order must permute the chunk indices")
        starts = [starts[j] for j in order]
    ma = buf.ma.tolist()
    mb = buf.mb.tolist()
    for s in starts:
        for t in range(s, min(s + step, n)):
            p = ma[t] * mb[t]
            lo[t] = p & mask
            hi[t] = p >> k
    buf.p_lo, buf.p_hi, buf.k = lo, hi, k
    return buf


def accumulator_fits(m, k, acc_bits=ACC_BITS):
    # a column holds at most m low halves and m high halves, each below 2^k
    return m == 0 or k + (2 * m).bit_length() <= acc_bits


def align_and_reduce(buf, acc_bits=ACC_BITS):
    """Column sums: low half of pair in column ``c``, high half in ``c + 1``."""
    m = buf.m
    if not accumulator_fits(m, buf.k, acc_bits):
        raise ContractError(f"{m} limbs overflow a {acc_bits}-bit column accumulator")
    cols = [0] * (2 * m)
    for c, lo, hi in zip(buf.column.tolist(), buf.p_lo.tolist(), buf.p_hi.tolist()):
        cols[c] += lo
        cols[c + 1] += hi
    buf.columns = cols
    return cols


def carry_pass(columns, k=64):
    """One left-to-right carry sweep; a leftover carry becomes an extra limb."""
    mask = (1 << k) - 1
    out = []
    carry = 0
    for v in columns:
        v = int(v) + carry
        carry = v >> k
        out.append(v & mask)
    while carry:
        out.append(carry & mask)
        carry >>= k
    return np.array(out, dtype=np.uint64)


def staged_mul(a, b, k=64, w=8, order=None):
    """The five stages run one after another in Python (slow, for inspection)."""
    cfg = RadixConfig(k)
    a, b = _square_pair(a, b, cfg)
    buf = gather_columns(a, b)
    compute_partials(buf, k, w, order)
    return carry_pass(align_and_reduce(buf), k)


def dot_mul_words(a, b, k=64, w=8):
    """Full ``2m``-limb product of two ``m``-limb operands in radix ``2^k``."""
    cfg = RadixConfig(k)
    a, b = _square_pair(a, b, cfg)
    m = len(a)
    if not accumulator_fits(m, k):
        raise ContractError(f"{m} limbs overflow a {ACC_BITS}-bit column accumulator")
    out = zeros(2 * m)
    if m:
        impl.mul_words(a, b, out, k, _mul_width(w))
    return out


def dot_mul_words_stats(a, b, k=64, w=8):
    """Instrumented :func:`dot_mul_words`; returns ``(product, ticks per phase)``."""
    cfg = RadixConfig(k)
    a, b = _square_pair(a, b, cfg)
    out = zeros(2 * len(a))
    ticks = np.zeros(len(MUL_PHASES), dtype=np.uint64)
    if len(a):
        impl.mul_words_timed(a, b, out, k, _mul_width(w), ticks)
    return out, dict(zip(MUL_PHASES, (int(t) for t in ticks)))


def dot_mul_5x5(a, b):
    """10-limb product of two 5-limb operands in radix 2^52."""
    a = as_limbs(a, UNSATURATED)
    b = as_limbs(b, UNSATURATED)
    if len(a) != 5 or len(b) != 5:
        raise ContractError("5x5 multiplication takes exactly 5 limbs per operand")
    out = zeros(10)
    impl.mul_5x5(a, b, out)
    return out


def dot_mul_4x4(a, b):
    """8-limb product of two 4-limb operands in radix 2^64."""
    a = as_limbs(a)
    b = as_limbs(b)
    if len(a) != 4 or len(b) != 4:
        raise ContractError("4x4 multiplication takes exactly 4 limbs per operand")
    out = zeros(8)
    impl.mul_4x4(a, b, out)
    return out


def dot_mul_4x4_staged(a, b):
    """4x4 spelled out: repack, 5x5 in radix 2^52, unpack to 8 limbs."""
    p = dot_mul_5x5(pack_64_to_52(a), pack_64_to_52(b))
    return unpack_52_to_64(p, 8)


def _pow2(m):
    return 1 << max(0, m - 1).bit_length()


def karatsuba_mul(a, b, cfg=None):
    """Product via Karatsuba, column-wise base case at or below the threshold.

    Operands are zero-padded to a common power-of-two length on entry; the
    result is ``2 * max(len(a), len(b))`` limbs.
    """
    cfg = cfg or KaratsubaConfig()
    a = as_limbs(a)
    b = as_limbs(b)
    m = max(len(a), len(b))
    if m == 0:
        return zeros(0)
    n = m if m <= cfg.threshold else _pow2(m)
    a = pad(a, n)
    b = pad(b, n)
    out = zeros(2 * n)
    impl.karatsuba(a, b, out, cfg.threshold, _kara_width(cfg.w))
    return out[: 2 * m].copy()


def _kara_width(w):
    # the recursion's additions and subtractions run on the packed-mask word kernels
    code = width_code(w)
    if code == 0:
        raise ContractError("Karatsuba needs a vector width of 2, 4 or 8")
    return code


def _batch_pair(A, B):
    A = np.ascontiguousarray(A, dtype=np.uint64)
    B = np.ascontiguousarray(B, dtype=np.uint64)
    if A.ndim != 2 or A.shape != B.shape:
        raise ContractError("batch operands must be equal-shape 2-D arrays")
    return A, B


def mul_words_batch(A, B, k=64, w=8, backend=None):
    be = backend or impl
    A, B = _batch_pair(A, B)
    if k == 52 and A.size and int(A.max() | B.max()) >> 52:
        raise ContractError("limbs exceed 52 bits")
    P = np.zeros((A.shape[0], 2 * A.shape[1]), dtype=np.uint64)
    if A.shape[1]:
        be.mul_words_batch(A, B, P, k, _mul_width(w))
    return P


def mul_words_batch_stats(A, B, k=64, w=8, backend=None):
    """Instrumented :func:`mul_words_batch`; ticks per phase, timer overhead removed."""
    be = backend or impl
    A, B = _batch_pair(A, B)
    P = np.zeros((A.shape[0], 2 * A.shape[1]), dtype=np.uint64)
    ticks = np.zeros(len(MUL_PHASES), dtype=np.uint64)
    if A.shape[1]:
        be.mul_words_batch_timed(A, B, P, k, _mul_width(w), ticks)
    over = timer_overhead(be) * A.shape[0]
    return P, {p: max(0, int(t) - over) for p, t in zip(MUL_PHASES, ticks)}


def mul_5x5_batch(A, B, backend=None):
    be = backend or impl
    A, B = _batch_pair(A, B)
    if A.shape[1] != 5:
        raise ContractError("5x5 batches need 5 limbs per row")
    if A.size and int(A.max() | B.max()) >> 52:
        raise ContractError("limbs exceed 52 bits")
    P = np.zeros((A.shape[0], 10), dtype=np.uint64)
    be.mul_5x5_batch(A, B, P)
    return P


def mul_4x4_batch(A, B, backend=None):
    be = backend or impl
    A, B = _batch_pair(A, B)
    if A.shape[1] != 4:
        raise ContractError("4x4 batches need 4 limbs per row")
    P = np.zeros((A.shape[0], 8), dtype=np.uint64)
    be.mul_4x4_batch(A, B, P)
    return P


def karatsuba_operands(A, B, cfg):
    """Zero-pad batch rows to the length the recursion expects."""
    m = A.shape[1]
    n = m if m <= cfg.threshold else _pow2(m)
    if n != m:
        A = np.ascontiguousarray(np.pad(A, ((0, 0), (0, n - m))))
        B = np.ascontiguousarray(np.pad(B, ((0, 0), (0, n - m))))
    return A, B


def karatsuba_batch(A, B, cfg=None, backend=None):
    be = backend or impl
    cfg = cfg or KaratsubaConfig()
    A, B = _batch_pair(A, B)
    m = A.shape[1]
    if m == 0:
        return np.zeros((A.shape[0], 0), dtype=np.uint64)
    A, B = karatsuba_operands(A, B, cfg)
    n = A.shape[1]
    P = np.zeros((A.shape[0], 2 * n), dtype=np.uint64)
    be.karatsuba_batch(A, B, P, cfg.threshold, _kara_width(cfg.w))
    return np.ascontiguousarray(P[:, : 2 * m])


__all__ = [
    "ColumnBuffers", "KaratsubaConfig", "MUL_PHASES", "accumulator_fits", "align_and_reduce",
    "carry_pass", "compute_partials", "dot_mul_4x4", "dot_mul_4x4_staged",
    "dot_mul_5x5", "dot_mul_words", "dot_mul_words_stats", "gather_columns", "karatsuba_batch",
    "karatsuba_mul", "karatsuba_operands", "mul_4x4_batch", "mul_5x5_batch", "mul_words_batch",
    "mul_words_batch_stats", "num_pairs", "staged_mul",
]
