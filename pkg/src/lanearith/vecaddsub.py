"""Lane-parallel addition and subtraction over w-limb chunks.

Each chunk runs four phases: lane-wise add, carry-mask generation, aligned
carry add, and (only when the carry add itself overflows) a mask-addition
fix-up that ripples the cascade through lanes sitting at 2^64 - 1.
Subtraction is the borrow mirror: the cascade runs through lanes at zero.

Widths 2, 4 and 8 select packed-mask kernels (AVX-512 mask registers when the
CPU has them); ``"scalar"`` selects a per-lane emulation of the same phases
on 8-lane chunks.
"""
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from ._backend import impl
from .limbcore import ContractError, as_limbs, pad, zeros

WIDTHS = (2, 4, 8, "scalar")
PHASES = ("load_add", "carry_gen", "carry_add", "overflow")
CARRY_PHASES = PHASES[1:]
# kernel timing slots (load, add, carry gen, carry add, store & check, overflow) per bucket
_SLOTS = ((0, 1), (2,), (3, 4), (5,))


class ChunkResult(NamedTuple):
    sums: np.ndarray
    carry_out: int
    phase4_fired: bool


@dataclass
class AddSubStats:
    """Counters and per-phase ticks from an instrumented run.

    Ticks come from timer reads between phases and are only indicative: a
    phase lasts a few cycles, about as long as one serialized timer read.
    ``bench`` measures phase cost by ablation instead.
    """

    operations: int = 0
    chunks_processed: int = 0
    phase4_triggers: int = 0
    phase4_operations: int = 0
    ticks: dict = field(default_factory=lambda: dict.fromkeys(PHASES, 0))
    timer: str = ""

    def phase_percentages(self):
        total = sum(self.ticks.values())
        if not total:
            return dict.fromkeys(PHASES, 0.0)
        return {p: 100.0 * self.ticks[p] / total for p in PHASES}

    @property
    def carry_to_add_ratio(self):
        add = self.ticks["load_add"]
        if not add:
            return float("nan")
        return sum(self.ticks[p] for p in CARRY_PHASES) / add


def width_code(w):
    """Backend code for a public width: 2, 4, 8, or 0 for the lane emulation."""
    if w == "scalar" or w == 0:
        return 0
    if w in (2, 4, 8) and not isinstance(w, bool):
        return int(w)
    raise ContractError(f"width must be one of {WIDTHS}, not {w!r}")


def chunk_size(w):
    code = width_code(w)
    return 8 if code == 0 else code


def _operand(x):
    if isinstance(x, np.ndarray) and x.dtype == np.uint64 and x.flags.c_contiguous:
        if x.ndim != 1:
            raise ContractError("limb arrays are one-dimensional")
        return x
    return as_limbs(x)


def _out(out, m):
    if out is None:
        return zeros(m)
    if not (isinstance(out, np.ndarray) and out.dtype == np.uint64
            and out.flags.c_contiguous and out.shape == (m,)):
        raise ContractError(f"out must be a contiguous uint64 array of {m} limbs")
    return out


def _chunk(sub, a, b, c_in, w, emulate):
    a = _operand(a)
    b = _operand(b)
    if w is None:
        w = len(a)
    if not 1 <= w <= 8:
        raise ContractError(f"chunk width must be in 1..8, not {w}")
    if len(a) != w or len(b) != w:
        raise ContractError(f"chunk operands must have exactly {w} limbs")
    if c_in not in (0, 1):
        raise ContractError("carry-in must be 0 or 1")
    out = zeros(w)
    c, fired = (impl.sub_chunk if sub else impl.add_chunk)(a, b, out, c_in, 0 if emulate else w)
    return ChunkResult(out, int(c), bool(fired))


def add_w_limbs(a, b, c_in=0, w=None, emulate=False):
    """Add one chunk of ``w`` (1..8) limbs with carry-in; see :class:`ChunkResult`."""
    return _chunk(False, a, b, c_in, w, emulate)


def sub_w_limbs(a, b, borrow_in=0, w=None, emulate=False):
    return _chunk(True, a, b, borrow_in, w, emulate)


def _words(sub, a, b, w, out):
    a = _operand(a)
    b = _operand(b)
    if len(a) != len(b):
        raise ContractError(f"operands differ in length ({len(a)} vs {len(b)} limbs)")
    code = width_code(w)
    out = _out(out, len(a))
    fn = impl.sub_words if sub else impl.add_words
    c, _ = fn(a, b, out, code)
    return out, int(c)


def dot_add_words(a, b, w=8, out=None):
    """Return ``(sum limbs, carry)`` for equal-length ``a`` and ``b``.

    ``out`` may be ``a`` or ``b`` for in-place use.
    """
    return _words(False, a, b, w, out)


def dot_sub_words(a, b, w=8, out=None):
    """Return ``(difference mod X^m, borrow)``; borrow is 1 iff a < b."""
    return _words(True, a, b, w, out)


def _equalize(a, b):
    a = _operand(a)
    b = _operand(b)
    m = max(len(a), len(b))
    if len(a) != m:
        a = pad(a, m)
    if len(b) != m:
        b = pad(b, m)
    return a, b


def add(a, b, w=8):
    """Like :func:`dot_add_words` but zero-pads the shorter operand."""
    return dot_add_words(*_equalize(a, b), w=w)


def sub(a, b, w=8):
    return dot_sub_words(*_equalize(a, b), w=w)


_overheads = {}


def timer_overhead(be=None):
    """Cheapest back-to-back timer read for a backend, measured once."""
    be = be or impl
    if be.NAME not in _overheads:
        _overheads[be.NAME] = int(be.timer_overhead())
    return _overheads[be.NAME]


def _stats_from(ticks, overhead, ops, chunks, fired, timer):
    # one timer read per recorded interval; the overflow slot records only on fired chunks
    adj = {}
    for p, slots in zip(PHASES, _SLOTS):
        adj[p] = sum(max(0, int(ticks[i]) - (fired if i == 5 else chunks) * overhead)
                     for i in slots)
    return AddSubStats(
        operations=ops,
        chunks_processed=chunks,
        phase4_triggers=int(np.sum(fired)) if np.ndim(fired) else int(fired),
        ticks=adj,
        timer=timer,
    )


def _n_chunks(m, w):
    step = chunk_size(w)
    return -(-m // step)


def dot_add_words_stats(a, b, w=8):
    """Instrumented add: ``(sum, carry, AddSubStats)``."""
    return _words_stats(False, a, b, w)


def dot_sub_words_stats(a, b, w=8):
    return _words_stats(True, a, b, w)


def _words_stats(sub, a, b, w):
    a = _operand(a)
    b = _operand(b)
    if len(a) != len(b):
        raise ContractError(f"operands differ in length ({len(a)} vs {len(b)} limbs)")
    code = width_code(w)
    out = zeros(len(a))
    ticks = np.zeros(6, dtype=np.uint64)
    fn = impl.sub_words_timed if sub else impl.add_words_timed
    c, fired = fn(a, b, out, code, ticks)
    chunks = _n_chunks(len(a), w)
    stats = _stats_from(ticks, timer_overhead(), 1, chunks, fired, impl.timer_name())
    stats.phase4_operations = int(fired > 0)
    return out, int(c), stats


def _batch_arrays(A, B):
    A = np.ascontiguousarray(A, dtype=np.uint64)
    B = np.ascontiguousarray(B, dtype=np.uint64)
    if A.ndim != 2 or A.shape != B.shape:
        raise ContractError("batch operands must be equal-shape 2-D arrays")
    return A, B


def add_batch(A, B, w=8, backend=None):
    """Row-wise add of two (n, m) arrays: ``(S, carries, fired_chunks)``."""
    return _batch(False, A, B, w, backend)


def sub_batch(A, B, w=8, backend=None):
    return _batch(True, A, B, w, backend)


def _batch(sub, A, B, w, be):
    be = be or impl
    A, B = _batch_arrays(A, B)
    code = width_code(w)
    S = np.empty_like(A)
    carry = np.zeros(A.shape[0], dtype=np.uint8)
    fired = np.zeros(A.shape[0], dtype=np.uint64)
    (be.sub_batch if sub else be.add_batch)(A, B, S, code, carry, fired)
    return S, carry, fired


def add_batch_stats(A, B, w=8, backend=None):
    """Instrumented :func:`add_batch`; returns ``(S, carries, fired, AddSubStats)``.

    ``backend`` overrides the kernel module picked at import.
    """
    return _batch_stats(False, A, B, w, backend)


def sub_batch_stats(A, B, w=8, backend=None):
    return _batch_stats(True, A, B, w, backend)


def _batch_stats(sub, A, B, w, be):
    be = be or impl
    A, B = _batch_arrays(A, B)
    code = width_code(w)
    S = np.empty_like(A)
    carry = np.zeros(A.shape[0], dtype=np.uint8)
    fired = np.zeros(A.shape[0], dtype=np.uint64)
    ticks = np.zeros(6, dtype=np.uint64)
    (be.sub_batch_timed if sub else be.add_batch_timed)(A, B, S, code, carry, fired, ticks)
    chunks = A.shape[0] * _n_chunks(A.shape[1], w) if A.shape[1] else 0
    stats = _stats_from(ticks, timer_overhead(be), A.shape[0], chunks, int(fired.sum()),
                        be.timer_name())
    stats.phase4_operations = int(np.count_nonzero(fired))
    return S, carry, fired, stats
