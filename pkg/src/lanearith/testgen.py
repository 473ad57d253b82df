"""Seeded operand generation (random and pathological) and JSONL test vectors.

Operands come from a 64-bit Mersenne Twister (MT19937-64), one raw output
per limb, so a seed pins down every byte of a corpus. Expected values are
always computed by :mod:`lanearith.oracle`.
"""
import hashlib
import json
from dataclasses import dataclass

import numpy as np

from ._backend import impl
from .limbcore import ContractError, ParseError, from_hex, to_hex
from .oracle import oracle_add_batch, oracle_mul_batch, oracle_sub_batch

OPS = ("add", "sub", "mul")
CATEGORIES = (
    "random", "full-propagation", "maxed-limbs", "zero-limbs",
    "frequent-carries", "frequent-borrows", "mixed",
)
PATHOLOGICAL = CATEGORIES[1:]
DEFAULT_SIZES = tuple(512 * f for f in (1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64))

MAX64 = np.uint64(0xFFFFFFFFFFFFFFFF)
TOP = np.uint64(1 << 63)


@dataclass(frozen=True)
class RngSpec:
    seed: int
    algorithm: str = "mt19937-64"

    def __post_init__(self):
        if not 0 <= self.seed < 1 << 64:
            raise ContractError("seed must be an unsigned 64-bit value")
        if self.algorithm != "mt19937-64":
            raise ContractError(f"unsupported generator {self.algorithm!r}")

    def stream(self):
        return impl.MT64(self.seed)

    def derive(self, *labels):
        """Independent seed for one shard of a corpus, e.g. ``derive("add", 512)``."""
        h = hashlib.blake2b(digest_size=8)
        h.update(self.seed.to_bytes(8, "little"))
        for lab in labels:
            h.update(b"\0" + str(lab).encode())
        return RngSpec(int.from_bytes(h.digest(), "little"), self.algorithm)


def limbs_for(bits):
    if bits <= 0 or bits % 64:
        raise ContractError(f"operand size must be a positive multiple of 64 bits, not {bits}")
    return bits // 64


def _check(op, category):
    if op not in OPS:
        raise ContractError(f"unknown op {op!r}")
    if category not in CATEGORIES:
        raise ContractError(f"unknown category {category!r}")


class OperandStream:
    """Operand pairs for one (op, size, category), drawn in order from one seed.

    ``take(n)`` returns the next ``n`` pairs as two ``(n, m)`` arrays; how the
    draws are split into calls does not change the values.
    """

    def __init__(self, spec, bits, category="random", op="add"):
        _check(op, category)
        self.m = limbs_for(bits)
        self.bits = bits
        self.category = category
        self.op = op
        self.index = 0
        self._rng = spec.stream()

    def _raw(self, n, planes):
        buf = np.empty(n * planes * self.m, dtype=np.uint64)
        self._rng.fill(buf)
        return buf.reshape(n, planes, self.m)

    def take(self, n):
        if self.category == "random":
            r = self._raw(n, 2)
            A, B = r[:, 0].copy(), r[:, 1].copy()
        else:
            r = self._raw(n, 4)
            A, B = _shape(self.category, self.op, r, self.index)
        self.index += n
        return A, B


def _shape(category, op, r, first):
    a, b, sel, extra = (r[:, i].copy() for i in range(4))
    n, m = a.shape
    bit = sel & np.uint64(1)
    if category == "full-propagation":
        low = extra[:, 0] | np.uint64(1)
        if first == 0 and n:
            low[0] = 1
        if op == "sub":
            a[:] = 0
            b[:] = 0
            b[:, 0] = low
        else:
            a[:] = MAX64
            if op == "add":
                b[:] = 0
                b[:, 0] = low
            else:
                b[:] = MAX64
                if first == 0 and n:
                    low[0] = MAX64
                b[:, 0] = low
    elif category == "maxed-limbs":
        a[bit == 1] = MAX64
        b[(sel >> np.uint64(1)) & np.uint64(1) == 1] = MAX64
        a[np.arange(n), (extra[:, 0] % np.uint64(m)).astype(np.intp)] = MAX64
    elif category == "zero-limbs":
        a[bit == 1] = 0
        b[(sel >> np.uint64(1)) & np.uint64(1) == 1] = 0
        a[np.arange(n), (extra[:, 0] % np.uint64(m)).astype(np.intp)] = 0
    elif category == "frequent-carries":
        a |= TOP
        b |= TOP
    elif category == "frequent-borrows":
        a &= ~TOP
        b |= TOP
    elif category == "mixed":
        pick = sel % np.uint64(5)
        a[pick == 1] = MAX64
        b[pick == 1] = extra[pick == 1] & np.uint64(0xFF)
        a[pick == 2] = 0
        b[pick == 2] = extra[pick == 2] & np.uint64(0xFF)
        a[pick == 3] |= TOP
        b[pick == 3] |= TOP
        a[pick == 4] &= ~TOP
        b[pick == 4] |= TOP
    return a, b


def draw_operands(spec, bits, count, category="random", op="add"):
    return OperandStream(spec, bits, category, op).take(count)


@dataclass
class TestCase:
    op: str
    bits: int
    category: str
    a: np.ndarray
    b: np.ndarray
    expected: np.ndarray
    flag: int = None

    __test__ = False  # not a pytest class

    def to_json(self):
        return json.dumps({
            "op": self.op,
            "bits": self.bits,
            "category": self.category,
            "a": to_hex(self.a),
            "b": to_hex(self.b),
            "expected": to_hex(self.expected),
            "flag": self.flag,
        })

    @classmethod
    def from_json(cls, line):
        d = json.loads(line)
        op, bits, category = d["op"], int(d["bits"]), d["category"]
        _check(op, category)
        m = limbs_for(bits)
        flag = d.get("flag")
        if op == "mul":
            flag = None
        elif flag not in (0, 1):
            raise ValueError("flag must be 0 or 1 for add/sub")
        return cls(
            op, bits, category,
            from_hex(d["a"], length=m),
            from_hex(d["b"], length=m),
            from_hex(d["expected"], length=2 * m if op == "mul" else m),
            flag,
        )

    def same_as(self, other):
        return (
            (self.op, self.bits, self.category, self.flag)
            == (other.op, other.bits, other.category, other.flag)
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
            and np.array_equal(self.expected, other.expected)
        )


def expected_for(op, A, B):
    """Oracle results for a batch: ``(values, flags)``; flags is None for mul."""
    if op == "add":
        return oracle_add_batch(A, B)
    if op == "sub":
        return oracle_sub_batch(A, B)
    if op == "mul":
        return oracle_mul_batch(A, B), None
    raise ContractError(f"unknown op {op!r}")


def _cases(op, bits, category, A, B):
    E, F = expected_for(op, A, B)
    return [
        TestCase(op, bits, category, A[i], B[i], E[i], None if F is None else int(F[i]))
        for i in range(A.shape[0])
    ]


def gen_random(spec, bits, count, op="add"):
    A, B = draw_operands(spec, bits, count, "random", op)
    return _cases(op, bits, "random", A, B)


def gen_pathological(spec, bits, category, count, op="add"):
    if category not in PATHOLOGICAL:
        raise ContractError(f"unknown pathological category {category!r}")
    A, B = draw_operands(spec, bits, count, category, op)
    return _cases(op, bits, category, A, B)


def gen_corpus(spec, ops=("add",), sizes=DEFAULT_SIZES, cases=1000, categories=("random",)):
    """Cases for every (op, size, category); each shard gets its own derived seed."""
    out = []
    for op in ops:
        for bits in sizes:
            for cat in categories:
                sub = spec.derive(op, bits, cat)
                if cat == "random":
                    out.extend(gen_random(sub, bits, cases, op))
                else:
                    out.extend(gen_pathological(sub, bits, cat, cases, op))
    return out


def write_vectors(cases, path):
    with open(path, "w", encoding="ascii", newline="\n") as f:
        for c in cases:
            f.write(c.to_json())
            f.write("\n")


def read_vectors(path):
    cases = []
    with open(path, encoding="ascii") as f:
        for n, line in enumerate(f, 1):
            if not line.strip():
                continue
            try:
                cases.append(TestCase.from_json(line))
            except (ValueError, KeyError, TypeError, ContractError) as e:
                raise ParseError(f"{path}:{n}: bad test vector ({e})") from e
    return cases
