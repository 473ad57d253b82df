"""Limb arrays, radix configurations, 64/52-bit repacking and hex/byte I/O.

A limb array is a 1-D ``numpy.uint64`` array, least significant limb first.
The empty array is zero. 52-bit limbs live one per 64-bit word with the top
12 bits clear.
"""
import re
from dataclasses import dataclass

import numpy as np

from ._backend import impl

LIMB_DTYPE = np.uint64

_HEX_RE = re.compile(r"(?:0[xX])?[0-9a-fA-F]+(?:_[0-9a-fA-F]+)*")


class LimbError(ValueError):
    pass


class ParseError(LimbError):
    pass


class RepresentationError(LimbError):
    """A limb does not fit the radix it is declared in."""


class ContractError(ValueError):
    """Caller broke a precondition (length mismatch, bad width, ...)."""


@dataclass(frozen=True)
class RadixConfig:
    k: int

    def __post_init__(self):
        if self.k not in (64, 52):
            raise ValueError(f"limb width must be 64 or 52, not {self.k}")

    @property
    def base(self):
        return 1 << self.k

    @property
    def mask(self):
        return (1 << self.k) - 1

    @property
    def saturated(self):
        return self.k == 64


SATURATED = RadixConfig(64)
UNSATURATED = RadixConfig(52)


def _cfg(cfg):
    if cfg is None:
        return SATURATED
    if isinstance(cfg, int):
        return RadixConfig(cfg)
    return cfg


def check_radix(a, cfg=None):
    cfg = _cfg(cfg)
    if cfg.k < 64 and a.size and int(a.max()) >> cfg.k:
        bad = int(np.argmax(a >> np.uint64(cfg.k) != 0))
        raise RepresentationError(f"limb {bad} = {int(a[bad]):#x} does not fit in {cfg.k} bits")
    return a


def as_limbs(words, cfg=None):
    """Copy ``words`` into a contiguous uint64 limb array, checking the radix."""
    cfg = _cfg(cfg)
    if isinstance(words, np.ndarray):
        if words.ndim != 1:
            raise ContractError("limb arrays are one-dimensional")
        if words.dtype != LIMB_DTYPE:
            if words.dtype.kind not in "iu":
                raise RepresentationError(f"limbs must be integers, not {words.dtype}")
            if words.dtype.kind == "i" and words.size and words.min() < 0:
                raise RepresentationError("negative limb")
            words = words.astype(LIMB_DTYPE)
        return check_radix(np.ascontiguousarray(words), cfg)
    vals = [int(w) for w in words]
    for i, w in enumerate(vals):
        if w < 0 or w >> cfg.k:
            raise RepresentationError(f"limb {i} = {w:#x} does not fit in {cfg.k} bits")
    return np.array(vals, dtype=LIMB_DTYPE)


def zeros(m):
    return np.zeros(m, dtype=LIMB_DTYPE)


def normalize(a):
    """Drop high zero limbs; zero becomes the empty array."""
    nz = np.flatnonzero(a)
    if nz.size == 0:
        return a[:0].copy()
    return a[: nz[-1] + 1].copy()


def pad(a, m):
    """Zero-extend to ``m`` limbs (``a`` must already fit)."""
    if len(a) > m:
        if np.any(a[m:]):
            raise ContractError(f"value needs more than {m} limbs")
        return a[:m].copy()
    out = zeros(m)
    out[: len(a)] = a
    return out


def from_int(x, cfg=None, length=None):
    cfg = _cfg(cfg)
    if x < 0:
        raise RepresentationError("negative values are not representable")
    words = []
    while x:
        words.append(x & cfg.mask)
        x >>= cfg.k
    a = np.array(words, dtype=LIMB_DTYPE)
    return a if length is None else pad(a, length)


def to_int(a, cfg=None):
    cfg = _cfg(cfg)
    x = 0
    for w in reversed(a.tolist()):
        x = (x << cfg.k) | int(w)
    return x


def from_hex(s, cfg=None, length=None):
    """Parse a hex numeral (optional ``0x``, ``_`` separators allowed)."""
    if not isinstance(s, str) or not _HEX_RE.fullmatch(s.strip()):
        raise ParseError(f"not a hexadecimal numeral: {s!r}")
    return from_int(int(s.strip(), 16), cfg, length)


def to_hex(a, cfg=None):
    return format(to_int(a, cfg), "x")


def to_bytes(a, cfg=None):
    """Little-endian bytes of the value, ``ceil(bits/8)`` long for ``len(a)`` limbs."""
    cfg = _cfg(cfg)
    nbytes = (len(a) * cfg.k + 7) // 8
    return to_int(a, cfg).to_bytes(nbytes, "little")


def from_bytes(data, cfg=None, length=None):
    return from_int(int.from_bytes(data, "little"), cfg, length)


def compare(a, b):
    """-1, 0 or 1 by represented value; high zero limbs are ignored."""
    n = max(len(a), len(b))
    for i in range(n - 1, -1, -1):
        x = int(a[i]) if i < len(a) else 0
        y = int(b[i]) if i < len(b) else 0
        if x != y:
            return 1 if x > y else -1
    return 0


def packed_length(m):
    """Number of 52-bit limbs holding ``m`` 64-bit limbs."""
    return (64 * m + 51) // 52


def pack_64_to_52(a):
    """Re-slice the 64*m-bit stream of ``a`` into 52-bit limbs, zero-padded on top."""
    a = as_limbs(a)
    out = zeros(packed_length(len(a)))
    impl.pack_64_52(a, out)
    return out


def unpack_52_to_64(a, length=None):
    """Inverse of :func:`pack_64_to_52`.

    Without ``length`` the result has ``floor(52n/64)`` limbs when the bits
    above that are clear (always true for packed input) and
    ``ceil(52n/64)`` otherwise.
    """
    a = as_limbs(a, UNSATURATED)
    if length is None:
        out = zeros((52 * len(a)) // 64)
        if not impl.unpack_52_64(a, out):
            return out
        length = len(out) + 1
    out = zeros(length)
    if impl.unpack_52_64(a, out):
        raise ContractError(f"value does not fit in {length} 64-bit limbs")
    return out
