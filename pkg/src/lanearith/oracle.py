"""Naive limb-serial reference arithmetic.

These loops use no lane tricks at all, so they cannot share a bug with the
vector kernels. Every expected value in a test corpus comes from here.
"""
import numpy as np

from ._backend import impl
from .limbcore import ContractError, as_limbs, normalize, zeros

CENSUS_MAX_K = 16


def _pair(a, b):
    a = as_limbs(a)
    b = as_limbs(b)
    if len(a) != len(b):
        raise ContractError(f"operands differ in length ({len(a)} vs {len(b)} limbs)")
    return a, b


def oracle_add(a, b):
    """Add-with-carry one limb at a time; returns ``(sum, carry)``."""
    a, b = _pair(a, b)
    out = zeros(len(a))
    return out, int(impl.oracle_add(a, b, out))


def oracle_sub(a, b):
    """Subtract-with-borrow one limb at a time; returns ``(difference, borrow)``."""
    a, b = _pair(a, b)
    out = zeros(len(a))
    return out, int(impl.oracle_sub(a, b, out))


def oracle_mul(a, b):
    """Schoolbook product with 128-bit intermediates, high zero limbs trimmed."""
    a = as_limbs(a)
    b = as_limbs(b)
    out = zeros(len(a) + len(b))
    impl.oracle_mul(a, b, out)
    return normalize(out)


def _batch_pair(A, B):
    A = np.ascontiguousarray(A, dtype=np.uint64)
    B = np.ascontiguousarray(B, dtype=np.uint64)
    if A.ndim != 2 or A.shape != B.shape:
        raise ContractError("batch operands must be equal-shape 2-D arrays")
    return A, B


def oracle_add_batch(A, B, backend=None):
    be = backend or impl
    A, B = _batch_pair(A, B)
    S = np.empty_like(A)
    carry = np.zeros(A.shape[0], dtype=np.uint8)
    be.oracle_add_batch(A, B, S, carry)
    return S, carry


def oracle_sub_batch(A, B, backend=None):
    be = backend or impl
    A, B = _batch_pair(A, B)
    S = np.empty_like(A)
    borrow = np.zeros(A.shape[0], dtype=np.uint8)
    be.oracle_sub_batch(A, B, S, borrow)
    return S, borrow


def oracle_mul_batch(A, B, backend=None):
    """Row-wise full products, ``2m`` limbs per row (not trimmed)."""
    be = backend or impl
    A, B = _batch_pair(A, B)
    P = np.zeros((A.shape[0], 2 * A.shape[1]), dtype=np.uint64)
    if A.shape[1]:
        be.oracle_mul_batch(A, B, P)
    return P


def carry_census(k):
    """Count pairs of k-bit values whose sum is all ones, and pairs that carry.

    Enumerates every ``(x, y)`` in ``[0, 2^k)^2``; refuses ``k > 16``.
    """
    if not 1 <= k <= CENSUS_MAX_K:
        raise ContractError(f"census width must be in 1..{CENSUS_MAX_K}, not {k}")
    n = 1 << k
    ys = np.arange(n, dtype=np.int64)
    top = n - 1
    maxed = carries = 0
    rows = max(1, (1 << 22) // n)
    for lo in range(0, n, rows):
        xs = np.arange(lo, min(lo + rows, n), dtype=np.int64)[:, None]
        s = xs + ys
        maxed += int(np.count_nonzero(s == top))
        carries += int(np.count_nonzero(s >= n))
    return maxed, carries


def census_closed_form(k):
    n = 1 << k
    return n, n * (n - 1) // 2
