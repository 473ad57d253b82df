# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled backend. Thin typed wrappers over the C kernels in ``_csrc``.

Callers (the public modules) validate shapes and limb ranges; nothing here
re-checks them.
"""
from libc.stdint cimport uint64_t, uint8_t
from libc.stddef cimport size_t

import numpy as np

NAME = "compiled"


cdef extern from "kernels.h" nogil:
    ctypedef uint64_t limb_t
    ctypedef unsigned (*la_words_fn)(const limb_t *, const limb_t *, limb_t *, size_t,
                                     size_t *, uint64_t *)
    uint64_t la_ticks()
    const char *la_timer_name()
    uint64_t la_timer_overhead(int rounds)
    int la_cpu_has_simd()
    int la_simd_active()
    int la_set_simd(int on)
    la_words_fn la_pick_words(int sub, int width, int timed)
    unsigned la_chunk(int sub, int width, const limb_t *a, const limb_t *b, limb_t *s,
                      int t, unsigned cin, int *fired)
    size_t la_mul_words_scratch(size_t m)
    void la_mul_words_impl(const limb_t *a, const limb_t *b, limb_t *out, size_t m, int k,
                           int w, limb_t *scratch, int timed, uint64_t *ticks)
    void la_mul5x5(const limb_t *a, const limb_t *b, limb_t *out)
    void la_mul4x4(const limb_t *a, const limb_t *b, limb_t *out)
    size_t la_pack_64_52(const limb_t *a, size_t m, limb_t *out)
    int la_unpack_52_64(const limb_t *a, size_t n, limb_t *out, size_t nout)
    size_t la_karatsuba_scratch(size_t m, size_t theta)
    void la_karatsuba(const limb_t *a, const limb_t *b, limb_t *r, size_t m, size_t theta,
                      int w, limb_t *scr)

cdef extern from "oracle.h" nogil:
    uint64_t or_add_m(const uint64_t *a, const uint64_t *b, uint64_t *r, size_t m)
    uint64_t or_sub_m(const uint64_t *a, const uint64_t *b, uint64_t *r, size_t m)
    void or_mul_school(const uint64_t *a, size_t la, const uint64_t *b, size_t lb, uint64_t *r)

cdef extern from "mt64.h" nogil:
    ctypedef struct mt64_state:
        pass
    void mt64_seed(mt64_state *st, uint64_t seed)
    uint64_t mt64_next(mt64_state *st)
    void mt64_fill(mt64_state *st, uint64_t *out, size_t n)


# -------------------------------------------------------------- platform

def timer_name():
    return la_timer_name().decode()


def timer_overhead(int rounds=2000):
    return la_timer_overhead(rounds)


def ticks():
    return la_ticks()


def simd_available():
    return bool(la_cpu_has_simd())


def simd_active():
    return bool(la_simd_active())


def set_simd(bint on):
    return bool(la_set_simd(on))


cdef la_words_fn _pick(int sub, int width, int timed) except NULL:
    cdef la_words_fn fn = la_pick_words(sub, width, timed)
    if fn == NULL:
        raise ValueError(f"no kernel for width {width}")
    return fn


# ------------------------------------------------------------- add / sub

def add_chunk(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out,
              unsigned cin, int width):
    cdef int fired = 0
    cdef unsigned c = la_chunk(0, width, &a[0], &b[0], &out[0], <int>a.shape[0], cin, &fired)
    return int(c), bool(fired)


def sub_chunk(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out,
              unsigned bin, int width):
    cdef int fired = 0
    cdef unsigned c = la_chunk(1, width, &a[0], &b[0], &out[0], <int>a.shape[0], bin, &fired)
    return int(c), bool(fired)


cdef object _words(int sub, const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out,
                   int width, uint64_t *ticks):
    cdef la_words_fn fn = _pick(sub, width, ticks != NULL)
    cdef size_t m = a.shape[0], fired = 0
    cdef unsigned c = 0
    if m == 0:
        return 0, 0
    with nogil:
        c = fn(&a[0], &b[0], &out[0], m, &fired, ticks)
    return int(c), int(fired)


def add_words(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out, int width):
    return _words(0, a, b, out, width, NULL)


def sub_words(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out, int width):
    return _words(1, a, b, out, width, NULL)


def add_words_timed(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out,
                    int width, uint64_t[::1] ticks):
    return _words(0, a, b, out, width, &ticks[0])


def sub_words_timed(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out,
                    int width, uint64_t[::1] ticks):
    return _words(1, a, b, out, width, &ticks[0])


cdef void _batch(int sub, const uint64_t[:, ::1] A, const uint64_t[:, ::1] B,
                 uint64_t[:, ::1] S, int width, uint8_t[::1] carry, uint64_t[::1] fired,
                 uint64_t *ticks) except *:
    cdef la_words_fn fn = _pick(sub, width, ticks != NULL)
    cdef Py_ssize_t n = A.shape[0], i
    cdef size_t m = A.shape[1], f = 0
    if m == 0:
        for i in range(n):
            carry[i] = 0
            fired[i] = 0
        return
    with nogil:
        for i in range(n):
            carry[i] = <uint8_t>fn(&A[i, 0], &B[i, 0], &S[i, 0], m, &f, ticks)
            fired[i] = f


def add_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] S,
              int width, uint8_t[::1] carry, uint64_t[::1] fired):
    _batch(0, A, B, S, width, carry, fired, NULL)


def sub_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] S,
              int width, uint8_t[::1] carry, uint64_t[::1] fired):
    _batch(1, A, B, S, width, carry, fired, NULL)


def add_batch_timed(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] S,
                    int width, uint8_t[::1] carry, uint64_t[::1] fired, uint64_t[::1] ticks):
    _batch(0, A, B, S, width, carry, fired, &ticks[0])


def sub_batch_timed(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] S,
                    int width, uint8_t[::1] carry, uint64_t[::1] fired, uint64_t[::1] ticks):
    _batch(1, A, B, S, width, carry, fired, &ticks[0])


# -------------------------------------------------------- multiplication

def mul_words(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out, int k, int w):
    cdef size_t m = a.shape[0]
    cdef uint64_t[::1] scr = np.empty(la_mul_words_scratch(m), dtype=np.uint64)
    with nogil:
        la_mul_words_impl(&a[0], &b[0], &out[0], m, k, w, &scr[0], 0, NULL)


def mul_words_timed(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out, int k,
                    int w, uint64_t[::1] ticks):
    cdef size_t m = a.shape[0]
    cdef uint64_t[::1] scr = np.empty(la_mul_words_scratch(m), dtype=np.uint64)
    with nogil:
        la_mul_words_impl(&a[0], &b[0], &out[0], m, k, w, &scr[0], 1, &ticks[0])


cdef void _mul_words_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B,
                           uint64_t[:, ::1] P, int k, int w, uint64_t *ticks) except *:
    cdef size_t m = A.shape[1]
    cdef Py_ssize_t i, n = A.shape[0]
    cdef uint64_t[::1] scr = np.empty(la_mul_words_scratch(m), dtype=np.uint64)
    with nogil:
        for i in range(n):
            la_mul_words_impl(&A[i, 0], &B[i, 0], &P[i, 0], m, k, w, &scr[0],
                              ticks != NULL, ticks)


def mul_words_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] P,
                    int k, int w):
    _mul_words_batch(A, B, P, k, w, NULL)


def mul_words_batch_timed(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B,
                          uint64_t[:, ::1] P, int k, int w, uint64_t[::1] ticks):
    _mul_words_batch(A, B, P, k, w, &ticks[0])


def mul_5x5(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out):
    la_mul5x5(&a[0], &b[0], &out[0])


def mul_4x4(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out):
    la_mul4x4(&a[0], &b[0], &out[0])


def mul_5x5_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] P):
    cdef Py_ssize_t i
    with nogil:
        for i in range(A.shape[0]):
            la_mul5x5(&A[i, 0], &B[i, 0], &P[i, 0])


def mul_4x4_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] P):
    cdef Py_ssize_t i
    with nogil:
        for i in range(A.shape[0]):
            la_mul4x4(&A[i, 0], &B[i, 0], &P[i, 0])


def karatsuba(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out,
              size_t theta, int w):
    cdef size_t m = a.shape[0]
    cdef uint64_t[::1] scr = np.empty(la_karatsuba_scratch(m, theta), dtype=np.uint64)
    with nogil:
        la_karatsuba(&a[0], &b[0], &out[0], m, theta, w, &scr[0])


def karatsuba_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] P,
                    size_t theta, int w):
    cdef size_t m = A.shape[1]
    cdef Py_ssize_t i
    cdef uint64_t[::1] scr = np.empty(la_karatsuba_scratch(m, theta), dtype=np.uint64)
    with nogil:
        for i in range(A.shape[0]):
            la_karatsuba(&A[i, 0], &B[i, 0], &P[i, 0], m, theta, w, &scr[0])


# ----------------------------------------------------------- radix change

def pack_64_52(const uint64_t[::1] a, uint64_t[::1] out):
    if a.shape[0] == 0:
        return 0
    return la_pack_64_52(&a[0], a.shape[0], &out[0])


def unpack_52_64(const uint64_t[::1] a, uint64_t[::1] out):
    """Return True if set bits fell outside ``out``."""
    if out.shape[0] == 0:
        return bool(a.shape[0]) and any(a[i] != 0 for i in range(a.shape[0]))
    if a.shape[0] == 0:
        for i in range(out.shape[0]):
            out[i] = 0
        return False
    return bool(la_unpack_52_64(&a[0], a.shape[0], &out[0], out.shape[0]))


# ----------------------------------------------------------------- oracle

def oracle_add(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out):
    if a.shape[0] == 0:
        return 0
    return int(or_add_m(&a[0], &b[0], &out[0], a.shape[0]))


def oracle_sub(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out):
    if a.shape[0] == 0:
        return 0
    return int(or_sub_m(&a[0], &b[0], &out[0], a.shape[0]))


def oracle_mul(const uint64_t[::1] a, const uint64_t[::1] b, uint64_t[::1] out):
    cdef Py_ssize_t i
    if a.shape[0] == 0 or b.shape[0] == 0:
        for i in range(out.shape[0]):
            out[i] = 0
        return
    or_mul_school(&a[0], a.shape[0], &b[0], b.shape[0], &out[0])


def oracle_add_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] S,
                     uint8_t[::1] carry):
    cdef Py_ssize_t i
    cdef size_t m = A.shape[1]
    if m == 0:
        carry[:] = 0
        return
    with nogil:
        for i in range(A.shape[0]):
            carry[i] = <uint8_t>or_add_m(&A[i, 0], &B[i, 0], &S[i, 0], m)


def oracle_sub_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] S,
                     uint8_t[::1] borrow):
    cdef Py_ssize_t i
    cdef size_t m = A.shape[1]
    if m == 0:
        borrow[:] = 0
        return
    with nogil:
        for i in range(A.shape[0]):
            borrow[i] = <uint8_t>or_sub_m(&A[i, 0], &B[i, 0], &S[i, 0], m)


def oracle_mul_batch(const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, uint64_t[:, ::1] P):
    cdef Py_ssize_t i
    cdef size_t la = A.shape[1], lb = B.shape[1]
    with nogil:
        for i in range(A.shape[0]):
            or_mul_school(&A[i, 0], la, &B[i, 0], lb, &P[i, 0])


# ----------------------------------------------------------------- timing

ABLATION_KINDS = tuple(f"{op}_p{p}" for op in ("add", "sub") for p in (1, 2, 3))


def time_batch(str kind, const uint64_t[:, ::1] A, const uint64_t[:, ::1] B, int width=8,
               size_t theta=4, int k=64):
    """Ticks spent running ``kind`` once over every row of ``A``/``B``."""
    cdef Py_ssize_t i, n = A.shape[0]
    cdef size_t m = A.shape[1], f = 0
    cdef uint64_t t0, t1
    cdef la_words_fn fn = NULL
    cdef uint64_t[:, ::1] S
    cdef uint64_t[::1] scr
    cdef int which
    if kind in ("add", "sub"):
        fn = _pick(kind == "sub", width, 0)
        which = 0
    elif kind in ABLATION_KINDS:
        # truncated kernels: stop after phase 1, 2 or 3
        fn = _pick(kind.startswith("sub"), width, -int(kind[5:]))
        which = 0
    elif kind == "oracle_add":
        which = 1
    elif kind == "oracle_sub":
        which = 2
    elif kind == "mul_words":
        which = 3
    elif kind == "mul_4x4":
        which = 4
    elif kind == "mul_5x5":
        which = 5
    elif kind == "karatsuba":
        which = 6
    elif kind == "oracle_mul":
        which = 7
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    if n == 0 or m == 0:
        return 0
    S = np.empty((n, 2 * m + 2), dtype=np.uint64)
    if which == 3:
        scr = np.empty(la_mul_words_scratch(m), dtype=np.uint64)
    elif which == 6:
        scr = np.empty(la_karatsuba_scratch(m, theta), dtype=np.uint64)
    else:
        scr = np.empty(1, dtype=np.uint64)
    with nogil:
        t0 = la_ticks()
        for i in range(n):
            if which == 0:
                fn(&A[i, 0], &B[i, 0], &S[i, 0], m, &f, NULL)
            elif which == 1:
                or_add_m(&A[i, 0], &B[i, 0], &S[i, 0], m)
            elif which == 2:
                or_sub_m(&A[i, 0], &B[i, 0], &S[i, 0], m)
            elif which == 3:
                la_mul_words_impl(&A[i, 0], &B[i, 0], &S[i, 0], m, k, width, &scr[0], 0, NULL)
            elif which == 4:
                la_mul4x4(&A[i, 0], &B[i, 0], &S[i, 0])
            elif which == 5:
                la_mul5x5(&A[i, 0], &B[i, 0], &S[i, 0])
            elif which == 6:
                la_karatsuba(&A[i, 0], &B[i, 0], &S[i, 0], m, theta, width, &scr[0])
            else:
                or_mul_school(&A[i, 0], m, &B[i, 0], m, &S[i, 0])
        t1 = la_ticks()
    return t1 - t0


# ---------------------------------------------------------------- MT19937-64

cdef class MT64:
    """MT19937-64 stream; ``fill`` writes raw 64-bit outputs in order."""

    cdef mt64_state st

    def __init__(self, uint64_t seed):
        mt64_seed(&self.st, seed)

    def next(self):
        return mt64_next(&self.st)

    def fill(self, uint64_t[::1] out):
        if out.shape[0]:
            with nogil:
                mt64_fill(&self.st, &out[0], out.shape[0])
