"""Pure-Python backend, used when the compiled extension is missing.

Same function surface as ``_core``. Limb arrays come in as numpy uint64 and
are processed as Python ints; the packed-mask and lane-emulation kernels
follow the C bodies step for step.
"""
import time

import numpy as np

NAME = "pure"

MAX64 = (1 << 64) - 1
MASK52 = (1 << 52) - 1


def timer_name():
    return "perf_counter_ns"


def timer_overhead(rounds=2000):
    best = None
    clock = time.perf_counter_ns
    for _ in range(rounds):
        t0 = clock()
        t1 = clock()
        if best is None or t1 - t0 < best:
            best = t1 - t0
    return best


def ticks():
    return time.perf_counter_ns()


def simd_available():
    return False


def simd_active():
    return False


def set_simd(on):
    return False


# ------------------------------------------------------------- add / sub
#
# Timing slots: 0 load, 1 add, 2 carry generation, 3 carry add,
# 4 store & check, 5 overflow handling.

def _add_chunk_mask(a, b, t, cin, ticks=None, stop=4):
    clock = time.perf_counter_ns
    if ticks is not None:
        t0 = clock()
    va = a[:t]
    vb = b[:t]
    if ticks is not None:
        t1 = clock(); ticks[0] += t1 - t0; t0 = t1
    r = [(x + y) & MAX64 for x, y in zip(va, vb)]
    if ticks is not None:
        t1 = clock(); ticks[1] += t1 - t0; t0 = t1
    if stop == 1:
        return r, 0, False
    c = 0
    for i in range(t):
        if r[i] < va[i]:
            c |= 1 << i
    cout = (c >> (t - 1)) & 1
    c = (c << 1) | cin
    if ticks is not None:
        t1 = clock(); ticks[2] += t1 - t0; t0 = t1
    if stop == 2:
        return r, cout, bool(c)
    rp = [(r[i] + ((c >> i) & 1)) & MAX64 for i in range(t)]
    if ticks is not None:
        t1 = clock(); ticks[3] += t1 - t0; t0 = t1
    c2 = 0
    for i in range(t):
        if rp[i] < r[i]:
            c2 |= 1 << i
    if stop == 3:
        return rp, cout, c2 != 0
    if c2 == 0:
        if ticks is not None:
            ticks[4] += clock() - t0
        return rp, cout, False
    if ticks is not None:
        t1 = clock(); ticks[4] += t1 - t0; t0 = t1
    c2 <<= 1
    m = 0
    for i in range(t):
        if rp[i] == MAX64:
            m |= 1 << i
    c2 = c2 + m
    cout |= (c2 >> t) & 1
    m = c2 ^ m
    rp = [(rp[i] + ((m >> i) & 1)) & MAX64 for i in range(t)]
    if ticks is not None:
        ticks[5] += clock() - t0
    return rp, cout, True


def _sub_chunk_mask(a, b, t, bin_, ticks=None, stop=4):
    clock = time.perf_counter_ns
    if ticks is not None:
        t0 = clock()
    va = a[:t]
    vb = b[:t]
    if ticks is not None:
        t1 = clock(); ticks[0] += t1 - t0; t0 = t1
    r = [(x - y) & MAX64 for x, y in zip(va, vb)]
    if ticks is not None:
        t1 = clock(); ticks[1] += t1 - t0; t0 = t1
    if stop == 1:
        return r, 0, False
    c = 0
    for i in range(t):
        if va[i] < vb[i]:
            c |= 1 << i
    bout = (c >> (t - 1)) & 1
    c = (c << 1) | bin_
    if ticks is not None:
        t1 = clock(); ticks[2] += t1 - t0; t0 = t1
    if stop == 2:
        return r, bout, bool(c)
    rp = [(r[i] - ((c >> i) & 1)) & MAX64 for i in range(t)]
    if ticks is not None:
        t1 = clock(); ticks[3] += t1 - t0; t0 = t1
    c2 = 0
    for i in range(t):
        if rp[i] > r[i]:
            c2 |= 1 << i
    if stop == 3:
        return rp, bout, c2 != 0
    if c2 == 0:
        if ticks is not None:
            ticks[4] += clock() - t0
        return rp, bout, False
    if ticks is not None:
        t1 = clock(); ticks[4] += t1 - t0; t0 = t1
    c2 <<= 1
    m = 0
    for i in range(t):
        if rp[i] == 0:
            m |= 1 << i
    c2 = c2 + m
    bout |= (c2 >> t) & 1
    m = c2 ^ m
    rp = [(rp[i] - ((m >> i) & 1)) & MAX64 for i in range(t)]
    if ticks is not None:
        ticks[5] += clock() - t0
    return rp, bout, True


def _chunk_lanes(a, b, t, cin, sub, ticks=None, stop=4):
    clock = time.perf_counter_ns
    if ticks is not None:
        t0 = clock()
    va = a[:t]
    vb = b[:t]
    if ticks is not None:
        t1 = clock(); ticks[0] += t1 - t0; t0 = t1
    if sub:
        r = [(x - y) & MAX64 for x, y in zip(va, vb)]
    else:
        r = [(x + y) & MAX64 for x, y in zip(va, vb)]
    if ticks is not None:
        t1 = clock(); ticks[1] += t1 - t0; t0 = t1
    if stop == 1:
        return r, 0, False
    if sub:
        gen = [int(va[i] < vb[i]) for i in range(t)]
    else:
        gen = [int(r[i] < va[i]) for i in range(t)]
    cout = gen[t - 1]
    cy = [cin] + gen[:t - 1]
    if ticks is not None:
        t1 = clock(); ticks[2] += t1 - t0; t0 = t1
    if stop == 2:
        return r, cout, any(cy)
    if sub:
        rp = [(r[i] - cy[i]) & MAX64 for i in range(t)]
    else:
        rp = [(r[i] + cy[i]) & MAX64 for i in range(t)]
    if ticks is not None:
        t1 = clock(); ticks[3] += t1 - t0; t0 = t1
    if sub:
        sec = [0] + [int(rp[i] > r[i]) for i in range(t)]
    else:
        sec = [0] + [int(rp[i] < r[i]) for i in range(t)]
    if stop == 3:
        return rp, cout, any(sec)
    if not any(sec):
        if ticks is not None:
            ticks[4] += clock() - t0
        return rp, cout, False
    if ticks is not None:
        t1 = clock(); ticks[4] += t1 - t0; t0 = t1
    edge = 0 if sub else MAX64
    prop = [int(rp[i] == edge) for i in range(t)] + [0]
    adj = []
    k = 0
    for i in range(t + 1):
        s = sec[i] + prop[i] + k
        k = s >> 1
        adj.append((s & 1) ^ prop[i])
    cout |= adj[t]
    if sub:
        rp = [(rp[i] - adj[i]) & MAX64 for i in range(t)]
    else:
        rp = [(rp[i] + adj[i]) & MAX64 for i in range(t)]
    if ticks is not None:
        ticks[5] += clock() - t0
    return rp, cout, True


def _chunk(sub, width, a, b, t, cin, ticks=None, stop=4):
    if width == 0:
        return _chunk_lanes(a, b, t, cin, sub, ticks, stop)
    if sub:
        return _sub_chunk_mask(a, b, t, cin, ticks, stop)
    return _add_chunk_mask(a, b, t, cin, ticks, stop)


def _check_width(width):
    if width not in (0, 2, 4, 8):
        raise ValueError(f"no kernel for width {width}")


def _words_list(sub, a, b, width, ticks=None, stop=4):
    _check_width(width)
    step = 8 if width == 0 else width
    m = len(a)
    out = [0] * m
    cy = 0
    fired = 0
    for i in range(0, m, step):
        t = min(step, m - i)
        r, cy, f = _chunk(sub, width, a[i:i + t], b[i:i + t], t, cy, ticks, stop)
        out[i:i + t] = r
        fired += f
    return out, cy, fired


def _to_list(a):
    return [int(x) for x in a.tolist()]


def add_chunk(a, b, out, cin, width):
    t = len(a)
    r, c, f = _chunk(0, width, _to_list(a), _to_list(b), t, cin)
    out[:] = r
    return c, f


def sub_chunk(a, b, out, bin_, width):
    t = len(a)
    r, c, f = _chunk(1, width, _to_list(a), _to_list(b), t, bin_)
    out[:] = r
    return c, f


def _words(sub, a, b, out, width, ticks=None):
    _check_width(width)
    if len(a) == 0:
        return 0, 0
    acc = [0] * 6 if ticks is not None else None
    r, c, f = _words_list(sub, _to_list(a), _to_list(b), width, acc)
    out[:] = r
    if ticks is not None:
        ticks += np.asarray(acc, dtype=np.uint64)
    return c, f


def add_words(a, b, out, width):
    return _words(0, a, b, out, width)


def sub_words(a, b, out, width):
    return _words(1, a, b, out, width)


def add_words_timed(a, b, out, width, ticks):
    return _words(0, a, b, out, width, ticks)


def sub_words_timed(a, b, out, width, ticks):
    return _words(1, a, b, out, width, ticks)


def _batch(sub, A, B, S, width, carry, fired, ticks=None):
    _check_width(width)
    for i in range(A.shape[0]):
        c, f = _words(sub, A[i], B[i], S[i], width, ticks)
        carry[i] = c
        fired[i] = f


def add_batch(A, B, S, width, carry, fired):
    _batch(0, A, B, S, width, carry, fired)


def sub_batch(A, B, S, width, carry, fired):
    _batch(1, A, B, S, width, carry, fired)


def add_batch_timed(A, B, S, width, carry, fired, ticks):
    _batch(0, A, B, S, width, carry, fired, ticks)


def sub_batch_timed(A, B, S, width, carry, fired, ticks):
    _batch(1, A, B, S, width, carry, fired, ticks)


# -------------------------------------------------------- multiplication
#
# Mul timing slots: 0 gather, 1 partial products, 2 align hi halves,
# 3 column reduce, 4 carry pass & store.

def _mul_words_list(a, b, k, w, ticks=None):
    clock = time.perf_counter_ns
    m = len(a)
    mask = (1 << k) - 1
    if ticks is not None:
        t0 = clock()
    ma = []
    mb = []
    for c in range(2 * m - 1):
        for i in range(max(0, c - m + 1), min(c, m - 1) + 1):
            ma.append(a[i])
            mb.append(b[c - i])
    if ticks is not None:
        t1 = clock(); ticks[0] += t1 - t0; t0 = t1
    n = m * m
    plo = [0] * n
    phi = [0] * n
    for s in range(0, n, w):
        for t in range(s, min(s + w, n)):
            p = ma[t] * mb[t]
            plo[t] = p & mask
            phi[t] = p >> k
    if ticks is not None:
        t1 = clock(); ticks[1] += t1 - t0; t0 = t1
    col = [0] * (2 * m)
    idx = 0
    for c in range(2 * m - 1):
        npairs = min(c + 1, m, 2 * m - 1 - c)
        for p in range(npairs):
            col[c] += plo[idx + p]
            col[c + 1] += phi[idx + p]
        idx += npairs
    if ticks is not None:
        t1 = clock(); ticks[2] += t1 - t0; t0 = t1
    pc = list(col)
    if ticks is not None:
        t1 = clock(); ticks[3] += t1 - t0; t0 = t1
    carry = 0
    out = []
    for v in pc:
        v += carry
        carry = v >> k
        out.append(v & mask)
    if ticks is not None:
        ticks[4] += clock() - t0
    return out


def mul_words(a, b, out, k, w):
    out[:] = _mul_words_list(_to_list(a), _to_list(b), k, w)


def mul_words_timed(a, b, out, k, w, ticks):
    acc = [0] * 5
    out[:] = _mul_words_list(_to_list(a), _to_list(b), k, w, acc)
    ticks += np.asarray(acc, dtype=np.uint64)


def mul_words_batch(A, B, P, k, w):
    for i in range(A.shape[0]):
        mul_words(A[i], B[i], P[i], k, w)


def mul_words_batch_timed(A, B, P, k, w, ticks):
    for i in range(A.shape[0]):
        mul_words_timed(A[i], B[i], P[i], k, w, ticks)


_G5A = (0, 0, 1, 0, 1, 2, 0, 1, 2, 3, 0, 1, 2, 3, 4, 1, 2, 3, 4, 2, 3, 4, 3, 4, 4)
_G5B = (0, 1, 0, 2, 1, 0, 3, 2, 1, 0, 4, 3, 2, 1, 0, 4, 3, 2, 1, 4, 3, 2, 4, 3, 4)
_G5C = (0, 1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4, 4, 4, 5, 5, 5, 5, 6, 6, 6, 7, 7, 8)


def _mul_5x5_list(a, b):
    col = [0] * 10
    for t in range(25):
        p = a[_G5A[t]] * b[_G5B[t]]
        col[_G5C[t]] += p & MASK52
        col[_G5C[t] + 1] += p >> 52
    out = []
    carry = 0
    for v in col:
        v += carry
        carry = v >> 52
        out.append(v & MASK52)
    return out


def mul_5x5(a, b, out):
    out[:] = _mul_5x5_list(_to_list(a), _to_list(b))


def _pack_list(a):
    out = []
    acc = 0
    nb = 0
    for x in a:
        acc |= x << nb
        nb += 64
        while nb >= 52:
            out.append(acc & MASK52)
            acc >>= 52
            nb -= 52
    if nb > 0:
        out.append(acc & MASK52)
    return out


def _unpack_list(a, nout):
    out = []
    acc = 0
    nb = 0
    lost = False
    for x in a:
        acc |= x << nb
        nb += 52
        if nb >= 64:
            if len(out) < nout:
                out.append(acc & MAX64)
            elif acc & MAX64:
                lost = True
            acc >>= 64
            nb -= 64
    if nb > 0:
        if len(out) < nout:
            out.append(acc & MAX64)
        elif acc & MAX64:
            lost = True
    out.extend([0] * (nout - len(out)))
    return out, lost


def _mul_4x4_list(a, b):
    p = _mul_5x5_list(_pack_list(a), _pack_list(b))
    out, _ = _unpack_list(p, 8)
    return out


def mul_4x4(a, b, out):
    out[:] = _mul_4x4_list(_to_list(a), _to_list(b))


def mul_5x5_batch(A, B, P):
    for i in range(A.shape[0]):
        mul_5x5(A[i], B[i], P[i])


def mul_4x4_batch(A, B, P):
    for i in range(A.shape[0]):
        mul_4x4(A[i], B[i], P[i])


def _cmp(x, y):
    for i in range(len(x) - 1, -1, -1):
        if x[i] != y[i]:
            return 1 if x[i] > y[i] else -1
    return 0


def _karatsuba_list(a, b, theta, w):
    m = len(a)
    if m <= theta:
        if m == 4:
            return _mul_4x4_list(a, b)
        return _mul_words_list(a, b, 64, w)
    h = m // 2
    p0 = _karatsuba_list(a[:h], b[:h], theta, w)
    p1 = _karatsuba_list(a[h:], b[h:], theta, w)
    sx = _cmp(a[h:], a[:h])
    sy = _cmp(b[h:], b[:h])
    if sx >= 0:
        da = _words_list(1, a[h:], a[:h], w)[0]
    else:
        da = _words_list(1, a[:h], a[h:], w)[0]
    if sy >= 0:
        db = _words_list(1, b[h:], b[:h], w)[0]
    else:
        db = _words_list(1, b[:h], b[h:], w)[0]
    pd = _karatsuba_list(da, db, theta, w) + [0]
    mid, c, _ = _words_list(0, p0, p1, w)
    mid.append(c)
    if sx * sy > 0:
        mid = _words_list(1, mid, pd, w)[0]
    elif sx * sy < 0:
        mid = _words_list(0, mid, pd, w)[0]
    r = p0 + p1
    mid += [0] * (3 * h - len(mid))
    r[h:], _, _ = _words_list(0, r[h:], mid, w)
    return r


def karatsuba(a, b, out, theta, w):
    out[:] = _karatsuba_list(_to_list(a), _to_list(b), theta, w)


def karatsuba_batch(A, B, P, theta, w):
    for i in range(A.shape[0]):
        karatsuba(A[i], B[i], P[i], theta, w)


# ----------------------------------------------------------- radix change

def pack_64_52(a, out):
    r = _pack_list(_to_list(a))
    out[:len(r)] = r
    return len(r)


def unpack_52_64(a, out):
    r, lost = _unpack_list(_to_list(a), len(out))
    out[:] = r
    return lost


# ----------------------------------------------------------------- oracle

def _oracle_add_list(a, b):
    r = []
    cin = 0
    for x, y in zip(a, b):
        s = (x + cin) & MAX64
        cout = int(s < cin)
        s = (s + y) & MAX64
        cout += int(s < y)
        r.append(s)
        cin = cout
    return r, cin


def _oracle_sub_list(a, b):
    r = []
    bin_ = 0
    for x, y in zip(a, b):
        d = (x - bin_) & MAX64
        bout = int(x < bin_)
        e = (d - y) & MAX64
        bout += int(d < y)
        r.append(e)
        bin_ = bout
    return r, bin_


def _oracle_mul_list(a, b):
    r = [0] * (len(a) + len(b))
    for i, x in enumerate(a):
        carry = 0
        for j, y in enumerate(b):
            t = x * y + r[i + j] + carry
            r[i + j] = t & MAX64
            carry = t >> 64
        r[i + len(b)] = carry
    return r


def oracle_add(a, b, out):
    r, c = _oracle_add_list(_to_list(a), _to_list(b))
    out[:] = r
    return c


def oracle_sub(a, b, out):
    r, c = _oracle_sub_list(_to_list(a), _to_list(b))
    out[:] = r
    return c


def oracle_mul(a, b, out):
    out[:] = _oracle_mul_list(_to_list(a), _to_list(b))


def oracle_add_batch(A, B, S, carry):
    for i in range(A.shape[0]):
        carry[i] = oracle_add(A[i], B[i], S[i])


def oracle_sub_batch(A, B, S, borrow):
    for i in range(A.shape[0]):
        borrow[i] = oracle_sub(A[i], B[i], S[i])


def oracle_mul_batch(A, B, P):
    for i in range(A.shape[0]):
        oracle_mul(A[i], B[i], P[i])


# ----------------------------------------------------------------- timing

ABLATION_KINDS = tuple(f"{op}_p{p}" for op in ("add", "sub") for p in (1, 2, 3))


def time_batch(kind, A, B, width=8, theta=4, k=64):
    n, m = A.shape
    rows_a = [_to_list(r) for r in A]
    rows_b = [_to_list(r) for r in B]
    if kind in ("add", "sub"):
        _check_width(width)
        sub = kind == "sub"
        fn = lambda x, y: _words_list(sub, x, y, width)  # noqa: E731
    elif kind in ABLATION_KINDS:
        _check_width(width)
        sub = kind.startswith("sub")
        stop = int(kind[-1])
        fn = lambda x, y: _words_list(sub, x, y, width, None, stop)  # noqa: E731
    elif kind == "oracle_add":
        fn = _oracle_add_list
    elif kind == "oracle_sub":
        fn = _oracle_sub_list
    elif kind == "mul_words":
        fn = lambda x, y: _mul_words_list(x, y, k, width)  # noqa: E731
    elif kind == "mul_4x4":
        fn = _mul_4x4_list
    elif kind == "mul_5x5":
        fn = _mul_5x5_list
    elif kind == "karatsuba":
        fn = lambda x, y: _karatsuba_list(x, y, theta, width)  # noqa: E731
    elif kind == "oracle_mul":
        fn = _oracle_mul_list
    else:
        raise ValueError(f"unknown kernel kind {kind!r}")
    if n == 0 or m == 0:
        return 0
    t0 = time.perf_counter_ns()
    for x, y in zip(rows_a, rows_b):
        fn(x, y)
    return time.perf_counter_ns() - t0


# ---------------------------------------------------------------- MT19937-64

_NN = 312
_MM = 156
_MATRIX_A = np.uint64(0xB5026F5AA96619E9)
_UM = np.uint64(0xFFFFFFFF80000000)
_LM = np.uint64(0x7FFFFFFF)


class MT64:
    """MT19937-64 stream; the twist runs as three vectorized numpy slices."""

    def __init__(self, seed):
        mt = [seed & MAX64]
        for i in range(1, _NN):
            prev = mt[-1]
            mt.append((6364136223846793005 * (prev ^ (prev >> 62)) + i) & MAX64)
        self._mt = np.array(mt, dtype=np.uint64)
        self._out = np.empty(0, dtype=np.uint64)
        self._pos = 0

    def _twist(self):
        mt = self._mt
        one = np.uint64(1)

        def step(lo, hi, nxt, far):
            y = (mt[lo:hi] & _UM) | (nxt & _LM)
            mag = np.where((y & one) == one, _MATRIX_A, np.uint64(0))
            mt[lo:hi] = far ^ (y >> one) ^ mag

        step(0, _NN - _MM, mt[1:_NN - _MM + 1], mt[_MM:_NN])
        step(_NN - _MM, _NN - 1, mt[_NN - _MM + 1:_NN], mt[0:_MM - 1])
        step(_NN - 1, _NN, mt[0:1], mt[_MM - 1:_MM])

    def _block(self):
        self._twist()
        x = self._mt.copy()
        x ^= (x >> np.uint64(29)) & np.uint64(0x5555555555555555)
        x ^= (x << np.uint64(17)) & np.uint64(0x71D67FFFEDA60000)
        x ^= (x << np.uint64(37)) & np.uint64(0xFFF7EEE000000000)
        x ^= x >> np.uint64(43)
        self._out = x
        self._pos = 0

    def next(self):
        if self._pos >= len(self._out):
            self._block()
        v = int(self._out[self._pos])
        self._pos += 1
        return v

    def fill(self, out):
        n = len(out)
        done = 0
        while done < n:
            if self._pos >= len(self._out):
                self._block()
            take = min(n - done, len(self._out) - self._pos)
            out[done:done + take] = self._out[self._pos:self._pos + take]
            self._pos += take
            done += take
