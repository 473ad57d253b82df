/*
 * Lane-parallel add/sub and column-wise multiplication kernels.
 *
 * Every kernel has a portable C body. On x86-64 with AVX-512F/VL/IFMA the
 * width kernels (w = 2, 4, 8) and the 52-bit partial-product pass switch to
 * mask-register intrinsics, chosen at run time.
 */
#ifndef LANEARITH_KERNELS_H
#define LANEARITH_KERNELS_H

#include <stddef.h>
#include <stdint.h>
#include <string.h>

typedef uint64_t limb_t;
typedef unsigned __int128 la_u128;

#define LA_MAX64 0xFFFFFFFFFFFFFFFFULL
#define LA_MASK52 ((1ULL << 52) - 1ULL)

/* ------------------------------------------------------------------ timer */

#if defined(__x86_64__) || defined(__i386__)
#include <x86intrin.h>
#define LA_TIMER_NAME "rdtscp"
static inline uint64_t la_ticks(void)
{
    unsigned int aux;
    return __rdtscp(&aux);
}
#else
#include <time.h>
#define LA_TIMER_NAME "monotonic_ns"
static inline uint64_t la_ticks(void)
{
    struct timespec ts;
    clock_gettime(CLOCK_MONOTONIC, &ts);
    return (uint64_t)ts.tv_sec * 1000000000ULL + (uint64_t)ts.tv_nsec;
}
#endif

static inline const char *la_timer_name(void) { return LA_TIMER_NAME; }

/* cheapest observed back-to-back read, subtracted per recorded interval */
static uint64_t la_timer_overhead(int rounds)
{
    uint64_t best = (uint64_t)-1;
    for (int i = 0; i < rounds; i++) {
        uint64_t t0 = la_ticks();
        uint64_t t1 = la_ticks();
        if (t1 - t0 < best)
            best = t1 - t0;
    }
    return best;
}

#define LA_TICK(slot)                        \
    if (timed > 0) {                         \
        uint64_t t1_ = la_ticks();           \
        ticks[(slot)] += t1_ - t0;           \
        t0 = t1_;                            \
    }

/* ------------------------------------------------------- SIMD detection */

#if defined(__x86_64__) && defined(__GNUC__)
#define LA_X86_SIMD 1
#include <immintrin.h>
#define LA_TARGET __attribute__((target("avx512f,avx512vl,avx512bw,avx512dq,avx512ifma")))
#else
#define LA_X86_SIMD 0
#endif

static int la_simd_state = -1; /* -1 unprobed, 0 off, 1 on */

static inline int la_cpu_has_simd(void)
{
#if LA_X86_SIMD
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx512f") && __builtin_cpu_supports("avx512vl")
        && __builtin_cpu_supports("avx512bw") && __builtin_cpu_supports("avx512dq")
        && __builtin_cpu_supports("avx512ifma");
#else
    return 0;
#endif
}

static inline int la_simd_active(void)
{
    if (la_simd_state < 0)
        la_simd_state = la_cpu_has_simd();
    return la_simd_state;
}

/* returns the resulting state; requesting SIMD on a CPU without it leaves it off */
static inline int la_set_simd(int on)
{
    la_simd_state = on ? la_cpu_has_simd() : 0;
    return la_simd_state;
}

/* ---------------------------------------- portable packed-mask add / sub */

/*
 * Timing slots: 0 load, 1 add, 2 carry generation, 3 carry add,
 * 4 store & check, 5 overflow handling.
 */

static inline unsigned la_add_chunk_mask(const limb_t *a, const limb_t *b, limb_t *s, int t,
                                         unsigned cin, int *fired, const int timed,
                                         uint64_t *ticks)
{
    limb_t va[8], vb[8], r[8], rp[8];
    unsigned c = 0, c2 = 0, m = 0, cout;
    uint64_t t0 = 0;
    int i;

    if (timed > 0)
        t0 = la_ticks();
    for (i = 0; i < t; i++) {
        va[i] = a[i];
        vb[i] = b[i];
    }
    LA_TICK(0)
    for (i = 0; i < t; i++)
        r[i] = va[i] + vb[i];
    LA_TICK(1)
    if (timed == -1) {
        for (i = 0; i < t; i++)
            s[i] = r[i];
        *fired = 0;
        return 0;
    }
    for (i = 0; i < t; i++)
        c |= (unsigned)(r[i] < va[i]) << i;
    cout = (c >> (t - 1)) & 1u;
    c = (c << 1) | cin;
    LA_TICK(2)
    if (timed == -2) {
        for (i = 0; i < t; i++)
            s[i] = r[i];
        *fired = (int)c;
        return cout;
    }
    for (i = 0; i < t; i++)
        rp[i] = r[i] + ((c >> i) & 1u);
    LA_TICK(3)
    for (i = 0; i < t; i++)
        c2 |= (unsigned)(rp[i] < r[i]) << i;
    if (timed == -3) {
        for (i = 0; i < t; i++)
            s[i] = rp[i];
        *fired = c2 != 0;
        return cout;
    }
    if (c2 == 0) {
        for (i = 0; i < t; i++)
            s[i] = rp[i];
        *fired = 0;
        LA_TICK(4)
        return cout;
    }
    LA_TICK(4)
    *fired = 1;
    c2 <<= 1;
    for (i = 0; i < t; i++)
        m |= (unsigned)(rp[i] == LA_MAX64) << i;
    c2 = c2 + m;
    cout |= (c2 >> t) & 1u;
    m = c2 ^ m;
    for (i = 0; i < t; i++) {
        rp[i] += (m >> i) & 1u;
        s[i] = rp[i];
    }
    LA_TICK(5)
    return cout;
}

static inline unsigned la_sub_chunk_mask(const limb_t *a, const limb_t *b, limb_t *s, int t,
                                         unsigned bin, int *fired, const int timed,
                                         uint64_t *ticks)
{
    limb_t va[8], vb[8], r[8], rp[8];
    unsigned c = 0, c2 = 0, m = 0, bout;
    uint64_t t0 = 0;
    int i;

    if (timed > 0)
        t0 = la_ticks();
    for (i = 0; i < t; i++) {
        va[i] = a[i];
        vb[i] = b[i];
    }
    LA_TICK(0)
    for (i = 0; i < t; i++)
        r[i] = va[i] - vb[i];
    LA_TICK(1)
    if (timed == -1) {
        for (i = 0; i < t; i++)
            s[i] = r[i];
        *fired = 0;
        return 0;
    }
    for (i = 0; i < t; i++)
        c |= (unsigned)(va[i] < vb[i]) << i;
    bout = (c >> (t - 1)) & 1u;
    c = (c << 1) | bin;
    LA_TICK(2)
    if (timed == -2) {
        for (i = 0; i < t; i++)
            s[i] = r[i];
        *fired = (int)c;
        return bout;
    }
    for (i = 0; i < t; i++)
        rp[i] = r[i] - ((c >> i) & 1u);
    LA_TICK(3)
    for (i = 0; i < t; i++)
        c2 |= (unsigned)(rp[i] > r[i]) << i;
    if (timed == -3) {
        for (i = 0; i < t; i++)
            s[i] = rp[i];
        *fired = c2 != 0;
        return bout;
    }
    if (c2 == 0) {
        for (i = 0; i < t; i++)
            s[i] = rp[i];
        *fired = 0;
        LA_TICK(4)
        return bout;
    }
    LA_TICK(4)
    *fired = 1;
    c2 <<= 1;
    for (i = 0; i < t; i++)
        m |= (unsigned)(rp[i] == 0) << i;
    c2 = c2 + m;
    bout |= (c2 >> t) & 1u;
    m = c2 ^ m;
    for (i = 0; i < t; i++) {
        rp[i] -= (m >> i) & 1u;
        s[i] = rp[i];
    }
    LA_TICK(5)
    return bout;
}

/* --------------------------------------------- scalar lane emulation */

/*
 * Same four phases, but every mask is an array of per-lane flags and the
 * overflow-phase mask addition is rippled bit by bit over t+1 positions.
 */
static inline unsigned la_addsub_chunk_lanes(const limb_t *a, const limb_t *b, limb_t *s, int t,
                                             unsigned cin, int *fired, const int sub,
                                             const int timed, uint64_t *ticks)
{
    limb_t va[8], vb[8], r[8], rp[8];
    unsigned char gen[8] = {0}, cy[8], sec[9], prop[9], adj[9];
    unsigned cout, any = 0, k = 0;
    uint64_t t0 = 0;
    int i;

    if (timed > 0)
        t0 = la_ticks();
    for (i = 0; i < t; i++) {
        va[i] = a[i];
        vb[i] = b[i];
    }
    LA_TICK(0)
    for (i = 0; i < t; i++)
        r[i] = sub ? va[i] - vb[i] : va[i] + vb[i];
    LA_TICK(1)
    if (timed == -1) {
        for (i = 0; i < t; i++)
            s[i] = r[i];
        *fired = 0;
        return 0;
    }
    for (i = 0; i < t; i++)
        gen[i] = sub ? (va[i] < vb[i]) : (r[i] < va[i]);
    cout = gen[t - 1];
    cy[0] = (unsigned char)cin;
    for (i = 1; i < t; i++)
        cy[i] = gen[i - 1];
    LA_TICK(2)
    if (timed == -2) {
        for (i = 0; i < t; i++) {
            s[i] = r[i];
            any |= cy[i];
        }
        *fired = (int)any;
        return cout;
    }
    for (i = 0; i < t; i++)
        rp[i] = sub ? r[i] - cy[i] : r[i] + cy[i];
    LA_TICK(3)
    sec[0] = 0;
    for (i = 0; i < t; i++) {
        sec[i + 1] = sub ? (rp[i] > r[i]) : (rp[i] < r[i]);
        any |= sec[i + 1];
    }
    if (timed == -3) {
        for (i = 0; i < t; i++)
            s[i] = rp[i];
        *fired = any != 0;
        return cout;
    }
    if (!any) {
        for (i = 0; i < t; i++)
            s[i] = rp[i];
        *fired = 0;
        LA_TICK(4)
        return cout;
    }
    LA_TICK(4)
    *fired = 1;
    for (i = 0; i < t; i++)
        prop[i] = sub ? (rp[i] == 0) : (rp[i] == LA_MAX64);
    prop[t] = 0;
    for (i = 0; i <= t; i++) {
        unsigned sum = sec[i] + prop[i] + k;
        k = sum >> 1;
        adj[i] = (unsigned char)((sum & 1u) ^ prop[i]);
    }
    cout |= adj[t];
    for (i = 0; i < t; i++) {
        rp[i] = sub ? rp[i] - adj[i] : rp[i] + adj[i];
        s[i] = rp[i];
    }
    LA_TICK(5)
    return cout;
}

/* ------------------------------------------------ AVX-512 mask kernels */

#if LA_X86_SIMD

#define LA_DEFINE_SIMD_CHUNKS(W, VT, P, SET1)                                              \
    LA_TARGET static inline unsigned la_add_chunk_simd##W(                                 \
        const limb_t *a, const limb_t *b, limb_t *s, int t, unsigned cin, int *fired,      \
        const int timed, uint64_t *ticks)                                                  \
    {                                                                                      \
        const __mmask8 k = (__mmask8)((1u << t) - 1u);                                     \
        const VT ones = SET1(1);                                                           \
        const VT maxv = SET1(-1);                                                          \
        uint64_t t0 = 0;                                                                   \
        unsigned c, c2, m, cout;                                                           \
        VT va, vb, r, rp;                                                                  \
        if (timed > 0)                                                                     \
            t0 = la_ticks();                                                               \
        va = P##_maskz_loadu_epi64(k, a);                                                  \
        vb = P##_maskz_loadu_epi64(k, b);                                                  \
        LA_TICK(0)                                                                         \
        r = P##_add_epi64(va, vb);                                                         \
        LA_TICK(1)                                                                         \
        if (timed == -1) {                                                                 \
            P##_mask_storeu_epi64(s, k, r);                                                \
            *fired = 0;                                                                    \
            return 0;                                                                      \
        }                                                                                  \
        c = (unsigned)P##_mask_cmplt_epu64_mask(k, r, va);                                 \
        cout = (c >> (t - 1)) & 1u;                                                        \
        c = ((c << 1) | cin) & k;                                                          \
        LA_TICK(2)                                                                         \
        if (timed == -2) {                                                                 \
            P##_mask_storeu_epi64(s, k, r);                                                \
            *fired = (int)c;                                                               \
            return cout;                                                                   \
        }                                                                                  \
        rp = P##_mask_add_epi64(r, (__mmask8)c, r, ones);                                  \
        LA_TICK(3)                                                                         \
        c2 = (unsigned)P##_mask_cmplt_epu64_mask(k, rp, r);                                \
        if (timed == -3) {                                                                 \
            P##_mask_storeu_epi64(s, k, rp);                                               \
            *fired = c2 != 0;                                                              \
            return cout;                                                                   \
        }                                                                                  \
        if (c2 == 0) {                                                                     \
            P##_mask_storeu_epi64(s, k, rp);                                               \
            *fired = 0;                                                                    \
            LA_TICK(4)                                                                     \
            return cout;                                                                   \
        }                                                                                  \
        LA_TICK(4)                                                                         \
        *fired = 1;                                                                        \
        c2 <<= 1;                                                                          \
        m = (unsigned)P##_mask_cmpeq_epi64_mask(k, rp, maxv);                              \
        c2 = c2 + m;                                                                       \
        cout |= (c2 >> t) & 1u;                                                            \
        m = (c2 ^ m) & k;                                                                  \
        rp = P##_mask_add_epi64(rp, (__mmask8)m, rp, ones);                                \
        P##_mask_storeu_epi64(s, k, rp);                                                   \
        LA_TICK(5)                                                                         \
        return cout;                                                                       \
    }                                                                                      \
                                                                                           \
    LA_TARGET static inline unsigned la_sub_chunk_simd##W(                                 \
        const limb_t *a, const limb_t *b, limb_t *s, int t, unsigned bin, int *fired,      \
        const int timed, uint64_t *ticks)                                                  \
    {                                                                                      \
        const __mmask8 k = (__mmask8)((1u << t) - 1u);                                     \
        const VT ones = SET1(1);                                                           \
        const VT zero = SET1(0);                                                           \
        uint64_t t0 = 0;                                                                   \
        unsigned c, c2, m, bout;                                                           \
        VT va, vb, r, rp;                                                                  \
        if (timed > 0)                                                                     \
            t0 = la_ticks();                                                               \
        va = P##_maskz_loadu_epi64(k, a);                                                  \
        vb = P##_maskz_loadu_epi64(k, b);                                                  \
        LA_TICK(0)                                                                         \
        r = P##_sub_epi64(va, vb);                                                         \
        LA_TICK(1)                                                                         \
        if (timed == -1) {                                                                 \
            P##_mask_storeu_epi64(s, k, r);                                                \
            *fired = 0;                                                                    \
            return 0;                                                                      \
        }                                                                                  \
        c = (unsigned)P##_mask_cmplt_epu64_mask(k, va, vb);                                \
        bout = (c >> (t - 1)) & 1u;                                                        \
        c = ((c << 1) | bin) & k;                                                          \
        LA_TICK(2)                                                                         \
        if (timed == -2) {                                                                 \
            P##_mask_storeu_epi64(s, k, r);                                                \
            *fired = (int)c;                                                               \
            return bout;                                                                   \
        }                                                                                  \
        rp = P##_mask_sub_epi64(r, (__mmask8)c, r, ones);                                  \
        LA_TICK(3)                                                                         \
        c2 = (unsigned)P##_mask_cmpgt_epu64_mask(k, rp, r);                                \
        if (timed == -3) {                                                                 \
            P##_mask_storeu_epi64(s, k, rp);                                               \
            *fired = c2 != 0;                                                              \
            return bout;                                                                   \
        }                                                                                  \
        if (c2 == 0) {                                                                     \
            P##_mask_storeu_epi64(s, k, rp);                                               \
            *fired = 0;                                                                    \
            LA_TICK(4)                                                                     \
            return bout;                                                                   \
        }                                                                                  \
        LA_TICK(4)                                                                         \
        *fired = 1;                                                                        \
        c2 <<= 1;                                                                          \
        m = (unsigned)P##_mask_cmpeq_epi64_mask(k, rp, zero);                              \
        c2 = c2 + m;                                                                       \
        bout |= (c2 >> t) & 1u;                                                            \
        m = (c2 ^ m) & k;                                                                  \
        rp = P##_mask_sub_epi64(rp, (__mmask8)m, rp, ones);                                \
        P##_mask_storeu_epi64(s, k, rp);                                                   \
        LA_TICK(5)                                                                         \
        return bout;                                                                       \
    }

LA_DEFINE_SIMD_CHUNKS(2, __m128i, _mm, _mm_set1_epi64x)
LA_DEFINE_SIMD_CHUNKS(4, __m256i, _mm256, _mm256_set1_epi64x)
LA_DEFINE_SIMD_CHUNKS(8, __m512i, _mm512, _mm512_set1_epi64)

#define LA_DEFINE_SIMD_WORDS(OP, W, TIMED, SUFFIX)                                         \
    LA_TARGET static unsigned la_##OP##_words_simd##W##SUFFIX(                             \
        const limb_t *a, const limb_t *b, limb_t *s, size_t m, size_t *fired,             \
        uint64_t *ticks)                                                                   \
    {                                                                                      \
        unsigned cy = 0;                                                                   \
        size_t i, nf = 0;                                                                  \
        int f;                                                                             \
        for (i = 0; i + W <= m; i += W) {                                                  \
            cy = la_##OP##_chunk_simd##W(a + i, b + i, s + i, W, cy, &f, TIMED, ticks);    \
            nf += (size_t)f;                                                               \
        }                                                                                  \
        if (i < m) {                                                                       \
            cy = la_##OP##_chunk_simd##W(a + i, b + i, s + i, (int)(m - i), cy, &f, TIMED, \
                                         ticks);                                           \
            nf += (size_t)f;                                                               \
        }                                                                                  \
        *fired = nf;                                                                       \
        return cy;                                                                         \
    }

LA_DEFINE_SIMD_WORDS(add, 2, 0, )
LA_DEFINE_SIMD_WORDS(add, 4, 0, )
LA_DEFINE_SIMD_WORDS(add, 8, 0, )
LA_DEFINE_SIMD_WORDS(sub, 2, 0, )
LA_DEFINE_SIMD_WORDS(sub, 4, 0, )
LA_DEFINE_SIMD_WORDS(sub, 8, 0, )
LA_DEFINE_SIMD_WORDS(add, 2, 1, _timed)
LA_DEFINE_SIMD_WORDS(add, 4, 1, _timed)
LA_DEFINE_SIMD_WORDS(add, 8, 1, _timed)
LA_DEFINE_SIMD_WORDS(sub, 2, 1, _timed)
LA_DEFINE_SIMD_WORDS(sub, 4, 1, _timed)
LA_DEFINE_SIMD_WORDS(sub, 8, 1, _timed)
LA_DEFINE_SIMD_WORDS(add, 2, -1, _ab1)
LA_DEFINE_SIMD_WORDS(add, 4, -1, _ab1)
LA_DEFINE_SIMD_WORDS(add, 8, -1, _ab1)
LA_DEFINE_SIMD_WORDS(sub, 2, -1, _ab1)
LA_DEFINE_SIMD_WORDS(sub, 4, -1, _ab1)
LA_DEFINE_SIMD_WORDS(sub, 8, -1, _ab1)
LA_DEFINE_SIMD_WORDS(add, 2, -2, _ab2)
LA_DEFINE_SIMD_WORDS(add, 4, -2, _ab2)
LA_DEFINE_SIMD_WORDS(add, 8, -2, _ab2)
LA_DEFINE_SIMD_WORDS(sub, 2, -2, _ab2)
LA_DEFINE_SIMD_WORDS(sub, 4, -2, _ab2)
LA_DEFINE_SIMD_WORDS(sub, 8, -2, _ab2)
LA_DEFINE_SIMD_WORDS(add, 2, -3, _ab3)
LA_DEFINE_SIMD_WORDS(add, 4, -3, _ab3)
LA_DEFINE_SIMD_WORDS(add, 8, -3, _ab3)
LA_DEFINE_SIMD_WORDS(sub, 2, -3, _ab3)
LA_DEFINE_SIMD_WORDS(sub, 4, -3, _ab3)
LA_DEFINE_SIMD_WORDS(sub, 8, -3, _ab3)

#endif /* LA_X86_SIMD */

/* ------------------------------------------------ portable word loops */

#define LA_DEFINE_PORTABLE_WORDS(OP, W, TIMED, SUFFIX)                                     \
    static unsigned la_##OP##_words_port##W##SUFFIX(const limb_t *a, const limb_t *b,      \
                                                    limb_t *s, size_t m, size_t *fired,    \
                                                    uint64_t *ticks)                       \
    {                                                                                      \
        unsigned cy = 0;                                                                   \
        size_t i, nf = 0;                                                                  \
        int f;                                                                             \
        for (i = 0; i + W <= m; i += W) {                                                  \
            cy = la_##OP##_chunk_mask(a + i, b + i, s + i, W, cy, &f, TIMED, ticks);       \
            nf += (size_t)f;                                                               \
        }                                                                                  \
        if (i < m) {                                                                       \
            cy = la_##OP##_chunk_mask(a + i, b + i, s + i, (int)(m - i), cy, &f, TIMED,    \
                                      ticks);                                              \
            nf += (size_t)f;                                                               \
        }                                                                                  \
        *fired = nf;                                                                       \
        return cy;                                                                         \
    }

LA_DEFINE_PORTABLE_WORDS(add, 2, 0, )
LA_DEFINE_PORTABLE_WORDS(add, 4, 0, )
LA_DEFINE_PORTABLE_WORDS(add, 8, 0, )
LA_DEFINE_PORTABLE_WORDS(sub, 2, 0, )
LA_DEFINE_PORTABLE_WORDS(sub, 4, 0, )
LA_DEFINE_PORTABLE_WORDS(sub, 8, 0, )
LA_DEFINE_PORTABLE_WORDS(add, 2, 1, _timed)
LA_DEFINE_PORTABLE_WORDS(add, 4, 1, _timed)
LA_DEFINE_PORTABLE_WORDS(add, 8, 1, _timed)
LA_DEFINE_PORTABLE_WORDS(sub, 2, 1, _timed)
LA_DEFINE_PORTABLE_WORDS(sub, 4, 1, _timed)
LA_DEFINE_PORTABLE_WORDS(sub, 8, 1, _timed)
LA_DEFINE_PORTABLE_WORDS(add, 2, -1, _ab1)
LA_DEFINE_PORTABLE_WORDS(add, 4, -1, _ab1)
LA_DEFINE_PORTABLE_WORDS(add, 8, -1, _ab1)
LA_DEFINE_PORTABLE_WORDS(sub, 2, -1, _ab1)
LA_DEFINE_PORTABLE_WORDS(sub, 4, -1, _ab1)
LA_DEFINE_PORTABLE_WORDS(sub, 8, -1, _ab1)
LA_DEFINE_PORTABLE_WORDS(add, 2, -2, _ab2)
LA_DEFINE_PORTABLE_WORDS(add, 4, -2, _ab2)
LA_DEFINE_PORTABLE_WORDS(add, 8, -2, _ab2)
LA_DEFINE_PORTABLE_WORDS(sub, 2, -2, _ab2)
LA_DEFINE_PORTABLE_WORDS(sub, 4, -2, _ab2)
LA_DEFINE_PORTABLE_WORDS(sub, 8, -2, _ab2)
LA_DEFINE_PORTABLE_WORDS(add, 2, -3, _ab3)
LA_DEFINE_PORTABLE_WORDS(add, 4, -3, _ab3)
LA_DEFINE_PORTABLE_WORDS(add, 8, -3, _ab3)
LA_DEFINE_PORTABLE_WORDS(sub, 2, -3, _ab3)
LA_DEFINE_PORTABLE_WORDS(sub, 4, -3, _ab3)
LA_DEFINE_PORTABLE_WORDS(sub, 8, -3, _ab3)

#define LA_DEFINE_LANES_WORDS(OP, ISSUB, TIMED, SUFFIX)                                    \
    static unsigned la_##OP##_words_lanes##SUFFIX(const limb_t *a, const limb_t *b,        \
                                                  limb_t *s, size_t m, size_t *fired,      \
                                                  uint64_t *ticks)                         \
    {                                                                                      \
        unsigned cy = 0;                                                                   \
        size_t i, nf = 0;                                                                  \
        int f;                                                                             \
        for (i = 0; i < m; i += 8) {                                                       \
            int t = (m - i) < 8 ? (int)(m - i) : 8;                                        \
            cy = la_addsub_chunk_lanes(a + i, b + i, s + i, t, cy, &f, ISSUB, TIMED,       \
                                       ticks);                                             \
            nf += (size_t)f;                                                               \
        }                                                                                  \
        *fired = nf;                                                                       \
        return cy;                                                                         \
    }

LA_DEFINE_LANES_WORDS(add, 0, 0, )
LA_DEFINE_LANES_WORDS(sub, 1, 0, )
LA_DEFINE_LANES_WORDS(add, 0, 1, _timed)
LA_DEFINE_LANES_WORDS(sub, 1, 1, _timed)
LA_DEFINE_LANES_WORDS(add, 0, -1, _ab1)
LA_DEFINE_LANES_WORDS(sub, 1, -1, _ab1)
LA_DEFINE_LANES_WORDS(add, 0, -2, _ab2)
LA_DEFINE_LANES_WORDS(sub, 1, -2, _ab2)
LA_DEFINE_LANES_WORDS(add, 0, -3, _ab3)
LA_DEFINE_LANES_WORDS(sub, 1, -3, _ab3)

/* ------------------------------------------------------------ dispatch */

typedef unsigned (*la_words_fn)(const limb_t *, const limb_t *, limb_t *, size_t, size_t *,
                                uint64_t *);

/*
 * mode: 0 production, 1 per-phase interval timing, -1/-2/-3 ablation variants
 * that stop after phase 1, 2 or 3 (for timing only, results are not sums).
 */
#define LA_SEL(base)                                                                       \
    (mode == 1 ? base##_timed                                                              \
     : mode == -1 ? base##_ab1                                                             \
     : mode == -2 ? base##_ab2                                                             \
     : mode == -3 ? base##_ab3                                                             \
     : base)

/* width: 2, 4, 8, or 0 for the scalar lane emulation; NULL for anything else */
static la_words_fn la_pick_words(int sub, int width, int mode)
{
    int simd = la_simd_active();
    (void)simd;
    if (mode < -3 || mode > 1)
        return NULL;
    switch (width) {
    case 0:
        return sub ? LA_SEL(la_sub_words_lanes) : LA_SEL(la_add_words_lanes);
#if LA_X86_SIMD
#define LA_CASE(W)                                                                         \
    case W:                                                                                \
        if (simd)                                                                          \
            return sub ? LA_SEL(la_sub_words_simd##W) : LA_SEL(la_add_words_simd##W);      \
        return sub ? LA_SEL(la_sub_words_port##W) : LA_SEL(la_add_words_port##W);
#else
#define LA_CASE(W)                                                                         \
    case W:                                                                                \
        return sub ? LA_SEL(la_sub_words_port##W) : LA_SEL(la_add_words_port##W);
#endif
        LA_CASE(2)
        LA_CASE(4)
        LA_CASE(8)
#undef LA_CASE
    default:
        return NULL;
    }
}
#undef LA_SEL

static inline unsigned la_add_words(const limb_t *a, const limb_t *b, limb_t *s, size_t m,
                                    int width, size_t *fired)
{
    return la_pick_words(0, width, 0)(a, b, s, m, fired, NULL);
}

static inline unsigned la_sub_words(const limb_t *a, const limb_t *b, limb_t *s, size_t m,
                                    int width, size_t *fired)
{
    return la_pick_words(1, width, 0)(a, b, s, m, fired, NULL);
}

/* single chunk of t lanes; width 0 selects the lane emulation */
static inline unsigned la_chunk(int sub, int width, const limb_t *a, const limb_t *b,
                                limb_t *s, int t, unsigned cin, int *fired)
{
    if (width == 0)
        return la_addsub_chunk_lanes(a, b, s, t, cin, fired, sub, 0, NULL);
#if LA_X86_SIMD
    if (la_simd_active()) {
        if (t <= 2 && width == 2)
            return sub ? la_sub_chunk_simd2(a, b, s, t, cin, fired, 0, NULL)
                       : la_add_chunk_simd2(a, b, s, t, cin, fired, 0, NULL);
        if (t <= 4 && width == 4)
            return sub ? la_sub_chunk_simd4(a, b, s, t, cin, fired, 0, NULL)
                       : la_add_chunk_simd4(a, b, s, t, cin, fired, 0, NULL);
        if (t <= 8 && width == 8)
            return sub ? la_sub_chunk_simd8(a, b, s, t, cin, fired, 0, NULL)
                       : la_add_chunk_simd8(a, b, s, t, cin, fired, 0, NULL);
    }
#endif
    return sub ? la_sub_chunk_mask(a, b, s, t, cin, fired, 0, NULL)
               : la_add_chunk_mask(a, b, s, t, cin, fired, 0, NULL);
}

/* ------------------------------------------------------ multiplication */

/*
 * Mul timing slots: 0 gather, 1 partial products, 2 align hi halves,
 * 3 column reduce, 4 carry pass & store.
 */

static inline size_t la_min3(size_t x, size_t y, size_t z)
{
    size_t r = x < y ? x : y;
    return r < z ? r : z;
}

static void la_gather(const limb_t *a, const limb_t *b, size_t m, limb_t *ma, limb_t *mb)
{
    size_t c, i, idx = 0;
    for (c = 0; c + 1 < 2 * m; c++) {
        size_t lo = c + 1 > m ? c + 1 - m : 0;
        size_t hi = c < m ? c : m - 1;
        for (i = lo; i <= hi; i++) {
            ma[idx] = a[i];
            mb[idx] = b[c - i];
            idx++;
        }
    }
}

static void la_partials_port(const limb_t *ma, const limb_t *mb, limb_t *plo, limb_t *phi,
                             size_t n, int k, int w)
{
    const limb_t mask = k == 64 ? LA_MAX64 : ((1ULL << k) - 1ULL);
    size_t s, t;
    for (s = 0; s < n; s += (size_t)w) {
        size_t e = s + (size_t)w < n ? s + (size_t)w : n;
        for (t = s; t < e; t++) {
            la_u128 p = (la_u128)ma[t] * mb[t];
            plo[t] = (limb_t)p & mask;
            phi[t] = (limb_t)(p >> k);
        }
    }
}

#if LA_X86_SIMD
/* 52-bit limbs only: every product comes from a zero accumulator */
LA_TARGET static void la_partials_ifma(const limb_t *ma, const limb_t *mb, limb_t *plo,
                                       limb_t *phi, size_t n)
{
    const __m512i zero = _mm512_setzero_si512();
    size_t s;
    for (s = 0; s + 8 <= n; s += 8) {
        __m512i va = _mm512_loadu_si512((const void *)(ma + s));
        __m512i vb = _mm512_loadu_si512((const void *)(mb + s));
        _mm512_storeu_si512((void *)(plo + s), _mm512_madd52lo_epu64(zero, va, vb));
        _mm512_storeu_si512((void *)(phi + s), _mm512_madd52hi_epu64(zero, va, vb));
    }
    if (s < n) {
        __mmask8 k = (__mmask8)((1u << (n - s)) - 1u);
        __m512i va = _mm512_maskz_loadu_epi64(k, ma + s);
        __m512i vb = _mm512_maskz_loadu_epi64(k, mb + s);
        _mm512_mask_storeu_epi64(plo + s, k, _mm512_madd52lo_epu64(zero, va, vb));
        _mm512_mask_storeu_epi64(phi + s, k, _mm512_madd52hi_epu64(zero, va, vb));
    }
}
#endif

static void la_align(const limb_t *plo, const limb_t *phi, size_t m, la_u128 *col)
{
    size_t c, p, idx = 0;
    for (c = 0; c < 2 * m; c++)
        col[c] = 0;
    for (c = 0; c + 1 < 2 * m; c++) {
        size_t np = la_min3(c + 1, m, 2 * m - 1 - c);
        for (p = 0; p < np; p++) {
            col[c] += plo[idx + p];
            col[c + 1] += phi[idx + p];
        }
        idx += np;
    }
}

/* returns the carry left after the top column (zero for a full product) */
static limb_t la_carry_pass(const la_u128 *col, size_t ncol, int k, limb_t *out)
{
    const la_u128 mask = k == 64 ? (la_u128)LA_MAX64 : (la_u128)((1ULL << k) - 1ULL);
    la_u128 carry = 0;
    size_t c;
    for (c = 0; c < ncol; c++) {
        la_u128 v = col[c] + carry;
        carry = v >> k;
        out[c] = (limb_t)(v & mask);
    }
    return (limb_t)carry;
}

static inline size_t la_mul_words_scratch(size_t m)
{
    /* ma, mb, plo, phi (m*m each), col (2m u128 = 4m limbs), reduce copy (4m limbs) */
    return 4 * m * m + 8 * m + 8;
}

/* out receives 2m limbs of radix 2^k */
static void la_mul_words_impl(const limb_t *a, const limb_t *b, limb_t *out, size_t m, int k,
                              int w, limb_t *scratch, const int timed, uint64_t *ticks)
{
    size_t n = m * m, c;
    limb_t *ma = scratch, *mb = ma + n, *plo = mb + n, *phi = plo + n;
    la_u128 *col = (la_u128 *)(((uintptr_t)(phi + n) + 15u) & ~(uintptr_t)15u);
    la_u128 *pc = col + 2 * m;
    uint64_t t0 = 0;

    if (timed > 0)
        t0 = la_ticks();
    la_gather(a, b, m, ma, mb);
    LA_TICK(0)
#if LA_X86_SIMD
    if (k == 52 && la_simd_active())
        la_partials_ifma(ma, mb, plo, phi, n);
    else
#endif
        la_partials_port(ma, mb, plo, phi, n, k, w);
    LA_TICK(1)
    la_align(plo, phi, m, col);
    LA_TICK(2)
    for (c = 0; c < 2 * m; c++)
        pc[c] = col[c];
    LA_TICK(3)
    la_carry_pass(pc, 2 * m, k, out);
    LA_TICK(4)
}

/* ---- fixed 5x5, 52-bit limbs: gather pattern is a constant table */

static const unsigned char la_g5a[25] = {0, 0, 1, 0, 1, 2, 0, 1, 2, 3, 0, 1, 2,
                                         3, 4, 1, 2, 3, 4, 2, 3, 4, 3, 4, 4};
static const unsigned char la_g5b[25] = {0, 1, 0, 2, 1, 0, 3, 2, 1, 0, 4, 3, 2,
                                         1, 0, 4, 3, 2, 1, 4, 3, 2, 4, 3, 4};
static const unsigned char la_g5c[25] = {0, 1, 1, 2, 2, 2, 3, 3, 3, 3, 4, 4, 4,
                                         4, 4, 5, 5, 5, 5, 6, 6, 6, 7, 7, 8};

static inline void la_mul5x5_reduce(const limb_t *plo, const limb_t *phi, limb_t *out)
{
    limb_t col[10] = {0};
    limb_t carry = 0;
    int t, c;
    for (t = 0; t < 25; t++) {
        col[la_g5c[t]] += plo[t];
        col[la_g5c[t] + 1] += phi[t];
    }
    for (c = 0; c < 10; c++) {
        limb_t v = col[c] + carry;
        carry = v >> 52;
        out[c] = v & LA_MASK52;
    }
}

static inline void la_mul5x5_port(const limb_t *a, const limb_t *b, limb_t *out)
{
    limb_t plo[25], phi[25];
    int t;
    for (t = 0; t < 25; t++) {
        la_u128 p = (la_u128)a[la_g5a[t]] * b[la_g5b[t]];
        plo[t] = (limb_t)p & LA_MASK52;
        phi[t] = (limb_t)(p >> 52);
    }
    la_mul5x5_reduce(plo, phi, out);
}

#if LA_X86_SIMD
LA_TARGET static inline void la_mul5x5_ifma(const limb_t *a, const limb_t *b, limb_t *out)
{
    limb_t ma[32] = {0}, mb[32] = {0}, plo[32], phi[32];
    const __m512i zero = _mm512_setzero_si512();
    int t;
    for (t = 0; t < 25; t++) {
        ma[t] = a[la_g5a[t]];
        mb[t] = b[la_g5b[t]];
    }
    for (t = 0; t < 32; t += 8) {
        __m512i va = _mm512_loadu_si512((const void *)(ma + t));
        __m512i vb = _mm512_loadu_si512((const void *)(mb + t));
        _mm512_storeu_si512((void *)(plo + t), _mm512_madd52lo_epu64(zero, va, vb));
        _mm512_storeu_si512((void *)(phi + t), _mm512_madd52hi_epu64(zero, va, vb));
    }
    la_mul5x5_reduce(plo, phi, out);
}
#endif

static inline void la_mul5x5(const limb_t *a, const limb_t *b, limb_t *out)
{
#if LA_X86_SIMD
    if (la_simd_active()) {
        la_mul5x5_ifma(a, b, out);
        return;
    }
#endif
    la_mul5x5_port(a, b, out);
}

/* ------------------------------------------------------ radix conversion */

static size_t la_pack_64_52(const limb_t *a, size_t m, limb_t *out)
{
    la_u128 acc = 0;
    int nb = 0;
    size_t i, j = 0;
    for (i = 0; i < m; i++) {
        acc |= (la_u128)a[i] << nb;
        nb += 64;
        while (nb >= 52) {
            out[j++] = (limb_t)acc & LA_MASK52;
            acc >>= 52;
            nb -= 52;
        }
    }
    if (nb > 0)
        out[j++] = (limb_t)acc & LA_MASK52;
    return j;
}

/* writes exactly nout limbs; returns nonzero if set bits did not fit */
static int la_unpack_52_64(const limb_t *a, size_t n, limb_t *out, size_t nout)
{
    la_u128 acc = 0;
    int nb = 0, lost = 0;
    size_t i, j = 0;
    for (i = 0; i < n; i++) {
        acc |= (la_u128)a[i] << nb;
        nb += 52;
        if (nb >= 64) {
            if (j < nout)
                out[j++] = (limb_t)acc;
            else if ((limb_t)acc)
                lost = 1;
            acc >>= 64;
            nb -= 64;
        }
    }
    if (nb > 0) {
        if (j < nout)
            out[j++] = (limb_t)acc;
        else if ((limb_t)acc)
            lost = 1;
    }
    while (j < nout)
        out[j++] = 0;
    return lost;
}

static inline void la_mul4x4(const limb_t *a, const limb_t *b, limb_t *out)
{
    limb_t pa[5], pb[5], p[10];
    la_pack_64_52(a, 4, pa);
    la_pack_64_52(b, 4, pb);
    la_mul5x5(pa, pb, p);
    la_unpack_52_64(p, 10, out, 8);
}

/* ----------------------------------------------------------- Karatsuba */

static inline int la_cmp(const limb_t *a, const limb_t *b, size_t n)
{
    while (n-- > 0) {
        if (a[n] != b[n])
            return a[n] > b[n] ? 1 : -1;
    }
    return 0;
}

static inline size_t la_karatsuba_scratch(size_t m, size_t theta)
{
    size_t th = theta < m ? theta : m;
    return 8 * m + 64 + la_mul_words_scratch(th);
}

/* m is a power of two; r receives 2m limbs */
static void la_karatsuba(const limb_t *a, const limb_t *b, limb_t *r, size_t m, size_t theta,
                         int w, limb_t *scr)
{
    size_t h, fired;
    int sx, sy;
    limb_t *da, *db, *pd, *mid, *next;

    if (m <= theta) {
        if (m == 4)
            la_mul4x4(a, b, r);
        else
            la_mul_words_impl(a, b, r, m, 64, w, scr, 0, NULL);
        return;
    }
    h = m / 2;
    da = scr;
    db = da + h;
    pd = db + h;       /* m + 1 limbs */
    mid = pd + m + 1;  /* 3h limbs */
    next = mid + 3 * h;

    la_karatsuba(a, b, r, h, theta, w, next);
    la_karatsuba(a + h, b + h, r + m, h, theta, w, next);

    sx = la_cmp(a + h, a, h);
    sy = la_cmp(b + h, b, h);
    if (sx >= 0)
        la_sub_words(a + h, a, da, h, w, &fired);
    else
        la_sub_words(a, a + h, da, h, w, &fired);
    if (sy >= 0)
        la_sub_words(b + h, b, db, h, w, &fired);
    else
        la_sub_words(b, b + h, db, h, w, &fired);
    la_karatsuba(da, db, pd, h, theta, w, next);
    pd[m] = 0;

    memset(mid, 0, 3 * h * sizeof(limb_t));
    mid[m] = la_add_words(r, r + m, mid, m, w, &fired);
    if (sx * sy > 0)
        la_sub_words(mid, pd, mid, m + 1, w, &fired);
    else if (sx * sy < 0)
        la_add_words(mid, pd, mid, m + 1, w, &fired);
    la_add_words(r + h, mid, r + h, 3 * h, w, &fired);
}

#endif /* LANEARITH_KERNELS_H */
