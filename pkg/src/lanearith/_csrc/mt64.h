/* 64-bit Mersenne Twister (MT19937-64), Matsumoto & Nishimura reference constants. */
#ifndef LANEARITH_MT64_H
#define LANEARITH_MT64_H

#include <stddef.h>
#include <stdint.h>

#define MT64_NN 312
#define MT64_MM 156
#define MT64_MATRIX_A 0xB5026F5AA96619E9ULL
#define MT64_UM 0xFFFFFFFF80000000ULL
#define MT64_LM 0x7FFFFFFFULL

typedef struct {
    uint64_t mt[MT64_NN];
    int mti;
} mt64_state;

static void mt64_seed(mt64_state *st, uint64_t seed)
{
    st->mt[0] = seed;
    for (int i = 1; i < MT64_NN; i++)
        st->mt[i] = 6364136223846793005ULL * (st->mt[i - 1] ^ (st->mt[i - 1] >> 62)) + (uint64_t)i;
    st->mti = MT64_NN;
}

static void mt64_twist(mt64_state *st)
{
    static const uint64_t mag01[2] = {0ULL, MT64_MATRIX_A};
    uint64_t *mt = st->mt, x;
    int i;
    for (i = 0; i < MT64_NN - MT64_MM; i++) {
        x = (mt[i] & MT64_UM) | (mt[i + 1] & MT64_LM);
        mt[i] = mt[i + MT64_MM] ^ (x >> 1) ^ mag01[(int)(x & 1ULL)];
    }
    for (; i < MT64_NN - 1; i++) {
        x = (mt[i] & MT64_UM) | (mt[i + 1] & MT64_LM);
        mt[i] = mt[i + (MT64_MM - MT64_NN)] ^ (x >> 1) ^ mag01[(int)(x & 1ULL)];
    }
    x = (mt[MT64_NN - 1] & MT64_UM) | (mt[0] & MT64_LM);
    mt[MT64_NN - 1] = mt[MT64_MM - 1] ^ (x >> 1) ^ mag01[(int)(x & 1ULL)];
    st->mti = 0;
}

static inline uint64_t mt64_next(mt64_state *st)
{
    uint64_t x;
    if (st->mti >= MT64_NN)
        mt64_twist(st);
    x = st->mt[st->mti++];
    x ^= (x >> 29) & 0x5555555555555555ULL;
    x ^= (x << 17) & 0x71D67FFFEDA60000ULL;
    x ^= (x << 37) & 0xFFF7EEE000000000ULL;
    x ^= (x >> 43);
    return x;
}

static void mt64_fill(mt64_state *st, uint64_t *out, size_t n)
{
    for (size_t i = 0; i < n; i++)
        out[i] = mt64_next(st);
}

#endif /* LANEARITH_MT64_H */
