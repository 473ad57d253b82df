/*
 * Limb-serial reference arithmetic. Deliberately naive: one limb per step,
 * no masks, no lane tricks.
 */
#ifndef LANEARITH_ORACLE_H
#define LANEARITH_ORACLE_H

#include <stddef.h>
#include <stdint.h>

static uint64_t or_add_m(const uint64_t *a, const uint64_t *b, uint64_t *r, size_t m)
{
    uint64_t cin = 0, cout = 0;
    for (size_t i = 0; i < m; i++) {
        uint64_t x = a[i] + cin;
        cout = x < cin;
        x = x + b[i];
        cout += x < b[i];
        r[i] = x;
        cin = cout;
    }
    return cin;
}

static uint64_t or_sub_m(const uint64_t *a, const uint64_t *b, uint64_t *r, size_t m)
{
    uint64_t bin = 0, bout = 0;
    for (size_t i = 0; i < m; i++) {
        uint64_t x = a[i] - bin;
        bout = a[i] < bin;
        uint64_t y = x - b[i];
        bout += x < b[i];
        r[i] = y;
        bin = bout;
    }
    return bin;
}

/* r receives la + lb limbs */
static void or_mul_school(const uint64_t *a, size_t la, const uint64_t *b, size_t lb, uint64_t *r)
{
    for (size_t i = 0; i < la + lb; i++)
        r[i] = 0;
    for (size_t i = 0; i < la; i++) {
        uint64_t carry = 0;
        for (size_t j = 0; j < lb; j++) {
            unsigned __int128 t = (unsigned __int128)a[i] * b[j] + r[i + j] + carry;
            r[i + j] = (uint64_t)t;
            carry = (uint64_t)(t >> 64);
        }
        r[i + lb] = carry;
    }
}

#endif /* LANEARITH_ORACLE_H */
