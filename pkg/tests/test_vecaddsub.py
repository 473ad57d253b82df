import numpy as np
import pytest
from conftest import MAX64, arr, limb_lists, same_length_pair, value
from hypothesis import given
from hypothesis import strategies as st

from lanearith import vecaddsub as va
from lanearith.limbcore import ContractError
from lanearith.oracle import oracle_add, oracle_sub

WIDTHS = (2, 4, 8, "scalar")


def chunk_pair():
    return st.integers(1, 8).flatmap(
        lambda n: st.tuples(limb_lists(n, n), limb_lists(n, n), st.integers(0, 1))
    )


def test_chunk_examples():
    r = va.add_w_limbs([MAX64, 5], [1, 0])
    assert r.sums.tolist() == [0, 6] and r.carry_out == 0 and not r.phase4_fired
    # carry from lane 0 lands on an all-ones lane: the slow path has to run
    r = va.add_w_limbs([MAX64, MAX64], [1, 0])
    assert r.sums.tolist() == [0, 0] and r.carry_out == 1 and r.phase4_fired
    r = va.add_w_limbs([MAX64] * 4, [0] * 4, c_in=1)
    assert r.sums.tolist() == [0] * 4 and r.carry_out == 1 and r.phase4_fired
    r = va.sub_w_limbs([0, 0], [1, 0])
    assert r.sums.tolist() == [MAX64, MAX64] and r.carry_out == 1 and r.phase4_fired
    r = va.sub_w_limbs([5, 7], [3, 7])
    assert r.sums.tolist() == [2, 0] and r.carry_out == 0 and not r.phase4_fired


@pytest.mark.parametrize("emulate", [False, True])
@given(chunk_pair())
def test_chunk_matches_integers(emulate, case):
    a, b, cin = case
    w = len(a)
    r = va.add_w_limbs(a, b, cin, emulate=emulate)
    total = value(a) + value(b) + cin
    assert value(r.sums) + (r.carry_out << (64 * w)) == total
    r = va.sub_w_limbs(a, b, cin, emulate=emulate)
    diff = value(a) - value(b) - cin
    assert value(r.sums) - (r.carry_out << (64 * w)) == diff


@pytest.mark.parametrize("emulate", [False, True])
@given(chunk_pair())
def test_phase4_fires_exactly_on_cascades(emulate, case):
    # the slow path runs iff some lane whose raw sum is all ones receives a carry
    a, b, cin = case
    sums = [(x + y) & MAX64 for x, y in zip(a, b)]
    carries = [cin] + [int(x + y > MAX64) for x, y in zip(a, b)][:-1]
    expect = any(s == MAX64 and c for s, c in zip(sums, carries))
    assert va.add_w_limbs(a, b, cin, emulate=emulate).phase4_fired == expect

    diffs = [(x - y) & MAX64 for x, y in zip(a, b)]
    borrows = [cin] + [int(x < y) for x, y in zip(a, b)][:-1]
    expect = any(d == 0 and c for d, c in zip(diffs, borrows))
    assert va.sub_w_limbs(a, b, cin, emulate=emulate).phase4_fired == expect


def test_chunk_contract():
    with pytest.raises(ContractError):
        va.add_w_limbs([1] * 9, [1] * 9)
    with pytest.raises(ContractError):
        va.add_w_limbs([1, 2], [1])
    with pytest.raises(ContractError):
        va.add_w_limbs([1, 2], [1, 2], w=4)
    with pytest.raises(ContractError):
        va.add_w_limbs([1], [1], c_in=2)
    with pytest.raises(ContractError):
        va.sub_w_limbs([], [])


@pytest.mark.parametrize("w", WIDTHS)
@given(same_length_pair(1, 40))
def test_words_match_oracle(w, pair):
    a, b = map(arr, pair)
    s, c = va.dot_add_words(a, b, w)
    e, f = oracle_add(a, b)
    assert s.tolist() == e.tolist() and c == f
    s, c = va.dot_sub_words(a, b, w)
    e, f = oracle_sub(a, b)
    assert s.tolist() == e.tolist() and c == f


@given(same_length_pair(1, 40))
def test_width_invariance(pair):
    a, b = map(arr, pair)
    ref = va.dot_add_words(a, b, 8)
    for w in (2, 4, "scalar"):
        s, c = va.dot_add_words(a, b, w)
        assert s.tolist() == ref[0].tolist() and c == ref[1]


@given(same_length_pair(1, 40))
def test_add_commutes(pair):
    a, b = map(arr, pair)
    s1, c1 = va.dot_add_words(a, b)
    s2, c2 = va.dot_add_words(b, a)
    assert s1.tolist() == s2.tolist() and c1 == c2


@given(same_length_pair(1, 40))
def test_add_sub_round_trip(pair):
    a, b = map(arr, pair)
    s, c = va.dot_add_words(a, b)
    d, borrow = va.dot_sub_words(s, b)
    # the carry limb and the borrow cancel
    assert d.tolist() == a.tolist() and borrow == c
    d, borrow = va.dot_sub_words(a, b)
    back, carry = va.dot_add_words(d, b)
    assert back.tolist() == a.tolist() and carry == borrow


@given(limb_lists(0, 20), limb_lists(0, 20))
def test_add_sub_uneven(xs, ys):
    a, b = arr(xs), arr(ys)
    m = max(len(xs), len(ys))
    s, c = va.add(a, b)
    assert len(s) == m and value(s) + (c << (64 * m)) == value(a) + value(b)
    d, borrow = va.sub(a, b)
    assert value(d) - (borrow << (64 * m)) == value(a) - value(b)


def test_empty_words():
    s, c = va.dot_add_words(arr([]), arr([]))
    assert s.size == 0 and c == 0


def test_in_place_aliasing():
    a = arr([MAX64, MAX64, 3, 0, 9])
    b = arr([1, 0, MAX64, 7, 0])
    expect, ec = oracle_add(a, b)
    out, c = va.dot_add_words(a, b, out=a)
    assert out is a and a.tolist() == expect.tolist() and c == ec
    a = arr([0, 0, 3])
    expect, ec = oracle_sub(a, a)
    out, c = va.dot_sub_words(a, a, out=a)
    assert out.tolist() == [0, 0, 0] and c == 0


def test_words_contract():
    with pytest.raises(ContractError):
        va.dot_add_words(arr([1, 2]), arr([1]))
    with pytest.raises(ContractError):
        va.dot_add_words(arr([1]), arr([1]), w=3)
    with pytest.raises(ContractError):
        va.dot_add_words(arr([1]), arr([1]), w=True)
    with pytest.raises(ContractError):
        va.dot_add_words(arr([1]), arr([1]), out=np.zeros(2, dtype=np.uint64))
    with pytest.raises(ContractError):
        va.dot_add_words(arr([1]), arr([1]), out=np.zeros(1, dtype=np.int64))


def test_width_codes():
    assert [va.width_code(w) for w in WIDTHS] == [2, 4, 8, 0]
    assert [va.chunk_size(w) for w in WIDTHS] == [2, 4, 8, 8]


def test_stats_counters():
    m = 16
    a = arr([MAX64] * m)
    b = arr([1] + [0] * (m - 1))
    s, c, st_ = va.dot_add_words_stats(a, b, 4)
    assert s.tolist() == [0] * m and c == 1
    assert st_.operations == 1 and st_.chunks_processed == 4
    assert st_.phase4_triggers >= 1 and st_.phase4_operations == 1
    assert set(st_.ticks) == set(va.PHASES)
    pct = st_.phase_percentages()
    assert sum(pct.values()) == pytest.approx(100.0) or sum(pct.values()) == 0


def test_stats_ratio_definition():
    st_ = va.AddSubStats(ticks={"load_add": 10, "carry_gen": 5, "carry_add": 3, "overflow": 2})
    assert st_.carry_to_add_ratio == 1.0
    assert np.isnan(va.AddSubStats().carry_to_add_ratio)


@pytest.mark.parametrize("w", WIDTHS)
def test_batches(w, rng):
    A = rng.integers(0, 1 << 64, (50, 12), dtype=np.uint64, endpoint=False)
    B = rng.integers(0, 1 << 64, (50, 12), dtype=np.uint64, endpoint=False)
    A[0] = MAX64
    B[0] = 0
    B[0, 0] = 1
    S, carry, fired = va.add_batch(A, B, w)
    for i in range(50):
        e, f = oracle_add(A[i], B[i])
        assert S[i].tolist() == e.tolist() and carry[i] == f
    assert fired[0] > 0
    D, borrow, _ = va.sub_batch(A, B, w)
    for i in range(50):
        e, f = oracle_sub(A[i], B[i])
        assert D[i].tolist() == e.tolist() and borrow[i] == f
    S2, c2, f2, stats = va.add_batch_stats(A, B, w)
    assert np.array_equal(S, S2) and np.array_equal(carry, c2)
    assert stats.operations == 50 and stats.phase4_operations == int(np.count_nonzero(f2))


def test_batch_contract():
    with pytest.raises(ContractError):
        va.add_batch(np.zeros((2, 3), np.uint64), np.zeros((2, 4), np.uint64))
