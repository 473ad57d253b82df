"""Acceptance suite: one test per criterion, run at full stated scale.

A summary line per criterion is printed at the end of the pytest run.
"""
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from lanearith import _backend, bench
from lanearith.limbcore import pack_64_to_52, unpack_52_to_64
from lanearith.oracle import (
    carry_census,
    census_closed_form,
    oracle_add_batch,
    oracle_mul_batch,
    oracle_sub_batch,
)
from lanearith.testgen import (
    DEFAULT_SIZES,
    PATHOLOGICAL,
    OperandStream,
    RngSpec,
    gen_corpus,
)
from lanearith.vecaddsub import add_batch, sub_batch
from lanearith.vecmul import (
    KaratsubaConfig,
    karatsuba_batch,
    mul_4x4_batch,
    mul_5x5_batch,
    mul_words_batch,
)

SEED = RngSpec(20240611)
WIDTHS = (2, 4, 8, "scalar")
RANDOM_CASES = 100_000
PATHOLOGICAL_CASES = 1_000
BLOCK_BYTES = 8 << 20

ADDSUB = {"add": (add_batch, oracle_add_batch), "sub": (sub_batch, oracle_sub_batch)}


def blocks(spec, bits, category, op, total):
    """Yield operand blocks of the full corpus, a few MiB at a time."""
    stream = OperandStream(spec.derive(op, bits, category), bits, category, op)
    rows = max(1, BLOCK_BYTES // (bits // 8))
    left = total
    while left:
        n = min(rows, left)
        left -= n
        yield stream.take(n)


@pytest.fixture(scope="module")
def addsub_sweep():
    """Every size x op x category of the add/sub corpus against the oracle, all widths."""
    mismatches = {w: 0 for w in WIDTHS}
    fired = {}  # (op, category) -> [operations with a slow-path chunk, operations] at w=8
    cases = 0
    for bits in DEFAULT_SIZES:
        for op, (kernel, ref) in ADDSUB.items():
            for cat in ("random",) + PATHOLOGICAL:
                total = RANDOM_CASES if cat == "random" else PATHOLOGICAL_CASES
                for A, B in blocks(SEED, bits, cat, op, total):
                    E, F = ref(A, B)
                    for w in WIDTHS:
                        S, C, fire = kernel(A, B, w)
                        bad = np.any(S != E, axis=1) | (C != F)
                        mismatches[w] += int(bad.sum())
                        if w == 8:
                            cnt = fired.setdefault((op, cat), [0, 0])
                            cnt[0] += int(np.count_nonzero(fire))
                            cnt[1] += len(A)
                    cases += len(A)
    return {"mismatches": mismatches, "fired": fired, "cases": cases}


@pytest.mark.criterion(1, "add/sub oracle equivalence, 12 sizes x (100k random + 1k per pathological category), w=2,4,8,scalar")
def test_addsub_oracle_equivalence(addsub_sweep, note):
    note(f"{addsub_sweep['cases']} case-ops per width")
    note("mismatches " + ", ".join(f"w={w}: {n}" for w, n in addsub_sweep["mismatches"].items()))
    assert all(n == 0 for n in addsub_sweep["mismatches"].values())


@pytest.mark.criterion(1, "add/sub oracle equivalence, 12 sizes x (100k random + 1k per pathological category), w=2,4,8,scalar")
def test_desk_scale_gate(note):
    # 10k random and every pathological category per size, through the verify path
    t0 = time.perf_counter()
    total = 0
    for op in ("add", "sub"):
        cases = gen_corpus(SEED.derive("desk"), (op,), DEFAULT_SIZES, 10_000, ("random",))
        cases += gen_corpus(SEED.derive("desk"), (op,), DEFAULT_SIZES, PATHOLOGICAL_CASES,
                            PATHOLOGICAL)
        rep = bench.run_verify(cases, ("dot",), 8)
        assert rep.exit_code == 0
        total += len(cases)
    elapsed = time.perf_counter() - t0
    note(f"desk gate {total} cases verified in {elapsed:.1f}s")
    assert elapsed < 120


@pytest.mark.criterion(2, "multiplication oracle equivalence (4x4, 5x5: 100k; mul_words m=1..16, Karatsuba theta=4 to 32768 bits: 10k)")
def test_mul_oracle_equivalence(note):
    bad = {}
    A, B = OperandStream(SEED.derive("mul4x4"), 256).take(100_000)
    bad["4x4"] = int(np.any(mul_4x4_batch(A, B) != oracle_mul_batch(A, B), axis=1).sum())

    # 260-bit operands as five 52-bit limbs, repacked to radix 2^64 for the oracle
    A, B = OperandStream(SEED.derive("mul5x5"), 320).take(100_000)
    A >>= np.uint64(12)
    B >>= np.uint64(12)
    P = np.stack([unpack_52_to_64(p, 10) for p in mul_5x5_batch(A, B)])
    A64 = np.stack([unpack_52_to_64(a, 5) for a in A])
    B64 = np.stack([unpack_52_to_64(b, 5) for b in B])
    bad["5x5"] = int(np.any(P != oracle_mul_batch(A64, B64), axis=1).sum())

    for m in range(1, 17):
        A, B = OperandStream(SEED.derive("mulwords", m), 64 * m).take(10_000)
        bad[f"words m={m}"] = int(np.any(mul_words_batch(A, B) != oracle_mul_batch(A, B),
                                         axis=1).sum())

    cfg = KaratsubaConfig(4)
    for bits in DEFAULT_SIZES:
        n = 0
        for A, B in blocks(SEED, bits, "random", "mul", 10_000):
            n += int(np.any(karatsuba_batch(A, B, cfg) != oracle_mul_batch(A, B), axis=1).sum())
        bad[f"karatsuba {bits}"] = n
    total = sum(bad.values())
    note(f"{len(bad)} groups, {total} mismatches")
    assert total == 0, {k: v for k, v in bad.items() if v}


@pytest.mark.criterion(3, "slow path never on random additions, always on full propagation")
def test_phase4_rarity(addsub_sweep, note):
    fired = addsub_sweep["fired"]
    rnd, n_rnd = fired["add", "random"]
    fp, n_fp = fired["add", "full-propagation"]
    note(f"random: {rnd}/{n_rnd}; full-propagation: {fp}/{n_fp} = {fp / n_fp:.3f}")
    assert rnd == 0
    assert fp == n_fp


@pytest.mark.criterion(4, "carry census k=1..12 exact; 64-bit carry frequency 0.5 +/- 0.001 over 1e7")
def test_carry_lemmas(note):
    for k in range(1, 13):
        assert carry_census(k) == census_closed_form(k), k
    assert carry_census(8) == (256, 32640)
    freq = bench.carry_frequency(10 ** 7, seed=5489)
    note(f"census ok; frequency {freq:.6f}")
    assert abs(freq - 0.5) <= 0.001


@pytest.mark.criterion(5, "width invariance on a 10k-case mixed corpus")
def test_width_invariance(note):
    diffs = 0
    for op, (kernel, _) in ADDSUB.items():
        for bits in DEFAULT_SIZES:
            A, B = OperandStream(SEED.derive("width", op, bits), bits, "mixed", op).take(10_000)
            ref = kernel(A, B, 8)
            for w in (2, 4, "scalar"):
                out = kernel(A, B, w)
                diffs += int(np.any(out[0] != ref[0], axis=1).sum())
                diffs += int(np.count_nonzero(out[1] != ref[1]))
    note(f"{diffs} differing outputs")
    assert diffs == 0


@pytest.mark.criterion(6, "radix 64<->52 round trip on 1e5 values of 1-64 limbs")
def test_radix_round_trip(note):
    rng = np.random.default_rng(6)
    sizes = rng.integers(1, 65, 100_000)
    data = rng.integers(0, 1 << 64, int(sizes.sum()), dtype=np.uint64, endpoint=False)
    bad = 0
    for a in np.split(data, np.cumsum(sizes)[:-1]):
        p = pack_64_to_52(a)
        if not np.array_equal(unpack_52_to_64(p), a):
            bad += 1
        # and the other way round, starting from the 52-bit form
        if not np.array_equal(pack_64_to_52(unpack_52_to_64(p)), p):
            bad += 1
    note(f"{bad} failures")
    assert bad == 0


def _rand(rng, n, m):
    return rng.integers(0, 1 << 64, (n, m), dtype=np.uint64, endpoint=False)


@pytest.mark.criterion(7, "algebraic properties over >= 1e4 instances each")
def test_algebraic_properties(note):
    rng = np.random.default_rng(7)
    fails = {"add commutes": 0, "mul commutes": 0, "add/sub round trip": 0,
             "distributivity": 0, "identity/annihilator": 0}
    count = 0
    for m in (1, 2, 3, 4, 5, 8, 13, 16, 31, 64):
        n = 1_000
        A, B, C = _rand(rng, n, m), _rand(rng, n, m), _rand(rng, n, m)
        A[:50] = np.uint64(2 ** 64 - 1)  # long carry chains
        count += n

        S1, c1, _ = add_batch(A, B)
        S2, c2, _ = add_batch(B, A)
        fails["add commutes"] += int((np.any(S1 != S2, axis=1) | (c1 != c2)).sum())

        P1 = mul_words_batch(A, B)
        P2 = mul_words_batch(B, A)
        K = karatsuba_batch(B, A)
        fails["mul commutes"] += int((np.any(P1 != P2, axis=1) | np.any(P1 != K, axis=1)).sum())

        D, borrow, _ = sub_batch(S1, B)
        fails["add/sub round trip"] += int((np.any(D != A, axis=1) | (borrow != c1)).sum())

        # a * (b + c) with the carry kept as an extra limb
        BC, carry, _ = add_batch(B, C)
        lhs = mul_words_batch(np.hstack([A, np.zeros((n, 1), np.uint64)]),
                              np.hstack([BC, carry[:, None].astype(np.uint64)]))
        rhs, top, _ = add_batch(mul_words_batch(A, B), mul_words_batch(A, C))
        want = np.hstack([rhs, top[:, None].astype(np.uint64), np.zeros((n, 1), np.uint64)])
        fails["distributivity"] += int(np.any(lhs != want, axis=1).sum())

        one = np.zeros((n, m), np.uint64)
        one[:, 0] = 1
        zero = np.zeros((n, m), np.uint64)
        ident = mul_words_batch(A, one)
        ann = mul_words_batch(A, zero)
        az, az_c, _ = add_batch(A, zero)
        fails["identity/annihilator"] += int((
            np.any(ident[:, :m] != A, axis=1) | np.any(ident[:, m:] != 0, axis=1)
            | np.any(ann != 0, axis=1) | np.any(az != A, axis=1) | (az_c != 0)).sum())
    note(f"{count} instances per property, failures {sum(fails.values())}")
    assert count >= 10_000
    assert not any(fails.values()), fails


@pytest.mark.criterion(8, "report only: w=8 vs oracle ticks at >= 6144 bits; carry ratio random < pathological",
                       report_only=True)
def test_hardware_report(note):
    be = _backend.impl
    speedups = []
    for bits in (6144, 8192, 12288, 16384, 24576, 32768):
        rep = bench.run_bench("add", bits, 8, 20, 8, 2000, kernels=("dot", "oracle"), backend=be)
        dot, orc = rep.rows
        speedups.append(orc.ticks_per_op_mean / dot.ticks_per_op_mean)
    geo = math.exp(sum(map(math.log, speedups)) / len(speedups))
    note(f"oracle/w8 tick ratio {min(speedups):.2f}..{max(speedups):.2f}, geomean {geo:.2f} "
         f"({'dot faster' if min(speedups) >= 1 else 'dot slower at some size'})")
    ratios = {}
    for cat in ("random", "full-propagation"):
        rep = bench.run_bench("add", 4096, 8, 20, 8, 2000, cat, ("dot",), True, backend=be)
        ratios[cat] = rep.rows[0].carry_add_ratio
    note(f"carry/add random {ratios['random']:.2f} vs full-propagation "
         f"{ratios['full-propagation']:.2f} "
         f"({'as expected' if ratios['random'] < ratios['full-propagation'] else 'reversed'})")
    assert all(math.isfinite(s) for s in speedups)
    assert all(math.isfinite(r) for r in ratios.values())


@pytest.mark.criterion(9, "gen is deterministic: same seed, byte-identical JSONL")
def test_gen_determinism(tmp_path, note):
    outs = []
    for name in ("first", "second"):
        path = tmp_path / f"{name}.jsonl"
        subprocess.run([sys.executable, "-m", "lanearith", "gen", "--op", "add",
                        "--bits", ",".join(map(str, DEFAULT_SIZES)), "--cases", "50", "--seed", "5489",
                        "--pathological", "all", "--pathological-cases", "10", "-o", str(path)],
                       check=True, capture_output=True)
        outs.append(path.read_bytes())
    note(f"{len(outs[0])} bytes, identical={outs[0] == outs[1]}")
    assert outs[0] == outs[1]
