import numpy as np
import pytest
from conftest import arr, limb_lists
from hypothesis import given
from hypothesis import strategies as st

from lanearith import limbcore as lc
from lanearith.limbcore import ContractError, ParseError, RepresentationError


def test_radix_config():
    assert lc.SATURATED.base == 1 << 64
    assert lc.UNSATURATED.mask == (1 << 52) - 1
    assert not lc.UNSATURATED.saturated
    with pytest.raises(ValueError):
        lc.RadixConfig(32)


def test_int_round_trip_examples():
    assert lc.from_int(0).size == 0
    assert lc.from_int(1 << 64).tolist() == [0, 1]
    assert lc.from_int(5, length=3).tolist() == [5, 0, 0]
    assert lc.to_int(arr([0, 1])) == 1 << 64
    assert lc.from_int((1 << 52) + 3, lc.UNSATURATED).tolist() == [3, 1]


@given(st.integers(0, 1 << 2000))
def test_int_round_trip(x):
    assert lc.to_int(lc.from_int(x)) == x
    assert lc.to_int(lc.from_int(x, 52), 52) == x
    assert lc.from_hex(lc.to_hex(lc.from_int(x))).tolist() == lc.from_int(x).tolist()
    assert lc.to_int(lc.from_bytes(lc.to_bytes(lc.from_int(x)))) == x


def test_from_int_negative_and_overflow():
    with pytest.raises(RepresentationError):
        lc.from_int(-1)
    with pytest.raises(ContractError):
        lc.from_int(1 << 64, length=1)


def test_hex_parsing():
    assert lc.from_hex("0xFFFF_FFFF_FFFF_FFFF_1").tolist() == [0xFFFFFFFFFFFFFFF1, 0xF]
    assert lc.to_hex(arr([])) == "0"
    for bad in ("", "0x", "12g", "-1", "1__2", None):
        with pytest.raises(ParseError):
            lc.from_hex(bad)


def test_as_limbs_checks():
    with pytest.raises(RepresentationError):
        lc.as_limbs([1 << 52], lc.UNSATURATED)
    with pytest.raises(RepresentationError):
        lc.as_limbs(np.array([1 << 60], dtype=np.uint64), 52)
    with pytest.raises(RepresentationError):
        lc.as_limbs(np.array([-1], dtype=np.int64))
    with pytest.raises(RepresentationError):
        lc.as_limbs([-1])
    with pytest.raises(ContractError):
        lc.as_limbs(np.zeros((2, 2), dtype=np.uint64))
    with pytest.raises(RepresentationError):
        lc.as_limbs(np.array([1.0]))
    a = lc.as_limbs(np.array([1, 2], dtype=np.int32))
    assert a.dtype == np.uint64


def test_normalize_pad_compare():
    assert lc.normalize(arr([1, 0, 0])).tolist() == [1]
    assert lc.normalize(arr([0, 0])).size == 0
    assert lc.pad(arr([7]), 3).tolist() == [7, 0, 0]
    assert lc.pad(arr([7, 0]), 1).tolist() == [7]
    with pytest.raises(ContractError):
        lc.pad(arr([7, 1]), 1)
    assert lc.compare(arr([1, 0, 0]), arr([1])) == 0
    assert lc.compare(arr([0, 1]), arr([5])) == 1
    assert lc.compare(arr([]), arr([1])) == -1


def test_to_bytes_length():
    assert len(lc.to_bytes(arr([1, 0]))) == 16
    assert len(lc.to_bytes(arr([1]), 52)) == 7


def test_packed_length():
    assert [lc.packed_length(m) for m in (0, 1, 4, 13)] == [0, 2, 5, 16]


def test_pack_examples():
    # 256 bits: four full 52-bit limbs and 48 bits in the fifth
    ones = arr([lc.SATURATED.mask] * 4)
    p = lc.pack_64_to_52(ones)
    assert p.tolist() == [lc.UNSATURATED.mask] * 4 + [(1 << 48) - 1]
    assert lc.unpack_52_to_64(p).tolist() == ones.tolist()
    assert lc.pack_64_to_52(arr([1 << 52])).tolist() == [0, 1]


@given(limb_lists(0, 64))
def test_pack_unpack_round_trip(xs):
    a = arr(xs)
    p = lc.pack_64_to_52(a)
    assert len(p) == lc.packed_length(len(a))
    assert int(p.max(initial=0)) >> 52 == 0
    assert lc.to_int(p, 52) == lc.to_int(a)
    assert lc.unpack_52_to_64(p).tolist() == xs


@given(limb_lists(0, 40, k=52))
def test_unpack_value_preserved(xs):
    p = arr(xs)
    u = lc.unpack_52_to_64(p)
    assert lc.to_int(u) == lc.to_int(p, 52)
    assert len(u) in ((52 * len(xs)) // 64, (52 * len(xs) + 63) // 64)


def test_unpack_explicit_length():
    p = lc.pack_64_to_52(arr([3, 5]))
    assert lc.unpack_52_to_64(p, 4).tolist() == [3, 5, 0, 0]
    with pytest.raises(ContractError):
        lc.unpack_52_to_64(p, 1)
    with pytest.raises(RepresentationError):
        lc.unpack_52_to_64(arr([1 << 52]))
