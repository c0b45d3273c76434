import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from detsum.bitmap import SumsetBitmap, ValueWindow, bool_convolve, configure, union_into, witness_search
from detsum.counters import WorkCounters, counting
from detsum.errors import NoWitnessError, WindowMismatchError, WindowOverflowError


def bm(*values):
    return SumsetBitmap.from_values(values)


def test_convolve_examples():
    assert bool_convolve(bm(0, 1), bm(0, 2), ValueWindow(0, 3)).values() == [0, 1, 2, 3]
    s = bm(3, 7, 8, 20)
    assert bool_convolve(bm(0), s, ValueWindow(0, 100)).values() == s.values()
    out = bool_convolve(bm(1, 2), bm(1, 2), ValueWindow(0, 3))
    assert out.values() == [2, 3]
    assert out.offset == 2


def test_result_window():
    out = bool_convolve(bm(5, 6), bm(10), ValueWindow(0, 100))
    assert (out.offset, out.hi) == (15, 16)
    out = bool_convolve(bm(5, 6), bm(10), ValueWindow(16, 100))
    assert out.window == ValueWindow(16, 16)


def test_window_mismatch_and_overflow():
    with pytest.raises(WindowMismatchError):
        bool_convolve(bm(5), bm(5), ValueWindow(0, 9))
    configure(max_window=64)
    try:
        with pytest.raises(WindowOverflowError):
            bool_convolve(bm(0, 100), bm(0, 100), ValueWindow(0, 200))
    finally:
        configure(max_window=1 << 26)


def test_witness_examples():
    assert witness_search(bm(1, 2), bm(1, 2), 3) == (1, 2)
    assert witness_search(bm(0), bm(5), 5) == (0, 5)
    assert witness_search(bm(2, 4, 6), bm(1), 7) == (6, 1)
    with pytest.raises(NoWitnessError):
        witness_search(bm(2, 4), bm(1), 4)


def test_union_examples():
    assert union_into(SumsetBitmap(0, 5, 0b10), bm(2)).values() == [1, 2]
    assert union_into(SumsetBitmap(0, 5, 0b110), bm(2)).values() == [1, 2]
    assert union_into(SumsetBitmap(0, 5, 0), bm(0, 3)).values() == [0, 3]
    with pytest.raises(WindowMismatchError):
        union_into(SumsetBitmap(0, 3, 0), bm(4))


def test_union_invalidates_reversed_cache():
    dst = SumsetBitmap(0, 8, 1)
    before = dst.reversed_bits()
    union_into(dst, bm(8))
    assert dst.reversed_bits() != before
    assert witness_search(dst, bm(0), 8) == (8, 0)


sets = st.lists(st.integers(0, 700), min_size=1, max_size=512).map(lambda v: SumsetBitmap.from_values(v))


@settings(max_examples=150, deadline=None)
@given(sets, sets, st.integers(0, 800), st.integers(0, 1500))
def test_backends_agree(A, B, lo, span):
    clip = ValueWindow(lo, lo + span)
    if max(clip.lo, A.offset + B.offset) > min(clip.hi, A.hi + B.hi):
        return
    naive = bool_convolve(A, B, clip, "naive")
    assert bool_convolve(A, B, clip, "ntt") == naive
    assert bool_convolve(A, B, clip, "auto") == naive
    assert bool_convolve(B, A, clip, "naive") == naive
    brute = {a + b for a in A.values() for b in B.values() if clip.lo <= a + b <= clip.hi}
    assert naive.values() == sorted(brute)


@settings(max_examples=100, deadline=None)
@given(sets, sets, st.data())
def test_witness_is_min_pair(A, B, data):
    sums = sorted({a + b for a in A.values() for b in B.values()})
    z = data.draw(st.sampled_from(sums))
    a, b = witness_search(A, B, z)
    assert a in A and b in B and a + b == z
    assert a == min(x for x in A.values() if (z - x) in B)


def test_large_windows_agree():
    rng = random.Random(3)
    A = SumsetBitmap(0, 20000, rng.getrandbits(20001))
    B = SumsetBitmap(7, 15000, rng.getrandbits(15001))
    clip = ValueWindow(100, 30000)
    assert bool_convolve(A, B, clip, "naive") == bool_convolve(A, B, clip, "ntt")


@settings(max_examples=60, deadline=None)
@given(sets)
def test_serialization_roundtrip(A):
    data = A.to_bytes()
    assert SumsetBitmap.from_bytes(data) == A
    assert len(data) == 16 + 8 * ((A.length + 64) // 64)


def test_serialization_layout():
    A = SumsetBitmap(3, 70, (1 << 70) | 1)
    data = A.to_bytes()
    assert data[:16] == (3).to_bytes(8, "little") + (70).to_bytes(8, "little")
    assert len(data) == 16 + 16
    assert A.checksum() == SumsetBitmap.from_bytes(data).checksum()
    assert len(A.checksum()) == 16


def test_construction_rejects_stray_bits():
    with pytest.raises(WindowMismatchError):
        SumsetBitmap(0, 2, 0b1000)
    with pytest.raises(WindowMismatchError):
        SumsetBitmap.from_values([1, 9], offset=0, length=5)


def test_restricted_and_same_set():
    A = bm(1, 4, 9)
    R = A.restricted(ValueWindow(2, 9))
    assert R.values() == [4, 9] and R.window == ValueWindow(2, 9)
    assert R.same_set(bm(4, 9)) and R != bm(4, 9)


def test_counters_record_work():
    work = WorkCounters()
    with counting(work):
        bool_convolve(bm(0, 3), bm(0, 1, 2), ValueWindow(0, 10))
    assert work.conv_calls == 1
    assert work.conv_work == 3 + 2 + 2  # window lengths plus one per operand
