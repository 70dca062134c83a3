import random

import pytest
from hypothesis import given, settings, strategies as st

from cmxsim.metaformat import (
    COLOCATED_USED_BITS,
    COMPACT_BITS,
    NAIVE_USED_BITS,
    NIL_FULL,
    NIL_LOCAL,
    CodecError,
    ColocatedEntry,
    CompactEntry,
    NaiveEntry,
    PageType,
    decode_colocated,
    decode_compact,
    decode_naive,
    encode_block_sz,
    encode_colocated,
    encode_compact,
    encode_naive,
    pack_activity,
    required_chunks,
    unpack_activity,
)

Z = PageType.ZERO
C = PageType.COMPRESSED
P = PageType.PROMOTED
I = PageType.INCOMPRESSIBLE


def test_width_accounting():
    assert NAIVE_USED_BITS == 265
    assert COLOCATED_USED_BITS == 283
    assert COMPACT_BITS == 256


def test_zero_page_is_all_zero_bytes():
    e = CompactEntry((Z,) * 4, (0,) * 4, 0, 0, 0, (0,) * 7, 0)
    raw = encode_compact(e)
    assert raw == bytes(32)
    assert decode_compact(raw) == e


def test_required_chunks():
    assert required_chunks(2000) == (4, C)
    assert required_chunks(0) == (0, Z)
    assert required_chunks(1) == (1, C)
    assert required_chunks(3584) == (7, C)
    assert required_chunks(3585) == (8, I)
    assert required_chunks(4096) == (8, I)
    with pytest.raises(CodecError):
        required_chunks(4097)
    with pytest.raises(CodecError):
        required_chunks(-1)


def test_encode_block_sz():
    assert encode_block_sz(256) == 1
    assert encode_block_sz(1) == 0
    assert encode_block_sz(1024) == 7
    assert encode_block_sz(128) == 0
    assert encode_block_sz(129) == 1
    with pytest.raises(CodecError):
        encode_block_sz(0)
    with pytest.raises(CodecError):
        encode_block_sz(1025)


def test_activity_packing():
    assert pack_activity(0, 0, 0) == 0
    assert unpack_activity(pack_activity(1, 5, 1)) == (1, 5, 1)
    rng = random.Random(3)
    for _ in range(1 << 16):
        trip = (rng.randrange(2), rng.randrange(1 << 30), rng.randrange(2))
        assert unpack_activity(pack_activity(*trip)) == trip
    with pytest.raises(CodecError):
        pack_activity(1, 1 << 30, 0)


def random_compact_entry(rng):
    """Random entry respecting the format's consistency invariants."""
    kind = rng.randrange(5)
    if kind == 0:  # zero page
        return CompactEntry((Z,) * 4, (0,) * 4, 0, 0, 0, (0,) * 7, 0)
    wr = rng.randrange(16)
    sub = rng.randrange(16)
    if kind == 1:  # page-wide incompressible (eight chunks, eighth in last)
        ids = [rng.randrange(NIL_LOCAL) for _ in range(8)]
        return CompactEntry((I,) * 4, (7,) * 4, 7, wr, sub,
                            tuple(ids[:7]), ids[7])
    if kind == 2:  # stream page with mixed blocks
        btype, bsz = [], []
        for _ in range(4):
            t = rng.choice([Z, C, I])
            btype.append(t)
            bsz.append(0 if t == Z else (7 if t == I else rng.randrange(8)))
        if all(t == Z for t in btype):
            btype[0] = C
            bsz[0] = rng.randrange(8)
        slots = sum((s + 1) * 128 for t, s in zip(btype, bsz) if t != Z)
        n = min(7, -(-slots // 512))
        ids = [rng.randrange(NIL_LOCAL) for _ in range(n)]
        ptrs = ids + [0] * (7 - n)
        return CompactEntry(tuple(btype), tuple(bsz), n - 1, wr, sub,
                            tuple(ptrs), 0)
    pl = rng.randrange(1 << 29)
    if kind == 3:  # promoted dirty: shadows gone
        btype = [P if rng.random() < 0.7 else Z for _ in range(4)]
        if P not in btype:
            btype[0] = P
        ptrs = (NIL_LOCAL,) + (0,) * 6
        return CompactEntry(tuple(btype), (0,) * 4, 0, wr, sub, ptrs, pl)
    # promoted clean: shadow chunk list retained
    btype, bsz = [], []
    for _ in range(4):
        t = rng.choice([Z, C, P])
        btype.append(t)
        bsz.append(0 if t == Z else rng.randrange(8))
    if P not in btype:
        btype[0] = P
    slots = sum((s + 1) * 128 for t, s in zip(btype, bsz) if t != Z)
    n = max(1, min(7, -(-slots // 512)))
    ids = [rng.randrange(NIL_LOCAL) for _ in range(n)]
    return CompactEntry(tuple(btype), tuple(bsz), n - 1, wr, sub,
                        tuple(ids + [0] * (7 - n)), pl)


def test_compact_round_trip_randomized():
    rng = random.Random(11)
    for _ in range(10_000):
        e = random_compact_entry(rng)
        assert decode_compact(encode_compact(e)) == e


def test_colocated_round_trip_randomized():
    rng = random.Random(12)
    for _ in range(10_000):
        c = random_compact_entry(rng)
        ptrs = list(c.ptr_chunk) + [0]
        if c.ptr_chunk[0] == NIL_LOCAL:
            ptrs = [NIL_FULL] + [0] * 7
        e = ColocatedEntry(c.block_type, c.block_sz, c.num_chunks,
                           c.wr_cntr, tuple(p % (1 << 32) for p in ptrs))
        word = encode_colocated(e)
        assert word >> 283 == 0
        assert decode_colocated(word) == e


def test_naive_round_trip_randomized():
    rng = random.Random(13)
    for _ in range(10_000):
        ptype = rng.choice([Z, C, P, I])
        if ptype == Z:
            e = NaiveEntry(Z, 0, 0, (0,) * 8)
        else:
            n = {C: rng.randrange(1, 8), I: 8, P: rng.randrange(1, 8)}[ptype]
            ids = [rng.randrange(1 << 32) for _ in range(n)] + [0] * (8 - n)
            e = NaiveEntry(ptype, n - 1, rng.randrange(16), tuple(ids))
        raw = encode_naive(e)
        assert len(raw) == 64
        assert decode_naive(raw) == e


def test_encode_field_overflow():
    with pytest.raises(CodecError):
        encode_compact(CompactEntry((C,) * 4, (0,) * 4, 8, 0, 0, (0,) * 7, 0))
    with pytest.raises(CodecError):
        encode_compact(CompactEntry((C,) * 4, (0,) * 4, 0, 16, 0, (0,) * 7, 0))
    with pytest.raises(CodecError):
        encode_compact(CompactEntry((C,) * 4, (0,) * 4, 0, 0, 16, (0,) * 7, 0))
    with pytest.raises(CodecError):
        encode_compact(
            CompactEntry((C,) * 4, (0,) * 4, 0, 0, 0, (1 << 28,) + (0,) * 6, 0))


def test_decode_rejects_inconsistent_patterns():
    # zero page with a stray pointer bit set
    raw = bytearray(32)
    raw[10] = 0x40
    with pytest.raises(CodecError):
        decode_compact(bytes(raw))
    # zero block carrying a nonzero size code
    e = CompactEntry((Z, C, C, C), (1, 0, 0, 0), 0, 0, 0, (0,) * 7, 0)
    with pytest.raises(CodecError):
        encode_compact(e)
    with pytest.raises(CodecError):
        decode_naive(bytes(63))


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 4096))
def test_required_chunks_matches_brute_force(size):
    count, ptype = required_chunks(size)
    if size == 0:
        assert (count, ptype) == (0, Z)
    elif size <= 7 * 512:
        # smallest k with k*512 >= size
        k = next(k for k in range(1, 8) if k * 512 >= size)
        assert (count, ptype) == (k, C)
    else:
        assert (count, ptype) == (8, I)


@settings(max_examples=300, deadline=None)
@given(st.integers(1, 1024))
def test_block_sz_alignment_bounds(size):
    s = encode_block_sz(size)
    aligned = (s + 1) * 128
    assert 0 <= s <= 7
    assert aligned >= size
    assert aligned - size < 128
