"""Bit-exact codecs for translation metadata and page activity entries.

Three entry formats exist, all carrying the same translation state:

* naive     - one page-level type, eight 32-bit full-address chunk pointers,
              265 bits used inside a 512-bit slot.
* colocated - per-1KB-block [type, size] pairs plus the same eight 32-bit
              pointers, 283 bits, stored bit-packed.
* compact   - per-block pairs, a 4-bit sub-region id, seven 28-bit
              sub-region-relative chunk pointers and one 29-bit last pointer,
              exactly 256 bits so an entry never crosses a 64B line.

Fields pack little-endian from bit 0 in declaration order. Pointer fields
not in use are encoded as zero; the all-ones pattern (NIL) in the first
pointer of a promoted page marks it dirty, i.e. its shadow chunks are gone.
The last pointer doubles as the eighth chunk pointer for incompressible
pages and as the P-chunk pointer for promoted pages.
"""

from dataclasses import dataclass
from enum import IntEnum


class PageType(IntEnum):
    ZERO = 0          # all-zero content, no chunks
    COMPRESSED = 1    # stored across 1..7 C-chunks
    PROMOTED = 2      # uncompressed copy lives in a P-chunk
    INCOMPRESSIBLE = 3  # stored raw

# Field widths; the totals below are what the formats are specified to use.
TYPE_BITS = 2
BLOCK_SZ_BITS = 3
NUM_CHUNKS_BITS = 3
WR_CNTR_BITS = 4
SUB_REGION_BITS = 4
PTR_FULL_BITS = 32     # full-address 512B-chunk pointer (41 - 9)
PTR_LOCAL_BITS = 28    # sub-region-relative (37 - 9)
PTR_LAST_BITS = 29     # P-chunk pointer (41 - 12)

NAIVE_USED_BITS = TYPE_BITS + NUM_CHUNKS_BITS + WR_CNTR_BITS + 8 * PTR_FULL_BITS
COLOCATED_USED_BITS = (
    4 * (TYPE_BITS + BLOCK_SZ_BITS)
    + NUM_CHUNKS_BITS + WR_CNTR_BITS + 8 * PTR_FULL_BITS
)
COMPACT_BITS = (
    4 * (TYPE_BITS + BLOCK_SZ_BITS)
    + NUM_CHUNKS_BITS + WR_CNTR_BITS + SUB_REGION_BITS
    + 7 * PTR_LOCAL_BITS + PTR_LAST_BITS
)

NIL_LOCAL = (1 << PTR_LOCAL_BITS) - 1
NIL_FULL = (1 << PTR_FULL_BITS) - 1

WR_CNTR_THRESHOLD = 16  # counter wrap triggers recompression

MAX_COMPRESSED_CHUNKS = 7
INCOMPRESSIBLE_FLOOR = MAX_COMPRESSED_CHUNKS * 512  # above 3584B store raw


class CodecError(ValueError):
    """Field overflow on encode or a reserved/inconsistent pattern on decode."""


def _check(value, bits, name):
    if not 0 <= value < (1 << bits):
        raise CodecError(f"{name}={value} does not fit in {bits} bits")
    return value


# ---------------------------------------------------------------------------
# sizing helpers

def required_chunks(compressed_size):
    """Chunk count and page type for a page compressed to the given size.

    Zero bytes means a zero page, up to 7x512B is stored compressed, anything
    larger is stored raw across all eight chunks.
    """
    if not 0 <= compressed_size <= 4096:
        raise CodecError(f"compressed size {compressed_size} outside 0..4096")
    if compressed_size == 0:
        return 0, PageType.ZERO
    if compressed_size > INCOMPRESSIBLE_FLOOR:
        return 8, PageType.INCOMPRESSIBLE
    return -(-compressed_size // 512), PageType.COMPRESSED


def encode_block_sz(size):
    """3-bit code s for a 1KB block compressed to `size`; slot is (s+1)*128B."""
    if not 1 <= size <= 1024:
        raise CodecError(f"block size {size} outside 1..1024")
    return -(-size // 128) - 1


def block_slot_bytes(code):
    return (code + 1) * 128


# ---------------------------------------------------------------------------
# activity entries

def pack_activity(allocated, ospn, referenced):
    """4-byte activity word: allocated (MSB) | 30-bit OSPN | referenced (LSB)."""
    if not 0 <= ospn < (1 << 30):
        raise CodecError(f"ospn {ospn} does not fit in 30 bits")
    return ((allocated & 1) << 31) | (ospn << 1) | (referenced & 1)


def unpack_activity(word):
    return (word >> 31) & 1, (word >> 1) & ((1 << 30) - 1), word & 1


# ---------------------------------------------------------------------------
# entry records

@dataclass(frozen=True)
class CompactEntry:
    block_type: tuple        # four PageType values
    block_sz: tuple          # four 3-bit codes
    num_chunks: int          # raw 3-bit field (count-1 for 1..8 chunks)
    wr_cntr: int
    sub_region: int
    ptr_chunk: tuple         # seven 28-bit sub-region-relative indices
    ptr_last: int            # 29-bit P-chunk pointer or eighth chunk index


@dataclass(frozen=True)
class ColocatedEntry:
    block_type: tuple
    block_sz: tuple
    num_chunks: int
    wr_cntr: int
    ptr_chunk: tuple         # eight 32-bit full-address chunk indices


@dataclass(frozen=True)
class NaiveEntry:
    page_type: PageType
    num_chunks: int
    wr_cntr: int
    ptr_chunk: tuple         # eight 32-bit full-address chunk indices


def _validate_blocks(block_type, block_sz):
    if len(block_type) != 4 or len(block_sz) != 4:
        raise CodecError("entries describe exactly four 1KB blocks")
    for t, s in zip(block_type, block_sz):
        _check(int(t), TYPE_BITS, "block_type")
        _check(s, BLOCK_SZ_BITS, "block_sz")
        if t == PageType.ZERO and s != 0:
            raise CodecError("zero blocks must encode block_sz=0")


def encode_compact(entry):
    _validate_blocks(entry.block_type, entry.block_sz)
    if len(entry.ptr_chunk) != 7:
        raise CodecError("compact entries carry seven chunk pointer fields")
    word = 0
    pos = 0
    for t in entry.block_type:
        word |= int(t) << pos
        pos += TYPE_BITS
    for s in entry.block_sz:
        word |= s << pos
        pos += BLOCK_SZ_BITS
    word |= _check(entry.num_chunks, NUM_CHUNKS_BITS, "num_chunks") << pos
    pos += NUM_CHUNKS_BITS
    word |= _check(entry.wr_cntr, WR_CNTR_BITS, "wr_cntr") << pos
    pos += WR_CNTR_BITS
    word |= _check(entry.sub_region, SUB_REGION_BITS, "sub_region") << pos
    pos += SUB_REGION_BITS
    for p in entry.ptr_chunk:
        word |= _check(p, PTR_LOCAL_BITS, "ptr_chunk") << pos
        pos += PTR_LOCAL_BITS
    word |= _check(entry.ptr_last, PTR_LAST_BITS, "ptr_last") << pos
    pos += PTR_LAST_BITS
    assert pos == COMPACT_BITS == 256
    return word.to_bytes(32, "little")


def decode_compact(raw):
    if len(raw) != 32:
        raise CodecError(f"compact entries are 32 bytes, got {len(raw)}")
    word = int.from_bytes(raw, "little")
    pos = 0

    def take(bits):
        nonlocal pos
        v = (word >> pos) & ((1 << bits) - 1)
        pos += bits
        return v

    btype = tuple(PageType(take(TYPE_BITS)) for _ in range(4))
    bsz = tuple(take(BLOCK_SZ_BITS) for _ in range(4))
    nchunks = take(NUM_CHUNKS_BITS)
    wr = take(WR_CNTR_BITS)
    sub = take(SUB_REGION_BITS)
    ptrs = tuple(take(PTR_LOCAL_BITS) for _ in range(7))
    last = take(PTR_LAST_BITS)
    entry = CompactEntry(btype, bsz, nchunks, wr, sub, ptrs, last)
    _decode_checks(btype, bsz, nchunks, ptrs, last, sub)
    return entry


def _decode_checks(btype, bsz, nchunks, ptrs, last, sub):
    for t, s in zip(btype, bsz):
        if t == PageType.ZERO and s != 0:
            raise CodecError("zero block with nonzero block_sz")
    if all(t == PageType.ZERO for t in btype):
        if nchunks or sub or last or any(ptrs):
            raise CodecError("zero page with residual pointer state")


def encode_colocated(entry):
    """283-bit packed value; storage packs entries bit-contiguously."""
    _validate_blocks(entry.block_type, entry.block_sz)
    if len(entry.ptr_chunk) != 8:
        raise CodecError("colocated entries carry eight chunk pointer fields")
    word = 0
    pos = 0
    for t in entry.block_type:
        word |= int(t) << pos
        pos += TYPE_BITS
    for s in entry.block_sz:
        word |= s << pos
        pos += BLOCK_SZ_BITS
    word |= _check(entry.num_chunks, NUM_CHUNKS_BITS, "num_chunks") << pos
    pos += NUM_CHUNKS_BITS
    word |= _check(entry.wr_cntr, WR_CNTR_BITS, "wr_cntr") << pos
    pos += WR_CNTR_BITS
    for p in entry.ptr_chunk:
        word |= _check(p, PTR_FULL_BITS, "ptr_chunk") << pos
        pos += PTR_FULL_BITS
    assert pos == COLOCATED_USED_BITS == 283
    return word


def decode_colocated(word):
    if word >> COLOCATED_USED_BITS:
        raise CodecError("colocated entry wider than 283 bits")
    pos = 0

    def take(bits):
        nonlocal pos
        v = (word >> pos) & ((1 << bits) - 1)
        pos += bits
        return v

    btype = tuple(PageType(take(TYPE_BITS)) for _ in range(4))
    bsz = tuple(take(BLOCK_SZ_BITS) for _ in range(4))
    nchunks = take(NUM_CHUNKS_BITS)
    wr = take(WR_CNTR_BITS)
    ptrs = tuple(take(PTR_FULL_BITS) for _ in range(8))
    for t, s in zip(btype, bsz):
        if t == PageType.ZERO and s != 0:
            raise CodecError("zero block with nonzero block_sz")
    return ColocatedEntry(btype, bsz, nchunks, wr, ptrs)


def encode_naive(entry):
    """265 used bits padded into a 64-byte slot."""
    word = int(_check(int(entry.page_type), TYPE_BITS, "type"))
    pos = TYPE_BITS
    word |= _check(entry.num_chunks, NUM_CHUNKS_BITS, "num_chunks") << pos
    pos += NUM_CHUNKS_BITS
    word |= _check(entry.wr_cntr, WR_CNTR_BITS, "wr_cntr") << pos
    pos += WR_CNTR_BITS
    if len(entry.ptr_chunk) != 8:
        raise CodecError("naive entries carry eight chunk pointer fields")
    for p in entry.ptr_chunk:
        word |= _check(p, PTR_FULL_BITS, "ptr_chunk") << pos
        pos += PTR_FULL_BITS
    assert pos == NAIVE_USED_BITS == 265
    return word.to_bytes(64, "little")


def decode_naive(raw):
    if len(raw) != 64:
        raise CodecError(f"naive entries occupy 64-byte slots, got {len(raw)}")
    word = int.from_bytes(raw, "little")
    if word >> NAIVE_USED_BITS:
        raise CodecError("reserved bits set in naive slot")
    pos = 0

    def take(bits):
        nonlocal pos
        v = (word >> pos) & ((1 << bits) - 1)
        pos += bits
        return v

    ptype = PageType(take(TYPE_BITS))
    nchunks = take(NUM_CHUNKS_BITS)
    wr = take(WR_CNTR_BITS)
    ptrs = tuple(take(PTR_FULL_BITS) for _ in range(8))
    if ptype == PageType.ZERO and (nchunks or any(ptrs)):
        raise CodecError("zero page with residual pointer state")
    return NaiveEntry(ptype, nchunks, wr, ptrs)
