"""Block compression backends, co-location packing, and the latency model.

Two payload backends ship: a self-contained LZSS sliding-window compressor
and a zlib-based one (DEFLATE's LZ77 stage, much faster for large runs).
Both guarantee decompress(compress(b)) == b for arbitrary input. Traces
without payloads instead use annotation-driven classification; those helpers
live here too so the chunk math has one home.

Timing is decoupled from the algorithm: latencies come from configured
engine throughputs applied to the uncompressed size of the unit processed
(one 1KB block or a whole 4KB page).
"""

import math
import zlib
from dataclasses import dataclass

from .metaformat import (
    PageType,
    CodecError,
    block_slot_bytes,
    encode_block_sz,
    required_chunks,
)

BLOCK = 1024
PAGE = 4096
CHUNK = 512

_ZERO_BLOCK = bytes(BLOCK)
_ZERO_PAGE = bytes(PAGE)


@dataclass
class LatencyModel:
    """Engine throughput in bytes per device cycle (4B/16B per cycle yields
    the reference 256/64 cycles for a 1KB block and 4x that for 4KB)."""

    compress_bpc: float = 4.0
    decompress_bpc: float = 16.0

    def compress_cycles(self, nbytes):
        return math.ceil(nbytes / self.compress_bpc)

    def decompress_cycles(self, nbytes):
        return math.ceil(nbytes / self.decompress_bpc)

    def set_decompress_cycles_1k(self, cycles):
        """Sweep knob: cycles to decompress one 1KB block."""
        self.decompress_bpc = BLOCK / cycles

    def set_compress_cycles_1k(self, cycles):
        self.compress_bpc = BLOCK / cycles


# ---------------------------------------------------------------------------
# backends

class LzssCodec:
    """Greedy LZSS over the whole block (the dictionary window spans it).

    Token stream: a flag byte covers eight tokens, LSB first; flag 0 is a
    literal byte, flag 1 a match of 3..18 bytes encoded as two bytes
    (offset low 8, offset high 4 | length-3). Offsets are 1..4095 back.
    """

    name = "lzss"
    MIN_MATCH = 3
    MAX_MATCH = 18
    MAX_OFFSET = 4095
    MAX_CANDIDATES = 48

    def compress(self, data):
        n = len(data)
        heads = {}
        out = bytearray()
        flags_at = 0
        flags = 0
        nflags = 0
        i = 0
        while i < n:
            if nflags == 0:
                flags_at = len(out)
                out.append(0)
            best_len = 0
            best_off = 0
            if i + self.MIN_MATCH <= n:
                key = data[i:i + 3]
                limit = min(self.MAX_MATCH, n - i)
                tried = 0
                for pos in reversed(heads.get(key, ())):
                    off = i - pos
                    if off > self.MAX_OFFSET or tried >= self.MAX_CANDIDATES:
                        break
                    tried += 1
                    length = 3
                    while length < limit and data[pos + length] == data[i + length]:
                        length += 1
                    if length > best_len:
                        best_len = length
                        best_off = off
                        if length == limit:
                            break
            if best_len >= self.MIN_MATCH:
                flags |= 1 << nflags
                out.append(best_off & 0xFF)
                out.append(((best_off >> 8) << 4) | (best_len - 3))
                for j in range(i, i + best_len):
                    if j + 3 <= n:
                        heads.setdefault(data[j:j + 3], []).append(j)
                i += best_len
            else:
                out.append(data[i])
                if i + 3 <= n:
                    heads.setdefault(data[i:i + 3], []).append(i)
                i += 1
            nflags += 1
            if nflags == 8:
                out[flags_at] = flags
                flags = 0
                nflags = 0
        if nflags:
            out[flags_at] = flags
        return bytes(out)

    def decompress(self, data, original_size):
        out = bytearray()
        i = 0
        n = len(data)
        while len(out) < original_size:
            if i >= n:
                raise CodecError("truncated LZSS stream")
            flags = data[i]
            i += 1
            for k in range(8):
                if len(out) >= original_size:
                    break
                if flags >> k & 1:
                    lo = data[i]
                    hi = data[i + 1]
                    i += 2
                    off = ((hi >> 4) << 8) | lo
                    length = (hi & 0xF) + 3
                    start = len(out) - off
                    for j in range(start, start + length):
                        out.append(out[j])
                else:
                    out.append(data[i])
                    i += 1
        return bytes(out)


class ZlibCodec:
    name = "zlib"
    LEVEL = 1

    def compress(self, data):
        return zlib.compress(data, self.LEVEL)

    def decompress(self, data, original_size):
        # Chunk slots are padded, so tolerate trailing bytes.
        d = zlib.decompressobj()
        out = d.decompress(data, original_size)
        if len(out) != original_size:
            raise CodecError("zlib stream shorter than expected")
        return out


BACKENDS = {"lzss": LzssCodec, "zlib": ZlibCodec}


def make_codec(name):
    if name == "oracle":
        return None
    try:
        return BACKENDS[name]()
    except KeyError:
        raise ValueError(f"unknown compressor backend {name!r}") from None


# ---------------------------------------------------------------------------
# packing layout

def stream_slots(block_type, block_sz, include_promoted=False):
    """(start_offset, slot_bytes) per block within the packed chunk stream.

    Zero blocks never occupy stream space. Promoted blocks occupy none at
    pack time; with include_promoted=True their retained slot is counted,
    which is how fetches address a clean page whose other blocks promoted.
    """
    slots = []
    off = 0
    for t, s in zip(block_type, block_sz):
        if t == PageType.ZERO:
            slots.append((off, 0))
        elif t == PageType.PROMOTED and not include_promoted:
            slots.append((off, 0))
        else:
            nbytes = block_slot_bytes(s)
            slots.append((off, nbytes))
            off += nbytes
    return slots


def chunks_for_span(start, nbytes):
    """Chunk ordinals covering [start, start+nbytes) of the packed stream."""
    if nbytes == 0:
        return range(0)
    return range(start >> 9, -(-(start + nbytes) // 512))


@dataclass(frozen=True)
class PackedPageLayout:
    """Classification of one 4KB page into four independently stored blocks."""

    block_type: tuple     # PageType per 1KB block
    block_sz: tuple       # 3-bit slot codes (0 where no slot)
    raw_sizes: tuple      # exact compressed byte counts (0 for zero blocks)
    chunk_count: int

    def start_offset(self, i):
        return stream_slots(self.block_type, self.block_sz)[i][0]

    def blocks_to_fetch(self, i):
        """Minimal chunk set covering block i; empty for zero blocks."""
        start, nbytes = stream_slots(self.block_type, self.block_sz)[i]
        return chunks_for_span(start, nbytes)


def _finish_layout(btype, bsz, raw):
    total = sum(block_slot_bytes(s) for t, s in zip(btype, bsz) if t != PageType.ZERO)
    count = -(-total // 512)
    if count >= 8:
        # The stream would fill all eight chunks; saving under one chunk is
        # not worth a packed layout, and pages this dense must stay directly
        # addressable (promotion repurposes the eighth pointer field).
        return None
    return PackedPageLayout(tuple(btype), tuple(bsz), tuple(raw), count)


def _raw_layout():
    return PackedPageLayout(
        (PageType.INCOMPRESSIBLE,) * 4, (7,) * 4, (BLOCK,) * 4, 8
    )


def classify_colocated(page, codec):
    """Per-block classification of a real 4KB page. Returns (layout, payloads);
    payloads align with blocks (None for zero blocks, raw bytes for
    incompressible ones)."""
    btype, bsz, raw, payloads = [], [], [], []
    for i in range(4):
        blk = page[i * BLOCK:(i + 1) * BLOCK]
        if blk == _ZERO_BLOCK:
            btype.append(PageType.ZERO)
            bsz.append(0)
            raw.append(0)
            payloads.append(None)
            continue
        comp = codec.compress(blk)
        if len(comp) >= BLOCK:
            btype.append(PageType.INCOMPRESSIBLE)
            bsz.append(7)
            raw.append(BLOCK)
            payloads.append(bytes(blk))
        else:
            btype.append(PageType.COMPRESSED)
            bsz.append(encode_block_sz(len(comp)))
            raw.append(len(comp))
            payloads.append(comp)
    layout = _finish_layout(btype, bsz, raw)
    if layout is None:
        layout = _raw_layout()
        payloads = [bytes(page[i * BLOCK:(i + 1) * BLOCK]) for i in range(4)]
    return layout, payloads


def classify_oracle_colocated(page_csize):
    """Annotation-driven classification: the page's compressed size is split
    evenly across the four blocks (remainder to the leading blocks)."""
    if page_csize == 0:
        return PackedPageLayout((PageType.ZERO,) * 4, (0,) * 4, (0,) * 4, 0)
    btype, bsz, raw = [], [], []
    for i in range(4):
        size = max(1, page_csize // 4 + (1 if i < page_csize % 4 else 0))
        if size >= BLOCK:
            btype.append(PageType.INCOMPRESSIBLE)
            bsz.append(7)
            raw.append(BLOCK)
        else:
            btype.append(PageType.COMPRESSED)
            bsz.append(encode_block_sz(size))
            raw.append(size)
    return _finish_layout(btype, bsz, raw) or _raw_layout()


def classify_page4k(page, codec):
    """Whole-page classification. Returns (type, payload, nchunks, raw_size)."""
    if page == _ZERO_PAGE:
        return PageType.ZERO, None, 0, 0
    comp = codec.compress(page)
    nchunks, ptype = required_chunks(min(len(comp), PAGE))
    if ptype == PageType.INCOMPRESSIBLE:
        return ptype, bytes(page), 8, PAGE
    return ptype, comp, nchunks, len(comp)


def classify_oracle_page4k(page_csize):
    nchunks, ptype = required_chunks(page_csize)
    return ptype, None, nchunks, page_csize


def pack_stream(layout, payloads):
    """Chunk images for a freshly packed page (chunk_count x 512B)."""
    stream = bytearray(layout.chunk_count * CHUNK)
    for i, (start, nbytes) in enumerate(stream_slots(layout.block_type, layout.block_sz)):
        if nbytes:
            data = payloads[i]
            stream[start:start + len(data)] = data
    return [bytes(stream[k * CHUNK:(k + 1) * CHUNK]) for k in range(layout.chunk_count)]


def pack_page4k(payload, nchunks):
    stream = bytearray(nchunks * CHUNK)
    stream[:len(payload)] = payload
    return [bytes(stream[k * CHUNK:(k + 1) * CHUNK]) for k in range(nchunks)]
