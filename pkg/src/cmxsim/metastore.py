"""Runtime page metadata and its projection onto the stored entry formats.

The engine mutates PageMeta records; the bit-exact formats in metaformat
are the storage contract. Conversion here is what snapshotting, dump-meta
and the round-trip tests exercise. A page is *clean* while its shadow
chunk list survives; freeing the shadows leaves the NIL sentinel in the
first pointer field, which is the only dirty marker the formats carry.
"""

import struct

from .layout import PAGE_SIZE
from .metaformat import (
    ColocatedEntry,
    CompactEntry,
    NaiveEntry,
    NIL_FULL,
    NIL_LOCAL,
    PageType,
    decode_colocated,
    decode_compact,
    decode_naive,
    encode_colocated,
    encode_compact,
    encode_naive,
)

SNAP_MAGIC = b"CMXSNAP1"
_FMT_IDS = {"naive": 0, "colocated": 1, "compact": 2}
_FMT_BYTES = {"naive": 64, "colocated": 36, "compact": 32}


class PageMeta:
    """Mutable translation state for one 4KB page."""

    __slots__ = ("btype", "bsz", "chunk_ids", "sub_region", "pchunk", "wr_cntr")

    def __init__(self):
        self.btype = [PageType.ZERO] * 4
        self.bsz = [0] * 4
        self.chunk_ids = []       # sub-region-relative indices, stream order
        self.sub_region = 0
        self.pchunk = None        # promoted-region P-chunk index
        self.wr_cntr = 0

    @property
    def is_zero(self):
        return (
            self.pchunk is None
            and not self.chunk_ids
            and all(t == PageType.ZERO for t in self.btype)
        )

    @property
    def has_stream(self):
        return bool(self.chunk_ids)

    @property
    def clean(self):
        """Promoted with live shadow chunks: demotion needs no recompression."""
        return self.pchunk is not None and bool(self.chunk_ids)

    @property
    def dirty(self):
        return self.pchunk is not None and not self.chunk_ids

    def promoted_blocks(self):
        return [i for i in range(4) if self.btype[i] == PageType.PROMOTED]


class MetadataStore:
    """ospn -> PageMeta plus format codecs for snapshots and dumps."""

    def __init__(self, layout):
        self.layout = layout
        self.fmt = layout.meta_format
        self.entries = {}

    def get(self, ospn):
        return self.entries.get(ospn)

    def ensure(self, ospn):
        m = self.entries.get(ospn)
        if m is None:
            m = PageMeta()
            self.entries[ospn] = m
        return m

    def touched_nonzero_pages(self):
        return sum(1 for m in self.entries.values() if not m.is_zero)

    # -- format conversion ---------------------------------------------------

    def _pchunk_pointer(self, meta):
        return (self.layout.promoted_base + meta.pchunk * PAGE_SIZE) >> 12

    def to_entry(self, meta):
        if self.fmt == "compact":
            return self._to_compact(meta)
        if self.fmt == "colocated":
            return self._to_colocated(meta)
        return self._to_naive(meta)

    def _to_compact(self, meta):
        ptrs = [0] * 7
        last = 0
        nraw = 0
        ids = meta.chunk_ids
        if ids:
            nraw = len(ids) - 1
            for i, idx in enumerate(ids[:7]):
                ptrs[i] = idx
            if len(ids) == 8:
                last = ids[7]
        if meta.pchunk is not None:
            last = self._pchunk_pointer(meta)
            if not ids:
                ptrs[0] = NIL_LOCAL
        return CompactEntry(
            tuple(meta.btype), tuple(meta.bsz), nraw, meta.wr_cntr,
            meta.sub_region if ids else 0, tuple(ptrs), last,
        )

    def _to_colocated(self, meta):
        ptrs = [0] * 8
        nraw = 0
        ids = meta.chunk_ids
        if ids:
            nraw = len(ids) - 1
            for i, idx in enumerate(ids):
                ptrs[i] = self.layout.global_chunk_id(meta.sub_region, idx)
        if meta.pchunk is not None:
            ptrs[7] = self._pchunk_pointer(meta)
            if not ids:
                ptrs[0] = NIL_FULL
        return ColocatedEntry(
            tuple(meta.btype), tuple(meta.bsz), nraw, meta.wr_cntr, tuple(ptrs)
        )

    def _to_naive(self, meta):
        types = set(meta.btype)
        if len(types) != 1:
            raise ValueError("naive entries hold one page-level type")
        ptrs = [0] * 8
        nraw = 0
        ids = meta.chunk_ids
        if ids:
            nraw = len(ids) - 1
            for i, idx in enumerate(ids):
                ptrs[i] = self.layout.global_chunk_id(meta.sub_region, idx)
        if meta.pchunk is not None:
            ptrs[7] = self._pchunk_pointer(meta)
            if not ids:
                ptrs[0] = NIL_FULL
        return NaiveEntry(meta.btype[0], nraw, meta.wr_cntr, tuple(ptrs))

    def from_entry(self, entry):
        meta = PageMeta()
        if self.fmt == "compact":
            self._fill_compact(meta, entry)
        elif self.fmt == "colocated":
            self._fill_wide(meta, entry.block_type, entry.block_sz,
                            entry.num_chunks, entry.ptr_chunk)
            meta.wr_cntr = entry.wr_cntr
        else:
            self._fill_wide(meta, (entry.page_type,) * 4, (0,) * 4,
                            entry.num_chunks, entry.ptr_chunk)
            meta.wr_cntr = entry.wr_cntr
        return meta

    def _fill_compact(self, meta, e):
        meta.btype = list(e.block_type)
        meta.bsz = list(e.block_sz)
        meta.wr_cntr = e.wr_cntr
        promoted = PageType.PROMOTED in e.block_type
        dirty = promoted and e.ptr_chunk[0] == NIL_LOCAL
        if promoted:
            mpa = e.ptr_last << 12
            meta.pchunk = self.layout.pchunk_index(mpa)
        if not dirty and any(t != PageType.ZERO for t in e.block_type):
            count = e.num_chunks + 1
            meta.sub_region = e.sub_region
            ids = list(e.ptr_chunk[:min(count, 7)])
            if count == 8:
                ids.append(e.ptr_last)
            meta.chunk_ids = ids

    def _fill_wide(self, meta, btype, bsz, nraw, ptrs):
        meta.btype = list(btype)
        meta.bsz = list(bsz)
        promoted = PageType.PROMOTED in btype
        dirty = promoted and ptrs[0] == NIL_FULL
        if promoted:
            mpa = ptrs[7] << 12
            meta.pchunk = self.layout.pchunk_index(mpa)
        if not dirty and any(t != PageType.ZERO for t in btype):
            count = nraw + 1
            if promoted and count > 7:
                raise ValueError("promoted page cannot retain eight shadows")
            lay = self.layout
            first_mpa = ptrs[0] << 9
            sid = (first_mpa - lay.compressed_base) // lay.sub_region_size
            meta.sub_region = sid
            meta.chunk_ids = [
                lay.chunk_index(p << 9, sid) for p in ptrs[:count]
            ]

    # -- snapshots -------------------------------------------------------------

    def encode_bytes(self, meta):
        entry = self.to_entry(meta)
        if self.fmt == "compact":
            return encode_compact(entry)
        if self.fmt == "colocated":
            return encode_colocated(entry).to_bytes(36, "little")
        return encode_naive(entry)

    def decode_bytes(self, raw):
        if self.fmt == "compact":
            return decode_compact(raw)
        if self.fmt == "colocated":
            return decode_colocated(int.from_bytes(raw, "little"))
        return decode_naive(raw)

    def save_snapshot(self, path):
        nbytes = _FMT_BYTES[self.fmt]
        with open(path, "wb") as fp:
            fp.write(SNAP_MAGIC)
            fp.write(struct.pack("<BxxxxxxxQ", _FMT_IDS[self.fmt], len(self.entries)))
            for ospn in sorted(self.entries):
                raw = self.encode_bytes(self.entries[ospn])
                assert len(raw) == nbytes
                fp.write(struct.pack("<Q", ospn))
                fp.write(raw)

    @staticmethod
    def load_snapshot(path, layout_for=None):
        """Yields (ospn, entry) decoded with the snapshot's own format."""
        with open(path, "rb") as fp:
            magic = fp.read(8)
            if magic != SNAP_MAGIC:
                raise ValueError("not a metadata snapshot")
            fmt_id, count = struct.unpack("<BxxxxxxxQ", fp.read(16))
            fmt = {v: k for k, v in _FMT_IDS.items()}[fmt_id]
            nbytes = _FMT_BYTES[fmt]
            out = []
            for _ in range(count):
                (ospn,) = struct.unpack("<Q", fp.read(8))
                raw = fp.read(nbytes)
                if fmt == "compact":
                    out.append((ospn, decode_compact(raw)))
                elif fmt == "colocated":
                    out.append((ospn, decode_colocated(int.from_bytes(raw, "little"))))
                else:
                    out.append((ospn, decode_naive(raw)))
            return fmt, out
