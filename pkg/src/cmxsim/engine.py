"""Request pipeline: translation, promotion, shadowed demotion, write flows.

The engine processes one event at a time (a foreground request or one
background demotion cycle) and threads a nanosecond timestamp through every
channel access it emits. Responses return at decompress-complete; the writes
that install the promoted copy continue in the background and never extend
the response path.

Data handling comes in two flavors. With a payload backend the engine keeps
real bytes for every allocated C-chunk and P-chunk, so reads reproduce
written data bit-exactly through compression and promotion. With the
size-oracle backend (annotation-driven traces) only sizes exist: traffic
and latency are modeled, data paths return nothing.
"""

from .compress import (
    chunks_for_span,
    classify_colocated,
    classify_oracle_colocated,
    classify_oracle_page4k,
    classify_page4k,
    pack_page4k,
    pack_stream,
    stream_slots,
)
from .freelist import ChunkAllocator
from .layout import BLOCK_SIZE, CHUNK_SIZE, LINE_SIZE, PAGE_SIZE
from .metacache import MetadataCache
from .metaformat import WR_CNTR_THRESHOLD, PageType
from .metastore import MetadataStore, PageMeta
from .activity import ActivityTracker
from .telemetry import Cat

_ZERO_LINE = bytes(LINE_SIZE)

Z = PageType.ZERO
C = PageType.COMPRESSED
P = PageType.PROMOTED
I = PageType.INCOMPRESSIBLE


class Engine:
    def __init__(self, layout, channel, telemetry, latency_model, codec,
                 colocated=True, shadowed=True, demotion_threshold=256,
                 cache_kb=96, cache_ways=16, cache_hit_cycles=4, seed=0):
        self.layout = layout
        self.channel = channel
        self.telem = telemetry
        self.lat = latency_model
        self.codec = codec
        self.payload_mode = codec is not None
        self.colocated = colocated
        self.shadowed = shadowed
        if colocated and not shadowed:
            raise ValueError("per-block promotion requires shadowed promotion")
        self.store = MetadataStore(layout)
        self.cache = MetadataCache(layout, cache_kb * 1024, cache_ways,
                                   cache_hit_cycles)
        self.alloc = ChunkAllocator(layout, channel.submit, demotion_threshold)
        self.activity = ActivityTracker(layout, channel.submit, seed)
        self.hit_ns = channel.cycles_ns(cache_hit_cycles)
        self.annotations = {}      # oracle mode: sticky page compressed size
        self.chunk_data = {}       # (sub_region, index) -> bytes(512)
        self.pchunk_data = {}      # pchunk index -> bytearray(4096)
        self._cbase = layout.compressed_base
        self._ssize = layout.sub_region_size
        # Line addressing is on every request's path; specialize per format.
        base = layout.metadata_base
        fmt = layout.meta_format
        if fmt == "compact":
            self._line_of = lambda ospn: base + ((ospn >> 1) << 6)
            self._ospns_of_line = lambda line: (
                (line - base) >> 6 << 1, ((line - base) >> 6 << 1) + 1)
        elif fmt == "naive":
            self._line_of = lambda ospn: base + (ospn << 6)
            self._ospns_of_line = lambda line: ((line - base) >> 6,)
        else:
            self._line_of = lambda ospn: base + (ospn * 283 >> 9 << 6)

            def _ospns_of_line(line):
                line_no = (line - base) >> 6
                lo = (line_no * 512 + 282) // 283
                return [e for e in (lo, lo + 1) if e * 283 >> 9 == line_no]

            self._ospns_of_line = _ospns_of_line
        self._meta_spans = fmt == "colocated"
        # The demotion scan probes residency for every candidate; build a
        # single-frame closure over the cache internals.
        cache = self.cache
        sets = cache.sets
        nsets = cache.n_sets
        if fmt == "compact":
            def _probe(ospn):
                cache.probes += 1
                ln = ospn >> 1
                return (base + (ln << 6)) in sets[ln % nsets]
        elif fmt == "naive":
            def _probe(ospn):
                cache.probes += 1
                return (base + (ospn << 6)) in sets[ospn % nsets]
        else:
            def _probe(ospn):
                cache.probes += 1
                ln = ospn * 283 >> 9
                return (base + (ln << 6)) in sets[ln % nsets]
        self._probe = _probe

    # -- metadata plumbing -----------------------------------------------------

    def _fetch_line(self, line, t, seen):
        hit, evicted = self.cache.lookup(line)
        if hit:
            return t
        if evicted is not None:
            self._evict_hook(evicted[0], evicted[1], t, seen)
        return self.channel.submit(line, False, Cat.META, t)

    def _fetch_meta(self, ospn, t, seen):
        done = self._fetch_line(self._line_of(ospn), t, seen)
        if self._meta_spans:
            last = self.layout.metadata_base + ((ospn * 283 + 282) >> 9 << 6)
            if last != self._line_of(ospn):
                c = self._fetch_line(last, t, seen)
                if c > done:
                    done = c
        return done + self.hit_ns

    def _evict_hook(self, line, dirty, t, seen):
        if dirty:
            self.channel.submit(line, True, Cat.META, t)
        entries = self.store.entries
        for ospn in self._ospns_of_line(line):
            m = entries.get(ospn)
            if m is not None and m.pchunk is not None:
                self.activity.lazy_update(m.pchunk, t, seen)
                self.cache.lazy_updates += 1

    def _mark_dirty(self, ospn):
        self.cache.mark_dirty(self._line_of(ospn))
        if self._meta_spans:
            last = self.layout.metadata_base + ((ospn * 283 + 282) >> 9 << 6)
            if last != self._line_of(ospn):
                self.cache.mark_dirty(last)

    # -- first touch -------------------------------------------------------------

    def _lookup_page(self, ospn, ann, t, seen):
        meta = self.store.get(ospn)
        if meta is not None:
            return meta, t
        meta = self.store.ensure(ospn)
        if not self.payload_mode and ann:
            csize = 0 if ann == "Z" else max(0, min(PAGE_SIZE, int(ann)))
            self.annotations[ospn] = csize
            if csize:
                t = self._materialize_oracle(meta, ospn, csize, t)
        return meta, t

    def _materialize_oracle(self, meta, ospn, csize, t):
        if self.colocated:
            lay = classify_oracle_colocated(csize)
            meta.btype = list(lay.block_type)
            meta.bsz = list(lay.block_sz)
            nchunks = lay.chunk_count
        else:
            ptype, _, nchunks, _ = classify_oracle_page4k(csize)
            meta.btype = [ptype] * 4
        if nchunks:
            sid, ids, t = self.alloc.alloc_cchunks(nchunks, t)
            meta.sub_region = sid
            meta.chunk_ids = ids
        self._mark_dirty(ospn)
        return t

    # -- data plane helpers --------------------------------------------------------

    def _chunk_image(self, meta, ordinal):
        return self.chunk_data[(meta.sub_region, meta.chunk_ids[ordinal])]

    def _stream_bytes(self, meta, start, nbytes):
        out = bytearray()
        for o in chunks_for_span(start, nbytes):
            out += self._chunk_image(meta, o)
        lo = start - (start >> 9 << 9)
        return bytes(out[lo:lo + nbytes])

    def _store_stream(self, meta, images):
        for i, img in enumerate(images):
            self.chunk_data[(meta.sub_region, meta.chunk_ids[i])] = img

    def _drop_stream_data(self, meta):
        for idx in meta.chunk_ids:
            self.chunk_data.pop((meta.sub_region, idx), None)

    def _patch_chunk(self, meta, ordinal, offset, payload):
        key = (meta.sub_region, meta.chunk_ids[ordinal])
        img = bytearray(self.chunk_data[key])
        img[offset:offset + len(payload)] = payload
        self.chunk_data[key] = bytes(img)

    def _decompress_block(self, meta, start, nbytes):
        self.telem.decompress_events += 1
        if not self.payload_mode:
            return None
        return self.codec.decompress(self._stream_bytes(meta, start, nbytes),
                                     BLOCK_SIZE)

    # -- promotion ---------------------------------------------------------------

    def _ensure_pchunk(self, meta, ospn, t, seen):
        while True:
            p, t, _ = self.alloc.alloc_pchunk(t)
            if p is not None:
                break
            # Free list empty: the promotion stalls behind one demotion.
            t = self.run_demotion_cycle(t)
        meta.pchunk = p
        if self.payload_mode:
            self.pchunk_data[p] = bytearray(PAGE_SIZE)
        return self.activity.on_promote(p, ospn, t, seen)

    def _pchunk_mpa(self, meta):
        return self.layout.promoted_base + meta.pchunk * PAGE_SIZE

    def _install_block(self, meta, bi, data, t):
        dst = self._pchunk_mpa(meta) + bi * BLOCK_SIZE
        done = self.channel.submit_burst(dst, 16, True, Cat.PROMO, t)
        if data is not None:
            self.pchunk_data[meta.pchunk][bi * BLOCK_SIZE:(bi + 1) * BLOCK_SIZE] = data
        return done

    def _block_span(self, meta, bi):
        """Stream position of block bi; clean-promoted slots stay occupied."""
        btype = meta.btype
        bsz = meta.bsz
        off = 0
        for j in range(bi):
            if btype[j] != Z:
                off += (bsz[j] + 1) << 7
        return off, 0 if btype[bi] == Z else (bsz[bi] + 1) << 7

    def _promote_block(self, meta, ospn, bi, t, seen):
        """Fetch, decompress and respond with one 1KB block, then install it
        in the P-chunk. Returns (response_time, block_bytes)."""
        start, nbytes = self._block_span(meta, bi)
        sub_base = self._cbase + meta.sub_region * self._ssize
        ids = meta.chunk_ids
        done = self.channel.submit_scatter(
            [sub_base + (ids[o] << 9) for o in chunks_for_span(start, nbytes)],
            8, False, Cat.PROMO, t)
        data = self._decompress_block(meta, start, nbytes)
        t_resp = done + self.channel.cycles_ns(self.lat.decompress_cycles(BLOCK_SIZE))
        tb = t_resp
        if meta.pchunk is None:
            tb = self._ensure_pchunk(meta, ospn, tb, seen)
        self._install_block(meta, bi, data, tb)
        meta.btype[bi] = P
        self._mark_dirty(ospn)
        return t_resp, data

    def _promote_page4k(self, meta, ospn, t, seen):
        """Whole-page promotion. Returns (response_time, page_bytes)."""
        sub_base = self._cbase + meta.sub_region * self._ssize
        done = self.channel.submit_scatter(
            [sub_base + (idx << 9) for idx in meta.chunk_ids],
            8, False, Cat.PROMO, t)
        self.telem.decompress_events += 1
        page = None
        if self.payload_mode:
            stream = b"".join(self._chunk_image(meta, o)
                              for o in range(len(meta.chunk_ids)))
            page = self.codec.decompress(stream, PAGE_SIZE)
        t_resp = done + self.channel.cycles_ns(self.lat.decompress_cycles(PAGE_SIZE))
        tb = t_resp
        if meta.pchunk is None:
            tb = self._ensure_pchunk(meta, ospn, tb, seen)
        tb = self.channel.submit_burst(self._pchunk_mpa(meta), 64, True, Cat.PROMO, tb)
        if page is not None:
            self.pchunk_data[meta.pchunk][:] = page
        meta.btype = [P] * 4
        if not self.shadowed:
            self._drop_stream_data(meta)
            self.alloc.free_cchunks(meta.sub_region, meta.chunk_ids, tb)
            meta.chunk_ids = []
        self._mark_dirty(ospn)
        return t_resp, page

    def _free_shadows(self, meta, ospn, t):
        self._drop_stream_data(meta)
        t = self.alloc.free_cchunks(meta.sub_region, meta.chunk_ids, t)
        meta.chunk_ids = []
        for i in range(4):
            if meta.btype[i] == P:
                meta.bsz[i] = 0
        self._mark_dirty(ospn)
        return t

    def _dirty_transition(self, meta, ospn, t, seen):
        """First dirtying write: every stream-resident block moves into the
        P-chunk, then all shadow chunks are freed."""
        if meta.pchunk is None:
            t = self._ensure_pchunk(meta, ospn, t, seen)
        if not meta.chunk_ids:
            return t
        slots = stream_slots(meta.btype, meta.bsz, include_promoted=True)
        for bi in range(4):
            bt = meta.btype[bi]
            if bt not in (C, I):
                continue
            start, nbytes = slots[bi]
            sub_base = self._cbase + meta.sub_region * self._ssize
            t = self.channel.submit_scatter(
                [sub_base + (meta.chunk_ids[o] << 9)
                 for o in chunks_for_span(start, nbytes)],
                8, False, Cat.PROMO, t)
            if bt == C:
                data = self._decompress_block(meta, start, nbytes)
                t += self.channel.cycles_ns(self.lat.decompress_cycles(BLOCK_SIZE))
            else:
                data = self._stream_bytes(meta, start, nbytes) \
                    if self.payload_mode else None
            t = self._install_block(meta, bi, data, t)
            meta.btype[bi] = P
        return self._free_shadows(meta, ospn, t)

    # -- reads -----------------------------------------------------------------

    def handle_read(self, ospa, ann, t0):
        """Returns (internal completion time, 64B data or None)."""
        seen = {}
        ospn = ospa >> 12
        offset = ospa & (PAGE_SIZE - 1)
        t = self._fetch_meta(ospn, t0, seen)
        meta, t = self._lookup_page(ospn, ann, t, seen)
        bt = meta.btype[offset >> 10] if self.colocated else meta.btype[0]
        if bt == Z:
            self.telem.zero_served += 1
            return t, _ZERO_LINE
        if bt == P:
            mpa = self._pchunk_mpa(meta) + offset
            done = self.channel.submit(mpa, False, Cat.EXT, t)
            data = None
            if self.payload_mode:
                data = bytes(self.pchunk_data[meta.pchunk][offset:offset + 64])
            return done, data
        if bt == I:
            return self._read_raw_line(meta, offset, t)
        if self.colocated:
            t_resp, block = self._promote_block(meta, ospn, offset >> 10, t, seen)
            lo = offset & (BLOCK_SIZE - 1)
            return t_resp, block[lo:lo + 64] if block is not None else None
        t_resp, page = self._promote_page4k(meta, ospn, t, seen)
        return t_resp, page[offset:offset + 64] if page is not None else None

    def _raw_position(self, meta, offset):
        """Stream position of a 64B line inside a raw (incompressible) block."""
        if self.colocated:
            start, _ = self._block_span(meta, offset >> 10)
            pos = start + (offset & (BLOCK_SIZE - 1))
        else:
            pos = offset
        return pos >> 9, pos & (CHUNK_SIZE - 1)

    def _read_raw_line(self, meta, offset, t):
        ordinal, within = self._raw_position(meta, offset)
        mpa = self.layout.chunk_mpa(meta.sub_region, meta.chunk_ids[ordinal]) + within
        done = self.channel.submit(mpa, False, Cat.EXT, t)
        data = None
        if self.payload_mode:
            img = self._chunk_image(meta, ordinal)
            data = img[within:within + 64]
        return done, data

    # -- writes -----------------------------------------------------------------

    def handle_write(self, ospa, ann, payload, t0):
        seen = {}
        ospn = ospa >> 12
        offset = ospa & (PAGE_SIZE - 1)
        t = self._fetch_meta(ospn, t0, seen)
        meta, t = self._lookup_page(ospn, ann, t, seen)
        bi = offset >> 10 if self.colocated else 0
        bt = meta.btype[bi]

        if bt == Z:
            if self._payload_is_zero(meta, ospn, payload):
                self.telem.zero_served += 1
                return t
            return self._write_into_zero(meta, ospn, bi, offset, payload, t, seen)
        if bt == I:
            return self._write_raw(meta, ospn, offset, payload, t, seen)
        if bt == C:
            if self.colocated:
                t = self._dirty_transition(meta, ospn, t, seen)
            else:
                t, _ = self._promote_page4k(meta, ospn, t, seen)
                if meta.chunk_ids:
                    t = self._free_shadows(meta, ospn, t)
            return self._write_promoted_line(meta, ospn, offset, payload, t)
        # promoted block
        if meta.chunk_ids:
            t = self._dirty_transition(meta, ospn, t, seen) if self.colocated \
                else self._free_shadows(meta, ospn, t)
        return self._write_promoted_line(meta, ospn, offset, payload, t)

    def _payload_is_zero(self, meta, ospn, payload):
        if self.payload_mode:
            return payload == _ZERO_LINE
        return self.annotations.get(ospn, 0) == 0

    def _write_promoted_line(self, meta, ospn, offset, payload, t):
        mpa = self._pchunk_mpa(meta) + offset
        done = self.channel.submit(mpa, True, Cat.EXT, t)
        if self.payload_mode:
            self.pchunk_data[meta.pchunk][offset:offset + 64] = payload
        self._mark_dirty(ospn)
        return done

    def _write_into_zero(self, meta, ospn, bi, offset, payload, t, seen):
        """Promote-from-zero: zero-fill the block around the written line."""
        t = self._dirty_transition(meta, ospn, t, seen)
        if not self.colocated:
            blocks = range(4)
        else:
            blocks = (bi,)
        done = t
        target_line = offset >> 6
        for b in blocks:
            for ln in range(b * 16, (b + 1) * 16):
                if ln == target_line:
                    continue
                c = self.channel.submit(self._pchunk_mpa(meta) + ln * 64,
                                        True, Cat.PROMO, t)
                if c > done:
                    done = c
            meta.btype[b] = P
            meta.bsz[b] = 0
        c = self.channel.submit(self._pchunk_mpa(meta) + offset, True, Cat.EXT, t)
        if c > done:
            done = c
        if self.payload_mode:
            self.pchunk_data[meta.pchunk][offset:offset + 64] = payload
        self._mark_dirty(ospn)
        return done

    def _write_raw(self, meta, ospn, offset, payload, t, seen):
        """In-place update of an incompressible page/block plus wr_cntr."""
        ordinal, within = self._raw_position(meta, offset)
        mpa = self.layout.chunk_mpa(meta.sub_region, meta.chunk_ids[ordinal]) + within
        done = self.channel.submit(mpa, True, Cat.EXT, t)
        if self.payload_mode:
            self._patch_chunk(meta, ordinal, within, payload)
        meta.wr_cntr += 1
        if meta.wr_cntr >= WR_CNTR_THRESHOLD:
            if any(bt == P for bt in meta.btype):
                meta.wr_cntr = WR_CNTR_THRESHOLD - 1  # defer while shadowed
            else:
                meta.wr_cntr = 0
                done = self._recompress(meta, ospn, done, seen)
        self._mark_dirty(ospn)
        return done

    # -- recompression and demotion -------------------------------------------------

    def _classify_page(self, meta, ospn, page):
        """Fresh classification of full-page content (payload or annotation).
        Returns (btype, bsz, nchunks, payloads, compress_attempts)."""
        if self.payload_mode:
            if self.colocated:
                lay, payloads = classify_colocated(page, self.codec)
                attempts = sum(1 for t in lay.block_type if t != Z)
                return (list(lay.block_type), list(lay.block_sz),
                        lay.chunk_count, payloads, attempts)
            ptype, comp, nchunks, _ = classify_page4k(page, self.codec)
            payloads = pack_page4k(comp if comp is not None else b"", nchunks) \
                if nchunks else []
            return [ptype] * 4, [0] * 4, nchunks, payloads, (0 if ptype == Z else 1)
        csize = self.annotations.get(ospn, 0)
        if self.colocated:
            lay = classify_oracle_colocated(csize)
            attempts = sum(1 for t in lay.block_type if t != Z)
            return (list(lay.block_type), list(lay.block_sz),
                    lay.chunk_count, None, attempts)
        ptype, _, nchunks, _ = classify_oracle_page4k(csize)
        return [ptype] * 4, [0] * 4, nchunks, None, (0 if ptype == Z else 1)

    def _compress_latency(self, attempts):
        unit = PAGE_SIZE if not self.colocated else BLOCK_SIZE
        return self.channel.cycles_ns(self.lat.compress_cycles(unit)) * attempts

    def _rebuild_page(self, meta):
        """Current page content assembled from the stream (payload mode)."""
        page = bytearray(PAGE_SIZE)
        slots = stream_slots(meta.btype, meta.bsz, include_promoted=True)
        for bi in range(4):
            bt = meta.btype[bi]
            start, nbytes = slots[bi]
            if bt == C:
                page[bi * BLOCK_SIZE:(bi + 1) * BLOCK_SIZE] = \
                    self.codec.decompress(self._stream_bytes(meta, start, nbytes),
                                          BLOCK_SIZE)
            elif bt == I:
                page[bi * BLOCK_SIZE:(bi + 1) * BLOCK_SIZE] = \
                    self._stream_bytes(meta, start, nbytes)
        return bytes(page)

    def _recompress(self, meta, ospn, t, seen):
        """wr_cntr wrap: re-attempt compression of a raw page in place."""
        self.telem.recompressions += 1
        sub_base = self._cbase + meta.sub_region * self._ssize
        t = self.channel.submit_scatter(
            [sub_base + (idx << 9) for idx in meta.chunk_ids],
            8, False, Cat.DEMO, t)
        if self.payload_mode:
            if self.colocated:
                page = self._rebuild_page(meta)
            else:
                page = b"".join(self._chunk_image(meta, o)
                                for o in range(len(meta.chunk_ids)))[:PAGE_SIZE]
        else:
            page = None
        btype, bsz, nchunks, payloads, attempts = self._classify_page(meta, ospn, page)
        self.telem.compress_events += attempts
        t += self._compress_latency(attempts)
        unchanged = (btype == meta.btype and bsz == meta.bsz
                     and nchunks == len(meta.chunk_ids))
        # In-place raw updates keep images current only while every stream
        # block stays raw; any compressed block must be repacked.
        if unchanged and (not self.payload_mode
                          or all(bt in (Z, I) for bt in btype)):
            return t
        old_sub, old_ids = meta.sub_region, meta.chunk_ids
        self._drop_stream_data(meta)
        meta.chunk_ids = []
        meta.btype, meta.bsz = btype, bsz
        if nchunks:
            t = self._write_new_stream(meta, nchunks, payloads, t, Cat.DEMO)
        t = self.alloc.free_cchunks(old_sub, old_ids, t)
        self._mark_dirty(ospn)
        return t

    def _write_new_stream(self, meta, nchunks, payloads, t, cat):
        sid, ids, t = self.alloc.alloc_cchunks(nchunks, t)
        meta.sub_region = sid
        meta.chunk_ids = ids
        if self.payload_mode:
            if self.colocated:
                lay_images = pack_stream(
                    _LayoutView(meta.btype, meta.bsz, nchunks), payloads)
            else:
                lay_images = payloads
            self._store_stream(meta, lay_images)
        sub_base = self._cbase + sid * self._ssize
        return self.channel.submit_scatter(
            [sub_base + (idx << 9) for idx in ids], 8, True, cat, t)

    def run_demotion_cycle(self, t):
        """Select one victim and demote it; returns completion time."""
        seen = {}
        ospn, pidx, via_random, t = self.activity.select_victim(self._probe, t, seen)
        return self._demote(ospn, pidx, t, seen)

    def _demote(self, ospn, pidx, t, seen):
        t = self._fetch_meta(ospn, t, seen)
        meta = self.store.get(ospn)
        assert meta is not None and meta.pchunk == pidx
        if meta.chunk_ids:
            # Clean demotion: re-validate shadows by flipping types back.
            for i in range(4):
                if meta.btype[i] == P:
                    meta.btype[i] = C
            t = self.alloc.free_pchunk(pidx, t)
            t = self.activity.on_demote(pidx, t, seen)
            self.pchunk_data.pop(pidx, None)
            meta.pchunk = None
            self._mark_dirty(ospn)
            return t
        pbase = self._pchunk_mpa(meta)
        t = self.channel.submit_scatter(
            [pbase + bi * BLOCK_SIZE for bi in meta.promoted_blocks()],
            16, False, Cat.DEMO, t)
        page = bytes(self.pchunk_data[pidx]) if self.payload_mode else None
        btype, bsz, nchunks, payloads, attempts = self._classify_page(meta, ospn, page)
        self.telem.compress_events += attempts
        self.telem.demotion_compress_events += attempts
        t += self._compress_latency(attempts)
        meta.btype, meta.bsz = btype, bsz
        if nchunks:
            t = self._write_new_stream(meta, nchunks, payloads, t, Cat.DEMO)
        t = self.alloc.free_pchunk(pidx, t)
        t = self.activity.on_demote(pidx, t, seen)
        self.pchunk_data.pop(pidx, None)
        meta.pchunk = None
        self._mark_dirty(ospn)
        return t

    # -- accounting ------------------------------------------------------------------

    def allocated_ospa_bytes(self):
        return self.store.touched_nonzero_pages() * PAGE_SIZE

    def physical_bytes_in_use(self):
        return self.alloc.cchunk_bytes_in_use() + self.alloc.pchunk_bytes_in_use()


class _LayoutView:
    """Just enough of PackedPageLayout for pack_stream."""

    __slots__ = ("block_type", "block_sz", "chunk_count")

    def __init__(self, btype, bsz, chunk_count):
        self.block_type = btype
        self.block_sz = bsz
        self.chunk_count = chunk_count
