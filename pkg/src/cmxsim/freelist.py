"""Free-list management of 512B C-chunks (per sub-region) and 4KB P-chunks.

Free chunks form LIFO lists threaded through the chunks themselves: the
next pointer of a free chunk sits in its first bytes, so popping a chunk
costs one 64B read (to learn the new head) and pushing one costs one 64B
write (to store the old head). Head pointers live in registers and are
free. A fresh list hands out ascending indices; frees are reused LIFO,
which the watermark-plus-stack representation reproduces exactly while
staying sparse enough for terabyte regions.
"""

from .layout import PAGE_SIZE
from .metaformat import NIL_LOCAL
from .telemetry import Cat


class CapacityExhausted(Exception):
    """No single sub-region can satisfy a C-chunk allocation."""


class AllocatorPanic(AssertionError):
    """Free-list invariant broken (double free / foreign free)."""


class _SubRegion:
    __slots__ = ("total", "watermark", "recycled", "live")

    def __init__(self, total):
        self.total = total
        self.watermark = 0
        self.recycled = []
        self.live = set()

    @property
    def free(self):
        return self.total - len(self.live)

    def pop(self):
        idx = self.recycled.pop() if self.recycled else self._advance()
        self.live.add(idx)
        return idx

    def _advance(self):
        idx = self.watermark
        self.watermark += 1
        return idx

    def push(self, idx):
        if idx not in self.live:
            raise AllocatorPanic(f"chunk {idx} freed while not allocated")
        self.live.remove(idx)
        self.recycled.append(idx)


class ChunkAllocator:
    """Owns both chunk populations; every list operation emits timed,
    allocator-tagged channel traffic through the submit callback."""

    def __init__(self, layout, submit, demotion_threshold=256):
        self.layout = layout
        self.submit = submit
        self.demotion_threshold = demotion_threshold
        per_sub = layout.chunks_per_sub_region
        if per_sub >= NIL_LOCAL + 1:
            per_sub = NIL_LOCAL  # index 2^28-1 is the dirty-page sentinel
        self.subs = [_SubRegion(per_sub) for _ in range(layout.n_sub_regions)]
        self._cbase = layout.compressed_base
        self._ssize = layout.sub_region_size
        self.pchunks = _SubRegion(layout.promoted_pchunks)
        self.exhaustion_events = 0

    # -- C-chunks -----------------------------------------------------------

    def alloc_cchunks(self, n, t):
        """Pop n chunks from the lowest-index sub-region holding at least n.

        Returns (sub_region, indices, completion_time); raises
        CapacityExhausted (and counts it) when no sub-region qualifies,
        keeping the same-sub-region constraint intact.
        """
        if not 1 <= n <= 8:
            raise ValueError(f"chunk allocations are 1..8, got {n}")
        for sid, sub in enumerate(self.subs):
            if sub.free >= n:
                idxs = [sub.pop() for _ in range(n)]
                sub_base = self._cbase + sid * self._ssize
                for idx in idxs:
                    t = self.submit(sub_base + (idx << 9), False, Cat.ALLOC, t)
                return sid, idxs, t
        self.exhaustion_events += 1
        raise CapacityExhausted(f"no sub-region with {n} free chunks")

    def free_cchunks(self, sub_region, idxs, t):
        sub = self.subs[sub_region]
        sub_base = self._cbase + sub_region * self._ssize
        for idx in idxs:
            sub.push(idx)
            t = self.submit(sub_base + (idx << 9), True, Cat.ALLOC, t)
        return t

    # -- P-chunks -----------------------------------------------------------

    def alloc_pchunk(self, t):
        """Returns (index, completion, demote_signal) or (None, t, True) when
        the list is empty and the caller must stall behind a demotion."""
        if self.pchunks.free == 0:
            return None, t, True
        idx = self.pchunks.pop()
        t = self.submit(self.layout.pchunk_index_mpa(idx), False, Cat.ALLOC, t)
        return idx, t, self.pchunks.free < self.demotion_threshold

    def free_pchunk(self, idx, t):
        self.pchunks.push(idx)
        return self.submit(self.layout.pchunk_index_mpa(idx), True, Cat.ALLOC, t)

    @property
    def free_pchunks(self):
        return self.pchunks.free

    def demotion_needed(self):
        return self.pchunks.free < self.demotion_threshold

    # -- accounting -----------------------------------------------------------

    def cchunk_bytes_in_use(self):
        return 512 * sum(len(s.live) for s in self.subs)

    def pchunk_bytes_in_use(self):
        return PAGE_SIZE * len(self.pchunks.live)

    def free_counts(self):
        return [s.free for s in self.subs]

    def check_conservation(self):
        for sid, sub in enumerate(self.subs):
            if len(sub.live) + sub.free != sub.total:
                raise AllocatorPanic(f"sub-region {sid} lost chunks")
        if len(self.pchunks.live) + self.pchunks.free != self.pchunks.total:
            raise AllocatorPanic("promoted region lost P-chunks")
