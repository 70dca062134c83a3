"""Set-associative LRU cache of metadata lines with an eviction callback.

The cache holds 64B metadata lines (two 32B entries in the compact format).
It tracks residency and dirtiness only; entry contents stay authoritative in
the engine's metadata store. The demotion engine probes residency without
refreshing LRU order, so scanning never pollutes recency state.
"""

from collections import OrderedDict


class MetadataCache:
    def __init__(self, layout, capacity=96 * 1024, ways=16, hit_cycles=4):
        self.n_sets = capacity // (64 * ways)
        if self.n_sets < 1:
            raise ValueError("cache smaller than one set")
        self.ways = ways
        self.hit_cycles = hit_cycles
        self.base = layout.metadata_base
        self.sets = [OrderedDict() for _ in range(self.n_sets)]
        self.hits = 0
        self.misses = 0
        self.evictions = 0
        self.probes = 0
        self.lazy_updates = 0      # bumped by the engine's eviction hook
        self._seq = 0
        self._age_count = 0
        self._age_sum = 0
        self._age_max = 0
        self._age_sample = []      # every 16th eviction age, deterministic

    def lookup(self, line_mpa):
        """Returns (hit, evicted) where evicted is None or (line_mpa, dirty).

        A miss allocates the line (write-allocate) and reports the LRU
        victim, for which the caller fires the lazy-update eviction hook.
        """
        s = self.sets[((line_mpa - self.base) >> 6) % self.n_sets]
        self._seq += 1
        if line_mpa in s:
            self.hits += 1
            s.move_to_end(line_mpa)
            return True, None
        self.misses += 1
        evicted = None
        if len(s) >= self.ways:
            victim, (dirty, born) = s.popitem(last=False)
            self.evictions += 1
            self._record_age(self._seq - born)
            evicted = (victim, dirty)
        s[line_mpa] = (False, self._seq)
        return False, evicted

    def mark_dirty(self, line_mpa):
        s = self.sets[((line_mpa - self.base) >> 6) % self.n_sets]
        if line_mpa in s:
            dirty, born = s[line_mpa]
            if not dirty:
                s[line_mpa] = (True, born)

    def probe(self, line_mpa):
        """Non-intrusive presence test; never reorders LRU state."""
        self.probes += 1
        return line_mpa in self.sets[((line_mpa - self.base) >> 6) % self.n_sets]

    def _record_age(self, age):
        self._age_count += 1
        self._age_sum += age
        if age > self._age_max:
            self._age_max = age
        if self._age_count % 16 == 1:
            self._age_sample.append(age)

    def stats(self):
        sample = sorted(self._age_sample)
        mid = sample[len(sample) // 2] if sample else 0
        p99 = sample[min(len(sample) - 1, int(len(sample) * 0.99))] if sample else 0
        return {
            "hits": self.hits,
            "misses": self.misses,
            "evictions": self.evictions,
            "probes": self.probes,
            "lazy_update_writes": self.lazy_updates,
            "eviction_age_lookups": {
                "mean": self._age_sum / self._age_count if self._age_count else 0,
                "p50": mid,
                "p99": p99,
                "max": self._age_max,
            },
        }
