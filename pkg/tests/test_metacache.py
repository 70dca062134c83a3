from cmxsim.metacache import MetadataCache
from conftest import small_layout


def make_cache(capacity=96 * 1024, ways=16):
    layout = small_layout()
    return MetadataCache(layout, capacity, ways), layout


def test_geometry():
    cache, _ = make_cache()
    assert cache.n_sets == 96


def test_hit_after_miss_and_pairing():
    cache, layout = make_cache()
    line = layout.metadata_lines(0)[0]
    hit, evicted = cache.lookup(line)
    assert not hit and evicted is None
    # second entry of the pair lives in the same line
    assert layout.metadata_lines(1)[0] == line
    hit, _ = cache.lookup(layout.metadata_lines(1)[0])
    assert hit
    assert (cache.hits, cache.misses) == (1, 1)


def test_lru_eviction_order():
    cache, layout = make_cache(capacity=64 * 4, ways=4)   # one set, 4 ways
    assert cache.n_sets == 1
    lines = [layout.metadata_base + i * 64 for i in range(5)]
    for ln in lines[:4]:
        cache.lookup(ln)
    cache.lookup(lines[0])             # refresh line 0
    hit, evicted = cache.lookup(lines[4])
    assert not hit
    assert evicted == (lines[1], False)   # LRU victim, clean


def test_dirty_writeback_flag():
    cache, layout = make_cache(capacity=64 * 2, ways=2)
    a, b, c = (layout.metadata_base + i * 64 for i in range(3))
    cache.lookup(a)
    cache.mark_dirty(a)
    cache.lookup(b)
    _, evicted = cache.lookup(c)
    assert evicted == (a, True)


def test_probe_does_not_refresh_lru():
    # identical access streams, one with probes interleaved, must evict
    # identically: probing never changes later hit/miss outcomes
    def run(with_probes):
        cache, layout = make_cache(capacity=64 * 4, ways=4)
        lines = [layout.metadata_base + i * 64 for i in range(6)]
        outcomes = []
        for i, ln in enumerate(lines):
            if with_probes:
                for p in lines:
                    cache.probe(p)
            hit, _ = cache.lookup(ln)
            outcomes.append(hit)
        for ln in lines:
            hit, _ = cache.lookup(ln)
            outcomes.append(hit)
        return outcomes

    assert run(False) == run(True)


def test_probe_presence():
    cache, layout = make_cache()
    line = layout.metadata_base
    assert not cache.probe(line)
    cache.lookup(line)
    assert cache.probe(line)
    assert cache.probes == 2


def test_linear_scan_hit_rate_converges_to_half():
    # scanning distinct pages two-entries-per-line: each line missed once,
    # hit once, regardless of capacity pressure
    cache, layout = make_cache()
    n_pages = 4 * (96 * 1024 // 32)      # 4x the cache's entry capacity
    for ospn in range(n_pages):
        cache.lookup(layout.metadata_base + (ospn >> 1 << 6))
    rate = cache.hits / (cache.hits + cache.misses)
    assert abs(rate - 0.5) < 0.01


def test_eviction_age_telemetry():
    cache, layout = make_cache(capacity=64 * 2, ways=2)
    for i in range(40):
        cache.lookup(layout.metadata_base + i * 64)
    stats = cache.stats()
    ages = stats["eviction_age_lookups"]
    assert stats["evictions"] == 38
    assert ages["max"] >= ages["p50"] > 0
