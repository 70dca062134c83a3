import random

import pytest

from cmxsim.freelist import AllocatorPanic, CapacityExhausted, ChunkAllocator
from cmxsim.layout import DeviceLayout
from cmxsim.telemetry import Cat
from conftest import small_layout


class SubmitSpy:
    def __init__(self):
        self.calls = []

    def __call__(self, mpa, write, cat, t):
        self.calls.append((mpa, write, cat))
        return t + 1.0


def make_alloc(layout=None, threshold=64):
    layout = layout or small_layout()
    spy = SubmitSpy()
    return ChunkAllocator(layout, spy, threshold), spy, layout


def test_fresh_sub_region_is_index_ordered():
    alloc, spy, layout = make_alloc()
    sid, idxs, t = alloc.alloc_cchunks(4, 0.0)
    assert sid == 0
    assert idxs == [0, 1, 2, 3]
    sid2, idxs2, _ = alloc.alloc_cchunks(2, t)
    assert (sid2, idxs2) == (0, [4, 5])


def test_alloc_traffic_reads_and_free_writes():
    alloc, spy, layout = make_alloc()
    _, idxs, _ = alloc.alloc_cchunks(3, 0.0)
    assert [c for c in spy.calls if c[2] == Cat.ALLOC and not c[1]] == spy.calls
    assert len(spy.calls) == 3
    spy.calls.clear()
    alloc.free_cchunks(0, idxs, 0.0)
    assert len(spy.calls) == 3
    assert all(write for _, write, _ in spy.calls)


def test_lifo_reuse():
    alloc, _, _ = make_alloc()
    sid, idxs, t = alloc.alloc_cchunks(1, 0.0)
    alloc.free_cchunks(sid, idxs, t)
    sid2, idxs2, _ = alloc.alloc_cchunks(1, t)
    assert (sid2, idxs2) == (sid, idxs)


def test_incompressible_page_gets_eight_from_one_sub_region():
    alloc, _, _ = make_alloc()
    sid, idxs, _ = alloc.alloc_cchunks(8, 0.0)
    assert len(idxs) == 8
    assert len(set(idxs)) == 8


def test_failover_to_next_sub_region_and_exhaustion():
    # 2-chunk toy sub-regions: 1024B each, two of them.
    layout = DeviceLayout(
        physical_capacity=1 << 24,
        sub_region_size=1024,
        compressed_size=2048,
        promoted_size=4096,
        advertised_capacity=8192,
        metadata_base=0, activity_base=4096,
        compressed_base=8192, promoted_base=16384,
    )
    alloc, _, _ = make_alloc(layout)
    assert alloc.alloc_cchunks(1, 0.0)[0] == 0
    assert alloc.alloc_cchunks(1, 0.0)[0] == 0
    assert alloc.alloc_cchunks(1, 0.0)[0] == 1   # third call fails over
    assert alloc.alloc_cchunks(1, 0.0)[0] == 1
    with pytest.raises(CapacityExhausted):
        alloc.alloc_cchunks(1, 0.0)
    assert alloc.exhaustion_events == 1


def test_lowest_index_sub_region_with_room_wins():
    layout = DeviceLayout(
        physical_capacity=1 << 24,
        sub_region_size=1024,
        compressed_size=4096,
        promoted_size=4096,
        advertised_capacity=8192,
        metadata_base=0, activity_base=4096,
        compressed_base=8192, promoted_base=16384,
    )
    alloc, _, _ = make_alloc(layout)
    alloc.alloc_cchunks(1, 0.0)                  # sub 0 has 1 free now
    assert alloc.alloc_cchunks(2, 0.0)[0] == 1   # needs 2: skips sub 0
    assert alloc.alloc_cchunks(1, 0.0)[0] == 0   # single still fits sub 0


def test_pchunk_count_and_signal():
    alloc, spy, layout = make_alloc(threshold=64)
    assert alloc.free_pchunks == layout.promoted_pchunks == 1024
    t = 0.0
    signals = []
    for _ in range(1024):
        idx, t, sig = alloc.alloc_pchunk(t)
        signals.append(sig)
    # signal raised exactly when free count drops below the threshold
    assert signals.index(True) == 1024 - 64
    assert all(signals[1024 - 64:])
    idx, _, sig = alloc.alloc_pchunk(t)
    assert idx is None and sig


def test_default_promoted_region_pchunk_count():
    lay = DeviceLayout()   # 512MB promoted region
    alloc = ChunkAllocator(lay, lambda *a: 0.0)
    assert alloc.free_pchunks == 131072


def test_pchunk_lifo():
    alloc, _, _ = make_alloc()
    i1, t, _ = alloc.alloc_pchunk(0.0)
    t = alloc.free_pchunk(i1, t)
    i2, _, _ = alloc.alloc_pchunk(t)
    assert i2 == i1


def test_double_free_panics():
    alloc, _, _ = make_alloc()
    sid, idxs, t = alloc.alloc_cchunks(1, 0.0)
    alloc.free_cchunks(sid, idxs, t)
    with pytest.raises(AllocatorPanic):
        alloc.free_cchunks(sid, idxs, t)
    idx, t, _ = alloc.alloc_pchunk(t)
    alloc.free_pchunk(idx, t)
    with pytest.raises(AllocatorPanic):
        alloc.free_pchunk(idx, t)


def test_conservation_under_fuzzing():
    alloc, _, layout = make_alloc()
    rng = random.Random(17)
    live = []
    total = layout.n_sub_regions * layout.chunks_per_sub_region
    for _ in range(3000):
        if live and rng.random() < 0.45:
            sid, idxs = live.pop(rng.randrange(len(live)))
            alloc.free_cchunks(sid, idxs, 0.0)
        else:
            n = rng.randrange(1, 9)
            sid, idxs, _ = alloc.alloc_cchunks(n, 0.0)
            live.append((sid, idxs))
        alloc.check_conservation()
    allocated = sum(len(i) for _, i in live)
    assert sum(alloc.free_counts()) + allocated == total
