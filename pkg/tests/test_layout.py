import random

import pytest

from cmxsim.layout import (
    AddressFault,
    DeviceLayout,
    EncodingError,
    Region,
)
from conftest import small_layout


def test_metadata_entry_addresses(layout):
    base = layout.metadata_base
    assert layout.metadata_mpa(0) == base
    assert layout.metadata_mpa(1) == base + 32
    # entries 0 and 1 share one 64B line; entry 2 starts the next line
    assert layout.metadata_mpa(1) >> 6 == layout.metadata_mpa(0) >> 6
    assert layout.metadata_mpa(2) == base + 64
    assert layout.metadata_mpa(2) >> 6 == (layout.metadata_mpa(0) >> 6) + 1


def test_metadata_mpa_out_of_range(layout):
    with pytest.raises(AddressFault):
        layout.metadata_mpa(layout.advertised_pages)


def test_chunk_index_basics(layout):
    base = layout.sub_region_base(0)
    assert layout.chunk_index(base, 0) == 0
    assert layout.chunk_index(base + 512, 0) == 1
    with pytest.raises(EncodingError):
        layout.chunk_index(base + 100, 0)          # misaligned
    with pytest.raises(EncodingError):
        layout.chunk_index(base, 1)                # wrong sub-region


def test_chunk_index_max_for_full_sub_region():
    # A maximal 128GB sub-region exercises the full 28-bit index range.
    lay = DeviceLayout()
    base = lay.sub_region_base(0)
    top = base + (1 << 37) - 512
    assert lay.chunk_index(top, 0) == (1 << 28) - 1


def test_pchunk_pointer():
    lay = DeviceLayout()
    assert lay.pchunk_pointer(0) == 0
    assert lay.pchunk_pointer(4096) == 1
    assert lay.pchunk_pointer((1 << 41) - 4096) == (1 << 29) - 1
    with pytest.raises(EncodingError):
        lay.pchunk_pointer(100)


def test_pointer_round_trips(layout):
    rng = random.Random(1)
    for _ in range(2000):
        sid = rng.randrange(layout.n_sub_regions)
        idx = rng.randrange(layout.chunks_per_sub_region)
        mpa = layout.chunk_mpa(sid, idx)
        assert layout.chunk_index(mpa, sid) == idx
        pidx = rng.randrange(layout.promoted_pchunks)
        mpa = layout.pchunk_index_mpa(pidx)
        assert layout.pchunk_mpa(layout.pchunk_pointer(mpa)) == mpa
        assert layout.pchunk_index(mpa) == pidx


def test_region_membership(layout):
    assert layout.region_of(layout.metadata_base) == Region.METADATA
    assert layout.region_of(layout.activity_base) == Region.ACTIVITY
    assert layout.region_of(layout.compressed_base) == Region.COMPRESSED
    assert layout.region_of(layout.promoted_base) == Region.PROMOTED
    assert layout.region_of(layout.promoted_base + layout.promoted_size) == Region.OUTSIDE
    # every sampled mpa falls in exactly one region
    rng = random.Random(2)
    for _ in range(500):
        mpa = rng.randrange(layout.physical_capacity)
        hits = [
            r for r in (Region.METADATA, Region.ACTIVITY, Region.COMPRESSED,
                        Region.PROMOTED)
            if layout.region_of(mpa) == r
        ]
        assert len(hits) <= 1


def test_size_invariants(layout):
    assert layout.metadata_size == layout.advertised_pages * 32
    assert layout.activity_size >= layout.promoted_pchunks * 4
    for name in ("metadata", "activity", "compressed", "promoted"):
        assert getattr(layout, name + "_base") % 4096 == 0
    assert layout.advertised_capacity == 2 * layout.compressed_size


def test_geometry_validation():
    with pytest.raises(ValueError):
        small_layout(sub_region_size=(16 << 20) + 512)   # not a power of two
    with pytest.raises(ValueError):
        small_layout(compressed_size=(16 << 20) * 3 + 4096)  # not sub-region multiple
    with pytest.raises(ValueError):
        DeviceLayout(physical_capacity=1 << 42)


def test_metadata_lines_per_format():
    compact = small_layout("compact")
    naive = small_layout("naive")
    coloc = small_layout("colocated")
    assert len(compact.metadata_lines(12345)) == 1
    assert len(naive.metadata_lines(12345)) == 1
    # bit-packed 283b entries cross a line boundary for roughly half the pages
    crossing = sum(len(coloc.metadata_lines(e)) == 2 for e in range(10000))
    assert 0.4 < crossing / 10000 < 0.6
    # naive slots are 64B apart, compact lines cover two entries
    assert naive.metadata_lines(5)[0] - naive.metadata_lines(4)[0] == 64
    assert compact.metadata_lines(5)[0] == compact.metadata_lines(4)[0]


@pytest.mark.parametrize("fmt", ["naive", "colocated", "compact"])
def test_line_ospn_attribution(fmt):
    lay = small_layout(fmt)
    for ospn in range(3000):
        first = lay.metadata_lines(ospn)[0]
        assert ospn in lay.metadata_line_ospns(first)
    # attribution is unique: each entry appears for exactly one line
    seen = {}
    for line_no in range(2000):
        line = lay.metadata_base + line_no * 64
        for e in lay.metadata_line_ospns(line):
            assert e not in seen, f"entry {e} attributed twice"
            seen[e] = line
