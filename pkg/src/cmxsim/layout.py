"""Device address map: regions, chunk geometry, and shared address arithmetic.

The device presents a host-visible OSPA space and internally carves its
physical (MPA) space into four regions: translation metadata, page activity
entries, the compressed region (512B C-chunks grouped into sub-regions) and
the promoted region (4KB P-chunks). Physical memory is simulated sparsely,
so the default 2TB map runs at desk scale.
"""

from dataclasses import dataclass, field
from enum import Enum

PAGE_SIZE = 4096
CHUNK_SIZE = 512
BLOCK_SIZE = 1024
LINE_SIZE = 64

CHUNKS_PER_PAGE = PAGE_SIZE // CHUNK_SIZE    # 8
BLOCKS_PER_PAGE = PAGE_SIZE // BLOCK_SIZE    # 4
LINES_PER_PAGE = PAGE_SIZE // LINE_SIZE      # 64
LINES_PER_CHUNK = CHUNK_SIZE // LINE_SIZE    # 8
LINES_PER_BLOCK = BLOCK_SIZE // LINE_SIZE    # 16

MAX_PHYSICAL_BITS = 41       # 2TB device address space
MAX_OSPN_BITS = 30           # activity entries carry a 30-bit page number

# Metadata entry storage footprint per format. The naive entry occupies a
# full 512-bit slot; the colocated entry is stored bit-packed at 283 bits;
# the compacted entry is exactly 256 bits (32B).
FORMAT_SLOT_BITS = {"naive": 512, "colocated": 283, "compact": 256}


class Region(Enum):
    METADATA = "metadata"
    ACTIVITY = "activity"
    COMPRESSED = "compressed"
    PROMOTED = "promoted"
    OUTSIDE = "outside"


class AddressFault(Exception):
    """Address outside the advertised or physical space."""


class EncodingError(Exception):
    """Pointer/index encoding precondition violated."""


def _align_up(value, granularity=PAGE_SIZE):
    return (value + granularity - 1) // granularity * granularity


def _is_pow2(n):
    return n > 0 and (n & (n - 1)) == 0


@dataclass
class DeviceLayout:
    """Region map plus all chunk/pointer arithmetic. Immutable after init."""

    physical_capacity: int = 1 << 41
    advertised_capacity: int = 0          # 0 = default to 2x compressed region
    sub_region_size: int = 128 << 30
    promoted_size: int = 512 << 20
    compressed_size: int = 0              # 0 = largest fit (see __post_init__)
    meta_format: str = "compact"
    # Region bases; -1 places metadata, activity, compressed, promoted
    # contiguously from address 0.
    metadata_base: int = -1
    activity_base: int = -1
    compressed_base: int = -1
    promoted_base: int = -1

    metadata_size: int = field(init=False, default=0)
    activity_size: int = field(init=False, default=0)

    def __post_init__(self):
        if self.meta_format not in FORMAT_SLOT_BITS:
            raise ValueError(f"unknown metadata format {self.meta_format!r}")
        if not _is_pow2(self.sub_region_size):
            raise ValueError("sub_region_size must be a power of two")
        if self.sub_region_size % CHUNK_SIZE:
            raise ValueError("sub_region_size must be a multiple of 512B")
        if self.physical_capacity > (1 << MAX_PHYSICAL_BITS):
            raise ValueError("physical capacity exceeds the 41-bit device space")
        if self.promoted_size % PAGE_SIZE:
            raise ValueError("promoted_size must be 4KB-aligned")

        if self.compressed_size == 0:
            self._fit_compressed_region()
        if self.compressed_size % self.sub_region_size:
            raise ValueError("compressed region must be an integer number of sub-regions")
        if self.advertised_capacity == 0:
            # Compression overcommit: advertise 2x the compressed region.
            self.advertised_capacity = 2 * self.compressed_size
        if self.advertised_capacity % PAGE_SIZE:
            raise ValueError("advertised capacity must be 4KB-aligned")

        # Derived geometry, materialized once; these sit on hot paths.
        self.advertised_pages = self.advertised_capacity // PAGE_SIZE
        self.n_sub_regions = self.compressed_size // self.sub_region_size
        self.chunks_per_sub_region = self.sub_region_size // CHUNK_SIZE
        self.promoted_pchunks = self.promoted_size // PAGE_SIZE
        if self.advertised_pages > (1 << MAX_OSPN_BITS):
            raise ValueError("advertised capacity exceeds the 30-bit OSPN range")

        slot_bits = FORMAT_SLOT_BITS[self.meta_format]
        self.metadata_size = _align_up((self.advertised_pages * slot_bits + 7) // 8)
        self.activity_size = _align_up(self.promoted_pchunks * 4)

        if self.metadata_base < 0:
            self.metadata_base = 0
            self.activity_base = self.metadata_base + self.metadata_size
            self.compressed_base = self.activity_base + self.activity_size
            self.promoted_base = self.compressed_base + self.compressed_size
        for name in ("metadata", "activity", "compressed", "promoted"):
            if getattr(self, name + "_base") % PAGE_SIZE:
                raise ValueError(f"{name}_base must be 4KB-aligned")
        end = self.promoted_base + self.promoted_size
        if end > self.physical_capacity:
            raise ValueError("regions exceed physical capacity")
        self._check_disjoint()

    def _fit_compressed_region(self):
        # Largest sub-region multiple such that all four regions fit,
        # accounting for metadata scaling with the advertised space.
        slot_bits = FORMAT_SLOT_BITS[self.meta_format]
        k = self.physical_capacity // self.sub_region_size
        while k > 0:
            compressed = k * self.sub_region_size
            advertised = self.advertised_capacity or 2 * compressed
            meta = _align_up(((advertised // PAGE_SIZE) * slot_bits + 7) // 8)
            act = _align_up((self.promoted_size // PAGE_SIZE) * 4)
            if meta + act + compressed + self.promoted_size <= self.physical_capacity:
                self.compressed_size = compressed
                return
            k -= 1
        raise ValueError("no room for a compressed region with this geometry")

    def _check_disjoint(self):
        spans = sorted(
            (getattr(self, n + "_base"), getattr(self, n + "_size"), n)
            for n in ("metadata", "activity", "compressed", "promoted")
        )
        for (b0, s0, n0), (b1, _, n1) in zip(spans, spans[1:]):
            if b0 + s0 > b1:
                raise ValueError(f"regions {n0} and {n1} overlap")

    # -- OSPA side ----------------------------------------------------------

    def ospn_of(self, ospa):
        if not 0 <= ospa < self.advertised_capacity:
            raise AddressFault(f"OSPA {ospa:#x} outside advertised capacity")
        return ospa >> 12

    # -- metadata addressing ------------------------------------------------

    def metadata_mpa(self, ospn):
        """32B-entry address for the compacted format; two entries per line."""
        if not 0 <= ospn < self.advertised_pages:
            raise AddressFault(f"OSPN {ospn:#x} outside advertised capacity")
        return self.metadata_base + ospn * 32

    def metadata_lines(self, ospn):
        """64B line addresses holding this page's entry under the active format.

        Bit-packed 283b entries cross a line boundary for roughly half of all
        page numbers and then need two accesses; the other formats never cross.
        """
        if not 0 <= ospn < self.advertised_pages:
            raise AddressFault(f"OSPN {ospn:#x} outside advertised capacity")
        if self.meta_format == "compact":
            return (self.metadata_base + (ospn >> 1) * 64,)
        if self.meta_format == "naive":
            return (self.metadata_base + ospn * 64,)
        bit = ospn * 283
        first = bit // 512
        last = (bit + 282) // 512
        base = self.metadata_base
        if first == last:
            return (base + first * 64,)
        return (base + first * 64, base + last * 64)

    def metadata_line_ospns(self, line_mpa):
        """Pages whose entry is attributed to this metadata line.

        A bit-spanning colocated entry belongs to the line holding its first
        bit, so each entry is attributed exactly once.
        """
        line_no = (line_mpa - self.metadata_base) >> 6
        if self.meta_format == "compact":
            cands = (2 * line_no, 2 * line_no + 1)
        elif self.meta_format == "naive":
            cands = (line_no,)
        else:
            lo = (line_no * 512 + 282) // 283  # first entry starting in line
            cands = range(lo, lo + 2)
        return [
            e for e in cands
            if e < self.advertised_pages and self.metadata_lines(e)[0] == line_mpa
        ]

    # -- compressed region / C-chunks ----------------------------------------

    def sub_region_base(self, sub_region):
        if not 0 <= sub_region < self.n_sub_regions:
            raise EncodingError(f"sub-region {sub_region} out of range")
        return self.compressed_base + sub_region * self.sub_region_size

    def chunk_index(self, mpa, sub_region):
        """Sub-region-relative 512B chunk index (28 bits for 128GB sub-regions)."""
        base = self.sub_region_base(sub_region)
        if mpa % CHUNK_SIZE:
            raise EncodingError(f"MPA {mpa:#x} not 512B-aligned")
        if not base <= mpa < base + self.sub_region_size:
            raise EncodingError(f"MPA {mpa:#x} outside sub-region {sub_region}")
        return (mpa - base) >> 9

    def chunk_mpa(self, sub_region, index):
        if not 0 <= index < self.chunks_per_sub_region:
            raise EncodingError(f"chunk index {index} out of range")
        if not 0 <= sub_region < self.n_sub_regions:
            raise EncodingError(f"sub-region {sub_region} out of range")
        return self.compressed_base + sub_region * self.sub_region_size + (index << 9)

    def global_chunk_id(self, sub_region, index):
        """Full-address chunk pointer (mpa >> 9) used by the wider formats."""
        return self.chunk_mpa(sub_region, index) >> 9

    # -- promoted region / P-chunks -------------------------------------------

    def pchunk_pointer(self, mpa):
        """4KB-granule pointer (mpa >> 12); 29 bits cover the 41-bit space."""
        if mpa % PAGE_SIZE:
            raise EncodingError(f"MPA {mpa:#x} not 4KB-aligned")
        if not 0 <= mpa < (1 << MAX_PHYSICAL_BITS):
            raise EncodingError(f"MPA {mpa:#x} outside the 41-bit space")
        return mpa >> 12

    def pchunk_mpa(self, pointer):
        return pointer << 12

    def pchunk_index(self, mpa):
        """Index of a promoted-region P-chunk, used to address activity entries."""
        if mpa % PAGE_SIZE or not (
            self.promoted_base <= mpa < self.promoted_base + self.promoted_size
        ):
            raise EncodingError(f"MPA {mpa:#x} is not a promoted-region P-chunk")
        return (mpa - self.promoted_base) >> 12

    def pchunk_index_mpa(self, index):
        if not 0 <= index < self.promoted_pchunks:
            raise EncodingError(f"P-chunk index {index} out of range")
        return self.promoted_base + index * PAGE_SIZE

    # -- activity region -------------------------------------------------------

    def activity_line(self, pchunk_index):
        """64B line holding this P-chunk's 4B activity entry (16 per line)."""
        return self.activity_base + (pchunk_index // 16) * 64

    # -- attribution -------------------------------------------------------------

    def region_of(self, mpa):
        if self.metadata_base <= mpa < self.metadata_base + self.metadata_size:
            return Region.METADATA
        if self.activity_base <= mpa < self.activity_base + self.activity_size:
            return Region.ACTIVITY
        if self.compressed_base <= mpa < self.compressed_base + self.compressed_size:
            return Region.COMPRESSED
        if self.promoted_base <= mpa < self.promoted_base + self.promoted_size:
            return Region.PROMOTED
        return Region.OUTSIDE
