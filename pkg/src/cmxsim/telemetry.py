"""Traffic attribution, ratio sampling, latency stats, page-fault analysis.

Every 64B channel access carries exactly one category; the per-category
counts must sum to the channel model's raw access total (checked at every
conservation checkpoint and at end of run). Compression ratio samples
divide touched, non-zero OSPA bytes by physical bytes in use, where the
physical side includes shadow duplication and live P-chunks.
"""

import math
from collections import OrderedDict
from enum import IntEnum


class Cat(IntEnum):
    EXT = 0        # final access: data served/absorbed directly
    META = 1       # metadata line fetches and write-backs
    PROMO = 2      # chunk fetches feeding promotion + promoted-copy writes
    DEMO = 3       # demotion/recompression page reads + chunk writes
    ACT_SCAN = 4   # demotion cursor line fetches and write-backs
    ACT_UPD = 5    # lazy referenced-bit updates and entry initialization
    ALLOC = 6      # free-list walks and pushes


CAT_NAMES = {
    Cat.EXT: "external-data",
    Cat.META: "metadata",
    Cat.PROMO: "promotion",
    Cat.DEMO: "demotion",
    Cat.ACT_SCAN: "activity-scan",
    Cat.ACT_UPD: "activity-lazy-update",
    Cat.ALLOC: "allocator",
}


class ConservationError(AssertionError):
    pass


class TrafficStats:
    """Per-category 64B access counters, reads and writes kept apart."""

    __slots__ = ("counts",)

    def __init__(self):
        self.counts = [0] * (len(Cat) * 2)

    def add(self, cat, write):
        self.counts[(cat << 1) | write] += 1

    def reads(self, cat):
        return self.counts[cat << 1]

    def writes(self, cat):
        return self.counts[(cat << 1) | 1]

    def total(self):
        return sum(self.counts)

    def as_dict(self):
        return {
            CAT_NAMES[c]: {"reads": self.reads(c), "writes": self.writes(c)}
            for c in Cat
        }


def geomean(values):
    """Geometric mean; invariant under duplicating the sample multiset."""
    vals = [v for v in values if v > 0]
    if not vals:
        return 0.0
    return math.exp(sum(math.log(v) for v in vals) / len(vals))


def percentile(sorted_values, p):
    if not sorted_values:
        return 0.0
    k = min(len(sorted_values) - 1, max(0, math.ceil(p / 100 * len(sorted_values)) - 1))
    return sorted_values[k]


class Telemetry:
    """Run-wide aggregation owned by one simulation instance."""

    def __init__(self, sample_interval=100_000):
        self.traffic = TrafficStats()
        self.zero_served = 0
        self.requests = 0
        self.reads = 0
        self.writes = 0
        self.latencies = []
        self.sample_interval = sample_interval
        self.ratio_samples = []        # (request_index, allocated, physical, ratio)
        self.compress_events = 0
        self.decompress_events = 0
        self.demotion_compress_events = 0
        self.recompressions = 0

    def count_request(self, write, latency_ns):
        self.requests += 1
        if write:
            self.writes += 1
        else:
            self.reads += 1
        self.latencies.append(latency_ns)

    def sample_ratio(self, allocated_bytes, physical_bytes):
        ratio = allocated_bytes / physical_bytes if physical_bytes else 0.0
        self.ratio_samples.append((self.requests, allocated_bytes, physical_bytes, ratio))

    def check_conservation(self, channel_total):
        if self.traffic.total() != channel_total:
            raise ConservationError(
                f"category sum {self.traffic.total()} != channel accesses {channel_total}"
            )

    def latency_summary(self):
        lat = sorted(self.latencies)
        return {
            "count": len(lat),
            "mean_ns": sum(lat) / len(lat) if lat else 0.0,
            "p50_ns": percentile(lat, 50),
            "p99_ns": percentile(lat, 99),
            "max_ns": lat[-1] if lat else 0.0,
        }

    def ratio_summary(self):
        ratios = [r for (_, _, _, r) in self.ratio_samples]
        return {
            "samples": len(ratios),
            "geomean": geomean(ratios),
            "final": ratios[-1] if ratios else 0.0,
        }


# ---------------------------------------------------------------------------
# page-fault analyzer

def pagefault_analysis(requests, capacity_bytes, mode, page_cost):
    """LRU resident-set replay counting capacity faults and cold faults.

    `requests` yields OSPNs in access order; `page_cost(ospn)` gives the
    bytes a resident page occupies: 4096 flat for the uncompressed baseline,
    the chunk-allocated footprint for the compressed device. Zero-cost pages
    never fault. Cold (first-touch) faults are reported separately from
    faults incurred under memory pressure.
    """
    if capacity_bytes < 4096:
        raise ValueError("resident capacity smaller than one page")
    resident = OrderedDict()
    used = 0
    seen = set()
    cold = 0
    capacity_faults = 0
    evictions = 0
    for ospn in requests:
        cost = page_cost(ospn) if mode == "ibex" else 4096
        if cost == 0:
            continue
        if ospn in resident:
            resident.move_to_end(ospn)
            continue
        if ospn in seen:
            capacity_faults += 1
        else:
            seen.add(ospn)
            cold += 1
        while used + cost > capacity_bytes and resident:
            _, freed = resident.popitem(last=False)
            used -= freed
            evictions += 1
        resident[ospn] = cost
        used += cost
    return {
        "mode": mode,
        "cold_faults": cold,
        "capacity_faults": capacity_faults,
        "evictions": evictions,
        "resident_pages": len(resident),
    }
