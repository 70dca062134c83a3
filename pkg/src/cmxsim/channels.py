"""Discrete-event timing core: device clock, DRAM channels, CXL link.

Each 64B access occupies its channel for one burst (FIFO, 64B round-robin
interleave by address) and completes a closed-form (tRCD + tCL) access
latency after it starts. Bank and row state are abstracted away: the claims
this simulator supports concern bandwidth categories, not bank conflicts.
Setting channels=0 removes queueing entirely (latency-only service), which
reproduces the unlimited-internal-bandwidth methodology.

All times are float nanoseconds.
"""

from dataclasses import dataclass

from .telemetry import TrafficStats


@dataclass
class TimingConfig:
    channels: int = 2              # 0 = unlimited bandwidth, latency only
    device_clock_ghz: float = 2.0
    data_rate_mts: int = 5600      # DDR5-5600
    tcl: int = 40                  # memory-clock cycles
    trcd: int = 40
    trp: int = 40                  # accepted for completeness; no row state
    link_rtt_ns: float = 70.0
    link_gbps: float = 32.0        # PCIe 5.0 x8

    @property
    def cycle_ns(self):
        return 1.0 / self.device_clock_ghz

    @property
    def channel_bytes_per_ns(self):
        return self.data_rate_mts * 8 / 1000.0

    @property
    def access_latency_ns(self):
        memory_clock_ns = 2000.0 / self.data_rate_mts
        return (self.tcl + self.trcd) * memory_clock_ns

    @property
    def burst_ns(self):
        return 64.0 / self.channel_bytes_per_ns

    @property
    def flit_ns(self):
        return 64.0 / self.link_gbps


class ChannelModel:
    """Submits 64B accesses; the single place traffic is counted."""

    def __init__(self, cfg, stats=None, log=None):
        self.cfg = cfg
        self.stats = stats if stats is not None else TrafficStats()
        self._counts = self.stats.counts
        self.total_accesses = 0
        self.channels = cfg.channels
        self.free = [0.0] * max(1, cfg.channels)
        self.latency_ns = cfg.access_latency_ns
        self.burst = cfg.burst_ns
        self.link_free = 0.0
        self.log = log   # optional list collecting (t, mpa, write, cat)

    def submit(self, mpa, write, cat, t):
        self.total_accesses += 1
        self._counts[(cat << 1) | write] += 1
        if self.log is not None:
            self.log.append((t, mpa, write, cat))
        if not self.channels:
            return t + self.latency_ns + self.burst
        ch = (mpa >> 6) % self.channels
        start = self.free[ch]
        if start < t:
            start = t
        self.free[ch] = start + self.burst
        return start + self.burst + self.latency_ns

    def submit_burst(self, mpa, nlines, write, cat, t):
        """nlines consecutive 64B accesses starting at mpa; returns the
        completion of the last one.

        Equal occupancy makes the FIFO queueing closed-form: channel ch
        serves its k_ch lines back to back from max(t, free[ch]), so the
        burst costs O(channels) regardless of length.
        """
        if nlines <= 0:
            return t
        self.total_accesses += nlines
        self._counts[(cat << 1) | write] += nlines
        if self.log is not None:
            for i in range(nlines):
                self.log.append((t, mpa + (i << 6), write, cat))
        burst = self.burst
        if not self.channels:
            return t + self.latency_ns + burst
        free = self.free
        nch = self.channels
        line = mpa >> 6
        base, rem = divmod(nlines, nch)
        done = 0.0
        for ch in range(nch):
            k = base + (1 if (ch - line) % nch < rem else 0)
            if not k:
                continue
            start = free[ch]
            if start < t:
                start = t
            end = start + k * burst
            free[ch] = end
            if end > done:
                done = end
        return done + self.latency_ns

    def submit_scatter(self, bases, nlines, write, cat, t):
        """Several equal-length bursts issued together at time t.

        FIFO with equal occupancy makes the combined schedule identical to
        issuing the bursts back to back, so only the per-channel line counts
        matter. Returns the completion of the last line.
        """
        nbursts = len(bases)
        if not nbursts:
            return t
        total = nlines * nbursts
        self.total_accesses += total
        self._counts[(cat << 1) | write] += total
        if self.log is not None:
            for mpa in bases:
                for i in range(nlines):
                    self.log.append((t, mpa + (i << 6), write, cat))
        if not self.channels:
            return t + self.latency_ns + self.burst
        nch = self.channels
        per, rem = divmod(nlines, nch)
        k = [per * nbursts] * nch
        if rem:
            for mpa in bases:
                line = mpa >> 6
                for j in range(rem):
                    k[(line + j) % nch] += 1
        free = self.free
        burst = self.burst
        done = 0.0
        for ch in range(nch):
            if not k[ch]:
                continue
            start = free[ch]
            if start < t:
                start = t
            end = start + k[ch] * burst
            free[ch] = end
            if end > done:
                done = end
        return done + self.latency_ns

    def cycles_ns(self, cycles):
        return cycles * self.cfg.cycle_ns

    def link_respond(self, t):
        """Serialize one 64B flit on the shared link and pay the round trip."""
        start = self.link_free if self.link_free > t else t
        self.link_free = start + self.cfg.flit_ns
        return start + self.cfg.flit_ns + self.cfg.link_rtt_ns

    def busy_bytes(self):
        return self.total_accesses * 64
