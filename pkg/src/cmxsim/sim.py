"""Simulation assembly and the deterministic run loop.

Foreground requests execute in trace order. Request i issues when request
i-W has left the device (W = inflight window), which proxies a host that
keeps W requests outstanding. One background demotion chain interleaves at
timestamps strictly before the next request (background work loses ties).
The CXL round trip is paid on the recorded response latency only, so the
internal schedule, and therefore every traffic count, is invariant under
link-latency sweeps.
"""

import json
import os

from .channels import ChannelModel, TimingConfig
from .compress import LatencyModel, make_codec
from .engine import Engine
from .telemetry import CAT_NAMES, Cat, Telemetry
from .workload import TraceError, payload_at

PAGE = 4096


class Simulation:
    def __init__(self, cfg, records, blob=None):
        cfg.validate()
        self.cfg = cfg
        self.records = records
        self.blob = blob
        self.telem = Telemetry(cfg.sample_interval)
        tc = TimingConfig(
            channels=cfg.channels,
            device_clock_ghz=cfg.device_clock_ghz,
            data_rate_mts=cfg.data_rate_mts,
            tcl=cfg.tcl, trcd=cfg.trcd, trp=cfg.trp,
            link_rtt_ns=cfg.link_rtt_ns,
            link_gbps=cfg.link_gbps,
        )
        self.channel = ChannelModel(tc, self.telem.traffic,
                                    log=[] if cfg.event_log else None)
        self.uncompressed = cfg.baseline == "uncompressed"
        self.engine = None
        self.layout = None
        if not self.uncompressed:
            self.layout = cfg.build_layout()
            codec = make_codec(cfg.backend)
            self._check_trace_compat(codec)
            lat = LatencyModel(cfg.compress_bpc, cfg.decompress_bpc)
            self.engine = Engine(
                self.layout, self.channel, self.telem, lat, codec,
                colocated=cfg.mode == "colocated1k",
                shadowed=cfg.shadowed_promotion,
                demotion_threshold=cfg.demotion_threshold,
                cache_kb=cfg.meta_cache_kb,
                cache_ways=cfg.meta_cache_ways,
                cache_hit_cycles=cfg.meta_cache_hit_cycles,
                seed=cfg.seed,
            )
        self.end_time_ns = 0.0

    def _check_trace_compat(self, codec):
        kinds = {r.kind for r in self.records}
        if codec is None and "payload" in kinds:
            raise TraceError("payload traces need a payload backend (zlib/lzss)")
        if codec is not None and "ratio" in kinds:
            raise TraceError("ratio-annotated traces need backend=oracle")

    def _annotation(self, rec):
        if rec.kind == "zero":
            return "Z"
        if rec.kind == "ratio":
            return max(1, min(PAGE, round(PAGE / rec.arg)))
        return None

    def _handle(self, rec, t):
        if self.uncompressed:
            if rec.ospa >= self.cfg.physical_capacity:
                raise TraceError(f"OSPA {rec.ospa:#x} beyond physical capacity")
            return self.channel.submit(rec.ospa, rec.op == "W", Cat.EXT, t)
        if rec.ospa >= self.layout.advertised_capacity:
            raise TraceError(f"OSPA {rec.ospa:#x} beyond advertised capacity")
        ann = self._annotation(rec)
        if rec.op == "R":
            done, _ = self.engine.handle_read(rec.ospa, ann, t)
            return done
        payload = None
        if self.engine.payload_mode:
            payload = payload_at(self.blob, int(rec.arg)) \
                if rec.kind == "payload" else bytes(64)
        return self.engine.handle_write(rec.ospa, ann, payload, t)

    def run(self):
        cfg = self.cfg
        w = cfg.inflight_window
        ring = [0.0] * w
        prev_issue = 0.0
        pending_demotion = None
        engine = self.engine
        for i, rec in enumerate(self.records):
            t_issue = ring[i % w] if i >= w else 0.0
            if t_issue < prev_issue:
                t_issue = prev_issue
            prev_issue = t_issue
            while pending_demotion is not None and pending_demotion < t_issue:
                done = engine.run_demotion_cycle(pending_demotion)
                pending_demotion = done if engine.alloc.demotion_needed() else None
            internal = self._handle(rec, t_issue)
            ring[i % w] = internal
            if internal > self.end_time_ns:
                self.end_time_ns = internal
            resp = self.channel.link_respond(internal)
            self.telem.count_request(rec.op == "W", resp - t_issue)
            if engine is not None:
                if pending_demotion is None and engine.alloc.demotion_needed():
                    pending_demotion = internal
                n = self.telem.requests
                if n % cfg.sample_interval == 0:
                    self._sample_ratio()
                if n % 100_000 == 0:
                    self.telem.check_conservation(self.channel.total_accesses)
        if engine is not None:
            self._sample_ratio()
        self.telem.check_conservation(self.channel.total_accesses)
        return self.report()

    def _sample_ratio(self):
        self.telem.sample_ratio(
            self.engine.allocated_ospa_bytes(),
            self.engine.physical_bytes_in_use(),
        )

    def report(self):
        telem = self.telem
        rep = {
            "config": self.cfg.to_dict(),
            "requests": {
                "total": telem.requests,
                "reads": telem.reads,
                "writes": telem.writes,
                "zero_served": telem.zero_served,
            },
            "traffic": {
                "by_category": telem.traffic.as_dict(),
                "total_accesses": self.channel.total_accesses,
                "total_bytes": self.channel.busy_bytes(),
            },
            "latency": telem.latency_summary(),
            "sim_end_ns": self.end_time_ns,
        }
        if self.engine is not None:
            act = self.engine.activity
            victims = act.victims
            rep["ratio"] = telem.ratio_summary()
            rep["metadata_cache"] = self.engine.cache.stats()
            rep["demotion"] = {
                "victims": victims,
                "via_random": act.via_random,
                "via_random_fraction": act.via_random / victims if victims else 0.0,
                "sound_selections": act.sound_selections,
                "lines_scanned": {str(k): v for k, v in
                                  sorted(act.lines_scanned_hist.items())},
            }
            rep["allocator"] = {
                "free_pchunks": self.engine.alloc.free_pchunks,
                "free_cchunks_per_sub_region": self.engine.alloc.free_counts(),
                "cchunk_bytes_in_use": self.engine.alloc.cchunk_bytes_in_use(),
                "pchunk_bytes_in_use": self.engine.alloc.pchunk_bytes_in_use(),
                "exhaustion_events": self.engine.alloc.exhaustion_events,
            }
            rep["compression"] = {
                "compress_events": telem.compress_events,
                "decompress_events": telem.decompress_events,
                "demotion_compress_events": telem.demotion_compress_events,
                "recompressions": telem.recompressions,
            }
        return rep

    # -- outputs ---------------------------------------------------------------

    def write_outputs(self, outdir, report, snapshot=False):
        os.makedirs(outdir, exist_ok=True)
        with open(os.path.join(outdir, "report.json"), "w") as fp:
            json.dump(report, fp, sort_keys=True, indent=2)
            fp.write("\n")
        with open(os.path.join(outdir, "breakdown.csv"), "w") as fp:
            fp.write("category,reads,writes\n")
            for cat in Cat:
                fp.write(f"{CAT_NAMES[cat]},{self.telem.traffic.reads(cat)},"
                         f"{self.telem.traffic.writes(cat)}\n")
        with open(os.path.join(outdir, "ratio.csv"), "w") as fp:
            fp.write("request,allocated_bytes,physical_bytes,ratio\n")
            for req, alloc, phys, ratio in self.telem.ratio_samples:
                fp.write(f"{req},{alloc},{phys},{ratio:.6f}\n")
        if self.channel.log is not None:
            with open(os.path.join(outdir, "events.csv"), "w") as fp:
                fp.write("t_ns,mpa,write,category\n")
                for t, mpa, wr, cat in self.channel.log:
                    fp.write(f"{t:.3f},{mpa},{int(wr)},{CAT_NAMES[cat]}\n")
        if snapshot and self.engine is not None:
            self.engine.store.save_snapshot(os.path.join(outdir, "snapshot.bin"))


def run_simulation(cfg, records, blob=None):
    sim = Simulation(cfg, records, blob)
    report = sim.run()
    return report, sim
