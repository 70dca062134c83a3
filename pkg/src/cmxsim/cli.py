"""Command-line entry point: run, sweep, ablate, gen-trace, pagefault, dump-meta.

Exit codes: 0 success, 2 configuration error, 3 trace error, 4 capacity
exhaustion under the abort policy.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from .config import ConfigError, RunConfig, ablation_ladder, parse_size
from .freelist import CapacityExhausted
from .metaformat import PageType
from .metastore import MetadataStore
from .sim import run_simulation
from .telemetry import pagefault_analysis
from .workload import (
    SyntheticSpec,
    TraceError,
    generate,
    instrument_writes,
    load_trace,
    save_binary,
    save_text,
)

EXIT_CONFIG = 2
EXIT_TRACE = 3
EXIT_CAPACITY = 4


def _load_config(args):
    cfg = RunConfig.from_file(args.config) if args.config else RunConfig()
    if getattr(args, "set", None):
        cfg.apply_overrides(args.set)
    if getattr(args, "trace", None):
        cfg.trace = args.trace
    cfg.validate()
    return cfg


def _load_records(cfg):
    if not cfg.trace:
        raise TraceError("no trace given (config key 'trace' or --trace)")
    layout_cap = cfg.advertised_capacity
    records = load_trace(cfg.trace, cfg.pid_bits, layout_cap)
    blob = None
    blob_path = cfg.payload_blob or cfg.trace + ".blob"
    if any(r.kind == "payload" for r in records):
        if not os.path.exists(blob_path):
            raise TraceError(f"payload trace without blob file {blob_path}")
        with open(blob_path, "rb") as fp:
            blob = fp.read()
    return records, blob


def _run_one(cfg, records, blob, outdir, snapshot=False):
    report, sim = run_simulation(cfg, records, blob)
    if outdir:
        sim.write_outputs(outdir, report, snapshot=snapshot)
    return report


def cmd_run(args):
    cfg = _load_config(args)
    records, blob = _load_records(cfg)
    report = _run_one(cfg, records, blob, args.out, snapshot=args.snapshot)
    print(json.dumps(_headline(report), indent=2))
    return 0


def _headline(report):
    out = {
        "requests": report["requests"]["total"],
        "total_accesses": report["traffic"]["total_accesses"],
        "p50_ns": report["latency"]["p50_ns"],
        "p99_ns": report["latency"]["p99_ns"],
    }
    if "ratio" in report:
        out["compression_ratio_geomean"] = report["ratio"]["geomean"]
    return out


def _sweep_member(packed):
    cfg, records, blob = packed
    report, _ = run_simulation(cfg, records, blob)
    return report


def cmd_sweep(args):
    cfg = _load_config(args)
    records, blob = _load_records(cfg)
    values = [v.strip() for v in args.values.split(",") if v.strip()]
    members = []
    for v in values:
        member = cfg.copy()
        member.set(args.axis, v)
        member.validate()
        members.append((member, records, blob))
    if args.workers > 1 and len(members) > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            reports = list(pool.map(_sweep_member, members))
    else:
        reports = [_sweep_member(m) for m in members]
    combined = {
        "axis": args.axis,
        "runs": [{"value": v, "report": r} for v, r in zip(values, reports)],
    }
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "sweep.json"), "w") as fp:
            json.dump(combined, fp, sort_keys=True, indent=2)
            fp.write("\n")
    for v, r in zip(values, reports):
        print(f"{args.axis}={v}: accesses={r['traffic']['total_accesses']} "
              f"p50={r['latency']['p50_ns']:.1f}ns p99={r['latency']['p99_ns']:.1f}ns")
    return 0


def cmd_ablate(args):
    cfg = _load_config(args)
    records, blob = _load_records(cfg)
    variants = ablation_ladder(cfg)
    results = []
    for label, vcfg in variants:
        vcfg.validate()
        report, _ = run_simulation(vcfg, records, blob)
        results.append({"label": label, "report": report})
        traffic = report["traffic"]["by_category"]
        meta = traffic["metadata"]["reads"] + traffic["metadata"]["writes"]
        print(f"{label:8s} total={report['traffic']['total_accesses']:12d} "
              f"metadata={meta:10d}")
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        with open(os.path.join(args.out, "ablation.json"), "w") as fp:
            json.dump({"variants": results}, fp, sort_keys=True, indent=2)
            fp.write("\n")
    return 0


def cmd_gen_trace(args):
    ratios = []
    for part in args.ratios.split(","):
        w, r = part.split(":")
        ratios.append((float(w), float(r)))
    spec = SyntheticSpec(
        footprint_pages=args.footprint_pages,
        request_count=args.requests,
        seed=args.seed,
        read_ratio=args.read_ratio,
        hot_fraction=args.hot_fraction,
        hot_probability=args.hot_probability,
        zero_fraction=args.zero_fraction,
        ratios=tuple(ratios),
        payloads=args.payloads,
        blocks_touched=args.blocks_touched,
    )
    records, blob = generate(spec, args.ospa_pages)
    if args.write_prob > 0:
        records, blob = instrument_writes(records, args.write_prob,
                                          args.seed + 1, blob)
    if args.binary:
        save_binary(records, args.out)
    else:
        save_text(records, args.out)
    if blob is not None:
        with open(args.out + ".blob", "wb") as fp:
            fp.write(blob)
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def cmd_pagefault(args):
    records = load_trace(args.trace)
    sizes = {}
    for r in records:
        ospn = r.ospa >> 12
        if ospn in sizes:
            continue
        if r.kind == "zero":
            sizes[ospn] = 0
        elif r.kind == "ratio":
            csize = max(1, min(4096, round(4096 / r.arg)))
            chunks = min(8, -(-csize // 512)) if csize <= 3584 else 8
            sizes[ospn] = chunks * 512
        else:
            raise TraceError(
                "pagefault analysis in ibex mode needs ratio/zero annotations"
            )
    result = pagefault_analysis(
        (r.ospa >> 12 for r in records),
        parse_size(args.capacity),
        args.mode,
        lambda ospn: sizes.get(ospn, 4096),
    )
    print(json.dumps(result, sort_keys=True, indent=2))
    return 0


def cmd_dump_meta(args):
    fmt, entries = MetadataStore.load_snapshot(args.snapshot)
    print(f"# format={fmt} entries={len(entries)}")
    for ospn, entry in entries[: args.limit] if args.limit else entries:
        if fmt == "naive":
            desc = (f"type={PageType(entry.page_type).name} "
                    f"num_chunks={entry.num_chunks} wr={entry.wr_cntr} "
                    f"ptr={list(entry.ptr_chunk)}")
        else:
            types = ",".join(PageType(t).name[0] for t in entry.block_type)
            desc = (f"blocks=[{types}] sz={list(entry.block_sz)} "
                    f"num_chunks={entry.num_chunks} wr={entry.wr_cntr}")
            if fmt == "compact":
                desc += (f" sub={entry.sub_region} ptr={list(entry.ptr_chunk)}"
                         f" last={entry.ptr_last}")
            else:
                desc += f" ptr={list(entry.ptr_chunk)}"
        print(f"ospn={ospn:#010x} {desc}")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="cmxsim",
        description="Compressed CXL memory expander simulator",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="key=value config file")
        p.add_argument("--set", action="append", default=[],
                       metavar="KEY=VALUE", help="override a config key")
        p.add_argument("--trace", help="trace file (overrides config)")
        p.add_argument("--out", help="output directory")

    p = sub.add_parser("run", help="run one simulation")
    common(p)
    p.add_argument("--snapshot", action="store_true",
                   help="emit snapshot.bin with encoded metadata entries")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("sweep", help="run one config across an axis of values")
    common(p)
    p.add_argument("--axis", required=True, help="config key to sweep")
    p.add_argument("--values", required=True, help="comma-separated values")
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("ablate",
                       help="base / +S / +S+C / +S+C+M incremental variants")
    common(p)
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("gen-trace", help="generate a synthetic trace")
    p.add_argument("--out", required=True)
    p.add_argument("--footprint-pages", type=int, required=True)
    p.add_argument("--requests", type=int, required=True)
    p.add_argument("--ospa-pages", type=int, required=True,
                   help="advertised page count the OSPNs are drawn from")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--read-ratio", type=float, default=1.0)
    p.add_argument("--hot-fraction", type=float, default=0.0)
    p.add_argument("--hot-probability", type=float, default=0.0)
    p.add_argument("--zero-fraction", type=float, default=0.2)
    p.add_argument("--ratios", default="1:2.0",
                   help="weight:ratio buckets, comma-separated")
    p.add_argument("--payloads", action="store_true",
                   help="emit real payloads (sidecar .blob) instead of ratios")
    p.add_argument("--blocks-touched", type=int, default=4)
    p.add_argument("--write-prob", type=float, default=0.0,
                   help="flip reads to writes with this probability")
    p.add_argument("--binary", action="store_true")
    p.set_defaults(func=cmd_gen_trace)

    p = sub.add_parser("pagefault", help="LRU resident-set fault analysis")
    p.add_argument("--trace", required=True)
    p.add_argument("--capacity", required=True, help="resident bytes (e.g. 64MB)")
    p.add_argument("--mode", choices=["uncompressed", "ibex"], required=True)
    p.set_defaults(func=cmd_pagefault)

    p = sub.add_parser("dump-meta", help="decode entries from a snapshot")
    p.add_argument("--snapshot", required=True)
    p.add_argument("--limit", type=int, default=0)
    p.set_defaults(func=cmd_dump_meta)

    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except TraceError as exc:
        print(f"trace error: {exc}", file=sys.stderr)
        return EXIT_TRACE
    except CapacityExhausted as exc:
        print(f"capacity exhausted: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return EXIT_TRACE


if __name__ == "__main__":
    sys.exit(main())
