"""Trace ingestion and synthetic workload generation.

Text format, one record per line:

    R|W <hex-ospa> [Z | ratio=<float> | payload=<blob-offset>] [pid=<n>]

The binary format packs the same information into fixed 24-byte records;
payload bytes live in a sidecar blob indexed by offset. Synthetic traces
draw their pages from a randomly permuted page map, so metadata locality
across 4KB boundaries is never granted for free, and are fully reproducible
from their seed.
"""

import random
import struct
from collections import namedtuple
from dataclasses import dataclass

LINE = 64
PAGE = 4096

# kind: "" (none), "zero", "ratio" (arg=float), "payload" (arg=blob offset)
Record = namedtuple("Record", "op ospa kind arg")

_BIN_MAGIC = b"CMXTRC1\x00"
_KIND_IDS = {"": 0, "zero": 1, "ratio": 2, "payload": 3}
_KIND_NAMES = {v: k for k, v in _KIND_IDS.items()}


class TraceError(Exception):
    pass


def fold_pid(ospa, pid, pid_bits, advertised_capacity):
    """Folds a process id into the high OSPA bits (address-space partitioning)."""
    if pid >= (1 << pid_bits):
        raise TraceError(f"pid {pid} does not fit in {pid_bits} bits")
    span = advertised_capacity >> pid_bits
    if ospa >= span:
        raise TraceError(f"OSPA {ospa:#x} overflows its pid partition")
    return pid * span + ospa


def parse_text_record(line, lineno, pid_bits=0, advertised_capacity=0):
    parts = line.split()
    if len(parts) < 2:
        raise TraceError(f"line {lineno}: expected 'R|W <hex-ospa> [...]'")
    op = parts[0].upper()
    if op not in ("R", "W"):
        raise TraceError(f"line {lineno}: bad op {parts[0]!r}")
    try:
        ospa = int(parts[1], 16)
    except ValueError:
        raise TraceError(f"line {lineno}: bad address {parts[1]!r}") from None
    kind, arg, pid = "", 0.0, None
    for tok in parts[2:]:
        if tok == "Z":
            kind = "zero"
        elif tok.startswith("ratio="):
            kind = "ratio"
            try:
                arg = float(tok[6:])
            except ValueError:
                raise TraceError(f"line {lineno}: bad ratio {tok!r}") from None
            if arg <= 0:
                raise TraceError(f"line {lineno}: ratio must be positive")
        elif tok.startswith("payload="):
            kind = "payload"
            arg = int(tok[8:])
        elif tok.startswith("pid="):
            pid = int(tok[4:])
        else:
            raise TraceError(f"line {lineno}: unknown token {tok!r}")
    if pid is not None:
        if not pid_bits:
            raise TraceError(f"line {lineno}: pid given but pid_bits=0")
        ospa = fold_pid(ospa, pid, pid_bits, advertised_capacity)
    return Record(op, ospa & ~(LINE - 1), kind, arg)


def load_trace(path, pid_bits=0, advertised_capacity=0):
    with open(path, "rb") as fp:
        head = fp.read(8)
    if head == _BIN_MAGIC:
        return load_binary(path)
    records = []
    with open(path) as fp:
        for lineno, line in enumerate(fp, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            records.append(
                parse_text_record(line, lineno, pid_bits, advertised_capacity)
            )
    return records


def save_text(records, path):
    with open(path, "w") as fp:
        for r in records:
            if r.kind == "zero":
                extra = " Z"
            elif r.kind == "ratio":
                extra = f" ratio={r.arg:g}"
            elif r.kind == "payload":
                extra = f" payload={int(r.arg)}"
            else:
                extra = ""
            fp.write(f"{r.op} {r.ospa:x}{extra}\n")


def save_binary(records, path):
    with open(path, "wb") as fp:
        fp.write(_BIN_MAGIC)
        fp.write(struct.pack("<Q", len(records)))
        for r in records:
            arg = struct.unpack("<Q", struct.pack("<d", r.arg))[0] \
                if r.kind == "ratio" else int(r.arg)
            fp.write(struct.pack("<BBHIQQ", r.op == "W", _KIND_IDS[r.kind],
                                 0, 0, r.ospa, arg))


def load_binary(path):
    records = []
    with open(path, "rb") as fp:
        if fp.read(8) != _BIN_MAGIC:
            raise TraceError("not a binary trace")
        (count,) = struct.unpack("<Q", fp.read(8))
        for i in range(count):
            raw = fp.read(24)
            if len(raw) != 24:
                raise TraceError(f"record {i}: truncated trace")
            w, kind_id, _, _, ospa, arg = struct.unpack("<BBHIQQ", raw)
            kind = _KIND_NAMES.get(kind_id)
            if kind is None:
                raise TraceError(f"record {i}: unknown kind {kind_id}")
            val = struct.unpack("<d", struct.pack("<Q", arg))[0] \
                if kind == "ratio" else float(arg)
            records.append(Record("W" if w else "R", ospa, kind, val))
    return records


def payload_at(blob, offset):
    if offset + LINE > len(blob):
        raise TraceError(f"payload offset {offset} beyond blob")
    return bytes(blob[offset:offset + LINE])


# ---------------------------------------------------------------------------
# synthetic generation

@dataclass
class SyntheticSpec:
    footprint_pages: int
    request_count: int
    seed: int = 1
    read_ratio: float = 1.0           # fraction of requests that read
    hot_fraction: float = 0.0         # fraction of footprint forming a hot set
    hot_probability: float = 0.0      # chance a request targets the hot set
    zero_fraction: float = 0.2
    ratios: tuple = ((1.0, 2.0),)     # (weight, compression ratio) buckets
    payloads: bool = False            # emit real payloads instead of ratios
    blocks_touched: int = 4           # restrict line offsets to leading blocks

    def __post_init__(self):
        if self.footprint_pages < 1 or self.request_count < 1:
            raise ValueError("footprint and request count must be positive")
        if not 0 <= self.read_ratio <= 1:
            raise ValueError("read_ratio must be within [0, 1]")
        if not 1 <= self.blocks_touched <= 4:
            raise ValueError("blocks_touched must be 1..4")


def _pick_ratio(rng, buckets):
    total = sum(w for w, _ in buckets)
    x = rng.random() * total
    for w, r in buckets:
        x -= w
        if x <= 0:
            return r
    return buckets[-1][1]


def synth_line(ospn, line_no, version, ratio):
    """Deterministic 64B payload whose redundancy tracks the target ratio."""
    rng = random.Random((ospn << 24) ^ (line_no << 8) ^ version)
    if ratio <= 0:
        return bytes(LINE)
    compressible = max(0, min(LINE, int(LINE * (1 - 1 / ratio))))
    filler = bytes([ospn & 0xFF]) * compressible
    return filler + rng.randbytes(LINE - compressible)


def generate(spec, ospa_pages):
    """Returns (records, blob or None). Pages sit at randomly permuted OSPNs."""
    if spec.footprint_pages > ospa_pages:
        raise ValueError("footprint larger than the advertised space")
    rng = random.Random(spec.seed)
    pages = rng.sample(range(ospa_pages), spec.footprint_pages)
    traits = {}
    for p in pages:
        if rng.random() < spec.zero_fraction:
            traits[p] = 0.0
        else:
            traits[p] = _pick_ratio(rng, spec.ratios)
    hot_count = int(len(pages) * spec.hot_fraction)
    hot = pages[:hot_count]
    records = []
    blob = bytearray() if spec.payloads else None
    max_line = spec.blocks_touched * 16
    for _ in range(spec.request_count):
        if hot and rng.random() < spec.hot_probability:
            page = hot[rng.randrange(len(hot))]
        else:
            page = pages[rng.randrange(len(pages))]
        line = rng.randrange(max_line)
        ospa = page * PAGE + line * LINE
        write = rng.random() >= spec.read_ratio
        ratio = traits[page]
        if spec.payloads:
            if write:
                if ratio == 0.0:
                    data = bytes(LINE)
                else:
                    data = synth_line(page, line, len(records), ratio)
                off = len(blob)
                blob += data
                records.append(Record("W", ospa, "payload", float(off)))
            else:
                records.append(Record("R", ospa, "", 0.0))
        else:
            kind = "zero" if ratio == 0.0 else "ratio"
            records.append(Record("W" if write else "R", ospa, kind, ratio))
    return records, bytes(blob) if blob is not None else None


def instrument_writes(records, write_prob, seed, blob=None):
    """Flip reads into writes with independent probability write_prob.

    Payload traces get synthesized 64B payloads appended to the blob;
    annotation traces keep their annotations on the flipped record.
    """
    if not 0 <= write_prob <= 1:
        raise ValueError("write_prob must be within [0, 1]")
    rng = random.Random(seed)
    out = []
    newblob = bytearray(blob) if blob is not None else None
    for i, r in enumerate(records):
        if r.op == "R" and rng.random() < write_prob:
            if newblob is not None:
                data = synth_line(r.ospa >> 12, (r.ospa >> 6) & 63, i, 2.0)
                off = len(newblob)
                newblob += data
                out.append(Record("W", r.ospa, "payload", float(off)))
            else:
                out.append(Record("W", r.ospa, r.kind, r.arg))
        else:
            out.append(r)
    return out, (bytes(newblob) if newblob is not None else None)
