"""Run configuration: a flat key=value file with typed coercion, defaults
matching the reference device table, CLI overrides, and the ablation ladder.
"""

import dataclasses
from dataclasses import dataclass

from .layout import DeviceLayout


class ConfigError(Exception):
    pass


def parse_size(text):
    """Accepts plain integers plus K/M/G/T suffixes (optionally with B)."""
    s = str(text).strip()
    mult = 1
    upper = s.upper()
    for suffix, m in (("KB", 1 << 10), ("MB", 1 << 20), ("GB", 1 << 30),
                      ("TB", 1 << 40), ("K", 1 << 10), ("M", 1 << 20),
                      ("G", 1 << 30), ("T", 1 << 40), ("B", 1)):
        if upper.endswith(suffix):
            mult = m
            s = s[: -len(suffix)]
            break
    try:
        return int(float(s) * mult)
    except ValueError:
        raise ConfigError(f"bad size value {text!r}") from None


def _parse_bool(text):
    t = str(text).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"bad boolean {text!r}")


_SIZE_KEYS = {
    "physical_capacity", "advertised_capacity", "sub_region_size",
    "promoted_size", "compressed_size",
}


@dataclass
class RunConfig:
    # device geometry
    physical_capacity: int = 1 << 41
    advertised_capacity: int = 0      # 0 = 2x compressed region
    sub_region_size: int = 128 << 30
    promoted_size: int = 512 << 20
    compressed_size: int = 0          # 0 = largest fit
    chunk_size: int = 512             # fixed; formats derive from it
    # policy
    baseline: str = "ibex"            # ibex | uncompressed
    mode: str = "colocated1k"         # page4k | colocated1k
    meta_format: str = "compact"      # naive | colocated | compact
    shadowed_promotion: bool = True
    demotion_threshold: int = 256
    seed: int = 1
    # compression
    backend: str = "zlib"             # zlib | lzss | oracle
    compress_bpc: float = 4.0
    decompress_bpc: float = 16.0
    # timing
    channels: int = 2                 # 0 = unlimited bandwidth
    device_clock_ghz: float = 2.0
    data_rate_mts: int = 5600
    tcl: int = 40
    trcd: int = 40
    trp: int = 40
    link_rtt_ns: float = 70.0
    link_gbps: float = 32.0
    inflight_window: int = 4
    # metadata cache
    meta_cache_kb: int = 96
    meta_cache_ways: int = 16
    meta_cache_hit_cycles: int = 4
    # run control
    trace: str = ""
    payload_blob: str = ""
    sample_interval: int = 100_000
    event_log: bool = False
    pid_bits: int = 0

    @classmethod
    def from_file(cls, path):
        cfg = cls()
        with open(path) as fp:
            for lineno, raw in enumerate(fp, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigError(f"{path}:{lineno}: expected key = value")
                key, value = (part.strip() for part in line.split("=", 1))
                cfg.set(key, value)
        return cfg

    def set(self, key, value):
        fields = {f.name: f for f in dataclasses.fields(self)}
        if key not in fields:
            raise ConfigError(f"unknown config key {key!r}")
        ftype = fields[key].type
        if key in _SIZE_KEYS:
            parsed = parse_size(value)
        elif ftype == "bool" or isinstance(getattr(self, key), bool):
            parsed = _parse_bool(value)
        elif isinstance(getattr(self, key), int):
            try:
                parsed = int(value)
            except ValueError:
                raise ConfigError(f"{key}: bad integer {value!r}") from None
        elif isinstance(getattr(self, key), float):
            try:
                parsed = float(value)
            except ValueError:
                raise ConfigError(f"{key}: bad number {value!r}") from None
        else:
            parsed = str(value)
        setattr(self, key, parsed)

    def apply_overrides(self, pairs):
        for pair in pairs:
            if "=" not in pair:
                raise ConfigError(f"override {pair!r} is not key=value")
            key, value = pair.split("=", 1)
            self.set(key.strip(), value.strip())

    def validate(self):
        if self.chunk_size != 512:
            raise ConfigError(
                "chunk_size is fixed at 512: every metadata pointer width "
                "(28/29/32 bits) derives from 512B chunks"
            )
        if self.baseline not in ("ibex", "uncompressed"):
            raise ConfigError(f"baseline must be ibex|uncompressed, got {self.baseline!r}")
        if self.mode not in ("page4k", "colocated1k"):
            raise ConfigError(f"mode must be page4k|colocated1k, got {self.mode!r}")
        if self.meta_format not in ("naive", "colocated", "compact"):
            raise ConfigError(f"unknown metadata format {self.meta_format!r}")
        if self.mode == "page4k" and self.meta_format != "naive":
            raise ConfigError(
                f"metadata format {self.meta_format!r} describes per-block state; "
                "page4k mode uses meta_format=naive"
            )
        if self.mode == "colocated1k" and self.meta_format == "naive":
            raise ConfigError(
                "naive entries hold one page-level type and cannot express "
                "per-block promotion; use meta_format=colocated or compact"
            )
        if self.mode == "colocated1k" and not self.shadowed_promotion:
            raise ConfigError(
                "per-block promotion needs the packed stream to outlive "
                "individual promotions; shadowed_promotion=off requires mode=page4k"
            )
        if self.backend not in ("zlib", "lzss", "oracle"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if self.demotion_threshold < 1:
            raise ConfigError("demotion_threshold must be at least 1")
        if self.inflight_window < 1:
            raise ConfigError("inflight_window must be at least 1")
        if self.channels < 0:
            raise ConfigError("channels must be >= 0 (0 = unlimited)")
        return self

    def build_layout(self):
        try:
            layout = DeviceLayout(
                physical_capacity=self.physical_capacity,
                advertised_capacity=self.advertised_capacity,
                sub_region_size=self.sub_region_size,
                promoted_size=self.promoted_size,
                compressed_size=self.compressed_size,
                meta_format=self.meta_format,
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.meta_format == "compact" and layout.n_sub_regions > 16:
            raise ConfigError(
                f"{layout.n_sub_regions} sub-regions exceed the 4-bit sub-region "
                "field; raise sub_region_size or shrink the compressed region"
            )
        return layout

    def to_dict(self):
        return dataclasses.asdict(self)

    def copy(self, **changes):
        return dataclasses.replace(self, **changes)


def ablation_ladder(cfg):
    """The incremental variants: baseline, then shadowed promotion (S), then
    block co-location (C), then metadata compaction (M). The first two run
    whole-page compression, so their engine latencies scale 4x by size."""
    base = cfg.copy(mode="page4k", meta_format="naive", shadowed_promotion=False)
    plus_s = cfg.copy(mode="page4k", meta_format="naive", shadowed_promotion=True)
    plus_sc = cfg.copy(mode="colocated1k", meta_format="colocated",
                       shadowed_promotion=True)
    plus_scm = cfg.copy(mode="colocated1k", meta_format="compact",
                        shadowed_promotion=True)
    return [("base", base), ("+S", plus_s), ("+S+C", plus_sc), ("+S+C+M", plus_scm)]
