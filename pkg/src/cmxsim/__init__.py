"""Trace-driven simulator of a compressed CXL memory expander.

Models a promotion-based block-compression device end to end: metadata
translation with three entry formats, chunk free lists, a metadata cache
with lazy recency updates, second-chance demotion with cache probing and a
random fallback, shadowed promotion, block co-location, and a dual-channel
internal bandwidth model. Reports per-category traffic, latency, and
compression ratio.
"""

from .config import RunConfig
from .layout import DeviceLayout
from .sim import Simulation, run_simulation

__all__ = ["RunConfig", "DeviceLayout", "Simulation", "run_simulation"]
__version__ = "0.1.0"
