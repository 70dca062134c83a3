import pytest

from cmxsim.config import RunConfig
from cmxsim.layout import DeviceLayout


def small_config(**overrides):
    """Desk-scale device: 256MB compressed (16 sub-regions), 4MB promoted."""
    base = dict(
        physical_capacity=1 << 31,
        sub_region_size=16 << 20,
        compressed_size=256 << 20,
        promoted_size=4 << 20,
        demotion_threshold=64,
        backend="zlib",
        sample_interval=100_000,
    )
    base.update(overrides)
    return RunConfig(**base)


def small_layout(meta_format="compact", **overrides):
    base = dict(
        physical_capacity=1 << 31,
        sub_region_size=16 << 20,
        compressed_size=256 << 20,
        promoted_size=4 << 20,
        meta_format=meta_format,
    )
    base.update(overrides)
    return DeviceLayout(**base)


@pytest.fixture
def layout():
    return small_layout()
