"""Bit-source plugins compared by the harness."""

from ..base import BitSource, ConfigError
from .lcg import LcgSource
from .mt19937 import Mt19937Source
from .qrng import QrngPipelineSource

SOURCE_REGISTRY: dict[str, type[BitSource]] = {
    QrngPipelineSource.name: QrngPipelineSource,
    LcgSource.name: LcgSource,
    Mt19937Source.name: Mt19937Source,
}


def make_source(name: str) -> BitSource:
    key = name.strip().lower()
    if key not in SOURCE_REGISTRY:
        choices = ", ".join(SOURCE_REGISTRY)
        raise ConfigError(f"Unknown source {name!r} (choose from {choices})")
    return SOURCE_REGISTRY[key]()


__all__ = ["LcgSource", "Mt19937Source", "QrngPipelineSource", "SOURCE_REGISTRY", "make_source"]
