"""Run configuration embedded in reports and CLI outputs.

Everything needed to reproduce a result byte for byte (modulo the
timestamp the CLI adds at write time): seed, engine mode, thread count,
and cache location, plus schema and package version markers so stale
artifacts are detected instead of misread.
"""
from __future__ import annotations

from dataclasses import dataclass, field

SCHEMA_VERSION = 1


def _package_version() -> str:
    try:
        from importlib.metadata import version

        return version("ruinlab")
    except Exception:
        return "unknown"


@dataclass(frozen=True)
class RunConfig:
    seed: int | None = None
    mode: str = "exact"
    threads: int = 1
    cache_dir: str | None = None
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "package_version": _package_version(),
            "seed": self.seed,
            "mode": self.mode,
            "threads": self.threads,
            "cache_dir": self.cache_dir,
            "params": dict(self.params),
        }
