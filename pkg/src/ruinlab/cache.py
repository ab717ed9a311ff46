"""Disk cache for step functions.

Deep exact refinements are expensive (minutes at n around 30) and
perfectly reusable, so finished StepFunctions can be stored as JSON
keyed by (p, n, mode). Writes go to a temp file in the same directory
and are renamed into place, so readers never see a torn file. Records
carry schema_version; a mismatch raises CacheVersionError (the cache
should be rebuilt), while unreadable or structurally wrong files raise
CacheCorruptError. Both are distinct so callers can react differently
to "stale format" versus "damaged data".
"""
from __future__ import annotations

import json
import os
import tempfile
from fractions import Fraction

from .config import SCHEMA_VERSION
from .errors import CacheCorruptError, CacheVersionError
from .stepfn import StepFunction, iterate_step

ENV_CACHE_DIR = "RUINLAB_CACHE_DIR"


def default_cache_dir() -> str | None:
    """The environment override, or None (caching off by default)."""
    return os.environ.get(ENV_CACHE_DIR) or None


def _p_token(p) -> str:
    if isinstance(p, Fraction):
        return f"{p.numerator}-{p.denominator}"
    return repr(float(p)).replace(".", "_").replace("-", "m")


def cache_path(cache_dir: str, p, n: int, mode: str) -> str:
    return os.path.join(cache_dir, f"stepfn_p{_p_token(p)}_n{n}_{mode}.json")


def cache_store(sf: StepFunction, cache_dir: str) -> str:
    """Atomically write sf; returns the final path."""
    os.makedirs(cache_dir, exist_ok=True)
    path = cache_path(cache_dir, sf.p, sf.n, sf.mode)
    payload = {"schema_version": SCHEMA_VERSION}
    payload.update(sf.to_dict())
    fd, tmp = tempfile.mkstemp(dir=cache_dir, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def cache_load(cache_dir: str, p, n: int, mode: str) -> StepFunction | None:
    """Load a cached step function, or None if absent."""
    path = cache_path(cache_dir, p, n, mode)
    if not os.path.exists(path):
        return None
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CacheCorruptError(f"unreadable cache file {path}: {exc}") from exc
    if not isinstance(payload, dict) or "schema_version" not in payload:
        raise CacheCorruptError(f"cache file {path} has no schema_version")
    if payload["schema_version"] != SCHEMA_VERSION:
        raise CacheVersionError(
            f"cache file {path} is schema {payload['schema_version']}, "
            f"this build reads {SCHEMA_VERSION}"
        )
    try:
        sf = StepFunction.from_dict(payload)
    except Exception as exc:
        raise CacheCorruptError(f"cache file {path} is malformed: {exc}") from exc
    if sf.n != n or sf.mode != mode or sf.p != p:
        raise CacheCorruptError(f"cache file {path} does not match its key")
    return sf


def cached_iterate(p, n: int, mode: str, cache_dir: str | None, budget: int | None = None) -> StepFunction:
    """iterate_step with read-through caching when cache_dir is set."""
    from .stepfn import DEFAULT_BUDGET

    if budget is None:
        budget = DEFAULT_BUDGET
    if cache_dir:
        sf = cache_load(cache_dir, _norm_p(p, mode), n, mode)
        if sf is not None:
            return sf
    sf = iterate_step(n, p, mode, budget)
    if cache_dir:
        cache_store(sf, cache_dir)
    return sf


def _norm_p(p, mode: str):
    return Fraction(p) if mode == "exact" else float(p)
