"""Compiled and pure kernels must agree bit for bit."""

import pytest

from ruinlab import _kernels_py as pure
from ruinlab.errors import ExponentCapExceeded

try:
    from ruinlab import _kernels as compiled
except ImportError:
    compiled = None

pytestmark = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")

SEEDS = (0, 1, 42, 2**63, -5)
STREAMS = (0, 1, 7, 1000)


def pairs():
    for seed in SEEDS:
        for stream in STREAMS:
            yield seed, stream


def test_impl_tags():
    assert pure.KERNEL_IMPL == "pure"
    assert compiled.KERNEL_IMPL == "cython"


def test_doom_path_parity():
    for seed, stream in pairs():
        a = compiled.doom_path(3, 1, 0.3, 200, seed, stream)
        b = pure.doom_path(3, 1, 0.3, 200, seed, stream)
        assert a == b, (seed, stream)


def test_doom_path_parity_deep_levels():
    # long pre-doom excursions exercise shifts far past 64 bits
    for stream in STREAMS:
        a = compiled.doom_path(3, 1, 0.25, 2000, 0, stream)
        b = pure.doom_path(3, 1, 0.25, 2000, 0, stream)
        assert a == b, stream


def test_eventual_path_parity():
    for seed, stream in pairs():
        a = compiled.eventual_path(9, 4, 0.35, 300, seed, stream, 4096)
        b = pure.eventual_path(9, 4, 0.35, 300, seed, stream, 4096)
        assert a == b, (seed, stream)


def test_eventual_path_cap_parity():
    for impl in (compiled, pure):
        with pytest.raises(ExponentCapExceeded):
            impl.eventual_path(3, 1, 0.0, 100, 0, 0, 16)


def test_coupled_path_parity():
    for seed, stream in pairs():
        a = compiled.coupled_path(3, 1, 0.2, 0.4, 100, seed, stream)
        b = pure.coupled_path(3, 1, 0.2, 0.4, 100, seed, stream)
        assert a == b, (seed, stream)


def test_sample_blocks_parity():
    for seed, stream in pairs():
        a = compiled.sample_blocks(0.3, 10, 1 << 18, seed, stream, 0)
        b = pure.sample_blocks(0.3, 10, 1 << 18, seed, stream, 0)
        assert a == b, (seed, stream)


def test_sample_blocks_cap_parity():
    a = compiled.sample_blocks(1.0, 2, 50, 3, 0, 0)
    b = pure.sample_blocks(1.0, 2, 50, 3, 0, 0)
    assert a == b
    assert a[0] is None


def test_sample_blocks_resume_parity():
    # continuing from a consumed prefix must replay the same stream
    _blocks, _taus, iend = pure.sample_blocks(0.3, 4, 1 << 16, 5, 2, 0)
    a = compiled.sample_blocks(0.3, 4, 1 << 16, 5, 2, iend)
    b = pure.sample_blocks(0.3, 4, 1 << 16, 5, 2, iend)
    assert a == b


def test_post_doom_path_parity():
    for seed, stream in pairs():
        a = compiled.post_doom_path(0.3, 200, 150, seed, stream)
        b = pure.post_doom_path(0.3, 200, 150, seed, stream)
        assert a == b, (seed, stream)


def test_post_doom_path_parity_long():
    for stream in STREAMS:
        a = compiled.post_doom_path(0.25, 400, 800, 44, stream)
        b = pure.post_doom_path(0.25, 400, 800, 44, stream)
        assert a == b, stream


def test_rho_path_parity():
    for seed, stream in pairs():
        a = compiled.rho_path(3.0, 0.3, 1.5, 200, seed, stream)
        b = pure.rho_path(3.0, 0.3, 1.5, 200, seed, stream)
        assert a == b, (seed, stream)
