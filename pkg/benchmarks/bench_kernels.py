"""Timing comparison of the compiled and pure-Python path kernels.

Runs every kernel over a batch of streams with both backends, checks
the outputs agree, and prints a table with the speedup. The compiled
extension exists for exactly these loops, so this script is the
evidence that it pays for itself; everything else in the package is
numpy or exact arithmetic and gains nothing from compilation.

Run from the repository root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --scale 5
"""
import argparse
import time

from ruinlab import _kernels_py as pure

try:
    from ruinlab import _kernels as compiled
except ImportError:
    compiled = None


def run_case(kernels, name, paths):
    if name == "doom_path":
        return [kernels.doom_path(3, 1, 0.3, 20, 0, s) for s in range(paths)]
    if name == "eventual_path":
        return [kernels.eventual_path(3, 1, 0.3, 100, 0, s, 4096) for s in range(paths)]
    if name == "coupled_path":
        return [kernels.coupled_path(3, 1, 0.2, 0.4, 60, 0, s) for s in range(paths)]
    if name == "sample_blocks":
        return [kernels.sample_blocks(0.3, 8, 1 << 16, 0, s, 0) for s in range(paths)]
    if name == "post_doom_path":
        return [kernels.post_doom_path(0.3, 120, 80, 0, s) for s in range(paths)]
    if name == "rho_path":
        return [kernels.rho_path(3.0, 0.3, 1.5, 120, 0, s) for s in range(paths)]
    raise ValueError(name)


CASES = [
    ("doom_path", 20000),
    ("eventual_path", 2000),
    ("coupled_path", 5000),
    ("sample_blocks", 2000),
    ("post_doom_path", 5000),
    ("rho_path", 10000),
]


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--scale", type=int, default=1, help="multiply every batch size")
    args = ap.parse_args()
    if compiled is None:
        print("compiled kernels not built; run: python3 setup.py build_ext --inplace")
        return 1
    print(f"{'kernel':<16} {'paths':>7} {'pure':>9} {'cython':>9} {'speedup':>8}")
    for name, paths in CASES:
        paths *= args.scale
        run_case(compiled, name, 100)  # warm both paths
        run_case(pure, name, 100)
        t0 = time.perf_counter()
        want = run_case(pure, name, paths)
        t1 = time.perf_counter()
        got = run_case(compiled, name, paths)
        t2 = time.perf_counter()
        assert got == want, f"{name}: backends disagree"
        tp, tc = t1 - t0, t2 - t1
        print(f"{name:<16} {paths:>7} {tp:>8.3f}s {tc:>8.3f}s {tp / tc:>7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
