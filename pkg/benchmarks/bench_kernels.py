"""Compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]

Prints one line per kernel with the best time of each backend and the ratio.
"""

import argparse
import timeit

import numpy as np

from kfree import _fallback
from kfree.arith import primes_upto

try:
    from kfree import _kernels
except ImportError:
    _kernels = None


def _strike_case():
    lo, n = 10**9, 1 << 22
    pk = (primes_upto(int((lo + n) ** 0.5)).astype(np.int64)) ** 2

    def run(mod):
        buf = np.ones(n, dtype=np.uint8)
        mod.strike(buf, lo, pk)
        return int(buf.sum())

    return "strike (4M window near 1e9, k=2)", run


def _histogram_case():
    rng = np.random.default_rng(1)
    x, H = 1 << 22, 64
    bits = (rng.random(x + H) < 0.6).astype(np.uint8)

    def run(mod):
        return mod.window_histogram(bits, x, H).tolist()

    return "window_histogram (x=4M, H=64)", run


def _pattern_case():
    pk = np.array([4, 9, 25, 49], dtype=np.int64)
    m, j = 48, 3

    def run(mod):
        codes, weights = mod.pattern_codes(m, j, pk, 0, m)
        return int(weights.sum())

    return "pattern_codes (m=48, j=3, 4 primes)", run


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)
    if _kernels is None:
        print("compiled extension not built; nothing to compare")
        return 1
    print(f"{'kernel':40s} {'compiled s':>11s} {'fallback s':>11s} {'speedup':>8s}")
    for name, run in (_strike_case(), _histogram_case(), _pattern_case()):
        if run(_kernels) != run(_fallback):
            raise SystemExit(f"{name}: backends disagree")
        tc = min(timeit.repeat(lambda: run(_kernels), number=1, repeat=args.repeat))
        tf = min(timeit.repeat(lambda: run(_fallback), number=1, repeat=args.repeat))
        print(f"{name:40s} {tc:11.4f} {tf:11.4f} {tf / tc:7.1f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
