#!/usr/bin/env python3
"""Throughput comparison of the alignment kernels (compiled vs pure Python).

Run:  python benchmarks/bench_align.py [--pairs N]
"""

from __future__ import annotations

import argparse
import random
import time

from dialspeech.scoring import _align_py

try:
    from dialspeech.scoring import _align_cy
except ImportError:
    _align_cy = None


def make_pairs(n_pairs: int, lo: int, hi: int, alphabet: int, seed: int = 0):
    rng = random.Random(seed)
    pairs = []
    for _ in range(n_pairs):
        a = [rng.randrange(alphabet) for _ in range(rng.randint(lo, hi))]
        b = list(a)
        # Perturb ~20% of positions plus a few indels, like real ASR output.
        for i in range(len(b)):
            if rng.random() < 0.2:
                b[i] = rng.randrange(alphabet)
        for _ in range(rng.randint(0, 3)):
            if b and rng.random() < 0.5:
                del b[rng.randrange(len(b))]
            else:
                b.insert(rng.randrange(len(b) + 1), rng.randrange(alphabet))
        pairs.append((a, b))
    return pairs


def bench(kernel, pairs):
    start = time.perf_counter()
    checksum = 0
    for a, b in pairs:
        s, d, i = kernel.align_counts(a, b)
        checksum += s + d + i
    return time.perf_counter() - start, checksum


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=2000)
    args = parser.parse_args()

    workloads = {
        "words (8-40 tokens)": make_pairs(args.pairs, 8, 40, alphabet=5000),
        "chars (40-200 symbols)": make_pairs(args.pairs, 40, 200, alphabet=60),
    }

    print(f"{args.pairs} pairs per workload\n")
    print(f"{'workload':<26}{'python':>12}{'cython':>12}{'speedup':>10}")
    for name, pairs in workloads.items():
        t_py, sum_py = bench(_align_py, pairs)
        if _align_cy is None:
            print(f"{name:<26}{t_py:>10.3f}s{'n/a':>12}{'-':>10}")
            continue
        t_cy, sum_cy = bench(_align_cy, pairs)
        assert sum_py == sum_cy, "kernels disagree"
        print(f"{name:<26}{t_py:>10.3f}s{t_cy:>10.3f}s{t_py / t_cy:>9.1f}x")


if __name__ == "__main__":
    main()
