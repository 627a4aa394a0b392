#!/usr/bin/env python3
"""Grouping throughput: bounded/banded distance vs the full-DP baseline."""

import argparse
import time

from dcstego import Seed, UniformModel, group, levenshtein
from dcstego.codebook import construct_codebook_batched


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--k", type=int, default=128)
    parser.add_argument("--block-len", type=int, default=30)
    parser.add_argument("--alphabet", type=int, default=50)
    parser.add_argument("--threshold", type=int, default=6)
    parser.add_argument("--blocks", type=int, default=5)
    parser.add_argument("--baseline-pairs", type=int, default=300)
    args = parser.parse_args()

    seed = Seed.from_hex("33" * 32)
    model = UniformModel(args.alphabet)
    books = [
        construct_codebook_batched(
            model, (), args.k, args.block_len, 1.0, seed, block
        )
        for block in range(args.blocks)
    ]

    start = time.perf_counter()
    for book in books:
        group(book, args.threshold)
    banded = (time.perf_counter() - start) / len(books)
    print(f"banded grouping: {banded * 1e3:.1f} ms per block "
          f"(k={args.k}, block_len={args.block_len})")

    distinct = books[0].distinct()
    pairs = [
        (distinct[i], distinct[j])
        for i in range(len(distinct))
        for j in range(i + 1, len(distinct))
    ]
    sample = pairs[: args.baseline_pairs]
    start = time.perf_counter()
    for a, b in sample:
        levenshtein(a, b)
    per_pair = (time.perf_counter() - start) / len(sample)
    print(f"full-DP baseline: {per_pair * len(pairs):.2f} s per block "
          f"(projected from {len(sample)} of {len(pairs)} pairs)")
    print(f"speedup: {per_pair * len(pairs) / banded:.0f}x")


if __name__ == "__main__":
    main()
