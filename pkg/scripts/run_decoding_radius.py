#!/usr/bin/env python3
"""Decoding-region probe experiment around separated random codewords."""

import argparse

from dcstego.evaluation import voronoi_experiment


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--codewords", type=int, default=50)
    parser.add_argument("--length", type=int, default=60)
    parser.add_argument("--alphabet", type=int, default=50)
    parser.add_argument("--threshold", type=int, default=10)
    parser.add_argument("--probes", type=int, default=10_000)
    parser.add_argument("--weights", default="1,2,3,4,5,6,7,8,9,10,11,12")
    parser.add_argument("--rng-seed", type=int, default=2024)
    parser.add_argument("--csv")
    args = parser.parse_args()

    report = voronoi_experiment(
        args.codewords, args.length, args.alphabet, args.threshold,
        args.probes, weights=[int(w) for w in args.weights.split(",")],
        rng_seed=args.rng_seed,
    )
    print(report.to_text(), end="")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(report.to_csv())


if __name__ == "__main__":
    main()
