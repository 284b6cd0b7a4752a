#!/usr/bin/env python3
"""Noise threshold of the score-guided decoder vs number of score levels."""

import argparse

from drspc.sim import ExperimentConfig, noise_threshold

BRACKETS = {8: (4.15, 4.55), 16: (4.05, 4.45), 32: (3.95, 4.35), 64: (3.95, 4.35)}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--levels", type=int, nargs="*", default=[8, 16, 32, 64])
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--resolution", type=float, default=0.02)
    args = ap.parse_args()
    for levels in args.levels:
        cfg = ExperimentConfig(nu=8, decoder="drsd", iters=20,
                               drs_levels=levels, master_seed=args.seed,
                               min_block_errors=60, min_bit_errors=300,
                               max_blocks=4000)
        lo, hi = BRACKETS[levels]
        result = noise_threshold(cfg, lo, hi, resolution=args.resolution)
        print(f"{levels:3d} levels: threshold {result.threshold_db:.3f} dB")


if __name__ == "__main__":
    main()
