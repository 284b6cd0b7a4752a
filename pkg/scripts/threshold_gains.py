#!/usr/bin/env python3
"""Noise-threshold gain of DRSD+ over iBDD on both reference product codes.

Runs four bisection searches at target BER 1e-4 and prints the per-code gain.
Pass --smoke for a reduced-confidence run that finishes in minutes.
"""

import argparse

from drspc.sim import ExperimentConfig, noise_threshold

BRACKETS = {
    # (nu, decoder): (lo_db, hi_db)
    (7, "ibdd"): (4.1, 4.8),
    (7, "drsd_plus"): (3.2, 3.9),
    (8, "ibdd"): (4.6, 5.4),
    (8, "drsd_plus"): (3.9, 4.5),
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--smoke", action="store_true",
                    help="fewer block errors, 0.1 dB resolution")
    ap.add_argument("--seed", type=int, default=1)
    args = ap.parse_args()

    stats = (dict(min_block_errors=30, min_bit_errors=150, max_blocks=2500)
             if args.smoke else
             dict(min_block_errors=100, min_bit_errors=500, max_blocks=20000))
    resolution = 0.1 if args.smoke else 0.02

    thresholds = {}
    for (nu, decoder), (lo, hi) in BRACKETS.items():
        cfg = ExperimentConfig(nu=nu, decoder=decoder, iters=20,
                               master_seed=args.seed, **stats)
        result = noise_threshold(cfg, lo, hi, resolution=resolution)
        thresholds[(nu, decoder)] = result.threshold_db
        print(f"nu={nu} {decoder}: {result.threshold_db:.3f} dB")

    for nu, rate in ((7, 0.78), (8, 0.87)):
        gain = thresholds[(nu, "ibdd")] - thresholds[(nu, "drsd_plus")]
        print(f"rate-{rate} PC: iBDD - DRSD+ gain = {gain:.3f} dB")


if __name__ == "__main__":
    main()
