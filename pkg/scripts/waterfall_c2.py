#!/usr/bin/env python3
"""BER waterfall of the score-guided decoder on the (255,238)^2 product code.

Covers the waterfall region of the 32-level curve; points below ~1e-6 are out
of desk-scale reach and are not attempted.
"""

import sys

from drspc.cli import cli

DEFAULT = [
    "ber",
    "--code", "bch255t2even",
    "--decoder", "drsd",
    "--iters", "20",
    "--ebn0", "3.89:4.21:0.08",
    "--seed", "1",
    "--out", "out/waterfall_c2",
]

if __name__ == "__main__":
    cli.main(sys.argv[1:] or DEFAULT, standalone_mode=False)
