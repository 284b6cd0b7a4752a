#!/usr/bin/env python3
"""Anchor/miscorrection/BDD-step traces for the (255,238)^2 product code."""

import sys

from drspc.cli import cli

DEFAULT = [
    "instrument",
    "--code", "bch255t2even",
    "--decoder", "drsd",
    "--iters", "20",
    "--ebn0", "4.29",
    "--blocks", "100",
    "--seed", "1",
    "--out", "out/instrument_c2",
]

if __name__ == "__main__":
    cli.main(sys.argv[1:] or DEFAULT, standalone_mode=False)
