#!/usr/bin/env python3
"""Regenerate the closed-form component-decoder success tables (CSV)."""

import sys

from drspc.cli import cli

if __name__ == "__main__":
    args = sys.argv[1:] or ["--out", "out/tables"]
    cli.main(["tables", *args], standalone_mode=False)
