#!/usr/bin/env python3
"""Tabulate the angular kernel and its certified ratio over a theta grid.

Thin wrapper over `hslimit kernel-eval`; edit the defaults or pass
--s / --theta through.
"""

import sys

from hslimit.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:]
    if not any(a.startswith("--out") for a in argv):
        argv += ["--out", "out/kernel_table"]
    if not any(a.startswith("--s") for a in argv):
        argv += ["--s", "0.001,0.01,0.1,0.5,0.9"]
    sys.exit(main(["kernel-eval"] + argv))
