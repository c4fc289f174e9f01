#!/usr/bin/env python3
"""Run the full inequality certification suite and print one line per check.

Thin wrapper over `hslimit verify-bounds` with the default grids; exit
status 0 iff every check passes.
"""

import sys

from hslimit.cli import main

if __name__ == "__main__":
    argv = sys.argv[1:]
    if not any(a.startswith("--out") for a in argv):
        argv += ["--out", "out/bounds"]
    sys.exit(main(["verify-bounds"] + argv))
