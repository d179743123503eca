#!/usr/bin/env python3
"""Run the three cross-q scans over the standard desk-scale field list.

Writes per-field JSON (+ CSV tables) and cross-q summaries under reports/.
Equivalent CLI invocations are printed as they run.
"""

import sys

from qprog.cli import main

SLICE_QS = "9,25,27,49,81,121"
WEIL_QS = "5,7,9,11,13,25,27,49,81,101,121"
DELTA_QS = "25,49,81,121"

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "reports"
    rc = 0
    for argv in (
        ["scan", "slices", "--q-list", SLICE_QS, "--out", out, "--format", "both"],
        ["scan", "weil", "--q-list", WEIL_QS, "--out", out, "--format", "both"],
        ["scan", "delta", "--q-list", DELTA_QS, "--trials", "64", "--seed", "1",
         "--out", out, "--format", "both"],
    ):
        print("+ qprog " + " ".join(argv))
        rc |= main(argv)
    raise SystemExit(rc)
