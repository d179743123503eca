#!/usr/bin/env python3
"""Build and certify every construction at desk scale.

For each base field q in {3, 5, 7, 9, 11, 13}: the greedy set in F_q, the
line in F_{q^2}, and the census-backed plane in F_{q^3}.  All sets are
re-certified before writing; artifacts land under reports/.
"""

import sys

from qprog.cli import main
from qprog.field import prime_power

BASE_QS = [3, 5, 7, 9, 11, 13]

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "reports"
    rc = 0
    for q in BASE_QS:
        p, s = prime_power(q)
        for kind in ("greedy", "line", "plane"):
            argv = ["construct", kind, "--p", str(p), "--s", str(s), "--out", out]
            print("+ qprog " + " ".join(argv))
            rc |= main(argv)
    raise SystemExit(rc)
