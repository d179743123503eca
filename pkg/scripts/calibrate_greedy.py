#!/usr/bin/env python3
"""Greedy calibration table: size / sqrt(q) over the prime fields q <= 121.

The minimum of the last column is the basis for the frozen bound in the test
suite (GREEDY_MIN_RATIO = 0.55, just under the observed minimum 1/sqrt(3)).
"""

import math

from qprog.field import get_field, is_prime
from qprog.constructions import greedy_progression_free

if __name__ == "__main__":
    worst = None
    print(f"{'q':>5} {'size':>5} {'size/sqrt(q)':>13}")
    for p in range(3, 122):
        if not is_prime(p):
            continue
        out = greedy_progression_free(get_field(p, 1))
        ratio = out.size / math.sqrt(p)
        worst = ratio if worst is None else min(worst, ratio)
        print(f"{p:>5} {out.size:>5} {ratio:>13.4f}")
    print(f"minimum ratio: {worst:.4f}")
