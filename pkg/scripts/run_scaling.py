#!/usr/bin/env python3
"""Rescaling algebra check: norm ratios of h^2 u0(h x) against the exact
rational exponent, for dyadic h.  Deviations should be at roundoff.
"""

import sys

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from _common import run

CONFIG = {
    "kind": "scaling",
    "grid": {"extents": [32.0], "points": [512]},
    "initial_data": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0},
    "study": {"h_list": [2, 4], "norm": {"family": "hsob", "s": 2}},
}

if __name__ == "__main__":
    sys.exit(run("scaling", CONFIG, __doc__))
