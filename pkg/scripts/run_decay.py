#!/usr/bin/env python3
"""Dispersive decay of the free flow: sup-norm of e^{it Lap^2} applied to a
broadband Gaussian on a long one-dimensional box.  The fitted slope sits
near -1/4 (one dimension, broadband data); switch the initial data to a
single-scale annulus to see the single-frequency rate near -1/2.
"""

import sys

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from _common import run

CONFIG = {
    "kind": "decay",
    "grid": {"extents": [3200.0], "points": [16384]},
    "initial_data": {"kind": "gaussian", "amplitude": 1.0, "width": 1.0},
    "study": {
        "times": [5.0, 6.2, 7.8, 9.7, 12.1, 15.1, 18.8, 23.4, 29.2, 36.4, 45.4, 50.0],
        "leak_tolerance": 0.01,
    },
}

if __name__ == "__main__":
    sys.exit(run("decay", CONFIG, __doc__))
