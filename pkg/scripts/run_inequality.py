#!/usr/bin/env python3
"""Dispersive-gain inequality sweep: ratio of the gained space-time norm of
the free flow to the L^2 size of the data, over a seeded random ensemble.
The reported max is an empirical inequality constant; rerun with a doubled
point count to check grid stability.
"""

import sys

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from _common import run

CONFIG = {
    "kind": "inequality",
    "grid": {"extents": [16.0], "points": [64]},
    "study": {
        "test": "strichartz_gain",
        "q": 8,
        "r": 4,
        "ensemble_size": 20,
        "t_end": 1.0,
        "n_samples": 33,
    },
}

if __name__ == "__main__":
    sys.exit(run("inequality", CONFIG, __doc__))
