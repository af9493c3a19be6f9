#!/usr/bin/env python3
"""Scattering benchmark: evolve small defocusing data to t = 200, extract
the asymptotic state u+ by Duhamel quadrature, check the mass and energy
identities, and reconstruct u(0) through the inverse wave operator.

Takes about half a minute.
"""

import sys

sys.path.insert(0, __file__.rsplit("/", 1)[0])
from _common import run

CONFIG = {
    "kind": "scatter",
    "grid": {"extents": [800.0], "points": [2048]},
    "equation": {"dispersion_coeff": 1.0, "nonlinearity_sign": 1},
    "integrator": {"dt": 1e-2, "t_end": 200.0},
    "initial_data": {"kind": "gaussian", "amplitude": 0.1, "width": 1.0},
    "study": {"quadrature_stride": 5, "round_trip": True, "t_start": 50.0, "frames": 3000},
}

if __name__ == "__main__":
    sys.exit(run("scatter", CONFIG, __doc__))
