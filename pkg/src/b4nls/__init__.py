"""Pseudospectral workbench for the cubic fourth-order Schrodinger equation
i u_t + Lap^2 u + |u|^2 u = 0 on periodic boxes."""

from .grid import ComplexField, DyadicScale, Grid, read_snapshot, write_snapshot
from .spectral import (
    apply_multiplier,
    bernstein_ratio,
    bump,
    fractional_derivative,
    free_propagate,
    lp_project,
    transform,
)

__version__ = "0.1.0"
