"""Named initial-data generators: the only ways data enters a scenario."""

from __future__ import annotations

import numpy as np

from .grid import ComplexField, Grid, read_snapshot
from .spectral import FREQUENCY, lp_project, transform


def gaussian(
    grid: Grid,
    amplitude: float = 1.0,
    width: float = 1.0,
    center=None,
    phase_velocity=None,
) -> ComplexField:
    """A * exp(-|x - c|^2 / (2 w^2)) * exp(i v . x)."""
    center = np.zeros(grid.dim) if center is None else np.atleast_1d(center)
    vals = np.ones(grid.shape, dtype=np.complex128)
    mesh = grid.mesh()
    r2 = sum((x - c) ** 2 for x, c in zip(mesh, center))
    vals = amplitude * np.exp(-r2 / (2.0 * width**2)) * vals
    if phase_velocity is not None:
        v = np.atleast_1d(phase_velocity)
        phase = sum(vi * x for vi, x in zip(v, mesh))
        vals = vals * np.exp(1j * phase)
    return ComplexField(grid, vals)


def plane_wave(grid: Grid, amplitude: float = 1.0, mode=None) -> ComplexField:
    """A * exp(i xi_k . x) for a lattice frequency indexed by integer mode k."""
    mode = np.zeros(grid.dim, dtype=int) if mode is None else np.atleast_1d(mode)
    mesh = grid.mesh()
    phase = sum(
        (2 * np.pi * int(k) / L) * x for k, L, x in zip(mode, grid.extent, mesh)
    )
    return ComplexField(grid, amplitude * np.exp(1j * phase))


def lattice_frequency(grid: Grid, mode) -> np.ndarray:
    mode = np.atleast_1d(mode)
    return np.array([2 * np.pi * int(k) / L for k, L in zip(mode, grid.extent)])


def annulus(grid: Grid, scale: float = 1.0, base: str = "gaussian", **kw) -> ComplexField:
    """Frequency-localised data: P_N applied to a broadband base profile."""
    if base == "gaussian":
        f = gaussian(grid, **kw)
    else:
        raise ValueError(f"unknown base profile {base!r}")
    return lp_project(f, scale, "=")


def random_field(
    grid: Grid,
    seed: int = 0,
    envelope_power: float = 2.0,
    envelope_scale: float = 1.0,
    amplitude: float = 1.0,
    mean_zero: bool = True,
) -> ComplexField:
    """Complex Gaussian frequency coefficients under a power-law envelope.

    Coefficient std at frequency xi is (1 + |xi|/scale)^(-power); seeded and
    reproducible.
    """
    rng = np.random.default_rng(seed)
    r = grid.freq_radius()
    env = (1.0 + r / envelope_scale) ** (-envelope_power)
    coef = env * (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape))
    if mean_zero:
        coef[(0,) * grid.dim] = 0.0
    fh = ComplexField(grid, coef, FREQUENCY)
    f = transform(fh, "inverse")
    norm = np.sqrt(np.sum(np.abs(f.values) ** 2) * grid.cell_volume)
    if norm > 0:
        f.values *= amplitude / norm
    return f


def annulus_random(grid: Grid, scale: float = 1.0, seed: int = 0, amplitude: float = 1.0) -> ComplexField:
    """Random data supported (up to bump tails) in the annulus of one scale."""
    f = random_field(grid, seed=seed, envelope_power=0.0, amplitude=amplitude)
    g = lp_project(f, scale, "=")
    norm = np.sqrt(np.sum(np.abs(g.values) ** 2) * grid.cell_volume)
    if norm > 0:
        g.values *= amplitude / norm
    return g


GENERATORS = {
    "gaussian": gaussian,
    "plane_wave": plane_wave,
    "annulus": annulus,
    "random": random_field,
}


def from_config(grid: Grid, block: dict) -> ComplexField:
    """Build initial data from a config block {'kind': name, ...params}."""
    block = dict(block)
    kind = block.pop("kind")
    if kind == "snapshot":
        f = read_snapshot(block.pop("path"))
        if block:
            raise ValueError(f"unknown snapshot parameters: {sorted(block)}")
        return f
    if kind == "random":
        return random_field(grid, **block)
    if kind not in GENERATORS:
        raise ValueError(f"unknown initial-data generator {kind!r}")
    return GENERATORS[kind](grid, **block)
