"""Time integration of i u_t + nu^4 Lap^2 u + mu |u|^2 u = 0.

Strang splitting with exact substeps (phase rotation / free propagator),
plus a Picard fixed-point solver of the Duhamel integral equation used as
an independent oracle for the split-step integrator.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson

from .grid import FREQUENCY, PHYSICAL, ComplexField, Grid
from .spectral import dealias_mask, transform


class BlowUpError(RuntimeError):
    """State became non-finite or exceeded the amplitude ceiling."""

    def __init__(self, step: int, message: str):
        super().__init__(f"step {step}: {message}")
        self.step = step


class NonContractionError(RuntimeError):
    """Picard iteration failed to contract (horizon too long or data too large)."""


@dataclass(frozen=True)
class EquationParams:
    dispersion_coeff: float = 1.0  # nu, enters as nu^4
    nonlinearity_sign: int = +1  # mu: +1 defocusing, -1 focusing, 0 linear

    def __post_init__(self):
        if not np.isfinite(self.dispersion_coeff) or self.dispersion_coeff < 0:
            raise ValueError(f"dispersion coefficient must be finite and >= 0")
        if self.nonlinearity_sign not in (+1, -1, 0):
            raise ValueError("nonlinearity sign must be +1, -1 or 0")


@dataclass(frozen=True)
class EvolveConfig:
    params: EquationParams = EquationParams()
    dt: float = 1e-3
    t_end: float = 1.0
    dealias: bool = True
    record_every: int = 1
    snapshot_every: int | None = None
    amplitude_ceiling_factor: float = 1e6

    def __post_init__(self):
        if not (0 < self.dt < abs(self.t_end) or self.t_end == 0):
            raise ValueError("require 0 < dt < t_end")
        if self.record_every < 1:
            raise ValueError("record_every must be >= 1")
        if self.snapshot_every is not None and self.snapshot_every < 1:
            raise ValueError("snapshot_every must be >= 1")


@dataclass
class Trajectory:
    """Time-stamped samples of an evolution run."""

    times: np.ndarray
    fields: list[ComplexField] | None = None
    records: list[tuple] = field(default_factory=list)
    record_names: list[str] = field(default_factory=list)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        if self.times.ndim != 1 or (len(self.times) > 1 and not np.all(np.diff(self.times) > 0)):
            raise ValueError("sample times must be strictly increasing")
        if self.records:
            arity = len(self.records[0])
            if any(len(r) != arity for r in self.records):
                raise ValueError("per-sample record arity must be constant")

    def field_at(self, t: float) -> ComplexField:
        if self.fields is None:
            raise ValueError("trajectory stores no fields")
        i = int(np.argmin(np.abs(self.times - t)))
        if not np.isclose(self.times[i], t, rtol=0, atol=1e-9 * max(1.0, abs(t))):
            raise ValueError(f"no stored field at t = {t}")
        if self.fields[i] is None:
            raise ValueError(f"no snapshot was stored at t = {t}")
        return self.fields[i]


def nonlinear_phase_step(f: ComplexField, dt: float, mu: int) -> ComplexField:
    """Exact solution of i u_t + mu |u|^2 u = 0: u -> u * exp(i*mu*|u|^2*dt)."""
    if f.space != PHYSICAL:
        raise ValueError("nonlinear phase step expects a physical-space field")
    if mu == 0 or dt == 0:
        return f.copy()
    return ComplexField(f.grid, f.values * np.exp(1j * mu * dt * np.abs(f.values) ** 2))


def _linear_symbol(grid: Grid, dt: float, nu: float) -> np.ndarray:
    return np.exp(1j * dt * nu**4 * grid.freq_radius() ** 4)


def strang_evolve(u0: ComplexField, cfg: EvolveConfig, observers=None) -> Trajectory:
    """Strang composition: half phase step, exact linear step, half phase step.

    The optional dealias mask (1/2 rule, exact for cubic products) is applied
    after each nonlinear substep.  Each substep is an l2 isometry, so mass is
    conserved to roundoff at every step.

    `observers` is a list of (name, fn) pairs; fn(t, field) -> float is called
    on read-only views every `record_every` steps.
    """
    if u0.space != PHYSICAL:
        raise ValueError("strang_evolve expects physical-space initial data")
    observers = observers or []
    grid = u0.grid
    mu = cfg.params.nonlinearity_sign
    nu = cfg.params.dispersion_coeff
    n_steps = int(round(cfg.t_end / cfg.dt))
    if not np.isclose(n_steps * cfg.dt, cfg.t_end, rtol=1e-9):
        raise ValueError("t_end must be an integer multiple of dt")
    lin = _linear_symbol(grid, cfg.dt, nu)
    mask = dealias_mask(grid) if cfg.dealias else None
    ntot = float(np.prod(grid.points))

    vals = u0.values.copy()
    ceiling = cfg.amplitude_ceiling_factor * max(np.max(np.abs(vals)), 1e-300)

    times = [0.0]
    fields = [u0.copy()] if cfg.snapshot_every is not None else None
    records = []
    names = [name for name, _ in observers]
    if observers:
        records.append(tuple(fn(0.0, u0) for _, fn in observers))

    half = 0.5j * mu * cfg.dt
    for step in range(1, n_steps + 1):
        if mu != 0:
            vals = vals * np.exp(half * np.abs(vals) ** 2)
            if mask is not None:
                vals = np.fft.fftn(vals)
                vals *= mask
                vals = np.fft.ifftn(vals)
        vals = np.fft.fftn(vals)
        vals *= lin
        vals = np.fft.ifftn(vals)
        if mu != 0:
            vals = vals * np.exp(half * np.abs(vals) ** 2)
            if mask is not None:
                vals = np.fft.fftn(vals)
                vals *= mask
                vals = np.fft.ifftn(vals)

        if not np.all(np.isfinite(vals)):
            raise BlowUpError(step, "non-finite value in state (under-resolution?)")
        amax = np.max(np.abs(vals))
        if amax > ceiling:
            raise BlowUpError(step, f"amplitude {amax:.3e} exceeded ceiling (under-resolution?)")

        t = step * cfg.dt
        record_now = step % cfg.record_every == 0 or step == n_steps
        snapshot_now = cfg.snapshot_every is not None and (
            step % cfg.snapshot_every == 0 or step == n_steps
        )
        if record_now or snapshot_now:
            f = ComplexField(grid, vals.copy())
            times.append(t)
            if observers and record_now:
                records.append(tuple(fn(t, f) for _, fn in observers))
            elif observers:
                records.append(tuple(np.nan for _ in observers))
            if fields is not None:
                fields.append(f if snapshot_now else None)

    return Trajectory(np.array(times), fields, records, names)


def _duhamel_nodes(t_end: float, frames: int) -> np.ndarray:
    if frames < 2 or frames % 2 != 0:
        raise ValueError("frames must be an even integer >= 2")
    return np.linspace(0.0, t_end, frames + 1)


def picard_solve(
    u0: ComplexField,
    t_end: float,
    frames: int = 64,
    max_iters: int = 50,
    tol: float = 1e-12,
    mu: int = +1,
) -> Trajectory:
    """Fixed-point iteration of the Duhamel map

        u(t) = e^{it Lap^2} u0 + i int_0^t e^{i(t-s) Lap^2} (|u|^2 u)(s) ds,

    discretised by composite Simpson quadrature on `frames` equispaced
    intervals.  Works in the interaction picture v(s) = e^{-is Lap^2} u(s),
    where the Duhamel map is a plain cumulative integral.
    """
    if u0.space != PHYSICAL:
        raise ValueError("picard_solve expects physical-space initial data")
    grid = u0.grid
    ts = _duhamel_nodes(t_end, frames)
    r4 = grid.freq_radius() ** 4
    u0h = transform(u0, "forward").values
    phases = np.exp(1j * np.multiply.outer(ts, r4))  # e^{i t Lap^2} symbols

    def to_physical(vh):
        return transform(ComplexField(grid, vh, FREQUENCY), "inverse").values

    def to_freq(v):
        return transform(ComplexField(grid, v), "forward").values

    # iterate on the frequency-space node values of u
    uh = phases * u0h[None]
    residuals = []
    for it in range(max_iters):
        if mu == 0:
            new = uh.copy()
        else:
            g = np.empty_like(uh)
            for j in range(len(ts)):
                u_j = to_physical(uh[j])
                nl = mu * np.abs(u_j) ** 2 * u_j
                g[j] = np.conj(phases[j]) * to_freq(nl)
            # cumulative_simpson does not handle complex input; split parts
            integral = cumulative_simpson(
                g.real, x=ts, axis=0, initial=0.0
            ) + 1j * cumulative_simpson(g.imag, x=ts, axis=0, initial=0.0)
            new = phases * (u0h[None] + 1j * integral)
        res = float(
            np.max(np.sqrt(np.sum(np.abs(new - uh) ** 2, axis=tuple(range(1, new.ndim)))))
        )
        residuals.append(res)
        uh = new
        if res < tol:
            break
        if len(residuals) >= 3 and residuals[-1] > residuals[-2] > 0:
            raise NonContractionError(
                f"residuals stopped decreasing after {it + 1} iterations: {residuals[-3:]}"
            )
    else:
        if residuals and residuals[-1] >= tol:
            raise NonContractionError(
                f"no convergence within {max_iters} iterations (last residual {residuals[-1]:.3e})"
            )
    fields = [ComplexField(grid, to_physical(uh[j])) for j in range(len(ts))]
    return Trajectory(ts, fields)


def reference_phase_solution(phi: ComplexField, t: float) -> ComplexField:
    """w0(t) = phi * exp(i |phi|^2 t), the exact nu = 0 solution."""
    return ComplexField(phi.grid, phi.values * np.exp(1j * t * np.abs(phi.values) ** 2))


def small_dispersion_pair(
    phi: ComplexField, nu: float, t_end: float, cfg: EvolveConfig, observers=None
) -> tuple[Trajectory, Trajectory]:
    """Numerical trajectory of the nu-dispersion equation next to the exact
    phase-rotation reference, sampled at the same instants."""
    if not (0 <= nu < 1):
        raise ValueError(f"nu must lie in [0, 1), got {nu}")
    run_cfg = EvolveConfig(
        params=EquationParams(dispersion_coeff=nu, nonlinearity_sign=+1),
        dt=cfg.dt,
        t_end=t_end,
        dealias=cfg.dealias,
        record_every=cfg.record_every,
        snapshot_every=cfg.snapshot_every or cfg.record_every,
        amplitude_ceiling_factor=cfg.amplitude_ceiling_factor,
    )
    traj = strang_evolve(phi, run_cfg, observers)
    ref_fields = [reference_phase_solution(phi, t) for t in traj.times]
    ref = Trajectory(traj.times.copy(), ref_fields)
    return traj, ref
