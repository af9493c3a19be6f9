"""Asymptotic states of the defocusing cubic biharmonic equation.

Forward wave limit u+ = u0 + i int_0^T e^{-is Lap^2} |u|^2 u ds, the Cauchy
defect of t -> e^{-it Lap^2} u(t), the inverse wave operator as a fixed point
of the truncated Duhamel map, and the mass / energy identities

    M(u+) = M(u0),        2 E(u0) = ||u+||_{Hdot^2}^2 .
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_simpson

from .evolution import EquationParams, EvolveConfig, Trajectory, strang_evolve
from .grid import FREQUENCY, ComplexField
from .observables import NormSpec, energy, mass, norm
from .spectral import free_propagate, transform


class HorizonError(RuntimeError):
    """Duhamel increments are not settling within the supplied window."""


class SmallnessError(RuntimeError):
    """Inverse-operator iteration failed to contract (data too large or
    window too long)."""


H2 = NormSpec.sob(2)


@dataclass
class IdentityReport:
    mass_in: float
    mass_out: float
    twice_energy_in: float
    h2_out_sq: float

    @property
    def mass_residual(self) -> float:
        return abs(self.mass_out - self.mass_in) / self.mass_in

    @property
    def energy_residual(self) -> float:
        return abs(self.twice_energy_in - self.h2_out_sq) / self.twice_energy_in


@dataclass
class ScatterResult:
    u_plus: ComplexField
    horizon: float
    tail_estimate: float
    identity_report: IdentityReport
    defect_table: list  # (t1, t2, defect) rows

    def __post_init__(self):
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.tail_estimate < 0:
            raise ValueError("tail estimate must be nonnegative")

    def report(self) -> dict:
        """JSON-ready summary (the field itself is serialized separately)."""
        return {
            "horizon": self.horizon,
            "tail_estimate": self.tail_estimate,
            "mass_residual": self.identity_report.mass_residual,
            "energy_residual": self.identity_report.energy_residual,
            "mass_in": self.identity_report.mass_in,
            "mass_out": self.identity_report.mass_out,
            "twice_energy_in": self.identity_report.twice_energy_in,
            "h2_out_sq": self.identity_report.h2_out_sq,
            "defect_table": [list(row) for row in self.defect_table],
        }


def _stored_nodes(traj: Trajectory):
    if traj.fields is None:
        raise ValueError("trajectory stores no fields")
    idx = [i for i, f in enumerate(traj.fields) if f is not None]
    ts = traj.times[idx]
    if len(ts) < 5 or len(ts) % 2 == 0:
        raise ValueError(
            "need an odd number (>= 5) of stored fields for composite Simpson"
        )
    if not np.allclose(np.diff(ts), ts[1] - ts[0], rtol=1e-8):
        raise ValueError("stored fields must be equispaced in time")
    if not np.isclose(ts[0], 0.0):
        raise ValueError("quadrature window must start at t = 0")
    return idx, ts


def _duhamel_cumulative(traj: Trajectory, idx, ts, mu: int) -> np.ndarray:
    """Cumulative Simpson integral of g(s) = e^{-is Lap^2} (mu |u|^2 u)(s),
    as frequency-space node values."""
    grid = traj.fields[idx[0]].grid
    r4 = grid.freq_radius() ** 4
    g = np.empty((len(ts),) + grid.shape, dtype=np.complex128)
    for j, i in enumerate(idx):
        u = traj.fields[i].values
        nl = mu * np.abs(u) ** 2 * u
        nlh = transform(ComplexField(grid, nl), "forward").values
        g[j] = np.exp(-1j * ts[j] * r4) * nlh
    # cumulative_simpson does not handle complex input; split parts
    return cumulative_simpson(g.real, x=ts, axis=0, initial=0.0) + 1j * cumulative_simpson(
        g.imag, x=ts, axis=0, initial=0.0
    )


def forward_wave_limit(traj: Trajectory, mu: int = +1) -> ScatterResult:
    """u+ = u0 + i int_0^T e^{-is Lap^2}(mu |u|^2 u)(s) ds over the stored
    window, by composite Simpson in the interaction picture.

    The tail estimate is the H^2 size of the increment contributed by the
    last quarter of the window; if the quarter increments are growing the
    window has not reached the asymptotic regime and a HorizonError is
    raised.
    """
    idx, ts = _stored_nodes(traj)
    grid = traj.fields[idx[0]].grid
    u0 = traj.fields[idx[0]]
    horizon = float(ts[-1])

    if mu == 0:
        u_plus = u0.copy()
        tail = 0.0
        defects = []
    else:
        integral = _duhamel_cumulative(traj, idx, ts, mu)
        u0h = transform(u0, "forward").values

        def partial_wave(j: int) -> ComplexField:
            fh = ComplexField(grid, u0h + 1j * integral[j], FREQUENCY)
            return transform(fh, "inverse")

        nq = len(ts) - 1
        quarters = [int(round(nq * k / 4)) for k in range(5)]
        increments = [
            norm(partial_wave(b) - partial_wave(a), H2)
            for a, b in zip(quarters[:-1], quarters[1:])
        ]
        if increments[-1] > increments[0]:
            raise HorizonError(
                "Duhamel quarter-increments are growing "
                f"({increments[0]:.3e} -> {increments[-1]:.3e}); extend the window"
            )
        tail = increments[-1]
        u_plus = partial_wave(nq)
        defects = []
        for k in (8, 4, 2):
            t1, t2 = horizon / k, 2 * horizon / k
            j1, j2 = (int(np.argmin(np.abs(ts - t))) for t in (t1, t2))
            if j1 != j2:
                defects.append(
                    (float(ts[j1]), float(ts[j2]), scattering_defect(traj, ts[j1], ts[j2]))
                )

    ident = IdentityReport(
        mass_in=mass(u0),
        mass_out=mass(u_plus),
        twice_energy_in=2.0 * energy(u0),
        h2_out_sq=norm(u_plus, NormSpec.hsob(2)) ** 2,
    )
    return ScatterResult(
        u_plus=u_plus,
        horizon=horizon,
        tail_estimate=tail,
        identity_report=ident,
        defect_table=defects,
    )


def scattering_defect(traj: Trajectory, t1: float, t2: float) -> float:
    """||e^{-i t1 Lap^2} u(t1) - e^{-i t2 Lap^2} u(t2)||_{H^2}.

    The map t -> e^{-it Lap^2} u(t) is constant for a free evolution and
    Cauchy for a scattering one; this is its modulus of variation.
    """
    f1 = free_propagate(traj.field_at(t1), -float(t1))
    f2 = free_propagate(traj.field_at(t2), -float(t2))
    return norm(f1 - f2, H2)


def inverse_wave_operator(
    u_plus: ComplexField,
    t_start: float,
    t_max: float,
    frames: int = 400,
    dt: float = 1e-2,
    tol: float = 1e-10,
    max_iters: int = 40,
    mu: int = +1,
    dealias: bool = True,
) -> ComplexField:
    """Reconstruct u(0) from the asymptotic state u+.

    Fixed-point iteration of the truncated Duhamel map

        Phi(u)(t) = e^{it Lap^2} u+ - i int_t^{t_max} e^{i(t-s) Lap^2}
                    (mu |u|^2 u)(s) ds

    on [t_start, t_max] (composite Simpson on `frames` intervals), followed
    by backward evolution from t_start to 0.  Backward evolution reuses the
    forward integrator through the conjugation symmetry: conj(u(t_start - t))
    solves the same equation.
    """
    if not (0 <= t_start < t_max):
        raise ValueError("require 0 <= t_start < t_max")
    if frames < 2 or frames % 2 != 0:
        raise ValueError("frames must be an even integer >= 2")
    grid = u_plus.grid
    ts = np.linspace(t_start, t_max, frames + 1)
    r4 = grid.freq_radius() ** 4
    uph = transform(u_plus, "forward").values
    phases = np.exp(1j * np.multiply.outer(ts, r4))

    vh = np.broadcast_to(uph, (len(ts),) + grid.shape).copy()
    if mu != 0:
        residuals = []
        for it in range(max_iters):
            g = np.empty_like(vh)
            for j in range(len(ts)):
                u_j = transform(ComplexField(grid, phases[j] * vh[j], FREQUENCY), "inverse").values
                nl = mu * np.abs(u_j) ** 2 * u_j
                g[j] = np.conj(phases[j]) * transform(ComplexField(grid, nl), "forward").values
            cum = cumulative_simpson(g.real, x=ts, axis=0, initial=0.0) + 1j * cumulative_simpson(
                g.imag, x=ts, axis=0, initial=0.0
            )
            new = uph[None] - 1j * (cum[-1][None] - cum)
            res = float(
                np.max(np.sqrt(np.sum(np.abs(new - vh) ** 2, axis=tuple(range(1, new.ndim)))))
            )
            residuals.append(res)
            vh = new
            if res < tol:
                break
            if len(residuals) >= 3 and residuals[-1] > residuals[-2] > 0:
                raise SmallnessError(
                    f"residuals stopped decreasing after {it + 1} iterations: "
                    f"{residuals[-3:]} (shrink the window or the data)"
                )
        else:
            if residuals and residuals[-1] >= tol:
                raise SmallnessError(
                    f"no contraction within {max_iters} iterations "
                    f"(last residual {residuals[-1]:.3e})"
                )

    u_start = transform(ComplexField(grid, phases[0] * vh[0], FREQUENCY), "inverse")
    if t_start == 0:
        return u_start
    cfg = EvolveConfig(
        params=EquationParams(dispersion_coeff=1.0, nonlinearity_sign=mu),
        dt=dt,
        t_end=float(t_start),
        dealias=dealias,
        record_every=max(1, int(round(t_start / dt))),
        snapshot_every=max(1, int(round(t_start / dt))),
    )
    back = strang_evolve(ComplexField(grid, np.conj(u_start.values)), cfg)
    rec = back.field_at(float(t_start))
    return ComplexField(grid, np.conj(rec.values))
