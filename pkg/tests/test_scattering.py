"""Forward/inverse wave limits, Cauchy defects and the scattering identities."""

import numpy as np
import pytest

from b4nls.evolution import EquationParams, EvolveConfig, Trajectory, strang_evolve
from b4nls.grid import ComplexField, Grid
from b4nls.initial_data import gaussian
from b4nls.observables import NormSpec, energy, mass, norm
from b4nls.scattering import (
    H2,
    HorizonError,
    IdentityReport,
    ScatterResult,
    SmallnessError,
    forward_wave_limit,
    inverse_wave_operator,
    scattering_defect,
)
from b4nls.spectral import free_propagate

GRID = Grid((32.0,), (128,))


def _free_trajectory(u0, t_end=4.0, n=9):
    ts = np.linspace(0.0, t_end, n)
    return Trajectory(ts, [free_propagate(u0, float(t)) for t in ts])


# ---------------------------------------------------------------------------
# node validation


def test_node_validation():
    u = gaussian(GRID, 0.5, 1.0)
    with pytest.raises(ValueError):
        forward_wave_limit(Trajectory(np.linspace(0, 1, 5)))  # no fields
    with pytest.raises(ValueError):
        forward_wave_limit(_free_trajectory(u, n=4))  # even count
    with pytest.raises(ValueError):
        forward_wave_limit(_free_trajectory(u, n=3))  # fewer than 5
    ts = np.array([0.0, 1.0, 2.0, 3.0, 5.0])  # not equispaced
    traj = Trajectory(ts, [free_propagate(u, float(t)) for t in ts])
    with pytest.raises(ValueError):
        forward_wave_limit(traj)
    ts = np.linspace(1.0, 5.0, 5)  # does not start at zero
    traj = Trajectory(ts, [free_propagate(u, float(t)) for t in ts])
    with pytest.raises(ValueError):
        forward_wave_limit(traj)


def test_result_validation():
    rep = IdentityReport(1.0, 1.0, 2.0, 2.0)
    u = gaussian(GRID, 0.5, 1.0)
    with pytest.raises(ValueError):
        ScatterResult(u, horizon=-1.0, tail_estimate=0.0, identity_report=rep, defect_table=[])
    with pytest.raises(ValueError):
        ScatterResult(u, horizon=1.0, tail_estimate=-0.1, identity_report=rep, defect_table=[])


# ---------------------------------------------------------------------------
# forward wave limit


def test_linear_case_returns_initial_data_exactly():
    u0 = gaussian(GRID, 0.5, 1.0)
    res = forward_wave_limit(_free_trajectory(u0), mu=0)
    # u_plus is the stored t = 0 frame, which went through one transform pair
    assert np.max(np.abs(res.u_plus.values - u0.values)) < 1e-14
    assert res.tail_estimate == 0.0
    assert res.defect_table == []
    assert res.identity_report.mass_residual < 1e-15


def test_horizon_error_on_growing_increments():
    u = gaussian(GRID, 0.5, 1.0)
    ts = np.linspace(0.0, 4.0, 9)
    fields = [ComplexField(GRID, (1.0 + t) * u.values) for t in ts]
    with pytest.raises(HorizonError):
        forward_wave_limit(Trajectory(ts, fields))


def test_forward_limit_identities_on_benchmark():
    g = Grid((200.0,), (512,))
    u0 = gaussian(g, 0.1, 1.0)
    cfg = EvolveConfig(
        params=EquationParams(1.0, +1), dt=1e-2, t_end=20.0, record_every=2000, snapshot_every=5
    )
    res = forward_wave_limit(strang_evolve(u0, cfg))
    assert res.horizon == 20.0
    assert res.identity_report.mass_residual < 1e-6
    assert res.identity_report.energy_residual < 0.05
    assert 0 < res.tail_estimate < 0.01
    # report round-trips the identity numbers
    rep = res.report()
    assert rep["mass_in"] == mass(u0)
    assert rep["twice_energy_in"] == 2.0 * energy(u0)
    assert len(rep["defect_table"]) == 3


# ---------------------------------------------------------------------------
# Cauchy defect


def test_defect_vanishes_for_equal_times_and_free_flow():
    u0 = gaussian(GRID, 0.5, 1.0)
    traj = _free_trajectory(u0)
    assert scattering_defect(traj, 1.0, 1.0) == 0.0
    # the interaction-picture path of a free solution is constant
    assert scattering_defect(traj, 0.5, 4.0) < 1e-12


def test_defect_triangle_inequality():
    g = Grid((64.0,), (256,))
    u0 = gaussian(g, 0.5, 1.0)
    cfg = EvolveConfig(dt=1e-2, t_end=4.0, record_every=100, snapshot_every=100)
    traj = strang_evolve(u0, cfg)
    d13 = scattering_defect(traj, 1.0, 4.0)
    d12 = scattering_defect(traj, 1.0, 2.0)
    d23 = scattering_defect(traj, 2.0, 4.0)
    assert d13 <= d12 + d23 + 1e-12


# ---------------------------------------------------------------------------
# inverse wave operator


def test_inverse_validation():
    u = gaussian(GRID, 0.1, 1.0)
    with pytest.raises(ValueError):
        inverse_wave_operator(u, t_start=-1.0, t_max=2.0)
    with pytest.raises(ValueError):
        inverse_wave_operator(u, t_start=3.0, t_max=2.0)
    with pytest.raises(ValueError):
        inverse_wave_operator(u, t_start=0.0, t_max=2.0, frames=5)


def test_inverse_zero_state_maps_to_zero():
    z = ComplexField(GRID, np.zeros(GRID.shape, dtype=complex))
    rec = inverse_wave_operator(z, t_start=1.0, t_max=2.0, frames=8)
    assert np.all(rec.values == 0)


def test_inverse_linear_case_returns_the_state():
    u = gaussian(GRID, 0.5, 1.0)
    rec = inverse_wave_operator(u, t_start=0.0, t_max=2.0, frames=8, mu=0)
    assert np.max(np.abs(rec.values - u.values)) < 1e-13
    rec = inverse_wave_operator(u, t_start=1.0, t_max=2.0, frames=8, mu=0, dt=1e-2)
    assert np.max(np.abs(rec.values - u.values)) < 1e-11


def test_inverse_smallness_guard():
    u = gaussian(GRID, 3.0, 1.0)
    with pytest.raises(SmallnessError):
        inverse_wave_operator(u, t_start=0.0, t_max=2.0, frames=32, max_iters=10)


def test_forward_inverse_round_trip():
    g = Grid((200.0,), (512,))
    u0 = gaussian(g, 0.1, 1.0)
    cfg = EvolveConfig(
        params=EquationParams(1.0, +1), dt=1e-2, t_end=20.0, record_every=2000, snapshot_every=5
    )
    res = forward_wave_limit(strang_evolve(u0, cfg))
    rec = inverse_wave_operator(res.u_plus, t_start=5.0, t_max=20.0, frames=300, dt=1e-2)
    assert norm(rec - u0, H2) / norm(u0, H2) < 5e-3
