"""End-to-end acceptance checks: one pass/fail line per headline criterion.

Each test prints a single `PASS`/`FAIL` summary line with the measured
numbers, so running this module with `-s` (or reading captured output)
gives the complete scoreboard.
"""

import time

import numpy as np
import pytest

from b4nls.analysis import (
    IllPosedParams,
    apply_rescale_g,
    decay_study,
    illposed_check,
    scaling_exponent,
    smalldisp_study,
    strichartz_gain_study,
)
from b4nls.evolution import EquationParams, EvolveConfig, Trajectory, picard_solve, strang_evolve
from b4nls.grid import ComplexField, Grid
from b4nls.initial_data import gaussian, plane_wave, random_field
from b4nls.observables import (
    NormSpec,
    default_weight,
    energy,
    gradient,
    interaction_morawetz,
    local_mass,
    mass,
    morawetz_action,
    morawetz_action_rhs,
    norm,
)
from b4nls.scattering import forward_wave_limit, inverse_wave_operator
from b4nls.spectral import (
    bernstein_ratio,
    free_propagate,
    lp_project,
    lp_symbol,
    transform,
)


def _check(name: str, ok: bool, detail: str):
    print(f"{'PASS' if ok else 'FAIL'} [{name}] {detail}")
    assert ok, f"{name}: {detail}"


# ---------------------------------------------------------------------------
# 1. free propagator exactness


def test_criterion_01_propagator_exact():
    g = Grid((16.0,), (64,))
    u = plane_wave(g, 1.0, [3])
    xi = 2 * np.pi * 3 / 16.0
    t = 0.37
    expected = np.exp(1j * t * xi**4) * u.values
    err_mode = np.max(np.abs(free_propagate(u, t).values - expected))

    gs = Grid((8.0,), (16,))
    rng = np.random.default_rng(0)
    f = ComplexField(gs, rng.standard_normal(16) + 1j * rng.standard_normal(16))
    a = free_propagate(free_propagate(f, 0.4), 0.7)
    b = free_propagate(f, 1.1)
    err_group = np.max(np.abs(a.values - b.values))
    err = max(err_mode, err_group)
    _check("propagator", err <= 1e-12, f"eigenmode+group-law max error {err:.3e} <= 1e-12")


# ---------------------------------------------------------------------------
# 2. conservation laws


def test_criterion_02_conservation():
    g = Grid((64.0,), (512,))
    u0 = gaussian(g, 1.0, 1.0)

    def drifts(dt):
        cfg = EvolveConfig(dt=dt, t_end=5.0, record_every=int(round(0.25 / dt)))
        traj = strang_evolve(
            u0, cfg, [("m", lambda t, f: mass(f)), ("e", lambda t, f: energy(f))]
        )
        ms = np.array([r[0] for r in traj.records])
        es = np.array([r[1] for r in traj.records])
        return np.max(np.abs(ms - ms[0])) / ms[0], np.max(np.abs(es - es[0])) / es[0]

    m1, e1 = drifts(1e-3)
    _, e2 = drifts(5e-4)
    order = np.log2(e1 / e2)
    ok = m1 <= 1e-10 and 1.8 <= order <= 2.2
    _check("conservation", ok, f"mass drift {m1:.3e} <= 1e-10, energy order {order:.3f} in [1.8, 2.2]")


# ---------------------------------------------------------------------------
# 3. small-dispersion convergence law


def test_criterion_03_small_dispersion_slope():
    g = Grid((32.0,), (512,))
    phi = gaussian(g, 2.5, 1.0)

    def slope(dt):
        cfg = EvolveConfig(dt=dt, t_end=1.0, record_every=int(round(0.05 / dt)))
        return smalldisp_study(phi, [0.2, 0.1, 0.05], 1.0, 2, cfg).slope

    s1, s2 = slope(5e-4), slope(2.5e-4)
    converged = abs(s1 - s2) / abs(s1) < 5e-4  # three significant digits
    ok = 2.5 <= s1 <= 3.5 and converged
    _check(
        "small-dispersion",
        ok,
        f"slope {s1:.4f} in [2.5, 3.5], dt-refined slope {s2:.4f} (rel diff {abs(s1 - s2) / abs(s1):.1e})",
    )


# ---------------------------------------------------------------------------
# 4. dispersive decay exponents


def test_criterion_04a_decay_broadband_one_dim():
    u0 = gaussian(Grid((3200.0,), (16384,)), 1.0, 1.0)
    fit = decay_study(u0, np.geomspace(5.0, 50.0, 12))
    ok = abs(fit.slope + 0.25) <= 0.05
    _check("decay-1d-broadband", ok, f"sup-norm slope {fit.slope:.4f} within -0.25 +/- 0.05")


def test_criterion_04b_decay_single_scale_one_dim():
    g = Grid((3200.0,), (16384,))
    u0 = lp_project(gaussian(g, 1.0, 1.0), 1, "=")
    fit = decay_study(u0, np.geomspace(5.0, 50.0, 12))
    ok = abs(fit.slope + 0.5) <= 0.1
    _check("decay-1d-single-scale", ok, f"sup-norm slope {fit.slope:.4f} within -0.5 +/- 0.1")


def test_criterion_04c_decay_two_dim():
    u0 = gaussian(Grid((1400.0, 1400.0), (1024, 1024)), 1.0, 1.1)
    fit = decay_study(u0, np.geomspace(2.0, 20.0, 10))
    ok = abs(fit.slope + 0.5) <= 0.05
    _check("decay-2d", ok, f"sup-norm slope {fit.slope:.4f} within -0.5 +/- 0.05")


# ---------------------------------------------------------------------------
# 5. rescaling algebra


def test_criterion_05_scaling_ratios():
    assert scaling_exponent(NormSpec.hsob(2.0), 8) == 0
    assert scaling_exponent(NormSpec("Z"), 8) == 0
    g = Grid((32.0,), (512,))
    u = gaussian(g, 1.0, 1.0)
    worst = 0.0
    for h in (2, 4):
        v = apply_rescale_g(u, h)
        for spec, e in ((NormSpec.lebesgue(2), 1.5), (NormSpec.hsob(2.0), 3.5)):
            ratio = norm(v, spec) / norm(u, spec)
            worst = max(worst, abs(ratio / h**e - 1.0))
    _check("scaling", worst <= 1e-8, f"max relative ratio deviation {worst:.3e} <= 1e-8")


# ---------------------------------------------------------------------------
# 6. inflation parameter identities


def test_criterion_06_illposed_exact():
    from fractions import Fraction

    bad = []
    for n in (9, 10, 12):
        for eps in (Fraction(1, 10), Fraction(1, 100)):
            for nu in (Fraction(1, 100), Fraction(1, 1000)):
                rep = illposed_check(IllPosedParams(n, eps, nu))
                if not (rep.identity_exact and rep.lam_nu_gt_one and rep.cond_smallness):
                    bad.append((n, eps, nu))
    _check("illposed", not bad, f"12 exact parameter combinations verified, failures: {bad}")


# ---------------------------------------------------------------------------
# 7. split-step vs fixed-point oracle


def test_criterion_07_picard_vs_strang():
    g = Grid((64.0,), (256,))
    u0 = gaussian(g, 0.1, 1.0)
    steps = int(round(0.1 / 1e-4))
    cfg = EvolveConfig(dt=1e-4, t_end=0.1, record_every=steps, snapshot_every=steps)
    uT = strang_evolve(u0, cfg).field_at(0.1)
    ref = picard_solve(u0, 0.1, frames=64).field_at(0.1)
    dist = norm(uT - ref, NormSpec.lebesgue(2))
    _check("picard-vs-strang", dist <= 1e-8, f"L2 distance {dist:.3e} <= 1e-8")


# ---------------------------------------------------------------------------
# 8. Morawetz derivative identity


def test_criterion_08_morawetz_identity():
    g = Grid((64.0,), (512,))
    u = gaussian(g, 1.0, 1.3, center=[1.3], phase_velocity=[0.6])
    w = default_weight(g)
    dt = 1e-4
    cfg = EvolveConfig(
        params=EquationParams(1.0, +1), dt=dt, t_end=2 * dt, record_every=1, snapshot_every=1
    )
    traj = strang_evolve(u, cfg)
    u0, u1, u2 = traj.fields
    fd = (morawetz_action(u2, w) - morawetz_action(u0, w)) / (2 * dt)
    forcing = ComplexField(g, np.abs(u1.values) ** 2 * u1.values)
    rhs = morawetz_action_rhs(u1, forcing, w)
    rel = abs(fd - rhs) / abs(fd)
    _check("morawetz", rel <= 0.01, f"d/dt identity relative error {rel:.3e} <= 1e-2")


# ---------------------------------------------------------------------------
# 9. interaction Morawetz


def _bound_ratio(f):
    half = norm(f, NormSpec.hsob(0.5))
    return abs(interaction_morawetz(f)) / (mass(f) * half**2)


def test_criterion_09_interaction_morawetz():
    g = Grid((16.0,), (64,))
    rng = np.random.default_rng(5)
    f = ComplexField(g, rng.standard_normal(64) + 1j * rng.standard_normal(64))
    got = interaction_morawetz(f)
    xs, dv = g.axis(0), g.cell_volume
    rho = np.abs(f.values) ** 2
    p = np.imag(np.conj(f.values) * gradient(f)[0].values)
    want = (
        2.0
        * dv**2
        * sum(rho[j] * np.sign(xs[i] - xs[j]) * p[i] for i in range(64) for j in range(64))
    )
    err = abs(got - want)

    def ensemble_max(points):
        grid = Grid((16.0,), (points,))
        return max(
            _bound_ratio(random_field(grid, seed=s, envelope_power=2.0)) for s in range(20)
        )

    c1, c2 = ensemble_max(64), ensemble_max(128)
    stable = 0.5 <= c2 / c1 <= 2.0
    ok = err <= 1e-8 and stable
    _check(
        "interaction-morawetz",
        ok,
        f"double-sum error {err:.3e} <= 1e-8, ensemble constant {c1:.3f} -> {c2:.3f} within 2x",
    )


# ---------------------------------------------------------------------------
# 10. scattering benchmark


def test_criterion_10_scattering():
    t_begin = time.time()
    g = Grid((800.0,), (2048,))
    u0 = gaussian(g, 0.1, 1.0)
    dt, T, stride = 1e-2, 200.0, 5
    cfg = EvolveConfig(
        params=EquationParams(1.0, +1),
        dt=dt,
        t_end=T,
        record_every=int(round(T / dt)),
        snapshot_every=stride,
    )
    traj = strang_evolve(u0, cfg)

    # truncated windows share the stored nodes
    results = {}
    for horizon in (50.0, 100.0, 200.0):
        n_nodes = int(round(horizon / (stride * dt))) + 1
        sub = Trajectory(traj.times[:n_nodes], traj.fields[:n_nodes])
        results[horizon] = forward_wave_limit(sub)

    res = results[200.0]
    mass_res = res.identity_report.mass_residual
    e_res = [results[h].identity_report.energy_residual for h in (50.0, 100.0, 200.0)]
    rec = inverse_wave_operator(res.u_plus, t_start=50.0, t_max=200.0, frames=3000, dt=dt)
    rt = norm(rec - u0, NormSpec.sob(2))
    elapsed = time.time() - t_begin
    ok = (
        mass_res <= 1e-6
        and max(e_res) <= 0.05
        and e_res[0] > e_res[1] > e_res[2]
        and rt <= 1e-3
        and elapsed < 600
    )
    _check(
        "scattering",
        ok,
        f"mass residual {mass_res:.3e} <= 1e-6, energy residuals {[f'{e:.2e}' for e in e_res]} "
        f"decreasing <= 5e-2, round trip {rt:.3e} <= 1e-3, {elapsed:.0f}s < 600s",
    )


# ---------------------------------------------------------------------------
# 11. structural property suites (each under a minute)


def test_criterion_11a_projection_partition():
    t0 = time.time()
    g = Grid((16.0,), (128,))
    rng = np.random.default_rng(0)
    f = ComplexField(g, rng.standard_normal(128) + 1j * rng.standard_normal(128))
    fh = transform(f, "forward")
    from b4nls.grid import lattice_scales

    acc = np.zeros(g.shape, dtype=complex)
    for N in lattice_scales(g):
        acc = acc + lp_symbol(g, N, "=") * fh.values
    # dyadic pieces plus the residual low-pass below the smallest scale
    low = lp_symbol(g, lattice_scales(g)[0], "<")
    acc = acc + low * fh.values
    err = np.max(np.abs(acc - fh.values))
    elapsed = time.time() - t0
    _check("partition", err <= 1e-10 and elapsed < 60, f"telescoping error {err:.3e}, {elapsed:.1f}s")


def test_criterion_11b_almost_orthogonality():
    t0 = time.time()
    g = Grid((16.0,), (128,))
    s2, s16 = lp_symbol(g, 2, "="), lp_symbol(g, 16, "=")
    sym_err = np.max(np.abs(s2 * s16))
    rng = np.random.default_rng(1)
    f = ComplexField(g, rng.standard_normal(128) + 1j * rng.standard_normal(128))
    seq = lp_project(lp_project(f, 2), 16)
    seq_err = np.max(np.abs(seq.values))
    elapsed = time.time() - t0
    ok = sym_err == 0.0 and seq_err <= 1e-14 and elapsed < 60
    _check(
        "almost-orthogonality",
        ok,
        f"separated symbols product {sym_err:.1e}, sequential {seq_err:.3e}, {elapsed:.1f}s",
    )


def test_criterion_11c_bernstein_two_sided():
    t0 = time.time()
    from b4nls.initial_data import annulus_random

    g = Grid((16.0,), (256,))
    worst_low, worst_high = np.inf, 0.0
    for s in (-1.0, 1.0, 2.0):
        for N in (1, 2, 4, 8):
            for seed in range(5):
                f = annulus_random(g, N, seed=seed)
                r = bernstein_ratio(f, N, s, 2)
                lo, hi = 2.0 ** (-abs(s)), 2.0 ** (2 * abs(s))
                assert lo <= r <= hi, (s, N, seed, r)
                worst_low = min(worst_low, r)
                worst_high = max(worst_high, r)
    elapsed = time.time() - t0
    _check(
        "bernstein",
        elapsed < 60,
        f"ratios within [2^-|s|, 2^2|s|] across sweep (range {worst_low:.3f}..{worst_high:.3f}), {elapsed:.1f}s",
    )


def test_criterion_11d_gain_stability():
    t0 = time.time()
    coarse = strichartz_gain_study(20, 8, 4, Grid((16.0,), (64,)))
    fine = strichartz_gain_study(20, 8, 4, Grid((16.0,), (128,)))
    ratio = fine["max"] / coarse["max"]
    elapsed = time.time() - t0
    ok = 0.5 <= ratio <= 2.0 and elapsed < 60
    _check("gain-stability", ok, f"ensemble max ratio under doubling {ratio:.3f} in [0.5, 2], {elapsed:.1f}s")


def test_criterion_11e_local_mass_trend():
    t0 = time.time()
    g = Grid((64.0,), (256,))
    u0 = gaussian(g, 1.0, 1.0)
    cfg = EvolveConfig(dt=1e-2, t_end=0.5, record_every=50, snapshot_every=50)
    uT = strang_evolve(u0, cfg).field_at(0.5)
    drifts = [abs(local_mass(uT, [0.0], R) - local_mass(u0, [0.0], R)) for R in (2.0, 4.0, 8.0)]
    elapsed = time.time() - t0
    ok = drifts[0] > drifts[1] > drifts[2] and elapsed < 60
    _check(
        "local-mass-trend",
        ok,
        f"drift decreasing under radius doubling {[f'{d:.2e}' for d in drifts]}, {elapsed:.1f}s",
    )
