"""Functionals and norms evaluated on fields and trajectories: mass, energy,
local mass, Sobolev/Lebesgue/space-time norms, admissibility, brackets,
Morawetz and interaction-Morawetz actions, dyadic square functions."""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import sympy

from .evolution import Trajectory
from .grid import FREQUENCY, PHYSICAL, ComplexField, Grid
from .spectral import (
    DEFAULT_PHASE_SIGN,
    apply_multiplier,
    bump,
    lattice_scales,
    lp_project,
    mean_mode_fraction,
    transform,
)


class GeometryError(ValueError):
    pass


class NormUsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# spectral derivatives


def gradient(f: ComplexField) -> list[ComplexField]:
    """Spectral partial derivatives (one field per axis)."""
    if f.space != PHYSICAL:
        raise NormUsageError("gradient expects a physical-space field")
    # with the default +i<y,xi> forward phase, d/dx_j acts as -i*xi_j
    sgn = -1j * DEFAULT_PHASE_SIGN
    fh = transform(f, "forward")
    out = []
    for xi in f.grid.freq_mesh():
        gh = ComplexField(f.grid, sgn * xi * fh.values, FREQUENCY)
        out.append(transform(gh, "inverse"))
    return out


def laplacian(f: ComplexField) -> ComplexField:
    return apply_multiplier(f, lambda xis: -sum(x**2 for x in xis))


def hessian(f: ComplexField) -> list[list[ComplexField]]:
    """Second spectral derivatives d2u/dx_j dx_k (symmetric)."""
    fh = transform(f, "forward")
    mesh = f.grid.freq_mesh()
    n = f.grid.dim
    out = [[None] * n for _ in range(n)]
    for j in range(n):
        for k in range(j, n):
            gh = ComplexField(f.grid, -mesh[j] * mesh[k] * fh.values, FREQUENCY)
            g = transform(gh, "inverse")
            out[j][k] = g
            out[k][j] = g
    return out


# ---------------------------------------------------------------------------
# basic quadrature functionals


def _integrate(grid: Grid, vals: np.ndarray) -> float:
    return float(np.sum(vals) * grid.cell_volume)


def mass(f: ComplexField) -> float:
    """integral |u|^2 dx (rectangle rule, spectrally exact for band-limited u)."""
    if f.space != PHYSICAL:
        raise NormUsageError("mass expects a physical-space field")
    return _integrate(f.grid, np.abs(f.values) ** 2)


def energy(f: ComplexField, dispersion_coeff: float = 1.0) -> float:
    """integral (nu^4 |Lap u|^2 / 2 + |u|^4 / 4) dx, Laplacian spectral."""
    if f.space != PHYSICAL:
        raise NormUsageError("energy expects a physical-space field")
    lap = laplacian(f)
    return _integrate(
        f.grid,
        dispersion_coeff**4 * np.abs(lap.values) ** 2 / 2 + np.abs(f.values) ** 4 / 4,
    )


def _shifted_mesh(grid: Grid, x0) -> list[np.ndarray]:
    """Minimal-image displacements x - x0 on the periodic box."""
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (grid.dim,):
        raise GeometryError(f"center must have {grid.dim} components")
    out = []
    for i, x in enumerate(grid.mesh()):
        L = grid.extent[i]
        out.append((x - x0[i] + L / 2) % L - L / 2)
    return out


def local_mass(f: ComplexField, x0, R: float) -> float:
    """integral |u|^2 psi^4((x - x0)/R) dx with the shared radial bump psi."""
    if R <= 0:
        raise GeometryError("radius must be positive")
    if 2 * R > min(f.grid.extent) / 2:
        raise GeometryError(
            f"ball of radius 2R = {2 * R} does not fit in the box half-extent"
        )
    disp = _shifted_mesh(f.grid, x0)
    r = np.sqrt(sum(d**2 for d in disp))
    w = bump(r / R) ** 4
    return _integrate(f.grid, np.abs(f.values) ** 2 * w)


# ---------------------------------------------------------------------------
# admissibility and norm specifications


def _as_fraction(x) -> Fraction | None:
    if x == np.inf:
        return None
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    fr = Fraction(x)
    if fr.denominator > 10**9:
        fr = fr.limit_denominator(10**12)
    return fr


def is_admissible(q, r, n: int) -> bool:
    """Schrodinger-admissible: 2 <= q, r <= inf, (q,r,n) != (2,inf,2) and
    2/q + n/r = n/2, checked in exact rational arithmetic."""
    if not (2 <= q and 2 <= r):
        return False
    if q == 2 and r == np.inf and n == 2:
        return False
    qf, rf = _as_fraction(q), _as_fraction(r)
    lhs = (0 if qf is None else Fraction(2) / qf) + (0 if rf is None else Fraction(n) / rf)
    return lhs == Fraction(n, 2)


def admissible_partner(q, n: int):
    """r solving 2/q + n/r = n/2, or None if there is no valid partner."""
    qf = _as_fraction(q)
    gap = Fraction(n, 2) - (0 if qf is None else Fraction(2) / qf)
    if gap == 0:
        return np.inf
    if gap < 0:
        return None
    r = Fraction(n) / gap
    return r if r >= 2 else None


def default_admissible_pairs(n: int, extra_qs=(3, 4, 8, 16)) -> list[tuple]:
    """(inf, 2), the smallest-q endpoint, and a few interpolated pairs."""
    pairs = [(np.inf, 2)]
    qs = sorted(set(Fraction(q) for q in extra_qs))
    if n >= 3:
        qs.insert(0, Fraction(2))
    for q in qs:
        r = admissible_partner(q, n)
        if r is not None and is_admissible(q, r, n):
            pairs.append((q, r))
    return pairs


@dataclass(frozen=True)
class NormSpec:
    """Symbolic description of a norm.

    families: 'hsob' (homogeneous H^s), 'sob' (inhomogeneous H^s),
    'lebesgue' (L^p), 'spacetime' (L^q_t L^r_x), 'Z', 'W', 'M', 'N'
    (the dimension-generic families), 'strichartz' (full Strichartz S^s).
    """

    family: str
    s: float | None = None
    p: object = None
    q: object = None
    r: object = None

    @classmethod
    def hsob(cls, s):
        return cls("hsob", s=s)

    @classmethod
    def sob(cls, s):
        return cls("sob", s=s)

    @classmethod
    def lebesgue(cls, p):
        return cls("lebesgue", p=p)

    @classmethod
    def spacetime(cls, q, r):
        return cls("spacetime", q=q, r=r)

    @classmethod
    def strichartz(cls, s):
        return cls("strichartz", s=s)


def expand_family(spec: NormSpec, n: int):
    """Concrete (derivative order, q, r) for the Z/W/M/N families in dim n.

    Exponents are returned as exact fractions; they are valid Lebesgue
    exponents only for n large enough (n > 4 for Z/W/M).
    """
    if spec.family == "Z":
        e = Fraction(2 * (n + 4), n - 4)
        return 0, e, e
    if spec.family == "W":
        return 1, Fraction(2 * (n + 4), n - 4), Fraction(2 * n * (n + 4), n * n - 2 * n + 8)
    if spec.family == "M":
        return 2, Fraction(2 * (n + 4), n - 4), Fraction(2 * n * (n + 4), n * n + 16)
    if spec.family == "N":
        return 1, Fraction(2), Fraction(2 * n, n + 2)
    raise NormUsageError(f"{spec.family} is not an expandable family")


# ---------------------------------------------------------------------------
# norm evaluation


def _lebesgue_norm(grid: Grid, vals: np.ndarray, p) -> float:
    if p == np.inf:
        return float(np.max(np.abs(vals)))
    p = float(p)
    if p < 1:
        raise NormUsageError(f"Lebesgue exponent must be >= 1, got {p}")
    return float((np.sum(np.abs(vals) ** p) * grid.cell_volume) ** (1.0 / p))


def _sobolev_norm(f: ComplexField, s: float, homogeneous: bool) -> float:
    fh = f if f.space == FREQUENCY else transform(f, "forward")
    grid = f.grid
    r2 = grid.freq_radius() ** 2
    dxi = float(np.prod([2 * np.pi / L for L in grid.extent]))
    amp2 = np.abs(fh.values) ** 2
    if homogeneous:
        if s < 0 and mean_mode_fraction(f) > 1e-10:
            raise NormUsageError("negative-order homogeneous norm requires mean-zero input")
        w = np.zeros_like(r2)
        nz = r2 > 0
        w[nz] = r2[nz] ** s
        if s == 0:
            w[~nz] = 1.0
    else:
        w = (1.0 + r2) ** s
    return float(np.sqrt(np.sum(w * amp2) * dxi))


def _derivative_magnitude(f: ComplexField, order: int) -> np.ndarray:
    if order == 0:
        return np.abs(f.values)
    if order == 1:
        grads = gradient(f)
        return np.sqrt(sum(np.abs(g.values) ** 2 for g in grads))
    if order == 2:
        return np.abs(laplacian(f).values)
    raise NormUsageError(f"unsupported derivative order {order}")


def _spacetime_norm(traj: Trajectory, q, r, deriv_order: int = 0) -> float:
    if traj.fields is None or not len(traj.times):
        raise NormUsageError("space-time norm needs a trajectory with stored fields")
    fields = [f for f in traj.fields if f is not None]
    times = np.array([t for t, f in zip(traj.times, traj.fields) if f is not None])
    if not len(fields):
        raise NormUsageError("trajectory holds no stored fields")
    vals = np.array(
        [_lebesgue_norm(f.grid, _derivative_magnitude(f, deriv_order), r) for f in fields]
    )
    if q == np.inf:
        return float(np.max(vals))
    q = float(q)
    return float(np.trapezoid(vals**q, times) ** (1.0 / q))


def _strichartz_norm(traj: Trajectory, s: float, pairs=None) -> float:
    fields = [f for f in traj.fields or [] if f is not None]
    if not fields:
        raise NormUsageError("full Strichartz norm needs stored fields")
    n = fields[0].grid.dim
    pairs = pairs if pairs is not None else default_admissible_pairs(n)
    scales = lattice_scales(fields[0].grid)
    best = 0.0
    for a, b in pairs:
        total = 0.0
        for N in scales:
            proj_traj = Trajectory(
                np.array([t for t, f in zip(traj.times, traj.fields) if f is not None]),
                [lp_project(f, N) for f in fields],
            )
            pn = _spacetime_norm(proj_traj, a, b)
            weight = N.value ** (2 * s + (0.0 if a == np.inf else 4.0 / float(a)))
            total += weight * pn**2
        best = max(best, np.sqrt(total))
    return best


def norm(obj, spec: NormSpec, pairs=None) -> float:
    """Evaluate a NormSpec on a field (Sobolev/Lebesgue) or a trajectory
    (space-time, Z/W/M/N, full Strichartz)."""
    if spec.family == "hsob":
        return _sobolev_norm(obj, spec.s, homogeneous=True)
    if spec.family == "sob":
        return _sobolev_norm(obj, spec.s, homogeneous=False)
    if spec.family == "lebesgue":
        if obj.space != PHYSICAL:
            raise NormUsageError("Lebesgue norm expects a physical-space field")
        return _lebesgue_norm(obj.grid, obj.values, spec.p)
    if spec.family == "spacetime":
        return _spacetime_norm(obj, spec.q, spec.r)
    if spec.family in ("Z", "W", "M", "N"):
        fields = [f for f in obj.fields or [] if f is not None]
        if not fields:
            raise NormUsageError("this family needs a trajectory with stored fields")
        d, q, r = expand_family(spec, fields[0].grid.dim)
        return _spacetime_norm(obj, q, r, deriv_order=d)
    if spec.family == "strichartz":
        return _strichartz_norm(obj, spec.s, pairs)
    raise NormUsageError(f"unknown norm family {spec.family!r}")


# ---------------------------------------------------------------------------
# brackets


def brackets(f: ComplexField, g: ComplexField):
    """Mass bracket Im(f conj(g)) and momentum bracket Re(f grad(conj g) - g grad(conj f))."""
    if f.grid != g.grid:
        raise NormUsageError("bracket arguments live on different grids")
    if f.space != PHYSICAL or g.space != PHYSICAL:
        raise NormUsageError("brackets expect physical-space fields")
    mass_b = np.imag(f.values * np.conj(g.values))
    gf = gradient(f)
    gg = gradient(g)
    mom_b = [
        np.real(f.values * np.conj(dg.values) - g.values * np.conj(df.values))
        for df, dg in zip(gf, gg)
    ]
    return mass_b, mom_b


# ---------------------------------------------------------------------------
# Morawetz weight and actions


@functools.lru_cache(maxsize=16)
def _weight_functions(dim: int, delta: float):
    xs = sympy.symbols(f"x0:{dim}", real=True)
    a = sympy.sqrt(sum(x**2 for x in xs) + sympy.Float(delta) ** 2)
    lap = lambda e: sum(sympy.diff(e, x, 2) for x in xs)
    lap_a = lap(a)
    lap2_a = lap(lap_a)
    lap3_a = lap(lap2_a)
    lam = lambda e: sympy.lambdify(xs, sympy.simplify(e), modules="numpy")
    return {
        "a": lam(a),
        "grad": [lam(sympy.diff(a, x)) for x in xs],
        "hess": [[lam(sympy.diff(a, xj, xk)) for xk in xs] for xj in xs],
        "lap": lam(lap_a),
        "hess_lap": [[lam(sympy.diff(lap_a, xj, xk)) for xk in xs] for xj in xs],
        "lap2": lam(lap2_a),
        "lap3": lam(lap3_a),
    }


@dataclass(frozen=True)
class MorawetzWeight:
    """Smoothed distance weight a_delta(x) = sqrt(|x|^2 + delta^2).

    Derivatives up to sixth order are generated symbolically once per
    (dimension, delta) and evaluated as closed-form radial expressions.
    """

    delta: float

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("smoothing delta must be positive")

    def tables(self, dim: int):
        return _weight_functions(dim, float(self.delta))


def default_weight(grid: Grid) -> MorawetzWeight:
    # delta must be resolved by the grid or the derivative identity degrades;
    # four spacings keeps the sixth weight derivative quadrature-accurate.
    return MorawetzWeight(delta=4 * min(grid.spacing))


def morawetz_action(f: ComplexField, w: MorawetzWeight, center=None) -> float:
    """2 integral grad(a_delta)(x - c) . Im(conj(u) grad u) dx."""
    if f.space != PHYSICAL:
        raise NormUsageError("morawetz_action expects a physical-space field")
    grid = f.grid
    center = center if center is not None else np.zeros(grid.dim)
    disp = _shifted_mesh(grid, center)
    tabs = w.tables(grid.dim)
    grads = gradient(f)
    total = np.zeros(grid.shape)
    for j in range(grid.dim):
        aj = tabs["grad"][j](*disp)
        total = total + aj * np.imag(np.conj(f.values) * grads[j].values)
    return 2.0 * _integrate(grid, total)


def morawetz_action_rhs(
    f: ComplexField, forcing: ComplexField | None, w: MorawetzWeight, center=None
) -> float:
    """Right-hand side of d/dt of the Morawetz action for i u_t + Lap^2 u + h = 0:

    2 * integral ( 2 du_j du_k_bar d_jk(Lap a) - (Lap^3 a) |u|^2 / 2
                   - 4 d_jk(a) d_ik(u) d_ij(u)_bar + (Lap^2 a) |grad u|^2
                   + d_j(a) {u, h}_p^j ) dx.
    """
    if f.space != PHYSICAL:
        raise NormUsageError("morawetz_action_rhs expects a physical-space field")
    grid = f.grid
    if forcing is not None and forcing.grid != grid:
        raise NormUsageError("forcing lives on a different grid")
    n = grid.dim
    center = center if center is not None else np.zeros(n)
    disp = _shifted_mesh(grid, center)
    tabs = w.tables(n)
    grads = gradient(f)
    hess = hessian(f)

    term = np.zeros(grid.shape)
    # 2 du_j du_k_bar * d_jk(Lap a)  (real by j<->k symmetry)
    for j in range(n):
        for k in range(n):
            term = term + 2.0 * tabs["hess_lap"][j][k](*disp) * np.real(
                grads[j].values * np.conj(grads[k].values)
            )
    # -(1/2) Lap^3 a |u|^2
    term = term - 0.5 * tabs["lap3"](*disp) * np.abs(f.values) ** 2
    # -4 d_jk a d_ik u d_ij u_bar
    for j in range(n):
        for k in range(n):
            ajk = tabs["hess"][j][k](*disp)
            acc = np.zeros(grid.shape)
            for i in range(n):
                acc = acc + np.real(hess[i][k].values * np.conj(hess[i][j].values))
            term = term - 4.0 * ajk * acc
    # + Lap^2 a |grad u|^2
    grad_sq = sum(np.abs(g.values) ** 2 for g in grads)
    term = term + tabs["lap2"](*disp) * grad_sq
    # + d_j a {u, h}_p^j
    if forcing is not None:
        _, mom = brackets(f, forcing)
        for j in range(n):
            term = term + tabs["grad"][j](*disp) * mom[j]
    return 2.0 * _integrate(grid, term)


# ---------------------------------------------------------------------------
# pairwise (two-point) functionals via zero-padded linear convolution


def _linear_convolve(grid: Grid, density: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """(K * rho)(x) = integral K(x - y) rho(y) dy on the doubled lattice.

    The field is treated as compactly supported: the convolution is linear
    (zero padded), not circular, so the kernel is the free-space one.
    """
    padded_shape = tuple(2 * N for N in grid.points)
    rho = np.zeros(padded_shape)
    rho[tuple(slice(0, N) for N in grid.points)] = density
    out = np.fft.ifftn(np.fft.fftn(rho) * np.fft.fftn(kernel)).real
    return out[tuple(slice(0, N) for N in grid.points)] * grid.cell_volume


def _kernel_mesh(grid: Grid) -> list[np.ndarray]:
    """Displacement coordinates z on the doubled lattice, FFT-indexed."""
    out = []
    for i in range(grid.dim):
        N, dx = grid.points[i], grid.spacing[i]
        m = np.rint(np.fft.fftfreq(2 * N, d=1.0 / (2 * N))).astype(np.int64)
        z = m * dx
        out.append(z.reshape([-1 if j == i else 1 for j in range(grid.dim)]))
    return out


def interaction_morawetz(f: ComplexField) -> float:
    """M^i = 2 Im integral |u(y)|^2 ((x-y)/|x-y|) . (grad u conj(u))(x) dx dy,

    computed with the unit-vector kernel z/|z| (0 at z = 0) as a zero-padded
    convolution against the mass density.
    """
    if f.space != PHYSICAL:
        raise NormUsageError("interaction_morawetz expects a physical-space field")
    grid = f.grid
    rho = np.abs(f.values) ** 2
    grads = gradient(f)
    zmesh = _kernel_mesh(grid)
    r = np.sqrt(sum(np.broadcast_to(z, tuple(2 * N for N in grid.points)) ** 2 for z in zmesh))
    total = 0.0
    for j in range(grid.dim):
        kern = np.zeros(tuple(2 * N for N in grid.points))
        nz = r > 0
        kern[nz] = np.broadcast_to(zmesh[j], kern.shape)[nz] / r[nz]
        conv = _linear_convolve(grid, rho, kern)
        pj = np.imag(np.conj(f.values) * grads[j].values)
        total += _integrate(grid, conv * pj)
    return 2.0 * total


def interaction_potential(f: ComplexField, alpha: float, delta: float) -> float:
    """integral |u(x)|^2 |u(y)|^2 (|x-y|^2 + delta^2)^(-alpha/2) dx dy."""
    if alpha <= 0 or delta <= 0:
        raise ValueError("alpha and delta must be positive")
    if f.space != PHYSICAL:
        raise NormUsageError("interaction_potential expects a physical-space field")
    grid = f.grid
    rho = np.abs(f.values) ** 2
    zmesh = _kernel_mesh(grid)
    r2 = sum(np.broadcast_to(z, tuple(2 * N for N in grid.points)) ** 2 for z in zmesh)
    kern = (r2 + delta**2) ** (-alpha / 2.0)
    conv = _linear_convolve(grid, rho, kern)
    return _integrate(grid, conv * rho)


# ---------------------------------------------------------------------------
# dyadic square function


def lp_square_function(f: ComplexField, sigma: float) -> ComplexField:
    """Pointwise (sum_N N^(-2 sigma) |P_N f|^2)^(1/2) over lattice dyadics."""
    if sigma > 0 and mean_mode_fraction(f) > 1e-10:
        raise NormUsageError("positive-order square function requires mean-zero input")
    grid = f.grid
    acc = np.zeros(grid.shape)
    for N in lattice_scales(grid):
        pn = lp_project(f, N)
        acc = acc + N.value ** (-2 * sigma) * np.abs(pn.values) ** 2
    return ComplexField(grid, np.sqrt(acc).astype(np.complex128))
