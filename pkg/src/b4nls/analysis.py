"""Study drivers and exact-arithmetic algebra: scaling exponents, the
ill-posedness parameter identities, the small-dispersion convergence study,
dispersive-decay exponent fits and inequality-constant sweeps."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
import sympy

from .evolution import EvolveConfig, small_dispersion_pair
from .grid import ComplexField, Grid, as_scale
from .initial_data import random_field
from .observables import NormSpec, expand_family, is_admissible, norm
from .spectral import fractional_derivative, free_propagate, transform


class StudyError(RuntimeError):
    pass


class UnsupportedSpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# rescaling algebra


@dataclass(frozen=True)
class ScalingParams:
    """tau u = h^2 u(h^4 (t - t0), h (x - x0)); g u0 = h^2 u0(h (x - x0))."""

    h: float
    t0: float = 0.0
    x0: tuple = ()

    def __post_init__(self):
        if self.h <= 0:
            raise ValueError("scale h must be positive")


def scaling_exponent(spec: NormSpec, n: int) -> Fraction:
    """Exact rational e with ||g u|| = h^e ||u|| (field norms) or
    ||tau u|| = h^e ||u|| (space-time norms).

    Under x -> h x with prefactor h^2: Hdot^s -> 2 + s - n/2; L^p -> 2 - n/p;
    under tau, L^q_t L^r_x of the d-th derivative -> 2 + d - 4/q - n/r.
    """
    if spec.family == "hsob":
        return Fraction(2) + Fraction(spec.s) - Fraction(n, 2)
    if spec.family == "lebesgue":
        p = spec.p
        return Fraction(2) - (Fraction(0) if p == np.inf else Fraction(n) / Fraction(p))
    if spec.family == "spacetime":
        q, r = spec.q, spec.r
        e = Fraction(2)
        if q != np.inf:
            e -= Fraction(4) / Fraction(q)
        if r != np.inf:
            e -= Fraction(n) / Fraction(r)
        return e
    if spec.family in ("Z", "W", "M", "N"):
        d, q, r = expand_family(spec, n)
        e = Fraction(2) + d
        if q != np.inf:
            e -= Fraction(4) / Fraction(q)
        if r != np.inf:
            e -= Fraction(n) / Fraction(r)
        return e
    raise UnsupportedSpecError(f"{spec.family} does not scale homogeneously")


def apply_rescale_g(f: ComplexField, h, x0=None) -> ComplexField:
    """g u0 = h^2 u0(h (x - x0)) for dyadic h, by trigonometric interpolation.

    The rescaled field lives on a grid with extent divided by h and the same
    point count; for dyadic h the required sample points are exactly the
    original lattice shifted by h*x0, so the only spectral work is the shift.
    """
    hv = as_scale(h).value  # rejects non-dyadic h
    grid = f.grid
    x0 = np.zeros(grid.dim) if x0 is None else np.atleast_1d(np.asarray(x0, float))
    new_grid = Grid(tuple(L / hv for L in grid.extent), grid.points)
    if np.any(x0 != 0):
        # shift u0 by h*x0 spectrally: u0(y + h*x0)
        fh = transform(f, "forward")
        shift = np.ones(grid.shape, dtype=np.complex128)
        for i, xi in enumerate(grid.freq_mesh()):
            # with the +i<y,xi> forward phase, u0(y - a) has coefficients
            # fhat(xi) * exp(+i a xi)
            shift = shift * np.exp(1j * hv * x0[i] * xi)
        fh.values *= shift
        vals = transform(fh, "inverse").values
    else:
        vals = f.values
    return ComplexField(new_grid, hv**2 * vals)


# ---------------------------------------------------------------------------
# ill-posedness parameter algebra (exact arithmetic)


@dataclass(frozen=True)
class IllPosedParams:
    """Supercritical-dimension inflation parameters.

    lam is fixed by lam^4 (lam nu)^(4-n) = eps^2, i.e.
    lam = (eps^2 nu^(n-4))^(-1/(n-8)).
    """

    n: int
    eps: object  # exact (sympy-convertible) target size
    nu: object  # exact dispersion parameter in (0, 1)

    def __post_init__(self):
        if self.n <= 8:
            raise ValueError("inflation algebra requires dimension n >= 9")

    @property
    def lam(self) -> sympy.Expr:
        eps, nu = sympy.nsimplify(self.eps), sympy.nsimplify(self.nu)
        return (eps**2 * nu ** (self.n - 4)) ** sympy.Rational(-1, self.n - 8)

    @property
    def lam_nu(self) -> sympy.Expr:
        return sympy.powsimp(self.lam * sympy.nsimplify(self.nu), force=True)


@dataclass
class IllPosedReport:
    params: IllPosedParams
    lam: sympy.Expr
    lam_nu: sympy.Expr
    identity_exact: bool  # lam^4 (lam nu)^(4-n) == eps^2
    lam_nu_gt_one: bool
    t_eps: sympy.Expr | None  # lam^(-4) t_nu
    inflation_lower_bound: sympy.Expr | None  # eps^2 t_nu^4
    cond_inflation: bool | None  # eps^2 t_nu^4 > eps^(-2)
    cond_smallness: bool  # eps^((16-n)/(n-8)) nu^(4(n-4)/(n-8)) < eps


def illposed_check(p: IllPosedParams, t_nu=None) -> IllPosedReport:
    """Verify the inflation parameter identities in exact arithmetic."""
    n = p.n
    eps, nu = sympy.nsimplify(p.eps), sympy.nsimplify(p.nu)
    lam = p.lam
    identity = sympy.simplify(lam**4 * (lam * nu) ** (4 - n) - eps**2) == 0
    lam_nu = p.lam_nu
    # lam nu = (eps nu^2)^(-2/(n-8)) by substitution
    lam_nu_alt = (eps * nu**2) ** sympy.Rational(-2, n - 8)
    assert sympy.simplify(lam_nu - lam_nu_alt) == 0
    gt_one = bool(sympy.simplify(lam_nu - 1) > 0)
    smallness = bool(
        sympy.simplify(
            eps ** sympy.Rational(16 - n, n - 8) * nu ** sympy.Rational(4 * (n - 4), n - 8) - eps
        )
        < 0
    )
    t_eps = bound = cond_inf = None
    if t_nu is not None:
        t_nu = sympy.nsimplify(t_nu)
        t_eps = sympy.powsimp(lam ** (-4) * t_nu, force=True)
        bound = eps**2 * t_nu**4
        cond_inf = bool(sympy.simplify(bound - eps ** (-2)) > 0)
    return IllPosedReport(
        params=p,
        lam=sympy.powsimp(lam, force=True),
        lam_nu=lam_nu,
        identity_exact=identity,
        lam_nu_gt_one=gt_one,
        t_eps=t_eps,
        inflation_lower_bound=bound,
        cond_inflation=cond_inf,
        cond_smallness=smallness,
    )


# ---------------------------------------------------------------------------
# log-log fitting


@dataclass
class FitResult:
    slope: float
    intercept: float
    residual: float  # max absolute log-residual
    window: tuple  # (min, max) of the abscissa actually used
    points: list = field(default_factory=list)  # (parameter, value) pairs

    def __post_init__(self):
        if not np.isfinite(self.residual):
            raise StudyError("degenerate fit: non-finite residual")


def loglog_fit(xs, ys) -> FitResult:
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    if len(xs) < 2:
        raise StudyError("log-log fit needs at least two points")
    if np.any(ys <= 0) or np.any(xs <= 0):
        raise StudyError("degenerate data: nonpositive values in log-log fit")
    lx, ly = np.log(xs), np.log(ys)
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.max(np.abs(ly - (slope * lx + intercept))))
    return FitResult(
        slope=float(slope),
        intercept=float(intercept),
        residual=resid,
        window=(float(xs.min()), float(xs.max())),
        points=list(zip(xs.tolist(), ys.tolist())),
    )


# ---------------------------------------------------------------------------
# studies


def smalldisp_study(
    phi: ComplexField,
    nu_list,
    t_end: float,
    k: int,
    cfg: EvolveConfig,
) -> FitResult:
    """sup_t ||w_nu(t) - w_0(t)||_{H^k} against nu, log-log fitted.

    The paper-level contract for the standard configuration is a slope
    near 3.
    """
    n = phi.grid.dim
    if not k > n / 2:
        raise StudyError(f"Sobolev order k = {k} must exceed n/2 = {n / 2}")
    nu_list = list(nu_list)
    if any(not (0 < nu < 1) for nu in nu_list):
        raise StudyError("all nu must lie in (0, 1)")
    errs = []
    for nu in nu_list:
        try:
            traj, ref = small_dispersion_pair(phi, nu, t_end, cfg)
        except Exception as exc:
            raise StudyError(f"run for nu = {nu} failed: {exc}") from exc
        sup = 0.0
        for t, f in zip(traj.times, traj.fields):
            if f is None:
                continue
            sup = max(sup, norm(f - ref.field_at(t), NormSpec.sob(k)))
        errs.append(sup)
    return loglog_fit(nu_list, errs)


def outer_shell_mass_fraction(f: ComplexField, shell: float = 0.1) -> float:
    """Fraction of the mass in the outermost `shell` fraction of the box."""
    grid = f.grid
    mask = np.zeros(grid.shape, dtype=bool)
    for i, x in enumerate(grid.mesh()):
        L = grid.extent[i]
        mask = mask | (np.abs(np.broadcast_to(x, grid.shape)) > (0.5 - shell) * L)
    total = float(np.sum(np.abs(f.values) ** 2))
    if total == 0:
        return 0.0
    return float(np.sum(np.abs(f.values[mask]) ** 2) / total)


def decay_study(
    u0: ComplexField, t_list, leak_tolerance: float = 0.01
) -> FitResult:
    """Fit the slope of log ||e^{it Lap^2} u0||_{L^inf} against log t.

    Errors out if more than `leak_tolerance` of the mass reaches the outer
    shell of the box before the last sample (wrap-around would corrupt the
    decay measurement).
    """
    t_list = np.asarray(sorted(t_list), float)
    if len(t_list) < 2:
        raise StudyError("decay study needs at least two sample times")
    sups = []
    for t in t_list:
        ft = free_propagate(u0, float(t))
        leak = outer_shell_mass_fraction(ft)
        if leak > leak_tolerance:
            raise StudyError(
                f"wrap-around: {leak:.1%} of the mass is in the outer shell at "
                f"t = {t}; use a larger box"
            )
        sups.append(float(np.max(np.abs(ft.values))))
    return loglog_fit(t_list, sups)


def strichartz_gain_study(
    ensemble_size: int,
    q,
    r,
    grid: Grid,
    t_end: float = 1.0,
    n_samples: int = 33,
    seed: int = 0,
) -> dict:
    """Ratio ||  |grad|^{2/q} e^{it Lap^2} u0 ||_{L^q_t L^r_x} / ||u0||_{L^2}
    over a seeded random mean-zero ensemble; reports max and median."""
    n = grid.dim
    if not is_admissible(q, r, n):
        raise StudyError(f"(q, r) = ({q}, {r}) is not admissible in dimension {n}")
    from .evolution import Trajectory  # local import to avoid cycle at module load

    s_gain = 0.0 if q == np.inf else 2.0 / float(q)
    ratios = []
    ts = np.linspace(0.0, t_end, n_samples)
    for member in range(ensemble_size):
        u0 = random_field(grid, seed=seed + member, envelope_power=2.0)
        u0g = fractional_derivative(u0, s_gain) if s_gain else u0
        fields = [free_propagate(u0g, float(t)) for t in ts]
        traj = Trajectory(ts, fields)
        num = norm(traj, NormSpec.spacetime(q, r))
        den = norm(u0, NormSpec.lebesgue(2))
        ratios.append(num / den)
    ratios = np.array(ratios)
    return {
        "max": float(ratios.max()),
        "median": float(np.median(ratios)),
        "ratios": ratios.tolist(),
    }
