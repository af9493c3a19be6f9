"""Declarative scenario runner.

Parses strict JSON configs, dispatches to the solver and study drivers, and
writes CSV / JSON / snapshot artifacts plus a manifest with content hashes.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import platform
import re
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .analysis import (
    IllPosedParams,
    StudyError,
    apply_rescale_g,
    decay_study,
    illposed_check,
    scaling_exponent,
    smalldisp_study,
    strichartz_gain_study,
)
from .evolution import (
    BlowUpError,
    EquationParams,
    EvolveConfig,
    NonContractionError,
    strang_evolve,
)
from .grid import ComplexField, Grid, GridError, write_snapshot
from .initial_data import from_config
from .observables import (
    NormSpec,
    default_weight,
    energy,
    interaction_morawetz,
    interaction_potential,
    local_mass,
    mass,
    morawetz_action,
    norm,
)
from .scattering import (
    HorizonError,
    SmallnessError,
    forward_wave_limit,
    inverse_wave_operator,
)

KINDS = ("evolve", "smalldisp", "decay", "scaling", "illposed", "scatter", "inequality")

# errors that represent a fired numerical contract rather than bad usage
CONTRACT_ERRORS = (BlowUpError, NonContractionError, HorizonError, SmallnessError, StudyError)


class ConfigError(ValueError):
    pass


def _fmt(x) -> str:
    return format(float(x), ".17g")


# ---------------------------------------------------------------------------
# strict schema parsing


_REQUIRED = object()


def _parse_block(raw, schema: dict, path: str) -> dict:
    """Strict dict parse: unknown keys rejected, defaults materialized."""
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected an object")
    unknown = sorted(set(raw) - set(schema))
    if unknown:
        raise ConfigError(f"{path}: unknown keys {unknown}")
    out = {}
    for key, (default, check) in schema.items():
        if key in raw:
            val = raw[key]
        elif default is _REQUIRED:
            raise ConfigError(f"{path}.{key}: required key is missing")
        else:
            val = default
        if val is not None and check is not None:
            val = check(val, f"{path}.{key}")
        out[key] = val
    return out


def _number(val, path):
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}: expected a number")
    return val


def _positive(val, path):
    val = _number(val, path)
    if val <= 0:
        raise ConfigError(f"{path}: must be positive")
    return val


def _integer(val, path):
    if isinstance(val, bool) or not isinstance(val, int):
        raise ConfigError(f"{path}: expected an integer")
    return val


def _positive_int(val, path):
    val = _integer(val, path)
    if val <= 0:
        raise ConfigError(f"{path}: must be a positive integer")
    return val


def _boolean(val, path):
    if not isinstance(val, bool):
        raise ConfigError(f"{path}: expected a boolean")
    return val


def _string(val, path):
    if not isinstance(val, str):
        raise ConfigError(f"{path}: expected a string")
    return val


def _number_list(val, path):
    if not isinstance(val, list) or not val:
        raise ConfigError(f"{path}: expected a non-empty array of numbers")
    return [_number(v, f"{path}[{i}]") for i, v in enumerate(val)]


OBSERVABLE_NAMES = (
    "mass",
    "energy",
    "h2",
    "hhalf",
    "linf",
    "l4",
    "morawetz",
    "int_morawetz",
    "int_potential5",
)
_LOCAL_MASS_RE = re.compile(r"^local_mass\[([^,\]]+),([^,\]]+)\]$")


def _observable_name(val, path):
    val = _string(val, path)
    if val in OBSERVABLE_NAMES or _LOCAL_MASS_RE.match(val):
        return val
    raise ConfigError(
        f"{path}: unknown observable {val!r} (expected one of {list(OBSERVABLE_NAMES)} "
        "or local_mass[x0,R])"
    )


_INIT_SCHEMAS = {
    "gaussian": {
        "amplitude": (1.0, _number),
        "width": (1.0, _positive),
        "center": (None, _number_list),
        "phase_velocity": (None, _number_list),
    },
    "plane_wave": {"amplitude": (1.0, _number), "mode": (None, None)},
    "annulus": {"scale": (1.0, _positive), "amplitude": (1.0, _number), "width": (1.0, _positive)},
    "random": {
        "seed": (0, _integer),
        "envelope_power": (2.0, _number),
        "envelope_scale": (1.0, _positive),
        "amplitude": (1.0, _number),
    },
    "snapshot": {"path": (_REQUIRED, _string)},
}


def _parse_initial_data(raw, path):
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected an object")
    kind = raw.get("kind", "gaussian")
    if kind not in _INIT_SCHEMAS:
        raise ConfigError(
            f"{path}.kind: unknown generator {kind!r} (expected one of {sorted(_INIT_SCHEMAS)})"
        )
    body = {k: v for k, v in raw.items() if k != "kind"}
    out = _parse_block(body, _INIT_SCHEMAS[kind], path)
    out = {k: v for k, v in out.items() if v is not None}
    out["kind"] = kind
    return out


_NORM_FAMILIES = ("hsob", "sob", "lebesgue", "Z", "W", "M", "N")


def _parse_norm(raw, path):
    out = _parse_block(raw, {"family": (_REQUIRED, _string), "s": (None, _number), "p": (None, _number)}, path)
    if out["family"] not in _NORM_FAMILIES:
        raise ConfigError(f"{path}.family: unknown norm family {out['family']!r}")
    if out["family"] in ("hsob", "sob") and out["s"] is None:
        raise ConfigError(f"{path}.s: required for Sobolev norms")
    if out["family"] == "lebesgue" and out["p"] is None:
        raise ConfigError(f"{path}.p: required for Lebesgue norms")
    return {k: v for k, v in out.items() if v is not None}


def _norm_spec(block: dict) -> NormSpec:
    fam = block["family"]
    if fam in ("hsob", "sob"):
        return NormSpec(fam, s=block["s"])
    if fam == "lebesgue":
        return NormSpec(fam, p=block["p"])
    return NormSpec(fam)


_STUDY_SCHEMAS = {
    "evolve": {},
    "smalldisp": {
        "nu_list": ([0.2, 0.1, 0.05], _number_list),
        "t_end": (1.0, _positive),
        "k": (2, _positive_int),
    },
    "decay": {"times": (_REQUIRED, _number_list), "leak_tolerance": (0.01, _positive)},
    "scaling": {
        "h_list": ([2, 4], _number_list),
        "norm": ({"family": "hsob", "s": 2}, _parse_norm),
        "x0": (None, _number_list),
    },
    "illposed": {"cases": (_REQUIRED, None), "t_nu": (None, _string)},
    "scatter": {
        "quadrature_stride": (5, _positive_int),
        "round_trip": (False, _boolean),
        "t_start": (None, _positive),
        "frames": (400, _positive_int),
    },
    "inequality": {
        "test": ("strichartz_gain", _string),
        "q": (6, _number),
        "r": (6, _number),
        "ensemble_size": (20, _positive_int),
        "t_end": (1.0, _positive),
        "n_samples": (33, _positive_int),
        "seed": (0, _integer),
    },
}

_NEEDS_INTEGRATOR = ("evolve", "smalldisp", "scatter")


@dataclass
class ScenarioConfig:
    """Fully validated and defaulted scenario description."""

    kind: str
    data: dict

    def to_json(self) -> str:
        return json.dumps(self.data, sort_keys=True, indent=2) + "\n"

    def grid(self) -> Grid:
        g = self.data["grid"]
        return Grid(tuple(g["extents"]), tuple(g["points"]))

    def equation(self) -> EquationParams:
        e = self.data["equation"]
        return EquationParams(e["dispersion_coeff"], e["nonlinearity_sign"])


def parse_config(text: str) -> ScenarioConfig:
    """Strict parse of a JSON scenario document with all defaults filled in."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"syntax error at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(raw, dict):
        raise ConfigError("top level: expected an object")
    kind = raw.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"kind: expected one of {list(KINDS)}, got {kind!r}")

    top_keys = {"kind", "grid", "equation", "integrator", "initial_data", "observables", "output", "study"}
    unknown = sorted(set(raw) - top_keys)
    if unknown:
        raise ConfigError(f"top level: unknown keys {unknown}")

    data = {"kind": kind}

    if kind != "illposed":
        grid_block = _parse_block(
            raw.get("grid", {}),
            {"extents": (_REQUIRED, _number_list), "points": (_REQUIRED, None)},
            "grid",
        )
        pts = grid_block["points"]
        if not isinstance(pts, list) or not all(
            isinstance(p, int) and not isinstance(p, bool) for p in pts
        ):
            raise ConfigError("grid.points: expected an array of integers")
        try:
            Grid(tuple(grid_block["extents"]), tuple(pts))
        except (GridError, ValueError) as exc:
            raise ConfigError(f"grid: {exc}")
        data["grid"] = grid_block
        data["initial_data"] = _parse_initial_data(raw.get("initial_data", {}), "initial_data")
    elif "grid" in raw or "initial_data" in raw:
        raise ConfigError("illposed scenarios take no grid or initial_data blocks")

    data["equation"] = _parse_block(
        raw.get("equation", {}),
        {"dispersion_coeff": (1.0, _number), "nonlinearity_sign": (1, _integer)},
        "equation",
    )
    if data["equation"]["nonlinearity_sign"] not in (1, -1, 0):
        raise ConfigError("equation.nonlinearity_sign: must be 1, -1 or 0")
    if data["equation"]["dispersion_coeff"] < 0:
        raise ConfigError("equation.dispersion_coeff: must be >= 0")

    if kind in _NEEDS_INTEGRATOR:
        data["integrator"] = _parse_block(
            raw.get("integrator", {}),
            {"dt": (_REQUIRED, _positive), "t_end": (_REQUIRED, _positive), "dealias": (True, _boolean)},
            "integrator",
        )
    elif "integrator" in raw:
        raise ConfigError(f"{kind} scenarios take no integrator block")

    obs = raw.get("observables", ["mass", "energy"] if kind == "evolve" else [])
    if not isinstance(obs, list):
        raise ConfigError("observables: expected an array of names")
    data["observables"] = [_observable_name(o, f"observables[{i}]") for i, o in enumerate(obs)]

    data["output"] = _parse_block(
        raw.get("output", {}),
        {"record_every": (1, _positive_int), "snapshot_every": (None, _positive_int)},
        "output",
    )

    study = _parse_block(raw.get("study", {}), _STUDY_SCHEMAS[kind], "study")
    if kind == "illposed":
        cases = study["cases"]
        if not isinstance(cases, list) or not cases:
            raise ConfigError("study.cases: expected a non-empty array")
        study["cases"] = [
            _parse_block(
                c,
                {"n": (_REQUIRED, _positive_int), "eps": (_REQUIRED, _string), "nu": (_REQUIRED, _string)},
                f"study.cases[{i}]",
            )
            for i, c in enumerate(cases)
        ]
        for i, c in enumerate(study["cases"]):
            if c["n"] <= 8:
                raise ConfigError(f"study.cases[{i}].n: inflation algebra requires n >= 9")
    if kind == "smalldisp":
        for i, nu in enumerate(study["nu_list"]):
            if not (0 < nu < 1):
                raise ConfigError(f"study.nu_list[{i}]: nu must lie in (0, 1)")
    data["study"] = {k: v for k, v in study.items() if v is not None}

    return ScenarioConfig(kind=kind, data=data)


# ---------------------------------------------------------------------------
# observables and artifact writers


def _make_observable(name: str, grid: Grid):
    delta = float(min(grid.spacing))
    if name == "mass":
        return lambda t, f: mass(f)
    if name == "energy":
        return lambda t, f: energy(f)
    if name == "h2":
        return lambda t, f: norm(f, NormSpec.sob(2))
    if name == "hhalf":
        return lambda t, f: norm(f, NormSpec.hsob(0.5))
    if name == "linf":
        return lambda t, f: norm(f, NormSpec.lebesgue(np.inf))
    if name == "l4":
        return lambda t, f: norm(f, NormSpec.lebesgue(4))
    if name == "morawetz":
        weight = default_weight(grid)
        return lambda t, f: morawetz_action(f, weight)
    if name == "int_morawetz":
        return lambda t, f: interaction_morawetz(f)
    if name == "int_potential5":
        return lambda t, f: interaction_potential(f, 5.0, delta)
    m = _LOCAL_MASS_RE.match(name)
    if m:
        x0, radius = float(m.group(1)), float(m.group(2))
        return lambda t, f: local_mass(f, x0, radius)
    raise ConfigError(f"unknown observable {name!r}")


def _write_text(path, text: str):
    with open(path, "w") as fh:
        fh.write(text)


def _observables_csv(names, times, records) -> str:
    lines = [",".join(["t"] + list(names))]
    for t, rec in zip(times, records):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in rec]))
    return "\n".join(lines) + "\n"


def _study_csv(rows, footer: dict) -> str:
    lines = ["parameter,value"]
    for p, v in rows:
        lines.append(f"{_fmt(p)},{_fmt(v)}")
    for key, val in footer.items():
        lines.append(f"# {key} = {val}")
    return "\n".join(lines) + "\n"


def _fit_footer(fit) -> dict:
    return {
        "slope": _fmt(fit.slope),
        "intercept": _fmt(fit.intercept),
        "residual": _fmt(fit.residual),
        "window": f"[{_fmt(fit.window[0])}, {_fmt(fit.window[1])}]",
    }


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


# ---------------------------------------------------------------------------
# scenario execution


def _initial_field(cfg: ScenarioConfig, seed=None) -> ComplexField:
    block = dict(cfg.data["initial_data"])
    if seed is not None and block["kind"] == "random":
        block["seed"] = seed
    return from_config(cfg.grid(), block)


def _run_evolve(cfg: ScenarioConfig, out: "Path", seed) -> list:
    grid = cfg.grid()
    u0 = _initial_field(cfg, seed)
    names = cfg.data["observables"]
    observers = [(n, _make_observable(n, grid)) for n in names]
    integ = cfg.data["integrator"]
    run = EvolveConfig(
        params=cfg.equation(),
        dt=integ["dt"],
        t_end=integ["t_end"],
        dealias=integ["dealias"],
        record_every=cfg.data["output"]["record_every"],
        snapshot_every=cfg.data["output"]["snapshot_every"],
    )
    traj = strang_evolve(u0, run, observers)
    files = []
    if names:
        path = out / "observables.csv"
        _write_text(path, _observables_csv(names, traj.times, traj.records))
        files.append(path)
    if traj.fields is not None:
        for i, (t, f) in enumerate(zip(traj.times, traj.fields)):
            if f is None:
                continue
            path = out / f"snapshot_{i:06d}.b4s"
            write_snapshot(path, f)
            files.append(path)
    return files


def _run_smalldisp(cfg: ScenarioConfig, out, seed) -> list:
    phi = _initial_field(cfg, seed)
    integ = cfg.data["integrator"]
    study = cfg.data["study"]
    run = EvolveConfig(
        dt=integ["dt"],
        t_end=study["t_end"],
        dealias=integ["dealias"],
        record_every=cfg.data["output"]["record_every"],
    )
    fit = smalldisp_study(phi, study["nu_list"], study["t_end"], study["k"], run)
    path = out / "smalldisp.csv"
    _write_text(path, _study_csv(fit.points, _fit_footer(fit)))
    return [path]


def _run_decay(cfg: ScenarioConfig, out, seed) -> list:
    u0 = _initial_field(cfg, seed)
    study = cfg.data["study"]
    fit = decay_study(u0, study["times"], leak_tolerance=study["leak_tolerance"])
    path = out / "decay.csv"
    _write_text(path, _study_csv(fit.points, _fit_footer(fit)))
    return [path]


def _run_scaling(cfg: ScenarioConfig, out, seed) -> list:
    u0 = _initial_field(cfg, seed)
    study = cfg.data["study"]
    spec = _norm_spec(study["norm"])
    n = u0.grid.dim
    exponent = scaling_exponent(spec, n)
    base = norm(u0, spec)
    rows = []
    max_dev = 0.0
    for h in study["h_list"]:
        rescaled = apply_rescale_g(u0, h, study.get("x0"))
        ratio = norm(rescaled, spec) / base
        rows.append((h, ratio))
        max_dev = max(max_dev, abs(ratio / float(h) ** float(exponent) - 1.0))
    footer = {"exponent": str(exponent), "max_relative_deviation": _fmt(max_dev)}
    path = out / "scaling.csv"
    _write_text(path, _study_csv(rows, footer))
    return [path]


def _run_illposed(cfg: ScenarioConfig, out, seed) -> list:
    study = cfg.data["study"]
    reports = []
    rows = []
    for i, case in enumerate(study["cases"]):
        rep = illposed_check(
            IllPosedParams(case["n"], case["eps"], case["nu"]), t_nu=study.get("t_nu")
        )
        ok = rep.identity_exact and rep.lam_nu_gt_one
        entry = {
            "n": case["n"],
            "eps": case["eps"],
            "nu": case["nu"],
            "lam": str(rep.lam),
            "lam_nu": str(rep.lam_nu),
            "identity_exact": rep.identity_exact,
            "lam_nu_gt_one": rep.lam_nu_gt_one,
            "cond_smallness": rep.cond_smallness,
        }
        if rep.t_eps is not None:
            entry["t_eps"] = str(rep.t_eps)
            entry["inflation_lower_bound"] = str(rep.inflation_lower_bound)
            entry["cond_inflation"] = rep.cond_inflation
        reports.append(entry)
        rows.append((i, 1.0 if ok else 0.0))
    jpath = out / "illposed.json"
    _write_text(jpath, json.dumps(reports, sort_keys=True, indent=2) + "\n")
    cpath = out / "illposed.csv"
    _write_text(cpath, _study_csv(rows, {"cases": str(len(rows))}))
    return [jpath, cpath]


def _run_scatter(cfg: ScenarioConfig, out, seed) -> list:
    u0 = _initial_field(cfg, seed)
    integ = cfg.data["integrator"]
    study = cfg.data["study"]
    mu = cfg.data["equation"]["nonlinearity_sign"]
    run = EvolveConfig(
        params=cfg.equation(),
        dt=integ["dt"],
        t_end=integ["t_end"],
        dealias=integ["dealias"],
        record_every=max(1, int(round(integ["t_end"] / integ["dt"]))),
        snapshot_every=study["quadrature_stride"],
    )
    traj = strang_evolve(u0, run)
    res = forward_wave_limit(traj, mu=mu)
    report = res.report()
    if study["round_trip"]:
        t_start = study.get("t_start") or res.horizon / 4.0
        rec = inverse_wave_operator(
            res.u_plus,
            t_start=t_start,
            t_max=res.horizon,
            frames=study["frames"],
            dt=integ["dt"],
            mu=mu,
            dealias=integ["dealias"],
        )
        report["round_trip_h2_error"] = norm(rec - u0, NormSpec.sob(2))
    files = []
    spath = out / "u_plus.b4s"
    write_snapshot(spath, res.u_plus)
    files.append(spath)
    jpath = out / "scatter.json"
    _write_text(jpath, json.dumps(report, sort_keys=True, indent=2) + "\n")
    files.append(jpath)
    rows = [(t2, d) for (_t1, t2, d) in res.defect_table]
    footer = {
        "mass_residual": _fmt(report["mass_residual"]),
        "energy_residual": _fmt(report["energy_residual"]),
        "tail_estimate": _fmt(report["tail_estimate"]),
    }
    cpath = out / "scatter.csv"
    _write_text(cpath, _study_csv(rows, footer))
    files.append(cpath)
    return files


def _run_inequality(cfg: ScenarioConfig, out, seed) -> list:
    study = cfg.data["study"]
    if study["test"] != "strichartz_gain":
        raise ConfigError(f"study.test: unknown inequality test {study['test']!r}")
    result = strichartz_gain_study(
        study["ensemble_size"],
        study["q"],
        study["r"],
        cfg.grid(),
        t_end=study["t_end"],
        n_samples=study["n_samples"],
        seed=seed if seed is not None else study["seed"],
    )
    rows = list(enumerate(result["ratios"]))
    footer = {"max": _fmt(result["max"]), "median": _fmt(result["median"])}
    path = out / "inequality.csv"
    _write_text(path, _study_csv(rows, footer))
    return [path]


_RUNNERS = {
    "evolve": _run_evolve,
    "smalldisp": _run_smalldisp,
    "decay": _run_decay,
    "scaling": _run_scaling,
    "illposed": _run_illposed,
    "scatter": _run_scatter,
    "inequality": _run_inequality,
}


def run_scenario(cfg: ScenarioConfig, out_dir, seed=None, threads: int = 1) -> int:
    """Execute a scenario and write its artifacts plus a manifest.

    Returns 0 on success and 2 when a numerical contract fired (blow-up,
    non-contraction, study guard); the manifest records either way.
    """
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    config_text = cfg.to_json()
    config_path = out / "config.json"
    _write_text(config_path, config_text)

    start = time.time()
    status, error = "ok", None
    files = [config_path]
    try:
        files += _RUNNERS[cfg.kind](cfg, out, seed)
        code = 0
    except CONTRACT_ERRORS as exc:
        status = "failed"
        error = f"{type(exc).__name__}: {exc}"
        code = 2

    manifest = {
        "kind": cfg.kind,
        "dim": len(cfg.data["grid"]["extents"]) if "grid" in cfg.data else None,
        "config_hash": hashlib.sha256(config_text.encode()).hexdigest(),
        "files": {p.name: _sha256(p) for p in files},
        "status": status,
        "error": error,
        "seed": seed,
        "threads": threads,
        "wall_time_s": round(time.time() - start, 3),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "b4nls": __version__,
        },
    }
    _write_text(out / "manifest.json", json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    return code


# ---------------------------------------------------------------------------
# command line


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="b4nls",
        description="Pseudospectral workbench for the cubic biharmonic Schrodinger equation",
    )
    parser.add_argument("--seed", type=int, default=None, help="override random seeds")
    parser.add_argument("--threads", type=int, default=1, help="worker thread budget")
    sub = parser.add_subparsers(dest="command", required=True)
    for kind in KINDS:
        p = sub.add_parser(kind, help=f"run a {kind} scenario")
        p.add_argument("--config", required=True, help="path to a JSON scenario config")
        p.add_argument("--out", required=True, help="output directory")
    v = sub.add_parser("validate", help="parse a config without running it")
    v.add_argument("--config", required=True, help="path to a JSON scenario config")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        with open(args.config) as fh:
            cfg = parse_config(fh.read())
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1

    if args.command == "validate":
        sys.stdout.write(cfg.to_json())
        return 0
    if cfg.kind != args.command:
        print(
            f"config error: config kind {cfg.kind!r} does not match subcommand "
            f"{args.command!r}",
            file=sys.stderr,
        )
        return 1
    code = run_scenario(cfg, args.out, seed=args.seed, threads=args.threads)
    if code != 0:
        print(f"scenario failed; see manifest in {args.out}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
