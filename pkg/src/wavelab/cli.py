"""Batch experiment driver.

Usage: ``wavelab <experiment> --config <file> [--output <dir>] [--seed <n>]
[--paths <n>] [--svg]``.

Config files are flat ``key = value`` text (an INI/TOML-compatible subset):
strings quoted, lists bracketed, numbers in decimal or scientific notation,
booleans ``true``/``false``; ``inf`` is accepted as a number.  Every key is
validated against the selected experiment's schema before any compute runs,
and model invariants (e.g. sigma^2 < 2*mu) are checked at parse time.

CSV outputs carry a header row, floats with 17 significant digits (lossless
round-trip), and are deterministic given the config including seeds.  The
``WAVELAB_THREADS`` environment variable caps ensemble workers (0 = auto).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, experiments
from .deterministic import ViscousParams, cole_hopf_solve, fd_viscous_solve
from .grids import Field, Grid
from .spde import NoiseParams, simulate_path
from .waves import (
    RiemannData,
    ShockProfileParams,
    approx_rarefaction_initial,
    viscous_shock,
)


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


EXPERIMENTS = (
    "rarefaction-stability",
    "shock-instability",
    "area-check",
    "area-witness",
    "oracle-compare",
    "simulate",
)

_REQUIRED = object()

# key -> (type tag, default); type tags: int, float, str, bool, floats.
# output_dir and emit_svg are accepted by every experiment.
_SCHEMAS: dict[str, dict[str, tuple[str, object]]] = {
    "rarefaction-stability": {
        "paths": ("int", 8),
        "base_seed": ("int", 12345),
        "mu": ("float", 0.2),
        "sigma": ("float", 0.3),
        "u_minus": ("float", -1.0),
        "u_plus": ("float", 1.0),
        "x_min": ("float", None),
        "x_max": ("float", None),
        "grid_n": ("int", 1024),
        "dt": ("float", 0.025),
        "t_end": ("float", 50.0),
        "record_times": ("floats", None),
        "p_list": ("floats", [2.0, 4.0, 6.0, math.inf]),
        "epsilon": ("float", 0.05),
        "scheme": ("str", "shift"),
        "amplitude": ("float", None),
        "measure_fraction": ("float", 0.5),
        "check_linf_exponent_max": ("float", -0.15),
    },
    "shock-instability": {
        "u_minus": ("float", 1.0),
        "nu": ("float", 0.1),
        "sigma": ("float", 1.0),
        "c": ("float", 1.0),
        "quad_nodes": ("int", 256),
        "t_min": ("float", 1e-2),
        "t_max": ("float", 1e4),
        "n_times": ("int", 50),
        "paths": ("int", 10000),
        "base_seed": ("int", 777),
    },
    "area-check": {
        "input_csv": ("str", _REQUIRED),
        "c0": ("float", _REQUIRED),
        "c1": ("float", _REQUIRED),
        "alpha": ("float", _REQUIRED),
        "beta": ("float", 0.0),
        "gamma": ("float", 0.0),
        "t_star": ("float", None),
    },
    "area-witness": {
        "alpha": ("float", 1.0),
        "epsilon": ("float", 0.1),
        "c0": ("float", 1.0),
        "n_max": ("int", 6),
    },
    "oracle-compare": {
        "nu": ("float", 0.05),
        "u_minus": ("float", -1.0),
        "u_plus": ("float", 1.0),
        "x_min": ("float", -21.0),
        "x_max": ("float", 21.0),
        "grid_n": ("int", 8192),
        "t_end": ("float", 1.0),
        "levels": ("int", 2),
        "check_linf_max": ("float", 5e-3),
        "check_factor_min": ("float", 1.8),
    },
    "simulate": {
        "scheme": ("str", "shift"),
        "mu": ("float", 0.2),
        "sigma": ("float", 0.3),
        "u_minus": ("float", -1.0),
        "u_plus": ("float", 1.0),
        "initial": ("str", "rarefaction"),
        "amplitude": ("float", None),
        "x_min": ("float", -41.0),
        "x_max": ("float", 41.0),
        "grid_n": ("int", 1024),
        "dt": ("float", 0.02),
        "t_end": ("float", 1.0),
        "seed": ("int", 1),
        "record_times": ("floats", None),
    },
}


@dataclass
class RunConfig:
    experiment: str
    params: dict
    output_dir: str = "out"
    emit_svg: bool = False

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}")


def _parse_scalar(token: str, lineno: int):
    t = token.strip()
    if t.startswith('"') and t.endswith('"') and len(t) >= 2:
        return t[1:-1]
    low = t.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("inf", "+inf", "infinity"):
        return math.inf
    try:
        return int(t)
    except ValueError:
        pass
    try:
        return float(t)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse value {token!r}") from None


def _parse_value(token: str, lineno: int):
    t = token.strip()
    if t.startswith("[") and t.endswith("]"):
        inner = t[1:-1].strip()
        if not inner:
            return []
        return [_parse_scalar(part, lineno) for part in inner.split(",")]
    return _parse_scalar(t, lineno)


def _coerce(key: str, value, tag: str, lineno: int):
    if tag == "str":
        if not isinstance(value, str):
            raise ConfigError(f'line {lineno}: key {key!r} wants a quoted string')
        return value
    if tag == "bool":
        if not isinstance(value, bool):
            raise ConfigError(f"line {lineno}: key {key!r} wants true/false")
        return value
    if tag == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"line {lineno}: key {key!r} wants an integer")
        return value
    if tag == "float":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"line {lineno}: key {key!r} wants a number")
        return float(value)
    if tag == "floats":
        if not isinstance(value, list) or any(
            isinstance(v, (str, bool)) for v in value
        ):
            raise ConfigError(f"line {lineno}: key {key!r} wants a list of numbers")
        return [float(v) for v in value]
    raise AssertionError(tag)


def parse_config_text(text: str, experiment: str | None = None) -> RunConfig:
    """Parse flat key=value config text into a validated RunConfig."""
    raw: dict[str, tuple[object, int]] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {line!r}")
        key, _, rest = stripped.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        if key in raw:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        raw[key] = (_parse_value(rest, lineno), lineno)

    exp = experiment
    if "experiment" in raw:
        file_exp, lineno = raw.pop("experiment")
        file_exp = _coerce("experiment", file_exp, "str", lineno)
        if exp is not None and file_exp != exp:
            raise ConfigError(
                f"config file selects experiment {file_exp!r} but {exp!r} was requested"
            )
        exp = file_exp
    if exp is None:
        raise ConfigError("no experiment selected (pass one or set 'experiment = ...')")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp!r}; expected one of {EXPERIMENTS}")

    schema = _SCHEMAS[exp]
    params: dict = {}
    output_dir = "out"
    emit_svg = False
    for key, (value, lineno) in raw.items():
        if key == "output_dir":
            output_dir = _coerce(key, value, "str", lineno)
            continue
        if key == "emit_svg":
            emit_svg = _coerce(key, value, "bool", lineno)
            continue
        if key not in schema:
            raise ConfigError(f"line {lineno}: unknown key {key!r} for experiment {exp!r}")
        params[key] = _coerce(key, value, schema[key][0], lineno)
    for key, (tag, default) in schema.items():
        if key not in params:
            if default is _REQUIRED:
                raise ConfigError(f"missing required key {key!r} for experiment {exp!r}")
            params[key] = default

    cfg = RunConfig(experiment=exp, params=params, output_dir=output_dir, emit_svg=emit_svg)
    _validate_invariants(cfg)
    return cfg


def parse_config(path: str | Path, experiment: str | None = None) -> RunConfig:
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {p}")
    return parse_config_text(p.read_text(), experiment)


def _validate_invariants(cfg: RunConfig):
    """Check module-level invariants before any compute."""
    p = cfg.params
    if cfg.experiment in ("rarefaction-stability", "simulate"):
        try:
            NoiseParams(p["mu"], p["sigma"])
        except ValueError as exc:
            raise ConfigError(f"invalid noise parameters: {exc} (rule: sigma^2 < 2*mu)") from exc
    if cfg.experiment == "rarefaction-stability":
        if not p["u_minus"] < p["u_plus"]:
            raise ConfigError("rule violated: rarefaction requires u_minus < u_plus")
    if cfg.experiment == "shock-instability":
        if p["u_minus"] <= 0 or p["nu"] <= 0:
            raise ConfigError("rule violated: shock profile requires u_minus > 0 and nu > 0")
        if p["c"] != 1.0:
            raise ConfigError("rule violated: instability curve requires the c = 1 profile")
    if cfg.experiment == "area-check":
        try:
            analysis.AreaPremises(p["c0"], p["c1"], p["alpha"], p["beta"], p["gamma"])
        except ValueError as exc:
            raise ConfigError(f"invalid area premises: {exc}") from exc


def format_config(cfg: RunConfig) -> str:
    """Serialize a RunConfig back to the key=value grammar (round-trips)."""

    def fmt(v) -> str:
        if isinstance(v, bool):
            return "true" if v else "false"
        if isinstance(v, str):
            return f'"{v}"'
        if isinstance(v, float):
            return "inf" if math.isinf(v) else f"{v:.17g}"
        if isinstance(v, int):
            return str(v)
        if isinstance(v, (list, tuple)):
            return "[" + ", ".join(fmt(x) for x in v) + "]"
        raise TypeError(f"cannot format {v!r}")

    lines = [f'experiment = "{cfg.experiment}"']
    lines.append(f'output_dir = "{cfg.output_dir}"')
    lines.append(f"emit_svg = {fmt(cfg.emit_svg)}")
    for key in sorted(cfg.params):
        value = cfg.params[key]
        if value is None:
            continue  # unset optionals keep their defaults on re-parse
        lines.append(f"{key} = {fmt(value)}")
    return "\n".join(lines) + "\n"


def _write_csv(path: Path, header: list[str], rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow(
                [f"{v:.17g}" if isinstance(v, float) else str(v) for v in row]
            )


def _plot_svg(path: Path, xs, series: dict[str, np.ndarray], xlabel: str, logscale=True):
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(7, 4.5))
    for name, ys in series.items():
        ax.plot(xs, ys, label=name)
    if logscale:
        ax.set_xscale("log")
        ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)


@dataclass
class _CheckList:
    results: list[tuple[str, bool, str]] = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.results.append((name, bool(ok), detail))

    def report(self) -> int:
        failed = []
        for name, ok, detail in self.results:
            status = "PASS" if ok else "FAIL"
            suffix = f"  ({detail})" if detail else ""
            print(f"check {name}: {status}{suffix}")
            if not ok:
                failed.append(name)
        print(f"failed_checks: {json.dumps(failed)}")
        return 0 if not failed else 1


def _p_tag(p: float) -> str:
    return "inf" if math.isinf(p) else f"{p:g}"


def _run_rarefaction(cfg: RunConfig, out: Path, checks: _CheckList):
    p = cfg.params
    span = max(abs(p["u_minus"]), abs(p["u_plus"])) * p["t_end"] + 20.0
    x_min = p["x_min"] if p["x_min"] is not None else -span
    x_max = p["x_max"] if p["x_max"] is not None else span
    record = p["record_times"]
    if record is None:
        record = list(np.geomspace(max(1.0, p["dt"]), p["t_end"], 24))
    ecfg = experiments.EnsembleConfig(
        paths=p["paths"],
        base_seed=p["base_seed"],
        noise=NoiseParams(p["mu"], p["sigma"]),
        riemann=RiemannData(p["u_minus"], p["u_plus"]),
        grid=Grid(x_min, x_max, p["grid_n"]),
        dt=p["dt"],
        T=p["t_end"],
        record_times=tuple(record),
        p_list=tuple(p["p_list"]),
        epsilon=p["epsilon"],
        scheme=p["scheme"],
        perturbation_amplitude=p["amplitude"],
        measure_fraction=p["measure_fraction"],
    )
    stats, fits = experiments.rarefaction_stability(ecfg)

    header = ["t"]
    for q in stats.p_list:
        tag = _p_tag(q)
        header += [f"lp{tag}_mean", f"lp{tag}_stderr"]
    for q in stats.p_list:
        tag = _p_tag(q)
        header += [f"phi_lp{tag}_mean", f"phi_lp{tag}_stderr"]
    header += ["phi_l2sq_mean", "phi_l2sq_stderr", "phi_h1_mean", "phi_h1_stderr"]
    rows = []
    for i, t in enumerate(stats.times):
        row = [float(t)]
        for q in stats.p_list:
            row += [float(stats.ur_gap_mean[q][i]), float(stats.ur_gap_stderr[q][i])]
        for q in stats.p_list:
            row += [float(stats.phi_gap_mean[q][i]), float(stats.phi_gap_stderr[q][i])]
        row += [
            float(stats.phi_l2sq_mean[i]),
            float(stats.phi_l2sq_stderr[i]),
            float(stats.phi_h1_mean[i]),
            float(stats.phi_h1_stderr[i]),
        ]
        rows.append(row)
    _write_csv(out / "rarefaction_stability.csv", header, rows)
    _write_csv(
        out / "rarefaction_as_statistic.csv",
        ["path", "c_epsilon"],
        [[k, float(v)] for k, v in enumerate(stats.as_statistics)],
    )

    print(f"paths: {stats.paths}  failures: {len(stats.failures)}")
    for q, fit in sorted(fits.items(), key=lambda kv: kv[0]):
        print(
            f"fitted exponent of mean |u - fan|_p in L{_p_tag(q)} on "
            f"[{fit.window[0]:g}, {fit.window[1]:g}]: {fit.exponent:+.3f} "
            f"(rms residual {fit.residual:.3f})"
        )
    if math.inf in fits:
        checks.add(
            "linf_exponent",
            fits[math.inf].exponent <= p["check_linf_exponent_max"],
            f"{fits[math.inf].exponent:+.3f} <= {p['check_linf_exponent_max']:+.3f}",
        )
    checks.add("path_failures", len(stats.failures) <= 0.01 * ecfg.paths)
    if cfg.emit_svg:
        series = {f"L{_p_tag(q)}": stats.ur_gap_mean[q] for q in stats.p_list}
        _plot_svg(out / "rarefaction_stability.svg", stats.times, series, "t")


def _run_shock(cfg: RunConfig, out: Path, checks: _CheckList):
    p = cfg.params
    prof = ShockProfileParams(
        RiemannData(p["u_minus"], -p["u_minus"]), nu=p["nu"], c=p["c"]
    )
    times = np.geomspace(p["t_min"], p["t_max"], p["n_times"])
    quad = experiments.shock_instability_quadrature(prof, p["sigma"], times, p["quad_nodes"])
    mc = experiments.shock_instability_monte_carlo(
        prof, p["sigma"], times, p["paths"], p["base_seed"]
    )
    _write_csv(
        out / "shock_instability.csv",
        ["t", "d_quadrature", "d_mc", "stderr"],
        [
            [float(t), float(q), float(m), float(s)]
            for t, q, m, s in zip(times, quad.values, mc.values, mc.stderr)
        ],
    )
    mono = bool(np.all(np.diff(quad.values) >= -1e-8))
    agree = bool(np.all(np.abs(quad.values - mc.values) <= 3.0 * mc.stderr + 1e-12))
    jump = 2.0 * p["u_minus"]
    print(f"d({times[-1]:g}) = {quad.values[-1]:.6f} of jump {jump:g}")
    checks.add("d_monotone", mono)
    checks.add("mc_quadrature_agreement", agree)
    if cfg.emit_svg:
        _plot_svg(
            out / "shock_instability.svg",
            times,
            {"quadrature": quad.values, "monte-carlo": mc.values},
            "t",
        )


def _run_area_check(cfg: RunConfig, out: Path, checks: _CheckList):
    p = cfg.params
    path = Path(p["input_csv"])
    if not path.exists():
        raise ConfigError(f"input_csv not found: {path}")
    data = np.genfromtxt(path, delimiter=",", names=True)
    try:
        f = analysis.SampledFunction(np.asarray(data["t"]), np.asarray(data["value"]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"input_csv needs columns t,value: {exc}") from exc
    prem = analysis.AreaPremises(p["c0"], p["c1"], p["alpha"], p["beta"], p["gamma"])
    report = analysis.area_check(f, prem, p["t_star"])
    envelope = analysis.area_envelope(prem, f.times)
    naive = analysis.area_naive_bound(f, p["c0"], p["alpha"])
    _write_csv(
        out / "area_check.csv",
        ["t", "f", "envelope", "naive_envelope"],
        [
            [float(a), float(b), float(c), float(d)]
            for a, b, c, d in zip(f.times, f.values, envelope, naive.values)
        ],
    )
    print(
        f"premise1: {report.premise1_ok}  premise2: {report.premise2_ok}  "
        f"conclusion: {report.conclusion_ok}  first_ok_time: {report.first_ok_time}"
    )
    checks.add("premises", report.premise1_ok and report.premise2_ok)
    checks.add("conclusion", bool(report.conclusion_ok))
    if cfg.emit_svg:
        _plot_svg(
            out / "area_check.svg",
            f.times,
            {"f": f.values, "envelope": envelope, "naive": naive.values},
            "t",
        )


def _run_area_witness(cfg: RunConfig, out: Path, checks: _CheckList):
    p = cfg.params
    segs = analysis.witness_segments(p["alpha"], p["epsilon"], p["c0"], p["n_max"])
    g = analysis.area_witness(p["alpha"], p["epsilon"], p["c0"], p["n_max"])
    _write_csv(
        out / "witness.csv",
        ["t", "g"],
        [[float(a), float(b)] for a, b in zip(g.times, g.values)],
    )
    _write_csv(
        out / "witness_peaks.csv",
        ["n", "s_n", "t_n", "g_peak"],
        [[s.n, float(s.start), float(s.t_peak), float(s.peak)] for s in segs],
    )
    peak_identity = max(
        abs(s.peak * (1.0 + s.t_peak) ** (0.5 * p["alpha"] + p["epsilon"]) - 1.0)
        for s in segs
    )
    quot = np.diff(g.values) / np.diff(g.times)
    cap = p["c0"] * (1.0 + g.times[:-1]) ** (-p["alpha"])
    print(f"segments: {len(segs)}  total area <= {analysis.witness_integral_bound(segs, p['alpha'], p['c0']):.6f}")
    checks.add("peak_identity", peak_identity < 1e-9, f"max dev {peak_identity:.2e}")
    checks.add("derivative_cap", bool(np.all(quot <= cap + 1e-9)))
    if cfg.emit_svg:
        _plot_svg(out / "witness.svg", g.times + 1.0, {"g": g.values}, "1 + t")


def _run_oracle_compare(cfg: RunConfig, out: Path, checks: _CheckList):
    p = cfg.params
    mid = 0.5 * (p["u_plus"] + p["u_minus"])
    half = 0.5 * (p["u_plus"] - p["u_minus"])

    def primitive(y):
        ya = np.asarray(y, dtype=float)
        return mid * ya + half * (np.logaddexp(ya, -ya) - math.log(2.0))

    rows = []
    gaps = []
    for level in range(p["levels"]):
        n = (p["grid_n"] - 1) * 2**level + 1
        grid = Grid(p["x_min"], p["x_max"], n)
        u0 = Field(grid, mid + half * np.tanh(grid.x))
        umax = float(np.max(np.abs(u0.values)))
        dt = 0.36 * grid.dx / max(umax, 1e-12)
        fd = fd_viscous_solve(u0, ViscousParams(p["nu"]), p["t_end"], dt)
        ch = cole_hopf_solve(None, primitive, p["nu"], p["t_end"], grid.x)
        gap = float(np.max(np.abs(fd.values - ch)))
        gaps.append(gap)
        rows.append([level, n, float(dt), gap])
        print(f"level {level}: n={n} dt={dt:.3e} Linf gap={gap:.3e}")
    _write_csv(out / "oracle_compare.csv", ["level", "n", "dt", "linf_gap"], rows)
    checks.add("linf_gap", gaps[0] <= p["check_linf_max"], f"{gaps[0]:.3e}")
    if len(gaps) >= 2:
        factor = min(gaps[i] / gaps[i + 1] for i in range(len(gaps) - 1))
        checks.add(
            "refinement_factor",
            factor >= p["check_factor_min"],
            f"{factor:.2f} >= {p['check_factor_min']:g}",
        )


def _run_simulate(cfg: RunConfig, out: Path, checks: _CheckList):
    p = cfg.params
    grid = Grid(p["x_min"], p["x_max"], p["grid_n"])
    noise = NoiseParams(p["mu"], p["sigma"])
    riemann = RiemannData(p["u_minus"], p["u_plus"])
    if p["initial"] == "rarefaction":
        riemann.require_rarefaction()
        amp = p["amplitude"] if p["amplitude"] is not None else 0.5 * riemann.strength
        u0 = Field(
            grid, approx_rarefaction_initial(riemann, grid.x) + amp * np.exp(-grid.x**2)
        )
    elif p["initial"] == "shock":
        prof = ShockProfileParams(riemann, nu=noise.nu_eff, c=1.0)
        u0 = Field(grid, viscous_shock(prof, grid.x))
    else:
        raise ConfigError(f"unknown initial condition {p['initial']!r}")
    record = p["record_times"]
    if record is None:
        record = list(np.linspace(0.0, p["t_end"], 5)) if p["t_end"] > 0 else [0.0]
    snaps = simulate_path(
        u0, noise, riemann, p["scheme"], p["t_end"], p["dt"], p["seed"], record
    )
    rows = []
    for t, fld in snaps:
        for x, u in zip(grid.x, fld.values):
            rows.append([float(t), float(x), float(u)])
    _write_csv(out / "snapshots.csv", ["t", "x", "u"], rows)
    print(f"wrote {len(snaps)} snapshots at times {[round(t, 6) for t, _ in snaps]}")
    checks.add("completed", True)
    if cfg.emit_svg:
        series = {f"t={t:g}": fld.values for t, fld in snaps}
        _plot_svg(out / "snapshots.svg", grid.x, series, "x", logscale=False)


_RUNNERS = {
    "rarefaction-stability": _run_rarefaction,
    "shock-instability": _run_shock,
    "area-check": _run_area_check,
    "area-witness": _run_area_witness,
    "oracle-compare": _run_oracle_compare,
    "simulate": _run_simulate,
}


def run(cfg: RunConfig) -> int:
    """Execute the experiment; returns 0 iff all enabled checks pass."""
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    checks = _CheckList()
    _RUNNERS[cfg.experiment](cfg, out, checks)
    return checks.report()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="wavelab", description=__doc__)
    sub = parser.add_subparsers(dest="experiment", required=True)
    for exp in EXPERIMENTS:
        sp = sub.add_parser(exp)
        sp.add_argument("--config", required=False, help="key = value config file")
        sp.add_argument("--output", help="output directory (overrides config)")
        sp.add_argument("--seed", type=int, help="override base seed")
        sp.add_argument("--paths", type=int, help="override path count")
        sp.add_argument("--svg", action="store_true", help="emit SVG plots")
    args = parser.parse_args(argv)

    try:
        if args.config:
            cfg = parse_config(args.config, args.experiment)
        else:
            cfg = parse_config_text("", args.experiment)
        if args.output:
            cfg.output_dir = args.output
        if args.svg:
            cfg.emit_svg = True
        if args.seed is not None:
            for key in ("base_seed", "seed"):
                if key in cfg.params:
                    cfg.params[key] = args.seed
        if args.paths is not None and "paths" in cfg.params:
            cfg.params["paths"] = args.paths
        return run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
