"""End-to-end acceptance suite.

Each test prints one PASS/FAIL line per criterion so a plain ``pytest -s``
run doubles as the verification report.  Heavy ensembles are module-scoped
fixtures with frozen seeds; all tolerances are pinned here, not tuned at
runtime.
"""

import math

import numpy as np
import pytest

from wavelab.analysis import (
    AreaPremises,
    SampledFunction,
    area_check,
    area_envelope,
    area_witness,
    rate_fit,
    witness_integral_bound,
    witness_segments,
    witness_value,
)
from wavelab.deterministic import ViscousParams, cole_hopf_solve, fd_viscous_solve
from wavelab.experiments import (
    CrossValidationConfig,
    EnsembleConfig,
    rarefaction_stability,
    scheme_cross_validation,
    shock_instability_monte_carlo,
    shock_instability_quadrature,
    shock_shift_sup,
    shock_shift_sup_bruteforce,
)
from wavelab.grids import Field, Grid
from wavelab.spde import CutoffParam, NoiseParams, cutoff_project, discrete_h1_norm
from wavelab.waves import (
    RiemannData,
    ShockProfileParams,
    approx_exact_gap_norm,
    profile_derivative_norms,
    viscous_shock,
)

SEED = 20260809


def report(criterion: str, ok: bool, detail: str):
    print(f"\nACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} -- {detail}")


# --- shared heavy fixtures -------------------------------------------------


@pytest.fixture(scope="module")
def rarefaction_run():
    """Criterion 4 ensemble: 64 paths, grid 4096, T = 200, sigma = 0.3."""
    cfg = EnsembleConfig(
        paths=64,
        base_seed=SEED,
        noise=NoiseParams(0.2, 0.3),
        riemann=RiemannData(-1.0, 1.0),
        grid=Grid(-220.0, 220.0, 4096),
        dt=0.025,
        T=200.0,
        record_times=tuple(np.geomspace(1.0, 200.0, 25)),
        p_list=(2.0, 4.0, 6.0, math.inf),
        epsilon=0.05,
        scheme="shift",
    )
    return rarefaction_stability(cfg)


# --- criterion 1: deterministic oracle agreement ---------------------------


def test_criterion_1_oracle_agreement():
    nu = 0.05

    def primitive(y):
        ya = np.asarray(y, dtype=float)
        return np.logaddexp(ya, -ya) - math.log(2.0)  # ln cosh

    gaps = []
    for n in (8192, 16383):
        grid = Grid(-21.0, 21.0, n)
        u0 = Field(grid, np.tanh(grid.x))
        dt = 0.36 * grid.dx
        fd = fd_viscous_solve(u0, ViscousParams(nu), 1.0, dt)
        ch = cole_hopf_solve(None, primitive, nu, 1.0, grid.x)
        gaps.append(float(np.max(np.abs(fd.values - ch))))
    factor = gaps[0] / gaps[1]
    ok = gaps[0] <= 5e-3 and factor >= 1.8
    report(
        "1 oracle-agreement",
        ok,
        f"Linf gap {gaps[0]:.3e} (<= 5e-3), halving factor {factor:.2f} (>= 1.8)",
    )
    assert gaps[0] <= 5e-3
    assert factor >= 1.8


# --- criterion 2: standing viscous shock ------------------------------------


def test_criterion_2_standing_shock():
    nu = 0.2
    prof = ShockProfileParams(RiemannData(1.0, -1.0), nu=nu, c=1.0)
    grid = Grid(-12.0, 12.0, 4096)
    u0 = Field(grid, viscous_shock(prof, grid.x))
    out = fd_viscous_solve(u0, ViscousParams(nu), 1.0, 0.36 * grid.dx)
    drift = float(np.max(np.abs(out.values - u0.values)))
    ok = drift <= 1e-2
    report("2 standing-shock", ok, f"Linf drift {drift:.3e} (<= 1e-2) over T=1 on n=4096")
    assert drift <= 1e-2


# --- criterion 3: shift-representation law check ----------------------------


def test_criterion_3_shift_law():
    cfg = CrossValidationConfig(
        paths=48,
        probe_paths=200,
        base_seed=911,
        noise=NoiseParams(mu=0.2, sigma=0.3),
        riemann=RiemannData(-1.0, 1.0),
        grid=Grid(-21.0, 21.0, 256),
        dt=1.0 / 32,
        T=1.0,
        levels=3,
    )
    rep = scheme_cross_validation(cfg)
    # dx halves per level; dt follows the noise-stability scaling dt ~ dx^2
    slope = math.log2(rep.levels[0].mean_gap / rep.levels[-1].mean_gap) / (cfg.levels - 1)
    mean_ok = bool(np.all(rep.probes.mean_agree))
    var_ok = bool(np.all(rep.probes.var_agree))
    ok = slope >= 0.8 and mean_ok and var_ok
    report(
        "3 shift-law",
        ok,
        f"gap slope {slope:.2f} per halving (>= 0.8; per-level "
        f"{[round(s, 2) for s in rep.slopes]}), probe means agree={mean_ok}, "
        f"variances agree={var_ok} over {cfg.probe_paths} paths",
    )
    assert slope >= 0.8
    assert mean_ok and var_ok


# --- criterion 4: rarefaction stability -------------------------------------


def test_criterion_4a_sup_norm_decay(rarefaction_run):
    stats, fits = rarefaction_run
    expo = fits[math.inf].exponent
    ok = expo <= -0.15 and not stats.failures
    report(
        "4a rarefaction-sup-decay",
        ok,
        f"fitted Linf exponent {expo:+.3f} on [20, 200] (<= -0.15), "
        f"{stats.paths} paths, {len(stats.failures)} failures",
    )
    assert not stats.failures
    assert expo <= -0.15


def test_criterion_4b_lp_moment_boundedness(rarefaction_run):
    stats, _ = rarefaction_run
    t = stats.times
    details = []
    ok = True
    for p in (4.0, 6.0):
        series = stats.phi_pow_mean[p] * (2.0 + t) ** ((p - 2.0) / 4.0) / np.log(2.0 + t) ** p
        half = t.size // 2
        ratio = series[half:].max() / series[:half].max()
        details.append(f"p={p:g} ratio {ratio:.3f}")
        ok = ok and ratio <= 2.0
    report("4b lp-moment-bound", ok, "; ".join(details) + " (<= 2)")
    assert ok


def test_criterion_4c_l2_log_growth(rarefaction_run):
    stats, _ = rarefaction_run
    t = stats.times
    v = stats.phi_l2sq_mean
    a = np.column_stack([np.ones_like(t), np.log(2.0 + t)])
    coef, *_ = np.linalg.lstsq(a, v, rcond=None)
    resid = float(np.sqrt(np.mean((v - a @ coef) ** 2)))
    rng = float(v.max() - v.min())
    ratio = resid / rng
    # a growing power law must not beat the logarithmic model
    power = rate_fit(SampledFunction(t, v), (t[0], t[-1]))
    power_beats = power.exponent > 0.1 and power.residual < ratio
    ok = ratio <= 0.2 and not power_beats
    report(
        "4c l2-log-growth",
        ok,
        f"ln-model residual/range {ratio:.3f} (<= 0.2), "
        f"power-law exponent {power.exponent:+.3f} does not improve",
    )
    assert ratio <= 0.2
    assert not power_beats


def test_criterion_4d_as_statistic_stability(rarefaction_run):
    stats, _ = rarefaction_run
    c = stats.as_statistics
    m2_half = float(np.mean(c[: c.size // 2] ** 2))
    m2_full = float(np.mean(c**2))
    ratio = m2_half / m2_full
    ok = m2_full < np.inf and 0.5 <= ratio <= 2.0
    report(
        "4d as-statistic-stability",
        ok,
        f"second moment {m2_full:.3f}; half-ensemble ratio {ratio:.3f} in [0.5, 2]",
    )
    assert ok


# --- criterion 5: area inequality -------------------------------------------


def _synthetic_premise_cases(count: int, seed: int):
    """Randomized premise-satisfying functions with analytically derived
    constants: integrable power laws (beta = gamma = 0), slowly decaying
    power laws (beta > 0), 1/(1+t) tails (gamma = 1), and witness mixtures.
    """
    rng = np.random.default_rng(seed)
    t_grid = np.concatenate([[0.0], np.geomspace(0.01, 1e4, 1200)])
    cases = []
    while len(cases) < count:
        flavor = len(cases) % 10
        if flavor < 4:  # integrable power law
            alpha = rng.uniform(0.6, 1.9)
            theta = rng.uniform(1.05, 2.0)
            c0 = 10.0 ** rng.uniform(-1.0, 1.0)
            amp = rng.uniform(0.05, 0.9) * min(4.0 * c0 / (theta - 1.0), 1.0)
            f = amp * (1.0 + t_grid) ** (-theta)
            c1 = 1.005 * amp / (theta - 1.0)
            prem = AreaPremises(c0, c1, alpha=alpha)
        elif flavor < 7:  # beta > 0
            alpha = rng.uniform(0.5, 1.4)
            lo = max(1.0 - alpha, alpha - 1.0, 0.05) + 0.07
            theta = min(lo + rng.uniform(0.0, 0.4), 0.93)
            beta = 1.0 - theta
            c0 = 10.0 ** rng.uniform(-1.0, 1.0)
            amp = rng.uniform(0.05, 0.8) * min(4.0 * c0 / (1.0 - theta), 1.0)
            f = amp * (1.0 + t_grid) ** (-theta)
            c1 = 1.005 * amp / (1.0 - theta)
            prem = AreaPremises(c0, c1, alpha=alpha, beta=beta)
        elif flavor < 9:  # gamma = 1 tail
            alpha = rng.uniform(0.4, 1.6)
            c0 = 10.0 ** rng.uniform(-1.0, 1.0)
            amp = rng.uniform(0.05, 0.8) * min(4.0 * c0, 1.0)
            f = amp / (1.0 + t_grid)
            c1 = 1.005 * amp
            prem = AreaPremises(c0, c1, alpha=alpha, gamma=1.0)
        else:  # witness mixture on a dense union mesh (the witness's own
            # mesh is sparse between spikes, which would wreck the
            # trapezoidal rendering of the power-law tail)
            alpha = rng.uniform(0.7, 1.3)
            eps = rng.uniform(0.05, 0.2)
            c0g = 10.0 ** rng.uniform(-0.5, 0.5)
            segs = witness_segments(alpha, eps, c0g, 6)
            g = area_witness(alpha, eps, c0g, 6)
            bound = witness_integral_bound(segs, alpha, c0g)
            theta = rng.uniform(1.1, 1.8)
            lam = rng.uniform(0.2, 1.0)
            amp = lam * rng.uniform(0.1, 0.5)
            t_mix = np.unique(
                np.concatenate([g.times, np.geomspace(0.01, g.times[-1], 1500)])
            )
            g_vals = np.zeros_like(t_mix)
            for seg in segs:
                g_vals += witness_value(seg, alpha, c0g, t_mix)
            # c0g * bound >= 2 for these ranges, so the envelope constant
            # 2 sqrt(C0 C1) >= 2 lam sqrt(c0g bound) covers lam + amp
            f_vals = lam * g_vals + amp * (1.0 + t_mix) ** (-theta)
            c1 = 1.005 * (lam * bound + amp / (theta - 1.0))
            prem = AreaPremises(lam * c0g, c1, alpha=alpha)
            cases.append((SampledFunction(t_mix, f_vals), prem))
            continue
        cases.append((SampledFunction(t_grid, f), prem))
    return cases[:count]


def test_criterion_5a_synthetic_premise_functions():
    cases = _synthetic_premise_cases(100, SEED)
    bad = []
    for i, (f, prem) in enumerate(cases):
        rep = area_check(f, prem)
        if not (
            rep.premise1_ok
            and rep.premise2_ok
            and rep.conclusion_ok
            and rep.first_ok_time is not None
        ):
            bad.append((i, rep))
    ok = not bad
    report(
        "5a area-check-synthetics",
        ok,
        f"{len(cases) - len(bad)}/100 premise-satisfying functions pass "
        f"premises + conclusion with finite onset time",
    )
    assert not bad, bad[:3]


def test_criterion_5b_derivative_energy_rate(rarefaction_run):
    stats, _ = rarefaction_run
    eps = stats.epsilon
    t = stats.times
    f = SampledFunction(t, stats.phi_h1_mean)
    alpha = 1.0 - 2.0 * eps
    # fit the smallest premise constants covering the measured series
    quot = np.abs(np.diff(f.values) / np.diff(t))
    c0 = float(np.max(quot * (1.0 + t[:-1]) ** alpha)) * 1.001 + 1e-300
    from scipy.integrate import cumulative_trapezoid

    running = cumulative_trapezoid(f.values, t, initial=0.0)
    c1 = float(np.max(running / np.maximum(np.log1p(t), 1e-12))) * 1.001
    prem = AreaPremises(c0, c1, alpha=alpha, beta=0.0, gamma=1.0)
    rep = area_check(f, prem)
    fit = rate_fit(f, (10.0, 200.0))
    target = -0.5 + eps
    # one-sided: measured decay at least as fast as the envelope rate
    rate_ok = fit.exponent <= target + 0.1
    ok = bool(rep.premise1_ok and rep.premise2_ok and rep.conclusion_ok) and rate_ok
    report(
        "5b derivative-energy-rate",
        ok,
        f"area-check passes with fitted (C0={c0:.2g}, C1={c1:.2g}); envelope "
        f"exponent {0.5 * (prem.beta - prem.alpha):+.2f}; measured exponent "
        f"{fit.exponent:+.2f} <= {target + 0.1:+.2f}",
    )
    assert rep.premise1_ok and rep.premise2_ok and rep.conclusion_ok
    assert rep.first_ok_time is not None
    assert rate_ok


def test_criterion_5c_witness_optimality():
    alpha, eps, c0, n_max = 1.0, 0.1, 1.0, 6
    segs = witness_segments(alpha, eps, c0, n_max)
    g = area_witness(alpha, eps, c0, n_max)
    c1 = witness_integral_bound(segs, alpha, c0) * 1.01
    rep = area_check(g, AreaPremises(c0, c1, alpha=alpha))
    partial = np.cumsum(
        [(s.t_peak - s.start) * s.peak + 0.5 * s.peak * (s.z_end - s.t_peak) for s in segs]
    )
    sums_bounded = bool(partial[-1] < 10.0 and np.all(np.diff(partial) > 0))
    # the peaks are pinned to (1+t_n)^(-alpha/2-eps); any decay bound with
    # exponent alpha/2 + 2 eps or stronger is therefore violated: the scaled
    # sequence grows without bound across segments
    scaled = np.array([s.peak * s.t_peak ** (0.5 * alpha + 2.0 * eps) for s in segs])
    growing = bool(np.all(np.diff(scaled) > 0))
    literal = np.array([s.peak * s.t_peak ** (0.5 * alpha) for s in segs])
    ok = rep.premise1_ok and rep.premise2_ok and sums_bounded and growing
    report(
        "5c witness-optimality",
        ok,
        f"premises pass, total area {partial[-1]:.3f} bounded, "
        f"g(t_n) t_n^(a/2+2e) grows {np.array2string(scaled, precision=3)} "
        f"(at the bare rate a/2 the sequence {np.array2string(literal, precision=3)} "
        f"stays bounded, as the pinned peaks demand)",
    )
    assert rep.premise1_ok and rep.premise2_ok
    assert sums_bounded
    assert growing


# --- criterion 6: shock instability ------------------------------------------


def test_criterion_6_shock_instability():
    prof = ShockProfileParams(RiemannData(1.0, -1.0), nu=0.1, c=1.0)
    sigma = 1.0
    times = np.geomspace(1e-2, 1e4, 50)
    quad = shock_instability_quadrature(prof, sigma, times, 256)
    mono = bool(np.all(np.diff(quad.values) >= -1e-8))
    final_ok = quad.values[-1] >= 0.99 * 2.0
    mc = shock_instability_monte_carlo(prof, sigma, times, 10000, 777)
    agree = bool(np.all(np.abs(quad.values - mc.values) <= 3.0 * mc.stderr))
    rng = np.random.default_rng(17)
    sup_dev = max(
        abs(shock_shift_sup(prof, a) - shock_shift_sup_bruteforce(prof, a))
        for a in rng.uniform(-6.0, 6.0, 20)
    )
    sup_ok = sup_dev <= 1e-8
    ok = mono and final_ok and agree and sup_ok
    report(
        "6 shock-instability",
        ok,
        f"monotone={mono}, d(1e4)={quad.values[-1]:.4f} (>= 1.98), "
        f"MC within 3 stderr={agree}, sup formula dev {sup_dev:.1e} (<= 1e-8)",
    )
    assert mono and final_ok and agree and sup_ok


# --- criterion 7: cut-off nonexpansiveness -----------------------------------


def test_criterion_7_cutoff_nonexpansive():
    rng = np.random.default_rng(SEED)
    grid = Grid(0.0, 1.0, 48)
    branches = {"both_in": 0, "one_in": 0, "both_out": 0}
    worst = -np.inf
    for _ in range(10000):
        v = Field(grid, rng.normal(size=48) * rng.uniform(0.2, 3.0))
        w = Field(grid, rng.normal(size=48) * rng.uniform(0.2, 3.0))
        m = CutoffParam(rng.uniform(0.4, 2.5) * discrete_h1_norm(v))
        inside = (discrete_h1_norm(v) <= m.m) + (discrete_h1_norm(w) <= m.m)
        branches[("both_out", "one_in", "both_in")[inside]] += 1
        lhs = discrete_h1_norm(
            Field(grid, cutoff_project(v, m).values - cutoff_project(w, m).values)
        )
        rhs = discrete_h1_norm(Field(grid, v.values - w.values))
        worst = max(worst, lhs - rhs)
        if lhs > rhs + 1e-12:
            break
    ok = worst <= 1e-12 and all(n > 0 for n in branches.values())
    report(
        "7 cutoff-nonexpansive",
        ok,
        f"10^4 pairs, worst slack {worst:.2e} (<= 1e-12), branch counts {branches}",
    )
    assert ok


# --- criterion 8: smooth-fan profile bounds ----------------------------------


def test_criterion_8_profile_bounds():
    r = RiemannData(-1.0, 1.0)
    l1_dev = max(abs(profile_derivative_norms(r, t, 1.0) - 2.0) for t in (0.0, 1.0, 10.0, 100.0))
    l1_ok = l1_dev <= 1e-8

    ts = np.geomspace(100.0, 10000.0, 9)
    slope_details = []
    slopes_ok = True
    for p in (2.0, 4.0):
        vals = [profile_derivative_norms(r, t, p) for t in ts]
        slope = float(np.polyfit(np.log(ts), np.log(vals), 1)[0])
        target = -1.0 + 1.0 / p
        slopes_ok = slopes_ok and abs(slope - target) <= 0.05
        slope_details.append(f"slope_x p={p:g}: {slope:+.3f} vs {target:+.3f}")
    for p in (2.0, 4.0):
        vals = [approx_exact_gap_norm(r, t, p) for t in ts]
        slope = float(np.polyfit(np.log(ts), np.log(vals), 1)[0])
        target = -(p - 1.0) / (2.0 * p)
        slopes_ok = slopes_ok and abs(slope - target) <= 0.05
        slope_details.append(f"fan-gap p={p:g}: {slope:+.3f} vs {target:+.3f}")
    ok = l1_ok and slopes_ok
    report(
        "8 profile-bounds",
        ok,
        f"L1 identity dev {l1_dev:.1e} (<= 1e-8); " + "; ".join(slope_details) + " (+-0.05)",
    )
    assert l1_ok
    assert slopes_ok
