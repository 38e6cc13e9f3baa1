"""Monte Carlo ensembles and quadratures probing wave stability.

Three experiment families:

* ``rarefaction_stability`` -- ensembles of noisy trajectories started near
  the smooth fan, measuring L^p distances to the exact fan and the energy
  series that feed the decay-rate machinery.
* ``shock_instability_*`` -- the expected sup-distance d(t) between a viscous
  shock and its Brownian-shifted copy, via quadrature and via direct
  sampling.  d grows from 0 to the full jump u_- - u_+, which is the
  quantitative form of shock non-stability under transport noise.
* ``scheme_cross_validation`` -- matched-seed comparison of the direct
  Euler-Maruyama scheme against the exact-in-law shift scheme under joint
  (dt, dx) refinement, plus probe-point law agreement.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .analysis import RateFit, SampledFunction, forward_diff_l2_sq, lp_norm, rate_fit
from .deterministic import StabilityError, _hermgauss
from .grids import Field, Grid
from .spde import (
    BrownianPath,
    NoiseParams,
    align_record_times,
    noise_cfl_dt,
    run_path,
    sample_brownian,
)
from .waves import (
    RiemannData,
    ShockProfileParams,
    approx_rarefaction,
    approx_rarefaction_initial,
    viscous_shock,
)


class EnsembleError(RuntimeError):
    """Raised when too many paths of an ensemble fail."""


def worker_count() -> int:
    """Worker cap from WAVELAB_THREADS (0 or unset = number of CPUs)."""
    raw = os.environ.get("WAVELAB_THREADS", "0")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"WAVELAB_THREADS must be an integer, got {raw!r}") from exc
    if n < 0:
        raise ValueError(f"WAVELAB_THREADS must be >= 0, got {n}")
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class EnsembleConfig:
    """Configuration of one rarefaction-stability ensemble.

    Path k runs with seed base_seed + k.  The initial datum is the smooth fan
    plus a compactly supported bump a*exp(-x^2); by default the amplitude a
    is half the fan strength.
    """

    paths: int
    base_seed: int
    noise: NoiseParams
    riemann: RiemannData
    grid: Grid
    dt: float
    T: float
    record_times: tuple[float, ...]
    p_list: tuple[float, ...] = (2.0, 4.0, 6.0, math.inf)
    epsilon: float = 0.05
    scheme: str = "shift"
    perturbation_amplitude: float | None = None
    # norms are evaluated on this central fraction of the domain; the strip
    # near the pinned boundaries carries an O(T/L^2) truncation artifact that
    # would otherwise pollute the sup-norm statistics
    measure_fraction: float = 0.5

    def __post_init__(self):
        if self.paths < 1:
            raise ValueError(f"need paths >= 1, got {self.paths}")
        rt = np.asarray(self.record_times, dtype=float)
        if rt.size == 0 or np.any(rt < 0) or np.any(rt > self.T + 1e-9):
            raise ValueError("record_times must be nonempty and within [0, T]")
        if np.any(np.diff(rt) < 0):
            raise ValueError("record_times must be sorted")
        for p in self.p_list:
            if not (2.0 <= p):
                raise ValueError(f"p_list entries must lie in [2, inf], got {p}")
        if not 0.0 < self.epsilon < 0.25:
            raise ValueError(f"need epsilon in (0, 1/4), got {self.epsilon}")
        if not 0.0 < self.measure_fraction <= 1.0:
            raise ValueError(f"need measure_fraction in (0, 1], got {self.measure_fraction}")

    @property
    def amplitude(self) -> float:
        if self.perturbation_amplitude is not None:
            return self.perturbation_amplitude
        return 0.5 * self.riemann.strength

    def initial_values(self) -> np.ndarray:
        x = self.grid.x
        return approx_rarefaction_initial(self.riemann, x) + self.amplitude * np.exp(-x * x)


@dataclass
class EnsembleStats:
    """Per-record-time ensemble statistics (means with standard errors)."""

    times: np.ndarray
    p_list: tuple[float, ...]
    ur_gap_mean: dict[float, np.ndarray]
    ur_gap_stderr: dict[float, np.ndarray]
    phi_gap_mean: dict[float, np.ndarray]
    phi_gap_stderr: dict[float, np.ndarray]
    phi_pow_mean: dict[float, np.ndarray]  # mean of ||phi||_p^p (finite p)
    phi_l2sq_mean: np.ndarray
    phi_l2sq_stderr: np.ndarray
    phi_h1_mean: np.ndarray
    phi_h1_stderr: np.ndarray
    as_statistics: np.ndarray
    epsilon: float
    paths: int
    failures: list[tuple[int, int, str]]


def as_rate_statistic(phi_inf: SampledFunction, epsilon: float) -> float:
    """Per-path decay constant: max over records of (2+t)^(1/4-eps) ||phi||_inf.

    Finiteness of this statistic across paths is the almost-sure form of the
    rarefaction decay rate; its empirical second moment should be stable
    under growing ensembles.
    """
    if phi_inf.times.size < 20:
        raise ValueError(f"need >= 20 record times, got {phi_inf.times.size}")
    weight = (2.0 + phi_inf.times) ** (0.25 - epsilon)
    return float(np.max(weight * phi_inf.values))


# Context shared with pool workers (populated by the initializer after fork).
_CTX: dict = {}


def _init_worker(ctx):
    _CTX.clear()
    _CTX.update(ctx)


def measurement_window(grid: Grid, fraction: float) -> tuple[slice, Grid]:
    """Centered sub-grid covering the given fraction of the domain span."""
    if fraction >= 1.0:
        return slice(0, grid.n), grid
    m = max(int(round(fraction * grid.n)), 3)
    lo = (grid.n - m) // 2
    x = grid.x
    return slice(lo, lo + m), Grid(x[lo], x[lo + m - 1], m)


def _run_one_path(ctx, k: int):
    cfg: EnsembleConfig = ctx["cfg"]
    u0 = Field(cfg.grid, ctx["u0"].copy())
    steps = int(np.floor(cfg.T / cfg.dt + 1e-9)) + 1
    path = sample_brownian(cfg.base_seed + k, cfg.dt, steps)
    snaps = run_path(u0, cfg.noise, cfg.scheme, path, cfg.record_times, cfg.T)
    n_rec = len(snaps)
    p_all = ctx["p_all"]
    win, sub = ctx["window"]
    gaps_r = np.full((len(p_all), n_rec), np.nan)
    gaps_b = np.empty((len(p_all), n_rec))
    l2sq = np.empty(n_rec)
    h1 = np.empty(n_rec)
    for i, (t_i, fld) in enumerate(snaps):
        phi = Field(sub, fld.values[win] - ctx["ubar"][i][win])
        for j, p in enumerate(p_all):
            gaps_b[j, i] = lp_norm(phi, p)
            if ctx["ur"][i] is not None:
                gaps_r[j, i] = lp_norm(Field(sub, fld.values[win] - ctx["ur"][i][win]), p)
        l2sq[i] = lp_norm(phi, 2.0) ** 2
        h1[i] = forward_diff_l2_sq(phi)
    return gaps_r, gaps_b, l2sq, h1


def _pool_task(k):
    try:
        return "ok", _run_one_path(_CTX, k)
    except StabilityError as exc:
        return "err", str(exc)


def _mean_stderr(arr: np.ndarray):
    mean = arr.mean(axis=0)
    if arr.shape[0] > 1:
        stderr = arr.std(axis=0, ddof=1) / math.sqrt(arr.shape[0])
    else:
        stderr = np.zeros_like(mean)
    return mean, stderr


def rarefaction_stability(cfg: EnsembleConfig) -> tuple[EnsembleStats, dict[float, RateFit]]:
    """Run the ensemble and fit decay exponents of the mean fan distances.

    Exponents are fitted on the window [T/10, T].  Paths whose stability
    guard trips are skipped and reported; more than 1% failures aborts.
    """
    times = align_record_times(cfg.record_times, cfg.dt, cfg.T)
    p_all = tuple(dict.fromkeys(tuple(cfg.p_list) + (math.inf,)))  # inf always measured
    ubar, ur = [], []
    x = cfg.grid.x
    for t_i in times:
        val, _slope = approx_rarefaction(cfg.riemann, t_i, x)
        ubar.append(val)
        if t_i > 0:
            ur.append(np.clip(x / t_i, cfg.riemann.u_minus, cfg.riemann.u_plus))
        else:
            ur.append(None)
    ctx = {
        "cfg": cfg,
        "u0": cfg.initial_values(),
        "p_all": p_all,
        "ubar": ubar,
        "ur": ur,
        "window": measurement_window(cfg.grid, cfg.measure_fraction),
    }

    results: dict[int, tuple] = {}
    failures: list[tuple[int, int, str]] = []
    n_workers = min(worker_count(), cfg.paths)
    if n_workers > 1:
        import multiprocessing as mp

        with mp.get_context("fork").Pool(n_workers, _init_worker, (ctx,)) as pool:
            for k, (status, res) in enumerate(pool.map(_pool_task, range(cfg.paths))):
                if status == "ok":
                    results[k] = res
                else:
                    failures.append((k, cfg.base_seed + k, res))
    else:
        for k in range(cfg.paths):
            try:
                results[k] = _run_one_path(ctx, k)
            except StabilityError as exc:
                failures.append((k, cfg.base_seed + k, str(exc)))
    if len(failures) > 0.01 * cfg.paths:
        raise EnsembleError(f"{len(failures)} of {cfg.paths} paths failed: {failures[:5]}")
    if not results:
        raise EnsembleError("all paths failed")

    ok = sorted(results)
    gaps_r = np.stack([results[k][0] for k in ok])  # (paths, p, t)
    gaps_b = np.stack([results[k][1] for k in ok])
    l2sq = np.stack([results[k][2] for k in ok])
    h1 = np.stack([results[k][3] for k in ok])

    inf_idx = p_all.index(math.inf)
    if times.size >= 20:
        as_stats = np.array(
            [
                as_rate_statistic(SampledFunction(times, gaps_b[i, inf_idx]), cfg.epsilon)
                for i in range(len(ok))
            ]
        )
    else:
        as_stats = np.full(len(ok), np.nan)

    ur_gap_mean, ur_gap_stderr = {}, {}
    phi_gap_mean, phi_gap_stderr = {}, {}
    phi_pow_mean = {}
    for j, p in enumerate(p_all):
        ur_gap_mean[p], ur_gap_stderr[p] = _mean_stderr(gaps_r[:, j, :])
        phi_gap_mean[p], phi_gap_stderr[p] = _mean_stderr(gaps_b[:, j, :])
        if not math.isinf(p):
            phi_pow_mean[p] = (gaps_b[:, j, :] ** p).mean(axis=0)
    l2sq_mean, l2sq_se = _mean_stderr(l2sq)
    h1_mean, h1_se = _mean_stderr(h1)

    stats = EnsembleStats(
        times=times,
        p_list=p_all,
        ur_gap_mean=ur_gap_mean,
        ur_gap_stderr=ur_gap_stderr,
        phi_gap_mean=phi_gap_mean,
        phi_gap_stderr=phi_gap_stderr,
        phi_pow_mean=phi_pow_mean,
        phi_l2sq_mean=l2sq_mean,
        phi_l2sq_stderr=l2sq_se,
        phi_h1_mean=h1_mean,
        phi_h1_stderr=h1_se,
        as_statistics=as_stats,
        epsilon=cfg.epsilon,
        paths=len(ok),
        failures=failures,
    )

    fits: dict[float, RateFit] = {}
    window = (cfg.T / 10.0, cfg.T)
    for p in p_all:
        mask = ~np.isnan(ur_gap_mean[p])
        series = SampledFunction(times[mask], ur_gap_mean[p][mask])
        in_window = (series.times >= window[0]) & (series.times <= window[1])
        if in_window.sum() >= 10 and np.all(series.values[in_window] > 0):
            fits[p] = rate_fit(series, window)
    return stats, fits


def shock_shift_sup(p: ShockProfileParams, a: float) -> float:
    """Closed-form sup-distance between the c=1 shock and its a-shift:
    sup_x |utilde(x) - utilde(x+a)| = 2 u_- tanh(u_- |a| / (4 nu))."""
    if p.c != 1.0:
        raise ValueError("closed-form sup requires the c = 1 normalization")
    um = p.riemann.u_minus
    return 2.0 * um * math.tanh(um * abs(a) / (4.0 * p.nu))


def shock_shift_sup_bruteforce(p: ShockProfileParams, a: float, n: int = 20001) -> float:
    """Independent check of the sup by direct maximization on a fine grid
    centered where the symmetric profiles cross, refined locally."""
    half = abs(a) / 2.0 + 40.0 * p.nu / p.riemann.u_minus
    x = np.linspace(-abs(a) / 2.0 - half, -abs(a) / 2.0 + half, n)
    d = np.abs(viscous_shock(p, x) - viscous_shock(p, x + a))
    i = int(np.argmax(d))
    lo, hi = x[max(i - 1, 0)], x[min(i + 1, n - 1)]
    xs = np.linspace(lo, hi, 20001)
    return float(np.max(np.abs(viscous_shock(p, xs) - viscous_shock(p, xs + a))))


def _d_complementary(p: ShockProfileParams, sigma: float, t: float, limit: int) -> float:
    """d(t) = 2u_- minus the Gaussian average of the saturation deficit
    r(w) = 2u_-(1 - tanh(u_- w/(4 nu))), integrated on the deficit's own
    scale.  Accurate uniformly in sigma*sqrt(t)."""
    um = p.riemann.u_minus
    s = sigma * math.sqrt(t)

    def integrand(w):
        return 2.0 * um * (1.0 - math.tanh(um * w / (4.0 * p.nu))) * math.exp(
            -0.5 * (w / s) ** 2
        )

    val, _ = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=limit)
    return 2.0 * um - (2.0 / (s * math.sqrt(2.0 * math.pi))) * val


def shock_distance_gauss_hermite(
    p: ShockProfileParams, sigma: float, t: float, n: int
) -> float:
    """Direct Gauss-Hermite rendering of E sup|shock - shifted shock|.

    Diagnostic only: the integrand has a corner at the origin (|B| enters the
    sup) and a saturation layer once sigma*sqrt(t) is large, so this
    converges slowly and is biased at extreme spreads.  The production curve
    uses the complementary exact-split integral instead.
    """
    y, w = _hermgauss(n)
    s = sigma * math.sqrt(2.0 * t)
    um = p.riemann.u_minus
    vals = 2.0 * um * np.tanh(um * np.abs(s * y) / (4.0 * p.nu))
    return float(np.sum(w * vals) / math.sqrt(math.pi))


def shock_instability_quadrature(
    p: ShockProfileParams, sigma: float, times, quad_nodes: int = 256
) -> SampledFunction:
    """Expected sup-distance d(t) between the shock and its Brownian shift.

    Writes d(t) = 2u_- - E r(sigma*sqrt(t)|Z|) with the saturation deficit
    r(w) = 2u_- (1 - tanh(u_- w/(4 nu))) and evaluates the one-scale deficit
    integral by adaptive Gauss-Kronrod quadrature; `quad_nodes` caps the
    subdivision count.  d(0) = 0, d is nondecreasing, and d -> u_- - u_+.
    """
    if p.c != 1.0:
        raise ValueError("quadrature uses the closed-form sup; requires c = 1")
    if quad_nodes < 64:
        raise ValueError(f"need quad_nodes >= 64, got {quad_nodes}")
    out = np.empty(len(times))
    for i, t in enumerate(times):
        if t < 0:
            raise ValueError(f"need t >= 0, got {t}")
        if t == 0 or sigma == 0.0:
            out[i] = 0.0
            continue
        out[i] = _d_complementary(p, sigma, t, limit=max(quad_nodes, 200))
    return SampledFunction(np.asarray(times, dtype=float), out)


@dataclass
class MonteCarloCurve:
    times: np.ndarray
    values: np.ndarray
    stderr: np.ndarray
    paths: int


def shock_instability_monte_carlo(
    p: ShockProfileParams, sigma: float, times, paths: int, base_seed: int
) -> MonteCarloCurve:
    """Sample B(t) ~ N(0, t) directly and average the closed-form sup.

    One standard normal per path is rescaled by sqrt(t), which reproduces
    the marginal law of B(t) at every probe time.
    """
    if p.c != 1.0:
        raise ValueError("requires the c = 1 normalization")
    rng = np.random.Generator(np.random.Philox(base_seed))
    z = rng.standard_normal(paths)
    um = p.riemann.u_minus
    t_arr = np.asarray(times, dtype=float)
    disp = sigma * np.sqrt(t_arr)[:, None] * z[None, :]
    s = 2.0 * um * np.tanh(um * np.abs(disp) / (4.0 * p.nu))
    mean = s.mean(axis=1)
    stderr = s.std(axis=1, ddof=1) / math.sqrt(paths)
    return MonteCarloCurve(times=t_arr, values=mean, stderr=stderr, paths=paths)


@dataclass(frozen=True)
class CrossValidationConfig:
    """Matched-seed Euler-Maruyama vs shift comparison settings.

    Refinement halves dx per level while dt shrinks fourfold, tracking the
    transport-noise restriction dt <= (dx/(3 sigma))^2; the Brownian path is
    generated at the finest step and aggregated for coarser levels, so all
    levels see the same driving noise.
    """

    paths: int
    probe_paths: int
    base_seed: int
    noise: NoiseParams
    riemann: RiemannData
    grid: Grid
    dt: float
    T: float
    levels: int = 3
    perturbation_amplitude: float | None = None
    measure_fraction: float = 0.5
    gap_times: tuple[float, ...] | None = None  # None = final time only

    def __post_init__(self):
        if self.levels < 2:
            raise ValueError(f"need >= 2 refinement levels, got {self.levels}")
        if self.dt > noise_cfl_dt(self.grid, self.noise.sigma):
            raise ValueError(
                f"dt={self.dt:g} violates the noise restriction "
                f"(dx/(3 sigma))^2={noise_cfl_dt(self.grid, self.noise.sigma):g}"
            )

    @property
    def amplitude(self) -> float:
        if self.perturbation_amplitude is not None:
            return self.perturbation_amplitude
        return 0.5 * self.riemann.strength

    def initial_values(self, grid: Grid) -> np.ndarray:
        x = grid.x
        return approx_rarefaction_initial(self.riemann, x) + self.amplitude * np.exp(-x * x)


@dataclass
class RefinementLevel:
    n: int
    dx: float
    dt: float
    mean_gap: float  # at the final horizon; drives the refinement slopes
    stderr_gap: float
    gap_times: np.ndarray
    gap_mean: np.ndarray  # per-time mean L2 gap
    gap_max: np.ndarray  # per-time worst path


@dataclass
class ProbeComparison:
    x: np.ndarray
    em_mean: np.ndarray
    shift_mean: np.ndarray
    em_var: np.ndarray
    shift_var: np.ndarray
    mean_agree: np.ndarray
    var_agree: np.ndarray


@dataclass
class CrossValidationReport:
    levels: list[RefinementLevel]
    slopes: list[float]
    probes: ProbeComparison


def _coarsen(increments: np.ndarray, factor: int) -> np.ndarray:
    return increments.reshape(-1, factor).sum(axis=1)


def _var_stderr(samples: np.ndarray) -> float:
    """Standard error of the sample variance from the fourth moment."""
    n = samples.size
    m = samples.mean()
    s2 = samples.var(ddof=1)
    m4 = np.mean((samples - m) ** 4)
    var_of_var = (m4 - (n - 3) / (n - 1) * s2**2) / n
    return math.sqrt(max(var_of_var, 0.0))


def scheme_cross_validation(cfg: CrossValidationConfig) -> CrossValidationReport:
    """Refinement study of the per-path L^2 gap plus probe-point law check."""
    n0 = max(int(round(cfg.T / cfg.dt)), 1)
    t_end = n0 * cfg.dt

    # --- refinement levels, one shared Brownian motion per path ---
    fine_factor = 4 ** (cfg.levels - 1)
    fine_steps = n0 * fine_factor
    fine_dt = cfg.dt / fine_factor
    wanted = tuple(cfg.gap_times) if cfg.gap_times is not None else (t_end,)
    levels: list[RefinementLevel] = []
    for lvl in range(cfg.levels):
        grid = cfg.grid
        for _ in range(lvl):
            grid = grid.refine()
        dt_l = cfg.dt / 4**lvl
        u0 = cfg.initial_values(grid)
        win, sub = measurement_window(grid, cfg.measure_fraction)
        rec = align_record_times(wanted, dt_l, t_end)
        gaps = np.empty((cfg.paths, rec.size))
        for k in range(cfg.paths):
            fine = sample_brownian(cfg.base_seed + k, fine_dt, fine_steps)
            inc = _coarsen(fine.increments, 4 ** (cfg.levels - 1 - lvl))
            path = BrownianPath(dt=dt_l, increments=inc, seed=fine.seed)
            em = run_path(Field(grid, u0.copy()), cfg.noise, "euler_maruyama", path, wanted, t_end)
            sh = run_path(Field(grid, u0.copy()), cfg.noise, "shift", path, wanted, t_end)
            for i, ((_, fe), (_, fs)) in enumerate(zip(em, sh)):
                gaps[k, i] = lp_norm(Field(sub, fe.values[win] - fs.values[win]), 2.0)
        mean, se = _mean_stderr(gaps[:, -1])
        levels.append(
            RefinementLevel(
                n=grid.n,
                dx=grid.dx,
                dt=dt_l,
                mean_gap=float(mean),
                stderr_gap=float(se),
                gap_times=rec,
                gap_mean=gaps.mean(axis=0),
                gap_max=gaps.max(axis=0),
            )
        )
    slopes = []
    for i in range(cfg.levels - 1):
        hi, lo = levels[i].mean_gap, levels[i + 1].mean_gap
        # a vanishing fine-level gap (e.g. sigma = 0 makes the schemes
        # coincide) counts as unbounded improvement
        slopes.append(math.log2(hi / lo) if lo > 0.0 else math.inf)

    # --- probe-point distributional agreement at the base level ---
    # probes stay in the interior half of the domain, away from the pinned ends
    grid = cfg.grid
    fracs = np.array([0.30, 0.40, 0.50, 0.60, 0.70])
    probe_idx = np.round(fracs * (grid.n - 1)).astype(int)
    u0 = cfg.initial_values(grid)
    em_vals = np.empty((cfg.probe_paths, probe_idx.size))
    sh_vals = np.empty((cfg.probe_paths, probe_idx.size))
    steps = n0 + 1
    for k in range(cfg.probe_paths):
        path = sample_brownian(cfg.base_seed + k, cfg.dt, steps)
        em = run_path(Field(grid, u0.copy()), cfg.noise, "euler_maruyama", path, [t_end], t_end)
        sh = run_path(Field(grid, u0.copy()), cfg.noise, "shift", path, [t_end], t_end)
        em_vals[k] = em[-1][1].values[probe_idx]
        sh_vals[k] = sh[-1][1].values[probe_idx]
    em_mean = em_vals.mean(axis=0)
    sh_mean = sh_vals.mean(axis=0)
    em_se = em_vals.std(axis=0, ddof=1) / math.sqrt(cfg.probe_paths)
    sh_se = sh_vals.std(axis=0, ddof=1) / math.sqrt(cfg.probe_paths)
    mean_agree = np.abs(em_mean - sh_mean) <= 3.0 * np.sqrt(em_se**2 + sh_se**2) + 1e-12
    em_var = em_vals.var(axis=0, ddof=1)
    sh_var = sh_vals.var(axis=0, ddof=1)
    var_se = np.array(
        [
            math.hypot(_var_stderr(em_vals[:, j]), _var_stderr(sh_vals[:, j]))
            for j in range(probe_idx.size)
        ]
    )
    var_agree = np.abs(em_var - sh_var) <= 3.0 * var_se + 1e-12

    probes = ProbeComparison(
        x=grid.x[probe_idx],
        em_mean=em_mean,
        shift_mean=sh_mean,
        em_var=em_var,
        shift_var=sh_var,
        mean_agree=mean_agree,
        var_agree=var_agree,
    )
    return CrossValidationReport(levels=levels, slopes=slopes, probes=probes)
