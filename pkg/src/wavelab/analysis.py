"""Norms, energy diagnostics, decay-rate fitting, and the area-comparison
decay toolkit.

The area toolkit centers on one fact about nonnegative Lipschitz f: if the
growth of f is capped by f'(t) <= C0 (1+t)^-alpha while the running integral
is capped by int_0^t f <= C1 (1+t)^beta ln^gamma(1+t), then comparing the
area under f with a backward-ODE comparison triangle forces

    f(t) <= 2 sqrt(C0 C1) (1+t)^((beta-alpha)/2) ln^(gamma/2)(1+t)

for large t (requires 0 <= beta < alpha, alpha + beta < 2).  `area_check`
verifies both caps and the resulting envelope on sampled data;
`area_witness` builds the spike train showing the exponent alpha/2 cannot be
improved; `area_naive_bound` renders the weaker classical envelope
C (1+t)^(1-alpha) for side-by-side comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize

from .grids import Field


class WitnessConstructionError(RuntimeError):
    """Raised when a spike segment would overrun the next segment start."""


@dataclass
class SampledFunction:
    """A (time, value) series on strictly increasing times >= 0."""

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.values = np.asarray(self.values, dtype=float)
        if self.times.ndim != 1 or self.times.shape != self.values.shape:
            raise ValueError("times and values must be 1-d arrays of equal length")
        if self.times.size and self.times[0] < 0:
            raise ValueError("times must be nonnegative")
        if np.any(np.diff(self.times) <= 0):
            raise ValueError("times must be strictly increasing")
        if not (np.all(np.isfinite(self.times)) and np.all(np.isfinite(self.values))):
            raise ValueError("series contains non-finite entries")


@dataclass(frozen=True)
class AreaPremises:
    """Constants of the two growth caps: C0(1+t)^-alpha on the derivative and
    C1(1+t)^beta ln^gamma(1+t) on the running integral."""

    C0: float
    C1: float
    alpha: float
    beta: float = 0.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.C0 <= 0 or self.C1 <= 0:
            raise ValueError("C0 and C1 must be positive")
        if not 0 <= self.beta < self.alpha:
            raise ValueError(f"need 0 <= beta < alpha, got beta={self.beta}, alpha={self.alpha}")
        if self.alpha + self.beta >= 2:
            raise ValueError(f"need alpha + beta < 2, got {self.alpha + self.beta}")
        if self.gamma < 0:
            raise ValueError(f"need gamma >= 0, got {self.gamma}")


@dataclass
class AreaReport:
    premise1_ok: bool
    premise2_ok: bool
    conclusion_ok: bool | None  # None when a premise fails (not evaluated)
    first_ok_time: float | None
    t_star: float
    max_spacing: float  # sample-spacing caveat: derivatives are only checked
    # through difference quotients at this resolution


@dataclass
class RateFit:
    """Least-squares fit of value ~ constant * (2+t)^exponent * ln^q(2+t)."""

    exponent: float
    log_factor_power: float
    constant: float
    window: tuple[float, float]
    residual: float


@dataclass(frozen=True)
class WitnessSegment:
    n: int
    start: float  # rise begins here (= e^n), g = 0
    t_peak: float  # rise ends at the pinned peak value
    z_end: float  # linear descent back to zero ends here
    peak: float  # g(t_peak) = (1 + t_peak)^(-alpha/2 - eps)


def lp_norm(v: Field, p: float) -> float:
    """Trapezoidal L^p norm of a grid field; p = inf is the node maximum."""
    if p < 1:
        raise ValueError(f"need p >= 1, got p={p}")
    if np.isinf(p):
        return float(np.max(np.abs(v.values)))
    a = np.abs(v.values)
    peak = float(a.max())
    if peak == 0.0:
        return 0.0
    # factor out the peak so large p cannot underflow
    return peak * float(np.trapezoid((a / peak) ** p, dx=v.grid.dx) ** (1.0 / p))


def forward_diff_l2_sq(v: Field) -> float:
    """sum ((v_{i+1}-v_i)/dx)^2 * dx, the discrete ||v_x||^2 seed."""
    dx = v.grid.dx
    return float(np.sum(np.diff(v.values) ** 2) / dx)


def energy_diagnostics(phi: Field, ubar_slope: Field) -> dict[str, float]:
    """Instantaneous energy quantities whose time-accumulations drive the
    stability estimates: ||phi||^2, ||phi_x||^2, int phi^2 ubar_x dx."""
    if phi.grid != ubar_slope.grid:
        raise ValueError("phi and ubar_slope live on different grids")
    dx = phi.grid.dx
    return {
        "l2_sq": float(np.trapezoid(phi.values**2, dx=dx)),
        "h1_seed": forward_diff_l2_sq(phi),
        "weighted_l2": float(np.trapezoid(phi.values**2 * ubar_slope.values, dx=dx)),
    }


def _log_pow(t: np.ndarray, gamma: float) -> np.ndarray:
    """ln^gamma(1+t) with the gamma=0 convention 1 and a tiny floor near t=0."""
    if gamma == 0.0:
        return np.ones_like(t)
    return np.maximum(np.log1p(t), 1e-12) ** gamma


def area_envelope(prem: AreaPremises, t: np.ndarray) -> np.ndarray:
    """The decay envelope 2 sqrt(C0 C1) (1+t)^((beta-alpha)/2) ln^(gamma/2)(1+t)."""
    t = np.asarray(t, dtype=float)
    return (
        2.0
        * np.sqrt(prem.C0 * prem.C1)
        * (1.0 + t) ** (0.5 * (prem.beta - prem.alpha))
        * _log_pow(t, 0.5 * prem.gamma)
    )


def area_check(f: SampledFunction, prem: AreaPremises, t_star: float | None = None) -> AreaReport:
    """Verify both growth caps and the decay envelope on a sampled series.

    The derivative cap is tested through forward difference quotients (the
    only rendering available for sampled data; spacing is recorded in the
    report).  The envelope is asserted for sample times >= t_star, which
    defaults to 20% into the time window since the envelope is asymptotic.
    """
    t, v = f.times, f.values
    if t.size < 2:
        raise ValueError("need at least two samples")
    if t_star is None:
        t_star = t[0] + 0.2 * (t[-1] - t[0])
    spacing = float(np.max(np.diff(t)))

    # cap 1: difference quotients against C0 (1+t)^-alpha at the left endpoint
    quot = np.diff(v) / np.diff(t)
    slack = 1e-9 * (1.0 + np.abs(v[:-1]))
    premise1_ok = bool(np.all(quot <= prem.C0 * (1.0 + t[:-1]) ** (-prem.alpha) + slack))

    # cap 2: running trapezoidal integral against C1 (1+t)^beta ln^gamma(1+t)
    running = integrate.cumulative_trapezoid(v, t, initial=0.0)
    bound2 = prem.C1 * (1.0 + t) ** prem.beta * _log_pow(t, prem.gamma)
    premise2_ok = bool(np.all(running <= bound2 + 1e-9 * (1.0 + bound2)))

    if not (premise1_ok and premise2_ok):
        return AreaReport(premise1_ok, premise2_ok, None, None, t_star, spacing)

    env = area_envelope(prem, t)
    ok = v <= env + 1e-12 * (1.0 + env)
    tail = t >= t_star
    conclusion_ok = bool(np.all(ok[tail])) if np.any(tail) else False
    # smallest sample time after which the envelope holds through the end
    first_ok_time = None
    holds_from_here = np.logical_and.accumulate(ok[::-1])[::-1]
    idx = np.nonzero(holds_from_here)[0]
    if idx.size:
        first_ok_time = float(t[idx[0]])
    return AreaReport(premise1_ok, premise2_ok, conclusion_ok, first_ok_time, t_star, spacing)


def area_naive_bound(f: SampledFunction, C0: float, alpha: float) -> SampledFunction:
    """Classical envelope C (1+t)^(1-alpha) obtained by weighting the
    derivative cap with (1+t) and integrating; C is fitted as the smallest
    constant covering the samples."""
    if C0 <= 0:
        raise ValueError("C0 must be positive")
    t = f.times
    c = float(np.max(f.values * (1.0 + t) ** (alpha - 1.0)))
    return SampledFunction(t, c * (1.0 + t) ** (1.0 - alpha))


def _rise_antiderivative(alpha: float):
    """A with A' = (1+t)^-alpha, handling the logarithmic alpha = 1 case.

    Works elementwise on scalars and arrays.
    """
    if alpha == 1.0:
        return np.log1p
    return lambda t: (1.0 + np.asarray(t, dtype=float)) ** (1.0 - alpha) / (1.0 - alpha)


def witness_segments(alpha: float, epsilon: float, C0: float, n_max: int) -> list[WitnessSegment]:
    """Place the spike segments of the optimality witness.

    Segment n rises from zero at start = e^n with the extremal slope
    C0 (1+t)^-alpha until the pinned peak value (1+t)^(-alpha/2-epsilon) is
    reached, then descends linearly to zero quickly enough that the descent
    areas are summable.
    """
    if not 0 < alpha <= 2:
        raise ValueError(f"need 0 < alpha <= 2, got alpha={alpha}")
    if epsilon <= 0 or C0 <= 0:
        raise ValueError("epsilon and C0 must be positive")
    if n_max < 2:
        raise ValueError(f"need n_max >= 2, got {n_max}")
    anti = _rise_antiderivative(alpha)
    segments = []
    for n in range(1, n_max + 1):
        s_n = math.exp(n)
        a_s = anti(s_n)

        def excess(t):
            return C0 * (anti(t) - a_s) - (1.0 + t) ** (-0.5 * alpha - epsilon)

        hi = s_n * 1.0001
        while excess(hi) < 0:
            hi = s_n + 2.0 * (hi - s_n)
            if hi > 1e30:
                raise WitnessConstructionError(f"no peak crossing found for n={n}")
        t_n = float(optimize.brentq(excess, s_n, hi, xtol=1e-10, rtol=1e-15, maxiter=400))
        peak = (1.0 + t_n) ** (-0.5 * alpha - epsilon)
        s_next = math.exp(n + 1)
        if t_n >= s_next:
            raise WitnessConstructionError(
                f"segment n={n} overruns the next start: t_n={t_n:g} >= e^{n + 1}={s_next:g}"
            )
        z_n = t_n + min(2.0 ** (-n) / (1.0 + peak), 0.5 * (s_next - t_n))
        segments.append(WitnessSegment(n=n, start=s_n, t_peak=t_n, z_end=z_n, peak=peak))
    return segments


def witness_value(seg: WitnessSegment, alpha: float, C0: float, t) -> np.ndarray:
    """Evaluate one spike segment (zero outside [start, z_end])."""
    anti = _rise_antiderivative(alpha)
    t = np.asarray(t, dtype=float)
    a_s = anti(seg.start)
    rise = C0 * (anti(np.clip(t, seg.start, seg.t_peak)) - a_s)
    fall = seg.peak * (seg.z_end - t) / (seg.z_end - seg.t_peak)
    out = np.where(t <= seg.t_peak, rise, np.maximum(fall, 0.0))
    return np.where((t >= seg.start) & (t <= seg.z_end), out, 0.0)


def area_witness(alpha: float, epsilon: float, C0: float, n_max: int,
                 rise_samples: int = 96) -> SampledFunction:
    """Sampled rendering of the optimality witness g.

    The sample mesh contains every segment boundary, a dense fill of each
    rise and descent, and zero anchors between spikes, so the sampled series
    satisfies the same growth caps as the continuum function.
    """
    segments = witness_segments(alpha, epsilon, C0, n_max)
    knots = [0.0, 0.5 * math.exp(1)]
    for seg in segments:
        knots.extend(np.linspace(seg.start, seg.t_peak, rise_samples))
        knots.extend(np.linspace(seg.t_peak, seg.z_end, 9)[1:])
        nxt = math.exp(seg.n + 1)
        knots.extend([seg.z_end + 0.25 * (nxt - seg.z_end), seg.z_end + 0.5 * (nxt - seg.z_end)])
    t = np.unique(np.asarray(knots, dtype=float))
    v = np.zeros_like(t)
    for seg in segments:
        v += witness_value(seg, alpha, C0, t)
    return SampledFunction(t, v)


def witness_integral_bound(segments: list[WitnessSegment], alpha: float, C0: float) -> float:
    """Exact total area under the witness (closed-form segment integrals)."""
    anti = _rise_antiderivative(alpha)
    total = 0.0
    for seg in segments:
        ts = np.linspace(seg.start, seg.t_peak, 4097)
        rise_vals = C0 * (anti(ts) - anti(seg.start))
        total += float(np.trapezoid(rise_vals, ts))
        total += 0.5 * seg.peak * (seg.z_end - seg.t_peak)
    return total


def rate_fit(series: SampledFunction, window: tuple[float, float], with_log: bool = False) -> RateFit:
    """OLS of ln(value) on ln(2+t) (and optionally ln ln(2+t)) in a window."""
    t_lo, t_hi = window
    if not t_lo < t_hi:
        raise ValueError(f"need t_lo < t_hi, got {window}")
    mask = (series.times >= t_lo) & (series.times <= t_hi)
    t = series.times[mask]
    v = series.values[mask]
    if t.size < 10:
        raise ValueError(f"need >= 10 samples in window, got {t.size}")
    if np.any(v <= 0):
        raise ValueError("nonpositive values in window; cannot fit a log model")
    lt = np.log(2.0 + t)
    cols = [np.ones_like(lt), lt]
    if with_log:
        cols.append(np.log(lt))
    a = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(a, np.log(v), rcond=None)
    resid = np.log(v) - a @ coef
    rms = float(np.sqrt(np.mean(resid**2)))
    return RateFit(
        exponent=float(coef[1]),
        log_factor_power=float(coef[2]) if with_log else 0.0,
        constant=float(np.exp(coef[0])),
        window=(float(t_lo), float(t_hi)),
        residual=rms,
    )
