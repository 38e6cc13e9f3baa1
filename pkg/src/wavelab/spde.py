"""Pathwise solvers for the Burgers equation with Brownian transport noise.

The target equation is du + u u_x dt = mu u_xx dt + sigma u_x dB(t) (Ito).
Two schemes advance a path:

* ``euler_maruyama`` -- explicit LLF convection, implicit mu-diffusion, and
  the transport increment sigma * u_x * dB added with central differences.
* ``shift`` -- a deterministic Burgers step with the reduced viscosity
  nu_eff = mu - sigma^2/2 followed by resampling the field at x + sigma*dB.
  Evaluating a deterministic solution at a Brownian-shifted position solves
  the transport-noise equation exactly in law, which makes this scheme the
  oracle the direct scheme is validated against.

Also provides the radial H^1-ball projection used to tame the quadratic
nonlinearity in cut-off arguments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .deterministic import BurgersStepper, StabilityError
from .grids import Field, Grid
from .waves import RiemannData


@dataclass(frozen=True)
class NoiseParams:
    """Diffusion coefficient mu and transport-noise amplitude sigma.

    Requires sigma^2 < 2*mu so the reduced viscosity nu_eff = mu - sigma^2/2
    stays positive; configurations violating this are rejected outright.
    """

    mu: float
    sigma: float

    def __post_init__(self):
        if self.mu <= 0:
            raise ValueError(f"need mu > 0, got mu={self.mu}")
        if self.sigma < 0:
            raise ValueError(f"need sigma >= 0, got sigma={self.sigma}")
        if self.sigma**2 >= 2.0 * self.mu:
            raise ValueError(
                f"sigma^2 < 2*mu required (got sigma^2={self.sigma**2:g}, 2*mu={2 * self.mu:g})"
            )

    @property
    def nu_eff(self) -> float:
        return self.mu - 0.5 * self.sigma**2


@dataclass(frozen=True)
class CutoffParam:
    """Radius of the discrete H^1 ball the cut-off map projects onto."""

    m: float

    def __post_init__(self):
        if self.m <= 0:
            raise ValueError(f"need m > 0, got m={self.m}")


@dataclass
class BrownianPath:
    """Time-discretized Brownian increments dB_k ~ N(0, dt)."""

    dt: float
    increments: np.ndarray
    seed: int

    def cumulative(self) -> np.ndarray:
        """B at step times 0, dt, 2dt, ...: length len(increments)+1."""
        return np.concatenate([[0.0], np.cumsum(self.increments)])

    def quadratic_variation(self) -> float:
        return float(np.sum(self.increments**2))


def sample_brownian(seed: int, dt: float, steps: int) -> BrownianPath:
    """Reproducible increments from a counter-based (Philox) generator."""
    if dt <= 0:
        raise ValueError(f"need dt > 0, got {dt}")
    if steps < 1:
        raise ValueError(f"need steps >= 1, got {steps}")
    rng = np.random.Generator(np.random.Philox(seed))
    inc = rng.standard_normal(steps) * np.sqrt(dt)
    return BrownianPath(dt=dt, increments=inc, seed=seed)


def discrete_h1_norm(v: Field) -> float:
    """sqrt( sum v_i^2 dx + sum ((v_{i+1}-v_i)/dx)^2 dx )."""
    dx = v.grid.dx
    val = np.sum(v.values**2) * dx + np.sum(np.diff(v.values) ** 2) / dx
    return float(np.sqrt(val))


def cutoff_project(v: Field, m: CutoffParam) -> Field:
    """Radial projection onto the closed H^1 ball of radius m.

    Fields inside the ball pass through unchanged; outside they are scaled
    by m / ||v||.  The zero field is returned unchanged.
    """
    norm = discrete_h1_norm(v)
    if norm <= m.m or norm == 0.0:
        return v.copy()
    return Field(v.grid, v.values * (m.m / norm))


def central_slope(values: np.ndarray, dx: float) -> np.ndarray:
    """Central-difference u_x, one-sided at the pinned boundary nodes."""
    out = np.empty_like(values)
    out[1:-1] = (values[2:] - values[:-2]) / (2.0 * dx)
    out[0] = (values[1] - values[0]) / dx
    out[-1] = (values[-1] - values[-2]) / dx
    return out


def shift_field_values(values: np.ndarray, delta_over_dx: float) -> np.ndarray:
    """Resample v at x + delta with 4-point Lagrange interpolation.

    The interpolant is clamped to the range of the two bracketing nodes so
    steep fronts cannot overshoot; indices beyond the ends extend the
    boundary values as constants.
    """
    n = values.size
    k = int(np.floor(delta_over_dx))
    f = delta_over_dx - k
    base = np.arange(n) + k
    vm1 = values[np.clip(base - 1, 0, n - 1)]
    v0 = values[np.clip(base, 0, n - 1)]
    v1 = values[np.clip(base + 1, 0, n - 1)]
    v2 = values[np.clip(base + 2, 0, n - 1)]
    wm1 = -f * (f - 1.0) * (f - 2.0) / 6.0
    w0 = (f * f - 1.0) * (f - 2.0) / 2.0
    w1 = -f * (f + 1.0) * (f - 2.0) / 2.0
    w2 = f * (f * f - 1.0) / 6.0
    out = wm1 * vm1 + w0 * v0 + w1 * v1 + w2 * v2
    return np.clip(out, np.minimum(v0, v1), np.maximum(v0, v1))


def _em_step_values(stepper: BurgersStepper, u: np.ndarray, sigma: float,
                    dB: float, extra_slope: np.ndarray | None) -> np.ndarray:
    work = stepper.convect(u)
    if sigma > 0.0 and (dB != 0.0 or extra_slope is not None):
        slope = central_slope(u, stepper.dx)
        if extra_slope is not None:
            slope = slope + extra_slope
        work[1:-1] += sigma * dB * slope[1:-1]
    out = stepper._diffusion.step(work)
    bound = 2.0 * max(abs(u[0]), abs(u[-1])) + 1.0
    if float(np.max(np.abs(out))) > bound:
        raise StabilityError(f"max-norm blowup guard tripped: max|u| > {bound:g}")
    return out


def _shift_step_values(stepper: BurgersStepper, u: np.ndarray, sigma: float,
                       dB: float) -> np.ndarray:
    out = stepper.step(u)
    if sigma > 0.0 and dB != 0.0:
        out = shift_field_values(out, sigma * dB / stepper.dx)
    return out


def noise_cfl_dt(grid: Grid, sigma: float) -> float:
    """Largest dt honoring the transport-noise restriction sigma*|dB| <= dx.

    Choosing dt <= (dx / (3 sigma))^2 keeps three-standard-deviation
    increments within one cell.
    """
    if sigma == 0.0:
        return np.inf
    return (grid.dx / (3.0 * sigma)) ** 2


def em_step(u: Field, noise: NoiseParams, dB: float, dt: float,
            ubar_slope: Field | None = None) -> Field:
    """One Ito-Euler-Maruyama step of the transport-noise equation.

    When `ubar_slope` is given it is added to the field slope inside the
    noise term (the form used when the evolved unknown is a perturbation
    against a background wave whose slope enters the noise).
    """
    if dt > noise_cfl_dt(u.grid, noise.sigma):
        raise StabilityError(
            f"noise CFL violated: dt={dt:g} > (dx/(3*sigma))^2={noise_cfl_dt(u.grid, noise.sigma):g}"
        )
    stepper = BurgersStepper(u.grid, noise.mu, dt)
    extra = ubar_slope.values if ubar_slope is not None else None
    return Field(u.grid, _em_step_values(stepper, u.values, noise.sigma, dB, extra))


def shift_step(u: Field, noise: NoiseParams, dB: float, dt: float) -> Field:
    """One exact-in-law step: reduced-viscosity Burgers step, then a
    cubic-interpolated translation of the field by sigma*dB."""
    stepper = BurgersStepper(u.grid, noise.nu_eff, dt)
    return Field(u.grid, _shift_step_values(stepper, u.values, noise.sigma, dB))


SCHEMES = ("euler_maruyama", "shift")


def align_record_times(record_times, dt: float, t_end: float) -> np.ndarray:
    """Map requested times to the first step time >= request (clipped to t_end)."""
    rt = np.asarray(sorted(record_times), dtype=float)
    if rt.size and (rt[0] < 0 or rt[-1] > t_end + 1e-9):
        raise ValueError(f"record times must lie within [0, {t_end}]")
    steps = np.ceil(rt / dt - 1e-9)
    return np.minimum(steps * dt, t_end)


def run_path(u0: Field, noise: NoiseParams, scheme: str, path: BrownianPath,
             record_times, t_end: float) -> list[tuple[float, Field]]:
    """Advance u0 along a prepared Brownian path, snapshotting as requested.

    Snapshots are taken at the first step time at or past each requested
    time; the realized time is stored with the field.  The remainder step
    t_end - n*dt (if any) reuses the next increment rescaled to the short
    duration, preserving the N(0, dt_short) law.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    dt = path.dt
    n_full = int(np.floor(t_end / dt + 1e-9))
    rem = t_end - n_full * dt
    if rem < 1e-12 * max(dt, 1.0):
        rem = 0.0
    needed = n_full + (1 if rem else 0)
    if needed > path.increments.size:
        raise ValueError(
            f"path too short: need {needed} increments, have {path.increments.size}"
        )
    wanted = align_record_times(record_times, dt, t_end)
    out: list[tuple[float, Field]] = []
    u = u0.values.copy()

    stepper = BurgersStepper(u0.grid, noise.nu_eff if scheme == "shift" else noise.mu, dt)
    stepper.check_cfl(u)
    if scheme == "euler_maruyama" and dt > noise_cfl_dt(u0.grid, noise.sigma):
        raise StabilityError(
            f"noise CFL violated: dt={dt:g} > {noise_cfl_dt(u0.grid, noise.sigma):g}"
        )

    def snap(time_now, idx):
        while idx < wanted.size and time_now >= wanted[idx] - 1e-9:
            out.append((time_now, Field(u0.grid, u.copy())))
            idx += 1
        return idx

    idx = snap(0.0, 0)
    t_next = 0.0
    try:
        for k in range(n_full):
            t_next = (k + 1) * dt
            dB = float(path.increments[k])
            if scheme == "shift":
                u = _shift_step_values(stepper, u, noise.sigma, dB)
            else:
                u = _em_step_values(stepper, u, noise.sigma, dB, None)
            idx = snap(t_next, idx)
        if rem:
            t_next = t_end
            dB = float(path.increments[n_full]) * np.sqrt(rem / dt)
            short = BurgersStepper(u0.grid, noise.nu_eff if scheme == "shift" else noise.mu, rem)
            if scheme == "shift":
                u = _shift_step_values(short, u, noise.sigma, dB)
            else:
                u = _em_step_values(short, u, noise.sigma, dB, None)
            idx = snap(t_next, idx)
    except StabilityError as exc:
        raise StabilityError(f"step failed at t={t_next:g}: {exc}") from exc
    return out


def simulate_path(u0: Field, noise: NoiseParams, riemann: RiemannData, scheme: str,
                  t_end: float, dt: float, seed: int, record_times) -> list[tuple[float, Field]]:
    """Drive one trajectory from a seed; deterministic given (seed, config)."""
    if t_end < 0:
        raise ValueError(f"need t_end >= 0, got {t_end}")
    span = abs(riemann.strength)
    if abs(u0.values[0] - riemann.u_minus) > 0.05 * span or \
            abs(u0.values[-1] - riemann.u_plus) > 0.05 * span:
        raise ValueError("u0 far-field values do not match the Riemann states")
    if t_end == 0:
        return [(0.0, u0.copy())]
    steps = int(np.floor(t_end / dt + 1e-9)) + 1
    path = sample_brownian(seed, dt, steps)
    return run_path(u0, noise, scheme, path, record_times, t_end)
