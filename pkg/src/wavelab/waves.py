"""Deterministic wave patterns of the 1-D Burgers equation.

Increasing far-field data (u_- < u_+) produces the self-similar rarefaction
fan u^r(x/t) of the inviscid equation together with a smooth approximate fan
ubar launched from an arctan-profiled smoothing of the jump.  Decreasing data
(u_- > u_+) produces the explicit tanh-type viscous shock profile.  All
functions here are pure; the stochastic solvers consume them as references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate


class QuadratureError(RuntimeError):
    """Raised when an adaptive or nested quadrature fails to converge."""


@dataclass(frozen=True)
class RiemannData:
    """Far-field states (u_-, u_+) of a Riemann initial datum."""

    u_minus: float
    u_plus: float

    def __post_init__(self):
        if self.u_minus == self.u_plus:
            raise ValueError("degenerate data: u_minus == u_plus admits no wave")

    @property
    def strength(self) -> float:
        return self.u_plus - self.u_minus

    def require_rarefaction(self):
        if not self.u_minus < self.u_plus:
            raise ValueError(
                f"rarefaction requires u_minus < u_plus, got ({self.u_minus}, {self.u_plus})"
            )

    def require_shock(self):
        if not self.u_minus > self.u_plus:
            raise ValueError(
                f"shock requires u_minus > u_plus, got ({self.u_minus}, {self.u_plus})"
            )


@dataclass(frozen=True)
class ShockProfileParams:
    """Zero-speed viscous shock profile parameters.

    Normalized so the propagation speed (u_- + u_+)/2 vanishes, i.e.
    u_- = -u_+ > 0.  The profile steepness is h = u_- / nu and c > 0 fixes
    the horizontal shift.
    """

    riemann: RiemannData
    nu: float
    c: float = 1.0

    def __post_init__(self):
        self.riemann.require_shock()
        if self.riemann.u_minus != -self.riemann.u_plus or self.riemann.u_minus <= 0:
            raise ValueError("normalization requires u_minus = -u_plus > 0")
        if self.nu <= 0:
            raise ValueError(f"viscosity must be positive, got nu={self.nu}")
        if self.c <= 0:
            raise ValueError(f"shift constant must be positive, got c={self.c}")

    @property
    def h(self) -> float:
        return self.riemann.u_minus / self.nu


def _match_scalar(x, out):
    """Return a float when the input was scalar, else the array."""
    if np.ndim(x) == 0:
        return float(out)
    return out


def rankine_hugoniot_speed(r: RiemannData) -> float:
    """Propagation speed (u_- + u_+)/2 of the inviscid shock."""
    return 0.5 * (r.u_minus + r.u_plus)


def exact_rarefaction(r: RiemannData, t: float, x):
    """Self-similar fan: u_- below the fan, x/t inside, u_+ above.

    Defined only for t > 0.
    """
    r.require_rarefaction()
    if t <= 0:
        raise ValueError(f"rarefaction fan is defined for t > 0, got t={t}")
    out = np.clip(np.asarray(x, dtype=float) / t, r.u_minus, r.u_plus)
    return _match_scalar(x, out)


def approx_rarefaction_initial(r: RiemannData, x):
    """Smoothed jump w(x) = (u_+ + u_-)/2 + (u_+ - u_-)/2 * (2/pi) * arctan(x)."""
    r.require_rarefaction()
    mid = 0.5 * (r.u_plus + r.u_minus)
    half = 0.5 * (r.u_plus - r.u_minus)
    out = mid + half * (2.0 / np.pi) * np.arctan(np.asarray(x, dtype=float))
    return _match_scalar(x, out)


def approx_rarefaction_initial_slope(r: RiemannData, x):
    """w'(x) = (u_+ - u_-) / (pi * (1 + x^2)) > 0."""
    r.require_rarefaction()
    xa = np.asarray(x, dtype=float)
    out = (r.u_plus - r.u_minus) / (np.pi * (1.0 + xa * xa))
    return _match_scalar(x, out)


def approx_rarefaction_initial_primitive(r: RiemannData, y):
    """Antiderivative int_0^y w(s) ds of the smoothed jump, in closed form."""
    r.require_rarefaction()
    ya = np.asarray(y, dtype=float)
    mid = 0.5 * (r.u_plus + r.u_minus)
    half = 0.5 * (r.u_plus - r.u_minus)
    out = mid * ya + half * (2.0 / np.pi) * (
        ya * np.arctan(ya) - 0.5 * np.log1p(ya * ya)
    )
    return _match_scalar(y, out)


def characteristic_foot(r: RiemannData, t: float, x):
    """Solve x = x0 + t*w(x0) for the characteristic foot x0.

    The map x0 -> x0 + t*w(x0) is strictly increasing (w' > 0, t >= 0), so the
    root is unique.  Bisection inside the guaranteed bracket
    [x - t*max|u|, x + t*max|u|] followed by clipped Newton polishing reaches
    1e-12 absolute tolerance.
    """
    r.require_rarefaction()
    if t < 0:
        raise ValueError(f"need t >= 0, got t={t}")
    xa = np.asarray(x, dtype=float)
    if t == 0:
        return _match_scalar(x, xa.copy())
    umax = max(abs(r.u_minus), abs(r.u_plus))
    lo = xa - t * umax
    hi = xa + t * umax
    # 64 halvings shrink any desk-scale bracket far below 1e-12.
    for _ in range(64):
        mid = 0.5 * (lo + hi)
        g = mid + t * approx_rarefaction_initial(r, mid) - xa
        neg = g < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    x0 = 0.5 * (lo + hi)
    for _ in range(3):
        g = x0 + t * approx_rarefaction_initial(r, x0) - xa
        gp = 1.0 + t * approx_rarefaction_initial_slope(r, x0)
        x0 = np.clip(x0 - g / gp, lo, hi)
    return _match_scalar(x, x0)


def _characteristic_foot_scalar(r: RiemannData, t: float, x: float) -> float:
    """Pure-scalar foot solve; fast path for quadrature integrands."""
    if t == 0.0:
        return x
    mid = 0.5 * (r.u_plus + r.u_minus)
    half = 0.5 * (r.u_plus - r.u_minus)
    two_over_pi = 2.0 / math.pi
    umax = max(abs(r.u_minus), abs(r.u_plus))
    lo = x - t * umax
    hi = x + t * umax
    for _ in range(64):
        m = 0.5 * (lo + hi)
        w = mid + half * two_over_pi * math.atan(m)
        if m + t * w < x:
            lo = m
        else:
            hi = m
    return 0.5 * (lo + hi)


def approx_rarefaction(r: RiemannData, t: float, x):
    """Smooth fan value and slope at (t, x).

    Characteristics give ubar(t, x) = w(x0) with x = x0 + t*w(x0) and
    ubar_x = w'(x0) / (1 + t*w'(x0)).
    """
    x0 = characteristic_foot(r, t, x)
    value = approx_rarefaction_initial(r, x0)
    wp = approx_rarefaction_initial_slope(r, x0)
    slope = wp / (1.0 + t * wp)
    return value, slope


def viscous_shock(p: ShockProfileParams, xi):
    """Explicit viscous shock profile -u_- + 2*u_-*c / (exp(h*xi) + c).

    Strictly decreasing from u_- at -inf to u_+ at +inf; for c = 1 it equals
    -u_- * tanh(h*xi/2).  Arguments beyond floating range return the
    appropriate limit state.
    """
    um = p.riemann.u_minus
    arg = p.h * np.asarray(xi, dtype=float)
    with np.errstate(over="ignore"):
        e = np.exp(np.minimum(arg, 700.0))
    out = np.where(arg >= 700.0, -um, -um + 2.0 * um * p.c / (e + p.c))
    return _match_scalar(xi, out)


def profile_derivative_norms(r: RiemannData, t: float, p: float) -> float:
    """L^p norm of the smooth fan slope ubar_x(t, .).

    The substitution x = x0 + t*w(x0) removes the root solve:
    ||ubar_x||_p^p = int |w'/(1 + t*w')|^p (1 + t*w') dx0 with an explicit,
    even integrand whose tails decay like x0^(-2p).  p = inf falls back to a
    fine-mesh maximum of w'/(1 + t*w') (attained at x0 = 0).
    """
    r.require_rarefaction()
    if t < 0:
        raise ValueError(f"need t >= 0, got t={t}")
    if p < 1:
        raise ValueError(f"need p >= 1, got p={p}")

    def wp(x0):
        return (r.u_plus - r.u_minus) / (np.pi * (1.0 + x0 * x0))

    if np.isinf(p):
        x0 = np.linspace(-50.0, 50.0, 1 << 15 | 1)
        w = wp(x0)
        return float(np.max(w / (1.0 + t * w)))

    # Rescale by the peak integrand value so large p stays well-conditioned.
    w0 = wp(0.0)
    peak = (w0 / (1.0 + t * w0)) ** p * (1.0 + t * w0)

    def integrand(x0):
        w = wp(x0)
        return (w / (1.0 + t * w)) ** p * (1.0 + t * w) / peak

    val, err = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-12, limit=400)
    if not np.isfinite(val) or err > 1e-8 * max(val, 1.0):
        raise QuadratureError(f"slope-norm quadrature did not converge (t={t}, p={p})")
    return float((2.0 * val * peak) ** (1.0 / p))


def approx_exact_gap_norm(r: RiemannData, t: float, p: float) -> float:
    """L^p distance between the smooth fan and the exact fan at time t > 0.

    Piecewise quadrature split at the fan corners x = u_-t and x = u_+t where
    the exact fan has kinks; the domain is truncated with 50*(1+t) padding
    beyond the corners (the mismatch decays like 1/|x| outside the fan).
    """
    r.require_rarefaction()
    if t <= 0:
        raise ValueError(f"exact fan requires t > 0, got t={t}")
    if p < 1:
        raise ValueError(f"need p >= 1, got p={p}")
    um, up = r.u_minus, r.u_plus
    mid = 0.5 * (up + um)
    half = 0.5 * (up - um)
    two_over_pi = 2.0 / math.pi

    def gap(x):
        x0 = _characteristic_foot_scalar(r, t, x)
        ubar = mid + half * two_over_pi * math.atan(x0)
        ur = min(max(x / t, um), up)
        return abs(ubar - ur)

    pad = 50.0 * (1.0 + t)
    edges = [um * t - pad, um * t, mid * t, up * t, up * t + pad]

    if np.isinf(p):
        best = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            xs = np.linspace(a, b, 4097)
            best = max(best, max(gap(float(x)) for x in xs))
        return best

    total = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        val, err = integrate.quad(
            lambda x: gap(x) ** p, a, b, epsabs=1e-13, epsrel=1e-10, limit=400
        )
        if not np.isfinite(val):
            raise QuadratureError(
                f"fan-gap quadrature failed on [{a}, {b}] (t={t}, p={p})"
            )
        total += val
    return float(total ** (1.0 / p))
