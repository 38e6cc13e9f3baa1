"""Two independent solvers for the viscous Burgers equation u_t + u u_x = nu u_xx.

`cole_hopf_solve` evaluates the classical Cole-Hopf quadrature representation
pointwise to near machine accuracy and serves as the high-accuracy reference.
`fd_viscous_solve` marches a conservative finite-difference scheme: explicit
local Lax-Friedrichs convection plus Crank-Nicolson diffusion with Dirichlet
far-field values.  Agreement between the two is the noise-free half of the
validation chain for the stochastic solvers.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.linalg import cho_solve_banded, cholesky_banded
from scipy.special import roots_hermite

from .grids import Field, Grid
from .waves import QuadratureError


class StabilityError(RuntimeError):
    """Raised when a time step violates its stability guard."""


@dataclass(frozen=True)
class ViscousParams:
    """Viscosity coefficient of the deterministic equation."""

    nu: float

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError(f"viscosity must be positive, got nu={self.nu}")


_hermite_cache: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _hermgauss(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _hermite_cache:
        _hermite_cache[n] = roots_hermite(n)
    return _hermite_cache[n]


def _cole_hopf_nodes(primitive, nu, t, x_arr, n):
    """One Cole-Hopf evaluation at fixed node count, vectorized over x."""
    z, w = _hermgauss(n)
    s = np.sqrt(4.0 * nu * t)
    y = x_arr[:, None] + s * z[None, :]
    expo = -np.asarray(primitive(y), dtype=float) / (2.0 * nu)
    expo -= expo.max(axis=1, keepdims=True)  # factor out the peak; cancels in the ratio
    k = w[None, :] * np.exp(expo)
    denom = k.sum(axis=1)
    numer = (k * (-(s / t) * z)[None, :]).sum(axis=1)
    return numer / denom


def cole_hopf_solve(
    initial,
    primitive,
    nu: float,
    t: float,
    x,
    *,
    n_start: int = 200,
    n_max: int = 12800,
    tol: float = 1e-10,
):
    """Evaluate u(t, x) from the Cole-Hopf quadrature representation.

    u(t,x) = int ((x-y)/t) K dy / int K dy with
    K = exp(-(x-y)^2/(4 nu t) - P(y)/(2 nu)) and P the antiderivative of the
    initial datum.  Substituting y = x + sqrt(4 nu t) z turns both integrals
    into Gauss-Hermite sums; node counts double until two successive levels
    agree below `tol`.  `primitive` may be None, in which case it is built
    from `initial` by cached adaptive quadrature (slow; prefer closed forms).
    """
    if nu <= 0:
        raise ValueError(f"need nu > 0, got {nu}")
    if t <= 0:
        raise ValueError(f"need t > 0, got {t}")
    if primitive is None:
        primitive = CachedPrimitive(initial)
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x_arr)
    todo = np.arange(x_arr.size)
    prev = _cole_hopf_nodes(primitive, nu, t, x_arr, n_start)  # aligned with todo
    n = n_start
    while todo.size:
        if 2 * n > n_max:
            raise QuadratureError(
                f"Cole-Hopf quadrature not converged at {todo.size} points with {n} nodes"
            )
        n *= 2
        cur = _cole_hopf_nodes(primitive, nu, t, x_arr[todo], n)
        done = np.abs(cur - prev) < tol
        out[todo[done]] = cur[done]
        todo = todo[~done]
        prev = cur[~done]
    if np.ndim(x) == 0:
        return float(out[0])
    return out


class CachedPrimitive:
    """Antiderivative int_0^y u0(s) ds built lazily by adaptive quadrature.

    Values are accumulated between previously requested anchor points so each
    new evaluation integrates only the gap to its nearest known neighbor.
    """

    def __init__(self, initial):
        self._initial = initial
        self._anchors = [0.0]
        self._values = [0.0]

    def _scalar(self, y: float) -> float:
        i = bisect.bisect_left(self._anchors, y)
        if i < len(self._anchors) and self._anchors[i] == y:
            return self._values[i]
        # integrate from the nearest existing anchor
        if i == 0:
            base_i = 0
        elif i == len(self._anchors):
            base_i = len(self._anchors) - 1
        else:
            base_i = i if abs(self._anchors[i] - y) < abs(self._anchors[i - 1] - y) else i - 1
        a = self._anchors[base_i]
        seg, _ = integrate.quad(self._initial, a, y, epsabs=1e-13, epsrel=1e-12, limit=200)
        val = self._values[base_i] + seg
        j = bisect.bisect_left(self._anchors, y)
        self._anchors.insert(j, y)
        self._values.insert(j, val)
        return val

    def __call__(self, y):
        ya = np.asarray(y, dtype=float)
        flat = ya.reshape(-1)
        out = np.fromiter((self._scalar(float(v)) for v in flat), dtype=float, count=flat.size)
        return out.reshape(ya.shape)


class DiffusionSolver:
    """Crank-Nicolson factorization of nu*u_xx with pinned endpoint values.

    The interior system (I - r D2) u_new = (I + r D2) u, r = nu dt / (2 dx^2),
    is symmetric positive definite; the banded Cholesky factor is computed
    once and reused every step.
    """

    def __init__(self, n: int, dx: float, nu: float, dt: float):
        self.r = nu * dt / (2.0 * dx * dx)
        m = n - 2
        ab = np.zeros((2, m))
        ab[0, 1:] = -self.r
        ab[1, :] = 1.0 + 2.0 * self.r
        self._chol = cholesky_banded(ab)

    def step(self, u: np.ndarray) -> np.ndarray:
        r = self.r
        rhs = u[1:-1] + r * (u[2:] - 2.0 * u[1:-1] + u[:-2])
        rhs[0] += r * u[0]
        rhs[-1] += r * u[-1]
        out = u.copy()
        out[1:-1] = cho_solve_banded((self._chol, False), rhs)
        return out

    def apply_implicit(self, u: np.ndarray) -> np.ndarray:
        """Apply (I - r D2) to interior values (boundary contributions included)."""
        r = self.r
        out = u[1:-1] - r * (u[2:] - 2.0 * u[1:-1] + u[:-2])
        return out


def llf_flux(u: np.ndarray) -> np.ndarray:
    """Local Lax-Friedrichs interface fluxes for the convex flux u^2/2."""
    ul = u[:-1]
    ur = u[1:]
    lam = np.maximum(np.abs(ul), np.abs(ur))
    return 0.25 * (ul * ul + ur * ur) - 0.5 * lam * (ur - ul)


class BurgersStepper:
    """Fixed-step marcher: explicit LLF convection then implicit diffusion.

    Boundary nodes stay pinned at their initial values; a max-norm guard
    rejects steps that blow past twice the far-field amplitude.
    """

    def __init__(self, grid: Grid, nu: float, dt: float):
        if dt <= 0:
            raise ValueError(f"need dt > 0, got {dt}")
        self.grid = grid
        self.nu = nu
        self.dt = dt
        self.dx = grid.dx
        self._diffusion = DiffusionSolver(grid.n, grid.dx, nu, dt)

    def check_cfl(self, u: np.ndarray):
        umax = float(np.max(np.abs(u)))
        if umax > 0 and self.dt > 0.4 * self.dx / umax:
            raise StabilityError(
                f"advective CFL violated: dt={self.dt:g} > 0.4*dx/max|u|={0.4 * self.dx / umax:g}"
            )

    def convect(self, u: np.ndarray) -> np.ndarray:
        f = llf_flux(u)
        out = u.copy()
        out[1:-1] -= (self.dt / self.dx) * (f[1:] - f[:-1])
        return out

    def step(self, u: np.ndarray) -> np.ndarray:
        out = self._diffusion.step(self.convect(u))
        bound = 2.0 * max(abs(u[0]), abs(u[-1])) + 1.0
        if float(np.max(np.abs(out))) > bound:
            raise StabilityError(
                f"max-norm blowup guard tripped: max|u| > {bound:g}"
            )
        return out


def fd_viscous_solve(u0: Field, params: ViscousParams, t_end: float, dt: float) -> Field:
    """Advance the viscous Burgers equation from u0 to time t_end.

    t_end is covered by whole steps of size dt plus one shortened final step
    for the remainder.  Raises StabilityError on CFL violation at entry or if
    the blowup guard trips mid-run.
    """
    if t_end < 0:
        raise ValueError(f"need t_end >= 0, got {t_end}")
    u = u0.values.copy()
    if t_end == 0:
        return Field(u0.grid, u)
    stepper = BurgersStepper(u0.grid, params.nu, dt)
    stepper.check_cfl(u)
    n_full = int(np.floor(t_end / dt + 1e-12))
    for _ in range(n_full):
        u = stepper.step(u)
    rem = t_end - n_full * dt
    if rem > 1e-12 * max(dt, 1.0):
        u = BurgersStepper(u0.grid, params.nu, rem).step(u)
    return Field(u0.grid, u)
