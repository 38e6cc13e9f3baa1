"""wavelab: a numerical laboratory for the 1-D Burgers equation with
Brownian transport noise.

Layers:

* ``grids`` -- uniform meshes and grid fields.
* ``waves`` -- rarefaction fans (exact and smoothed) and viscous shock
  profiles with their derivative norms.
* ``deterministic`` -- noise-free solvers: Cole-Hopf quadrature reference and
  a conservative finite-difference marcher.
* ``spde`` -- pathwise stochastic schemes (direct Euler-Maruyama and the
  exact-in-law Brownian-shift representation), plus the H^1 cut-off map.
* ``analysis`` -- norms, energy diagnostics, decay-rate fitting, and the
  area-comparison decay toolkit with its optimality witness.
* ``experiments`` -- Monte Carlo ensembles for rarefaction stability, the
  shock sup-distance growth curve, and scheme cross-validation.
* ``cli`` -- batch experiment driver with key=value configs and CSV output.
"""

from .analysis import (
    AreaPremises,
    AreaReport,
    RateFit,
    SampledFunction,
    area_check,
    area_naive_bound,
    area_witness,
    energy_diagnostics,
    lp_norm,
    rate_fit,
)
from .deterministic import StabilityError, ViscousParams, cole_hopf_solve, fd_viscous_solve
from .experiments import (
    CrossValidationConfig,
    EnsembleConfig,
    EnsembleStats,
    rarefaction_stability,
    scheme_cross_validation,
    shock_instability_monte_carlo,
    shock_instability_quadrature,
)
from .grids import Field, Grid, field_from_function
from .spde import (
    BrownianPath,
    CutoffParam,
    NoiseParams,
    cutoff_project,
    em_step,
    sample_brownian,
    shift_step,
    simulate_path,
)
from .waves import (
    QuadratureError,
    RiemannData,
    ShockProfileParams,
    approx_rarefaction,
    approx_rarefaction_initial,
    exact_rarefaction,
    profile_derivative_norms,
    rankine_hugoniot_speed,
    viscous_shock,
)

__all__ = [
    "AreaPremises",
    "AreaReport",
    "BrownianPath",
    "CrossValidationConfig",
    "CutoffParam",
    "EnsembleConfig",
    "EnsembleStats",
    "Field",
    "Grid",
    "NoiseParams",
    "QuadratureError",
    "RateFit",
    "RiemannData",
    "SampledFunction",
    "ShockProfileParams",
    "StabilityError",
    "ViscousParams",
    "approx_rarefaction",
    "approx_rarefaction_initial",
    "area_check",
    "area_naive_bound",
    "area_witness",
    "cole_hopf_solve",
    "cutoff_project",
    "em_step",
    "energy_diagnostics",
    "exact_rarefaction",
    "fd_viscous_solve",
    "field_from_function",
    "lp_norm",
    "profile_derivative_norms",
    "rankine_hugoniot_speed",
    "rarefaction_stability",
    "rate_fit",
    "sample_brownian",
    "scheme_cross_validation",
    "shift_step",
    "shock_instability_monte_carlo",
    "shock_instability_quadrature",
    "simulate_path",
    "viscous_shock",
]

__version__ = "0.1.0"
