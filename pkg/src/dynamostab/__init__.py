"""Stochastic stability analysis of a reduced alpha-omega dynamo model.

The library answers one question from several independent directions:
when does the zero-field equilibrium of a two-component dynamo with a
randomly perturbed driving term stay stable?  It finds the steady
states of the noise-free flow, evaluates the top Lyapunov exponent of the
linearization by quadrature, gamma series and hypergeometric closed form,
tests exponential mean-square stability through the second-moment matrix
and a covariance feedback gain, validates everything by Monte Carlo, and
maps the resulting stability regions over the (eps, sigma1) plane.
"""

__version__ = "0.1.0"

from .errors import NonConvergenceError
from .lyapunov import (
    LyapunovResult,
    NormalizedSystem,
    lyapunov,
    lyapunov_hypergeometric,
    lyapunov_quadrature,
    lyapunov_series,
    normalize_stratonovich,
)
from .meansquare import (
    MsReport,
    StabilityMatrix,
    build_stability_matrix,
    criticality_threshold,
    ms_report,
    ms_threshold_sigma,
    ryashko_trace,
    spectral_abscissa,
)
from .model import (
    Equilibrium,
    FieldState,
    LinearSystem,
    ModelParams,
    departure_from_normality,
    diffusion_nonlinear,
    drift_nonlinear,
    find_equilibria,
    linearize,
    quenching,
)
from .regions import RegionRecord, ScanSpec, scan, trace_boundary
from .sde import (
    AngularDensity,
    McEstimate,
    RngSpec,
    SimConfig,
    angular_density,
    diverged,
    em_step_linear,
    em_step_nonlinear,
    mc_lyapunov,
    mc_second_moment,
)
from .specfun import (
    SeriesControl,
    factored_identities_check,
    gamma_fn,
    hyp1f2,
    pochhammer,
)

__all__ = [
    "AngularDensity",
    "Equilibrium",
    "FieldState",
    "LinearSystem",
    "LyapunovResult",
    "McEstimate",
    "ModelParams",
    "MsReport",
    "NonConvergenceError",
    "NormalizedSystem",
    "RegionRecord",
    "RngSpec",
    "ScanSpec",
    "SeriesControl",
    "SimConfig",
    "StabilityMatrix",
    "angular_density",
    "build_stability_matrix",
    "criticality_threshold",
    "departure_from_normality",
    "diffusion_nonlinear",
    "diverged",
    "drift_nonlinear",
    "em_step_linear",
    "em_step_nonlinear",
    "factored_identities_check",
    "find_equilibria",
    "gamma_fn",
    "hyp1f2",
    "linearize",
    "lyapunov",
    "lyapunov_hypergeometric",
    "lyapunov_quadrature",
    "lyapunov_series",
    "mc_lyapunov",
    "mc_second_moment",
    "ms_report",
    "ms_threshold_sigma",
    "normalize_stratonovich",
    "pochhammer",
    "quenching",
    "ryashko_trace",
    "scan",
    "spectral_abscissa",
    "trace_boundary",
]
