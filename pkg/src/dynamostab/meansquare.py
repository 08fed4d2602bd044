"""Exponential mean-square stability of the linearized field equation.

The second moments E[B_i B_j] of the linear system evolve under the 4x4
matrix S = I (x) L + L (x) I + M (x) M, where L and M are the drift and
diffusion matrices and (x) the Kronecker product.  Mean-square stability
is equivalent to the spectral abscissa of S being negative.

For this model S decomposes: the antisymmetric direction (0, 1, -1, 0)
carries the exact eigenvalue -2 eps, and on the symmetric subspace the
shifted eigenvalues t = mu + 2 eps solve the depressed cubic

    t^3 - 4 g delta t - 4 g^2 sigma1 = 0,

whose largest real root is positive whenever sigma1 > 0, so the abscissa
is -2 eps + t*.  (Equivalently, via Cardano, t* = U/3 + 4 g delta / U with
U = cbrt(54 g^2 sigma1 + 6 sqrt(81 g^4 sigma1^2 - 48 g^3 delta^3)); this
matches the identification of the noise symbol in that closed form with
sigma1, which the test suite confirms against a generic eigensolver.)

The abscissa vanishes exactly at sigma1 = 2 eps (eps^2 - g delta)/g^2 in
the drift-subcritical regime eps^2 > g delta, which is therefore the sharp
mean-square stability threshold.  An independent second check solves the
stationary covariance of the additively forced drift and compares the
resulting noise-feedback gain against 1 (``ryashko_trace``).
"""

import math
from dataclasses import dataclass

import numpy as np

from .cubics import largest_real_root
from .model import ModelParams

CRITICALITY_BAND = 1e-14


@dataclass(frozen=True)
class StabilityMatrix:
    """The 4x4 second-moment evolution matrix."""

    s: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.s, dtype=np.float64)
        if m.shape != (4, 4):
            raise ValueError(f"stability matrix must be 4x4, got {m.shape}")
        object.__setattr__(self, "s", m)


@dataclass(frozen=True)
class MsReport:
    """Mean-square verdict: spectral abscissa, stability flag, drift
    criticality class, the closed-form threshold noise intensity (present
    only when subcritical) and the covariance feedback gain (NaN outside
    its domain of definition)."""

    abscissa: float
    ms_stable: bool
    criticality: str
    threshold_sigma: float | None
    ryashko_trace: float


def criticality_threshold(g: float, delta: float) -> float:
    """The eps value separating drift-subcritical from supercritical."""
    return math.sqrt(g * delta)


def build_stability_matrix(params: ModelParams) -> StabilityMatrix:
    """Assemble S from the Kronecker formula and check it against the
    explicit entry layout before returning the latter."""
    eps, g, delta, sigma1 = params.eps, params.g, params.delta, params.sigma1
    drift = np.array([[-eps, -delta], [-g, -eps]])
    diff = np.array([[0.0, -math.sqrt(2.0 * sigma1)], [0.0, 0.0]])
    eye = np.eye(2)
    kron_form = np.kron(eye, drift) + np.kron(drift, eye) + np.kron(diff, diff)
    explicit = np.array([
        [-2.0 * eps, -delta, -delta, 2.0 * sigma1],
        [-g, -2.0 * eps, 0.0, -delta],
        [-g, 0.0, -2.0 * eps, -delta],
        [0.0, -g, -g, -2.0 * eps],
    ])
    scale = max(np.max(np.abs(explicit)), 1.0)
    if not np.allclose(kron_form, explicit, rtol=1e-12, atol=1e-14 * scale):
        raise AssertionError("Kronecker assembly disagrees with the explicit layout")
    return StabilityMatrix(explicit)


def _params_from_matrix(m: StabilityMatrix) -> tuple[float, float, float, float]:
    s = m.s
    eps = -0.5 * float(s[0, 0])
    delta = -float(s[0, 1])
    g = -float(s[1, 0])
    sigma1 = 0.5 * float(s[0, 3])
    return g, delta, eps, sigma1


def symmetric_cubic_root(g: float, delta: float, sigma1: float) -> float:
    """Largest real root of t^3 - 4 g delta t - 4 g^2 sigma1."""
    return largest_real_root(1.0, 0.0, -4.0 * g * delta, -4.0 * g * g * sigma1)


def spectral_abscissa(m: StabilityMatrix) -> float:
    """Largest eigenvalue real part of S, by the closed-form reduction.

    One eigenvalue is exactly -2 eps; the rest are -2 eps + t over the
    roots t of the symmetric-subspace cubic, whose largest real root
    dominates (complex partners have real part -t*/2).
    """
    g, delta, eps, sigma1 = _params_from_matrix(m)
    t_star = symmetric_cubic_root(g, delta, sigma1)
    return -2.0 * eps + max(t_star, 0.0)


def ryashko_trace(params: ModelParams) -> float:
    """Noise-feedback gain from the stationary covariance of the
    additively forced drift.

    Solves L M + M L^T + Q Q^T = 0 with forcing Q = (sqrt(2 sigma1), 0)^T
    entering the radial component, then returns the stationary second
    moment of the azimuthal component (the entry of M selected by the
    noise coupling matrix [[0,1],[0,0]], i.e. tr(S M S^T)).  Feeding that
    moment back through the multiplicative noise reproduces the injected
    intensity exactly when the gain is 1, so mean-square stability holds
    iff the returned value is below 1.

    Defined only for a stable unperturbed drift (eps > sqrt(g delta));
    otherwise the stationary covariance does not exist and ValueError is
    raised.
    """
    if params.eps * params.eps <= params.g * params.delta:
        raise ValueError(
            "stationary covariance undefined: unperturbed drift is not "
            f"stable (eps={params.eps} <= sqrt(g*delta)="
            f"{criticality_threshold(params.g, params.delta)})"
        )
    eps, g, delta, sigma1 = params.eps, params.g, params.delta, params.sigma1
    # unknowns (m11, m12, m22) of the symmetric stationary covariance
    a = np.array([
        [2.0 * eps, 2.0 * delta, 0.0],
        [g, 2.0 * eps, delta],
        [0.0, 2.0 * g, 2.0 * eps],
    ])
    rhs = np.array([2.0 * sigma1, 0.0, 0.0])
    m11, m12, m22 = np.linalg.solve(a, rhs)
    cov = np.array([[m11, m12], [m12, m22]])
    coupling = np.array([[0.0, 1.0], [0.0, 0.0]])
    return float(np.trace(coupling @ cov @ coupling.T))


def ms_threshold_sigma(params: ModelParams) -> float:
    """Closed-form mean-square stability threshold 2 eps (eps^2 - g delta)/g^2
    for the subcritical regime."""
    return 2.0 * params.eps * (params.eps ** 2 - params.g * params.delta) / params.g ** 2


def ms_report(params: ModelParams) -> MsReport:
    """Assemble the full mean-square picture at one parameter point."""
    abscissa = spectral_abscissa(build_stability_matrix(params))
    gap = params.eps ** 2 - params.g * params.delta
    band = CRITICALITY_BAND * max(params.eps ** 2, params.g * params.delta)
    if abs(gap) <= band:
        criticality = "critical"
    elif gap > 0.0:
        criticality = "subcritical"
    else:
        criticality = "supercritical"
    threshold = ms_threshold_sigma(params) if criticality == "subcritical" else None
    if criticality == "subcritical":
        trace = ryashko_trace(params)
    else:
        trace = math.nan
    return MsReport(
        abscissa=abscissa,
        ms_stable=abscissa < 0.0,
        criticality=criticality,
        threshold_sigma=threshold,
        ryashko_trace=trace,
    )
