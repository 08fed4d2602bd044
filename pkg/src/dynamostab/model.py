"""Reduced two-component dynamo model with multiplicative noise.

The state is the pair (b_r, b_phi) of radial and azimuthal magnetic field
components.  The drift couples them through shear (g), helical driving
(delta) and turbulent diffusivity (eps), each saturated by an algebraic
quenching in b_phi; a single noise channel of intensity sigma1 perturbs
the driving term and enters the radial equation proportionally to b_phi:

    db_r   = -(delta phi_a(b_phi) b_phi + eps phi_b(b_phi) b_r) dt
             - sqrt(2 sigma1) phi_a(b_phi) b_phi dW
    db_phi = -(g b_r + eps phi_b(b_phi) b_phi) dt

with quenching functions

    phi_a(x) = 1 / (1 + k_alpha x^2)
    phi_b(x) = (1 + x^2) / (1 + (k_beta + 1) x^2).

Because phi_a > 0 everywhere, the noise term vanishes only on b_phi = 0,
so the stochastic system keeps a single equilibrium at the origin; the
nonzero steady states found here belong to the noise-free flow.  The
linearization about the origin has drift [[-eps, -delta], [-g, -eps]] and
a nilpotent diffusion matrix, which downstream modules rely on.
"""

import math
from dataclasses import dataclass

import numpy as np

from .cubics import real_cubic_roots

EQUILIBRIUM_RESIDUAL_TOL = 1e-12


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless parameter set.

    g is the shear parameter (order 1), delta the driving parameter and
    eps the diffusivity parameter (both typically in [0.01, 0.1]), sigma1
    the noise intensity, and k_alpha/k_beta the quenching constants.
    delta and eps may sit exactly on the boundary value 0, which several
    limits below use; everything else must be strictly positive except
    sigma1 >= 0.
    """

    g: float
    delta: float
    eps: float
    sigma1: float = 0.0
    k_alpha: float = 1.0
    k_beta: float = 1.0

    def __post_init__(self):
        vals = (self.g, self.delta, self.eps, self.sigma1, self.k_alpha, self.k_beta)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"parameters must be finite, got {self}")
        if self.g <= 0.0:
            raise ValueError(f"g must be > 0, got {self.g}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")
        if self.eps < 0.0:
            raise ValueError(f"eps must be >= 0, got {self.eps}")
        if self.sigma1 < 0.0:
            raise ValueError(f"sigma1 must be >= 0, got {self.sigma1}")
        if self.k_alpha <= 0.0 or self.k_beta <= 0.0:
            raise ValueError(
                f"quenching constants must be > 0, got k_alpha={self.k_alpha}, "
                f"k_beta={self.k_beta}"
            )


@dataclass(frozen=True)
class FieldState:
    """Magnetic field state (radial, azimuthal), dimensionless."""

    b_r: float
    b_phi: float

    def __post_init__(self):
        if not (math.isfinite(self.b_r) and math.isfinite(self.b_phi)):
            raise ValueError(f"field components must be finite, got {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.b_r, self.b_phi], dtype=np.float64)


@dataclass(frozen=True)
class LinearSystem:
    """Drift and diffusion matrices of the linearized field equation.

    For systems produced by ``linearize`` the diffusion matrix is
    nilpotent of degree 2 (diffusion @ diffusion == 0).
    """

    drift: np.ndarray
    diffusion: np.ndarray

    def __post_init__(self):
        for name in ("drift", "diffusion"):
            m = np.asarray(getattr(self, name), dtype=np.float64)
            if m.shape != (2, 2):
                raise ValueError(f"{name} must be 2x2, got shape {m.shape}")
            object.__setattr__(self, name, m)


@dataclass(frozen=True)
class Equilibrium:
    """A steady state together with the max-norm drift residual there."""

    state: FieldState
    residual: float


def quenching(b_phi: float, params: ModelParams) -> tuple[float, float]:
    """Quenching factors (phi_a, phi_b) at azimuthal field b_phi.

    Both are strictly positive for every finite b_phi; phi_a decays to 0
    while phi_b saturates at 1/(k_beta + 1).
    """
    u = b_phi * b_phi
    phi_a = 1.0 / (1.0 + params.k_alpha * u)
    phi_b = (1.0 + u) / (1.0 + (params.k_beta + 1.0) * u)
    return phi_a, phi_b


def drift_nonlinear(state: FieldState, params: ModelParams) -> np.ndarray:
    """Drift vector field of the full nonlinear system."""
    phi_a, phi_b = quenching(state.b_phi, params)
    return np.array([
        -(params.delta * phi_a * state.b_phi + params.eps * phi_b * state.b_r),
        -(params.g * state.b_r + params.eps * phi_b * state.b_phi),
    ])


def diffusion_nonlinear(state: FieldState, params: ModelParams) -> np.ndarray:
    """Diffusion vector field; only the radial component carries noise."""
    phi_a, _ = quenching(state.b_phi, params)
    return np.array([
        -math.sqrt(2.0 * params.sigma1) * phi_a * state.b_phi,
        0.0,
    ])


def _equilibrium_cubic(params: ModelParams) -> tuple[float, float, float, float]:
    """Coefficients of the cubic in u = b_phi^2 whose positive roots give
    the nonzero steady states:

        eps^2 (1 + k_alpha u)(1 + u)^2 - delta g (1 + (k_beta + 1) u)^2 = 0.
    """
    e2 = params.eps * params.eps
    dg = params.delta * params.g
    kb1 = params.k_beta + 1.0
    c3 = e2 * params.k_alpha
    c2 = e2 * (1.0 + 2.0 * params.k_alpha) - dg * kb1 * kb1
    c1 = e2 * (2.0 + params.k_alpha) - 2.0 * dg * kb1
    c0 = e2 - dg
    return c3, c2, c1, c0


def _residual(state: FieldState, params: ModelParams) -> float:
    return float(np.max(np.abs(drift_nonlinear(state, params))))


def find_equilibria(params: ModelParams) -> list[Equilibrium]:
    """All steady states of the noise-free flow, sorted by b_phi ascending.

    The origin is always present.  Nonzero states come in mirrored pairs
    (-b_r, -b_phi) <-> (b_r, b_phi) obtained by reducing the two steady
    state equations to a cubic in u = b_phi^2 and back-substituting
    b_r = -(eps/g) b_phi phi_b(b_phi).  For sigma1 > 0 only the origin
    survives as an equilibrium of the stochastic system, since the noise
    coefficient cannot vanish at b_phi != 0; the nonzero states returned
    here are equilibria of the sigma1 = 0 flow only.

    Each returned state satisfies the drift equations to better than
    ``EQUILIBRIUM_RESIDUAL_TOL`` in max-norm.
    """
    origin = Equilibrium(FieldState(0.0, 0.0), 0.0)
    if params.eps == 0.0:
        # drift reduces to (-delta phi_a b_phi, -g b_r): only the origin,
        # and the cubic reduction below would lose its leading term.
        return [origin]

    c3, c2, c1, c0 = _equilibrium_cubic(params)
    roots = [u for u in real_cubic_roots(c3, c2, c1, c0) if u > 0.0]
    # collapse numerically coincident roots (bifurcation-point doubles)
    kept: list[float] = []
    for u in roots:
        if not kept or abs(u - kept[-1]) > 1e-9 * max(1.0, abs(u)):
            kept.append(u)

    results = [origin]
    for u in kept:
        b_phi = math.sqrt(u)
        _, phi_b = quenching(b_phi, params)
        b_r = -(params.eps / params.g) * b_phi * phi_b
        for sign in (1.0, -1.0):
            state = FieldState(sign * b_r, sign * b_phi)
            res = _residual(state, params)
            if res >= EQUILIBRIUM_RESIDUAL_TOL:
                raise RuntimeError(
                    f"equilibrium residual {res:.3e} exceeds "
                    f"{EQUILIBRIUM_RESIDUAL_TOL} at {state}"
                )
            results.append(Equilibrium(state, res))
    results.sort(key=lambda e: e.state.b_phi)
    return results


def linearize(params: ModelParams) -> LinearSystem:
    """Linearization of the field equation about the origin."""
    drift = np.array([
        [-params.eps, -params.delta],
        [-params.g, -params.eps],
    ])
    diffusion = np.array([
        [0.0, -math.sqrt(2.0 * params.sigma1)],
        [0.0, 0.0],
    ])
    return LinearSystem(drift, diffusion)


def departure_from_normality(m: np.ndarray) -> float:
    """Frobenius-norm departure from normality of a real 2x2 matrix,
    sqrt(sum of squared singular values - sum of squared eigenvalue
    moduli).

    The singular-value part is the squared Frobenius norm and the
    eigenvalue part follows from trace and determinant (a complex pair
    contributes 2*det).  Carrying out the subtraction symbolically for the
    two discriminant branches leaves cancellation-free radicands, so
    nothing under the root can go negative even for a normal matrix and
    small departures come out to full absolute accuracy:

        real eigenvalues:  |m01 - m10|
        complex pair:      sqrt((m00 - m11)^2 + (m01 + m10)^2)

    (the branches agree where the discriminant vanishes).  For the model
    drift this evaluates to |g - delta| independently of eps.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix entries must be finite")
    tr = float(a[0, 0] + a[1, 1])
    det = float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    disc = tr * tr - 4.0 * det
    if disc >= 0.0:
        return abs(float(a[0, 1] - a[1, 0]))
    return math.hypot(float(a[0, 0] - a[1, 1]), float(a[0, 1] + a[1, 0]))
