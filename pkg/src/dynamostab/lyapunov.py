"""Top Lyapunov exponent of the linearized field equation.

For noise intensity sigma1 > 0 the exponent admits the closed form

    lambda = -eps + (g/2) * N / D,
    N = integral_0^inf sqrt(v) exp(-(g/(12 sigma1)) v^3 + (delta/sigma1) v) dv,
    D = the same integral with 1/sqrt(v) in place of sqrt(v),

obtained by projecting the time-changed, component-reversed Stratonovich
form of the system onto the circle and averaging against the stationary
angle density.  Three independent evaluators are provided:

* ``lyapunov_quadrature``   integrates N and D directly after the
  substitution v = w^2, which removes the 1/sqrt(v) endpoint singularity;
* ``lyapunov_series``       sums the equivalent gamma-function series
  with terms A^n Gamma(n/3 + c)/n!, A = b/a^(1/3), a = g/(12 sigma1),
  b = delta/sigma1, and c = 1/2 (numerator) or 1/6 (denominator);
* ``lyapunov_hypergeometric`` regroups that series by residue of n mod 3
  into three 1F2 functions per sum, all at argument x = A^3/27:

      num = G(1/2) F(1/2;1/3,2/3;x) + A G(5/6) F(5/6;2/3,4/3;x)
            + (A^2/12) G(1/6) F(7/6;4/3,5/3;x)
      den = G(1/6) F(1/6;1/3,2/3;x) + A G(1/2) F(1/2;2/3,4/3;x)
            + (A^2/2) G(5/6) F(5/6;4/3,5/3;x)

  where G is the gamma function, and lambda = -eps + (3 sigma1 g^2/2)^(1/3)
  * num/den.

All three compute the noise growth term lambda + eps first and subtract
eps last, so the exact additivity of the -eps contribution survives in
floating point.  At sigma1 = 0 the exponent degenerates to the spectral
abscissa -eps + sqrt(g delta) of the drift; the dispatcher handles that
fallback, while the three method-specific evaluators reject sigma1 = 0.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergenceError
from .model import ModelParams
from .specfun import SeriesControl, _hyp1f2_info, gamma_fn

METHODS = ("quadrature", "series", "hypergeometric")

_G16 = gamma_fn(1.0 / 6.0)
_G12 = gamma_fn(1.0 / 2.0)
_G56 = gamma_fn(5.0 / 6.0)


@dataclass(frozen=True)
class NormalizedSystem:
    """Time-changed, component-reversed Stratonovich form of the linear
    system: d(Y) = a0 Y dt + a1 Y o dW with a1 = [[0,0],[1,0]].

    Exponents of the original system are time_scale = 2*sigma1 times those
    of this one.  Because the original diffusion matrix is nilpotent of
    degree 2, its Ito and Stratonovich readings coincide, so no drift
    correction appears here.
    """

    a0: np.ndarray
    a1: np.ndarray
    time_scale: float


@dataclass(frozen=True)
class LyapunovResult:
    """An exponent estimate: value, producing method, an error estimate
    (quadrature truncation bound, series tail bound, or Monte Carlo
    standard error) and method-specific metadata such as term counts."""

    value: float
    method: str
    error_estimate: float
    metadata: dict = field(default_factory=dict)


def normalize_stratonovich(params: ModelParams) -> NormalizedSystem:
    """Rescale time by 1/(2 sigma1), reverse the state components and
    normalize the noise matrix to [[0,0],[1,0]].  Requires sigma1 > 0."""
    if params.sigma1 <= 0.0:
        raise ValueError(
            "normalization divides by 2*sigma1; for sigma1 = 0 use the "
            "deterministic abscissa -eps + sqrt(g*delta)"
        )
    scale = 2.0 * params.sigma1
    a0 = np.array([
        [-params.eps / scale, -params.g / scale],
        [-params.delta / scale, -params.eps / scale],
    ])
    a1 = np.array([[0.0, 0.0], [1.0, 0.0]])
    return NormalizedSystem(a0, a1, scale)


# ---------------------------------------------------------------------------
# quadrature route
# ---------------------------------------------------------------------------

# 15-point Kronrod extension of 7-point Gauss on [-1, 1] (positive half).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])            # 15 ascending
_WK = np.concatenate([_WGK[:-1], _WGK[::-1]])
_WG_FULL = np.zeros(15)
_WG_FULL[1:14:2] = np.concatenate([_WG[:-1], _WG[::-1]])     # Gauss nodes interleave


_EPS = np.finfo(float).eps


def _gk_panel(f, lo: float, hi: float) -> tuple[float, float]:
    """Kronrod estimate and a realistic error estimate on one panel.

    The raw |K - G| difference measures the error of the coarser Gauss
    rule; the Kronrod error is much smaller, so it is rescaled with the
    usual (200 |K-G| / resabs)^1.5 law and floored at round-off level to
    keep the refinement loop from chasing unreachable targets.
    """
    half = 0.5 * (hi - lo)
    mid = 0.5 * (hi + lo)
    y = f(mid + half * _NODES)
    kron = half * float(np.dot(_WK, y))
    gauss = half * float(np.dot(_WG_FULL, y))
    resabs = half * float(np.dot(_WK, np.abs(y)))
    err = abs(kron - gauss)
    if resabs != 0.0 and err != 0.0:
        err = resabs * min(1.0, (200.0 * err / resabs) ** 1.5)
    return kron, max(err, 50.0 * _EPS * resabs)


def _adaptive_quad(f, edges: list[float], rel_tol: float,
                   max_panels: int = 4096) -> tuple[float, float, int]:
    """Globally adaptive Gauss-Kronrod over the panels delimited by
    ``edges``: repeatedly bisect the panel with the largest local error
    until the summed error estimate is below rel_tol times the integral.

    The initial edges must bracket any sharp feature of the integrand; a
    single wide panel can sample past a narrow peak and stop immediately
    with a deceptively small error estimate.
    """
    panels = []
    total = 0.0
    total_err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, err = _gk_panel(f, lo, hi)
        heapq.heappush(panels, (-err, lo, hi, val, err))
        total += val
        total_err += err
    while total_err > rel_tol * abs(total) and len(panels) < max_panels:
        _, a, b, v, e = heapq.heappop(panels)
        m = 0.5 * (a + b)
        v1, e1 = _gk_panel(f, a, m)
        v2, e2 = _gk_panel(f, m, b)
        total += v1 + v2 - v
        total_err += e1 + e2 - e
        heapq.heappush(panels, (-e1, a, m, v1, e1))
        heapq.heappush(panels, (-e2, m, b, v2, e2))
    if total_err > rel_tol * abs(total):
        raise NonConvergenceError(
            f"adaptive quadrature stalled at {len(panels)} panels "
            f"(err {total_err:.2e} vs target {rel_tol * abs(total):.2e})"
        )
    return total, total_err, len(panels)


def _quadrature_noise(g: float, delta: float, sigma1: float,
                      rel_tol: float = 1e-13) -> tuple[float, float, dict]:
    """Noise growth term (g/2) N/D by adaptive quadrature in w = sqrt(v).

    Both integrands share the exponential exp(-a v^3 + b v); its maximum
    is factored out so the ratio stays representable at extreme parameter
    values, and a common truncation point W is valid for both integrals.
    """
    a = g / (12.0 * sigma1)
    b = delta / sigma1
    if b > 0.0:
        v_peak = math.sqrt(b / (3.0 * a))
        h_max = (2.0 * b / 3.0) * v_peak
    else:
        v_peak = 0.0
        h_max = 0.0
    w_peak = math.sqrt(v_peak)

    def exponent(w):
        v = w * w
        return -a * v ** 3 + b * v - h_max

    # truncation: exponent down to 1e-16 of the peak, with headroom for the
    # polynomial w^2 factor (second pass folds in the actual cutoff size)
    cut = math.log(1e-16) - 5.0
    hi = max(1.0, 2.0 * w_peak)
    for _ in range(2):
        grow = 0
        while exponent(hi) > cut:
            hi *= 2.0
            grow += 1
            if grow > 200:
                raise NonConvergenceError("tail bound search failed to close")
        lo_b, hi_b = w_peak, hi
        for _ in range(80):
            mid = 0.5 * (lo_b + hi_b)
            if exponent(mid) > cut:
                lo_b = mid
            else:
                hi_b = mid
        hi = hi_b
        cut = math.log(1e-16) - 5.0 - 2.0 * math.log1p(hi)

    def f_num(w):
        return 2.0 * w * w * np.exp(exponent(w))

    def f_den(w):
        return 2.0 * np.exp(exponent(w))

    # seed the subdivision with panels that straddle the exponential peak;
    # its half-width in w follows from the curvature -8b at the maximum
    edges = {0.0, hi}
    if b > 0.0:
        width = 1.0 / math.sqrt(8.0 * b)
        for k in (-8.0, -2.0, 0.0, 2.0, 8.0):
            edges.add(min(max(w_peak + k * width, 0.0), hi))
    else:
        edges.update(0.25 * hi * k for k in (1.0, 2.0, 3.0))
    edge_list = sorted(edges)

    num, err_n, panels_n = _adaptive_quad(f_num, edge_list, rel_tol)
    den, err_d, panels_d = _adaptive_quad(f_den, edge_list, rel_tol)
    ratio = num / den
    term = (g / 2.0) * ratio
    err = term * (err_n / abs(num) + err_d / abs(den))
    meta = {"cutoff_w": hi, "panels_num": panels_n, "panels_den": panels_d}
    return term, err, meta


# ---------------------------------------------------------------------------
# series route
# ---------------------------------------------------------------------------

def _series_argument(g: float, delta: float, sigma1: float) -> float:
    """A = b / a^(1/3) with a = g/(12 sigma1), b = delta/sigma1."""
    a = g / (12.0 * sigma1)
    b = delta / sigma1
    return b / a ** (1.0 / 3.0)


def _gamma_series(A: float, c: float, ctl: SeriesControl) -> tuple[float, int, float]:
    """Sum of A^n Gamma(n/3 + c)/n! over n >= 0.

    Terms are advanced along the three residue chains of n mod 3, each by
    t_{n+3} = t_n * A^3 (n/3 + c) / ((n+1)(n+2)(n+3)), so the gamma
    function is evaluated only three times per sum.  Returns the sum, the
    number of terms taken and the magnitude of the first unused term.
    """
    chain = [
        gamma_fn(c),
        A * gamma_fn(c + 1.0 / 3.0),
        0.5 * A * A * gamma_fn(c + 2.0 / 3.0),
    ]
    a3 = A ** 3
    total = 0.0
    streak = 0
    n = 0
    while n < ctl.max_terms:
        t = chain[n % 3]
        total += t
        chain[n % 3] = t * a3 * (n / 3.0 + c) / ((n + 1.0) * (n + 2.0) * (n + 3.0))
        n += 1
        if n > 1 and abs(t) < ctl.rel_tol * abs(total):
            streak += 1
            if streak == 3:
                return total, n, max(abs(x) for x in chain)
        else:
            streak = 0
    raise NonConvergenceError(
        f"gamma series did not settle within {ctl.max_terms} terms at A={A}"
    )


def _series_noise(g: float, delta: float, sigma1: float,
                  ctl: SeriesControl) -> tuple[float, float, dict]:
    A = _series_argument(g, delta, sigma1)
    prefactor = (3.0 * sigma1 * g * g / 2.0) ** (1.0 / 3.0)
    num, n_num, tail_num = _gamma_series(A, 0.5, ctl)
    den, n_den, tail_den = _gamma_series(A, 1.0 / 6.0, ctl)
    ratio = num / den
    term = prefactor * ratio
    err = prefactor * (tail_num + ratio * tail_den) / den
    return term, err, {"terms_num": n_num, "terms_den": n_den}


# ---------------------------------------------------------------------------
# hypergeometric route
# ---------------------------------------------------------------------------

def _hypergeometric_noise(g: float, delta: float, sigma1: float,
                          ctl: SeriesControl) -> tuple[float, float, dict]:
    A = _series_argument(g, delta, sigma1)
    x = A ** 3 / 27.0
    prefactor = (3.0 * sigma1 * g * g / 2.0) ** (1.0 / 3.0)

    third = 1.0 / 3.0
    pieces_num = (
        (_G12, (0.5, third, 2.0 * third)),
        (A * _G56, (5.0 / 6.0, 2.0 * third, 4.0 * third)),
        (A * A / 12.0 * _G16, (7.0 / 6.0, 4.0 * third, 5.0 * third)),
    )
    pieces_den = (
        (_G16, (1.0 / 6.0, third, 2.0 * third)),
        (A * _G12, (0.5, 2.0 * third, 4.0 * third)),
        (A * A / 2.0 * _G56, (5.0 / 6.0, 4.0 * third, 5.0 * third)),
    )

    terms = []

    def assemble(pieces):
        total = 0.0
        tail = 0.0
        for coef, (p, q1, q2) in pieces:
            val, n_terms, t = _hyp1f2_info(p, q1, q2, x, ctl)
            total += coef * val
            tail += abs(coef) * t
            terms.append(n_terms)
        return total, tail

    num, tail_num = assemble(pieces_num)
    den, tail_den = assemble(pieces_den)
    ratio = num / den
    term = prefactor * ratio
    err = prefactor * (tail_num + abs(ratio) * tail_den) / den
    return term, err, {"argument": x, "terms": terms}


# ---------------------------------------------------------------------------
# public operations
# ---------------------------------------------------------------------------

def noise_growth_term(params: ModelParams, method: str,
                      ctl: SeriesControl | None = None) -> tuple[float, float, dict]:
    """The eps-independent part lambda + eps, its error estimate, and
    evaluator metadata.  At sigma1 = 0 this is sqrt(g*delta) exactly."""
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    if params.sigma1 == 0.0:
        return math.sqrt(params.g * params.delta), 0.0, {"mode": "deterministic"}
    if ctl is None:
        ctl = SeriesControl()
    if method == "quadrature":
        return _quadrature_noise(params.g, params.delta, params.sigma1)
    if method == "series":
        return _series_noise(params.g, params.delta, params.sigma1, ctl)
    return _hypergeometric_noise(params.g, params.delta, params.sigma1, ctl)


def _require_noise(params: ModelParams, method: str):
    if params.sigma1 <= 0.0:
        raise ValueError(
            f"{method} evaluator needs sigma1 > 0; at sigma1 = 0 the "
            "exponent is the deterministic abscissa -eps + sqrt(g*delta) "
            "(use lyapunov(), which applies that fallback)"
        )


def lyapunov_quadrature(params: ModelParams) -> LyapunovResult:
    """Exponent by adaptive quadrature of the two defining integrals."""
    _require_noise(params, "quadrature")
    term, err, meta = _quadrature_noise(params.g, params.delta, params.sigma1)
    return LyapunovResult(term - params.eps, "quadrature", err, meta)


def lyapunov_series(params: ModelParams,
                    ctl: SeriesControl | None = None) -> LyapunovResult:
    """Exponent by direct summation of the gamma-function series."""
    _require_noise(params, "series")
    if ctl is None:
        ctl = SeriesControl()
    term, err, meta = _series_noise(params.g, params.delta, params.sigma1, ctl)
    return LyapunovResult(term - params.eps, "series", err, meta)


def lyapunov_hypergeometric(params: ModelParams,
                            ctl: SeriesControl | None = None) -> LyapunovResult:
    """Exponent via the regrouped 1F2 representation (fastest route)."""
    _require_noise(params, "hypergeometric")
    if ctl is None:
        ctl = SeriesControl()
    term, err, meta = _hypergeometric_noise(params.g, params.delta, params.sigma1, ctl)
    return LyapunovResult(term - params.eps, "hypergeometric", err, meta)


def lyapunov(params: ModelParams, method: str) -> LyapunovResult:
    """Dispatch to the chosen analytic evaluator.

    For sigma1 = 0 every method degenerates to the deterministic spectral
    abscissa -eps + sqrt(g*delta); the result keeps the requested method
    tag and records the fallback in metadata.
    """
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    if params.sigma1 == 0.0:
        value = math.sqrt(params.g * params.delta) - params.eps
        return LyapunovResult(value, method, 0.0, {"mode": "deterministic"})
    if method == "quadrature":
        return lyapunov_quadrature(params)
    if method == "series":
        return lyapunov_series(params)
    return lyapunov_hypergeometric(params)
