"""Stability maps over the (eps, sigma1) parameter plane.

``scan`` classifies every point of a rectangular grid by the sign of the
top Lyapunov exponent, the mean-square spectral abscissa, and the drift
criticality, producing one record per point in row-major order (eps
outer, sigma1 inner).  ``trace_boundary`` refines the zero crossings of
any of those three classifiers to high accuracy by bisection between
grid cells.

Both exploit an exact structural fact: for fixed (g, delta) the quantity
lambda + eps depends only on sigma1, and likewise the shifted mean-square
root t* = abscissa + 2 eps.  Those one-dimensional profiles are computed
once per distinct sigma1 and recombined with eps by a single subtraction,
which is bit-identical to evaluating each point from scratch because the
underlying evaluators form their results the same way.  Grid points are
independent, so scans may be partitioned over worker processes; records
are reassembled by grid index and the output does not depend on the
partition.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import NonConvergenceError
from .lyapunov import METHODS as LYAPUNOV_METHODS
from .lyapunov import noise_growth_term
from .meansquare import symmetric_cubic_root
from .model import ModelParams, departure_from_normality, linearize

LAMBDA_SIGN_BAND = 1e-12
BOUNDARY_KINDS = ("lyapunov", "meansquare", "criticality")


@dataclass(frozen=True)
class ScanSpec:
    """Grid specification: each range is (min, max, n) with n >= 2."""

    eps_range: tuple[float, float, int]
    sigma1_range: tuple[float, float, int]
    g: float
    delta: float
    k_alpha: float = 1.0
    k_beta: float = 1.0
    method: str = "hypergeometric"

    def __post_init__(self):
        lo, hi, n = self.eps_range
        if not (lo > 0.0 and hi >= lo and n >= 2):
            raise ValueError(f"bad eps_range {self.eps_range}: need 0 < min <= max, n >= 2")
        lo, hi, n = self.sigma1_range
        if not (lo >= 0.0 and hi >= lo and n >= 2):
            raise ValueError(f"bad sigma1_range {self.sigma1_range}: need 0 <= min <= max, n >= 2")
        if self.method not in LYAPUNOV_METHODS:
            raise ValueError(f"unknown method {self.method!r}")

    def eps_values(self) -> np.ndarray:
        lo, hi, n = self.eps_range
        return np.linspace(lo, hi, n)

    def sigma1_values(self) -> np.ndarray:
        lo, hi, n = self.sigma1_range
        return np.linspace(lo, hi, n)


@dataclass(frozen=True)
class RegionRecord:
    """Classification of one grid point.

    ``lam`` is the top Lyapunov exponent (the CSV column is named
    "lambda"); lambda_sign is "negative"/"boundary"/"positive" with a
    +-1e-12 dead band, or "error" when the evaluator failed at this point
    (the message is kept in ``error``).
    """

    eps: float
    sigma1: float
    lam: float
    lambda_sign: str
    ms_abscissa: float
    ms_stable: bool
    criticality: str
    dep_f: float
    error: str | None = None

    @property
    def in_probability(self) -> str:
        """Stability class of the nonlinear equilibrium implied by the
        exponent sign: negative means asymptotically stable in
        probability, positive means unstable in probability."""
        return {"negative": "stable", "positive": "unstable"}.get(
            self.lambda_sign, "indeterminate")


def _classify_sign(lam: float) -> str:
    if abs(lam) <= LAMBDA_SIGN_BAND:
        return "boundary"
    return "negative" if lam < 0.0 else "positive"


def _classify_criticality(eps: float, g: float, delta: float) -> str:
    gap = eps * eps - g * delta
    band = 1e-14 * max(eps * eps, g * delta)
    if abs(gap) <= band:
        return "critical"
    return "subcritical" if gap > 0.0 else "supercritical"


def _params_at(spec: ScanSpec, eps: float, sigma1: float) -> ModelParams:
    return ModelParams(g=spec.g, delta=spec.delta, eps=eps, sigma1=sigma1,
                       k_alpha=spec.k_alpha, k_beta=spec.k_beta)


def _scan_rows(spec: ScanSpec, row_lo: int, row_hi: int) -> list[RegionRecord]:
    """Records for eps rows [row_lo, row_hi); self-contained so worker
    processes can run it independently with identical results."""
    eps_vals = spec.eps_values()
    sig_vals = spec.sigma1_values()
    noise_cache: dict[float, tuple[float, str | None]] = {}
    root_cache: dict[float, float] = {}

    def noise_term(eps: float, sigma1: float) -> tuple[float, str | None]:
        if sigma1 not in noise_cache:
            try:
                term, _, _ = noise_growth_term(
                    _params_at(spec, eps, sigma1), spec.method)
                noise_cache[sigma1] = (term, None)
            except (ValueError, NonConvergenceError) as exc:
                noise_cache[sigma1] = (math.nan, str(exc))
        return noise_cache[sigma1]

    def ms_root(sigma1: float) -> float:
        if sigma1 not in root_cache:
            t = symmetric_cubic_root(spec.g, spec.delta, sigma1)
            root_cache[sigma1] = max(t, 0.0)
        return root_cache[sigma1]

    records = []
    for i in range(row_lo, row_hi):
        eps = float(eps_vals[i])
        dep_f = departure_from_normality(
            linearize(_params_at(spec, eps, 0.0)).drift)
        criticality = _classify_criticality(eps, spec.g, spec.delta)
        for s in sig_vals:
            sigma1 = float(s)
            term, err = noise_term(eps, sigma1)
            lam = term - eps
            abscissa = -2.0 * eps + ms_root(sigma1)
            records.append(RegionRecord(
                eps=eps,
                sigma1=sigma1,
                lam=lam,
                lambda_sign="error" if err is not None else _classify_sign(lam),
                ms_abscissa=abscissa,
                ms_stable=abscissa < 0.0,
                criticality=criticality,
                dep_f=dep_f,
                error=err,
            ))
    return records


def scan(spec: ScanSpec, workers: int = 1) -> list[RegionRecord]:
    """Evaluate the full grid, row-major (eps outer, sigma1 inner).

    Evaluator failures become error-tagged records instead of aborting
    the scan.  The result is independent of ``workers``.
    """
    n_rows = spec.eps_range[2]
    if workers <= 1:
        return _scan_rows(spec, 0, n_rows)
    workers = min(workers, n_rows)
    bounds = np.linspace(0, n_rows, workers + 1).astype(int)
    chunks = [(int(bounds[i]), int(bounds[i + 1])) for i in range(workers)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_scan_rows, spec, lo, hi) for lo, hi in chunks]
        parts = [f.result() for f in futures]
    return [rec for part in parts for rec in part]


def _lambda_evaluator(spec: ScanSpec):
    """lambda(eps, sigma1) with a quadrature fallback when the configured
    series-based method runs out of terms (tiny sigma1 during bisection)."""

    def f(eps: float, sigma1: float) -> float:
        params = _params_at(spec, eps, sigma1)
        try:
            term, _, _ = noise_growth_term(params, spec.method)
        except NonConvergenceError:
            term, _, _ = noise_growth_term(params, "quadrature")
        return term - eps

    return f


def _refine(f, lo: float, hi: float, f_lo: float,
            width_tol: float = 1e-10, resid_tol: float = 1e-9) -> float:
    """Bisect a bracketed sign change until the bracket is narrow and the
    residual small; returns the midpoint."""
    mid = 0.5 * (lo + hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f_mid = f(mid)
        if f_mid == 0.0 or ((hi - lo) <= width_tol and abs(f_mid) <= resid_tol):
            return mid
        if (f_mid < 0.0) == (f_lo < 0.0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    return mid


def trace_boundary(spec: ScanSpec, which: str) -> list[tuple[float, float]]:
    """Zero-level curves of one classifier, as refined (eps, sigma1) points.

    For "lyapunov" and "meansquare" every eps column is scanned along
    sigma1 and each bracketed sign change is refined; no monotonicity in
    sigma1 is assumed, so a column may contribute several crossings.  The
    "criticality" classifier does not depend on sigma1 at all, so it is
    scanned along eps within each sigma1 row instead, which renders its
    vertical line eps = sqrt(g delta).  Columns (rows) without a sign
    change contribute no points.
    """
    if which not in BOUNDARY_KINDS:
        raise ValueError(f"unknown boundary kind {which!r}, expected {BOUNDARY_KINDS}")
    eps_vals = spec.eps_values()
    sig_vals = spec.sigma1_values()
    points: list[tuple[float, float]] = []

    if which == "criticality":
        gd = spec.g * spec.delta

        def f(eps):
            return eps * eps - gd

        col = [f(float(e)) for e in eps_vals]
        for s in sig_vals:
            sigma1 = float(s)
            for i in range(len(eps_vals) - 1):
                if col[i] == 0.0:
                    points.append((float(eps_vals[i]), sigma1))
                elif col[i] * col[i + 1] < 0.0:
                    root = _refine(f, float(eps_vals[i]), float(eps_vals[i + 1]), col[i])
                    points.append((root, sigma1))
            if col[-1] == 0.0:
                points.append((float(eps_vals[-1]), sigma1))
        return points

    if which == "meansquare":
        roots = [max(symmetric_cubic_root(spec.g, spec.delta, float(s)), 0.0)
                 for s in sig_vals]

        def make_f(eps):
            def f(sigma1):
                return -2.0 * eps + max(
                    symmetric_cubic_root(spec.g, spec.delta, sigma1), 0.0)
            return f

        for e in eps_vals:
            eps = float(e)
            f = make_f(eps)
            col = [-2.0 * eps + t for t in roots]
            points.extend(_column_crossings(f, eps, sig_vals, col))
        return points

    lam = _lambda_evaluator(spec)
    # profile of lambda + eps over the sigma1 grid, shared across columns
    profile = []
    for s in sig_vals:
        params = _params_at(spec, float(eps_vals[0]), float(s))
        try:
            term, _, _ = noise_growth_term(params, spec.method)
        except NonConvergenceError:
            term, _, _ = noise_growth_term(params, "quadrature")
        profile.append(term)
    for e in eps_vals:
        eps = float(e)

        def f(sigma1, eps=eps):
            return lam(eps, sigma1)

        col = [t - eps for t in profile]
        points.extend(_column_crossings(f, eps, sig_vals, col))
    return points


def _column_crossings(f, eps: float, sig_vals: np.ndarray,
                      col: list[float]) -> list[tuple[float, float]]:
    out = []
    for i in range(len(sig_vals) - 1):
        if col[i] == 0.0:
            out.append((eps, float(sig_vals[i])))
        elif col[i] * col[i + 1] < 0.0:
            root = _refine(f, float(sig_vals[i]), float(sig_vals[i + 1]), col[i])
            out.append((eps, root))
    if col[-1] == 0.0:
        out.append((eps, float(sig_vals[-1])))
    return out
