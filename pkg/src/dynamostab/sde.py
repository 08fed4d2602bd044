"""Monte Carlo integration of the linear and nonlinear field equations.

Randomness comes from counter-based Philox-4x64 streams keyed by
(seed, stream), so any path can be regenerated in isolation and results
do not depend on how paths are distributed over workers.  Raw 64-bit
words become normals through a fixed transform that is part of the
reproducibility contract:

    u = ((word >> 11) + 0.5) * 2**-53          (open-interval uniforms)
    z0 = sqrt(-2 ln u1) cos(2 pi u2)           (Box-Muller, cosine first)
    z1 = sqrt(-2 ln u1) sin(2 pi u2)

Identical (algorithm, seed, stream) therefore give bit-identical variates
on every platform.  Path integration is Euler-Maruyama; because the
linearized diffusion matrix is nilpotent of degree 2 the Milstein
correction vanishes identically, so the scheme is also Milstein-exact for
the linear system.  The Lyapunov accumulator renormalizes the state to
unit length at a fixed cadence, which bounds the working norm without
touching the accumulated growth statistics.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from numba import njit
from numpy.random import Philox

from .model import FieldState, LinearSystem, ModelParams, diffusion_nonlinear, drift_nonlinear

DIVERGENCE_LIMIT = 1e150

_MASK64 = (1 << 64) - 1
_TWO_NEG53 = 2.0 ** -53


@dataclass(frozen=True)
class RngSpec:
    """Identity of one reproducible random stream."""

    seed: int
    stream: int = 0
    algorithm: str = "philox4x64"

    def __post_init__(self):
        if self.algorithm != "philox4x64":
            raise ValueError(f"unsupported generator {self.algorithm!r}")
        if not isinstance(self.seed, int) or not isinstance(self.stream, int):
            raise ValueError("seed and stream must be integers")


@dataclass(frozen=True)
class SimConfig:
    """Discretization and ensemble settings for path simulation."""

    dt: float = 1e-3
    t_final: float = 2000.0
    n_paths: int = 32
    renorm_every: int = 1000
    x0: FieldState = FieldState(1.0, 0.0)

    def __post_init__(self):
        if not (self.dt > 0.0 and math.isfinite(self.dt)):
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_final < 100.0 * self.dt:
            raise ValueError(
                f"t_final={self.t_final} is below 100*dt={100.0 * self.dt}"
            )
        if self.n_paths < 1:
            raise ValueError(f"n_paths must be >= 1, got {self.n_paths}")
        if self.renorm_every < 1:
            raise ValueError(f"renorm_every must be >= 1, got {self.renorm_every}")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_final / self.dt))


@dataclass(frozen=True)
class McEstimate:
    value: float
    std_error: float
    n_samples: int


@dataclass(frozen=True)
class AngularDensity:
    """Normalized occupation histogram of the projective angle on
    [-pi/2, pi/2); sum(density) * bin width equals 1."""

    edges: np.ndarray
    density: np.ndarray
    n_samples: int

    @property
    def bin_width(self) -> float:
        return math.pi / len(self.density)

    def integral(self) -> float:
        return float(np.sum(self.density) * self.bin_width)


class NormalStream:
    """Stateful normal-variate source for one (seed, stream) identity.

    Chunk boundaries in ``take`` do not affect the sequence; a leftover
    Box-Muller partner is carried to the next call.
    """

    def __init__(self, spec: RngSpec):
        key = np.array([spec.seed & _MASK64, spec.stream & _MASK64], dtype=np.uint64)
        self._bits = Philox(key=key)
        self._carry: float | None = None

    def take(self, n: int) -> np.ndarray:
        if n < 0:
            raise ValueError("cannot take a negative count")
        out = np.empty(n, dtype=np.float64)
        pos = 0
        if self._carry is not None and n > 0:
            out[0] = self._carry
            self._carry = None
            pos = 1
        need = n - pos
        if need > 0:
            n_pairs = (need + 1) // 2
            raw = self._bits.random_raw(2 * n_pairs)
            u = ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * _TWO_NEG53
            radius = np.sqrt(-2.0 * np.log(u[0::2]))
            angle = (2.0 * math.pi) * u[1::2]
            z = np.empty(2 * n_pairs, dtype=np.float64)
            z[0::2] = radius * np.cos(angle)
            z[1::2] = radius * np.sin(angle)
            out[pos:] = z[:need]
            if need < 2 * n_pairs:
                self._carry = float(z[need])
        return out


def path_increments(spec: RngSpec, path_index: int, n_steps: int, dt: float) -> np.ndarray:
    """Wiener increments of one path; the path owns substream
    spec.stream + path_index, so the result is independent of scheduling."""
    stream = NormalStream(RngSpec(spec.seed, spec.stream + path_index, spec.algorithm))
    return stream.take(n_steps) * math.sqrt(dt)


# ---------------------------------------------------------------------------
# steppers
# ---------------------------------------------------------------------------

def em_step_linear(state: np.ndarray, sys: LinearSystem, dt: float, dw: float) -> np.ndarray:
    """One Euler-Maruyama step of the linear system.

    With a degree-2 nilpotent diffusion matrix the Milstein correction
    0.5 S (S x)(dw^2 - dt) is identically zero, so this step is exact to
    Milstein order for systems produced by ``linearize``.
    """
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    x = np.asarray(state, dtype=np.float64)
    return x + (sys.drift @ x) * dt + (sys.diffusion @ x) * dw


def em_step_nonlinear(state: FieldState, params: ModelParams, dt: float, dw: float) -> FieldState:
    """One Euler-Maruyama step of the full nonlinear system."""
    if dt <= 0.0:
        raise ValueError(f"dt must be positive, got {dt}")
    drift = drift_nonlinear(state, params)
    diff = diffusion_nonlinear(state, params)
    return FieldState(
        state.b_r + drift[0] * dt + diff[0] * dw,
        state.b_phi + drift[1] * dt + diff[1] * dw,
    )


def diverged(state: FieldState) -> bool:
    """Instability flag for nonlinear paths; a diverged path is a measured
    outcome, not a failure."""
    return abs(state.b_r) > DIVERGENCE_LIMIT or abs(state.b_phi) > DIVERGENCE_LIMIT


# ---------------------------------------------------------------------------
# compiled path kernels
# ---------------------------------------------------------------------------

@njit(cache=True)
def _em_path_log(x1, x2, a11, a12, a21, a22, s11, s12, s21, s22,
                 dt, dw, renorm_every, checkpoints):
    """Integrate one linear path, renormalizing every renorm_every steps.

    Writes the cumulative log-norm at each renormalization into
    ``checkpoints`` and returns the cumulative log-norm at the final step.
    """
    log_acc = 0.0
    phase = 0
    idx = 0
    for i in range(dw.shape[0]):
        w = dw[i]
        y1 = x1 + (a11 * x1 + a12 * x2) * dt + (s11 * x1 + s12 * x2) * w
        y2 = x2 + (a21 * x1 + a22 * x2) * dt + (s21 * x1 + s22 * x2) * w
        x1 = y1
        x2 = y2
        phase += 1
        if phase == renorm_every:
            nrm = math.sqrt(x1 * x1 + x2 * x2)
            log_acc += math.log(nrm)
            x1 /= nrm
            x2 /= nrm
            phase = 0
            checkpoints[idx] = log_acc
            idx += 1
    return log_acc + 0.5 * math.log(x1 * x1 + x2 * x2)


@njit(cache=True)
def _em_path_angles(x1, x2, a11, a12, a21, a22, s11, s12, s21, s22,
                    dt, dw, renorm_every, burn, counts):
    """Integrate one linear path and histogram the projective angle
    atan2(x2, x1) mod pi into [-pi/2, pi/2) after the burn-in step."""
    half_pi = 0.5 * math.pi
    nbins = counts.shape[0]
    width = math.pi / nbins
    phase = 0
    for i in range(dw.shape[0]):
        w = dw[i]
        y1 = x1 + (a11 * x1 + a12 * x2) * dt + (s11 * x1 + s12 * x2) * w
        y2 = x2 + (a21 * x1 + a22 * x2) * dt + (s21 * x1 + s22 * x2) * w
        x1 = y1
        x2 = y2
        phase += 1
        if phase == renorm_every:
            nrm = math.sqrt(x1 * x1 + x2 * x2)
            x1 /= nrm
            x2 /= nrm
            phase = 0
        if i >= burn:
            ang = math.atan2(x2, x1)
            if ang < -half_pi:
                ang += math.pi
            elif ang >= half_pi:
                ang -= math.pi
            k = int((ang + half_pi) / width)
            if k < 0:
                k = 0
            elif k >= nbins:
                k = nbins - 1
            counts[k] += 1


def _unpack(sys: LinearSystem):
    a = sys.drift
    s = sys.diffusion
    return (float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]),
            float(s[0, 0]), float(s[0, 1]), float(s[1, 0]), float(s[1, 1]))


def _log_chunk(sys: LinearSystem, cfg: SimConfig, rng: RngSpec,
               p_lo: int, p_hi: int) -> np.ndarray:
    """Cumulative log-norm checkpoints for paths [p_lo, p_hi): shape
    (p_hi - p_lo, n_checkpoints + 1), final column at the end time."""
    n = cfg.n_steps
    n_chk = n // cfg.renorm_every
    coeffs = _unpack(sys)
    out = np.empty((p_hi - p_lo, n_chk + 1))
    for p in range(p_lo, p_hi):
        dw = path_increments(rng, p, n, cfg.dt)
        checkpoints = np.empty(n_chk)
        final = _em_path_log(cfg.x0.b_r, cfg.x0.b_phi, *coeffs,
                             cfg.dt, dw, cfg.renorm_every, checkpoints)
        out[p - p_lo, :n_chk] = checkpoints
        out[p - p_lo, n_chk] = final
    return out


def _path_chunks(n_paths: int, workers: int) -> list[tuple[int, int]]:
    workers = min(max(workers, 1), n_paths)
    bounds = np.linspace(0, n_paths, workers + 1).astype(int)
    return [(int(bounds[i]), int(bounds[i + 1])) for i in range(workers)]


def _run_paths(sys: LinearSystem, cfg: SimConfig, rng: RngSpec,
               workers: int = 1) -> np.ndarray:
    """Per-path log-norm checkpoints, optionally fanned out over worker
    processes.  Each path owns its substream and the rows are reassembled
    in path order, so the result is independent of ``workers``."""
    if workers <= 1:
        return _log_chunk(sys, cfg, rng, 0, cfg.n_paths)
    chunks = _path_chunks(cfg.n_paths, workers)
    with ProcessPoolExecutor(max_workers=len(chunks)) as pool:
        futures = [pool.submit(_log_chunk, sys, cfg, rng, lo, hi)
                   for lo, hi in chunks]
        parts = [f.result() for f in futures]
    return np.vstack(parts)


# ---------------------------------------------------------------------------
# estimators
# ---------------------------------------------------------------------------

def _require_nonzero_x0(cfg: SimConfig):
    if cfg.x0.b_r == 0.0 and cfg.x0.b_phi == 0.0:
        raise ValueError("x0 must be nonzero: the zero state is an equilibrium")


def mc_lyapunov(sys: LinearSystem, cfg: SimConfig, rng: RngSpec,
                workers: int = 1) -> McEstimate:
    """Pathwise growth-rate estimate (1/T) log(|X(T)|/|X(0)|), averaged
    over paths; the a.s. limit does not depend on x0.  Renormalization
    keeps the state norm of each path bounded regardless of the sign of
    the exponent."""
    _require_nonzero_x0(cfg)
    logs = _run_paths(sys, cfg, rng, workers)
    horizon = cfg.n_steps * cfg.dt
    log_x0 = 0.5 * math.log(cfg.x0.b_r ** 2 + cfg.x0.b_phi ** 2)
    estimates = (logs[:, -1] - log_x0) / horizon
    value = float(np.mean(estimates))
    if cfg.n_paths > 1:
        std_error = float(np.std(estimates, ddof=1) / math.sqrt(cfg.n_paths))
    else:
        std_error = math.inf
    return McEstimate(value, std_error, cfg.n_paths)


def mc_second_moment(sys: LinearSystem, cfg: SimConfig, rng: RngSpec,
                     workers: int = 1) -> McEstimate:
    """Exponential growth rate of the ensemble mean squared norm.

    The cross-path mean of |X(t)|^2 is aggregated in log space
    (log-sum-exp over per-path cumulative log-norms, so no overflow) at
    each renormalization checkpoint, and the rate is the least-squares
    slope over the second half of the horizon.  The reported standard
    error is the OLS slope error; checkpoints are serially correlated, so
    treat it as a scale for sign tests rather than a confidence interval.
    """
    _require_nonzero_x0(cfg)
    n_chk = cfg.n_steps // cfg.renorm_every
    if n_chk < 4:
        raise ValueError(
            f"need at least 4 renormalization checkpoints for the fit, got "
            f"{n_chk} (n_steps={cfg.n_steps}, renorm_every={cfg.renorm_every})"
        )
    logs = _run_paths(sys, cfg, rng, workers)[:, :n_chk]
    times = cfg.dt * cfg.renorm_every * np.arange(1, n_chk + 1)
    # log of the ensemble mean of |X|^2 at each checkpoint
    twice = 2.0 * logs
    peak = np.max(twice, axis=0)
    log_mean_sq = peak + np.log(np.mean(np.exp(twice - peak), axis=0))
    half = n_chk // 2
    t = times[half:]
    y = log_mean_sq[half:]
    t_c = t - np.mean(t)
    slope = float(np.dot(t_c, y - np.mean(y)) / np.dot(t_c, t_c))
    resid = y - np.mean(y) - slope * t_c
    dof = max(len(t) - 2, 1)
    std_error = float(math.sqrt(np.dot(resid, resid) / dof / np.dot(t_c, t_c)))
    return McEstimate(slope, std_error, cfg.n_paths)


def angular_density(sys: LinearSystem, cfg: SimConfig, rng: RngSpec,
                    bins: int = 64, burn_fraction: float = 0.1) -> AngularDensity:
    """Empirical stationary density of the projective angle of the linear
    system, from all post-burn-in steps of all paths.

    Requires an actual noise channel (a zero diffusion matrix makes the
    angle dynamics degenerate) and at least 16 bins.
    """
    _require_nonzero_x0(cfg)
    if bins < 16:
        raise ValueError(f"bins must be >= 16, got {bins}")
    if not np.any(sys.diffusion != 0.0):
        raise ValueError("angular density needs sigma1 > 0 (nonzero diffusion)")
    if not (0.0 <= burn_fraction < 1.0):
        raise ValueError(f"burn_fraction must be in [0, 1), got {burn_fraction}")
    n = cfg.n_steps
    burn = int(burn_fraction * n)
    coeffs = _unpack(sys)
    counts = np.zeros(bins, dtype=np.int64)
    for p in range(cfg.n_paths):
        dw = path_increments(rng, p, n, cfg.dt)
        _em_path_angles(cfg.x0.b_r, cfg.x0.b_phi, *coeffs,
                        cfg.dt, dw, cfg.renorm_every, burn, counts)
    total = int(np.sum(counts))
    width = math.pi / bins
    density = counts / (total * width)
    edges = np.linspace(-0.5 * math.pi, 0.5 * math.pi, bins + 1)
    return AngularDensity(edges, density, total)
