import math

import numpy as np
import pytest

from dynamostab.model import FieldState, LinearSystem, ModelParams, linearize
from dynamostab.sde import (
    DIVERGENCE_LIMIT,
    AngularDensity,
    NormalStream,
    RngSpec,
    SimConfig,
    angular_density,
    diverged,
    em_step_linear,
    em_step_nonlinear,
    mc_lyapunov,
    mc_second_moment,
    path_increments,
)

PARAMS = ModelParams(g=0.99, delta=0.01, eps=0.1, sigma1=0.05)
DET_PARAMS = ModelParams(g=0.99, delta=0.01, eps=0.05, sigma1=0.0)
DET_RATE = -0.05 + math.sqrt(0.99 * 0.01)


class TestNormalStream:
    def test_bitwise_reproducible(self):
        a = NormalStream(RngSpec(seed=7, stream=3)).take(1000)
        b = NormalStream(RngSpec(seed=7, stream=3)).take(1000)
        assert np.array_equal(a, b)

    def test_chunking_invariance(self):
        whole = NormalStream(RngSpec(seed=5)).take(1001)
        s = NormalStream(RngSpec(seed=5))
        parts = np.concatenate([s.take(1), s.take(500), s.take(3), s.take(497)])
        assert np.array_equal(whole, parts)

    def test_streams_differ(self):
        a = NormalStream(RngSpec(seed=7, stream=0)).take(100)
        b = NormalStream(RngSpec(seed=7, stream=1)).take(100)
        assert not np.array_equal(a, b)

    def test_moments_sane(self):
        z = NormalStream(RngSpec(seed=123)).take(200_000)
        assert abs(float(np.mean(z))) < 0.01
        assert abs(float(np.std(z)) - 1.0) < 0.01

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            RngSpec(seed=1, algorithm="mt19937")
        with pytest.raises(ValueError):
            RngSpec(seed=1.5)  # type: ignore[arg-type]

    def test_path_increments_scale(self):
        dw = path_increments(RngSpec(seed=9), 0, 10_000, 4e-3)
        assert abs(float(np.std(dw)) - math.sqrt(4e-3)) < 0.002


class TestSteppers:
    def test_linear_origin_fixed(self):
        sys = linearize(PARAMS)
        out = em_step_linear(np.zeros(2), sys, 1e-3, 0.37)
        assert np.all(out == 0.0)

    def test_linear_deterministic_euler(self):
        sys = linearize(PARAMS)
        x = np.array([1.0, 2.0])
        out = em_step_linear(x, sys, 1e-3, 0.0)
        assert np.allclose(out, x + (sys.drift @ x) * 1e-3, atol=0.0)

    def test_milstein_correction_vanishes(self):
        sys = linearize(PARAMS)
        rng = np.random.default_rng(0)
        for _ in range(20):
            x = rng.normal(size=2)
            corr = 0.5 * sys.diffusion @ (sys.diffusion @ x)
            assert np.all(corr == 0.0)

    def test_nonlinear_origin_fixed(self):
        out = em_step_nonlinear(FieldState(0.0, 0.0), PARAMS, 1e-3, 0.5)
        assert out == FieldState(0.0, 0.0)

    def test_nonlinear_equilibrium_drift_step(self):
        # five-digit rounding of a computed steady state; sigma1 = 0
        p = ModelParams(g=0.99, delta=0.01, eps=0.1, sigma1=0.0)
        state = FieldState(-0.010153, 0.10155)
        out = em_step_nonlinear(state, p, 1e-3, 0.0)
        step = math.hypot(out.b_r - state.b_r, out.b_phi - state.b_phi)
        assert step < 1e-4 * 1e-3

    def test_nonlinear_hand_composed_step(self):
        p = ModelParams(g=1.0, delta=0.05, eps=0.05, sigma1=0.02)
        state = FieldState(0.1, 0.1)
        dt, dw = 1e-3, 0.02
        u = 0.01
        phi_a = 1.0 / (1.0 + u)
        phi_b = (1.0 + u) / (1.0 + 2.0 * u)
        f1 = (-(0.05 * phi_a * 0.1 + 0.05 * phi_b * 0.1),
              -(1.0 * 0.1 + 0.05 * phi_b * 0.1))
        f2 = (-math.sqrt(0.04) * phi_a * 0.1, 0.0)
        out = em_step_nonlinear(state, p, dt, dw)
        assert out.b_r == pytest.approx(0.1 + f1[0] * dt + f2[0] * dw, rel=1e-14)
        assert out.b_phi == pytest.approx(0.1 + f1[1] * dt + f2[1] * dw, rel=1e-14)

    def test_divergence_flag(self):
        assert not diverged(FieldState(1.0, -1.0))
        assert diverged(FieldState(2.0 * DIVERGENCE_LIMIT, 0.0))
        assert diverged(FieldState(0.0, -2.0 * DIVERGENCE_LIMIT))

    def test_rejects_bad_dt(self):
        with pytest.raises(ValueError):
            em_step_linear(np.ones(2), linearize(PARAMS), 0.0, 0.1)
        with pytest.raises(ValueError):
            em_step_nonlinear(FieldState(1.0, 1.0), PARAMS, -1e-3, 0.1)


def _python_reference_path(x0, sys, dt, dw, renorm_every):
    """Plain-Python transcription of the compiled kernel (same scalar
    operation order, so results must agree bit for bit), also reporting
    the extreme log-norms reached between renormalizations."""
    a11, a12 = float(sys.drift[0, 0]), float(sys.drift[0, 1])
    a21, a22 = float(sys.drift[1, 0]), float(sys.drift[1, 1])
    s11, s12 = float(sys.diffusion[0, 0]), float(sys.diffusion[0, 1])
    s21, s22 = float(sys.diffusion[1, 0]), float(sys.diffusion[1, 1])
    x1, x2 = x0.b_r, x0.b_phi
    log_acc = 0.0
    phase = 0
    log_extremes = []
    for w in dw:
        w = float(w)
        y1 = x1 + (a11 * x1 + a12 * x2) * dt + (s11 * x1 + s12 * x2) * w
        y2 = x2 + (a21 * x1 + a22 * x2) * dt + (s21 * x1 + s22 * x2) * w
        x1, x2 = y1, y2
        phase += 1
        log_extremes.append(0.5 * math.log(x1 * x1 + x2 * x2))
        if phase == renorm_every:
            nrm = math.sqrt(x1 * x1 + x2 * x2)
            log_acc += math.log(nrm)
            x1 /= nrm
            x2 /= nrm
            phase = 0
    return log_acc + 0.5 * math.log(x1 * x1 + x2 * x2), log_extremes


class TestKernel:
    def test_matches_python_reference_bitwise(self):
        from dynamostab.sde import _em_path_log, _unpack
        sys = linearize(PARAMS)
        cfg = SimConfig(dt=1e-3, t_final=5.0, n_paths=1, renorm_every=250)
        dw = path_increments(RngSpec(seed=21), 0, cfg.n_steps, cfg.dt)
        chk = np.empty(cfg.n_steps // cfg.renorm_every)
        got = _em_path_log(1.0, 0.0, *_unpack(sys), cfg.dt, dw, cfg.renorm_every, chk)
        ref, _ = _python_reference_path(FieldState(1.0, 0.0), sys, cfg.dt, dw, 250)
        assert got == ref

    def test_renormalized_norm_stays_bounded(self):
        # per-step growth factor bound, accumulated over one renorm window
        sys = linearize(PARAMS)
        dt, renorm_every = 1e-3, 1000
        dw = path_increments(RngSpec(seed=22), 0, 20_000, dt)
        _, log_extremes = _python_reference_path(
            FieldState(1.0, 0.0), sys, dt, dw, renorm_every)
        drift_norm = float(np.linalg.norm(sys.drift, 2))
        diff_norm = float(np.linalg.norm(sys.diffusion, 2))
        step_bound = drift_norm * dt + diff_norm * float(np.max(np.abs(dw)))
        k = renorm_every * step_bound
        assert max(log_extremes) <= k
        assert min(log_extremes) >= -2.0 * k  # 1 - x >= exp(-2x) on [0, 1/2]


class TestMcLyapunov:
    def test_deterministic_limit(self):
        cfg = SimConfig(dt=1e-3, t_final=200.0, n_paths=2, renorm_every=1000)
        est = mc_lyapunov(linearize(DET_PARAMS), cfg, RngSpec(seed=1))
        assert abs(est.value - DET_RATE) < 10.0 * cfg.dt

    def test_reproducible(self):
        cfg = SimConfig(dt=1e-3, t_final=50.0, n_paths=4, renorm_every=500)
        sys = linearize(PARAMS)
        a = mc_lyapunov(sys, cfg, RngSpec(seed=3))
        b = mc_lyapunov(sys, cfg, RngSpec(seed=3))
        assert a == b

    def test_worker_count_invariance(self):
        cfg = SimConfig(dt=1e-3, t_final=50.0, n_paths=4, renorm_every=500)
        sys = linearize(PARAMS)
        serial = mc_lyapunov(sys, cfg, RngSpec(seed=3), workers=1)
        parallel = mc_lyapunov(sys, cfg, RngSpec(seed=3), workers=3)
        assert serial == parallel

    def test_initial_state_independence(self):
        sys = linearize(PARAMS)
        base = SimConfig(dt=1e-3, t_final=200.0, n_paths=8, renorm_every=1000)
        other = SimConfig(dt=1e-3, t_final=200.0, n_paths=8, renorm_every=1000,
                          x0=FieldState(-0.3, 2.0))
        a = mc_lyapunov(sys, base, RngSpec(seed=17))
        b = mc_lyapunov(sys, other, RngSpec(seed=17))
        assert abs(a.value - b.value) < 3.0 * (a.std_error + b.std_error)

    def test_step_halving_consistency(self):
        sys = linearize(PARAMS)
        coarse = SimConfig(dt=2e-3, t_final=200.0, n_paths=8, renorm_every=500)
        fine = SimConfig(dt=1e-3, t_final=200.0, n_paths=8, renorm_every=1000)
        a = mc_lyapunov(sys, coarse, RngSpec(seed=29))
        b = mc_lyapunov(sys, fine, RngSpec(seed=29))
        assert abs(a.value - b.value) < 3.0 * (a.std_error + b.std_error)

    def test_rejects_zero_initial_state(self):
        cfg = SimConfig(dt=1e-3, t_final=10.0, x0=FieldState(0.0, 0.0))
        with pytest.raises(ValueError):
            mc_lyapunov(linearize(PARAMS), cfg, RngSpec(seed=1))

    def test_single_path_has_no_spread_estimate(self):
        cfg = SimConfig(dt=1e-3, t_final=10.0, n_paths=1, renorm_every=100)
        est = mc_lyapunov(linearize(PARAMS), cfg, RngSpec(seed=1))
        assert math.isfinite(est.value)
        assert est.std_error == math.inf


class TestMcSecondMoment:
    def test_deterministic_limit_doubles_rate(self):
        cfg = SimConfig(dt=1e-3, t_final=200.0, n_paths=2, renorm_every=1000)
        est = mc_second_moment(linearize(DET_PARAMS), cfg, RngSpec(seed=1))
        assert abs(est.value - 2.0 * DET_RATE) < 10.0 * cfg.dt

    def test_sign_matches_abscissa(self):
        # moderate horizon, large ensemble: the regime where the naive
        # cross-path mean tracks the true second moment
        eps = 0.15
        sigma_star = 2 * eps * (eps ** 2 - 0.99 * 0.01) / 0.99 ** 2
        cfg = SimConfig(dt=1e-3, t_final=25.0, n_paths=2048, renorm_every=1000)
        stable = ModelParams(g=0.99, delta=0.01, eps=eps, sigma1=sigma_star / 2)
        unstable = ModelParams(g=0.99, delta=0.01, eps=eps, sigma1=2 * sigma_star)
        r_stable = mc_second_moment(linearize(stable), cfg, RngSpec(seed=31))
        r_unstable = mc_second_moment(linearize(unstable), cfg, RngSpec(seed=31))
        assert r_stable.value < 0.0
        assert r_unstable.value > 0.0

    def test_requires_enough_checkpoints(self):
        cfg = SimConfig(dt=1e-3, t_final=1.0, n_paths=2, renorm_every=1000)
        with pytest.raises(ValueError):
            mc_second_moment(linearize(PARAMS), cfg, RngSpec(seed=1))


def _two_sample_bound(h1: AngularDensity, h2: AngularDensity, dt: float,
                      mixing_time: float = 1.0, confidence: float = 6.0) -> float:
    """CLT scale for the sup-distance of two occupation histograms whose
    samples decorrelate on the mixing timescale."""
    n_eff1 = h1.n_samples * dt / mixing_time
    n_eff2 = h2.n_samples * dt / mixing_time
    p_hat = np.maximum(h1.density, h2.density) * h1.bin_width
    se = np.sqrt(p_hat * (1.0 - p_hat) * (1.0 / n_eff1 + 1.0 / n_eff2))
    return confidence * float(np.max(se)) / h1.bin_width


class TestAngularDensity:
    CFG = SimConfig(dt=1e-3, t_final=200.0, n_paths=4, renorm_every=1000)

    def test_normalization(self):
        h = angular_density(linearize(PARAMS), self.CFG, RngSpec(seed=41), bins=64)
        assert h.integral() == pytest.approx(1.0, abs=1e-12)
        assert len(h.edges) == 65
        assert h.edges[0] == pytest.approx(-math.pi / 2)
        assert h.edges[-1] == pytest.approx(math.pi / 2)

    def test_two_seed_consistency(self):
        sys = linearize(PARAMS)
        h1 = angular_density(sys, self.CFG, RngSpec(seed=101), bins=64)
        h2 = angular_density(sys, self.CFG, RngSpec(seed=909), bins=64)
        sup = float(np.max(np.abs(h1.density - h2.density)))
        assert sup < _two_sample_bound(h1, h2, self.CFG.dt)

    def test_burn_in_insensitivity(self):
        sys = linearize(PARAMS)
        h1 = angular_density(sys, self.CFG, RngSpec(seed=42), bins=64,
                             burn_fraction=0.1)
        h2 = angular_density(sys, self.CFG, RngSpec(seed=42), bins=64,
                             burn_fraction=0.2)
        sup = float(np.max(np.abs(h1.density - h2.density)))
        assert sup < _two_sample_bound(h1, h2, self.CFG.dt)

    def test_horizon_refinement(self):
        sys = linearize(PARAMS)
        long_cfg = SimConfig(dt=1e-3, t_final=400.0, n_paths=4, renorm_every=1000)
        h1 = angular_density(sys, self.CFG, RngSpec(seed=43), bins=64)
        h2 = angular_density(sys, long_cfg, RngSpec(seed=430), bins=64)
        sup = float(np.max(np.abs(h1.density - h2.density)))
        assert sup < _two_sample_bound(h1, h2, self.CFG.dt)

    def test_validation(self):
        sys = linearize(PARAMS)
        with pytest.raises(ValueError):
            angular_density(sys, self.CFG, RngSpec(seed=1), bins=8)
        with pytest.raises(ValueError):
            angular_density(linearize(DET_PARAMS), self.CFG, RngSpec(seed=1))
        bad = SimConfig(dt=1e-3, t_final=10.0, x0=FieldState(0.0, 0.0))
        with pytest.raises(ValueError):
            angular_density(sys, bad, RngSpec(seed=1))


class TestSimConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            SimConfig(dt=0.0)
        with pytest.raises(ValueError):
            SimConfig(dt=1e-3, t_final=0.05)
        with pytest.raises(ValueError):
            SimConfig(n_paths=0)
        with pytest.raises(ValueError):
            SimConfig(renorm_every=0)

    def test_n_steps(self):
        assert SimConfig(dt=1e-3, t_final=2.0).n_steps == 2000
