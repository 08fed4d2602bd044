import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from dynamostab.model import (
    EQUILIBRIUM_RESIDUAL_TOL,
    FieldState,
    ModelParams,
    departure_from_normality,
    diffusion_nonlinear,
    drift_nonlinear,
    find_equilibria,
    linearize,
    quenching,
)

EXAMPLE = ModelParams(g=0.99, delta=0.01, eps=0.1, k_alpha=1.0, k_beta=1.0)

# computed equilibria of the noise-free flow at EXAMPLE (50-digit root solve,
# independently confirmed by 2-D Newton on the drift from many starts)
B_PHI_SMALL = 0.10154546800493378
B_R_SMALL = -0.010153489028290203
B_PHI_BIG = 1.2522492546346960
B_R_BIG = -0.078535286978026784


class TestParams:
    def test_valid(self):
        p = ModelParams(g=1.0, delta=0.05, eps=0.05, sigma1=0.1)
        assert p.k_alpha == 1.0 and p.k_beta == 1.0

    @pytest.mark.parametrize("kwargs", [
        dict(g=0.0, delta=0.01, eps=0.1),
        dict(g=-1.0, delta=0.01, eps=0.1),
        dict(g=1.0, delta=-0.01, eps=0.1),
        dict(g=1.0, delta=0.01, eps=-0.1),
        dict(g=1.0, delta=0.01, eps=0.1, sigma1=-1e-9),
        dict(g=1.0, delta=0.01, eps=0.1, k_alpha=0.0),
        dict(g=1.0, delta=0.01, eps=0.1, k_beta=-2.0),
        dict(g=math.nan, delta=0.01, eps=0.1),
    ])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            ModelParams(**kwargs)

    def test_boundary_zero_delta_eps_allowed(self):
        ModelParams(g=1.0, delta=0.0, eps=0.1)
        ModelParams(g=1.0, delta=0.01, eps=0.0)

    def test_field_state_finite(self):
        with pytest.raises(ValueError):
            FieldState(math.inf, 0.0)


class TestQuenching:
    def test_zero_field(self):
        assert quenching(0.0, EXAMPLE) == (1.0, 1.0)

    def test_unit_field(self):
        phi_a, phi_b = quenching(1.0, EXAMPLE)
        assert phi_a == pytest.approx(0.5, rel=1e-15)
        assert phi_b == pytest.approx(2.0 / 3.0, rel=1e-15)

    def test_five_digit_equilibrium_has_small_residual(self):
        # at the large-family steady state rounded to 5 significant digits
        state = FieldState(round(B_R_BIG, 6), round(B_PHI_BIG, 4))
        assert np.max(np.abs(drift_nonlinear(state, EXAMPLE))) < 1e-4

    @given(st.floats(min_value=-1e8, max_value=1e8),
           st.floats(min_value=0.1, max_value=10.0),
           st.floats(min_value=0.1, max_value=10.0))
    def test_strict_positivity(self, b_phi, k_alpha, k_beta):
        p = ModelParams(g=1.0, delta=0.01, eps=0.1, k_alpha=k_alpha, k_beta=k_beta)
        phi_a, phi_b = quenching(b_phi, p)
        assert phi_a > 0.0
        assert phi_b > 0.0
        assert phi_a <= 1.0
        assert phi_b <= 1.0

    def test_quadratic_departure_near_zero(self):
        for k_alpha, k_beta in [(1.0, 1.0), (0.5, 2.0), (3.0, 0.3)]:
            p = ModelParams(g=1.0, delta=0.01, eps=0.1, k_alpha=k_alpha, k_beta=k_beta)
            bound = max(k_alpha, k_beta + 2.0)
            for x in np.linspace(-0.1, 0.1, 41):
                phi_a, phi_b = quenching(float(x), p)
                assert abs(phi_a - 1.0) <= bound * x * x + 1e-15
                assert abs(phi_b - 1.0) <= bound * x * x + 1e-15


class TestDrift:
    def test_origin(self):
        assert np.all(drift_nonlinear(FieldState(0.0, 0.0), EXAMPLE) == 0.0)

    def test_hand_evaluated_point(self):
        # independent transcription of the two components at (1, 1)
        p = ModelParams(g=1.0, delta=0.05, eps=0.05, k_alpha=1.0, k_beta=1.0)
        phi_a = 1.0 / 2.0
        phi_b = 2.0 / 3.0
        expected = np.array([
            -(0.05 * phi_a * 1.0 + 0.05 * phi_b * 1.0),
            -(1.0 * 1.0 + 0.05 * phi_b * 1.0),
        ])
        got = drift_nonlinear(FieldState(1.0, 1.0), p)
        assert np.allclose(got, expected, rtol=1e-15, atol=0.0)

    def test_small_family_five_digit_residual(self):
        state = FieldState(round(B_R_SMALL, 6), round(B_PHI_SMALL, 6))
        assert np.max(np.abs(drift_nonlinear(state, EXAMPLE))) < 1e-4


class TestDiffusion:
    def test_vanishes_on_axis(self):
        p = ModelParams(g=0.99, delta=0.01, eps=0.1, sigma1=0.3)
        for b_r in (-2.0, 0.0, 5.0):
            assert np.all(diffusion_nonlinear(FieldState(b_r, 0.0), p) == 0.0)

    def test_vanishes_without_noise(self):
        for state in (FieldState(1.0, 1.0), FieldState(-0.3, 2.0)):
            assert np.all(diffusion_nonlinear(state, EXAMPLE) == 0.0)

    def test_direct_substitution(self):
        p = ModelParams(g=0.99, delta=0.01, eps=0.1, sigma1=0.5, k_alpha=1.0)
        got = diffusion_nonlinear(FieldState(0.0, 1.0), p)
        assert got[0] == pytest.approx(-0.5, rel=1e-15)
        assert got[1] == 0.0


def _brute_force_positive_roots(params, u_max=1e6):
    """Sign-scan plus bisection of the equilibrium cubic in u = b_phi^2."""
    e2 = params.eps ** 2
    dg = params.delta * params.g
    kb1 = params.k_beta + 1.0

    def f(u):
        return e2 * (1.0 + params.k_alpha * u) * (1.0 + u) ** 2 - dg * (1.0 + kb1 * u) ** 2

    # log-spaced scan catches roots spread over many scales
    grid = np.concatenate([[0.0], np.geomspace(1e-12, u_max, 4000)])
    roots = []
    for a, b in zip(grid[:-1], grid[1:]):
        fa, fb = f(a), f(b)
        if fa == 0.0:
            roots.append(a)
        if fa * fb < 0.0:
            lo, hi = a, b
            for _ in range(200):
                mid = 0.5 * (lo + hi)
                if f(mid) == 0.0:
                    lo = hi = mid
                    break
                if (f(mid) < 0.0) == (fa < 0.0):
                    lo = mid
                else:
                    hi = mid
            roots.append(0.5 * (lo + hi))
    return sorted(r for r in roots if r > 0.0)


class TestEquilibria:
    def test_example_parameter_set(self):
        eqs = find_equilibria(EXAMPLE)
        assert len(eqs) == 5
        b_phis = [e.state.b_phi for e in eqs]
        assert b_phis == sorted(b_phis)
        assert any(e.state.b_r == 0.0 and e.state.b_phi == 0.0 for e in eqs)
        expected = {
            (0.0, 0.0),
            (B_R_SMALL, B_PHI_SMALL), (-B_R_SMALL, -B_PHI_SMALL),
            (B_R_BIG, B_PHI_BIG), (-B_R_BIG, -B_PHI_BIG),
        }
        for e in eqs:
            match = min(expected, key=lambda t: abs(t[1] - e.state.b_phi))
            assert e.state.b_r == pytest.approx(match[0], abs=1e-14)
            assert e.state.b_phi == pytest.approx(match[1], abs=1e-14)
            assert e.residual < EQUILIBRIUM_RESIDUAL_TOL

    def test_zero_eps(self):
        eqs = find_equilibria(ModelParams(g=0.99, delta=0.01, eps=0.0))
        assert len(eqs) == 1
        assert eqs[0].state == FieldState(0.0, 0.0)

    def test_zero_delta(self):
        eqs = find_equilibria(ModelParams(g=0.99, delta=0.0, eps=0.1))
        assert len(eqs) == 1

    def test_against_brute_force_oracle(self):
        p = ModelParams(g=1.0, delta=0.05, eps=0.05, k_alpha=1.0, k_beta=1.0)
        expected_u = _brute_force_positive_roots(p)
        eqs = find_equilibria(p)
        got_u = sorted(e.state.b_phi ** 2 for e in eqs if e.state.b_phi > 0.0)
        assert len(got_u) == len(expected_u)
        for a, b in zip(got_u, expected_u):
            assert a == pytest.approx(b, rel=1e-9)

    def test_residual_invariant_across_parameters(self):
        rng = np.random.default_rng(7)
        for _ in range(25):
            p = ModelParams(
                g=float(rng.uniform(0.3, 2.0)),
                delta=float(rng.uniform(0.001, 0.2)),
                eps=float(rng.uniform(0.001, 0.3)),
                k_alpha=float(rng.uniform(0.3, 3.0)),
                k_beta=float(rng.uniform(0.3, 3.0)),
            )
            for e in find_equilibria(p):
                assert e.residual < EQUILIBRIUM_RESIDUAL_TOL

    def test_mirrored_pairs(self):
        eqs = find_equilibria(EXAMPLE)
        nonzero = [e.state for e in eqs if e.state.b_phi != 0.0]
        for s in nonzero:
            assert any(
                t.b_r == -s.b_r and t.b_phi == -s.b_phi for t in nonzero
            )


class TestLinearize:
    def test_direct_substitution(self):
        sys = linearize(ModelParams(g=0.99, delta=0.01, eps=0.1, sigma1=0.02))
        assert np.allclose(sys.drift, [[-0.1, -0.01], [-0.99, -0.1]], atol=0.0)
        assert sys.diffusion[0, 1] == pytest.approx(-0.2, rel=1e-15)
        assert sys.diffusion[0, 0] == sys.diffusion[1, 0] == sys.diffusion[1, 1] == 0.0

    def test_zero_noise(self):
        sys = linearize(ModelParams(g=0.99, delta=0.01, eps=0.1, sigma1=0.0))
        assert np.all(sys.diffusion == 0.0)

    def test_nilpotency(self):
        for sigma1 in (0.0, 0.02, 1.7):
            sys = linearize(ModelParams(g=0.5, delta=0.03, eps=0.2, sigma1=sigma1))
            assert np.all(sys.diffusion @ sys.diffusion == 0.0)


class TestDepartureFromNormality:
    def test_figure_values(self):
        for delta, expected in [(0.04, 0.95), (0.03, 0.96), (0.02, 0.97), (0.01, 0.98)]:
            drift = linearize(ModelParams(g=0.99, delta=delta, eps=0.1)).drift
            assert departure_from_normality(drift) == pytest.approx(expected, abs=1e-12)

    def test_normal_matrix(self):
        drift = linearize(ModelParams(g=0.5, delta=0.5, eps=0.3)).drift
        assert departure_from_normality(drift) == 0.0

    def test_grid_matches_gap(self):
        vals = np.linspace(0.01, 2.0, 8)
        for g in vals:
            for delta in vals:
                for eps in vals[::3]:
                    drift = linearize(ModelParams(g=float(g), delta=float(delta),
                                                  eps=float(eps))).drift
                    assert departure_from_normality(drift) == pytest.approx(
                        abs(g - delta), abs=1e-12)

    def test_complex_eigenvalue_case_vs_numpy(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            m = rng.normal(size=(2, 2))
            sv = np.linalg.svd(m, compute_uv=False)
            ev = np.linalg.eigvals(m)
            ref = math.sqrt(max(float(np.sum(sv ** 2) - np.sum(np.abs(ev) ** 2)), 0.0))
            assert departure_from_normality(m) == pytest.approx(ref, abs=1e-10)

    def test_shape_guard(self):
        with pytest.raises(ValueError):
            departure_from_normality(np.eye(3))
