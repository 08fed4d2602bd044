"""Steady states of the noise-free dynamo flow.

Finds every equilibrium at the reference parameter set, verifies the
drift residuals, and shows why multiplicative noise removes the nonzero
states: the noise coefficient is proportional to phi_a(b_phi) * b_phi,
and phi_a never vanishes.
"""

import numpy as np

from dynamostab import (
    FieldState,
    ModelParams,
    diffusion_nonlinear,
    drift_nonlinear,
    find_equilibria,
    quenching,
)

params = ModelParams(g=0.99, delta=0.01, eps=0.1, k_alpha=1.0, k_beta=1.0)

print("quenching factors along the azimuthal axis:")
for b_phi in (0.0, 0.5, 1.0, 2.0):
    phi_a, phi_b = quenching(b_phi, params)
    print(f"  b_phi = {b_phi:4.1f}:  phi_a = {phi_a:.6f}  phi_b = {phi_b:.6f}")

print("\nsteady states of the noise-free flow (sorted by b_phi):")
print(f"  {'b_r':>14}  {'b_phi':>14}  {'drift residual':>14}")
for eq in find_equilibria(params):
    print(f"  {eq.state.b_r:14.10f}  {eq.state.b_phi:14.10f}  {eq.residual:14.3e}")

noisy = ModelParams(g=0.99, delta=0.01, eps=0.1, sigma1=0.02)
print("\nwith sigma1 = 0.02 the same states feel the noise channel:")
for eq in find_equilibria(params):
    diff = diffusion_nonlinear(eq.state, noisy)
    drift = drift_nonlinear(eq.state, noisy)
    tag = "equilibrium of the full SDE" if np.all(diff == 0.0) else \
        "drift zero but noise active: not an equilibrium of the SDE"
    print(f"  b_phi = {eq.state.b_phi:+1.4f}: |f2| = {abs(diff[0]):.4f}  ({tag})")

state = FieldState(0.05, -0.4)
print(f"\ndrift at a generic state {state}: {drift_nonlinear(state, params)}")
