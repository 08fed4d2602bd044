"""Exponential mean-square stability and its sharp noise threshold.

In the drift-subcritical regime (eps^2 > g delta) the spectral abscissa
of the second-moment matrix crosses zero exactly at
sigma1 = 2 eps (eps^2 - g delta) / g^2, and the covariance feedback gain
crosses 1 at the same point.
"""

from dynamostab import (
    ModelParams,
    build_stability_matrix,
    criticality_threshold,
    ms_report,
    ms_threshold_sigma,
    spectral_abscissa,
)

g, delta, eps = 0.99, 0.01, 0.15
base = ModelParams(g=g, delta=delta, eps=eps)
sigma_star = ms_threshold_sigma(base)

print(f"criticality boundary: eps = sqrt(g delta) = "
      f"{criticality_threshold(g, delta):.11f}")
print(f"at eps = {eps}: mean-square threshold sigma1* = {sigma_star:.10f}\n")

print(f"  {'sigma1/sigma1*':>14}  {'abscissa':>12}  {'feedback gain':>13}  verdict")
for f in (0.0, 0.25, 0.5, 0.9, 1.0, 1.1, 2.0, 4.0):
    p = ModelParams(g=g, delta=delta, eps=eps, sigma1=f * sigma_star)
    r = ms_report(p)
    verdict = "stable" if r.ms_stable else "unstable"
    print(f"  {f:14.2f}  {r.abscissa:+12.6f}  {r.ryashko_trace:13.6f}  {verdict}")

print("\nsupercritical drift never recovers mean-square stability:")
p_super = ModelParams(g=g, delta=delta, eps=0.05, sigma1=1e-6)
r = ms_report(p_super)
print(f"  eps = 0.05 (supercritical), sigma1 = 1e-6: abscissa = "
      f"{r.abscissa:+.6f}, stable = {r.ms_stable}")

print("\nclosed-form abscissa vs generic eigensolver:")
import numpy as np

for sigma1 in (0.001, 0.01, 0.1):
    m = build_stability_matrix(ModelParams(g=g, delta=delta, eps=eps, sigma1=sigma1))
    closed = spectral_abscissa(m)
    numeric = float(np.max(np.linalg.eigvals(m.s).real))
    print(f"  sigma1 = {sigma1:5.3f}: closed form {closed:+.12f}   "
          f"eigensolver {numeric:+.12f}")
