"""Stability regions in the (eps, sigma1) plane.

Scans a grid at g = 0.99, delta = 0.01 (drift non-normality 0.98),
classifies every point three ways, traces the boundary curves, and writes
both to CSV.  If matplotlib is importable the map is also rendered to
region_map.png; the CSV files feed any external plotting tool otherwise.
"""

import numpy as np

from dynamostab import ScanSpec, scan, trace_boundary

spec = ScanSpec(
    eps_range=(0.005, 0.25, 128),
    sigma1_range=(0.0, 0.05, 128),
    g=0.99,
    delta=0.01,
)
records = scan(spec)

n_stable = sum(r.lambda_sign == "negative" for r in records)
n_ms = sum(r.ms_stable for r in records)
print(f"grid: {len(records)} points, dep_F = {records[0].dep_f}")
print(f"  lambda < 0 (stable in probability): {n_stable}")
print(f"  exponentially mean-square stable  : {n_ms}")
print(f"  containment holds: "
      f"{all(r.lam < 0 for r in records if r.ms_stable)}")

with open("region_map.csv", "w", encoding="utf-8") as fh:
    fh.write("eps,sigma1,lambda,lambda_sign,ms_abscissa,ms_stable,criticality,dep_f\n")
    for r in records:
        fh.write(f"{r.eps:.17g},{r.sigma1:.17g},{r.lam:.17g},{r.lambda_sign},"
                 f"{r.ms_abscissa:.17g},{str(r.ms_stable).lower()},"
                 f"{r.criticality},{r.dep_f:.17g}\n")

boundaries = {kind: trace_boundary(spec, kind)
              for kind in ("lyapunov", "meansquare", "criticality")}
with open("region_boundaries.csv", "w", encoding="utf-8") as fh:
    fh.write("eps,sigma1,boundary_kind\n")
    for kind, pts in boundaries.items():
        for eps, sigma1 in pts:
            fh.write(f"{eps:.17g},{sigma1:.17g},{kind}\n")
print("\nwrote region_map.csv and region_boundaries.csv")
for kind, pts in boundaries.items():
    print(f"  {kind:>11} boundary: {len(pts)} points")

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    print("matplotlib not available; skipping the rendered map")
else:
    eps_vals = spec.eps_values()
    sig_vals = spec.sigma1_values()
    lam = np.array([r.lam for r in records]).reshape(len(eps_vals), len(sig_vals))
    fig, ax = plt.subplots(figsize=(7, 6))
    ax.contourf(eps_vals, sig_vals, lam.T, levels=[-10, 0, 10],
                colors=["0.75", "1.0"])
    styles = {"lyapunov": "k-", "meansquare": "k--", "criticality": "k:"}
    for kind, pts in boundaries.items():
        if pts:
            arr = np.array(sorted(pts))
            ax.plot(arr[:, 0], arr[:, 1], styles[kind], label=kind)
    ax.set_xlabel("eps")
    ax.set_ylabel("sigma1")
    ax.set_title("shaded: lambda < 0 (stable in probability)")
    ax.legend()
    fig.savefig("region_map.png", dpi=150)
    print("wrote region_map.png")
