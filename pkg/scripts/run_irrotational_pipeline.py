"""
End-to-end demo on the zero-vorticity jet (d = sigma = 1, nu = 2).

Locates the k = 1 bifurcation point, certifies it, then marches ten
pseudo-arclength steps along the wave branch and prints the diagnostics
that the global alternatives ask us to watch.
"""

import sys
from pathlib import Path

import numpy as np

try:
    import capjet
except ImportError:
    sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))
    import capjet

from capjet import (
    FlowParameters,
    SwirlFunction,
    VorticityFunction,
    build_discretization,
    continue_branch,
    find_bifurcation_points,
    make_profile_factory,
)

params = FlowParameters(d=1.0, sigma=1.0, L=np.pi)
factory = make_profile_factory(params, VorticityFunction.zero(), SwirlFunction.zero())

scan = find_bifurcation_points(factory, params.nu, (1, 1), (0.3, 0.9), n_scan=41)
point = scan.points[0]
print(f"bifurcation point: k={point.k}  lambda={point.lam:.12f}  c={point.c:.12f}")
print(f"  |D| residual {point.dispersion_residual:.2e}, dD/dlambda {point.d_lambda:.4f}")
print(f"  kernel unique: {point.kernel_unique}, transversal: {point.transversal}")

disc = build_discretization(params, 24, 12)
branch = continue_branch(disc, factory, point, ds=5e-3, n_steps=10)

print(f"\n{'step':>4} {'lambda':>14} {'amplitude':>12} {'Q':>12} "
      f"{'min(d+eta)':>12} {'mode-1 share':>12}")
for row in branch.rows:
    e = row["eta_mode_energies"]
    share = e[0] / sum(e)
    print(f"{row['step']:>4} {row['lambda']:>14.9f} {row['amplitude']:>12.3e} "
          f"{row['Q']:>12.8f} {row['min_surface_radius']:>12.8f} {share:>12.6f}")
print(f"\ntermination: {branch.termination}")
