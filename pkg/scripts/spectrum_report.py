"""
Spectral certificate for one laminar profile.

Builds the boundary-eigenvalue pencil, prints the certified eigenvalues
below and near the instability threshold, and cross-checks them against
roots of the dispersion function.
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
    build_operator_K,
    certified_eigenvalues,
    compute_spectrum,
    cross_validate_with_dispersion,
    solve_trivial,
)

params = FlowParameters(d=1.0, sigma=1.0, L=np.pi)
profile = solve_trivial(params, VorticityFunction.constant(0.4), SwirlFunction.zero(), 0.6)
print(f"lambda = 0.6, constant vorticity 0.4: c = {profile.c:.10f}")

result = compute_spectrum(build_operator_K(profile, 32), profile)
print(f"threshold (instability index boundary): {result.threshold:.6f}")
print(f"{result.n_below_threshold} eigenvalue(s) below threshold, "
      f"{result.n_nonreal} non-real raw eigenvalue(s)")

eigs, drift = certified_eigenvalues(profile, 32, n_keep=6)
print(f"\ncertified eigenvalues (N vs 2N drift {drift:.2e}):")
for mu in eigs:
    print(f"  mu = {mu:+.12f}")

check = cross_validate_with_dispersion(result, profile)
print(f"\ndispersion cross-check: {len(check.checked)} eigenvalue(s) matched, "
      f"{len(check.unmatched_eigenvalues)} unmatched, "
      f"{len(check.unmatched_roots)} stray root(s)")
print("ok" if check.ok else "MISMATCH")
