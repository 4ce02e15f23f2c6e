"""Dispersion relation for periodic capillary waves on a laminar jet.

For a spectral parameter mu the radial mode shape solves the shooting
problem

    beta'' + (3/s) beta' + d^2 (mu - q(s)) beta = 0,  beta(0)=1, beta'(0)=0,

with q from the laminar profile. The dispersion function combines the
logarithmic derivative of beta at the surface with the curvature and
Bernoulli terms,

    D(mu, lam) = beta_s(1)/beta(1) + sigma (1 + mu d^2) / (d c^2) + 2
                 + F(m)^2 / (d^2 c^2) + (d^2 gamma + FF')(m) / c,

and a k-mode bifurcation point of the wave problem is a root lam of
D(-(k nu)^2, lam). Zeros of beta(1) are poles of D (the convention is
D = +inf there); the scan tracks the sign of beta(1) so that sign flips
caused by a pole are reported separately, never polished as roots.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BlowUp, DegenerateSurfaceSpeed, SplitRequired, UnstableDerivative
from .trivial_flow import SEED_EPS, TrivialFlowProfile

POLE_REL = 1e-12
ROOT_TOL = 1e-9
KERNEL_MARGIN = 1e-6


def thread_count() -> int:
    try:
        n = int(os.environ.get("CAPJET_THREADS", "1"))
    except ValueError:
        n = 1
    return max(1, n)


@dataclass(frozen=True)
class BetaSolution:
    mu: float
    lam: float
    beta1: float  # unnormalized surface value
    beta1_s: float
    sup: float
    _sol: object = field(repr=False, compare=False)

    @property
    def is_pole(self) -> bool:
        return abs(self.beta1) < POLE_REL * self.sup

    def beta_tilde(self, s):
        arr = np.atleast_1d(np.asarray(s, dtype=float))
        out = np.empty_like(arr)
        tiny = arr < SEED_EPS
        out[tiny] = 1.0
        if (~tiny).any():
            out[~tiny] = self._sol.sol(arr[~tiny])[0]
        return float(out[0]) if np.ndim(s) == 0 else out

    def beta(self, s):
        """Surface-normalized mode shape beta_tilde / beta_tilde(1)."""
        return self.beta_tilde(s) / self.beta1


def solve_beta(profile: TrivialFlowProfile, mu: float, rtol: float = 1e-10,
               atol: float = 1e-12) -> BetaSolution:
    d2 = profile.params.d**2
    q0 = -profile.swirl.ff_prime_deriv(0.0)
    a0 = d2 * (mu - q0)

    def rhs(s, y):
        b, db = y
        return (db, -3.0 * db / s - d2 * (mu - profile.q(s)) * b)

    eps = SEED_EPS
    y0 = [1.0 - a0 * eps * eps / 8.0, -a0 * eps / 4.0]
    sol = solve_ivp(rhs, (eps, 1.0), y0, method="DOP853", rtol=rtol, atol=atol,
                    dense_output=True)
    if not sol.success:
        raise BlowUp(f"radial mode integration failed at mu={mu}, lam={profile.lam}")
    sup = float(np.max(np.abs(sol.sol(np.linspace(eps, 1.0, 257))[0])))
    return BetaSolution(float(mu), profile.lam, float(sol.y[0, -1]),
                        float(sol.y[1, -1]), max(sup, 1.0), sol)


def dispersion_value(profile: TrivialFlowProfile, mu: float,
                     beta: BetaSolution | None = None) -> float:
    """D(mu, lam); +inf at poles of the surface-normalized mode."""
    if profile.degenerate_c:
        raise DegenerateSurfaceSpeed(f"c(lambda={profile.lam}) ~ 0")
    if beta is None:
        beta = solve_beta(profile, mu)
    if beta.is_pole:
        return math.inf
    p = profile.params
    m, c = profile.m, profile.c
    d2 = p.d**2
    bern = d2 * profile.gamma(m) + profile.swirl.ff_prime(m)
    return (
        beta.beta1_s / beta.beta1
        + p.sigma * (1.0 + mu * d2) / (p.d * c * c)
        + 2.0
        + profile.swirl.f(m) ** 2 / (d2 * c * c)
        + bern / c
    )


@dataclass(frozen=True)
class BifurcationPoint:
    k: int
    lam: float
    mu: float
    c: float
    dispersion_residual: float
    d_lambda: float  # Richardson-extrapolated dD/dlambda
    transversal: bool
    kernel_unique: bool
    sl_condition_ok: bool


@dataclass(frozen=True)
class ScanResult:
    points: tuple[BifurcationPoint, ...]
    pole_brackets: tuple[tuple[int, float, float], ...]  # (k, lam_lo, lam_hi)
    c_zero_cells: tuple[tuple[float, float], ...]


def transversality(profile_factory: Callable[[float], TrivialFlowProfile],
                   lam0: float, mu: float) -> float:
    """dD/dlambda by central differences at h and h/2 with Richardson mixing.

    Each evaluation re-solves the laminar profile, so the derivative sees the
    full lam-dependence. Raises UnstableDerivative when the two stencils
    disagree beyond 1e-4 relative.
    """
    h = 1e-5 * (1.0 + abs(lam0))

    def dval(lam: float) -> float:
        return dispersion_value(profile_factory(lam), mu)

    d_h = (dval(lam0 + h) - dval(lam0 - h)) / (2.0 * h)
    d_h2 = (dval(lam0 + 0.5 * h) - dval(lam0 - 0.5 * h)) / h
    scale = max(abs(d_h2), 1e-300)
    if abs(d_h - d_h2) > 1e-4 * scale:
        raise UnstableDerivative(
            f"dD/dlambda estimates disagree at lam={lam0}: {d_h} vs {d_h2}"
        )
    return (4.0 * d_h2 - d_h) / 3.0


def _kernel_unique(profile: TrivialFlowProfile, nu: float, k0: int,
                   k_range: Sequence[int]) -> bool:
    d = profile.params.d
    x_max2 = 4.0 * max((k * nu * d) ** 2 for k in k_range)
    j = 1
    while (j * nu * d) ** 2 <= x_max2:
        if j != k0:
            val = dispersion_value(profile, -((j * nu) ** 2))
            if math.isfinite(val) and abs(val) <= KERNEL_MARGIN:
                return False
        j += 1
    return True


def find_bifurcation_points(
    profile_factory: Callable[[float], TrivialFlowProfile],
    nu: float,
    k_range: Sequence[int],
    lambda_interval: tuple[float, float],
    n_scan: int = 201,
    auto_split: bool = True,
) -> ScanResult:
    """Scan lambda for roots of D(-(k nu)^2, .), one list entry per certified root.

    k_range is an inclusive integer interval (k_min, k_max). Cells where c
    changes sign are excluded (auto_split) or raise SplitRequired. Pole-induced
    sign flips of D are reported in pole_brackets, not polished.
    """
    lo, hi = lambda_interval
    grid = np.linspace(lo, hi, n_scan)
    workers = thread_count()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            profiles = list(ex.map(profile_factory, grid))
    else:
        profiles = [profile_factory(lam) for lam in grid]

    c_vals = np.array([p.c for p in profiles])
    bad_cell = np.zeros(n_scan - 1, dtype=bool)
    c_zero_cells = []
    for i in range(n_scan - 1):
        if (c_vals[i] * c_vals[i + 1] < 0.0 or profiles[i].degenerate_c
                or profiles[i + 1].degenerate_c):
            bad_cell[i] = True
            c_zero_cells.append((float(grid[i]), float(grid[i + 1])))
    if c_zero_cells and not auto_split:
        raise SplitRequired(
            f"c(lambda) changes sign inside {lambda_interval}; split the scan at "
            f"cells {c_zero_cells}"
        )

    points: list[BifurcationPoint] = []
    pole_brackets: list[tuple[int, float, float]] = []
    k_values = range(int(min(k_range)), int(max(k_range)) + 1)  # inclusive interval
    for k in k_values:
        mu = -((k * nu) ** 2)
        betas = [solve_beta(p, mu) for p in profiles]
        dvals = [
            math.nan if p.degenerate_c else dispersion_value(p, mu, b)
            for p, b in zip(profiles, betas)
        ]
        for i in range(n_scan - 1):
            if bad_cell[i]:
                continue
            bl, br = betas[i], betas[i + 1]
            if bl.is_pole or br.is_pole or bl.beta1 * br.beta1 < 0.0:
                pole_brackets.append((k, float(grid[i]), float(grid[i + 1])))
                continue
            if not (math.isfinite(dvals[i]) and math.isfinite(dvals[i + 1])):
                pole_brackets.append((k, float(grid[i]), float(grid[i + 1])))
                continue
            if dvals[i] == 0.0:
                root = float(grid[i])
            elif dvals[i] * dvals[i + 1] < 0.0:
                root = _bisect_root(profile_factory, mu, grid[i], grid[i + 1],
                                    dvals[i], dvals[i + 1])
                if root is None:
                    pole_brackets.append((k, float(grid[i]), float(grid[i + 1])))
                    continue
            else:
                continue
            prof_root = profile_factory(root)
            beta_root = solve_beta(prof_root, mu)
            resid = dispersion_value(prof_root, mu, beta_root)
            beta_sl = solve_beta(prof_root, 0.0)
            sl_ok = abs(beta_sl.beta1) >= 1e-8 * beta_sl.sup
            uniq = _kernel_unique(prof_root, nu, k, k_values)
            dlam = transversality(profile_factory, root, mu)
            points.append(
                BifurcationPoint(
                    k=int(k), lam=float(root), mu=float(mu), c=prof_root.c,
                    dispersion_residual=float(abs(resid)), d_lambda=float(dlam),
                    transversal=bool(dlam != 0.0), kernel_unique=uniq,
                    sl_condition_ok=sl_ok,
                )
            )
    points.sort(key=lambda p: (p.k, p.lam))
    return ScanResult(tuple(points), tuple(pole_brackets), tuple(c_zero_cells))


def _bisect_root(profile_factory, mu, a, b, fa, fb, max_iter: int = 80):
    """Bisect D over [a,b]; None when a pole sneaks inside the bracket."""
    sign_beta = None
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        prof = profile_factory(mid)
        beta = solve_beta(prof, mu)
        if beta.is_pole:
            return None
        if sign_beta is None:
            sign_beta = math.copysign(1.0, beta.beta1)
        elif math.copysign(1.0, beta.beta1) != sign_beta:
            return None
        fm = dispersion_value(prof, mu, beta)
        if abs(fm) <= ROOT_TOL:
            return float(mid)
        if fa * fm < 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
        if abs(b - a) < 1e-15 * (1.0 + abs(mid)):
            return float(mid) if abs(fm) <= 1e-6 else None
    return None


@dataclass(frozen=True)
class PredictorField:
    """Tangent direction of the bifurcating branch, sampled on solver grids."""

    k: int
    lam: float
    eta_coeffs: np.ndarray  # cosine coefficients, modes 1..n_modes
    phi: np.ndarray  # (n_s, n_z) grid values

    def eta_values(self, z: np.ndarray, nu: float) -> np.ndarray:
        ks = np.arange(1, self.eta_coeffs.size + 1)
        return np.cos(np.outer(z, ks * nu)) @ self.eta_coeffs


def kernel_predictor(
    profile: TrivialFlowProfile,
    point: BifurcationPoint,
    s_nodes: np.ndarray,
    z_nodes: np.ndarray,
    nu: float,
    n_modes: int,
) -> PredictorField:
    """Branch tangent (eta, phi) built from the normalized kernel mode.

    eta-part: -(d/c) cos(k nu z); phi-part:
    [beta(s) - (2 psi + s psi_s)(s)/c] cos(k nu z). The phi-part vanishes at
    s = 1 because beta(1) = 1 and 2 psi(1) + psi_s(1) = c by definition of c.
    """
    if point.k > n_modes:
        raise ValueError(f"mode k={point.k} not representable with {n_modes} modes")
    beta = solve_beta(profile, point.mu)
    if beta.is_pole:
        raise DegenerateSurfaceSpeed("kernel mode is a pole of the normalization")
    c = profile.c
    d = profile.params.d
    eta_coeffs = np.zeros(n_modes)
    eta_coeffs[point.k - 1] = -d / c
    radial = beta.beta(s_nodes) - (
        2.0 * profile.psi(s_nodes) + s_nodes * profile.psi_s(s_nodes)
    ) / c
    phi = np.outer(radial, np.cos(point.k * nu * z_nodes))
    return PredictorField(point.k, point.lam, eta_coeffs, phi)
