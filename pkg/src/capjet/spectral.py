"""Spectral certification of the linearized surface operator.

The radial eigenvalue problem

    -d^-2 s^-3 (s^3 phi')' + q(s) phi = mu phi  on (0,1),
    -g phi'(1) - h phi(1) = mu phi(1),

carries its spectral parameter in the boundary condition. Following the
operator construction that motivates it, the condition is linearized through
a companion boundary unknown b; with the constraint b = phi(1) folded in,
the discretization becomes an ordinary matrix pencil (A, B) over the phi
node values. Collocation uses the even-parity Chebyshev grid including s=0,
where the axis row is the four-dimensional radial stencil -4 d^-2 phi''(0)
(the even expansion builds phi'(0)=0 into the function space).

The quadratic form of the operator under the indefinite weight
(d^2 s^3 ds on the interior, -1/g on the boundary slot) is

    [K u, u] = int s^3 (phi')^2 + int d^2 s^3 q phi^2 + (h/g) phi(1)^2,

which `quadratic_form_two_ways` reproduces discretely; the identity is exact
in the collocation space when the test vector is a low-degree even
polynomial, since the s^3-weighted quadrature is exact there.

Physically converged eigenvalues are certified by agreement between the N
and 2N discretizations; the raw pencil also carries discretization ghosts in
its upper range, which no residual filter can remove (they are genuine
eigenvalues of the finite matrix).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .cheb import RadialGrid, radial_grid
from .dispersion import BetaSolution, dispersion_value, solve_beta
from .errors import DegenerateSurfaceSpeed, EigensolveFailure
from .trivial_flow import TrivialFlowProfile, boundary_coefficients

RESIDUAL_TOL = 1e-8


@dataclass(frozen=True)
class MatrixPencil:
    a: np.ndarray
    b: np.ndarray
    grid: RadialGrid
    g: float
    h: float
    d: float
    q_values: np.ndarray
    op_rows: np.ndarray  # interior operator evaluated on every row, s=1 included

    @property
    def n(self) -> int:
        return self.a.shape[0]


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: tuple[complex, ...]
    eigenvectors: tuple[tuple[np.ndarray, float], ...]
    residuals: tuple[float, ...]
    threshold: float
    n_below_threshold: int
    n_nonreal: int


def build_operator_K(profile: TrivialFlowProfile, n: int) -> MatrixPencil:
    """Collocation pencil for the boundary eigenvalue problem on n radial nodes."""
    if n < 16:
        raise ValueError("n >= 16 required for a meaningful spectrum")
    if profile.degenerate_c:
        raise DegenerateSurfaceSpeed(f"c(lambda={profile.lam}) ~ 0")
    g, h = boundary_coefficients(profile)
    grid = radial_grid(n, include_zero=True)
    s = grid.s
    d2inv = 1.0 / profile.params.d**2
    qv = profile.q(s)

    op = np.empty((n, n))
    op[:n - 1, :] = -d2inv * (grid.d2[:n - 1, :]
                              + (3.0 / s[:n - 1])[:, None] * grid.d1[:n - 1, :])
    op[n - 1, :] = -4.0 * d2inv * grid.d2[n - 1, :]
    op[np.arange(n), np.arange(n)] += qv

    a = op.copy()
    a[0, :] = -g * grid.d1[0, :]
    a[0, 0] += -h
    b = np.eye(n)
    return MatrixPencil(a, b, grid, g, h, profile.params.d, qv, op)


def compute_spectrum(pencil: MatrixPencil,
                     profile: TrivialFlowProfile) -> SpectrumResult:
    """Eigenpairs of the pencil with a relative residual filter and counts.

    The counts describe the finite pencil; certification of which eigenvalues
    approximate the continuous operator belongs to `certified_eigenvalues`.
    """
    try:
        w, vr = scipy.linalg.eig(pencil.a, pencil.b)
    except Exception as exc:  # LAPACK breakdown
        raise EigensolveFailure(str(exc)) from exc
    if not np.all(np.isfinite(w)):
        keep0 = np.isfinite(w)
        w, vr = w[keep0], vr[:, keep0]
    if w.size == 0:
        raise EigensolveFailure("no finite eigenvalues returned")

    norm_a = np.linalg.norm(pencil.a, np.inf)
    norm_b = np.linalg.norm(pencil.b, np.inf)
    pairs = []
    for i in range(w.size):
        v = vr[:, i]
        res = np.linalg.norm(pencil.a @ v - w[i] * (pencil.b @ v), np.inf)
        rel = res / ((norm_a + abs(w[i]) * norm_b) * np.linalg.norm(v, np.inf))
        if rel <= RESIDUAL_TOL:
            pairs.append((w[i], v, float(rel)))
    if not pairs:
        raise EigensolveFailure("all eigenpairs failed the residual filter")
    pairs.sort(key=lambda t: (t[0].real, t[0].imag))

    threshold = -profile.q_neg_sup() + 0.0
    evals = tuple(complex(p[0]) for p in pairs)
    evecs = tuple(
        (v.real if mu.imag == 0.0 else v, float(np.real(v[0])))
        for mu, v, _ in pairs
    )
    n_below = sum(1 for mu in evals if mu.imag == 0.0 and mu.real < threshold)
    n_nonreal = sum(1 for mu in evals if mu.imag != 0.0)
    return SpectrumResult(
        eigenvalues=evals,
        eigenvectors=evecs,
        residuals=tuple(p[2] for p in pairs),
        threshold=float(threshold),
        n_below_threshold=n_below,
        n_nonreal=n_nonreal,
    )


def certified_eigenvalues(profile: TrivialFlowProfile, n: int,
                          n_keep: int = 10,
                          drift_tol: float = 1e-6) -> tuple[np.ndarray, float]:
    """Lowest real eigenvalues agreeing between the n and 2n grids.

    Returns (eigenvalues sorted ascending, max relative drift). Only the
    n_keep lowest real eigenvalues of the coarse pencil are matched; a coarse
    eigenvalue with no fine partner within drift_tol relative is dropped.
    """
    res_c = compute_spectrum(build_operator_K(profile, n), profile)
    res_f = compute_spectrum(build_operator_K(profile, 2 * n), profile)
    coarse = np.array([mu.real for mu in res_c.eigenvalues if mu.imag == 0.0])
    fine = np.array([mu.real for mu in res_f.eigenvalues if mu.imag == 0.0])
    coarse = np.sort(coarse)[:n_keep]
    out, drift = [], 0.0
    for mu in coarse:
        j = int(np.argmin(np.abs(fine - mu)))
        rel = abs(fine[j] - mu) / max(1.0, abs(mu))
        if rel <= drift_tol:
            out.append(fine[j])
            drift = max(drift, rel)
    return np.array(out), drift


def quadratic_form_two_ways(pencil: MatrixPencil,
                            phi: np.ndarray) -> tuple[float, float]:
    """[K u, u] for u = (phi, phi(1)): pencil product vs the explicit form.

    Pencil route: d^2 sum wq3 (L phi) phi - (1/g)(boundary functional) phi(1).
    Explicit route: sum wq3 (phi')^2 + d^2 sum wq3 q phi^2 + (h/g) phi(1)^2.
    Exact agreement holds on even polynomial vectors of low degree, where the
    s^3-weighted quadrature is exact for every integrand involved.
    """
    grid, d2 = pencil.grid, pencil.d**2
    lphi = pencil.op_rows @ phi
    bc_val = -pencil.g * (grid.d1[0, :] @ phi) - pencil.h * phi[0]
    via_pencil = d2 * float(np.sum(grid.wq3 * lphi * phi)) - bc_val * phi[0] / pencil.g
    dphi = grid.d1 @ phi
    explicit = (float(np.sum(grid.wq3 * dphi * dphi))
                + d2 * float(np.sum(grid.wq3 * pencil.q_values * phi * phi))
                + (pencil.h / pencil.g) * phi[0] ** 2)
    return via_pencil, explicit


@dataclass(frozen=True)
class CrossValReport:
    checked: tuple[tuple[float, float], ...]  # (mu, |D(mu)|) for eigenvalues
    unmatched_eigenvalues: tuple[float, ...]
    dispersion_roots: tuple[float, ...]
    unmatched_roots: tuple[float, ...]

    @property
    def ok(self) -> bool:
        return not self.unmatched_eigenvalues and not self.unmatched_roots


def cross_validate_with_dispersion(result: SpectrumResult,
                                   profile: TrivialFlowProfile,
                                   mu_max: float = 40.0,
                                   n_scan: int = 161,
                                   tol: float = 1e-6) -> CrossValReport:
    """Two-way check that certified eigenvalues and dispersion roots coincide."""
    reals = sorted({mu.real for mu in result.eigenvalues
                    if mu.imag == 0.0 and abs(mu.real) <= mu_max})
    checked, unmatched = [], []
    for mu in reals:
        beta = solve_beta(profile, mu)
        if beta.is_pole:
            continue
        dval = abs(dispersion_value(profile, mu, beta))
        checked.append((float(mu), float(dval)))
        if dval > tol:
            unmatched.append(float(mu))

    grid = np.linspace(-mu_max, mu_max, n_scan)
    betas = [solve_beta(profile, mu) for mu in grid]
    dvals = [dispersion_value(profile, mu, b) for mu, b in zip(grid, betas)]
    roots = []
    for i in range(n_scan - 1):
        bl, br = betas[i], betas[i + 1]
        if bl.is_pole or br.is_pole or bl.beta1 * br.beta1 < 0.0:
            continue
        if not (np.isfinite(dvals[i]) and np.isfinite(dvals[i + 1])):
            continue
        if dvals[i] == 0.0:
            roots.append(float(grid[i]))
        elif dvals[i] * dvals[i + 1] < 0.0:
            root = _bisect_mu(profile, grid[i], grid[i + 1], dvals[i], dvals[i + 1])
            if root is not None:
                roots.append(root)
    unmatched_roots = []
    for root in roots:
        if not reals or np.min(np.abs(np.array(reals) - root)) > tol * max(1.0, abs(root)):
            unmatched_roots.append(float(root))
    return CrossValReport(tuple(checked), tuple(unmatched), tuple(roots),
                          tuple(unmatched_roots))


def _bisect_mu(profile, a, b, fa, fb, max_iter: int = 80):
    for _ in range(max_iter):
        mid = 0.5 * (a + b)
        beta = solve_beta(profile, mid)
        if beta.is_pole:
            return None
        fm = dispersion_value(profile, mid, beta)
        if abs(fm) <= 1e-9:
            return float(mid)
        if fa * fm < 0.0:
            b, fb = mid, fm
        else:
            a, fa = mid, fm
        if abs(b - a) < 1e-14 * (1.0 + abs(mid)):
            return float(mid)
    return float(0.5 * (a + b))
