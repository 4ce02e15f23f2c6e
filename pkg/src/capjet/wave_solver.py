"""Discretization and continuation for the flattened free-boundary wave system.

Unknowns are the surface displacement eta (zero-mean even cosine coefficients)
and the auxiliary field phi on the flattened strip (s, z) in (0,1] x [0, L/2],
with phi = 0 on s = 1 built into the data layout. The radial grid excludes
s = 0: all fields are even in s, and the folded Chebyshev derivative matrices
enforce f_s(0) = 0 structurally, which is the axis regularity condition.
"""

from __future__ import annotations

import collections
import dataclasses
import math
from typing import Callable

import numpy as np
import scipy.linalg

from .cheb import RadialGrid, radial_grid
from .dispersion import BifurcationPoint, kernel_predictor
from .errors import DomainCollapse, LinearSolveFailure, NoConvergence
from .model import FlowParameters
from .trivial_flow import TrivialFlowProfile

EPS_DOM_FACTOR = 1e-3  # default collapse threshold eps_dom = 1e-3 * d
FD_STEP = 1e-7
NEWTON_TOL = 1e-9
MAX_NEWTON = 25
BLOWUP_CAP = 1e6
HOLDER_ALPHA = 0.5
VORTICITY_P = 5.0 / (2.0 - HOLDER_ALPHA)  # = 10/3


# ---------------------------------------------------------------------------
# discretization


@dataclasses.dataclass(frozen=True, eq=False)
class Discretization:
    """Grids and linear maps for fields even in z with period L.

    z-nodes cover the half period [0, L/2]; cosine modes k = 0..n_z are
    exactly representable. inv_dzz acts as multiplication by -1/(k nu)^2 in
    coefficient space and annihilates the mean, proj removes the mean.
    """

    params: FlowParameters
    n_s: int
    n_z: int
    grid: RadialGrid
    z: np.ndarray  # (n_z+1,) half-period nodes j*L/(2 n_z)
    cosm: np.ndarray  # (n_z+1, n_z+1) values C[j,k] = cos(k nu z_j)
    coeff: np.ndarray  # inverse of cosm (DCT-I analysis weights)
    dz: np.ndarray
    dzz: np.ndarray
    inv_dzz: np.ndarray
    proj: np.ndarray
    avg_w: np.ndarray  # (n_z+1,) quadrature weights, sum 1

    @property
    def nu(self) -> float:
        return self.params.nu

    @property
    def n_field(self) -> int:
        return self.n_s * (self.n_z + 1)

    def average(self, f: np.ndarray) -> float:
        return float(self.avg_w @ np.asarray(f, dtype=float))

    def surface(self, f: np.ndarray) -> np.ndarray:
        return f[0, :]

    def surface_s(self, f: np.ndarray) -> np.ndarray:
        return self.grid.d1[0, :] @ f

    def eta_values(self, eta_hat: np.ndarray) -> np.ndarray:
        return self.cosm[:, 1:] @ eta_hat

    def eta_coefficients(self, eta_values: np.ndarray) -> np.ndarray:
        return (self.coeff @ eta_values)[1:]


def build_discretization(params: FlowParameters, n_s: int, n_z: int) -> Discretization:
    if n_s < 4:
        raise ValueError("need at least 4 radial nodes")
    if n_z < 1:
        raise ValueError("need at least one cosine mode")
    grid = radial_grid(n_s, include_zero=False)
    nu = params.nu
    j = np.arange(n_z + 1)
    z = j * params.L / (2.0 * n_z)
    k = np.arange(n_z + 1)
    ang = np.pi * np.outer(j, k) / n_z
    cosm = np.cos(ang)
    sinm = np.sin(ang)
    # DCT-I analysis: half weights at both ends of the node and mode ranges
    ck = np.where((k == 0) | (k == n_z), 0.5, 1.0)
    wj = np.where((j == 0) | (j == n_z), 0.5, 1.0)
    coeff = (2.0 / n_z) * ck[:, None] * wj[None, :] * cosm.T
    freq = k * nu
    dz = -sinm @ np.diag(freq) @ coeff
    dzz = cosm @ np.diag(-(freq**2)) @ coeff
    inv_scale = np.zeros(n_z + 1)
    inv_scale[1:] = -1.0 / freq[1:] ** 2
    inv_dzz = cosm @ np.diag(inv_scale) @ coeff
    keep = np.ones(n_z + 1)
    keep[0] = 0.0
    proj = cosm @ np.diag(keep) @ coeff
    avg_w = wj / n_z
    return Discretization(
        params=params,
        n_s=n_s,
        n_z=n_z,
        grid=grid,
        z=z,
        cosm=cosm,
        coeff=coeff,
        dz=dz,
        dzz=dzz,
        inv_dzz=inv_dzz,
        proj=proj,
        avg_w=avg_w,
    )


# ---------------------------------------------------------------------------
# surface geometry


@dataclasses.dataclass(frozen=True, eq=False)
class SurfaceShape:
    """eta and its first two z-derivatives on the z-nodes, plus r = d + eta."""

    eta_hat: np.ndarray
    eta: np.ndarray
    eta_z: np.ndarray
    eta_zz: np.ndarray
    r: np.ndarray
    w: np.ndarray  # 1 + eta_z^2

    @property
    def key(self) -> bytes:
        return self.eta_hat.tobytes()

    @property
    def min_radius(self) -> float:
        return float(self.r.min())


def surface_shape(disc: Discretization, eta_hat) -> SurfaceShape:
    eta_hat = np.asarray(eta_hat, dtype=float)
    if eta_hat.shape != (disc.n_z,):
        raise ValueError(f"eta_hat must have shape ({disc.n_z},)")
    ks = np.arange(1, disc.n_z + 1) * disc.nu
    eta = disc.cosm[:, 1:] @ eta_hat
    # exact mode-wise derivatives (no aliasing for a pure coefficient vector)
    ang = np.pi * np.outer(np.arange(disc.n_z + 1), np.arange(1, disc.n_z + 1)) / disc.n_z
    eta_z = -np.sin(ang) @ (ks * eta_hat)
    eta_zz = disc.cosm[:, 1:] @ (-(ks**2) * eta_hat)
    r = disc.params.d + eta
    return SurfaceShape(eta_hat, eta, eta_z, eta_zz, r, 1.0 + eta_z**2)


def default_eps_dom(params: FlowParameters) -> float:
    return EPS_DOM_FACTOR * params.d


def _require_domain(shape: SurfaceShape, eps_dom: float) -> None:
    if shape.min_radius < eps_dom:
        raise DomainCollapse(
            f"min surface radius {shape.min_radius:.6g} below threshold {eps_dom:.6g}"
        )


def curvature(disc: Discretization, eta_hat) -> np.ndarray:
    """Mean curvature kappa[eta] at the z-nodes; kappa[0] = -1/d."""
    shape = surface_shape(disc, eta_hat)
    return shape.eta_zz / shape.w**1.5 - 1.0 / (shape.r * np.sqrt(shape.w))


# ---------------------------------------------------------------------------
# reduced elliptic operator and the A-solve


def _assemble_operator(disc: Discretization, shape: SurfaceShape) -> np.ndarray:
    s = disc.grid.s[:, None]
    p = 1.0 / shape.r**2
    a_ss = p * (1.0 + shape.eta_z**2 * s**2)
    a_s = p * (3.0 / s - (shape.r * shape.eta_zz - 2.0 * shape.eta_z**2) * s)
    a_sz = -2.0 * shape.eta_z * s / shape.r
    d1 = disc.grid.d1
    d2 = disc.grid.d2
    nz1 = disc.n_z + 1
    eye_z = np.eye(nz1)
    mat = (
        a_ss[:, :, None, None] * d2[:, None, :, None]
        + a_s[:, :, None, None] * d1[:, None, :, None]
    ) * eye_z[None, :, None, :]
    mat += np.eye(disc.n_s)[:, None, :, None] * disc.dzz[None, :, None, :]
    mat += a_sz[:, :, None, None] * d1[:, None, :, None] * disc.dz[None, :, None, :]
    mat = mat.reshape(disc.n_field, disc.n_field)
    mat[:nz1, :] = 0.0
    mat[np.arange(nz1), np.arange(nz1)] = 1.0  # Dirichlet rows at s = 1
    return mat


def reduced_elliptic_operator(
    disc: Discretization, eta_hat, eps_dom: float | None = None
) -> np.ndarray:
    """Dense matrix of f -> L^eta f on the (s, z) grid, Dirichlet rows at s=1.

    The s = 0 regularity condition f_s(0) = 0 is not a matrix row: the folded
    radial derivative matrices act on even extensions, for which it holds
    identically.
    """
    shape = surface_shape(disc, eta_hat)
    eps = default_eps_dom(disc.params) if eps_dom is None else eps_dom
    _require_domain(shape, eps)
    return _assemble_operator(disc, shape)


class OperatorCache:
    """Bounded LRU cache of LU factorizations keyed by the eta coefficients."""

    def __init__(self, maxsize: int = 8):
        self.maxsize = maxsize
        self._data: collections.OrderedDict = collections.OrderedDict()
        self.hits = 0
        self.misses = 0

    def factorization(self, disc: Discretization, shape: SurfaceShape):
        key = shape.key
        if key in self._data:
            self.hits += 1
            self._data.move_to_end(key)
            return self._data[key]
        self.misses += 1
        try:
            lu = scipy.linalg.lu_factor(_assemble_operator(disc, shape))
        except scipy.linalg.LinAlgError as exc:  # pragma: no cover
            raise LinearSolveFailure(f"operator factorization failed: {exc}") from exc
        self._data[key] = lu
        while len(self._data) > self.maxsize:
            self._data.popitem(last=False)
        return lu


def _source_terms(
    disc: Discretization,
    profile: TrivialFlowProfile,
    shape: SurfaceShape,
    phi: np.ndarray,
) -> np.ndarray:
    """Right side of the A-equation at the input phi, analytic in the psi part.

    The source -L^eta[d^2 psi / r^2] is expanded by hand so that at eta = 0 it
    cancels the vorticity and swirl terms through the laminar ODE itself, not
    through grid differentiation; the trivial curve then has residual at the
    ODE-integration level on any grid.
    """
    d2 = profile.params.d**2
    s = disc.grid.s[:, None]
    s2 = s * s
    r = shape.r[None, :]
    r2 = r * r
    psi = profile.psi(disc.grid.s)[:, None]
    psi_s = profile.psi_s(disc.grid.s)[:, None]
    psi_ss = profile.psi_ss(disc.grid.s)[:, None]
    wfac = d2 / r2
    phibar = phi + psi * wfac
    xbar = r2 * s2 * phibar
    rhs = -(
        profile.gamma(xbar)
        + phibar * profile.swirl.g(xbar) * profile.swirl.f_prime(xbar)
    )
    ez = shape.eta_z[None, :]
    ezz = shape.eta_zz[None, :]
    w_ss = psi_ss * wfac
    w_s = psi_s * wfac
    w_zz = -2.0 * d2 * psi * (ezz / r**3 - 3.0 * ez**2 / r**4)
    w_sz = -2.0 * d2 * psi_s * ez / r**3
    lw = (
        w_zz
        + (1.0 / r2)
        * ((1.0 + ez**2 * s2) * w_ss + (3.0 / s - (r * ezz - 2.0 * ez**2) * s) * w_s)
        - (2.0 * ez * s / r) * w_sz
    )
    rhs -= lw
    rhs[0, :] = 0.0  # Dirichlet
    return rhs


def elliptic_solve_A(
    disc: Discretization,
    profile: TrivialFlowProfile,
    eta_hat,
    phi: np.ndarray,
    cache: OperatorCache | None = None,
    eps_dom: float | None = None,
) -> np.ndarray:
    """One application of the A-map: solve the linear elliptic system."""
    shape = surface_shape(disc, eta_hat)
    eps = default_eps_dom(disc.params) if eps_dom is None else eps_dom
    _require_domain(shape, eps)
    if cache is None:
        cache = OperatorCache(maxsize=1)
    lu = cache.factorization(disc, shape)
    rhs = _source_terms(disc, profile, shape, phi)
    sol = scipy.linalg.lu_solve(lu, rhs.ravel())
    if not np.all(np.isfinite(sol)):
        raise LinearSolveFailure("elliptic solve produced non-finite values")
    return sol.reshape(disc.n_s, disc.n_z + 1)


# ---------------------------------------------------------------------------
# Bernoulli functional and residual


def _bracket(
    disc: Discretization,
    profile: TrivialFlowProfile,
    shape: SurfaceShape,
    a_field: np.ndarray,
) -> np.ndarray:
    """Surface Bernoulli terms except the eta_zz part of the curvature."""
    d2 = profile.params.d**2
    sigma = profile.params.sigma
    m = profile.m
    r = shape.r
    r2 = r * r
    psis1 = profile.psi_s(1.0)
    sa = a_field[0, :]
    sa_s = disc.grid.d1[0, :] @ a_field
    sa_z = disc.dz @ a_field[0, :]
    t_s = sa_s + d2 * psis1 / r2  # full psi-bar_s trace
    t_z = r * sa_z - shape.eta_z * (sa_s + (2.0 * m + d2 * psis1) / r2)
    fsurf = profile.swirl.f(r2 * sa + m)
    return (
        sigma / (r * np.sqrt(shape.w))
        + 0.5 * (t_s**2 + t_z**2)
        + fsurf**2 / (2.0 * r2)
        + 2.0 * m * t_s / r2
        + 2.0 * m**2 / (r2 * r2)
    )


def bernoulli_Q(
    disc: Discretization,
    profile: TrivialFlowProfile,
    eta_hat,
    phi: np.ndarray,
    a_field: np.ndarray | None = None,
    cache: OperatorCache | None = None,
    eps_dom: float | None = None,
) -> float:
    """Averaged Bernoulli constant with weight (1 + eta_z^2)^{3/2}."""
    shape = surface_shape(disc, eta_hat)
    if a_field is None:
        a_field = elliptic_solve_A(disc, profile, eta_hat, phi, cache, eps_dom)
    w32 = shape.w**1.5
    b = _bracket(disc, profile, shape, a_field)
    return disc.average(w32 * b) / disc.average(w32)


def trivial_Q(profile: TrivialFlowProfile) -> float:
    p = profile.params
    return (
        p.sigma / p.d
        + 0.5 * profile.c**2
        + profile.swirl.f(profile.m) ** 2 / (2.0 * p.d**2)
    )


@dataclasses.dataclass(frozen=True, eq=False)
class ResidualParts:
    eta_res: np.ndarray  # cosine coefficients, modes 1..n_z
    phi_res: np.ndarray  # grid values
    q: float
    a_field: np.ndarray


def residual_F(
    disc: Discretization,
    profile: TrivialFlowProfile,
    eta_hat,
    phi: np.ndarray,
    cache: OperatorCache | None = None,
    eps_dom: float | None = None,
) -> ResidualParts:
    """(eta - M1, phi - A) with M1 in cosine-coefficient space.

    M1 inverts twice z-differentiation of the weighted Bernoulli defect; the
    mean mode is projected out first (Q makes it vanish up to rounding).
    """
    shape = surface_shape(disc, eta_hat)
    eps = default_eps_dom(disc.params) if eps_dom is None else eps_dom
    _require_domain(shape, eps)
    a_field = elliptic_solve_A(disc, profile, eta_hat, phi, cache, eps_dom)
    w32 = shape.w**1.5
    b = _bracket(disc, profile, shape, a_field)
    q = disc.average(w32 * b) / disc.average(w32)
    v = (w32 * (b - q)) / profile.params.sigma
    vect = disc.coeff @ v
    ks = np.arange(1, disc.n_z + 1) * disc.nu
    m1_hat = -vect[1:] / ks**2
    eta_res = np.asarray(eta_hat, dtype=float) - m1_hat
    phi_res = phi - a_field
    return ResidualParts(eta_res, phi_res, q, a_field)


# ---------------------------------------------------------------------------
# states, packing, Newton correction


@dataclasses.dataclass(frozen=True, eq=False)
class WaveState:
    lam: float
    eta_hat: np.ndarray
    phi: np.ndarray
    q: float
    res_norm: float
    newton_iters: int
    diagnostics: dict = dataclasses.field(default_factory=dict)

    def with_diagnostics(self, diag: dict) -> "WaveState":
        return dataclasses.replace(self, diagnostics=diag)


def pack(disc: Discretization, eta_hat: np.ndarray, phi: np.ndarray) -> np.ndarray:
    return np.concatenate([eta_hat, phi[1:, :].ravel()])


def unpack(disc: Discretization, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    eta_hat = x[: disc.n_z]
    phi = np.zeros((disc.n_s, disc.n_z + 1))
    phi[1:, :] = x[disc.n_z :].reshape(disc.n_s - 1, disc.n_z + 1)
    return eta_hat, phi


@dataclasses.dataclass(frozen=True)
class FixedLambda:
    lam: float


@dataclasses.dataclass(frozen=True, eq=False)
class Arclength:
    """Bordered constraint tangent . (aug - prev) = ds, aug = [lambda, x]."""

    prev: np.ndarray
    tangent: np.ndarray
    ds: float


class ProfileCache:
    """Memoizes the laminar profile by lambda (finite-difference reuse)."""

    def __init__(self, factory: Callable[[float], TrivialFlowProfile]):
        self._factory = factory
        self._data: dict[float, TrivialFlowProfile] = {}

    def __call__(self, lam: float) -> TrivialFlowProfile:
        key = float(lam)
        if key not in self._data:
            if len(self._data) > 128:
                self._data.clear()
            self._data[key] = self._factory(key)
        return self._data[key]


def _scaled_norm(vec: np.ndarray, x: np.ndarray) -> float:
    return float(np.max(np.abs(vec)) / (1.0 + np.max(np.abs(x), initial=0.0)))


def newton_correct(
    disc: Discretization,
    profile_factory,
    x0: np.ndarray,
    constraint,
    *,
    lam: float | None = None,
    tol: float = NEWTON_TOL,
    max_iter: int = MAX_NEWTON,
    eps_dom: float | None = None,
    cache: OperatorCache | None = None,
) -> WaveState:
    """Newton-chord iteration on the packed unknowns.

    FixedLambda solves for (eta, phi) at the given lambda. Arclength prepends
    lambda to the unknown vector and appends the bordered constraint row. The
    Jacobian is built by forward differences column by column and reused
    across iterations until the residual stalls.
    """
    profiles = (
        profile_factory if isinstance(profile_factory, ProfileCache) else ProfileCache(profile_factory)
    )
    if cache is None:
        cache = OperatorCache()
    arclength = isinstance(constraint, Arclength)
    if arclength:
        if lam is None:
            raise ValueError("arclength correction needs a starting lambda")
        aug = np.concatenate([[lam], x0])
    else:
        aug = np.asarray(x0, dtype=float).copy()
        lam_fixed = constraint.lam

    def full_residual(vec: np.ndarray) -> np.ndarray:
        if arclength:
            lam_v = vec[0]
            eta_hat, phi = unpack(disc, vec[1:])
        else:
            lam_v = lam_fixed
            eta_hat, phi = unpack(disc, vec)
        parts = residual_F(disc, profiles(lam_v), eta_hat, phi, cache, eps_dom)
        res = np.concatenate([parts.eta_res, parts.phi_res[1:, :].ravel()])
        if arclength:
            row = constraint.tangent @ (vec - constraint.prev) - constraint.ds
            res = np.concatenate([res, [row]])
        return res

    fval = full_residual(aug)
    jac = None
    fresh = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        if _scaled_norm(fval, aug) <= tol:
            break
        if jac is None:
            jac = np.empty((fval.size, aug.size))
            for col in range(aug.size):
                h = FD_STEP * (1.0 + abs(aug[col]))
                probe = aug.copy()
                probe[col] += h
                jac[:, col] = (full_residual(probe) - fval) / h
            fresh = True
        try:
            delta = np.linalg.solve(jac, -fval)
        except np.linalg.LinAlgError as exc:
            raise LinearSolveFailure(f"singular Newton system: {exc}") from exc
        step = 1.0
        for attempt in range(6):
            try:
                trial = aug + step * delta
                ftrial = full_residual(trial)
                break
            except DomainCollapse:
                if attempt == 5:
                    raise
                step *= 0.5
        if np.max(np.abs(ftrial)) <= 0.9 * np.max(np.abs(fval)) or fresh:
            aug = trial
            fval = ftrial
            fresh = False
        else:
            jac = None  # stale chord Jacobian: rebuild and retry
    else:
        if _scaled_norm(fval, aug) > tol:
            raise NoConvergence(
                f"Newton stalled at residual {_scaled_norm(fval, aug):.3e} "
                f"after {max_iter} iterations"
            )
    if arclength:
        lam_out = float(aug[0])
        eta_hat, phi = unpack(disc, aug[1:])
    else:
        lam_out = lam_fixed
        eta_hat, phi = unpack(disc, aug)
    parts = residual_F(disc, profiles(lam_out), eta_hat, phi, cache, eps_dom)
    return WaveState(
        lam=lam_out,
        eta_hat=eta_hat,
        phi=phi,
        q=parts.q,
        res_norm=_scaled_norm(
            np.concatenate([parts.eta_res, parts.phi_res[1:, :].ravel()]), aug
        ),
        newton_iters=n_iter,
    )


# ---------------------------------------------------------------------------
# diagnostics


def vorticity_lp_norm(
    disc: Discretization,
    profile: TrivialFlowProfile,
    eta_hat,
    phi: np.ndarray,
    p: float = VORTICITY_P,
) -> float:
    """Weighted L^p norm of the vorticity sources on the physical domain.

    Written in flattened variables the p-th power is
    2 pi * int_z int_s (d+eta)^4 s^3 |gamma(X) + psibar G(X) F'(X)|^p ds dz
    with X the physical Stokes argument.
    """
    shape = surface_shape(disc, eta_hat)
    d2 = profile.params.d**2
    s = disc.grid.s[:, None]
    r2 = (shape.r**2)[None, :]
    psibar = phi + profile.psi(disc.grid.s)[:, None] * d2 / r2
    xbar = r2 * s * s * psibar
    dens = np.abs(
        profile.gamma(xbar) + psibar * profile.swirl.g(xbar) * profile.swirl.f_prime(xbar)
    ) ** p
    radial = disc.grid.wq3 @ dens  # int_0^1 s^3 (...) ds per z-node
    zavg = disc.average(shape.r**4 * radial)
    total = 2.0 * math.pi * profile.params.L * zavg
    return float(total ** (1.0 / p))


def state_diagnostics(
    disc: Discretization,
    profile: TrivialFlowProfile,
    state: WaveState,
    refine: int = 8,
) -> dict:
    """Branch-monitoring quantities for one converged state."""
    p = disc.params
    shape = surface_shape(disc, state.eta_hat)
    nf = refine * disc.n_z
    zf = np.linspace(0.0, p.L / 2.0, nf + 1)
    ks = np.arange(1, disc.n_z + 1) * disc.nu
    cosf = np.cos(np.outer(zf, ks))
    eta_f = cosf @ state.eta_hat
    eta_z_f = -np.sin(np.outer(zf, ks)) @ (ks * state.eta_hat)
    eta_zz_f = cosf @ (-(ks**2) * state.eta_hat)
    dzf = zf[1] - zf[0]
    holder = 0.0
    if nf >= 1:
        holder = float(np.max(np.abs(np.diff(eta_zz_f))) / dzf**HOLDER_ALPHA)
    c2a = float(
        np.max(np.abs(eta_f)) + np.max(np.abs(eta_z_f)) + np.max(np.abs(eta_zz_f)) + holder
    )
    b = _bracket(disc, profile, shape, state.phi)
    speed_sq = 2.0 * (b - p.sigma / (shape.r * np.sqrt(shape.w)))
    energies = state.eta_hat**2
    return {
        "amplitude": float(np.max(np.abs(eta_f))),
        "abs_lambda": abs(state.lam),
        "eta_norm_c2a": c2a,
        "vorticity_lp": vorticity_lp_norm(disc, profile, state.eta_hat, state.phi),
        "min_surface_radius": float(p.d + np.min(eta_f)),
        "abs_q": abs(state.q),
        "surface_speed_sq_norm": float(np.max(np.abs(speed_sq))),
        "eta_mode_energies": energies,
    }


# ---------------------------------------------------------------------------
# continuation


@dataclasses.dataclass(frozen=True, eq=False)
class Branch:
    states: tuple
    rows: tuple
    termination: str
    point: BifurcationPoint
    ds: float


def _diagnostics_finite(diag: dict, cap: float) -> bool:
    for key, val in diag.items():
        arr = np.asarray(val, dtype=float)
        if not np.all(np.isfinite(arr)):
            return False
        if key != "min_surface_radius" and np.any(np.abs(arr) > cap):
            return False
    return True


def continue_branch(
    disc: Discretization,
    profile_factory,
    point: BifurcationPoint,
    ds: float,
    n_steps: int,
    *,
    eps_dom: float | None = None,
    newton_tol: float = NEWTON_TOL,
    max_newton: int = MAX_NEWTON,
    blowup_cap: float = BLOWUP_CAP,
) -> Branch:
    """Pseudo-arclength march along the nontrivial branch through `point`.

    The first tangent is the normalized kernel predictor; afterwards secant
    tangents. Failed steps retry with ds/2 and ds/4 before giving up. The
    march stops with a labeled termination cause: step-budget, step-failure,
    domain-collapse, or diagnostic-blow-up.
    """
    profiles = ProfileCache(profile_factory)
    prof0 = profiles(point.lam)
    eps = default_eps_dom(disc.params) if eps_dom is None else eps_dom
    pred = kernel_predictor(prof0, point, disc.grid.s, disc.z, disc.nu, disc.n_z)
    phi_pred = pred.phi.copy()
    phi_pred[0, :] = 0.0  # vanishes analytically; enforce the layout exactly
    p_x = pack(disc, pred.eta_coeffs, phi_pred)
    scale = float(np.linalg.norm(p_x))
    # sign of ds picks the initial direction; the march itself uses positive
    # increments along the running secant tangent
    direction = 1.0 if ds >= 0.0 else -1.0
    step_len = abs(ds)
    tangent = np.concatenate([[0.0], direction * p_x / scale])
    aug_prev = np.concatenate([[point.lam], np.zeros_like(p_x)])
    cache = OperatorCache()
    states: list[WaveState] = []
    rows: list[dict] = []
    termination = "step-budget"
    for step in range(1, n_steps + 1):
        state = None
        step_ds = step_len
        for attempt in range(3):
            guess = aug_prev + step_ds * tangent
            try:
                state = newton_correct(
                    disc,
                    profiles,
                    guess[1:],
                    Arclength(aug_prev, tangent, step_ds),
                    lam=guess[0],
                    tol=newton_tol,
                    max_iter=max_newton,
                    eps_dom=eps,
                    cache=cache,
                )
                break
            except NoConvergence:
                step_ds *= 0.5
            except DomainCollapse:
                termination = "domain-collapse"
                break
        if termination == "domain-collapse":
            break
        if state is None:
            termination = "step-failure"
            break
        diag = state_diagnostics(disc, profiles(state.lam), state)
        state = state.with_diagnostics(diag)
        states.append(state)
        rows.append(
            {
                "step": step,
                "lambda": state.lam,
                "amplitude": diag["amplitude"],
                "Q": state.q,
                "min_surface_radius": diag["min_surface_radius"],
                "vorticity_lp": diag["vorticity_lp"],
                "abs_lambda": diag["abs_lambda"],
                "eta_norm_c2a": diag["eta_norm_c2a"],
                "abs_q": diag["abs_q"],
                "surface_speed_sq_norm": diag["surface_speed_sq_norm"],
                "newton_iters": state.newton_iters,
                "ds": step_ds,
                "eta_mode_energies": diag["eta_mode_energies"].tolist(),
            }
        )
        if diag["min_surface_radius"] < eps:
            termination = "domain-collapse"
            break
        if not _diagnostics_finite(diag, blowup_cap):
            termination = "diagnostic-blow-up"
            break
        aug_new = np.concatenate([[state.lam], pack(disc, state.eta_hat, state.phi)])
        secant = aug_new - aug_prev
        nrm = float(np.linalg.norm(secant))
        if nrm > 0.0:
            tangent = secant / nrm
        aug_prev = aug_new
    return Branch(tuple(states), tuple(rows), termination, point, ds)


# ---------------------------------------------------------------------------
# physical reconstruction


@dataclasses.dataclass(frozen=True, eq=False)
class PhysicalFields:
    """Velocity and stream data mapped back to the physical jet domain."""

    r: np.ndarray  # (n_s, n_z+1) physical radius (d + eta(z)) s
    z: np.ndarray
    psi: np.ndarray  # stream density psi(r, z)
    stream: np.ndarray  # Stokes stream function r^2 psi
    u_r: np.ndarray
    u_theta: np.ndarray
    u_z: np.ndarray
    surface_stream: np.ndarray
    surface_bernoulli_residual: np.ndarray
    curvature: np.ndarray


def reconstruct_physical(
    disc: Discretization,
    profile: TrivialFlowProfile,
    state: WaveState,
) -> PhysicalFields:
    """Map a flattened state to physical velocities and surface checks."""
    p = profile.params
    d2 = p.d**2
    m = profile.m
    shape = surface_shape(disc, state.eta_hat)
    s = disc.grid.s[:, None]
    rr = shape.r[None, :]
    r_phys = rr * s
    psi_l = profile.psi(disc.grid.s)[:, None]
    psi_l_s = profile.psi_s(disc.grid.s)[:, None]
    psibar = state.phi + d2 * psi_l / rr**2
    psibar_s = disc.grid.d1 @ state.phi + d2 * psi_l_s / rr**2
    psibar_z = state.phi @ disc.dz.T - 2.0 * d2 * psi_l * shape.eta_z[None, :] / rr**3
    psi_r = psibar_s / rr
    psi_z = psibar_z - psibar_s * s * shape.eta_z[None, :] / rr
    stream = r_phys**2 * psibar
    u_r = r_phys * psi_z
    u_theta = r_phys * psibar * profile.swirl.g(stream)
    u_z = -(2.0 * psibar + r_phys * psi_r)
    kap = shape.eta_zz / shape.w**1.5 - 1.0 / (shape.r * np.sqrt(shape.w))
    rs = shape.r
    fsurf = profile.swirl.f(stream[0, :])
    bern = (
        0.5 * rs**2 * (psi_r[0, :] ** 2 + psi_z[0, :] ** 2)
        + fsurf**2 / (2.0 * rs**2)
        + 2.0 * m * psi_r[0, :] / rs
        + 2.0 * m**2 / rs**4
        - p.sigma * kap
        - state.q
    )
    return PhysicalFields(
        r=r_phys,
        z=disc.z,
        psi=psibar,
        stream=stream,
        u_r=u_r,
        u_theta=u_theta,
        u_z=u_z,
        surface_stream=stream[0, :],
        surface_bernoulli_residual=bern,
        curvature=kap,
    )
