"""Laminar (z-independent) jet profiles.

The Stokes stream function of a laminar flow is Psi = r^2 psi(r) with
psi solving a singular Cauchy problem in the scaled radius s = r/d:

    psi_ss + (3/s) psi_s + d^2 gamma(d^2 s^2 psi)
        + d^2 psi G(d^2 s^2 psi) F'(d^2 s^2 psi) = 0,   psi(0) = lam,

where the swirl term is the factored form of (FF')(Psi)/r^2. The axis is
handled by a second-order Taylor seed at s = 1e-6; integration uses an
adaptive high-order Runge-Kutta scheme with dense output.

Key derived scalars: m = d^2 psi(1) (surface value of Psi), the surface
wave speed c = 2 m / d^2 + psi_s(1), the Robin coefficients (g, h) of the
linearized surface condition, and the potential q(s) entering both the
shooting problem for wave modes and the surface eigenvalue problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BlowUp, DegenerateSurfaceSpeed
from .model import FlowParameters, SwirlFunction, VorticityFunction

SEED_EPS = 1e-6
PSI_CAP = 1e8


@dataclass(frozen=True)
class TrivialFlowProfile:
    params: FlowParameters
    gamma: VorticityFunction
    swirl: SwirlFunction
    lam: float
    m: float
    c: float
    rtol: float
    atol: float
    seed_coeff: float  # gamma(0) + lam * (FF')'(0)
    _sol: object = field(repr=False, compare=False)
    _n_steps: int = field(repr=False, compare=False, default=0)

    @property
    def degenerate_c(self) -> bool:
        scale = abs(self.psi_s(1.0)) + 2.0 * abs(self.m) / self.params.d**2
        return abs(self.c) <= 1e-12 * max(1.0, scale)

    @property
    def m_error_estimate(self) -> float:
        return 10.0 * (self.rtol * abs(self.m) + self.atol)

    def _split(self, s):
        arr = np.atleast_1d(np.asarray(s, dtype=float))
        return arr, arr < SEED_EPS, np.ndim(s) == 0

    def psi(self, s):
        arr, tiny, scalar = self._split(s)
        out = np.empty_like(arr)
        if tiny.any():
            out[tiny] = self.lam - self.seed_coeff * self.params.d**2 * arr[tiny] ** 2 / 8.0
        if (~tiny).any():
            out[~tiny] = self._sol.sol(arr[~tiny])[0]
        return float(out[0]) if scalar else out

    def psi_s(self, s):
        arr, tiny, scalar = self._split(s)
        out = np.empty_like(arr)
        if tiny.any():
            out[tiny] = -self.seed_coeff * self.params.d**2 * arr[tiny] / 4.0
        if (~tiny).any():
            out[~tiny] = self._sol.sol(arr[~tiny])[1]
        return float(out[0]) if scalar else out

    def psi_ss(self, s):
        """Second derivative recovered from the profile equation itself."""
        arr, tiny, scalar = self._split(s)
        d2 = self.params.d**2
        out = np.empty_like(arr)
        if tiny.any():
            out[tiny] = -self.seed_coeff * d2 / 4.0
        keep = ~tiny
        if keep.any():
            sk = arr[keep]
            ps = self.psi(sk)
            pps = self.psi_s(sk)
            x = d2 * sk**2 * ps
            out[keep] = (
                -3.0 * pps / sk
                - d2 * self.gamma(x)
                - d2 * ps * self.swirl.g(x) * self.swirl.f_prime(x)
            )
        return float(out[0]) if scalar else out

    def arg(self, s):
        """The Psi-argument d^2 s^2 psi(s) fed to gamma and F."""
        return self.params.d**2 * np.asarray(s, dtype=float) ** 2 * self.psi(s)

    def q(self, s):
        """Potential q(s) = -d^2 s^2 gamma'(X) - (FF')'(X), X = d^2 s^2 psi."""
        sa = np.asarray(s, dtype=float)
        x = self.arg(sa)
        val = -self.params.d**2 * sa**2 * self.gamma.deriv(x) - self.swirl.ff_prime_deriv(x)
        return float(val) if np.ndim(s) == 0 else val

    def q_neg_sup(self, refine: int = 10) -> float:
        n = max(1001, refine * max(self._n_steps, 1) + 1)
        grid = np.linspace(0.0, 1.0, n)
        return float(np.max(np.maximum(-self.q(grid), 0.0)))

    def table(self, n: int = 201) -> np.ndarray:
        s = np.linspace(0.0, 1.0, n)
        return np.column_stack([s, self.psi(s), self.psi_s(s), self.q(s)])


def solve_trivial(
    params: FlowParameters,
    gamma: VorticityFunction,
    swirl: SwirlFunction,
    lam: float,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> TrivialFlowProfile:
    d2 = params.d**2
    a = float(gamma(0.0) + lam * swirl.ff_prime_deriv(0.0))

    def rhs(s, y):
        psi, dpsi = y
        x = d2 * s * s * psi
        return (
            dpsi,
            -3.0 * dpsi / s
            - d2 * gamma(x)
            - d2 * psi * swirl.g(x) * swirl.f_prime(x),
        )

    def runaway(s, y):
        return PSI_CAP - abs(y[0])

    runaway.terminal = True
    eps = SEED_EPS
    y0 = [lam - a * d2 * eps * eps / 8.0, -a * d2 * eps / 4.0]
    sol = solve_ivp(
        rhs, (eps, 1.0), y0, method="DOP853", rtol=rtol, atol=atol, dense_output=True,
        events=runaway,
    )
    if sol.status == 1 or not sol.success or sol.t[-1] < 1.0:
        raise BlowUp(
            f"laminar profile left the representable range at s={sol.t[-1]:.6g} "
            f"(lambda={lam})"
        )
    psi1, dpsi1 = sol.y[:, -1]
    m = d2 * psi1
    c = 2.0 * m / d2 + dpsi1
    return TrivialFlowProfile(
        params, gamma, swirl, float(lam), float(m), float(c), rtol, atol, a, sol,
        len(sol.t) - 1,
    )


def surface_speed(profile: TrivialFlowProfile) -> float:
    """c(lam) = 2 m / d^2 + psi_s(1): the speed entering the dispersion relation."""
    return profile.c


def boundary_coefficients(profile: TrivialFlowProfile) -> tuple[float, float]:
    """Robin coefficients (g, h) of the linearized free-surface condition.

    g = c^2/(sigma d); h collects the curvature and Bernoulli contributions:
    h = d^-2 + (2 c^2 + d^-2 F(m)^2 + c (d^2 gamma + FF')(m)) / (sigma d).
    With this normalization mu is an eigenvalue of the surface problem iff
    the dispersion function vanishes at (mu, lam).
    """
    if profile.degenerate_c:
        raise DegenerateSurfaceSpeed(f"c(lambda={profile.lam}) = {profile.c} ~ 0")
    p = profile.params
    m, c = profile.m, profile.c
    d2 = p.d**2
    g = c * c / (p.sigma * p.d)
    bern = d2 * profile.gamma(m) + profile.swirl.ff_prime(m)
    h = 1.0 / d2 + (2.0 * c * c + profile.swirl.f(m) ** 2 / d2 + c * bern) / (p.sigma * p.d)
    return float(g), float(h)


def check_condition_h(profile: TrivialFlowProfile, refine: int = 10) -> float:
    """Margin h - sup(q_-) of the realness/simplicity condition; > 0 means it holds."""
    _, h = boundary_coefficients(profile)
    return h - profile.q_neg_sup(refine)


def make_profile_factory(
    params: FlowParameters,
    gamma: VorticityFunction,
    swirl: SwirlFunction,
    rtol: float = 1e-10,
    atol: float = 1e-12,
) -> Callable[[float], TrivialFlowProfile]:
    def factory(lam: float) -> TrivialFlowProfile:
        return solve_trivial(params, gamma, swirl, lam, rtol=rtol, atol=atol)

    return factory
