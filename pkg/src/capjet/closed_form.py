"""Bessel closed forms for the constant-vorticity dispersion analysis.

For constant vorticity gamma0 and no swirl the bifurcation condition can be
solved for the surface speed c in closed form. With x = k nu d and
xi = 4 sigma / (d^5 gamma0^2) the two solution branches are

    b^pm(x) = (2 sigma / (d^3 gamma0)) (x^2 - 1)
              / (1 pm sqrt(1 + xi x (x^2 - 1) I0(x) / I1(x))),

continuous at the removable points x = 0 (both branches) and x = 1 (minus
branch). Those points are evaluated by two-sided step-halving Richardson
limits of the displayed formula; the independently known limit values serve
as cross-checks in the test suite, not as the implementation.

The module also certifies the monotonicity and inequality claims the
root-counting argument rests on (pointwise on dense grids, with margins) and
classifies how many wavenumbers k can satisfy the bifurcation condition for
a given surface speed.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .bessel import bessel_i
from .errors import ConfigError, DomainError, InequalityViolation

XI_STAR = 16.0 / 81.0
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def f_ratio(x):
    """f(x) = x I0(x)/I1(x), extended by its limit f(0) = 2."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if (arr < 0).any():
        raise DomainError("f_ratio requires x >= 0")
    out = np.full_like(arr, 2.0)
    pos = arr > 0
    if pos.any():
        xp = arr[pos]
        out[pos] = xp * bessel_i(0, xp) / bessel_i(1, xp)
    return float(out[0]) if np.ndim(x) == 0 else out


def chi(x):
    """chi(x) = I1 / (x (1 - x^2) I0) on (0,1); increasing onto (1/2, inf)."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if (arr <= 0).any() or (arr >= 1).any():
        raise DomainError("chi requires 0 < x < 1")
    val = bessel_i(1, arr) / (arr * (1.0 - arr * arr) * bessel_i(0, arr))
    return float(val[0]) if np.ndim(x) == 0 else val


def chi_inverse(xi: float) -> float:
    """The unique x1 in (0,1) with chi(x1) = xi, for xi > 1/2."""
    if not xi > 0.5:
        raise DomainError("chi only takes values > 1/2")
    lo, hi = 1e-12, 1.0 - 1e-14
    if chi(lo) >= xi:
        # xi barely above 1/2; x1 is pinned against 0
        return lo
    return float(brentq(lambda t: chi(t) - xi, lo, hi, xtol=1e-15, rtol=8.9e-16))


def g_ratio(x):
    """g(x) = x I0 / ((x^2 - 1) I1) on (1, inf); strictly decreasing."""
    arr = np.atleast_1d(np.asarray(x, dtype=float))
    if (arr <= 1).any():
        raise DomainError("g_ratio requires x > 1")
    val = arr * bessel_i(0, arr) / ((arr * arr - 1.0) * bessel_i(1, arr))
    return float(val[0]) if np.ndim(x) == 0 else val


def irrotational_dispersion_rhs(k: int, nu: float, d: float) -> float:
    """sigma/c^2 at an irrotational bifurcation point: k nu d^2 I0 / ((x^2-1) I1).

    Here x = k nu d; no bifurcation exists for x <= 1.
    """
    x = k * nu * d
    if x <= 1.0:
        raise DomainError(f"no irrotational bifurcation for k*nu*d = {x} <= 1")
    return k * nu * d * d * bessel_i(0, x) / ((x * x - 1.0) * bessel_i(1, x))


def g_pm(xi: float, sign: int) -> float:
    """g^pm(xi) = 9 xi - 1 pm sqrt(1 - 2 xi); sign of b^pm curvature at 0."""
    if not 0.0 < xi <= 0.5:
        raise DomainError("g_pm defined for 0 < xi <= 1/2")
    return 9.0 * xi - 1.0 + sign * math.sqrt(1.0 - 2.0 * xi)


@dataclass(frozen=True)
class ConstVortCase:
    d: float
    sigma: float
    gamma0: float

    def __post_init__(self):
        if self.d <= 0 or self.sigma <= 0:
            raise ConfigError("d and sigma must be positive")
        if self.gamma0 == 0:
            raise ConfigError("constant vorticity gamma0 must be nonzero")

    @property
    def xi(self) -> float:
        return 4.0 * self.sigma / (self.d**5 * self.gamma0**2)

    @cached_property
    def x1(self) -> float | None:
        """Left endpoint of the branch domain when xi > 1/2, else None."""
        return chi_inverse(self.xi) if self.xi > 0.5 else None

    @property
    def y_plus(self) -> float | None:
        if self.xi > 0.5:
            return None
        return -2.0 * self.sigma / (
            self.d**3 * self.gamma0 * (1.0 + math.sqrt(1.0 - 2.0 * self.xi))
        )

    @property
    def y_minus(self) -> float | None:
        if self.xi > 0.5:
            return None
        return -2.0 * self.sigma / (
            self.d**3 * self.gamma0 * (1.0 - math.sqrt(1.0 - 2.0 * self.xi))
        )

    @property
    def y0(self) -> float | None:
        """Common branch value at x1 (only when xi > 1/2)."""
        if self.x1 is None:
            return None
        return 2.0 * self.sigma * (self.x1**2 - 1.0) / (self.d**3 * self.gamma0)

    @property
    def axis_speed(self) -> float:
        """Surface speed carrying the extra axis root when 1/(nu d) is integer."""
        return -self.d**2 * self.gamma0 * bessel_i(1, 1.0) / bessel_i(0, 1.0)


def _normalize_sign(sign) -> int:
    if sign in (1, +1, "+", "plus"):
        return 1
    if sign in (-1, "-", "minus"):
        return -1
    raise ConfigError(f"branch sign must be +1 or -1, got {sign!r}")


def _b_formula(x: float, sgn: int, case: ConstVortCase) -> float:
    # regular points only; callers handle x = 0 and the minus branch at x = 1
    w = (x * x - 1.0) * f_ratio(x)
    disc = 1.0 + case.xi * w
    if disc < 0.0:
        if disc < -1e-10:
            raise DomainError(f"branch sqrt argument negative at x={x}")
        disc = 0.0
    denom = 1.0 + sgn * math.sqrt(disc)
    return 2.0 * case.sigma * (x * x - 1.0) / (case.d**3 * case.gamma0 * denom)


def _richardson_even(sample, h0: float, levels: int = 3) -> float:
    """Limit of sample(h) as h->0 assuming L + c2 h^2 + c4 h^4 + ... .

    Neville tableau over h0, h0/2, ..., h0/2^(levels-1), eliminating one even
    power per stage.
    """
    t = [sample(h0 / 2.0**j) for j in range(levels)]
    for k in range(1, levels):
        fac = 4.0**k
        t = [(fac * t[i + 1] - t[i]) / (fac - 1.0) for i in range(len(t) - 1)]
    return t[0]


def b_pm(x: float, sign, case: ConstVortCase) -> float:
    """Branch value b^sign(x); removable points via two-sided Richardson limits."""
    sgn = _normalize_sign(sign)
    x = float(x)
    if x < 0.0:
        raise DomainError("b_pm requires x >= 0")
    if case.x1 is not None and x < case.x1 - 1e-12:
        raise DomainError(f"x={x} below the branch domain start x1={case.x1}")
    if x == 0.0:
        # b is even in x, so the two-sided average equals the one-sided sample.
        # Accuracy of this limit degrades as xi -> 1/2, where the square-root
        # branch point collides with the origin and shrinks the h^2 series
        # radius the extrapolation relies on.
        return _richardson_even(lambda h: _b_formula(h, sgn, case), 0.02, levels=4)
    if sgn == -1 and abs(x - 1.0) <= 1e-12:
        return _richardson_even(
            lambda h: 0.5 * (_b_formula(1.0 + h, sgn, case)
                             + _b_formula(1.0 - h, sgn, case)),
            0.02,
            levels=4,
        )
    return _b_formula(x, sgn, case)


def _b_minus_smooth(x: float, case: ConstVortCase) -> float:
    """Minus branch with the removable x=1 factor cancelled algebraically.

    Rationalizing the denominator of the displayed formula turns it into
    -(2 sigma/(d^3 gamma0 xi)) (1 + sqrt(1 + xi w)) / f(x), which is the same
    function but smooth through x = 1. Used for bracketing and maximizing.
    """
    w = (x * x - 1.0) * f_ratio(x)
    disc = max(1.0 + case.xi * w, 0.0)
    return -(2.0 * case.sigma / (case.d**3 * case.gamma0 * case.xi)) * (
        1.0 + math.sqrt(disc)
    ) / f_ratio(x)


def _f_x(x: float) -> float:
    """f'(x) = x (1 - I0 I2 / I1^2), with f'(0) = 0."""
    if x == 0.0:
        return 0.0
    i0, i1, i2 = bessel_i(0, x), bessel_i(1, x), bessel_i(2, x)
    return x * (1.0 - i0 * i2 / (i1 * i1))


def _golden_max(fn, a: float, b: float, tol: float = 1e-11) -> float:
    c = b - _INVPHI * (b - a)
    e = a + _INVPHI * (b - a)
    fc, fe = fn(c), fn(e)
    while b - a > tol:
        if fc < fe:
            a, c, fc = c, e, fe
            e = a + _INVPHI * (b - a)
            fe = fn(e)
        else:
            b, e, fe = e, c, fc
            c = b - _INVPHI * (b - a)
            fc = fn(c)
    return 0.5 * (a + b)


def max_b_minus(case: ConstVortCase) -> tuple[float, float]:
    """(argmax, max) of b^- for gamma0 > 0, xi < 16/81 (unique interior maximum).

    The bracket comes from the sign of b^-_x, which for gamma0 > 0 equals the
    sign of b^2 f_x - 2 sigma x / d.
    """
    if case.gamma0 < 0 or not case.xi < XI_STAR:
        raise DomainError("max_b_minus needs gamma0 > 0 and xi < 16/81")

    def slope_sign(x: float) -> float:
        b = _b_minus_smooth(x, case)
        return b * b * _f_x(x) - 2.0 * case.sigma * x / case.d

    x_lo, x = 1e-6, 0.25
    if slope_sign(x_lo) <= 0.0:
        raise DomainError("b^- not increasing near 0; bracket assumption broken")
    while slope_sign(x) > 0.0:
        x_lo, x = x, 2.0 * x
        if x > 600.0:
            raise DomainError("no slope sign change of b^- found below x=600")
    x_star = _golden_max(lambda t: _b_minus_smooth(t, case), x_lo, x)
    return x_star, _b_minus_smooth(x_star, case)


def b_minus_curvature_at_zero(case: ConstVortCase) -> float:
    """b^-''(0) by Richardson-extrapolated even second differences."""
    b0 = b_pm(0.0, -1, case)

    def second_diff(h: float) -> float:
        # even function: (b(h) - 2 b(0) + b(-h)) / h^2 collapses to this
        return 2.0 * (_b_formula(h, -1, case) - b0) / (h * h)

    return _richardson_even(second_diff, 0.1)


def find_curvature_threshold(d: float = 1.0, sigma: float = 1.0,
                             lo: float = 0.12, hi: float = 0.28,
                             xi_tol: float = 1e-8) -> float:
    """xi at which the curvature of b^- at x=0 changes sign (bisection)."""

    def curv(xi: float) -> float:
        gamma0 = 2.0 * math.sqrt(sigma / (d**5 * xi))
        return b_minus_curvature_at_zero(ConstVortCase(d, sigma, gamma0))

    c_lo, c_hi = curv(lo), curv(hi)
    if not (c_lo > 0.0 > c_hi):
        raise DomainError(f"curvature does not change sign on [{lo}, {hi}]")
    while hi - lo > xi_tol:
        mid = 0.5 * (lo + hi)
        if curv(mid) > 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class CertRow:
    name: str
    n_points: int
    min_margin: float
    x_at_min: float


@dataclass(frozen=True)
class InequalityReport:
    rows: tuple[CertRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.min_margin > 0.0 for r in self.rows)

    def row(self, name: str) -> CertRow:
        for r in self.rows:
            if r.name == name:
                return r
        raise KeyError(name)


def verify_inequalities(n_points: int = 10_000, x_min: float = 0.01,
                        x_max: float = 50.0) -> InequalityReport:
    """Certify the four special-function claims pointwise with margins.

    (a) f_x - x f_xx > 0 on a log grid over (0, x_max];
    (b) x/(1+sqrt(x^2+1)) <= I1/I0 <= x/sqrt(x^2+4), both gaps positive;
    (c) chi strictly increasing on (0,1), successive differences at 1e-4 steps;
    (d) g strictly decreasing on (1, x_max].
    Raises InequalityViolation at the first nonpositive margin.

    The grid floor keeps (a) above its rounding noise: the expression is
    O(x^3) near 0 while its individual terms are O(1/x), so double-precision
    noise is about 1.6e-15/x and the signal wins only for x above ~1e-3.
    """
    rows = []
    grid = np.geomspace(x_min, x_max, n_points)
    i0 = bessel_i(0, grid)
    i1 = bessel_i(1, grid)
    r = i0 / i1

    lhs = -2.0 * grid**2 * r**3 + 4.0 * grid * r**2 + 2.0 * grid**2 * r - 2.0 * grid
    rows.append(_cert("fx_minus_xfxx", grid, lhs))

    ratio = i1 / i0
    gap_low = ratio - grid / (1.0 + np.sqrt(grid**2 + 1.0))
    gap_up = grid / np.sqrt(grid**2 + 4.0) - ratio
    gaps = np.minimum(gap_low, gap_up)
    rows.append(_cert("bessel_ratio_sandwich", grid, gaps))

    xs = np.arange(1, 10_000) * 1e-4
    diffs = np.diff(chi(xs))
    rows.append(_cert("chi_increasing", xs[1:], diffs))

    xg = 1.0 + np.geomspace(1e-4, x_max - 1.0, n_points)
    gdiffs = -np.diff(g_ratio(xg))
    rows.append(_cert("g_decreasing", xg[1:], gdiffs))

    return InequalityReport(tuple(rows))


def _cert(name: str, xs: np.ndarray, margins: np.ndarray) -> CertRow:
    i = int(np.argmin(margins))
    if margins[i] <= 0.0:
        raise InequalityViolation(f"{name} fails at x={xs[i]}: margin={margins[i]}")
    return CertRow(name, margins.size, float(margins[i]), float(xs[i]))


class RootCount(Enum):
    NONE = "None"
    AT_MOST_ONE = "AtMostOne"
    AT_MOST_TWO = "AtMostTwo"
    EXTRA_AXIS_ROOT = "ExtraAxisRoot"


def classify_root_count(c_value: float, case: ConstVortCase,
                        nu: float | None = None) -> RootCount:
    """Count bound for wavenumbers k solving the bifurcation condition at speed c.

    For gamma0 < 0 the count follows from the gamma0 > 0 case with all speed
    inequalities reversed, which is the same as classifying -c for -gamma0
    (both branches flip sign with gamma0).
    """
    if case.gamma0 < 0:
        flipped = ConstVortCase(case.d, case.sigma, -case.gamma0)
        return classify_root_count(-c_value, flipped, nu)

    if nu is not None:
        n = 1.0 / (nu * case.d)
        axis_c = case.axis_speed
        if (abs(n - round(n)) <= 1e-9 * max(1.0, n) and round(n) >= 1
                and abs(c_value - axis_c) <= 1e-9 * max(1.0, abs(axis_c))):
            return RootCount.EXTRA_AXIS_ROOT

    xi = case.xi
    if xi >= XI_STAR:
        if xi < 0.5 and case.y_minus < c_value < case.y_plus:
            return RootCount.NONE
        return RootCount.AT_MOST_ONE

    _, bmax = max_b_minus(case)
    if abs(c_value - bmax) <= 1e-12 * max(1.0, abs(bmax)):
        return RootCount.AT_MOST_ONE
    if c_value > case.y_plus or c_value <= case.y_minus:
        return RootCount.AT_MOST_ONE
    if bmax < c_value <= case.y_plus:
        return RootCount.NONE
    return RootCount.AT_MOST_TWO
