"""Problem data: jet geometry and the vorticity/swirl profile functions.

gamma is the azimuthal vorticity density gamma(Psi); F is the swirl
function F(Psi) with F(0) = 0 so the swirl velocity F(Psi)/r stays finite
on the axis. Both are polynomials with coefficients listed lowest degree
first; evaluation of F(Psi)/Psi goes through the factored form
G(x) = sum_{k>=1} c_k x^(k-1), never through division.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P

from .errors import ConfigError, HardViolation


@dataclass(frozen=True)
class FlowParameters:
    """Undisturbed jet radius d, surface tension sigma, axial period L."""

    d: float
    sigma: float
    L: float

    def __post_init__(self):
        for name in ("d", "sigma", "L"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
                raise ConfigError(f"{name} must be a positive finite number, got {v!r}")

    @property
    def nu(self) -> float:
        return 2.0 * math.pi / self.L


def _trim(coeffs) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    while c and c[-1] == 0.0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class VorticityFunction:
    """Polynomial gamma(x); variants zero / constant / polynomial."""

    coeffs: tuple[float, ...]

    @classmethod
    def zero(cls) -> "VorticityFunction":
        return cls(())

    @classmethod
    def constant(cls, value: float) -> "VorticityFunction":
        return cls(_trim([value]))

    @classmethod
    def polynomial(cls, coeffs) -> "VorticityFunction":
        return cls(_trim(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1 if self.coeffs else -1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, x):
        if not self.coeffs:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        return P.polyval(x, self.coeffs)

    def deriv(self, x):
        c = P.polyder(self.coeffs) if len(self.coeffs) > 1 else [0.0]
        return P.polyval(x, c)

    def deriv2(self, x):
        c = P.polyder(self.coeffs, 2) if len(self.coeffs) > 2 else [0.0]
        return P.polyval(x, c)


@dataclass(frozen=True)
class SwirlFunction:
    """Polynomial F(x) with F(0) = 0; supplies F, F', G = F/x and (FF')', exactly."""

    coeffs: tuple[float, ...]
    _d1: tuple[float, ...] = field(init=False, repr=False, compare=False)
    _ffp: tuple[float, ...] = field(init=False, repr=False, compare=False)
    _ffp_d1: tuple[float, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        c = tuple(float(v) for v in self.coeffs)
        object.__setattr__(self, "coeffs", c)
        d1 = tuple(P.polyder(c)) if len(c) > 1 else (0.0,)
        # FF' assembled from the axis-regular part only (constant term dropped,
        # matching the forced F(0)=0 convention; validation flags the raw term)
        reg = (0.0,) + c[1:]
        ffp = tuple(P.polymul(reg, P.polyder(reg) if len(reg) > 1 else [0.0]))
        object.__setattr__(self, "_d1", d1)
        object.__setattr__(self, "_ffp", _trim(ffp) or (0.0,))
        object.__setattr__(
            self, "_ffp_d1", tuple(P.polyder(self._ffp)) if len(self._ffp) > 1 else (0.0,)
        )

    @classmethod
    def zero(cls) -> "SwirlFunction":
        return cls(())

    @property
    def is_zero(self) -> bool:
        return not any(self.coeffs[1:]) if self.coeffs else True

    def f(self, x):
        if not self.coeffs:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        return P.polyval(x, self.coeffs)

    def f_prime(self, x):
        return P.polyval(x, self._d1)

    def g(self, x):
        """G(x) = F(x)/x via the factored coefficients; G(0) = F'(0)."""
        if len(self.coeffs) < 2:
            return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
        return P.polyval(x, self.coeffs[1:])

    def ff_prime(self, x):
        return P.polyval(x, self._ffp)

    def ff_prime_deriv(self, x):
        return P.polyval(x, self._ffp_d1)


@dataclass(frozen=True)
class ValidationReport:
    valid: bool
    gamma_prime_sup: float
    ffprime_prime_sup: float
    interval: tuple[float, float]
    warnings: tuple[str, ...]


def validate_assumptions(
    gamma: VorticityFunction,
    swirl: SwirlFunction,
    interval: tuple[float, float] = (-1.0, 1.0),
) -> ValidationReport:
    """Check the standing profile assumptions.

    F(0) != 0 is a hard error (swirl velocity F/r would blow up on the axis).
    Polynomials of degree >= 2 have unbounded derivatives on the real line;
    that only enters through the sup bounds on the working interval, so it is
    reported as a warning, with the sups recorded.
    """
    f0 = swirl.f(0.0)
    if f0 != 0.0:
        raise HardViolation(f"F(0) = {f0} != 0: swirl must vanish on the axis")
    lo, hi = interval
    if not (lo < hi):
        raise ConfigError("validation interval must satisfy lo < hi")
    grid = np.linspace(lo, hi, 2001)
    g_sup = float(np.max(np.abs(gamma.deriv(grid))))
    ffp_sup = float(np.max(np.abs(swirl.ff_prime_deriv(grid))))
    warns = []
    if gamma.degree >= 2:
        warns.append(
            f"gamma has degree {gamma.degree}: gamma' unbounded globally, "
            f"sup over {interval} used"
        )
    if len(swirl.coeffs) >= 3 and any(swirl.coeffs[2:]):
        warns.append(
            f"F has degree {len(swirl.coeffs) - 1}: (FF')' unbounded globally, "
            f"sup over {interval} used"
        )
    return ValidationReport(True, g_sup, ffp_sup, (float(lo), float(hi)), tuple(warns))


# --- JSON configuration block -------------------------------------------------

_PROFILE_KEYS = {"d", "sigma", "L", "gamma", "F"}


def _require_number(block: dict, key: str) -> float:
    if key not in block:
        raise ConfigError(f"missing required key {key!r}")
    v = block[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ConfigError(f"key {key!r} must be a number, got {type(v).__name__}")
    return float(v)


def _parse_gamma(block) -> VorticityFunction:
    if block is None:
        return VorticityFunction.zero()
    if not isinstance(block, dict):
        raise ConfigError("gamma must be an object")
    kind = block.get("type")
    if kind == "zero":
        extra = set(block) - {"type"}
        if extra:
            raise ConfigError(f"unknown keys in gamma: {sorted(extra)}")
        return VorticityFunction.zero()
    if kind == "constant":
        extra = set(block) - {"type", "value"}
        if extra:
            raise ConfigError(f"unknown keys in gamma: {sorted(extra)}")
        return VorticityFunction.constant(_require_number(block, "value"))
    if kind == "poly":
        extra = set(block) - {"type", "coeffs"}
        if extra:
            raise ConfigError(f"unknown keys in gamma: {sorted(extra)}")
        coeffs = block.get("coeffs")
        if not isinstance(coeffs, list) or not all(
            isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs
        ):
            raise ConfigError("gamma.coeffs must be a list of numbers (lowest degree first)")
        return VorticityFunction.polynomial(coeffs)
    raise ConfigError(f"gamma.type must be one of zero|constant|poly, got {kind!r}")


def _parse_swirl(block) -> SwirlFunction:
    if block is None:
        return SwirlFunction.zero()
    if not isinstance(block, dict):
        raise ConfigError("F must be an object")
    extra = set(block) - {"coeffs"}
    if extra:
        raise ConfigError(f"unknown keys in F: {sorted(extra)}")
    coeffs = block.get("coeffs", [])
    if not isinstance(coeffs, list) or not all(
        isinstance(c, (int, float)) and not isinstance(c, bool) for c in coeffs
    ):
        raise ConfigError("F.coeffs must be a list of numbers (lowest degree first)")
    if coeffs and coeffs[0] != 0:
        raise ConfigError("F constant coefficient must be 0 or absent")
    return SwirlFunction(tuple(float(c) for c in coeffs))


def parse_profile_config(block: dict):
    """Parse the model config block into (FlowParameters, gamma, F).

    Unknown keys are rejected; the swirl profile is validated (hard errors
    raise before any computation).
    """
    if not isinstance(block, dict):
        raise ConfigError("profile config must be a JSON object")
    extra = set(block) - _PROFILE_KEYS
    if extra:
        raise ConfigError(f"unknown keys in profile config: {sorted(extra)}")
    params = FlowParameters(
        _require_number(block, "d"), _require_number(block, "sigma"), _require_number(block, "L")
    )
    gamma = _parse_gamma(block.get("gamma"))
    swirl = _parse_swirl(block.get("F"))
    validate_assumptions(gamma, swirl)
    return params, gamma, swirl
