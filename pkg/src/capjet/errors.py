"""Shared exception types."""


class CapjetError(Exception):
    """Base class for all toolkit errors."""


class HardViolation(CapjetError):
    """A structural modelling assumption is broken (e.g. nonzero swirl on the axis)."""


class ConfigError(CapjetError):
    """Malformed or schema-violating configuration input."""


class OverflowRange(CapjetError):
    """Argument outside the range where a special function stays in double range."""


class DomainError(CapjetError):
    """Function evaluated outside its mathematical domain."""


class InequalityViolation(CapjetError):
    """A certified special-function inequality failed at a grid point."""


class BlowUp(CapjetError):
    """The laminar profile ODE left the representable range before s=1."""


class DegenerateSurfaceSpeed(CapjetError):
    """Surface wave speed c vanished; dispersion quantities are undefined there."""


class SplitRequired(CapjetError):
    """A scan interval contains a zero of c and must be split."""


class UnstableDerivative(CapjetError):
    """Finite-difference derivative estimates at h and h/2 disagree."""


class EigensolveFailure(CapjetError):
    """The generalized eigenvalue solve did not return usable pairs."""


class DomainCollapse(CapjetError):
    """The free surface touched the axis (min over z of d+eta below the floor)."""


class NoConvergence(CapjetError):
    """Newton correction failed to reach tolerance within the iteration budget."""


class LinearSolveFailure(CapjetError):
    """A linear system solve inside the wave solver failed (singular/ill-scaled)."""
