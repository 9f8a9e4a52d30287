"""Exception types shared across the package."""


class FlowError(RuntimeError):
    """Base class for flow-integration failures."""


class StepLimitExceeded(FlowError):
    """The integrator hit its step budget before reaching the target flow parameter."""


class ToleranceFailure(FlowError):
    """Local error control could not meet the requested tolerances at the minimum step."""


class DomainError(ValueError):
    """A quantity left its mathematically admissible domain beyond numerical slack."""


class PhaseError(ValueError):
    """Ramsey phases violate the unitarity condition theta - phi = pi (mod 2*pi)."""


class ConfigError(ValueError):
    """A run configuration failed validation."""
