"""Exception hierarchy shared across the package.

``NumericalValidityError`` subclasses signal that a run produced numbers
that cannot be trusted (truncation saturated, integrator defect too large)
as opposed to bad user input.
"""


class EpsqueezeError(Exception):
    """Base class for all package-specific errors."""


class DegenerateModelError(EpsqueezeError, ValueError):
    """Both detuning and coupling vanish; the model has no regime."""


class CoalescenceError(EpsqueezeError, ValueError):
    """Eigenvectors coalesce at the exceptional point; no biorthogonal pair."""


class NoGroundStateError(EpsqueezeError, ValueError):
    """The quadratic Hamiltonian is not bounded from below for these parameters."""


class IllConditionedEstimatorError(EpsqueezeError, ValueError):
    """Susceptibility too small for a linearized parameter estimate."""


class InvalidBasisError(EpsqueezeError, ValueError):
    """Fock basis cutoffs or sector constraints are unusable."""


class NumericalValidityError(EpsqueezeError, RuntimeError):
    """Results are numerically invalid (CLI exit code 3)."""


class CutoffError(NumericalValidityError):
    """State preparation leaves more tail mass outside the basis than allowed."""


class TruncationError(NumericalValidityError):
    """Evolved state reached the top of the truncated basis."""


class IntegrationError(NumericalValidityError):
    """Propagator failed its accuracy monitor (norm drift, step control)."""


class StepSizeError(NumericalValidityError):
    """Per-step symplectic defect exceeded tolerance; reduce dt."""


class ConfigError(EpsqueezeError, ValueError):
    """Run configuration is missing, malformed, or inconsistent (exit code 2)."""
