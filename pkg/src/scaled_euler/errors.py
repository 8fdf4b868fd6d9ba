"""Exception hierarchy shared by the solver modules."""


class ScaledEulerError(Exception):
    """Base class for every error raised by this package."""


class InvalidStateError(ScaledEulerError, ValueError):
    """A state, model or grid violates its construction invariants."""


class DegenerateEigenvectorError(ScaledEulerError):
    """Eigenvectors were requested at rho = 0, where they contain 1/rho."""


class BracketError(ScaledEulerError):
    """A monotone root-find could not bracket a sign change."""


class ConvergenceError(ScaledEulerError):
    """A root-find or quadrature finished without meeting its tolerance."""


class DomainError(ScaledEulerError):
    """The requested point lies outside the admissible part of a curve."""


class OffLocusError(ScaledEulerError):
    """The two shock-speed formulas disagree: the pair is not on the locus."""


class NoIntersectionError(ScaledEulerError):
    """The two-shock wave curves do not meet (epsilon too large for the data)."""


class OverlapError(ScaledEulerError):
    """The two rarefaction curves overlap instead of separating (epsilon too large)."""


class WrongCaseError(ScaledEulerError, ValueError):
    """The Riemann data belongs to a different case than the routine handles."""


class NotBrioError(ScaledEulerError, ValueError):
    """The entropy pair only exists for the Brio flux."""


class CFLViolationError(ScaledEulerError):
    """The wave speed after a step exceeded the one used to pick dt."""


class DomainOverflowError(ScaledEulerError):
    """A wave reached the edge of the finite-volume window."""


class ConfigError(ScaledEulerError, ValueError):
    """A CLI scenario file or flag could not be parsed or validated."""
