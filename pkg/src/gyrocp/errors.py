"""Exception hierarchy shared by the numerical modules."""


class GyroError(Exception):
    """Base class for every error raised by gyrocp."""


class DomainError(GyroError, ValueError):
    """Input lies outside the domain where a formula is defined."""


class ToleranceNotMet(GyroError):
    """Adaptive integration exhausted its budget.

    The best available estimate is attached as ``estimate`` (and the
    error bound as ``error``) so callers can still inspect it.
    """

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class DegenerateRoots(GyroError):
    """The two bulk decay constants coincide; the generic mode basis is singular."""


class SingularMatrix(GyroError):
    """A 2x2 system is numerically singular (condition number too large)."""


class LightLineSingular(GyroError):
    """Vacuum decay constant vanishes (grazing incidence on the light line)."""


class CoincidentPoints(GyroError):
    """Free-space Green dyadic requested at coinciding source/observation points."""


class ImagPartTooLarge(GyroError):
    """A quantity that must be real came back with a significant imaginary part."""


class NoSolution(GyroError):
    """Transition frequency lies outside the SPP resonance band."""


class BandEdgeDivergence(GyroError):
    """Quasi-static force diverges because the transition sits on a band edge."""


class OutsideWindow(GyroError):
    """Weak-bias closed form requested outside its validity window."""


class BranchLost(GyroError):
    """SPP branch continuation found no bracketed root."""


class NegativeRate(GyroError):
    """Decay rate came out negative beyond round-off (integration failure)."""


class DegenerateLevels(GyroError):
    """Two atomic levels coincide in a multi-level atom."""


class ConfigError(GyroError):
    """Malformed or inconsistent scenario configuration."""


class MissingSIFields(ConfigError):
    """SI conversion requested but the config lacks the SI inputs."""
