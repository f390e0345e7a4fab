"""Exception types shared across the package."""


class FrontierAdaptError(Exception):
    """Base class for all package-specific errors."""


class InvalidConfig(FrontierAdaptError):
    """Configuration value outside its documented domain."""


class WindowTooSmall(FrontierAdaptError):
    """Local window holds fewer points than the fit needs (degree + 2)."""


class NumericalBreakdown(FrontierAdaptError):
    """LP pivot fell below the stability threshold or a certificate check failed."""


class DegenerateWindow(FrontierAdaptError):
    """Order statistics too degenerate (ties) for the tail estimators."""


class DomainError(FrontierAdaptError):
    """Argument outside the mathematical domain of a tail function."""


class DegenerateInput(FrontierAdaptError):
    """Input unusable for fitting (e.g. nonpositive risks, too few points)."""


class NonEquidistantDesign(FrontierAdaptError):
    """Input x column is not equidistant within tolerance."""


class ParseError(FrontierAdaptError):
    """Malformed input file."""


class UnknownName(FrontierAdaptError):
    """Unknown builtin name (boundary function or error model)."""


class PipelineError(FrontierAdaptError):
    """Too many Monte Carlo replicates failed to produce an estimate."""
