"""Exception types raised by muband.

Each class carries the process exit code the CLI uses when the error
escapes a subcommand.
"""


class MubandError(Exception):
    exit_code = 1


class DomainError(MubandError, ValueError):
    """Argument outside the admissible domain of an operation."""

    exit_code = 65


class CertificateError(MubandError):
    """A grid certificate (log-concavity, smoothing conditions, ...) failed."""

    exit_code = 66


class WidthError(MubandError, ValueError):
    """No strict width surplus, so no band map with Lip < 1 exists."""

    exit_code = 67


class NoRootError(MubandError):
    """Bracket scanning did not find a sign change."""

    exit_code = 68

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class MatchError(MubandError, ValueError):
    """Mean curvatures of adjacent model spaces do not match."""

    exit_code = 69


class ThresholdError(MubandError, ValueError):
    """sigma violates the strict threshold of the negative-ambient bound."""

    exit_code = 70

    def __init__(self, message, threshold=None):
        super().__init__(message)
        self.threshold = threshold


class HypothesisError(MubandError):
    """One of the three comparison hypotheses is violated."""

    exit_code = 2

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class BarrierError(MubandError):
    exit_code = 71


class BoundaryMinimizerError(MubandError):
    exit_code = 72


class AdmissibilityError(MubandError, ValueError):
    exit_code = 73


class BudgetError(MubandError, ValueError):
    exit_code = 74


class ParseError(MubandError, ValueError):
    exit_code = 64


class DivergenceWarning(UserWarning):
    """sigma sits within round-off of the divergence threshold."""
