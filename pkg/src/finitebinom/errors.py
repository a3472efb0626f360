"""Exception types raised across the package."""


class FiniteBinomError(Exception):
    """Base class for every error raised by :mod:`finitebinom`."""


class DistinctnessViolated(FiniteBinomError, ValueError):
    """Two values that must be pairwise distinct coincide."""


class InvalidState(FiniteBinomError, ValueError):
    pass


class InvalidParams(FiniteBinomError, ValueError):
    pass


class DepletedGroup(FiniteBinomError, ValueError):
    """An outcome was requested for a group with no remaining members."""


class DomainError(FiniteBinomError, ValueError):
    pass


class BudgetExceeded(FiniteBinomError, RuntimeError):
    """Exhaustive enumeration would visit more paths than allowed."""


# fitter


class FitError(FiniteBinomError):
    pass


class SingularHankel(FitError, ValueError):
    pass


class ComplexRoots(FitError, ValueError):
    pass


class ZeroRoot(FitError, ValueError):
    pass


class InvalidFit(FitError, ValueError):
    """The fitted roots or weights fail the validity conditions.

    The offending :class:`~finitebinom.fitter.ValidityReport` is kept on
    ``self.report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class AnchorTooSmall(FitError, ValueError):
    pass


class TotalTooSmall(FitError, ValueError):
    pass


# ingestion


class NonPositivePrice(FiniteBinomError, ValueError):
    pass


class InsufficientData(FiniteBinomError, ValueError):
    pass
