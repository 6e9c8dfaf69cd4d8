"""Exception hierarchy shared by all quantcalc modules."""


class QuantCalcError(Exception):
    """Base class for every error raised by this package."""


class InvalidParameter(QuantCalcError):
    """A distribution family was given parameters outside its domain."""


class DomainError(QuantCalcError):
    """An argument lies outside the mathematical domain of an operation."""


class InfiniteMean(QuantCalcError):
    """The requested operation needs a finite mean, but the mean diverges."""


class NonConvergence(QuantCalcError):
    """An iterative numeric routine failed to reach its tolerance."""


class NonFiniteEvaluation(QuantCalcError):
    """An integrand returned NaN or infinity strictly inside the interval."""


class InvalidBracket(QuantCalcError):
    """Root bracketing failed: the function has the same sign at both ends."""


class NotStochasticallyOrdered(QuantCalcError):
    """The pair (X, Y) violates Q_X <= Q_Y on the check grid.

    Carries the location and size of the worst violation.
    """

    def __init__(self, u: float, gap: float, message: str = ""):
        self.u = u
        self.gap = gap
        super().__init__(
            message or f"quantile dominance fails at u={u:.6g} (gap {gap:.3g})"
        )


class EqualMeans(QuantCalcError):
    """A spread construction needs E[X] < E[Y], but the means coincide."""


class MissingDensity(QuantCalcError):
    """A check needs a probability density the model does not provide."""


class InsufficientDerivatives(QuantCalcError):
    """The test function does not carry derivatives up to the needed order."""


class NonMonotonePhi(QuantCalcError):
    """The shape function of a proportional-quantile pair must be increasing."""


class HypothesisFailed(QuantCalcError):
    """A verifier's hypothesis gate failed on the grid.

    Carries a witness describing where and how the hypothesis broke.
    """

    def __init__(self, witness, message: str = ""):
        self.witness = witness
        super().__init__(message or f"hypothesis fails: {witness}")


class InvalidSampleSize(QuantCalcError):
    """Monte Carlo sample sizes must be nonnegative integers."""


class QZero(QuantCalcError):
    """Proportional residuals are undefined where the quantile is zero."""
