"""Exception hierarchy for relaycycle.

Input problems derive from :class:`ValueError`, numerical failures from
:class:`RuntimeError`; the CLI maps the two families to exit codes 2 and 3.
"""


class RelayCycleError(Exception):
    """Base class for all errors raised by this package."""


class PlantError(RelayCycleError, ValueError):
    """The plant description is unusable."""


class NotHurwitz(PlantError):
    """The monic denominator s^2 + a1 s + a2 is not Hurwitz stable."""


class NonPositiveGain(PlantError):
    """The numerator constant term (and hence the DC gain) is not positive."""


class NonMonicDenominator(PlantError):
    """The denominator is not given as ``[1.0, a1, a2]``."""


class BelowSwitchOnset(RelayCycleError, ValueError):
    """A quantity defined only for xi > -kappa was requested at xi <= -kappa."""


class UnsupportedPoleClass(RelayCycleError, ValueError):
    """No closed form exists for the requested quantity at this pole class."""


class OutsideSlidingSegment(RelayCycleError, ValueError):
    """Sliding dynamics requested away from the segment |x1| <= |kappa|."""


class NoSlidingSegment(RelayCycleError, ValueError):
    """kappa = 0: the switching line carries no sliding segment."""


class NoCrossings(RelayCycleError, ValueError):
    """A simulator trace contains no switching-line crossings."""


class NumericalError(RelayCycleError, RuntimeError):
    """Base class for numerical failures that indicate a defect."""


class NoConvergence(NumericalError):
    """A bracketed root refinement failed to reach its tolerance."""


class NotContractive(NumericalError):
    """A sampled contraction constant came out >= 1."""


class MaxIterExceeded(NumericalError):
    """Fixed-point iteration hit its cap; ``trace`` holds the partial run."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace
