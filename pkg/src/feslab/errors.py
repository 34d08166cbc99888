"""Exception types raised across the toolkit."""


class FeslabError(Exception):
    """Base class for all toolkit errors."""


class ShapeError(FeslabError):
    """An array argument has the wrong shape or dimension."""


class InvalidInterval(FeslabError):
    """An interval was given with lower bound above upper bound."""


class IntegrationDiverged(FeslabError):
    """The integrated state left the finite range.

    Attributes
    ----------
    sample_index : int or None
        Index of the sampling interval in which divergence occurred,
        when raised from a closed-loop run.
    """

    def __init__(self, message, sample_index=None):
        super().__init__(message)
        self.sample_index = sample_index


class InputOutOfRange(FeslabError):
    """An input vector lies outside the admissible input set."""


class NoConvergence(FeslabError):
    """An iterative solver exhausted its iteration budget."""


class StepSizeOutOfRange(FeslabError):
    """A gradient step size lies outside the contractive range."""


class RelaxationOutOfRange(FeslabError):
    """A relaxation gain lies outside (0, 1]."""


class BestResponseFailed(FeslabError):
    """A local best-response solver failed or returned an infeasible point."""


class InvalidSamplingPeriod(FeslabError):
    """A sampling period was not a positive real number."""


class BelowMinimumSamplingPeriod(FeslabError):
    """The sampling period is at or below the certifiable minimum."""


class NotPerronMatrix(FeslabError):
    """A matrix expected to be entrywise nonnegative has negative entries."""


class OutsideCertifiedRegion(FeslabError):
    """The (sampling period, relaxation gain) pair is not certified."""


class UnstableOpenLoop(FeslabError):
    """A plant expected to be open-loop stable is not."""


class ConfigError(FeslabError):
    """A run configuration file is malformed or inconsistent."""
