"""Exception types raised by the solvers and diagnostics."""


class LTSError(Exception):
    """Base class for all errors raised by exactlts."""


class InvalidInputError(LTSError, ValueError):
    """Non-finite entries, bad shapes or an out-of-range trimming parameter."""


class SingularFitError(LTSError):
    """The retained rows of a subset do not have full column rank.

    ``subset`` holds the 0-based indices of the retained observations when
    the caller knows them, otherwise ``None``.
    """

    def __init__(self, message, subset=None):
        super().__init__(message)
        self.subset = None if subset is None else tuple(int(i) for i in subset)


class DegenerateTieError(LTSError):
    """Too many masks tie at a single point to enumerate them."""

    def __init__(self, message, count=None):
        super().__init__(message)
        self.count = count


class NoCandidateError(LTSError):
    """No candidate point passed the border membership test."""


class CapExceededError(LTSError):
    """Exhaustive enumeration would exceed the configured cap."""

    def __init__(self, message, count=None, cap=None):
        super().__init__(message)
        self.count = count
        self.cap = cap
