"""Exception hierarchy shared by every module.

The CLI maps :class:`MalformedInput` to exit code 1 and
:class:`LimitExceeded` to exit code 2.
"""


class StrahlerError(Exception):
    pass


class MalformedInput(StrahlerError, ValueError):
    """Input text or structure violates its format."""


class MalformedTerm(MalformedInput):
    def __init__(self, message, position):
        super().__init__(f"{message} at position {position}")
        self.position = position


class NotATree(MalformedInput):
    pass


class MalformedEncoding(MalformedInput):
    pass


class MalformedInstance(MalformedInput):
    pass


class MalformedQbf(MalformedInput):
    pass


class NotLayered(MalformedInput):
    pass


class InvalidNodes(MalformedInput):
    pass


class LimitExceeded(StrahlerError):
    """A size, depth or count guard tripped."""


class BudgetExceeded(LimitExceeded):
    pass


class ThresholdTooLarge(StrahlerError):
    """k exceeds floor(log2 n); the threshold answer is trivially false."""


class NoneExists(StrahlerError):
    pass


class Unproductive(StrahlerError):
    pass


class NoTree(StrahlerError):
    pass
