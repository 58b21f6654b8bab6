"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Malformed input.  ``path`` locates the offending field."""

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}" if path else reason)


class NoPerfectMatching(Exception):
    """The edge set admits no perfect matching."""


class IterationLimitExceeded(RuntimeError):
    """The walk ran past its iteration cap; the theory says this cannot happen."""


class PreconditionViolated(ValueError):
    """An operation's documented precondition does not hold for this input."""


class InvalidProfile(ValueError):
    """A strategy profile is not a probability distribution per player."""


class NotDoublyStochastic(ValueError):
    """Agent strategies do not stack into a doubly stochastic matrix."""


class GuardExceeded(ValueError):
    """Input too large for brute-force enumeration."""


class InvariantViolation(AssertionError):
    """An internal invariant failed; indicates a defect, not bad input."""
