"""Exception types shared across the package."""


class MatchFieldError(Exception):
    """Base class for errors raised by blockmf."""


class NonUniqueMinimum(MatchFieldError):
    """A determinant has several terms of minimal weight.

    Never expected for the block diagonal weight matrices; seeing it means the
    weight construction is broken.
    """


class InternalInconsistency(MatchFieldError):
    """A derived object violated an invariant that should hold by construction."""


class InstanceTooLarge(MatchFieldError):
    """The requested (r, n) exceeds the configured brute-force bounds."""


class NotStandard(MatchFieldError, ValueError):
    """A monomial expected to be standard is divisible by an initial monomial."""


class InvalidCycle(MatchFieldError, ValueError):
    """A vertex sequence is not an even cycle of the given graph."""
