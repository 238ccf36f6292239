"""Exception hierarchy shared by all modules."""


class CCRError(Exception):
    """Base class for errors raised by ccr_reduce."""


class InvalidArgument(CCRError, ValueError):
    """An argument has the wrong shape, type or ambient space."""


class PreconditionViolation(CCRError):
    """A mathematical precondition of an operation does not hold."""


class FirstClassViolation(PreconditionViolation):
    """The constraint subspace is not isotropic.

    Attributes
    ----------
    pair : tuple of ndarray
        Two vectors f, h of the constraint space with B(f, h) != 0.
    value : float
        The offending pairing B(f, h).
    """

    def __init__(self, message, pair=None, value=None):
        super().__init__(message)
        self.pair = pair
        self.value = value


class StageAdmissibility(PreconditionViolation):
    """A stage of a constraint chain is not contained in the previous commutant."""

    def __init__(self, message, stage=None, vector=None):
        super().__init__(message)
        self.stage = stage
        self.vector = vector


class UnsupportedAction(CCRError):
    """The requested group element cannot act on the grid."""


class NoWitnessFound(CCRError):
    """A search for a counterexample came back empty."""


class UnsupportedScenario(CCRError):
    """The scenario does not support the requested command."""
