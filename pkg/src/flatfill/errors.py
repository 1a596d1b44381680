"""Error taxonomy.

Every exception carries a stable ``code`` (the class name) that the CLI puts
into structured error reports.
"""


class FlatfillError(Exception):
    """Base class for all validation errors raised by this package."""

    @property
    def code(self):
        return type(self).__name__


class EmptyFacet(FlatfillError):
    pass


class EmptySet(FlatfillError):
    pass


class NotSimplicial(FlatfillError):
    pass


class DegreeZero(FlatfillError):
    pass


class WrongDegree(FlatfillError):
    pass


class NotABoundary(FlatfillError):
    pass


class DegreeTooHigh(FlatfillError):
    pass


class CapExceeded(FlatfillError):
    pass


class NotACone(FlatfillError):
    pass


class NotCarried(FlatfillError):
    pass


class CarrierNotAcyclic(FlatfillError):
    pass


class OracleViolation(FlatfillError):
    pass


class NotACycle(FlatfillError):
    pass


class IntersectionNotControlled(FlatfillError):
    pass


class NotACover(FlatfillError):
    pass


class HypothesisViolated(FlatfillError):
    pass


class EmptyMember(FlatfillError):
    pass


class ChoiceNotGlobal(FlatfillError):
    pass


class UnsupportedParameters(FlatfillError):
    pass


class NotATree(FlatfillError):
    pass


class LPInfeasible(FlatfillError):
    pass


class LPUnbounded(FlatfillError):
    pass
