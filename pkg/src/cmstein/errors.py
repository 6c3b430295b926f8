"""Exception hierarchy.

``ValidationError`` subclasses signal bad input or a violated precondition
(the CLI maps them to exit code 2); anything else is a runtime failure.
"""


class CMSteinError(Exception):
    pass


class ValidationError(CMSteinError, ValueError):
    pass


class OddTotalDegree(ValidationError):
    pass


class EmptySequence(ValidationError):
    pass


class ZeroMeanDegree(ValidationError):
    pass


class InvalidDistribution(ValidationError):
    pass


class InvalidConfiguration(ValidationError):
    pass


class InvalidVertex(ValidationError):
    pass


class StatisticOutOfBound(ValidationError):
    pass


class UnknownStatistic(ValidationError):
    pass


class PreconditionViolated(ValidationError):
    pass


class ZeroVariance(ValidationError):
    pass


class DegenerateVariance(ValidationError):
    pass


class EmptySample(ValidationError):
    pass
