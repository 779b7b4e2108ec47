"""Exception hierarchy shared by all modules."""


class HomstructError(Exception):
    pass


# matlie
class AlgebraMismatch(HomstructError):
    pass


class ClosureViolation(HomstructError):
    pass


class DimensionMismatch(HomstructError, ValueError):
    pass


class NonConvergence(HomstructError):
    pass


# reductive
class NoComplement(HomstructError):
    pass


class DegenerateSystem(HomstructError):
    pass


class NotSubalgebra(HomstructError):
    pass


class NotReductive(HomstructError):
    pass


class ActionUndefined(HomstructError):
    pass


# diffgeo
class OutsideDomain(HomstructError, ValueError):
    pass


class SingularMetric(HomstructError):
    pass


class NotProductMetric(HomstructError):
    pass


# models / verifier
class LabelMismatch(HomstructError, ValueError):
    pass


class FrameMismatch(HomstructError):
    pass
