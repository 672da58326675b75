"""Exception hierarchy. Every error is a ``ValueError`` subclass."""


class ProjectionError(ValueError):
    pass


class ZeroVector(ProjectionError):
    pass


class EmptyInput(ProjectionError):
    pass


class RankDeficient(ProjectionError):
    pass


class DimensionMismatch(ProjectionError):
    pass


class DimensionTooSmall(ProjectionError):
    pass


class TooManyDirections(ProjectionError):
    pass


class TooManySubsets(ProjectionError):
    pass


class DegenerateB(ProjectionError):
    pass


class InvalidShape(ProjectionError):
    pass
