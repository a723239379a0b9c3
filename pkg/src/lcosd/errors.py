"""Exception types shared across the package."""


class DimensionMismatch(ValueError):
    """Vector/matrix dimensions do not agree."""


class RankDeficient(ValueError):
    """A matrix (or matrix block) does not have the required rank."""


class ParseError(ValueError):
    """Malformed alist input."""


class MissingTrace(ValueError):
    """A decode result without a trace was passed where a trace is required."""


class InvalidCurve(ValueError):
    """A list-FER curve violates its monotonicity contract."""


class UnreachableTarget(ValueError):
    """No list size within the search range meets the requested FER target."""
