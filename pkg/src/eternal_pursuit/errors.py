class PursuitError(Exception):
    """Base class for errors raised by this package."""


class GraphError(PursuitError, ValueError):
    pass


class BudgetExceeded(PursuitError):
    """The solver would need more table entries than the configured cap."""


class IllegalMove(PursuitError, ValueError):
    pass


class StrategyError(PursuitError):
    """A strategy table is missing a state or does not match its graph."""


class BoundError(PursuitError, ValueError):
    """A bound's hypothesis does not hold on the given input."""
