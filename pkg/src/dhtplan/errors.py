"""Exception hierarchy shared by all modules."""


class DhtError(Exception):
    """Base class for all package errors."""


class DomainError(DhtError, ValueError):
    """An input violates a documented precondition."""


class DegenerateSpecError(DomainError):
    """The two hypothesized rates do not form a usable pair (e.g. p0 >= p1)."""


class NoConvergenceError(DhtError):
    """A plan search exhausted its budget without meeting its tolerance.

    Carries the best gap achieved so callers can report diagnostics.
    """

    def __init__(self, message, best_gap=None, iterations=None):
        super().__init__(message)
        self.best_gap = best_gap
        self.iterations = iterations


class SolverError(DhtError):
    """Numerical failure inside a solver (e.g. singular Jacobian)."""


class StateError(DhtError):
    """An inspection state machine was driven past a terminal status."""


class LadderError(DhtError):
    """Level-ladder construction failed; names the offending level pair."""


class NoRecommendationError(DhtError):
    """Fuzzy inference produced no usable score (all rules silent)."""
