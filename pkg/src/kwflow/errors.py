"""Exception types shared across the package."""


class KwflowError(Exception):
    """Base class for all errors raised by this package."""


class GraphSpecError(KwflowError):
    """Malformed or inconsistent graph/function/run description."""


class ExhaustionError(KwflowError):
    """Invalid exhaustion request (depth beyond generated region, bad nesting)."""


class IncompleteDataError(KwflowError):
    """An operator was evaluated at a vertex whose neighbor data is incomplete."""


class HypothesisError(KwflowError):
    """A standing hypothesis (h <= 0) is violated on the requested domain."""


class StiffnessError(KwflowError):
    """The flow time step underflowed dt_min without achieving energy descent."""


class OverflowAbort(KwflowError):
    """The flow produced values beyond the exp() safety range; level aborted."""


class NonConvergenceError(KwflowError):
    """An iterative solve exhausted its budget without reaching tolerance."""


class SolverBreakdownError(KwflowError):
    """A linear solve or damping line search failed irrecoverably."""
