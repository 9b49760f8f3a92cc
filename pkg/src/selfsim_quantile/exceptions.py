"""Exception types shared across the package."""


class NumericalError(RuntimeError):
    """Base class for numerical failures (quadrature, root finding, factorization)."""


class QuadratureError(NumericalError):
    def __init__(self, message, abserr=None):
        super().__init__(message if abserr is None else f"{message} (achieved error {abserr:.3g})")
        self.abserr = abserr


class RootFindingError(NumericalError):
    def __init__(self, message, bracket=None):
        super().__init__(message if bracket is None else f"{message} (bracket {bracket})")
        self.bracket = bracket


class FactorizationError(NumericalError):
    pass


class ConsistencyError(NumericalError):
    """Two independent evaluation routes disagree beyond tolerance."""


class MonteCarloOnlyError(NotImplementedError):
    """No analytic joint law is available; only Monte Carlo comparisons apply."""
