"""Empirical quantile processes of self-similar inputs.

Simulation of self-similar processes (fractional Brownian motion, symmetric
stable Levy motion, integrated and iterated Brownian motion), the quantile
fluctuation field W_n(t, alpha) = sqrt(n) (tau^n_alpha(t) - tau_alpha(t)),
closed-form and quadrature limit covariances, and a Monte Carlo harness that
checks the finite-n behaviour against them.
"""

__version__ = "0.1.0"

from .exceptions import (  # noqa: E402
    ConsistencyError,
    FactorizationError,
    MonteCarloOnlyError,
    NumericalError,
    QuadratureError,
    RootFindingError,
)
from .models import Family, MarginalLaw, ProcessSpec, marginal_quantile, stable_cdf, stable_density  # noqa: E402
from .simulate import GridSpec, Method, PathEnsemble, simulate  # noqa: E402
from .empirical import QuantileField, empirical_quantile, quantile_field  # noqa: E402
from .limit import CovMethod, LimitCovariance, joint_cdf, limit_cov  # noqa: E402

__all__ = [
    "__version__",
    "ConsistencyError",
    "FactorizationError",
    "MonteCarloOnlyError",
    "NumericalError",
    "QuadratureError",
    "RootFindingError",
    "Family",
    "MarginalLaw",
    "ProcessSpec",
    "marginal_quantile",
    "stable_cdf",
    "stable_density",
    "GridSpec",
    "Method",
    "PathEnsemble",
    "simulate",
    "QuantileField",
    "empirical_quantile",
    "quantile_field",
    "CovMethod",
    "LimitCovariance",
    "joint_cdf",
    "limit_cov",
]
