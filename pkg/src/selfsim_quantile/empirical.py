"""Empirical distribution functions, order statistics and empirical quantiles.

Quantiles are left-continuous (minimal) inverses throughout:
tau_alpha^n = x_(j) with j = min{k : k/n >= alpha}.  Ties between equal
values are ordered by original index.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .models import MarginalLaw, marginal_quantile
from .simulate import GridSpec

# slack for levels such as 1 - 0.7 that are not exactly representable
LEVEL_EPS = 1e-9


def ecdf(sample, x):
    """Fraction of ``sample`` that is <= x (right-continuous step function)."""
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise ValueError("sample must be nonempty")
    return np.count_nonzero(sample <= x) / sample.size


def order_statistics(sample, return_index=False):
    """Nondecreasing rearrangement; equal values keep their original relative order."""
    sample = np.asarray(sample, dtype=float)
    if sample.size == 0:
        raise ValueError("sample must be nonempty")
    idx = np.argsort(sample, kind="stable")
    if return_index:
        return sample[idx], idx
    return sample[idx]


def order_statistic_minmax(sample, k):
    """k-th order statistic as min over k-subsets of the max (brute force, small n only)."""
    sample = list(sample)
    return min(max(sample[i] for i in subset) for subset in itertools.combinations(range(len(sample)), k))


def quantile_rank(n, alpha):
    """j(alpha) = min{k : k/n >= alpha} (1-based); works elementwise on arrays of levels."""
    alpha = np.asarray(alpha, dtype=float)
    if np.any((alpha <= 0) | (alpha >= 1)):
        raise ValueError("levels must lie in (0, 1)")
    j = np.ceil(n * alpha - LEVEL_EPS).astype(int)
    j = np.clip(j, 1, n)
    return int(j) if j.ndim == 0 else j


def maximal_quantile_rank(n, alpha):
    """Rank of the largest alpha-quantile: min(floor(n alpha) + 1, n), 1-based."""
    j = np.floor(np.asarray(alpha, dtype=float) * n + LEVEL_EPS).astype(int) + 1
    j = np.clip(j, 1, n)
    return int(j) if j.ndim == 0 else j


def empirical_quantile(sample, alpha):
    """Left-continuous inverse of the ECDF at ``alpha``: the ceil(n alpha)-th order statistic."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"level must lie in (0, 1), got alpha={alpha}")
    ordered = order_statistics(sample)
    return ordered[quantile_rank(ordered.size, alpha) - 1]


def is_quantile(sample, q, alpha):
    """Whether q is an alpha-quantile of the empirical law: P(X <= q) >= alpha and P(X >= q) >= 1 - alpha."""
    sample = np.asarray(sample, dtype=float)
    n = sample.size
    below = np.count_nonzero(sample <= q)
    above = np.count_nonzero(sample >= q)
    return below >= n * alpha - LEVEL_EPS and above >= n * (1.0 - alpha) - LEVEL_EPS


def reflected_quantile_check(sample, alpha):
    """Check that -q_{1-alpha}(-X) is an alpha-quantile of X.

    q_{1-alpha}(-X) is taken with the maximal-quantile convention so that the
    reflected value is, in general, a different alpha-quantile from the
    minimal one returned by :func:`empirical_quantile`.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"level must lie in (0, 1), got alpha={alpha}")
    sample = np.asarray(sample, dtype=float)
    negated = order_statistics(-sample)
    q = -negated[maximal_quantile_rank(sample.size, 1.0 - alpha) - 1]
    return bool(is_quantile(sample, q, alpha))


@dataclass(frozen=True)
class QuantileField:
    """W_n(t, alpha) = sqrt(n) (tau_alpha^n(t) - tau_alpha(t)) on the (t, alpha) grid."""

    grid: GridSpec
    n: int
    values: np.ndarray = field(repr=False)
    replication: int = 0

    def at(self, t, alpha):
        return float(self.values[self.grid.index_of_time(t), self.grid.index_of_level(alpha)])


def model_quantiles(grid, spec):
    """tau_alpha(t) on the grid, shape (len(times), len(alphas))."""
    base = np.array([marginal_quantile(1.0, a, spec) for a in grid.alphas])
    return (grid.t ** spec.H)[:, None] * base[None, :]


def empirical_quantiles(values, alphas):
    """tau_alpha^n(t) for every column of an (n, len(times)) array."""
    n = values.shape[0]
    ranks = quantile_rank(n, np.asarray(alphas)) - 1
    return np.sort(values, axis=0)[np.atleast_1d(ranks)].T


def expected_order_statistic(n, j, spec, nodes=16, tail=1e-12):
    """E X_(j) for n i.i.d. copies of X(1).

    Integrates x f(x) b(F(x)), with b the Beta(j, n - j + 1) density of
    U_(j), over the central 1 - 2 tail mass of b.  Panels are cut at Beta
    quantiles so the Gauss-Legendre nodes follow the mass; only the panel
    edges need quantile evaluations.
    """
    law = MarginalLaw(1.0, spec)
    b = stats.beta(j, n - j + 1)
    probs = [tail, 1e-8, 1e-5, 1e-3, 0.02, 0.2, 0.5, 0.8, 0.98, 1 - 1e-3, 1 - 1e-5, 1 - 1e-8, 1 - tail]
    edges = np.unique([law.quantile(min(max(b.ppf(p), 1e-300), 1 - 1e-16)) for p in probs])
    x0, w0 = np.polynomial.legendre.leggauss(nodes)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x = 0.5 * (hi - lo) * x0 + 0.5 * (hi + lo)
        fx = np.array([law.pdf(v) for v in x])
        Fx = np.array([law.cdf(v) for v in x])
        total += 0.5 * (hi - lo) * float(np.sum(w0 * x * fx * b.pdf(Fx)))
    return total


def finite_n_centering(grid, spec, n):
    """sqrt(n) (E tau^n_alpha(t) - tau_alpha(t)) on the grid: the exact mean of W_n.

    It is O(1/sqrt(n)) and vanishes in the limit, but at n of a few hundred it
    is comparable to the Monte Carlo standard error of the mean field.
    """
    ranks = np.atleast_1d(quantile_rank(n, np.asarray(grid.alphas)))
    base = np.array([expected_order_statistic(n, int(j), spec) - marginal_quantile(1.0, a, spec)
                     for j, a in zip(ranks, grid.alphas)])
    return math.sqrt(n) * (grid.t ** spec.H)[:, None] * base[None, :]


def quantile_field(ensemble, grid=None, spec=None, model=None):
    """Quantile fluctuation field of one ensemble.

    ``model`` may pass precomputed :func:`model_quantiles` to avoid repeating
    root finding across replications.
    """
    grid = ensemble.grid if grid is None else grid
    spec = ensemble.spec if spec is None else spec
    if grid.times != ensemble.grid.times:
        raise ValueError("ensemble was simulated on a different time grid")
    if model is None:
        model = model_quantiles(grid, spec)
    n = ensemble.n
    w = math.sqrt(n) * (empirical_quantiles(ensemble.values, grid.alphas) - model)
    # X(0) = 0 exactly, so both quantiles vanish at t = 0
    w[0, :] = 0.0
    return QuantileField(grid, n, w, ensemble.replication)


__all__ = [
    "ecdf",
    "order_statistics",
    "order_statistic_minmax",
    "quantile_rank",
    "maximal_quantile_rank",
    "empirical_quantile",
    "is_quantile",
    "reflected_quantile_check",
    "QuantileField",
    "model_quantiles",
    "empirical_quantiles",
    "expected_order_statistic",
    "finite_n_centering",
    "quantile_field",
]
