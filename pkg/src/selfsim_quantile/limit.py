"""Covariance of the Gaussian limit of the quantile fluctuation field.

For (s, beta), (t, alpha) with s, t > 0

    E G(s, beta) G(t, alpha)
        = [P(X_s <= tau_beta(s), X_t <= tau_alpha(t)) - alpha beta]
          / [f(s, tau_beta(s)) f(t, tau_alpha(t))],

and the covariance vanishes when s = 0 or t = 0.
"""

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate
from scipy.stats import norm

from . import _stable
from .exceptions import ConsistencyError, MonteCarloOnlyError, QuadratureError
from .models import (
    Family,
    MarginalLaw,
    ProcessSpec,
    covariance,
    density_at_quantile,
    fbm_covariance,
    marginal_quantile,
    stable_density_integral,
    stable_quantile,
)

RHO_EDGE = 1e-12
TRUNCATION_MASS = 1e-8
DUAL_ROUTE_TOL = 1e-6


class CovMethod(str, enum.Enum):
    CLOSED_FORM_FBM = "closed_form_fbm"
    CLOSED_FORM_ARCSIN = "closed_form_arcsin"
    STABLE_CONVOLUTION = "stable_convolution"
    MARGINAL_CASE = "marginal_case"
    ZERO_BOUNDARY = "zero_boundary"


def bivariate_orthant(rho):
    """P(Z1 <= 0, Z2 <= 0) = 1/4 + arcsin(rho) / (2 pi) for standard normals with correlation rho."""
    if abs(rho) > 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got rho={rho}")
    return 0.25 + math.asin(rho) / (2.0 * math.pi)


def bivariate_normal_cdf(a, b, rho):
    """Phi_2(a, b; rho) for standard normals with correlation rho.

    Uses the one-dimensional representation
        Phi_2 = Phi(a) Phi(b)
                + (1/2pi) int_0^{arcsin rho} exp(-(a^2 + b^2 - 2ab sin th) / (2 cos^2 th)) dth,
    whose integrand is smooth on the whole range; |rho| within 1e-12 of 1
    uses the degenerate limits.
    """
    if abs(rho) > 1.0:
        raise ValueError(f"correlation must lie in [-1, 1], got rho={rho}")
    a, b = float(a), float(b)
    if a == -np.inf or b == -np.inf:
        return 0.0
    if a == np.inf:
        return float(norm.cdf(b))
    if b == np.inf:
        return float(norm.cdf(a))
    if rho >= 1.0 - RHO_EDGE:
        return float(norm.cdf(min(a, b)))
    if rho <= -1.0 + RHO_EDGE:
        return float(max(0.0, norm.cdf(a) + norm.cdf(b) - 1.0))
    base = norm.cdf(a) * norm.cdf(b)
    if rho == 0.0:
        return float(base)
    q2 = a * a + b * b
    ab2 = 2.0 * a * b

    def integrand(theta):
        cos2 = math.cos(theta) ** 2
        return math.exp(-(q2 - ab2 * math.sin(theta)) / (2.0 * cos2))

    val, err = integrate.quad(integrand, 0.0, math.asin(rho), epsabs=1e-13, epsrel=1e-12, limit=200)
    if err > 1e-10:
        raise QuadratureError(f"bivariate normal cdf quadrature failed at ({a}, {b}, {rho})", err)
    return float(base + val / (2.0 * math.pi))


def _increment_cdf(v, scale, r):
    return 1.0 if v == np.inf else _stable.cdf(v / scale, r)


@functools.lru_cache(maxsize=8192)
def _stable_joint(s, t, x, y, r, c):
    sig_s = (c * s) ** (1.0 / r)
    sig_d = (c * (t - s)) ** (1.0 / r)
    lo = stable_quantile(TRUNCATION_MASS, r, c * s)
    if x <= lo:
        return 0.0

    def value(u):
        dens = _stable.pdf(u / sig_s, r) / sig_s
        if dens == 0.0:
            return 0.0
        return dens * _increment_cdf(y - u, sig_d, r)

    # u = +-sig_s tan(theta) maps the heavy tails onto a bounded interval
    pieces = []
    neg_hi = min(x, 0.0)
    if lo < neg_hi:
        pieces.append((-1.0, math.atan(-neg_hi / sig_s), math.atan(-lo / sig_s)))
    if x > 0.0:
        pieces.append((1.0, math.atan(max(lo, 0.0) / sig_s), math.atan(x / sig_s) if x < np.inf else 0.5 * math.pi))
    # mass below lo is TRUNCATION_MASS; there y - u is far right so F(t - s, y - u) ~ F(t - s, y - lo)
    total = TRUNCATION_MASS * _increment_cdf(y - lo, sig_d, r)
    for sign, th0, th1 in pieces:
        def integrand(theta, sign=sign):
            sec = 1.0 / math.cos(theta)
            return value(sign * sig_s * math.tan(theta)) * sig_s * sec * sec
        val, err = integrate.quad(integrand, th0, th1, epsabs=1e-11, epsrel=1e-10, limit=400)
        if err > 1e-8:
            raise QuadratureError(f"stable joint cdf quadrature failed at s={s}, t={t}, x={x}, y={y}", err)
        total += val
    return total


def stable_joint_cdf(s, t, x, y, r, c=1.0):
    """P(X(s) <= x, X(t) <= y) for the symmetric r-stable Levy process, 0 < s <= t.

    Independent stationary increments give
        P = int_{-inf}^{x} f(s, u) F(t - s, y - u) du,
    integrated from the 1e-8 quantile of X(s); the truncated mass enters
    through a first-order correction.
    """
    if not 0.0 < r < 2.0 or not c > 0:
        raise ValueError("need r in (0, 2) and c > 0")
    if not 0.0 < s <= t:
        raise ValueError(f"need 0 < s <= t, got s={s}, t={t}")
    if s == t:
        m = min(x, y)
        return 0.0 if m == -np.inf else (1.0 if m == np.inf else _stable.cdf(m / (c * s) ** (1.0 / r), r))
    return _stable_joint(float(s), float(t), float(x), float(y), float(r), float(c))


def joint_cdf(s, t, x, y, spec):
    """P(X_s <= x, X_t <= y) for the families with an analytic joint law."""
    if s > t:
        s, t, x, y = t, s, y, x
    if s == 0.0:
        return float(x >= 0) * float(MarginalLaw(t, spec).cdf(y))
    f = spec.family
    if f is Family.STABLE:
        return stable_joint_cdf(s, t, x, y, spec.r, spec.c)
    if spec.is_gaussian:
        sd_s = math.sqrt(covariance(s, s, spec))
        sd_t = math.sqrt(covariance(t, t, spec))
        rho = covariance(s, t, spec) / (sd_s * sd_t)
        return bivariate_normal_cdf(x / sd_s, y / sd_t, min(1.0, rho))
    raise MonteCarloOnlyError(
        f"no analytic joint law for {f.value}; compare against Monte Carlo self-consistency instead")


def median_cov_fbm(s, t, r, return_routes=False):
    """Limit covariance at alpha = beta = 1/2 for fBm: (st)**(r/2) arcsin(rho).

    Cross-checked against 2 pi (st)**(r/2) [P(X_s <= 0, X_t <= 0) - 1/4] with the
    orthant probability taken from :func:`bivariate_normal_cdf`.
    """
    if s <= 0 or t <= 0:
        raise ValueError("median covariance formula needs s, t > 0")
    scale = (s * t) ** (r / 2.0)
    rho = min(1.0, fbm_covariance(s, t, r) / scale)
    arcsin_route = scale * math.asin(rho)
    orthant_route = 2.0 * math.pi * scale * (bivariate_normal_cdf(0.0, 0.0, rho) - 0.25)
    if abs(arcsin_route - orthant_route) > DUAL_ROUTE_TOL:
        raise ConsistencyError(
            f"fBm median covariance routes disagree at s={s}, t={t}, r={r}: {arcsin_route} vs {orthant_route}")
    if return_routes:
        return arcsin_route, orthant_route
    return arcsin_route


def median_cov_stable(s, t, r, c=1.0):
    """Limit covariance at alpha = beta = 1/2 for the stable process, via the closed-form normalizer.

    (2 pi)**2 (st)**(1/r) [P(X_s <= 0, X_t <= 0) - 1/4] / (int exp(-c|u|**r) du)**2
    """
    if s <= 0 or t <= 0:
        raise ValueError("median covariance formula needs s, t > 0")
    lo, hi = min(s, t), max(s, t)
    p = stable_joint_cdf(lo, hi, 0.0, 0.0, r, c)
    return (2.0 * math.pi) ** 2 * (s * t) ** (1.0 / r) * (p - 0.25) / stable_density_integral(r, c) ** 2


def _limit_cov_entry(sb, ta, spec):
    (s, beta), (t, alpha) = sb, ta
    if s < 0 or t < 0:
        raise ValueError("times must be nonnegative")
    for lvl in (alpha, beta):
        if not 0.0 < lvl < 1.0:
            raise ValueError(f"levels must lie in (0, 1), got {lvl}")
    if s == 0.0 or t == 0.0:
        return 0.0, CovMethod.ZERO_BOUNDARY
    f_s = density_at_quantile(s, beta, spec)
    f_t = density_at_quantile(t, alpha, spec)
    if s == t:
        return (min(alpha, beta) - alpha * beta) / (f_s * f_t), CovMethod.MARGINAL_CASE
    fam = spec.family
    if fam in (Family.FBM, Family.BM) and alpha == 0.5 and beta == 0.5:
        return median_cov_fbm(s, t, spec.r), CovMethod.CLOSED_FORM_ARCSIN
    if spec.is_gaussian:
        method = CovMethod.CLOSED_FORM_FBM
    elif fam is Family.STABLE:
        method = CovMethod.STABLE_CONVOLUTION
    else:
        raise MonteCarloOnlyError(
            f"{fam.value} has no analytic joint law; this covariance is Monte-Carlo-only")
    p = joint_cdf(s, t, marginal_quantile(s, beta, spec), marginal_quantile(t, alpha, spec), spec)
    return (p - alpha * beta) / (f_s * f_t), method


def limit_cov(sb, ta, spec):
    """E G(s, beta) G(t, alpha) for ``sb = (s, beta)``, ``ta = (t, alpha)``."""
    return _limit_cov_entry(tuple(map(float, sb)), tuple(map(float, ta)), spec)[0]


def limit_cov_method(sb, ta, spec):
    return _limit_cov_entry(tuple(map(float, sb)), tuple(map(float, ta)), spec)[1]


@dataclass(frozen=True)
class LimitCovariance:
    """A table of limit covariances with the evaluation route used for each entry."""

    spec: ProcessSpec
    pairs: tuple
    values: np.ndarray = field(repr=False)
    methods: tuple

    @classmethod
    def evaluate(cls, spec, pairs):
        pairs = tuple((tuple(map(float, p)), tuple(map(float, q))) for p, q in pairs)
        out = [_limit_cov_entry(p, q, spec) for p, q in pairs]
        return cls(spec, pairs, np.array([v for v, _ in out]), tuple(m for _, m in out))

    @classmethod
    def on_points(cls, spec, points):
        """All unordered pairs (with repetition) of the given (t, alpha) points."""
        points = [tuple(p) for p in points]
        pairs = [(points[i], points[j]) for i in range(len(points)) for j in range(i, len(points))]
        return cls.evaluate(spec, pairs)

    def matrix(self, points):
        """Symmetric covariance matrix over ``points`` (all pairs must be in the table)."""
        lookup = {}
        for (p, q), v in zip(self.pairs, self.values):
            lookup[(p, q)] = lookup[(q, p)] = v
        pts = [tuple(map(float, p)) for p in points]
        return np.array([[lookup[(p, q)] for q in pts] for p in pts])

    def rows(self):
        for ((s, beta), (t, alpha)), v, m in zip(self.pairs, self.values, self.methods):
            yield {"s": s, "beta": beta, "t": t, "alpha": alpha, "value": float(v), "method": m.value}


__all__ = [
    "CovMethod",
    "bivariate_orthant",
    "bivariate_normal_cdf",
    "stable_joint_cdf",
    "joint_cdf",
    "median_cov_fbm",
    "median_cov_stable",
    "limit_cov",
    "limit_cov_method",
    "LimitCovariance",
]
