"""Self-similar input process families and their one-dimensional marginal laws.

Every family here is H-self-similar, so the law of X(t) is the law of X(1)
rescaled by t**H:

    F(t, x) = F(1, t**-H * x),   f(t, x) = t**-H * f(1, t**-H * x),
    tau_alpha(t) = t**H * tau_alpha(1).

Only the t = 1 laws are computed numerically; everything else follows from
these identities.
"""

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, optimize
from scipy.stats import norm

from . import _stable
from .exceptions import QuadratureError, RootFindingError


class Family(str, enum.Enum):
    FBM = "fbm"
    STABLE = "stable"
    BM = "bm"
    INTEGRATED_BM = "integrated_bm"
    ITERATED_BM = "iterated_bm"


GAUSSIAN_FAMILIES = (Family.FBM, Family.BM, Family.INTEGRATED_BM)


@dataclass(frozen=True)
class ProcessSpec:
    """A self-similar process family with its parameters.

    Parameters
    ----------
    family : Family or str
    r : float
        fBm index (covariance exponent) or stable index, both in (0, 2).
        Ignored by the other families.
    c : float
        Stable scale: X(t) has characteristic function exp(-c t |u|**r).
        In the common S(alpha, sigma) parameterization sigma = (c t)**(1/r).
    m : int
        Number of integrations for INTEGRATED_BM.
    """

    family: Family
    r: float = 1.0
    c: float = 1.0
    m: int = 1

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        if family in (Family.FBM, Family.STABLE):
            if not 0.0 < self.r < 2.0:
                raise ValueError(f"{family.value} index r must lie strictly inside (0, 2), got r={self.r}")
        if family is Family.STABLE and not self.c > 0.0:
            raise ValueError(f"stable scale c must be positive, got c={self.c}")
        if family is Family.INTEGRATED_BM:
            if int(self.m) != self.m or self.m < 0:
                raise ValueError(f"integration order m must be a nonnegative integer, got m={self.m}")
            object.__setattr__(self, "m", int(self.m))
        # canonical parameters so equal processes compare (and cache) equal
        if family in (Family.BM, Family.ITERATED_BM):
            object.__setattr__(self, "r", 1.0)
        if family is not Family.STABLE:
            object.__setattr__(self, "c", 1.0)
        if family is not Family.INTEGRATED_BM:
            object.__setattr__(self, "m", 0)

    @property
    def H(self):
        f = self.family
        if f is Family.FBM:
            return self.r / 2.0
        if f is Family.STABLE:
            return 1.0 / self.r
        if f is Family.BM:
            return 0.5
        if f is Family.INTEGRATED_BM:
            return self.m + 0.5
        return 0.25

    @property
    def is_gaussian(self):
        return self.family in GAUSSIAN_FAMILIES

    def as_dict(self):
        return {"family": self.family.value, "r": self.r, "c": self.c, "m": self.m, "H": self.H}

    @classmethod
    def fbm(cls, r):
        return cls(Family.FBM, r=r)

    @classmethod
    def stable(cls, r, c=1.0):
        return cls(Family.STABLE, r=r, c=c)

    @classmethod
    def bm(cls):
        return cls(Family.BM)

    @classmethod
    def integrated_bm(cls, m=1):
        return cls(Family.INTEGRATED_BM, m=m)

    @classmethod
    def iterated_bm(cls):
        return cls(Family.ITERATED_BM)


def _check_index(r):
    if not 0.0 < r < 2.0:
        raise ValueError(f"index r must lie strictly inside (0, 2), got r={r}")


def fbm_covariance(s, t, r):
    """E X(s) X(t) = (t**r + s**r - |t - s|**r) / 2 for fractional Brownian motion."""
    _check_index(r)
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise ValueError("times must be nonnegative")
    out = 0.5 * (t ** r + s ** r - np.abs(t - s) ** r)
    return float(out) if out.ndim == 0 else out


def integrated_bm_covariance(s, t, m):
    """Covariance of the m-times integrated Brownian motion.

    X_m(t) = int_0^t (t - u)**m / m! dB(u), hence
    E X_m(s) X_m(t) = int_0^{min(s, t)} (s - u)**m (t - u)**m du / (m!)**2,
    evaluated exactly as a polynomial integral.
    """
    if s < 0 or t < 0:
        raise ValueError("times must be nonnegative")
    P = np.polynomial.Polynomial
    integrand = P([s, -1.0]) ** m * P([t, -1.0]) ** m
    antider = integrand.integ()
    lo = min(s, t)
    return float((antider(lo) - antider(0.0)) / math.factorial(m) ** 2)


def covariance(s, t, spec):
    """E X(s) X(t) for the Gaussian families."""
    if spec.family is Family.FBM:
        return fbm_covariance(s, t, spec.r)
    if spec.family is Family.BM:
        return float(min(s, t))
    if spec.family is Family.INTEGRATED_BM:
        return integrated_bm_covariance(s, t, spec.m)
    raise ValueError(f"{spec.family.value} is not a Gaussian family")


# ---------------------------------------------------------------------------
# symmetric stable law, exp(-c |u|**r)


def _stable_scale(r, c):
    return c ** (1.0 / r)


def _vectorize(fn, x):
    if np.ndim(x) == 0:
        return fn(float(x))
    arr = np.asarray(x, dtype=float)
    return np.array([fn(v) for v in arr.ravel()]).reshape(arr.shape)


def stable_density(x, r, c=1.0):
    """Density f(1, x) of the symmetric stable law with characteristic function exp(-c|u|**r).

    Computed from 2 pi f(1, x) = int exp(-c|u|**r) cos(x u) du by panel-wise
    quadrature between the zeros of cos(x u); relative accuracy better than
    1e-8 for |x| <= 50.  Accepts scalars or arrays.
    """
    _check_index(r)
    if not c > 0:
        raise ValueError(f"scale c must be positive, got c={c}")
    sigma = _stable_scale(r, c)
    return _vectorize(lambda v: _stable.pdf(v / sigma, r) / sigma, x)


def stable_cdf(x, r, c=1.0):
    """Distribution function of the symmetric stable law exp(-c|u|**r)."""
    _check_index(r)
    if not c > 0:
        raise ValueError(f"scale c must be positive, got c={c}")
    sigma = _stable_scale(r, c)
    return _vectorize(lambda v: _stable.cdf(v / sigma, r), x)


def _bracketed_quantile(cdf, pdf, alpha, start=1.0):
    """Solve cdf(z) = alpha (alpha > 1/2) on z > 0, then one Newton step."""
    lo, hi = 0.0, start
    while cdf(hi) < alpha:
        lo, hi = hi, 2.0 * hi
        if hi > 1e300:
            raise RootFindingError(f"no upper bracket for level {alpha}", (lo, hi))
    try:
        z = optimize.brentq(lambda v: cdf(v) - alpha, lo, hi, xtol=1e-12, rtol=4 * np.finfo(float).eps)
    except ValueError as exc:
        raise RootFindingError(f"root finding failed for level {alpha}: {exc}", (lo, hi)) from exc
    density = pdf(z)
    if density > 0:
        step = (cdf(z) - alpha) / density
        if abs(step) < 1e-8 * max(1.0, abs(z)):
            z -= step
    return z


@functools.lru_cache(maxsize=4096)
def _standard_stable_quantile(alpha, r):
    if alpha == 0.5:
        return 0.0
    if alpha < 0.5:
        return -_standard_stable_quantile(1.0 - alpha, r)
    return _bracketed_quantile(lambda z: _stable.cdf(z, r), lambda z: _stable.pdf(z, r), alpha)


def stable_quantile(alpha, r, c=1.0):
    return _stable_scale(r, c) * _standard_stable_quantile(float(alpha), float(r))


# ---------------------------------------------------------------------------
# iterated Brownian motion B(|B'(t)|): a normal variance mixture at t = 1


_SQRT_2PI = math.sqrt(2.0 * math.pi)


def _half_normal_weight(v):
    return 2.0 * math.exp(-0.5 * v * v) / _SQRT_2PI


def iterated_density(x):
    x = abs(float(x))
    if x == 0.0:
        # (1/pi) int_0^inf v**-1/2 exp(-v**2/2) dv
        return 2.0 ** -0.75 * math.gamma(0.25) / math.pi

    def integrand(v):
        return math.exp(-0.5 * x * x / v) / (_SQRT_2PI * math.sqrt(v)) * _half_normal_weight(v)
    val, err = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-13, epsrel=1e-11, limit=200)
    if err > 1e-9 * val + 1e-12:
        raise QuadratureError(f"iterated Brownian density did not converge at x={x}", err)
    return val


def iterated_cdf(x):
    x = float(x)
    if x == 0.0:
        return 0.5
    a = abs(x)

    def integrand(v):
        return 0.5 * math.erfc(a / math.sqrt(2.0 * v)) * _half_normal_weight(v)
    upper_tail, err = integrate.quad(integrand, 0.0, np.inf, epsabs=1e-14, epsrel=1e-11, limit=200)
    if err > 1e-9 * upper_tail + 1e-12:
        raise QuadratureError(f"iterated Brownian cdf did not converge at x={x}", err)
    return 1.0 - upper_tail if x > 0 else upper_tail


@functools.lru_cache(maxsize=4096)
def _iterated_quantile(alpha):
    if alpha == 0.5:
        return 0.0
    if alpha < 0.5:
        return -_iterated_quantile(1.0 - alpha)
    return _bracketed_quantile(iterated_cdf, iterated_density, alpha)


# ---------------------------------------------------------------------------
# time-one marginals for every family


def _gaussian_sd1(spec):
    if spec.family is Family.INTEGRATED_BM:
        return math.sqrt(integrated_bm_covariance(1.0, 1.0, spec.m))
    return 1.0


def _density1(x, spec):
    f = spec.family
    if f is Family.STABLE:
        return stable_density(x, spec.r, spec.c)
    if f is Family.ITERATED_BM:
        return _vectorize(iterated_density, x)
    sd = _gaussian_sd1(spec)
    return norm.pdf(x, scale=sd)


def _cdf1(x, spec):
    f = spec.family
    if f is Family.STABLE:
        return stable_cdf(x, spec.r, spec.c)
    if f is Family.ITERATED_BM:
        return _vectorize(iterated_cdf, x)
    return norm.cdf(x, scale=_gaussian_sd1(spec))


def _quantile1(alpha, spec):
    f = spec.family
    if f is Family.STABLE:
        return stable_quantile(alpha, spec.r, spec.c)
    if f is Family.ITERATED_BM:
        return _iterated_quantile(float(alpha))
    return _gaussian_sd1(spec) * norm.ppf(alpha)


@dataclass(frozen=True)
class MarginalLaw:
    """Law of X(t) for one process, derived from the t = 1 law by scaling."""

    t: float
    spec: ProcessSpec

    def __post_init__(self):
        if self.t < 0:
            raise ValueError(f"time must be nonnegative, got t={self.t}")

    @property
    def scale(self):
        return self.t ** self.spec.H

    def cdf(self, x):
        if self.t == 0:
            return np.where(np.asarray(x) >= 0, 1.0, 0.0) if np.ndim(x) else float(x >= 0)
        return _cdf1(np.asarray(x, dtype=float) / self.scale if np.ndim(x) else x / self.scale, self.spec)

    def pdf(self, x):
        if self.t == 0:
            raise ValueError("X(0) = 0 almost surely; the density is degenerate at t = 0")
        s = self.scale
        return _density1(np.asarray(x, dtype=float) / s if np.ndim(x) else x / s, self.spec) / s

    def quantile(self, alpha):
        return marginal_quantile(self.t, alpha, self.spec)


def _check_level(alpha):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"level must lie in (0, 1), got alpha={alpha}")


def marginal_quantile(t, alpha, spec):
    """tau_alpha(t) = t**H tau_alpha(1); zero at t = 0."""
    _check_level(alpha)
    if t < 0:
        raise ValueError(f"time must be nonnegative, got t={t}")
    if t == 0:
        return 0.0
    return t ** spec.H * _quantile1(alpha, spec)


def density_at_quantile(t, alpha, spec):
    """f(t, tau_alpha(t)), strictly positive for t > 0."""
    _check_level(alpha)
    if t <= 0:
        raise ValueError("density at the quantile is undefined at t = 0 (point mass at zero)")
    if spec.family in (Family.FBM, Family.BM):
        z = norm.ppf(alpha)
        return (2.0 * math.pi) ** -0.5 * t ** (-spec.r / 2.0) * math.exp(-0.5 * z * z)
    return t ** -spec.H * float(_density1(_quantile1(alpha, spec), spec))


def stable_density_integral(r, c=1.0):
    """int_R exp(-c|u|**r) du, the closed form of 2 pi f(1, 0)."""
    _check_index(r)
    return _stable.total_transform_mass(r) * c ** (-1.0 / r)


__all__ = [
    "Family",
    "ProcessSpec",
    "MarginalLaw",
    "fbm_covariance",
    "integrated_bm_covariance",
    "covariance",
    "stable_density",
    "stable_cdf",
    "stable_quantile",
    "stable_density_integral",
    "iterated_density",
    "iterated_cdf",
    "marginal_quantile",
    "density_at_quantile",
]
