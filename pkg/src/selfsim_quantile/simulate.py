"""Exact-in-distribution path ensembles on a finite time grid.

Random numbers come from Philox (counter-based) streams keyed by
``(seed, replication, block)`` where a block is a fixed run of
``BLOCK_SIZE`` consecutive paths.  Every path therefore has the same
random input no matter how the work is split across processes.
"""

import enum
import functools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .exceptions import FactorizationError
from .models import Family, ProcessSpec, covariance

BLOCK_SIZE = 256
MAX_DENSE_TIMES = 512
JITTER = 1e-12
MAX_REFINED_POINTS = 1 << 16


class Method(str, enum.Enum):
    CHOLESKY = "cholesky"
    CIRCULANT = "circulant"
    INCREMENTS = "increments"
    CUMSUM = "cumsum"
    COMPOSE = "compose"


@dataclass(frozen=True)
class GridSpec:
    """Time grid on [0, T] (starting at 0) and quantile levels inside I = [a, b] in (0, 1)."""

    times: tuple
    alphas: tuple
    interval: tuple = None

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        alphas = tuple(float(a) for a in self.alphas)
        if len(times) < 2 or times[0] != 0.0:
            raise ValueError("times must start at 0 and contain at least one positive time")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("times must be strictly increasing")
        if not alphas or any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise ValueError("alphas must be nonempty and strictly increasing")
        interval = self.interval if self.interval is not None else (alphas[0], alphas[-1])
        interval = (float(interval[0]), float(interval[1]))
        if not 0.0 < interval[0] <= interval[1] < 1.0:
            raise ValueError(f"level interval must satisfy 0 < a <= b < 1, got {interval}")
        if alphas[0] < interval[0] or alphas[-1] > interval[1]:
            raise ValueError("alphas must lie inside the level interval")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "interval", interval)

    @property
    def T(self):
        return self.times[-1]

    @property
    def t(self):
        return np.asarray(self.times)

    @property
    def a(self):
        return np.asarray(self.alphas)

    @classmethod
    def uniform(cls, T=2.0, n_times=33, interval=(0.25, 0.75), n_levels=17):
        times = np.linspace(0.0, T, n_times)
        alphas = np.linspace(interval[0], interval[1], n_levels)
        return cls(tuple(times), tuple(alphas), tuple(interval))

    @classmethod
    def from_points(cls, times, alphas, interval=None):
        """Grid holding the given positive times (0 is prepended) and levels."""
        ts = sorted({0.0, *map(float, times)})
        return cls(tuple(ts), tuple(sorted(set(map(float, alphas)))), interval)

    def index_of_time(self, t):
        idx = int(np.argmin(np.abs(self.t - t)))
        if not math.isclose(self.times[idx], t, rel_tol=1e-12, abs_tol=1e-15):
            raise KeyError(f"time {t} is not on the grid")
        return idx

    def index_of_level(self, alpha):
        idx = int(np.argmin(np.abs(self.a - alpha)))
        if not math.isclose(self.alphas[idx], alpha, rel_tol=1e-12, abs_tol=1e-15):
            raise KeyError(f"level {alpha} is not on the grid")
        return idx

    def as_dict(self):
        return {"T": self.T, "times": list(self.times), "alphas": list(self.alphas),
                "interval": list(self.interval)}


@dataclass(frozen=True)
class PathEnsemble:
    """n paths on ``grid.times``; row j is the j-th i.i.d. copy, column 0 is X(0) = 0."""

    spec: ProcessSpec
    grid: GridSpec
    values: np.ndarray = field(repr=False)
    seed: int
    method: Method
    replication: int = 0

    def __post_init__(self):
        self.values.setflags(write=False)

    @property
    def n(self):
        return self.values.shape[0]


# ---------------------------------------------------------------------------
# random streams


def stream(seed, replication, block):
    """Philox generator for one (replication, block) key."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(replication), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def _blocked(n, seed, replication, draw):
    """Stack ``draw(rng, rows)`` over the fixed path blocks."""
    if n < 1:
        raise ValueError(f"need at least one path, got n={n}")
    parts = []
    for block, start in enumerate(range(0, n, BLOCK_SIZE)):
        rows = min(BLOCK_SIZE, n - start)
        parts.append(draw(stream(seed, replication, block), rows))
    return np.vstack(parts)


# ---------------------------------------------------------------------------
# Gaussian families


@functools.lru_cache(maxsize=64)
def _cholesky_factor(times, spec):
    t = np.asarray(times[1:])
    cov = np.array([[covariance(a, b, spec) for b in t] for a in t])
    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError:
        pass
    try:
        return np.linalg.cholesky(cov + JITTER * np.eye(len(t)))
    except np.linalg.LinAlgError as exc:
        raise FactorizationError(
            f"covariance on {len(t)} times is not positive definite even with jitter {JITTER}") from exc


def _dense_gaussian(grid, spec, n, seed, replication):
    k = len(grid.times)
    if k > MAX_DENSE_TIMES:
        raise ValueError(f"{k} grid times exceed the dense factorization limit {MAX_DENSE_TIMES}")
    L = _cholesky_factor(grid.times, spec)

    def draw(rng, rows):
        z = rng.standard_normal((rows, k - 1))
        out = np.zeros((rows, k))
        out[:, 1:] = z @ L.T
        return out
    return _blocked(n, seed, replication, draw)


@functools.lru_cache(maxsize=64)
def _circulant_sqrt_eigs(k, r):
    """Square-root eigenvalues of the circulant embedding of fractional Gaussian noise."""
    lag = np.arange(k + 1, dtype=float)
    gamma = 0.5 * (np.abs(lag + 1) ** r + np.abs(lag - 1) ** r - 2.0 * lag ** r)
    row = np.concatenate([gamma, gamma[-2:0:-1]])
    eig = np.fft.fft(row).real
    if eig.min() < -1e-10 * eig.max():
        raise FactorizationError(f"circulant embedding is not nonnegative definite (min eigenvalue {eig.min():.3g})")
    return np.sqrt(np.clip(eig, 0.0, None) / len(row))


def _circulant_fbm(grid, r, n, seed, replication):
    t = grid.t
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-10, atol=0.0):
        raise ValueError("circulant embedding needs an equally spaced time grid")
    k = len(steps)
    lam = _circulant_sqrt_eigs(k, r)
    size = len(lam)
    scale = steps[0] ** (r / 2.0)

    def draw(rng, rows):
        w = rng.standard_normal((rows, size)) + 1j * rng.standard_normal((rows, size))
        noise = np.fft.fft(lam * w, axis=1)[:, :k].real
        out = np.zeros((rows, k + 1))
        out[:, 1:] = scale * np.cumsum(noise, axis=1)
        return out
    return _blocked(n, seed, replication, draw)


def simulate_fbm(grid, r, n, seed, replication=0, method=Method.CHOLESKY):
    """Fractional Brownian motion with E X(s)X(t) = (s**r + t**r - |t-s|**r)/2.

    ``method`` is CHOLESKY (any grid, up to MAX_DENSE_TIMES points) or
    CIRCULANT (Davies-Harte embedding, equally spaced grids).
    """
    spec = ProcessSpec.fbm(r)
    method = Method(method)
    if method is Method.CHOLESKY:
        values = _dense_gaussian(grid, spec, n, seed, replication)
    elif method is Method.CIRCULANT:
        values = _circulant_fbm(grid, r, n, seed, replication)
    else:
        raise ValueError(f"unsupported fBm method {method.value}")
    return PathEnsemble(spec, grid, values, seed, method, replication)


def simulate_bm(grid, n, seed, replication=0):
    spec = ProcessSpec.bm()
    dt = np.diff(grid.t)

    def draw(rng, rows):
        out = np.zeros((rows, len(grid.times)))
        out[:, 1:] = np.cumsum(rng.standard_normal((rows, len(dt))) * np.sqrt(dt), axis=1)
        return out
    return PathEnsemble(spec, grid, _blocked(n, seed, replication, draw), seed, Method.INCREMENTS, replication)


# ---------------------------------------------------------------------------
# stable Levy process


def standard_symmetric_stable(rng, r, size):
    """Chambers-Mallows-Stuck variates with characteristic function exp(-|u|**r)."""
    v = np.pi * (rng.random(size) - 0.5)
    w = rng.standard_exponential(size)
    if r == 1.0:
        return np.tan(v)
    return (np.sin(r * v) / np.cos(v) ** (1.0 / r)) * (np.cos((1.0 - r) * v) / w) ** ((1.0 - r) / r)


def simulate_stable(grid, r, c, n, seed, replication=0):
    """Symmetric r-stable Levy process: independent increments with law exp(-c dt |u|**r)."""
    spec = ProcessSpec.stable(r, c)
    scale = (c * np.diff(grid.t)) ** (1.0 / r)

    def draw(rng, rows):
        out = np.zeros((rows, len(grid.times)))
        out[:, 1:] = np.cumsum(standard_symmetric_stable(rng, r, (rows, len(scale))) * scale, axis=1)
        return out
    return PathEnsemble(spec, grid, _blocked(n, seed, replication, draw), seed, Method.INCREMENTS, replication)


# ---------------------------------------------------------------------------
# integrated and iterated Brownian motion


def refined_times(times, max_step):
    """Subdivide every grid interval into pieces no longer than ``max_step``.

    Returns the refined times and the indices of the original grid points.
    """
    pieces = [np.zeros(1)]
    index = [0]
    for a, b in zip(times[:-1], times[1:]):
        k = max(1, int(math.ceil((b - a) / max_step - 1e-9)))
        pieces.append(a + (b - a) * np.arange(1, k + 1) / k)
        index.append(index[-1] + k)
    return np.concatenate(pieces), np.asarray(index)


def trapezoid_variance_bias(T, step):
    """Upper bound on the variance lost by trapezoid integration of BM at horizon T (m = 1).

    Between refinement points the path differs from its chord by a Brownian
    bridge whose integral over a step h has variance h**3/12, independent of
    the chord; over [0, T] this sums to T h**2 / 12.
    """
    return T * step ** 2 / 12.0


def simulate_integrated_bm(grid, m, n, seed, replication=0, max_step=None):
    """m-times integrated Brownian motion by repeated trapezoid integration of exact BM.

    BM is simulated exactly on a refinement of the grid with step at most
    ``max_step`` (default T/4096); for m = 1 the variance deficit is bounded by
    :func:`trapezoid_variance_bias`.
    """
    spec = ProcessSpec.integrated_bm(m)
    if m < 1:
        raise ValueError(f"integration order must be at least 1, got m={m}")
    max_step = grid.T / 4096.0 if max_step is None else float(max_step)
    fine, index = refined_times(grid.t, max_step)
    if len(fine) > MAX_REFINED_POINTS:
        raise ValueError(f"refinement needs {len(fine)} points, budget is {MAX_REFINED_POINTS}; "
                         "increase max_step or shorten the horizon")
    dt = np.sqrt(np.diff(fine))

    def draw(rng, rows):
        path = np.zeros((rows, len(fine)))
        path[:, 1:] = np.cumsum(rng.standard_normal((rows, len(dt))) * dt, axis=1)
        for _ in range(m):
            path = integrate.cumulative_trapezoid(path, fine, axis=1, initial=0.0)
        return path[:, index]
    return PathEnsemble(spec, grid, _blocked(n, seed, replication, draw), seed, Method.CUMSUM, replication)


def _bm_at(rng, when):
    """One-sided BM evaluated at nonnegative random times, row by row, exactly."""
    order = np.argsort(when, axis=1, kind="stable")
    sorted_t = np.take_along_axis(when, order, axis=1)
    gaps = np.diff(sorted_t, axis=1, prepend=0.0)
    sorted_b = np.cumsum(rng.standard_normal(when.shape) * np.sqrt(gaps), axis=1)
    out = np.empty_like(sorted_b)
    np.put_along_axis(out, order, sorted_b, axis=1)
    return out


def simulate_iterated_bm(grid, n, seed, replication=0, signed=False):
    """Iterated Brownian motion X(t) = B(r(t)).

    r(t) = |B'(t)| for an independent BM B' (default).  With ``signed=True``
    r(t) = B'(t) and B is two-sided, built from two independent one-sided
    motions glued at 0 so that E B(s)B(t) = min(|s|, |t|) for same-sign s, t
    and 0 otherwise.  Both choices are 1/4-self-similar with the same
    one-dimensional marginals.
    """
    spec = ProcessSpec.iterated_bm()
    dt = np.sqrt(np.diff(grid.t))

    def draw(rng, rows):
        inner = np.zeros((rows, len(grid.times)))
        inner[:, 1:] = np.cumsum(rng.standard_normal((rows, len(dt))) * dt, axis=1)
        plus = _bm_at(rng, np.abs(inner))
        if not signed:
            return plus
        minus = _bm_at(rng, np.abs(inner))
        return np.where(inner >= 0, plus, minus)
    return PathEnsemble(spec, grid, _blocked(n, seed, replication, draw), seed, Method.COMPOSE, replication)


def simulate(spec, grid, n, seed, replication=0, method=None):
    """Dispatch on ``spec.family``."""
    f = spec.family
    if f is Family.FBM:
        return simulate_fbm(grid, spec.r, n, seed, replication, method or Method.CHOLESKY)
    if f is Family.BM:
        return simulate_bm(grid, n, seed, replication)
    if f is Family.STABLE:
        return simulate_stable(grid, spec.r, spec.c, n, seed, replication)
    if f is Family.INTEGRATED_BM:
        return simulate_integrated_bm(grid, spec.m, n, seed, replication)
    return simulate_iterated_bm(grid, n, seed, replication)
