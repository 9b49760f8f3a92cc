"""Monte Carlo experiments for the quantile fluctuation field.

Each experiment returns a :class:`VerificationReport` whose pass/fail
checks are stated in units of estimated standard errors or at a fixed test
level.  Replication j always uses the random streams keyed by (seed, j), so
reports do not depend on the number of workers.
"""

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from . import __version__
from .empirical import (
    ecdf,
    empirical_quantile,
    finite_n_centering,
    model_quantiles,
    order_statistic_minmax,
    order_statistics,
    quantile_field,
    reflected_quantile_check,
)
from .exceptions import MonteCarloOnlyError
from .limit import LimitCovariance, limit_cov, median_cov_fbm, median_cov_stable
from .models import Family, ProcessSpec, marginal_quantile, stable_cdf
from .simulate import GridSpec, simulate


@dataclass
class VerificationReport:
    experiment: str
    config: dict
    seed: int
    estimates: list = field(default_factory=list)
    tests: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    wall_time: float = 0.0
    version: str = __version__

    @property
    def passed(self):
        return all(v["pass"] for v in self.verdicts)

    def estimate(self, name, coords=None):
        for e in self.estimates:
            if e["name"] == name and (coords is None or e["coords"] == coords):
                return e
        raise KeyError(name)

    def verdict(self, check):
        for v in self.verdicts:
            if v["check"] == check:
                return v["pass"]
        raise KeyError(check)

    def add_estimate(self, name, value, se=None, coords=None, **extra):
        self.estimates.append({"name": name, "coords": coords, "value": _num(value),
                               "se": _num(se), **{k: _num(v) for k, v in extra.items()}})

    def add_test(self, name, statistic, p):
        self.tests.append({"name": name, "statistic": _num(statistic), "p": _num(p)})

    def add_verdict(self, check, passed, **detail):
        self.verdicts.append({"check": check, "pass": bool(passed), **{k: _num(v) for k, v in detail.items()}})

    def payload(self):
        """Report content without the wall-time field (deterministic for a fixed config and seed)."""
        return {"experiment": self.experiment, "config": self.config, "seed": self.seed,
                "estimates": self.estimates, "tests": self.tests, "verdicts": self.verdicts,
                "version": self.version}

    def to_dict(self):
        return {**self.payload(), "wall_time": self.wall_time}


def _num(v):
    if v is None or isinstance(v, (bool, str)):
        return v
    if isinstance(v, (list, tuple)):
        return [_num(x) for x in v]
    if isinstance(v, (np.integer, int)):
        return int(v)
    return float(v)


# ---------------------------------------------------------------------------
# replications


def _field_chunk(spec, grid, n, seed, replications, model):
    out = np.empty((len(replications), len(grid.times), len(grid.alphas)))
    for i, rep in enumerate(replications):
        ens = simulate(spec, grid, n, seed, replication=rep)
        out[i] = quantile_field(ens, grid, spec, model=model).values
    return out


def replicate_fields(spec, grid, n, m, seed, workers=1, first_replication=0):
    """W_n on the grid for replications first_replication, ..., first_replication + m - 1.

    Returns an array of shape (m, len(grid.times), len(grid.alphas)).
    """
    model = model_quantiles(grid, spec)
    reps = list(range(first_replication, first_replication + m))
    if workers <= 1 or m < 2:
        return _field_chunk(spec, grid, n, seed, reps, model)
    chunks = [c.tolist() for c in np.array_split(reps, workers) if len(c)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(_field_chunk, *zip(*[(spec, grid, n, seed, c, model) for c in chunks])))
    return np.concatenate(parts, axis=0)


def _config(**kwargs):
    out = {}
    for k, v in kwargs.items():
        if isinstance(v, ProcessSpec):
            v = v.as_dict()
        elif isinstance(v, GridSpec):
            v = v.as_dict()
        elif isinstance(v, np.ndarray):
            v = v.tolist()
        elif isinstance(v, tuple):
            v = [list(x) if isinstance(x, tuple) else x for x in v]
        out[k] = v
    return out


def _snap(values, targets):
    values = np.asarray(values)
    return sorted({float(values[np.argmin(np.abs(values - t))]) for t in targets})


def default_check_points(grid):
    """A 3 x 3 subgrid: times near T/4, T/2, T and the two end levels plus the middle one."""
    times = _snap(grid.t[1:], [grid.T / 4, grid.T / 2, grid.T])
    alphas = _snap(grid.a, [grid.alphas[0], 0.5 * (grid.alphas[0] + grid.alphas[-1]), grid.alphas[-1]])
    return [(t, a) for t in times for a in alphas]


def covariance_with_se(x, y):
    """Sample covariance of paired replications and its standard error."""
    dx = x - x.mean()
    dy = y - y.mean()
    prod = dx * dy
    m = len(x)
    cov = prod.sum() / (m - 1)
    se = prod.std(ddof=1) / math.sqrt(m)
    return cov, se


# ---------------------------------------------------------------------------
# experiments


def mc_quantile_clt(spec, grid, n, m, seed, points=None, workers=1, rel_tol=0.10, z_crit=3.0,
                    coverage=0.95, fields=None):
    """Compare the Monte Carlo covariance of W_n with the limit covariance.

    Checks: the mean field is within ``z_crit`` standard errors of its exact
    finite-n value (which tends to 0) at no fewer than ``coverage`` of the
    positive-time grid points; the covariance at no
    fewer than ``coverage`` of the point pairs is within ``z_crit`` standard
    errors of the limit; the largest relative error on the diagonal is at most
    ``rel_tol``.
    """
    if n < 100 or m < 200:
        raise ValueError(f"need n >= 100 and m >= 200 replications for standard errors, got n={n}, m={m}")
    start = time.perf_counter()
    points = default_check_points(grid) if points is None else [tuple(map(float, p)) for p in points]
    report = VerificationReport("CLT_COV", _config(spec=spec, grid=grid, n=n, m=m, points=points,
                                                   rel_tol=rel_tol, z_crit=z_crit, coverage=coverage), seed)
    if fields is None:
        fields = replicate_fields(spec, grid, n, m, seed, workers)

    inner = fields[:, 1:, :]
    mean = inner.mean(axis=0)
    se_mean = inner.std(axis=0, ddof=1) / math.sqrt(m)
    # the ceil(n alpha)-th order statistic is biased by O(1/n), i.e. O(1/sqrt(n)) on the
    # scale of W_n; compare against that exact mean rather than its limit 0
    centering = finite_n_centering(grid, spec, n)[1:]
    zmean = np.abs(mean - centering) / se_mean
    frac_mean = float(np.mean(zmean <= z_crit))
    report.add_estimate("max_abs_mean_z_vs_zero", (np.abs(mean) / se_mean).max())
    report.add_estimate("max_abs_finite_n_centering", np.abs(centering).max())
    report.add_estimate("max_abs_mean_z", zmean.max())
    report.add_verdict("mean_within_se", frac_mean >= coverage, fraction=frac_mean)

    idx = [(grid.index_of_time(t), grid.index_of_level(a)) for t, a in points]
    cols = np.stack([fields[:, i, j] for i, j in idx], axis=1)
    zs, diag_err = [], []
    for p in range(len(points)):
        for q in range(p, len(points)):
            cov, se = covariance_with_se(cols[:, p], cols[:, q])
            try:
                theory = limit_cov(points[p], points[q], spec)
            except MonteCarloOnlyError:
                theory = None
            z = None if theory is None else (cov - theory) / se
            report.add_estimate("cov", cov, se, coords=[list(points[p]), list(points[q])], theory=theory, z=z)
            if z is not None:
                zs.append(z)
            if p == q and theory:
                diag_err.append(abs(cov / theory - 1.0))
    if zs:
        frac = float(np.mean(np.abs(zs) <= z_crit))
        report.add_verdict("cov_within_se", frac >= coverage, fraction=frac, pairs=len(zs))
    if diag_err:
        report.add_verdict("diag_rel_error", max(diag_err) <= rel_tol, max_rel_error=max(diag_err))
    report.wall_time = time.perf_counter() - start
    return report


def mc_normality(spec, point, n, m, seed, workers=1, level=0.01):
    """One-sample KS test of W_n(t, alpha) / sqrt(limit variance) against N(0, 1)."""
    t, alpha = map(float, point)
    start = time.perf_counter()
    report = VerificationReport("CLT_NORMALITY", _config(spec=spec, point=[t, alpha], n=n, m=m, level=level), seed)
    if t == 0.0:
        report.add_verdict("boundary", True, skipped=True)
        return report
    grid = GridSpec.from_points([t], [alpha])
    fields = replicate_fields(spec, grid, n, m, seed, workers)
    sd = math.sqrt(limit_cov((t, alpha), (t, alpha), spec))
    z = fields[:, 1, 0] / sd
    res = stats.kstest(z, "norm", method="asymp")
    report.add_estimate("mean_standardized", z.mean(), z.std(ddof=1) / math.sqrt(m))
    report.add_estimate("var_standardized", z.var(ddof=1), z.var(ddof=1) * math.sqrt(2.0 / (m - 1)))
    report.add_test("ks_normal", res.statistic, res.pvalue)
    report.add_verdict("ks_normal", res.pvalue >= level)
    report.wall_time = time.perf_counter() - start
    return report


def scalability_check(spec, t0, alpha0, c_factors, n, m, seed, workers=1, level=0.01):
    """Two-sample KS between W_n(c t0, alpha0) and c**H W_n(t0, alpha0) over replications."""
    if t0 <= 0 or any(c <= 0 for c in c_factors):
        raise ValueError("need t0 > 0 and positive scale factors")
    start = time.perf_counter()
    report = VerificationReport("SCALABILITY", _config(spec=spec, t0=t0, alpha0=alpha0, c_factors=list(c_factors),
                                                       n=n, m=m, level=level), seed)
    grid = GridSpec.from_points([t0] + [c * t0 for c in c_factors], [alpha0])
    fields = replicate_fields(spec, grid, n, m, seed, workers)
    base = fields[:, grid.index_of_time(t0), 0]
    for c in c_factors:
        scaled = fields[:, grid.index_of_time(c * t0), 0]
        res = stats.ks_2samp(scaled, c ** spec.H * base, method="asymp")
        report.add_test(f"ks_2samp_c={c:g}", res.statistic, res.pvalue)
        report.add_verdict(f"scalable_c={c:g}", res.pvalue >= level)
    report.wall_time = time.perf_counter() - start
    return report


def lemma1_constant(H, q, delta):
    """delta**(Hq) / (1 - 2**(-Hq))."""
    return delta ** (H * q) / (1.0 - 2.0 ** (-H * q))


def lemma1_grid(delta, alphas, base_points=9, octaves=8):
    """Grid on J = [1, 2] plus its dyadic images 2**-j delta (1, 2], j = 1..octaves."""
    base = np.linspace(1.0, 2.0, base_points)
    small = {round(float(2.0 ** -j * delta * s), 15) for j in range(1, octaves + 1) for s in base[1:]}
    return GridSpec.from_points(sorted(small | set(base.tolist())), alphas), base


def lemma1_bound_check(spec, delta, q, n, m, seed, alphas=None, base_points=9, octaves=8, workers=1, z_crit=3.0):
    """Compare E sup_{(0, delta] x A} |W|**q with delta**(Hq)/(1 - 2**-Hq) E sup_{J x A} |W|**q."""
    if not 0.0 < delta <= 1.0 or not 0.0 < q <= 1.0:
        raise ValueError("need delta in (0, 1] and q in (0, 1]")
    alphas = np.linspace(0.25, 0.75, 17) if alphas is None else alphas
    start = time.perf_counter()
    grid, base = lemma1_grid(delta, alphas, base_points, octaves)
    report = VerificationReport("LEMMA1_BOUND", _config(spec=spec, delta=delta, q=q, n=n, m=m, grid=grid,
                                                        z_crit=z_crit), seed)
    fields = np.abs(replicate_fields(spec, grid, n, m, seed, workers)) ** q
    t = grid.t
    near = (t > 0) & (t <= delta + 1e-15)
    far = (t >= 1.0) & (t <= 2.0)
    lhs = fields[:, near, :].max(axis=(1, 2))
    rhs = fields[:, far, :].max(axis=(1, 2))
    const = lemma1_constant(spec.H, q, delta)
    L, se_L = lhs.mean(), lhs.std(ddof=1) / math.sqrt(m)
    R, se_R = const * rhs.mean(), const * rhs.std(ddof=1) / math.sqrt(m)
    rel = math.hypot(se_L / L, se_R / R)
    report.add_estimate("constant", const)
    report.add_estimate("lhs", L, se_L)
    report.add_estimate("rhs", R, se_R)
    report.add_verdict("lemma1_inequality", L <= R * (1.0 + z_crit * rel), ratio=L / R, combined_rel_se=rel)
    report.wall_time = time.perf_counter() - start
    return report


def near_zero_grid(deltas, alphas, points_per_delta=8):
    times = set()
    for d in deltas:
        times.update(np.linspace(0.0, d, points_per_delta + 1)[1:].round(15).tolist())
    return GridSpec.from_points(sorted(times), alphas)


def near_zero_check(spec, deltas, epsilon_grid, n, m, seed, alphas=None, points_per_delta=8, workers=1,
                    z_crit=2.0):
    """P(sup_{t <= delta, alpha in I} |W_n| > eps) for decreasing delta."""
    deltas = sorted(map(float, deltas), reverse=True)
    alphas = np.linspace(0.25, 0.75, 17) if alphas is None else alphas
    start = time.perf_counter()
    grid = near_zero_grid(deltas, alphas, points_per_delta)
    report = VerificationReport("NEAR_ZERO", _config(spec=spec, deltas=deltas, epsilon_grid=list(epsilon_grid),
                                                     n=n, m=m, grid=grid, z_crit=z_crit), seed)
    fields = np.abs(replicate_fields(spec, grid, n, m, seed, workers))
    t = grid.t
    probs = {}
    for d in deltas:
        sup = fields[:, t <= d + 1e-15, :].max(axis=(1, 2))
        for eps in epsilon_grid:
            p = float(np.mean(sup > eps))
            se = math.sqrt(max(p * (1 - p), 1.0 / m) / m)
            probs[(d, eps)] = (p, se)
            report.add_estimate("exceedance", p, se, coords=[d, eps])
    monotone = all(
        probs[(small, eps)][0] <= probs[(big, eps)][0] + z_crit * math.hypot(probs[(small, eps)][1], probs[(big, eps)][1])
        for eps in epsilon_grid for big, small in zip(deltas, deltas[1:]))
    report.add_verdict("monotone_in_delta", monotone)
    below = [eps for eps in epsilon_grid if probs[(deltas[-1], eps)][0] < eps]
    report.add_verdict("below_epsilon_at_smallest_delta", bool(below), smallest_eps=min(below) if below else None)
    report.wall_time = time.perf_counter() - start
    return report


def sup_near_zero(fields, grid, delta):
    """Per-replication sup of |W| over t <= delta (0 when no positive grid time is that small)."""
    return np.abs(fields[:, grid.t <= delta + 1e-15, :]).max(axis=(1, 2))


@dataclass
class TailEstimate:
    u_grid: np.ndarray
    exceedance: np.ndarray
    counts: np.ndarray
    theta: float
    se: float
    fit_range: tuple
    super_polynomial: bool
    curvature_z: float

    @property
    def band(self):
        return (self.theta - 2.0 * self.se, self.theta + 2.0 * self.se)


def _tail_fit(u, sup, min_count):
    counts = (sup[:, None] > u[None, :]).sum(axis=0)
    ok = np.nonzero(counts >= min_count)[0]
    if ok.size == 0:
        return None
    u_max = u[ok[-1]]
    sel = (u >= u_max / 10.0 * (1 - 1e-12)) & (u <= u_max) & (counts > 0)
    if sel.sum() < 3:
        return None
    x = np.log(u[sel])
    y = np.log(counts[sel] / len(sup))
    slope, _ = np.polyfit(x, y, 1)
    curv = np.polyfit(x - x.mean(), y, 2)[0] if sel.sum() >= 4 else 0.0
    return -slope, curv, (float(u[sel][0]), float(u_max)), counts


def tail_exponent(spec, u_grid=None, n_paths=20000, seed=0, n_times=101, min_count=50, n_boot=200):
    """Power-law exponent of P(sup_{t in [1, 2]} |X(t)| > u).

    The slope of log P against log u is fitted over the decade ending at the
    largest threshold with at least ``min_count`` exceedances; its standard
    error comes from a bootstrap over paths.  A significantly concave
    log-log curve (curvature beyond three bootstrap standard errors) marks
    the tail as faster than any power.
    """
    u = np.logspace(-1, 4, 81) if u_grid is None else np.asarray(u_grid, dtype=float)
    if u.max() / u.min() < 10.0:
        raise ValueError("u_grid must span at least one decade")
    grid = GridSpec.from_points(np.linspace(1.0, 2.0, n_times), [0.5])
    paths = simulate(spec, grid, n_paths, seed).values
    sup = np.abs(paths[:, 1:]).max(axis=1)
    fit = _tail_fit(u, sup, min_count)
    if fit is None:
        raise ValueError(f"fewer than {min_count} exceedances on the u grid; widen u_grid towards smaller values "
                         f"(largest sup observed {sup.max():.3g})")
    theta, curv, rng_fit, counts = fit
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(1 << 30,))))
    boot_theta, boot_curv = [], []
    for _ in range(n_boot):
        res = _tail_fit(u, sup[rng.integers(0, n_paths, n_paths)], min_count)
        if res is not None:
            boot_theta.append(res[0])
            boot_curv.append(res[1])
    se = float(np.std(boot_theta, ddof=1))
    curv_se = float(np.std(boot_curv, ddof=1))
    curvature_z = curv / curv_se if curv_se > 0 else 0.0
    return TailEstimate(u, counts / n_paths, counts, float(theta), se, rng_fit,
                        bool(curvature_z < -3.0), float(curvature_z))


def tail_report(spec, u_grid=None, n_paths=20000, seed=0, n_times=101, z_crit=3.0):
    """Wrap :func:`tail_exponent` in a report: stable tails must match r, Gaussian tails must be super-polynomial."""
    start = time.perf_counter()
    est = tail_exponent(spec, u_grid, n_paths, seed, n_times)
    report = VerificationReport("TAIL_EXPONENT", _config(spec=spec, n_paths=n_paths, n_times=n_times,
                                                         z_crit=z_crit), seed)
    report.add_estimate("theta", est.theta, est.se, coords=list(est.fit_range))
    report.add_estimate("curvature_z", est.curvature_z)
    for ui, p, k in zip(est.u_grid, est.exceedance, est.counts):
        report.add_estimate("exceedance", p, math.sqrt(p * (1 - p) / n_paths), coords=[float(ui)], count=int(k))
    report.add_verdict("exceedance_nonincreasing", bool(np.all(np.diff(est.exceedance) <= 0)))
    if spec.family is Family.STABLE:
        report.add_verdict("theta_matches_index", abs(est.theta - spec.r) <= z_crit * est.se, expected=spec.r)
    elif spec.is_gaussian:
        report.add_verdict("super_polynomial_tail", est.super_polynomial)
    report.wall_time = time.perf_counter() - start
    return report


def convergence_direction(spec, grid, ns=(100, 400, 1600), m=500, seed=0, alpha=0.5, workers=1, z_crit=2.0):
    """Largest relative error of the diagonal variance at level alpha must not grow with n (within z_crit se)."""
    start = time.perf_counter()
    report = VerificationReport("CLT_COV", _config(spec=spec, grid=grid, ns=list(ns), m=m, alpha=alpha,
                                                   z_crit=z_crit, check="convergence_direction"), seed)
    j = grid.index_of_level(alpha)
    theory = np.array([limit_cov((t, alpha), (t, alpha), spec) for t in grid.times[1:]])
    errs = []
    for k, n in enumerate(ns):
        # disjoint replication ranges keep the sample sizes independent
        fields = replicate_fields(spec, grid, n, m, seed, workers, first_replication=k * m)
        x = fields[:, 1:, j]
        var = x.var(axis=0, ddof=1)
        d = x - x.mean(axis=0)
        se_var = (d ** 2).std(axis=0, ddof=1) / math.sqrt(m)
        rel = np.abs(var / theory - 1.0)
        i = int(np.argmax(rel))
        errs.append((rel[i], se_var[i] / theory[i]))
        report.add_estimate("max_diag_rel_error", rel[i], se_var[i] / theory[i], coords=[n, grid.times[1 + i]])
    ok = all(b[0] <= a[0] + z_crit * math.hypot(a[1], b[1]) for a, b in zip(errs, errs[1:]))
    report.add_verdict("nonincreasing_in_n", ok)
    report.wall_time = time.perf_counter() - start
    return report


# ---------------------------------------------------------------------------
# deterministic property checks


def check_contraction(rng, pairs=10_000, max_n=64):
    """Violations of max_k |x_(k) - y_(k)| <= max_k |x_k - y_k|."""
    bad = 0
    for _ in range(pairs):
        n = int(rng.integers(1, max_n + 1))
        x = rng.standard_normal(n) * rng.exponential()
        y = x + rng.standard_normal(n) * rng.exponential()
        if np.max(np.abs(np.sort(x) - np.sort(y))) > np.max(np.abs(x - y)) + 1e-15:
            bad += 1
    return bad


def check_minmax(rng, max_n=6, samples_per_n=20):
    """Violations of x_(k) = min over k-subsets of the max, on small integer samples with ties."""
    bad = 0
    for n in range(1, max_n + 1):
        for _ in range(samples_per_n):
            x = rng.integers(0, 4, n).astype(float)
            ordered = order_statistics(x)
            bad += sum(ordered[k - 1] != order_statistic_minmax(x, k) for k in range(1, n + 1))
    return bad


def check_reflection(rng, samples=200, levels=np.linspace(0.1, 0.9, 9)):
    bad = 0
    for _ in range(samples):
        n = int(rng.integers(1, 50))
        x = np.round(rng.standard_normal(n), int(rng.integers(0, 3)))
        bad += sum(not reflected_quantile_check(x, a) for a in levels)
    return bad


def check_inverse_consistency(rng, samples=200):
    """ecdf(q_alpha) >= alpha and ecdf(q_alpha - eps) < alpha at alpha = k/n +- 1/(3n)."""
    bad = 0
    for _ in range(samples):
        n = int(rng.integers(1, 40))
        x = rng.standard_normal(n)
        gap = np.min(np.diff(np.sort(x))) if n > 1 else 1.0
        for k in range(n + 1):
            for a in (k / n - 1.0 / (3 * n), k / n + 1.0 / (3 * n)):
                if not 0.0 < a < 1.0:
                    continue
                q = empirical_quantile(x, a)
                bad += ecdf(x, q) < a
                bad += ecdf(x, q - 0.5 * gap) >= a
    return bad


def check_zero_row(seed):
    bad = 0
    grid = GridSpec.uniform(1.0, 5, (0.25, 0.75), 5)
    for spec in (ProcessSpec.bm(), ProcessSpec.fbm(0.6), ProcessSpec.stable(1.2), ProcessSpec.integrated_bm(1),
                 ProcessSpec.iterated_bm()):
        ens = simulate(spec, grid, 32, seed)
        bad += int(np.any(ens.values[:, 0] != 0.0))
        bad += int(np.any(quantile_field(ens).values[0] != 0.0))
    return bad


def check_scaling(levels=np.linspace(0.1, 0.9, 9), times=(0.25, 1.0, 3.0)):
    """Marginal quantile scaling and F(tau_alpha(1)) = alpha for stable inputs."""
    bad = 0
    for spec in (ProcessSpec.stable(1.0), ProcessSpec.stable(0.7), ProcessSpec.stable(1.5)):
        for a in levels:
            q1 = marginal_quantile(1.0, a, spec)
            bad += abs(stable_cdf(q1, spec.r, spec.c) - a) > 1e-8
            bad += sum(marginal_quantile(t, a, spec) != t ** spec.H * q1 for t in times)
    return bad


def fbm_dual_route_gap(times=(0.25, 0.5, 1.0, 2.0), indices=(0.5, 1.0, 1.5)):
    gap = 0.0
    for r in indices:
        for s in times:
            for t in times:
                a, b = median_cov_fbm(s, t, r, return_routes=True)
                gap = max(gap, abs(a - b))
    return gap


def stable_dual_route_gap(pairs=((1.0, 2.0), (0.5, 1.0)), indices=(0.8, 1.0, 1.3)):
    gap = 0.0
    for r in indices:
        spec = ProcessSpec.stable(r)
        for s, t in pairs:
            gap = max(gap, abs(limit_cov((s, 0.5), (t, 0.5), spec) - median_cov_stable(s, t, r)))
    return gap


def property_suite(seed, tol=1e-6):
    """Deterministic and randomized property checks of the empirical, models and limit layers."""
    start = time.perf_counter()
    report = VerificationReport("PROPERTY_SUITE", _config(tol=tol), seed)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))
    counts = {
        "order_statistic_contraction": check_contraction(rng),
        "minmax_identity": check_minmax(rng),
        "quantile_reflection": check_reflection(rng),
        "ecdf_quantile_inverse": check_inverse_consistency(rng),
        "zero_row": check_zero_row(seed),
        "scaling_identities": check_scaling(),
    }
    for name, bad in counts.items():
        report.add_estimate(f"{name}_violations", bad)
        report.add_verdict(name, bad == 0, violations=bad)
    for name, gap in (("fbm_dual_route", fbm_dual_route_gap()), ("stable_dual_route", stable_dual_route_gap())):
        report.add_estimate(f"{name}_gap", gap)
        report.add_verdict(name, gap <= tol, gap=gap)
    report.wall_time = time.perf_counter() - start
    return report


__all__ = [
    "VerificationReport",
    "TailEstimate",
    "replicate_fields",
    "default_check_points",
    "covariance_with_se",
    "mc_quantile_clt",
    "mc_normality",
    "scalability_check",
    "lemma1_constant",
    "lemma1_grid",
    "lemma1_bound_check",
    "near_zero_grid",
    "near_zero_check",
    "sup_near_zero",
    "tail_exponent",
    "tail_report",
    "convergence_direction",
    "property_suite",
    "LimitCovariance",
]
