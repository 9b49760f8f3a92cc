import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from selfsim_quantile.empirical import (
    QuantileField,
    ecdf,
    empirical_quantile,
    empirical_quantiles,
    expected_order_statistic,
    finite_n_centering,
    is_quantile,
    maximal_quantile_rank,
    model_quantiles,
    order_statistic_minmax,
    order_statistics,
    quantile_field,
    quantile_rank,
    reflected_quantile_check,
)
from selfsim_quantile.models import ProcessSpec, marginal_quantile
from selfsim_quantile.simulate import GridSpec, simulate

samples = st.lists(st.floats(-1e6, 1e6, allow_nan=False), min_size=1, max_size=40)
levels = st.floats(0.001, 0.999)


def test_ecdf_examples():
    assert ecdf([1, 2, 3], 2) == pytest.approx(2 / 3)
    assert ecdf([1, 2, 3], 0.5) == 0.0
    assert ecdf([1, 2, 3], 3) == 1.0
    with pytest.raises(ValueError):
        ecdf([], 0.0)


@given(samples, st.floats(-2e6, 2e6), st.floats(0, 1e6))
def test_ecdf_monotone(x, a, h):
    assert ecdf(x, a) <= ecdf(x, a + h)


def test_empirical_quantile_examples():
    assert empirical_quantile([3, 1, 2], 0.5) == 2
    assert empirical_quantile([3, 1, 2], 1 / 3) == 1
    assert empirical_quantile([3, 1, 2], 0.34) == 2
    with pytest.raises(ValueError):
        empirical_quantile([1.0], 1.0)


def test_level_slack_for_inexact_levels():
    # 1 - 0.7 is slightly above 0.3 in floating point; the rank must still be 3 of 10
    assert quantile_rank(10, 1 - 0.7) == 3
    assert quantile_rank(10, np.array([0.1, 0.15])).tolist() == [1, 2]
    with pytest.raises(ValueError):
        quantile_rank(10, 0.0)


def test_maximal_rank():
    assert maximal_quantile_rank(4, 0.25) == 2
    assert maximal_quantile_rank(4, 0.3) == 2
    assert maximal_quantile_rank(4, 0.99) == 4


def test_order_statistics_examples():
    assert order_statistics([3, 1, 2]).tolist() == [1, 2, 3]
    vals, idx = order_statistics([2, 2, 1], return_index=True)
    assert vals.tolist() == [1, 2, 2] and idx.tolist() == [2, 0, 1]


def test_minmax_exhaustive_small():
    rng = np.random.default_rng(0)
    for n in range(1, 7):
        for _ in range(30):
            x = rng.integers(0, 4, n).astype(float)
            ordered = order_statistics(x)
            for k in range(1, n + 1):
                assert ordered[k - 1] == order_statistic_minmax(x, k)


@settings(max_examples=300)
@given(st.integers(1, 64).flatmap(lambda n: st.tuples(
    st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n),
    st.lists(st.floats(-1e3, 1e3), min_size=n, max_size=n))))
def test_order_statistic_contraction(pair):
    x, y = map(np.asarray, pair)
    assert np.max(np.abs(np.sort(x) - np.sort(y))) <= np.max(np.abs(x - y)) + 1e-12


@given(samples, levels)
def test_empirical_quantile_is_quantile(x, a):
    assert is_quantile(x, empirical_quantile(x, a), a)


@given(samples, levels)
def test_reflected_quantile(x, a):
    assert reflected_quantile_check(x, a)


def test_reflected_examples():
    assert reflected_quantile_check([-2, -1, 0, 1, 2], 0.5)
    assert reflected_quantile_check([1, 2, 3, 4], 0.25)
    # the reflected quantile is the largest 0.25-quantile here, not the minimal one
    q_min = empirical_quantile([1, 2, 3, 4], 0.25)
    assert q_min == 1 and is_quantile([1, 2, 3, 4], 2, 0.25)
    with pytest.raises(ValueError):
        reflected_quantile_check([1.0], 0.0)


def test_reflection_sweep():
    rng = np.random.default_rng(1)
    for _ in range(200):
        x = rng.standard_normal(rng.integers(1, 60)).round(1)
        for a in np.linspace(0.1, 0.9, 9):
            assert reflected_quantile_check(x, a)


@given(st.lists(st.integers(-1000, 1000), min_size=1, max_size=30, unique=True))
def test_inverse_consistency(x):
    x = [v / 8 for v in x]
    n = len(x)
    xs = np.sort(x)
    gap = np.min(np.diff(xs)) if n > 1 else 1.0
    for k in range(n + 1):
        for a in (k / n - 1 / (3 * n), k / n + 1 / (3 * n)):
            if 0 < a < 1:
                q = empirical_quantile(x, a)
                assert ecdf(x, q) >= a
                assert ecdf(x, q - gap / 2) < a


@given(samples, levels, levels)
def test_monotone_in_level(x, a, b):
    lo, hi = sorted((a, b))
    assert empirical_quantile(x, lo) <= empirical_quantile(x, hi)


def test_left_continuous_jumps_at_multiples():
    x = [5.0, 1.0, 3.0, 2.0]
    assert empirical_quantile(x, 0.5) == 2.0
    assert empirical_quantile(x, 0.5 + 1e-6) == 3.0
    assert empirical_quantile(x, 0.26) == empirical_quantile(x, 0.49)


def test_empirical_quantiles_columnwise():
    rng = np.random.default_rng(2)
    vals = rng.standard_normal((25, 4))
    alphas = [0.25, 0.5, 0.9]
    out = empirical_quantiles(vals, alphas)
    assert out.shape == (4, 3)
    for j in range(4):
        for k, a in enumerate(alphas):
            assert out[j, k] == empirical_quantile(vals[:, j], a)


# --- field -----------------------------------------------------------------

GRID = GridSpec.uniform(2.0, 5, (0.25, 0.75), 3)


@pytest.mark.parametrize("spec", [ProcessSpec.bm(), ProcessSpec.stable(0.9), ProcessSpec.iterated_bm()])
def test_field_zero_row(spec):
    f = quantile_field(simulate(spec, GRID, 50, 0))
    assert isinstance(f, QuantileField)
    assert np.all(f.values[0] == 0.0)
    assert f.values.shape == (5, 3)


def test_single_path_median_is_path():
    spec = ProcessSpec.bm()
    g = GridSpec.uniform(2.0, 5, (0.5, 0.5), 1)
    ens = simulate(spec, g, 1, 3)
    f = quantile_field(ens)
    assert np.array_equal(f.values[:, 0], ens.values[0])


def test_field_definition():
    spec = ProcessSpec.stable(1.4)
    ens = simulate(spec, GRID, 37, 4)
    f = quantile_field(ens)
    t, a = 1.5, 0.75
    expected = math.sqrt(37) * (empirical_quantile(ens.values[:, 3], a) - marginal_quantile(t, a, spec))
    assert f.at(t, a) == pytest.approx(expected, rel=1e-13)


def test_field_rejects_mismatched_grid():
    ens = simulate(ProcessSpec.bm(), GRID, 5, 0)
    with pytest.raises(ValueError):
        quantile_field(ens, GridSpec.uniform(1.0, 5, (0.25, 0.75), 3))


def test_model_quantiles_scaling():
    spec = ProcessSpec.fbm(1.2)
    m = model_quantiles(GRID, spec)
    assert np.allclose(m[2], GRID.t[2] ** 0.6 * m[-1] / GRID.T ** 0.6)
    assert np.all(m[0] == 0)


def test_bm_median_field_variance():
    grid = GridSpec.from_points([1.0], [0.5])
    spec = ProcessSpec.bm()
    w = np.array([quantile_field(simulate(spec, grid, 400, 5, rep)).values[1, 0] for rep in range(1000)])
    assert abs(w.var(ddof=1) / (math.pi / 2) - 1) < 0.10


# --- finite-n centering ----------------------------------------------------


@pytest.mark.parametrize("spec", [ProcessSpec.bm(), ProcessSpec.stable(1.0), ProcessSpec.stable(1.6)])
def test_expected_order_statistic_against_beta_quadrature(spec):
    # independent route: integrate the quantile function against the Beta(j, n - j + 1) density
    n, j = 50, 13
    b = stats.beta(j, n - j + 1)
    lo, hi = b.ppf(1e-13), b.isf(1e-13)
    x, w = np.polynomial.legendre.leggauss(80)
    u = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    ref = 0.5 * (hi - lo) * np.sum(w * b.pdf(u) * np.array([marginal_quantile(1.0, v, spec) for v in u]))
    assert expected_order_statistic(n, j, spec) == pytest.approx(ref, rel=1e-8)


def test_expected_median_of_odd_gaussian_sample():
    # the middle order statistic of a symmetric law has mean 0
    assert expected_order_statistic(41, 21, ProcessSpec.bm()) == pytest.approx(0.0, abs=1e-12)


def test_finite_n_centering_shape_and_limit():
    spec = ProcessSpec.bm()
    c100 = finite_n_centering(GRID, spec, 100)
    c1600 = finite_n_centering(GRID, spec, 1600)
    assert c100.shape == (5, 3) and np.all(c100[0] == 0)
    assert np.abs(c1600).max() < np.abs(c100).max()


def test_finite_n_centering_matches_monte_carlo():
    spec, n, m = ProcessSpec.bm(), 40, 3000
    grid = GridSpec.from_points([1.0], [0.25])
    w = np.array([quantile_field(simulate(spec, grid, n, 8, rep)).values[1, 0] for rep in range(m)])
    c = finite_n_centering(grid, spec, n)[1, 0]
    assert abs(w.mean() - c) < 4 * w.std(ddof=1) / math.sqrt(m)
