import json
import math

import numpy as np
import pytest

from selfsim_quantile import __version__
from selfsim_quantile.harness import (
    VerificationReport,
    covariance_with_se,
    default_check_points,
    lemma1_bound_check,
    lemma1_constant,
    lemma1_grid,
    mc_normality,
    mc_quantile_clt,
    near_zero_check,
    near_zero_grid,
    property_suite,
    replicate_fields,
    scalability_check,
    sup_near_zero,
    tail_exponent,
    tail_report,
)
from selfsim_quantile.models import ProcessSpec
from selfsim_quantile.simulate import GridSpec

BM = ProcessSpec.bm()
SMALL = GridSpec.uniform(2.0, 5, (0.25, 0.75), 3)


@pytest.fixture(scope="module")
def clt_report():
    return mc_quantile_clt(BM, SMALL, 100, 200, seed=3)


def test_report_schema(clt_report):
    d = json.loads(json.dumps(clt_report.to_dict()))
    assert set(d) == {"experiment", "config", "seed", "estimates", "tests", "verdicts", "version", "wall_time"}
    assert d["experiment"] == "CLT_COV" and d["version"] == __version__ and d["seed"] == 3
    for e in d["estimates"]:
        assert {"coords", "value", "se"} <= set(e)
    for v in d["verdicts"]:
        assert {"check", "pass"} <= set(v)
    assert d["config"]["n"] == 100 and d["config"]["spec"]["family"] == "bm"


def test_every_covariance_has_se(clt_report):
    covs = [e for e in clt_report.estimates if e["name"] == "cov"]
    assert len(covs) == 45
    assert all(e["se"] > 0 for e in covs)


def test_report_deterministic(clt_report):
    again = mc_quantile_clt(BM, SMALL, 100, 200, seed=3)
    assert json.dumps(again.payload()) == json.dumps(clt_report.payload())


def test_workers_do_not_change_results():
    a = replicate_fields(BM, SMALL, 30, 7, seed=1, workers=1)
    b = replicate_fields(BM, SMALL, 30, 7, seed=1, workers=3)
    assert np.array_equal(a, b)


def test_replication_offsets():
    a = replicate_fields(BM, SMALL, 30, 6, seed=1)
    b = replicate_fields(BM, SMALL, 30, 3, seed=1, first_replication=3)
    assert np.array_equal(a[3:], b)


def test_clt_preconditions():
    with pytest.raises(ValueError, match="replications"):
        mc_quantile_clt(BM, SMALL, 100, 50, seed=0)
    with pytest.raises(ValueError):
        mc_quantile_clt(BM, SMALL, 50, 500, seed=0)


def test_clt_iterated_reports_monte_carlo_only_pairs():
    r = mc_quantile_clt(ProcessSpec.iterated_bm(), SMALL, 100, 200, seed=0, points=[(1.0, 0.5), (2.0, 0.5)])
    covs = [e for e in r.estimates if e["name"] == "cov"]
    assert covs[1]["theory"] is None and covs[0]["theory"] > 0
    assert {v["check"] for v in r.verdicts} == {"mean_within_se", "cov_within_se", "diag_rel_error"}


def test_default_check_points():
    pts = default_check_points(GridSpec.uniform())
    assert (1.0, 0.5) in pts and (2.0, 0.75) in pts and len(pts) == 9


def test_covariance_with_se():
    rng = np.random.default_rng(0)
    x = rng.standard_normal(20000)
    y = 0.5 * x + rng.standard_normal(20000)
    cov, se = covariance_with_se(x, y)
    assert abs(cov - 0.5) < 4 * se
    assert se == pytest.approx(math.sqrt(1.25 + 0.25) / math.sqrt(20000), rel=0.1)


def test_normality_boundary():
    r = mc_normality(BM, (0.0, 0.5), 100, 200, seed=0)
    assert r.verdicts == [{"check": "boundary", "pass": True, "skipped": True}]


def test_normality_small():
    r = mc_normality(BM, (1.0, 0.5), 200, 300, seed=0)
    assert r.tests[0]["name"] == "ks_normal" and 0 <= r.tests[0]["p"] <= 1
    assert r.experiment == "CLT_NORMALITY"


def test_scalability_identity_factor():
    r = scalability_check(BM, 0.5, 0.5, [1.0, 4.0], 50, 200, seed=0)
    assert r.tests[0]["p"] == 1.0 and r.tests[0]["statistic"] == 0.0
    with pytest.raises(ValueError):
        scalability_check(BM, 0.0, 0.5, [2.0], 50, 200, seed=0)


def test_lemma1_constant():
    assert lemma1_constant(0.5, 1.0, 0.25) == pytest.approx(0.5 / (1 - 2 ** -0.5))
    assert lemma1_constant(0.5, 1.0, 0.25) == pytest.approx(1.70711, abs=1e-5)
    assert lemma1_constant(0.5, 1.0, 1.0) == pytest.approx(1 / (1 - 2 ** -0.5))


def test_lemma1_grid_matched_resolution():
    grid, base = lemma1_grid(0.25, [0.5], base_points=5, octaves=3)
    t = grid.t
    for j in (1, 2, 3):
        for s in base[1:]:
            assert np.any(np.isclose(t, 2.0 ** -j * 0.25 * s))
    assert np.all(np.isin(base, t))


def test_lemma1_small_run():
    r = lemma1_bound_check(BM, 0.25, 1.0, 100, 200, seed=0, alphas=[0.25, 0.5, 0.75])
    assert r.verdict("lemma1_inequality")
    assert r.estimate("constant")["value"] == pytest.approx(1.70711, abs=1e-5)
    with pytest.raises(ValueError):
        lemma1_bound_check(BM, 1.5, 1.0, 100, 200, seed=0)


def test_near_zero_below_first_grid_time():
    grid = near_zero_grid([0.2, 0.1], [0.5], points_per_delta=4)
    fields = replicate_fields(BM, grid, 50, 20, seed=0)
    assert np.all(sup_near_zero(fields, grid, 0.001) == 0.0)


def test_near_zero_small_run():
    r = near_zero_check(BM, [0.2, 0.05, 0.01], [0.5, 1.0], 100, 200, seed=0, alphas=[0.25, 0.5, 0.75])
    assert r.verdict("monotone_in_delta")
    ex = {tuple(e["coords"]): e["value"] for e in r.estimates}
    assert ex[(0.01, 0.5)] <= ex[(0.2, 0.5)]


def test_tail_probabilities_nonincreasing():
    est = tail_exponent(ProcessSpec.stable(1.0), n_paths=3000, seed=0, n_boot=20)
    assert np.all(np.diff(est.exceedance) <= 0)
    assert est.band[0] < est.theta < est.band[1]
    assert est.fit_range[1] / est.fit_range[0] == pytest.approx(10.0, rel=1e-9)


def test_tail_gaussian_is_super_polynomial():
    est = tail_exponent(BM, n_paths=5000, seed=0, n_boot=30)
    assert est.super_polynomial


def test_tail_errors():
    with pytest.raises(ValueError, match="decade"):
        tail_exponent(BM, u_grid=[1.0, 2.0, 5.0], n_paths=100, seed=0)
    with pytest.raises(ValueError, match="widen"):
        tail_exponent(BM, u_grid=np.logspace(2, 4, 5), n_paths=100, seed=0)


def test_tail_report_verdicts():
    r = tail_report(ProcessSpec.stable(1.0), n_paths=3000, seed=1)
    assert r.experiment == "TAIL_EXPONENT"
    assert {v["check"] for v in r.verdicts} == {"exceedance_nonincreasing", "theta_matches_index"}


def test_property_suite_passes():
    r = property_suite(seed=1)
    assert r.passed, r.verdicts
    assert r.estimate("order_statistic_contraction_violations")["value"] == 0


def test_report_lookup_errors():
    r = VerificationReport("PROPERTY_SUITE", {}, 0)
    with pytest.raises(KeyError):
        r.verdict("missing")
    with pytest.raises(KeyError):
        r.estimate("missing")
    assert r.passed
