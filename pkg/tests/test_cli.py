import json
import math

import pytest

from selfsim_quantile import cli
from selfsim_quantile import io as sio


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_rows_and_provenance(tmp_path, capsys):
    code, out, _ = run(["simulate", "--family", "bm", "--paths", "100", "--seed", "3", "--out", str(tmp_path)], capsys)
    assert code == 0
    path = tmp_path / "paths.csv"
    header, rows = sio.read_table(path)
    assert header == ["path_id", "t", "value"] and len(rows) == 100 * 33
    meta = sio.read_meta(path)
    assert meta["seed"] == 3 and meta["spec"]["family"] == "bm"
    assert json.loads(sio.sidecar_path(path).read_text()) == meta
    assert all(float(r[2]) == 0.0 for r in rows if float(r[1]) == 0.0)


def test_simulate_byte_identical(tmp_path, capsys):
    args = ["simulate", "--family", "stable", "--r", "1.3", "--paths", "20", "--seed", "5"]
    run(args + ["--out", str(tmp_path)], capsys)
    first = (tmp_path / "paths.csv").read_bytes()
    run(args + ["--out", str(tmp_path)], capsys)
    assert (tmp_path / "paths.csv").read_bytes() == first


def test_bad_stable_index_is_usage_error(tmp_path, capsys):
    code, _, err = run(["simulate", "--family", "stable", "--r", "2.5", "--out", str(tmp_path)], capsys)
    assert code == 2 and "(0, 2)" in err
    assert not (tmp_path / "paths.csv").exists()


def test_limit_cov_table(tmp_path, capsys):
    code, _, _ = run(["limit-cov", "--family", "bm", "--times", "0,1,2", "--levels", "0.5", "--out", str(tmp_path)],
                     capsys)
    assert code == 0
    _, rows = sio.read_table(tmp_path / "limit_cov.csv")
    got = {(float(r[0]), float(r[2])): (float(r[4]), r[5]) for r in rows}
    assert got[(1.0, 2.0)][0] == pytest.approx(math.sqrt(2) * math.pi / 4, rel=1e-6)
    assert got[(1.0, 1.0)][0] == pytest.approx(math.pi / 2, rel=1e-6)
    assert got[(0.0, 1.0)] == (0.0, "zero_boundary")


def test_limit_cov_cauchy(tmp_path, capsys):
    run(["limit-cov", "--family", "stable", "--r", "1", "--times", "1,2", "--levels", "0.5", "--out", str(tmp_path)],
        capsys)
    _, rows = sio.read_table(tmp_path / "limit_cov.csv")
    off = [float(r[4]) for r in rows if float(r[0]) != float(r[2])]
    assert off[0] == pytest.approx(math.pi ** 2 / 4, rel=1e-5)


def test_iterated_limit_cov_is_monte_carlo_only(tmp_path, capsys):
    code, _, err = run(["limit-cov", "--family", "iterated_bm", "--times", "1,2", "--levels", "0.5",
                        "--out", str(tmp_path)], capsys)
    assert code == 2 and "Monte-Carlo-only" in err


def test_quantile_field(tmp_path, capsys):
    code, _, _ = run(["quantile-field", "--family", "bm", "--n", "20", "--reps", "2", "--n-times", "5",
                      "--n-levels", "3", "--out", str(tmp_path)], capsys)
    assert code == 0
    header, rows = sio.read_table(tmp_path / "quantile_field.csv")
    assert header == ["replication", "t", "alpha", "w"] and len(rows) == 2 * 5 * 3


def test_verify_properties(tmp_path, capsys):
    code, out, _ = run(["verify", "properties", "--out", str(tmp_path)], capsys)
    assert code == 0 and "FAIL" not in out
    report = json.loads((tmp_path / "properties.json").read_text())
    assert report["experiment"] == "PROPERTY_SUITE" and "resolved" in report["config"]
    assert (tmp_path / "properties_verdicts.csv").exists()


def test_verify_clt_cov_small(tmp_path, capsys):
    code, out, _ = run(["verify", "clt-cov", "--family", "bm", "--n", "100", "--reps", "200",
                        "--points", "1,0.5,2,0.5", "--out", str(tmp_path)], capsys)
    assert code in (0, 1)
    assert "mean_within_se" in out
    assert (tmp_path / "clt_cov_estimates.csv").exists()


def test_clt_cov_precondition(tmp_path, capsys):
    code, _, err = run(["verify", "clt-cov", "--reps", "50", "--out", str(tmp_path)], capsys)
    assert code == 2 and "reps" in err


def test_explain_and_precedence(tmp_path, capsys):
    ini = tmp_path / "run.ini"
    ini.write_text("[process]\nfamily = stable\nr = 1.2\n[run]\nseed = 11\n[experiment]\npaths = 7\n")
    code, out, _ = run(["simulate", "--config", str(ini), "--r", "1.7", "--explain"], capsys)
    assert code == 0
    cfg = json.loads(out)
    assert cfg["process"]["family"] == "stable"
    assert cfg["process"]["r"] == 1.7  # flag beats file
    assert cfg["run"]["seed"] == 11 and cfg["experiment"]["paths"] == 7
    assert not list(tmp_path.glob("*.csv"))


def test_command_defaults():
    assert cli.resolve_config("clt-cov").experiment["n"] == 400
    assert cli.resolve_config("normality").experiment["reps"] == 2000
    assert cli.resolve_config("tail").experiment["paths"] == 20000


def test_bad_config(tmp_path, capsys):
    ini = tmp_path / "bad.ini"
    ini.write_text("[process]\nfamliy = bm\n")
    code, _, err = run(["simulate", "--config", str(ini)], capsys)
    assert code == 2 and "famliy" in err


def test_output_dir_env(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(sio.OUTPUT_DIR_ENV, str(tmp_path))
    assert cli.main(["simulate", "--paths", "2", "--n-times", "3"]) == 0
    assert (tmp_path / "paths.csv").exists()


def test_tail_decade_precondition(tmp_path, capsys):
    code, _, err = run(["verify", "tail", "--u-min", "1", "--u-max", "5", "--out", str(tmp_path)], capsys)
    assert code == 2 and "decade" in err
