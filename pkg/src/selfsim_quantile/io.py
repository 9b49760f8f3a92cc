"""Long-format CSV tables with JSON provenance.

Every CSV starts with ``#`` comment lines holding the provenance record
(config echo, seed, version) as JSON, followed by the header row, so the
files read directly with ``pandas.read_csv(path, comment="#")`` or
``numpy.genfromtxt(path, comments="#", delimiter=",", names=True)``.
A JSON sidecar with the same record sits next to each table.
"""

import csv
import json
import os
from pathlib import Path

import numpy as np

from . import __version__

OUTPUT_DIR_ENV = "SELFSIM_QUANTILE_OUTPUT_DIR"


def default_output_dir():
    return Path(os.environ.get(OUTPUT_DIR_ENV, "."))


def provenance(config, seed, **extra):
    return {"config": config, "seed": seed, "version": __version__, **extra}


def _dump(obj):
    # sort_keys and a fixed float repr make re-runs byte-identical
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), default=_default)


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sidecar_path(path):
    path = Path(path)
    return path.with_name(path.stem + ".json")


def write_table(path, header, rows, meta):
    """Write ``rows`` under ``header`` with ``meta`` as a comment line and a JSON sidecar."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write("# " + _dump(meta) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    write_json(sidecar_path(path), meta)
    return path


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if hasattr(v, "value"):
        return v.value
    return v


def write_json(path, obj):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n")
    return path


def read_meta(path):
    """Provenance record from the first comment line of a table."""
    with open(path) as fh:
        first = fh.readline()
    if not first.startswith("# "):
        raise ValueError(f"{path} has no provenance line")
    return json.loads(first[2:])


def read_table(path):
    """(header, rows) of a table written by :func:`write_table`, values as strings."""
    with open(path, newline="") as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    reader = csv.reader(lines)
    header = next(reader)
    return header, list(reader)


# ---------------------------------------------------------------------------
# the three table shapes


def write_ensemble(path, ensemble, config=None):
    """PathEnsemble as ``path_id,t,value`` (one row per path and grid time)."""
    meta = provenance(config or {}, ensemble.seed, spec=ensemble.spec.as_dict(), grid=ensemble.grid.as_dict(),
                      method=ensemble.method.value, replication=ensemble.replication)
    times = ensemble.grid.times
    rows = ((j, t, v) for j, path in enumerate(ensemble.values) for t, v in zip(times, path))
    return write_table(path, ["path_id", "t", "value"], rows, meta)


def write_quantile_fields(path, fields, spec, seed, config=None):
    """QuantileFields as ``replication,t,alpha,w``."""
    grid = fields[0].grid
    meta = provenance(config or {}, seed, spec=spec.as_dict(), grid=grid.as_dict(), n=fields[0].n)

    def rows():
        for f in fields:
            for i, t in enumerate(grid.times):
                for k, a in enumerate(grid.alphas):
                    yield f.replication, t, a, f.values[i, k]
    return write_table(path, ["replication", "t", "alpha", "w"], rows(), meta)


def write_limit_cov(path, table, seed=None, config=None):
    """LimitCovariance as ``s,beta,t,alpha,value,method``."""
    meta = provenance(config or {}, seed, spec=table.spec.as_dict())
    rows = ((r["s"], r["beta"], r["t"], r["alpha"], r["value"], r["method"]) for r in table.rows())
    return write_table(path, ["s", "beta", "t", "alpha", "value", "method"], rows, meta)


def write_report(outdir, report, stem=None):
    """Report JSON plus CSV companions for its estimates, tests and verdicts."""
    outdir = Path(outdir)
    stem = stem or report.experiment.lower()
    json_path = write_json(outdir / f"{stem}.json", report.to_dict())
    meta = provenance(report.config, report.seed, experiment=report.experiment)
    keys = sorted({k for e in report.estimates for k in e} - {"name", "coords", "value", "se"})
    write_table(outdir / f"{stem}_estimates.csv", ["name", "coords", "value", "se", *keys],
                ([e["name"], _dump(e["coords"]), e["value"], e["se"], *[e.get(k) for k in keys]]
                 for e in report.estimates), meta)
    write_table(outdir / f"{stem}_verdicts.csv", ["check", "pass"],
                ([v["check"], v["pass"]] for v in report.verdicts), meta)
    if report.tests:
        write_table(outdir / f"{stem}_tests.csv", ["name", "statistic", "p"],
                    ([t["name"], t["statistic"], t["p"]] for t in report.tests), meta)
    return json_path


__all__ = [
    "OUTPUT_DIR_ENV",
    "default_output_dir",
    "provenance",
    "write_table",
    "write_json",
    "read_meta",
    "read_table",
    "sidecar_path",
    "write_ensemble",
    "write_quantile_fields",
    "write_limit_cov",
    "write_report",
]
