"""Command-line front end.

    selfsim-quantile simulate --family fbm --r 1.0 --T 2 --paths 100 --seed 7
    selfsim-quantile quantile-field --family stable --r 1.2 --n 400 --reps 10
    selfsim-quantile limit-cov --family bm --times 0,1,2 --levels 0.5
    selfsim-quantile verify clt-cov --family bm --n 400 --reps 1000 --seed 7

Settings resolve as: built-in defaults < per-command defaults < INI file
(``--config``) < flags.  ``--explain`` prints the resolved settings and
exits.  Exit codes: 0 pass, 1 verification failure, 2 usage or validation
error, 3 numerical failure.
"""

import argparse
import configparser
import copy
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__, harness
from . import io as sio
from .empirical import QuantileField
from .exceptions import MonteCarloOnlyError, NumericalError
from .limit import LimitCovariance
from .models import Family, ProcessSpec
from .simulate import GridSpec, Method, simulate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3

VERIFY_EXPERIMENTS = ("clt-cov", "normality", "scalability", "lemma1", "near-zero", "tail", "properties")

# section -> key -> (type, default); "floats" is a comma-separated list
SCHEMA = {
    "process": {"family": (str, "bm"), "r": (float, 1.0), "c": (float, 1.0), "m": (int, 1)},
    "grid": {"T": (float, 2.0), "n_times": (int, 33), "interval": ("floats", [0.25, 0.75]),
             "n_levels": (int, 17)},
    "experiment": {
        "name": (str, ""),
        "n": (int, 400), "reps": (int, 1000), "paths": (int, 100), "method": (str, ""),
        "times": ("floats", [0.0, 1.0, 2.0]), "levels": ("floats", [0.5]),
        "points": ("floats", []),
        "t": (float, 1.0), "alpha": (float, 0.5),
        "t0": (float, 0.5), "alpha0": (float, 0.5), "c_factors": ("floats", [4.0]),
        "delta": (float, 0.25), "q": (float, 1.0),
        "deltas": ("floats", [0.2, 0.1, 0.05, 0.01]), "epsilons": ("floats", [0.25, 0.5, 1.0]),
        "u_min": (float, 0.1), "u_max": (float, 1e4), "u_points": (int, 81), "tail_times": (int, 101),
        "rel_tol": (float, 0.10), "z_crit": (float, 3.0), "coverage": (float, 0.95), "level": (float, 0.01),
    },
    "run": {"seed": (int, 0), "out": (str, ""), "workers": (int, 1)},
}

COMMAND_DEFAULTS = {
    "simulate": {},
    "quantile-field": {"reps": 10},
    "limit-cov": {},
    "clt-cov": {"n": 400, "reps": 1000},
    "normality": {"n": 1000, "reps": 2000},
    "scalability": {"n": 400, "reps": 1000},
    "lemma1": {"n": 400, "reps": 500},
    "near-zero": {"n": 400, "reps": 500},
    "tail": {"paths": 20000},
    "properties": {},
}

# flag dest -> (section, key)
FLAG_KEYS = {key: (section, key) for section, keys in SCHEMA.items() for key in keys}
FLAG_KEYS.pop("name")


class UsageError(ValueError):
    pass


def _coerce(kind, value):
    if kind == "floats":
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        return [float(v) for v in str(value).replace(" ", "").split(",") if v]
    if kind is int and isinstance(value, str):
        return int(float(value)) if float(value).is_integer() else int(value)
    return kind(value)


@dataclass
class RunConfig:
    """Fully resolved settings: process, grid, experiment and run blocks."""

    command: str
    process: dict
    grid: dict
    experiment: dict
    run: dict

    def as_dict(self):
        return {"command": self.command, "process": self.process, "grid": self.grid,
                "experiment": self.experiment, "run": self.run, "version": __version__}

    @property
    def spec(self):
        p = self.process
        return ProcessSpec(p["family"], r=p["r"], c=p["c"], m=p["m"])

    @property
    def grid_spec(self):
        g = self.grid
        if len(g["interval"]) != 2:
            raise UsageError("--interval takes two levels a,b")
        if g["n_times"] < 2 or g["n_levels"] < 1 or not g["T"] > 0:
            raise UsageError("grid needs T > 0, at least 2 time points and at least 1 level")
        return GridSpec.uniform(g["T"], g["n_times"], tuple(g["interval"]), g["n_levels"])

    @property
    def out(self):
        return Path(self.run["out"]) if self.run["out"] else sio.default_output_dir()

    @property
    def seed(self):
        return self.run["seed"]


def resolve_config(command, flags=None, config_path=None):
    """Merge defaults, per-command defaults, an INI file and flag values."""
    blocks = {s: {k: copy.deepcopy(d) for k, (_, d) in keys.items()} for s, keys in SCHEMA.items()}
    for key, value in COMMAND_DEFAULTS.get(command, {}).items():
        blocks["experiment"][key] = value
    blocks["experiment"]["name"] = command
    if config_path:
        parser = configparser.ConfigParser()
        parser.optionxform = str
        if not parser.read(config_path):
            raise UsageError(f"cannot read config file {config_path}")
        for section in parser.sections():
            if section not in SCHEMA:
                raise UsageError(f"unknown config section [{section}]; expected one of {sorted(SCHEMA)}")
            for key, raw in parser[section].items():
                if key not in SCHEMA[section]:
                    raise UsageError(f"unknown key '{key}' in [{section}]")
                try:
                    blocks[section][key] = _coerce(SCHEMA[section][key][0], raw)
                except ValueError as exc:
                    raise UsageError(f"bad value for [{section}] {key}: {raw!r} ({exc})") from None
    for dest, value in (flags or {}).items():
        if value is None or dest not in FLAG_KEYS:
            continue
        section, key = FLAG_KEYS[dest]
        blocks[section][key] = _coerce(SCHEMA[section][key][0], value)
    blocks["process"]["family"] = blocks["process"]["family"].lower().replace("-", "_")
    return RunConfig(command, blocks["process"], blocks["grid"], blocks["experiment"], blocks["run"])


def validate(cfg):
    """Check every precondition of the requested command before any simulation."""
    try:
        Family(cfg.process["family"])
    except ValueError:
        raise UsageError(f"unknown family '{cfg.process['family']}'; choose from "
                         f"{', '.join(f.value for f in Family)}") from None
    spec = cfg.spec
    grid = cfg.grid_spec
    e = cfg.experiment
    if cfg.run["workers"] < 1:
        raise UsageError("--workers must be at least 1")
    name = cfg.command
    if name in ("simulate", "tail") and e["paths"] < 1:
        raise UsageError("--paths must be positive")
    if name in ("quantile-field", "clt-cov", "normality", "scalability", "lemma1", "near-zero"):
        if e["n"] < 1 or e["reps"] < 1:
            raise UsageError("--n and --reps must be positive")
    if name == "simulate" and e["method"]:
        try:
            Method(e["method"])
        except ValueError:
            raise UsageError(f"unknown method '{e['method']}'") from None
    if name == "clt-cov":
        if e["n"] < 100 or e["reps"] < 200:
            raise UsageError("clt-cov needs --n >= 100 and --reps >= 200 for standard errors")
        if len(e["points"]) % 2:
            raise UsageError("--points takes t,alpha pairs")
        for t, a in _pairs(e["points"]):
            grid.index_of_time(t)
            grid.index_of_level(a)
    if name == "normality" and not (e["t"] >= 0 and 0 < e["alpha"] < 1):
        raise UsageError("normality needs t >= 0 and alpha in (0, 1)")
    if name == "scalability" and (e["t0"] <= 0 or any(c <= 0 for c in e["c_factors"])):
        raise UsageError("scalability needs t0 > 0 and positive --c-factors")
    if name == "lemma1" and not (0 < e["delta"] <= 1 and 0 < e["q"] <= 1):
        raise UsageError("lemma1 needs delta in (0, 1] and q in (0, 1]")
    if name == "near-zero" and (not e["deltas"] or any(d <= 0 for d in e["deltas"])):
        raise UsageError("near-zero needs positive --deltas")
    if name == "tail":
        if not e["u_max"] >= 10 * e["u_min"] > 0:
            raise UsageError("tail needs 0 < u_min and u_max >= 10 u_min (at least one decade)")
    if name == "limit-cov":
        if any(t < 0 for t in e["times"]) or any(not 0 < a < 1 for a in e["levels"]):
            raise UsageError("limit-cov needs times >= 0 and levels in (0, 1)")
    return spec, grid


def _pairs(flat):
    return [(flat[i], flat[i + 1]) for i in range(0, len(flat), 2)]


# ---------------------------------------------------------------------------
# commands


def cmd_simulate(cfg):
    spec, grid = validate(cfg)
    e = cfg.experiment
    method = Method(e["method"]) if e["method"] else None
    ens = simulate(spec, grid, e["paths"], cfg.seed, method=method)
    path = sio.write_ensemble(cfg.out / "paths.csv", ens, cfg.as_dict())
    print(f"wrote {path} ({ens.n} paths x {len(grid.times)} times)")
    return EXIT_OK


def cmd_quantile_field(cfg):
    spec, grid = validate(cfg)
    e = cfg.experiment
    values = harness.replicate_fields(spec, grid, e["n"], e["reps"], cfg.seed, cfg.run["workers"])
    fields = [QuantileField(grid, e["n"], v, rep) for rep, v in enumerate(values)]
    path = sio.write_quantile_fields(cfg.out / "quantile_field.csv", fields, spec, cfg.seed, cfg.as_dict())
    print(f"wrote {path} ({len(fields)} replications)")
    return EXIT_OK


def cmd_limit_cov(cfg):
    spec, _ = validate(cfg)
    e = cfg.experiment
    points = [(t, a) for t in e["times"] for a in e["levels"]]
    table = LimitCovariance.on_points(spec, points)
    path = sio.write_limit_cov(cfg.out / "limit_cov.csv", table, cfg.seed, cfg.as_dict())
    print(f"wrote {path} ({len(table.pairs)} pairs)")
    return EXIT_OK


def run_experiment(cfg):
    spec, grid = validate(cfg)
    e, seed, workers = cfg.experiment, cfg.seed, cfg.run["workers"]
    name = cfg.command
    if name == "clt-cov":
        points = _pairs(e["points"]) or None
        return harness.mc_quantile_clt(spec, grid, e["n"], e["reps"], seed, points=points, workers=workers,
                                       rel_tol=e["rel_tol"], z_crit=e["z_crit"], coverage=e["coverage"])
    if name == "normality":
        return harness.mc_normality(spec, (e["t"], e["alpha"]), e["n"], e["reps"], seed, workers, e["level"])
    if name == "scalability":
        return harness.scalability_check(spec, e["t0"], e["alpha0"], e["c_factors"], e["n"], e["reps"], seed,
                                         workers, e["level"])
    if name == "lemma1":
        return harness.lemma1_bound_check(spec, e["delta"], e["q"], e["n"], e["reps"], seed, alphas=grid.alphas,
                                          workers=workers, z_crit=e["z_crit"])
    if name == "near-zero":
        return harness.near_zero_check(spec, e["deltas"], e["epsilons"], e["n"], e["reps"], seed,
                                       alphas=grid.alphas, workers=workers)
    if name == "tail":
        u = np.logspace(np.log10(e["u_min"]), np.log10(e["u_max"]), e["u_points"])
        return harness.tail_report(spec, u, e["paths"], seed, e["tail_times"], e["z_crit"])
    if name == "properties":
        return harness.property_suite(seed)
    raise UsageError(f"unknown experiment '{name}'")


def cmd_verify(cfg):
    report = run_experiment(cfg)
    report.config = {"resolved": cfg.as_dict(), **report.config}
    path = sio.write_report(cfg.out, report, stem=cfg.command.replace("-", "_"))
    for v in report.verdicts:
        print(f"{'PASS' if v['pass'] else 'FAIL'}  {v['check']}")
    print(f"wrote {path}")
    return EXIT_OK if report.passed else EXIT_FAIL


COMMANDS = {"simulate": cmd_simulate, "quantile-field": cmd_quantile_field, "limit-cov": cmd_limit_cov}


# ---------------------------------------------------------------------------
# argument parsing


def _add_common(p):
    g = p.add_argument_group("process")
    g.add_argument("--family", choices=[f.value for f in Family] + [f.value.replace("_", "-") for f in Family
                                                                     if "_" in f.value])
    g.add_argument("--r", type=float, help="fBm or stable index in (0, 2)")
    g.add_argument("--c", type=float, help="stable scale constant")
    g.add_argument("--m", type=int, help="integration order for integrated_bm")
    g = p.add_argument_group("grid")
    g.add_argument("--T", type=float, help="time horizon")
    g.add_argument("--n-times", dest="n_times", type=int, help="time points on [0, T] including 0")
    g.add_argument("--interval", help="level interval a,b")
    g.add_argument("--n-levels", dest="n_levels", type=int, help="levels on the interval")
    g = p.add_argument_group("run")
    g.add_argument("--seed", type=int)
    g.add_argument("--out", help=f"output directory (default ${sio.OUTPUT_DIR_ENV} or .)")
    g.add_argument("--workers", type=int, help="worker processes for replications")
    g.add_argument("--config", help="INI file with [process], [grid], [experiment], [run] sections")
    g.add_argument("--explain", action="store_true", help="print the resolved settings and exit")
    g = p.add_argument_group("experiment")
    g.add_argument("--n", type=int, help="paths per ensemble")
    g.add_argument("--reps", type=int, help="independent replications")
    g.add_argument("--paths", type=int, help="paths to simulate")
    return g


def build_parser():
    parser = argparse.ArgumentParser(prog="selfsim-quantile", description=__doc__.split("\n\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="write a path ensemble as CSV")
    g = _add_common(p)
    g.add_argument("--method", choices=[m.value for m in Method])

    p = sub.add_parser("quantile-field", help="write replicated quantile fluctuation fields")
    _add_common(p)

    p = sub.add_parser("limit-cov", help="tabulate limit covariances")
    g = _add_common(p)
    g.add_argument("--times", help="comma-separated times")
    g.add_argument("--levels", help="comma-separated levels")

    verify = sub.add_parser("verify", help="run a Monte Carlo or property check")
    vsub = verify.add_subparsers(dest="experiment", required=True)
    for name in VERIFY_EXPERIMENTS:
        p = vsub.add_parser(name)
        g = _add_common(p)
        g.add_argument("--rel-tol", dest="rel_tol", type=float)
        g.add_argument("--z-crit", dest="z_crit", type=float)
        g.add_argument("--level", type=float, help="test level for KS verdicts")
        if name == "clt-cov":
            g.add_argument("--points", help="t,alpha pairs flattened: t1,a1,t2,a2,...")
            g.add_argument("--coverage", type=float)
        elif name == "normality":
            g.add_argument("--t", type=float)
            g.add_argument("--alpha", type=float)
        elif name == "scalability":
            g.add_argument("--t0", type=float)
            g.add_argument("--alpha0", type=float)
            g.add_argument("--c-factors", dest="c_factors")
        elif name == "lemma1":
            g.add_argument("--delta", type=float)
            g.add_argument("--q", type=float)
        elif name == "near-zero":
            g.add_argument("--deltas")
            g.add_argument("--epsilons")
        elif name == "tail":
            g.add_argument("--u-min", dest="u_min", type=float)
            g.add_argument("--u-max", dest="u_max", type=float)
            g.add_argument("--u-points", dest="u_points", type=int)
            g.add_argument("--tail-times", dest="tail_times", type=int)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    command = args.experiment if args.command == "verify" else args.command
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "experiment", "config", "explain")}
    try:
        cfg = resolve_config(command, flags, args.config)
        validate(cfg)
        if args.explain:
            print(json.dumps(cfg.as_dict(), indent=2, sort_keys=True))
            return EXIT_OK
        if args.command == "verify":
            return cmd_verify(cfg)
        return COMMANDS[command](cfg)
    except MonteCarloOnlyError as exc:
        print(f"error: Monte-Carlo-only: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
