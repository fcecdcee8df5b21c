"""Command line entry point: ``hindep <subcommand> [options]``.

Every run emits a JSON report holding the full effective configuration;
``hindep rerun REPORT`` replays it. Tabular results can also be written as
CSV for plotting.
"""
import argparse
import json
import platform
import sys
import time

import numpy as np

from . import __version__, inference
from ._parallel import resolve_threads
from .core import SampleGrid
from .errors import HindepError, ParameterError
from .io import Report, load_csv_pair, write_csv_matrix, write_csv_table
from .processes import DEPENDENT_EXAMPLES, EXAMPLES, NULL_EXAMPLES, example_pair
from .statistic import StatisticConfig, t_statistic

EXIT_CODES = {"parameter": 2, "dimension": 3, "resource": 4, "numerical": 5, "parse": 6,
              "error": 1}

# run-control options that never change numeric output
_CONTROL = ("threads", "out", "csv", "command", "func", "report")


def _g_value(text):
    if text.lower() == "auto":
        return None
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"G must be a number or 'auto', got {text!r}")
    return v


def parse_lambdas(text):
    """``start:stop:step`` (stop inclusive) or a comma list."""
    if ":" in text:
        parts = [float(p) for p in text.split(":")]
        if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
            raise ParameterError(f"bad lambda range {text!r}; use start:stop:step")
        start, stop, step = parts
        count = int(np.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    return [float(p) for p in text.split(",") if p.strip()]


def _add_statistic_options(p, default_G=20.0):
    g = p.add_argument_group("statistic")
    g.add_argument("--M", type=int, default=10, help="basis truncation (default 10)")
    g.add_argument("--n-dir", type=int, default=256,
                   help="sampled directions per element (default 256)")
    g.add_argument("--grid", dest="grid_K", type=int, default=None, metavar="K",
                   help="use the full K-per-angle direction grid instead of sampling")
    g.add_argument("--direction-seed", type=int, default=0)
    g.add_argument("--G", type=_g_value, default=default_G,
                   help="lattice half-width, or 'auto' (default 20)")
    g.add_argument("--L", type=int, default=10, help="lattice intervals (default 10)")
    g.add_argument("--bandwidth-c", type=float, default=None,
                   help="bandwidth constant c in h = c n^(-1/6); default: cross-validation")
    g.add_argument("--normalization", choices=("paper", "standard"), default="paper")


def _add_run_options(p):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads (default $HINDEP_THREADS or 1)")
    p.add_argument("--out", default=None, help="write the JSON report here (default stdout)")
    p.add_argument("--csv", default=None, help="write the table/curve data as CSV")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hindep", description="Sup-norm independence test for paired functional data.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("test", help="test independence of a CSV pair")
    p.add_argument("--x", required=True, help="CSV of x curves (rows = samples)")
    p.add_argument("--y", required=True, help="CSV of y curves")
    p.add_argument("--B", type=int, default=500, help="resamples (default 500)")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--method", choices=("bootstrap", "permutation", "asymptotic"),
                   default="bootstrap")
    p.add_argument("--null-reps", type=int, default=100_000,
                   help="sup draws for --method asymptotic")
    p.add_argument("--mix-split", action="store_true",
                   help="also estimate size/power by pooling and splitting the curves")
    p.add_argument("--M1", type=int, default=500)
    p.add_argument("--M2", type=int, default=500)
    p.add_argument("--n-calib", type=int, default=500)
    _add_statistic_options(p)
    _add_run_options(p)

    p = sub.add_parser("simulate", help="draw a paired sample from an example model")
    p.add_argument("--example", type=int, required=True, choices=sorted(EXAMPLES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, default=101, help="grid points on [0, 1]")
    p.add_argument("--prefix", default="sample",
                   help="write PREFIX_x.csv and PREFIX_y.csv")
    _add_run_options(p)

    for name, ids in (("level", NULL_EXAMPLES), ("power", DEPENDENT_EXAMPLES)):
        p = sub.add_parser(name, help=f"Monte-Carlo {'size' if name == 'level' else name}")
        p.add_argument("--example", type=int, required=True, choices=ids)
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--alpha", type=float, default=0.05)
        p.add_argument("--reps", type=int, default=1000)
        p.add_argument("--calib-reps", type=int, default=1000,
                       help="independent-Brownian replicates for the critical value")
        p.add_argument("--d", type=int, default=101)
        _add_statistic_options(p)
        _add_run_options(p)

    p = sub.add_parser("asym-power", help="asymptotic power curve over lambda")
    p.add_argument("--example", type=int, nargs="+", default=[1], choices=(1, 2, 3))
    p.add_argument("--lambdas", default="0:10:1")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--n", type=int, default=100, help="sample size of the plug-in fit")
    p.add_argument("--d", type=int, default=101)
    p.add_argument("--reps", type=int, default=100_000)
    _add_statistic_options(p)
    _add_run_options(p)

    p = sub.add_parser("critical-value", help="critical value from the plug-in limit field")
    p.add_argument("--x", default=None, help="reference CSV of x curves (default: simulated)")
    p.add_argument("--y", default=None)
    p.add_argument("--n", type=int, default=100, help="simulated reference size")
    p.add_argument("--d", type=int, default=101)
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--reps", type=int, default=100_000)
    _add_statistic_options(p)
    _add_run_options(p)

    p = sub.add_parser("rerun", help="replay the configuration stored in a report")
    p.add_argument("report")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    return parser


def statistic_config(cfg):
    return StatisticConfig(M=cfg["M"], n_dir=cfg["n_dir"], direction_seed=cfg["direction_seed"],
                           grid_K=cfg["grid_K"], G=cfg["G"], L=cfg["L"],
                           bandwidth_c=cfg["bandwidth_c"], normalization=cfg["normalization"])


def _alpha(a):
    if not 0 < a < 1:
        raise ParameterError(f"alpha must lie in (0, 1), got {a}")
    return a


def _grid(d):
    return SampleGrid(d)


def _cmd_test(cfg, threads):
    ds = load_csv_pair(cfg["x"], cfg["y"])
    scfg = statistic_config(cfg)
    _alpha(cfg["alpha"])
    if cfg["method"] == "asymptotic":
        rep = inference.asymptotic_test(ds, scfg, cfg["alpha"], cfg["null_reps"], cfg["seed"],
                                        threads)
    else:
        rep = inference.bootstrap_pvalue(ds, cfg["B"], scfg, cfg["seed"], alpha=cfg["alpha"],
                                         method=cfg["method"], threads=threads)
    out = {"n": ds.n, "d": ds.grid.num_points, **rep.to_dict()}
    out.pop("config")
    out["effective_statistic"] = rep.config
    if cfg["mix_split"]:
        ms = inference.mix_split_size_power(ds, cfg["alpha"], cfg["M1"], cfg["M2"], cfg["seed"],
                                            scfg, n_calib=cfg["n_calib"], threads=threads)
        out["mix_split"] = {"size": ms.size, "power": ms.power,
                            "critical_value": ms.critical_value, "dropped": ms.dropped}
    return out, None


def _cmd_simulate(cfg, threads):
    ds = example_pair(cfg["example"], cfg["n"], _grid(cfg["d"]), cfg["seed"])
    header = [f"t{i}" for i in range(ds.grid.num_points)]
    paths = {"x": f"{cfg['prefix']}_x.csv", "y": f"{cfg['prefix']}_y.csv"}
    write_csv_matrix(paths["x"], ds.x, header)
    write_csv_matrix(paths["y"], ds.y, header)
    out = {"files": paths, "n": ds.n, "d": ds.grid.num_points,
           "x_checksum": float(ds.x.sum()), "y_checksum": float(ds.y.sum())}
    return out, None


def _cmd_mc(cfg, threads):
    res = inference.mc_experiment(cfg["example"], cfg["n"], _alpha(cfg["alpha"]), cfg["reps"],
                                  statistic_config(cfg), cfg["seed"], grid=_grid(cfg["d"]),
                                  calib_reps=cfg["calib_reps"], threads=threads)
    key = "size" if cfg["command"] == "level" else "power"
    out = {key: res.rate, "critical_value": res.critical_value,
           "bandwidth_c": res.bandwidth_c, "rejections": int(round(res.rate * cfg["reps"]))}
    table = {"replicate": list(range(cfg["reps"])),
             "statistic": res.test_statistics,
             "rejected": [int(v) for v in res.test_statistics > res.critical_value]}
    return out, table


def _cmd_asym_power(cfg, threads):
    lams = parse_lambdas(cfg["lambdas"])
    _alpha(cfg["alpha"])
    curves = {}
    table = {"lambda": lams}
    for ex in cfg["example"]:
        c = inference.asymptotic_power_curve(ex, lams, cfg["alpha"], cfg["n"], _grid(cfg["d"]),
                                             statistic_config(cfg), cfg["reps"], cfg["seed"],
                                             threads)
        curves[str(ex)] = {"power": c.power, "critical_value": c.critical_value,
                           "bandwidth_c": c.bandwidth_c}
        table[f"example_{ex}"] = c.power
    return {"lambdas": lams, "curves": curves}, table


def _cmd_critical_value(cfg, threads):
    scfg = statistic_config(cfg)
    if cfg["x"] or cfg["y"]:
        if not (cfg["x"] and cfg["y"]):
            raise ParameterError("give both --x and --y, or neither")
        ref = load_csv_pair(cfg["x"], cfg["y"])
    else:
        ref = example_pair(4, cfg["n"], _grid(cfg["d"]), cfg["seed"])
    scfg = inference.resolve_bandwidth(scfg, ref)
    nm = inference.fit_null_model(ref, scfg)
    snd = inference.sample_sup_distribution(nm, cfg["reps"], cfg["seed"], threads)
    c_alpha = inference.critical_value(snd, _alpha(cfg["alpha"]))
    r = t_statistic(ref, scfg)
    out = {"critical_value": c_alpha, "bandwidth_c": scfg.bandwidth_c, "h": nm.h,
           "c_limit": nm.c_limit, "reference_normalized": r.normalized,
           "max_variance": float(np.max(nm.var)), "mean_abs_max": float(np.max(np.abs(nm.mean)))}
    table = {"quantile": [0.5, 0.9, 0.95, 0.99],
             "value": [float(np.quantile(snd.samples, q)) for q in (0.5, 0.9, 0.95, 0.99)]}
    return out, table


HANDLERS = {"test": _cmd_test, "simulate": _cmd_simulate, "level": _cmd_mc, "power": _cmd_mc,
            "asym-power": _cmd_asym_power, "critical-value": _cmd_critical_value}


def run(subcommand, cfg, threads=None):
    """Execute one subcommand from a plain config dict; returns ``(Report, table)``."""
    if subcommand not in HANDLERS:
        raise ParameterError(f"unknown subcommand {subcommand!r}")
    cfg = dict(cfg, command=subcommand)
    threads = resolve_threads(threads)
    start = time.perf_counter()
    outputs, table = HANDLERS[subcommand](cfg, threads)
    elapsed = time.perf_counter() - start
    report = Report(command=subcommand, config=cfg, outputs=outputs, seed=cfg.get("seed"),
                    timing={"seconds": elapsed, "threads": threads},
                    versions={"hindep": __version__, "numpy": np.__version__,
                              "python": platform.python_version()})
    return report, table


def _emit(report, table, out, csv_path):
    if csv_path and table is not None:
        write_csv_table(csv_path, table)
    if out:
        report.save(out)
    else:
        sys.stdout.write(report.to_json() + "\n")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "rerun":
            old = Report.load(args.report)
            cfg = {k: v for k, v in old.config.items() if k != "command"}
            report, table = run(old.command, cfg, args.threads)
        else:
            cfg = {k: v for k, v in vars(args).items() if k not in _CONTROL}
            report, table = run(args.command, cfg, args.threads)
        _emit(report, table, args.out, args.csv)
    except HindepError as exc:
        sys.stderr.write(json.dumps({"error": exc.code, "message": str(exc)}) + "\n")
        return EXIT_CODES.get(exc.code, 1)
    except OSError as exc:
        sys.stderr.write(json.dumps({"error": "io", "message": str(exc)}) + "\n")
        return 7
    return 0


if __name__ == "__main__":
    sys.exit(main())
