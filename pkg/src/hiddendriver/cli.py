"""Command-line interface.

Exit codes: 0 success, 2 configuration error, 3 numerical failure, 1 any
other error.
"""

import argparse
from dataclasses import replace
import os
import sys

import numpy as np

from . import artifacts
from .asom import load_grid, readout, save_grid
from .config import METHODS, ExperimentConfig, load_config
from .dimension import analyze_dimensions
from .dynamics import SimulationOutput
from .embedding import delay_embed
from .errors import ConfigError, NumericalError, PipelineError, UnsupportedShapeError
from .evaluation import evaluate
from .pipeline import (FIGURE_KINDS, export_figure_data, method_estimate, run_batch, run_demo,
                       simulate_config, split_and_embed, train_asom)
from .rng import derive_seed

EXIT_OK, EXIT_OTHER, EXIT_CONFIG, EXIT_NUMERICAL = 0, 1, 2, 3


def _methods(text):
    names = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in names if m not in METHODS]
    if bad or not names:
        raise argparse.ArgumentTypeError(f"methods must be drawn from {', '.join(METHODS)}")
    return names


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="flat key = value config file")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--out", metavar="DIR", help="output directory (overrides the config)")
    common.add_argument("--method", type=_methods, metavar="NAME[,NAME...]",
                        help=f"methods to run, from {', '.join(METHODS)}")

    p = argparse.ArgumentParser(prog="hiddendriver",
                                description="Hidden common driver reconstruction toolkit.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_text):
        return sub.add_parser(name, parents=[common], help=help_text, description=help_text)

    add("simulate", "simulate the configured system and write series.csv")
    s = add("embed", "delay-embed one column of a series CSV")
    s.add_argument("--input", required=True, help="series CSV (t,z,x,y)")
    s.add_argument("--column", default="y", choices=("x", "y", "z"))
    s.add_argument("--m", type=int, default=3)
    s.add_argument("--tau", type=int, default=1)
    s = add("dimension", "estimate D_X, D_Y, D_J, D_I and classify the relation")
    s.add_argument("--input", help="series CSV; simulated from the config when omitted")
    s = add("train", "train the anisotropic SOM on the training split")
    s.add_argument("--input", help="series CSV; simulated from the config when omitted")
    s = add("infer", "read the driver estimate out of a trained grid")
    s.add_argument("--grid", required=True, help="grid file written by 'train'")
    s.add_argument("--input", help="series CSV; simulated from the config when omitted")
    s = add("evaluate", "correlate an estimate column with the true driver")
    s.add_argument("--input", required=True, help="CSV with estimate and truth columns")
    s.add_argument("--estimate-column", default="zhat")
    s.add_argument("--truth-column", default="z")
    s.add_argument("--max-lag", type=int, default=10,
                   help="lag scan range; a positive lag means the truth trails the estimate")
    s = add("baseline", "compute a baseline estimate (random, pca or cca)")
    s.add_argument("--input", help="series CSV; simulated from the config when omitted")
    s = add("batch", "repeat the experiment over random parameter sets")
    s.add_argument("--family", choices=("logistic", "tent"))
    s.add_argument("--runs", type=int, help="number of runs (default from config)")
    s.add_argument("--workers", type=int, help="worker processes")
    s = add("export", "write tidy figure data from a demo artifact directory")
    s.add_argument("--artifact", required=True, help="directory written by 'demo'")
    s.add_argument("--kind", required=True, choices=FIGURE_KINDS)
    add("demo", "run the full workflow and write every artifact")
    return p


def _config(args):
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    if args.method is not None:
        overrides["methods"] = args.method
    if getattr(args, "family", None):
        overrides["family"] = args.family
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg


def _out(cfg, name):
    os.makedirs(cfg.out_dir, exist_ok=True)
    return os.path.join(cfg.out_dir, name)


def _series(args, cfg):
    if getattr(args, "input", None):
        cols = artifacts.read_series(args.input)
        z = cols.get("z")
        if z is not None and np.isnan(z).all():
            z = None
        return SimulationOutput(z, cols["x"], cols["y"])
    sim, *_ = simulate_config(cfg)
    return sim


def _require_length(cfg, sim):
    if len(sim.x) < cfg.length:
        raise ConfigError(f"series has {len(sim.x)} samples, config needs {cfg.length}")


def cmd_simulate(args, cfg):
    sim, params, init, draws = simulate_config(cfg)
    path = _out(cfg, "series.csv")
    artifacts.write_series(path, sim)
    print(f"wrote {path} ({len(sim.x)} samples, {sim.resample_count} restarts, {draws} draws)")


def cmd_embed(args, cfg):
    cols = artifacts.read_series(args.input)
    E = delay_embed(cols[args.column], args.m, args.tau)
    path = _out(cfg, f"embedded-{args.column}.csv")
    artifacts.write_embedded(path, E)
    print(f"wrote {path} ({len(E)} vectors, m={args.m}, tau={args.tau})")


def cmd_dimension(args, cfg):
    sim = _series(args, cfg)
    n = cfg.dim_chunk
    X = delay_embed(sim.x[:n], cfg.dim_m, cfg.dim_tau)
    Y = delay_embed(sim.y[:n], cfg.dim_m, cfg.dim_tau)
    rep = analyze_dimensions(X, Y, k_min=cfg.k_min, k_max=cfg.k_max,
                             seed=derive_seed(cfg.seed, "permute"), tol=cfg.relation_tol)
    path = _out(cfg, "dimensions.json")
    artifacts.write_json(path, rep.to_dict())
    print(f"D_X={rep.d_x:.3f} D_Y={rep.d_y:.3f} D_J={rep.d_j:.3f} D_I={rep.d_i:.3f} "
          f"D_Z={rep.d_z:.3f} relation={rep.relation.value}")


def cmd_train(args, cfg):
    sim = _series(args, cfg)
    _require_length(cfg, sim)
    split = split_and_embed(cfg, sim)
    grid, trace = train_asom(cfg, split, cfg.seed, cfg.snapshots())
    path = _out(cfg, "grid.txt")
    save_grid(grid, path)
    print(f"wrote {path} ({grid.n1}x{grid.n2} grid, {trace.updates} updates)")


def cmd_infer(args, cfg):
    sim = _series(args, cfg)
    _require_length(cfg, sim)
    split = split_and_embed(cfg, sim)
    grid = load_grid(args.grid)
    ro = readout(grid, split.Y_test, split.X_test, mode=cfg.readout_mode, backend=cfg.backend)
    cols = {"t": split.Y_test.times}
    if sim.z is not None:
        cols["z"] = split.z_test
    cols.update({"zhat": ro.levels, "zhat_norm": ro.standardized})
    path = _out(cfg, "readout.csv")
    artifacts.write_columns(path, cols)
    print(f"wrote {path} ({ro.distinct_levels} distinct levels)")


def cmd_evaluate(args, cfg):
    cols = artifacts.read_numeric(args.input)
    for c in (args.estimate_column, args.truth_column):
        if c not in cols:
            raise ConfigError(f"{args.input} has no column {c!r}")
    ev = evaluate(cols[args.estimate_column], cols[args.truth_column], args.max_lag)
    path = _out(cfg, "evaluation.csv")
    artifacts.write_evaluation(path, [{"run_id": 0, "method": args.estimate_column,
                                       "abs_rho": ev.abs_rho, "best_lag": ev.best_lag,
                                       "best_lag_rho": ev.best_lag_rho, "seed": cfg.seed}])
    flag = "  WARNING: above the 0.975 discretization ceiling" if ev.exceeds_ceiling else ""
    print(f"|rho|={ev.abs_rho:.4f} best_lag={ev.best_lag} rho@lag={ev.best_lag_rho:.4f}{flag}")


def cmd_baseline(args, cfg):
    methods = [m for m in (args.method or ["random"]) if m != "asom"]
    if not methods:
        raise ConfigError("baseline needs --method random, pca or cca")
    sim = _series(args, cfg)
    _require_length(cfg, sim)
    split = split_and_embed(cfg, sim)
    for m in methods:
        if m == "random" and sim.z is None:
            raise ConfigError("the random baseline needs the true driver column z")
        est = method_estimate(m, cfg, split, derive_seed(cfg.seed, "method", m))
        path = _out(cfg, f"baseline-{m}.csv")
        artifacts.write_columns(path, {"t": split.Y_test.times, "estimate": est})
        print(f"wrote {path}")


def cmd_batch(args, cfg):
    n_runs = args.runs if args.runs is not None else cfg.n_runs
    res = run_batch(cfg.family, n_runs, cfg.methods, cfg.seed, cfg=cfg, out_dir=cfg.out_dir,
                    workers=args.workers)
    for m, s in res.summaries.items():
        print(f"{m:7s} n={s.n:3d} median={s.median:.3f} Q1={s.q1:.3f} Q3={s.q3:.3f} MAD={s.mad:.3f}")
    if res.failures:
        print(f"{len(res.failures)} failed evaluations (see summary.json)")


def cmd_export(args, cfg):
    out = os.path.join(args.out, f"figure-{args.kind}.csv") if args.out else None
    if args.out:
        os.makedirs(args.out, exist_ok=True)
    print(f"wrote {export_figure_data(args.artifact, args.kind, out)}")


def cmd_demo(args, cfg):
    res = run_demo(cfg)
    d = res.dimensions
    print(f"dimensions: D_X={d.d_x:.3f} D_Y={d.d_y:.3f} D_J={d.d_j:.3f} D_I={d.d_i:.3f} "
          f"relation={d.relation.value}")
    for m, ev in res.evaluations.items():
        print(f"{m:7s} |rho|={ev.abs_rho:.4f}")
    for w in res.warnings:
        print(f"warning: {w}")
    print(f"artifacts in {res.out_dir}")


COMMANDS = {name[4:]: fn for name, fn in globals().items() if name.startswith("cmd_")}


def _exit_code(exc):
    if isinstance(exc, PipelineError):
        exc = exc.cause
    if isinstance(exc, (ConfigError, UnsupportedShapeError)):
        return EXIT_CONFIG
    if isinstance(exc, (NumericalError, ArithmeticError, np.linalg.LinAlgError)):
        return EXIT_NUMERICAL
    return EXIT_OTHER


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        COMMANDS[args.command](args, cfg)
    except (PipelineError, ConfigError, UnsupportedShapeError, NumericalError, ArithmeticError,
            np.linalg.LinAlgError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _exit_code(exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
