"""End-to-end workflows: single demo run, batch comparison, figure-data export.

Workflow steps of :func:`run_demo` (the number is reported in
``PipelineError.step``):

0. simulate the triad
1. delay-embed ``x`` and ``y``
2. build the joint observation (and its time-permuted twin)
3. estimate D_X, D_Y, D_J, D_I
4. mutual dimension D_Z
5. derive the SOM shape and initialize the grid
6. anisotropic training on the training split
7. readout on the test split
8. evaluation and baselines

All randomness is derived from ``config.seed`` with
:func:`hiddendriver.rng.derive_seed`, one label per stage.
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
import os
import time

import numpy as np

from . import artifacts
from .asom import init_grid, load_grid, readout, save_grid, train
from .baselines import cca_first_pair, pca_first_component, phase_shuffle
from .config import ExperimentConfig, _parse_shape
from .dimension import SomShape, analyze_dimensions, som_shape_from_dims
from .dynamics import sample_experiment_params, simulate
from .embedding import delay_embed, standardize
from .errors import DivergenceError, HiddenDriverError, PipelineError, UnsupportedShapeError
from .evaluation import batch_summary, evaluate
from .neighbors import cross_map_neighborhood
from .rng import derive_seed, generator

MAX_PARAM_DRAWS = 1000
FIGURE_KINDS = ("manifold", "dimension-curves", "grid", "readout")


@dataclass
class Split:
    """Embedded train/test views and the driver aligned with their rows.

    ``z_train``/``z_test`` are ``None`` when the true driver is unknown.
    """

    X_train: object
    Y_train: object
    X_test: object
    Y_test: object
    z_test: np.ndarray
    z_train: np.ndarray


def simulate_config(cfg, seed=None):
    """Simulate the system described by ``cfg``.

    Returns ``(SimulationOutput, params, init, param_draws)``. With
    ``sample_params`` the parameters (and initial state) are drawn from the
    batch protocol ranges; a draw whose trajectory diverges on every restart
    is replaced by a fresh draw, and ``param_draws`` counts the draws used.
    """
    seed = cfg.seed if seed is None else seed
    kw = dict(burn_in=cfg.burn_in, coupling=cfg.coupling, tent_argument=cfg.tent_argument,
              max_restarts=cfg.max_restarts, backend=cfg.backend)
    if not cfg.sample_params:
        params = cfg.params()
        init = tuple(cfg.init) if cfg.init is not None else \
            tuple(float(v) for v in generator(derive_seed(seed, "init")).random(3))
        sim = simulate(cfg.family, params, init, cfg.length, derive_seed(seed, "simulate"), **kw)
        return sim, params, init, 1
    for draw in range(MAX_PARAM_DRAWS):
        params, init = sample_experiment_params(cfg.family, derive_seed(seed, "params", draw))
        if cfg.family == "logistic" and cfg.noise_sd > 0:
            params = replace(params, noise_sd=cfg.noise_sd)
        try:
            sim = simulate(cfg.family, params, init, cfg.length, derive_seed(seed, "simulate", draw), **kw)
        except DivergenceError:
            continue
        return sim, params, init, draw + 1
    raise DivergenceError(f"no stable parameter set in {MAX_PARAM_DRAWS} draws")


def split_and_embed(cfg, sim):
    """Contiguous train block followed by the test block, each embedded separately.

    Row ``r`` of an embedding holds samples ``t0+r .. t0+r+(m-1)*tau``; the
    driver value paired with it is ``z[t0+r]``.
    """
    n_tr = cfg.train_length
    m, tau = cfg.som_m, cfg.som_tau
    X_tr = delay_embed(sim.x[:n_tr], m, tau, t0=0)
    Y_tr = delay_embed(sim.y[:n_tr], m, tau, t0=0)
    X_te = delay_embed(sim.x[n_tr:], m, tau, t0=n_tr)
    Y_te = delay_embed(sim.y[n_tr:], m, tau, t0=n_tr)
    if sim.z is None:
        return Split(X_tr, Y_tr, X_te, Y_te, None, None)
    return Split(X_tr, Y_tr, X_te, Y_te, sim.z[X_te.times], sim.z[X_tr.times])


def _resolve_shape(cfg, report=None):
    if cfg.som_shape == "auto":
        if report is None:
            return SomShape(1, 1, cfg.n1, cfg.n2)
        return som_shape_from_dims(report.d_y, report.d_z, cfg.n1, cfg.n2)
    self_dims, driver_dims = _parse_shape(cfg.som_shape)
    if (self_dims, driver_dims) != (1, 1):
        raise UnsupportedShapeError(
            f"SOM shape {cfg.som_shape} is unsupported; only 1+1 grids are implemented")
    return SomShape(1, 1, cfg.n1, cfg.n2)


def train_asom(cfg, split, seed, snapshot_steps=()):
    """Initialize and train a grid on the training split."""
    bounds = split.Y_train if cfg.grid_init == "data" else None
    grid = init_grid(cfg.n1, cfg.n2, cfg.som_m, derive_seed(seed, "grid"), bounds=bounds)
    return train(grid, split.X_train, split.Y_train, cfg.schedule(), derive_seed(seed, "train"),
                 snapshot_steps=snapshot_steps, backend=cfg.backend)


def method_estimate(method, cfg, split, seed, grid=None):
    """Driver estimate on the test rows for one method.

    Linear baselines are fitted on the training split and applied to the test
    split; the random baseline phase-randomizes the true test driver.
    """
    if method == "asom":
        if grid is None:
            grid, _ = train_asom(cfg, split, seed)
        return readout(grid, split.Y_test, split.X_test, mode=cfg.readout_mode,
                       backend=cfg.backend).levels
    if method == "random":
        return phase_shuffle(split.z_test, derive_seed(seed, "random"))
    if method == "pca":
        feats_tr = np.hstack([split.X_train.data, split.Y_train.data])
        feats_te = np.hstack([split.X_test.data, split.Y_test.data])
        _, proj = pca_first_component(feats_tr)
        return proj.transform(feats_te)[0]
    if method == "cca":
        res = cca_first_pair(split.X_train.data, split.Y_train.data)
        return res.estimate_for(split.X_test.data, split.Y_test.data)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class DemoResult:
    out_dir: str
    dimensions: object
    grid: object
    readout: object
    evaluations: dict
    warnings: list = field(default_factory=list)


def _step(n, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except PipelineError:
        raise
    except (HiddenDriverError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        raise PipelineError(n, exc) from exc


def run_demo(cfg, out_dir=None):
    """Run the full single-system workflow and write its artifacts.

    Files: ``config.txt``, ``series.csv``, ``dimensions.json``, ``grid.txt``,
    ``snapshots.csv``, ``readout.csv``, ``evaluation.csv``, ``manifest.json``.
    Reruns with the same configuration produce identical bytes.
    """
    out_dir = out_dir or cfg.out_dir
    os.makedirs(out_dir, exist_ok=True)
    seed = cfg.seed
    with open(os.path.join(out_dir, "config.txt"), "w", encoding="utf-8") as fh:
        fh.write(cfg.to_text())

    sim, params, init, draws = _step(0, simulate_config, cfg)
    artifacts.write_series(os.path.join(out_dir, "series.csv"), sim)

    chunk = cfg.dim_chunk
    X_dim = _step(1, delay_embed, sim.x[:chunk], cfg.dim_m, cfg.dim_tau)
    Y_dim = _step(1, delay_embed, sim.y[:chunk], cfg.dim_m, cfg.dim_tau)
    split = _step(1, split_and_embed, cfg, sim)
    # steps 2-4 run inside analyze_dimensions: joint/permuted embeddings,
    # four dimension curves and the mutual dimension
    report = _step(3, analyze_dimensions, X_dim, Y_dim, k_min=cfg.k_min, k_max=cfg.k_max,
                   seed=derive_seed(seed, "permute"), tol=cfg.relation_tol)
    if cfg.check_relation and report.relation.value != "hidden-common-driver":
        raise PipelineError(3, ValueError(f"relation is {report.relation.value}"))
    shape = _step(5, _resolve_shape, cfg, report)
    dims = report.to_dict()
    dims["som_shape"] = {"self": shape.self_dims, "driver": shape.driver_dims,
                         "n1": shape.n1, "n2": shape.n2}
    dims["master_seed"] = seed
    artifacts.write_json(os.path.join(out_dir, "dimensions.json"), dims)

    grid, trace = _step(6, train_asom, cfg, split, seed, cfg.snapshots())
    save_grid(grid, os.path.join(out_dir, "grid.txt"))
    snap_rows = []
    for step, centers in zip(trace.snapshot_steps, trace.snapshots):
        for i in range(centers.shape[0]):
            for j in range(centers.shape[1]):
                snap_rows.append((step, i, j, *centers[i, j]))
    artifacts.write_table(os.path.join(out_dir, "snapshots.csv"),
                          ["step", "i", "j"] + [f"c{c}" for c in range(grid.m)], snap_rows)

    ro = _step(7, readout, grid, split.Y_test, split.X_test, mode=cfg.readout_mode,
               backend=cfg.backend)
    z_norm = _step(7, standardize, split.z_test)
    artifacts.write_columns(os.path.join(out_dir, "readout.csv"), {
        "t": split.Y_test.times, "z": split.z_test, "zhat": ro.levels,
        "z_norm": z_norm, "zhat_norm": ro.standardized})

    evals, rows = {}, []
    for method in cfg.methods:
        est = ro.levels if method == "asom" else \
            _step(8, method_estimate, method, cfg, split, derive_seed(seed, "method", method))
        ev = _step(8, evaluate, est, split.z_test, cfg.max_lag)
        evals[method] = ev
        rows.append({"run_id": 0, "method": method, "abs_rho": ev.abs_rho, "best_lag": ev.best_lag,
                     "best_lag_rho": ev.best_lag_rho, "seed": seed})
    artifacts.write_evaluation(os.path.join(out_dir, "evaluation.csv"), rows)

    notes = list(ro.warnings)
    notes += [f"{m}: |rho| above the discretization ceiling" for m, e in evals.items() if e.exceeds_ceiling]
    artifacts.write_json(os.path.join(out_dir, "manifest.json"), {
        "master_seed": seed, "family": cfg.family, "params": vars(params), "init": list(init),
        "param_draws": draws, "resample_count": sim.resample_count,
        "distinct_levels": ro.distinct_levels, "warnings": notes,
        "files": ["config.txt", "series.csv", "dimensions.json", "grid.txt", "snapshots.csv",
                  "readout.csv", "evaluation.csv"]})
    return DemoResult(out_dir, report, grid, ro, evals, notes)


def _batch_run(args):
    cfg, run_id, methods = args
    run_seed = derive_seed(cfg.seed, "run", run_id)
    rows, t0 = [], time.perf_counter()
    try:
        sim, params, init, draws = simulate_config(cfg, run_seed)
        split = split_and_embed(cfg, sim)
    except HiddenDriverError as exc:
        return {"run_id": run_id, "rows": [], "error": f"simulate: {exc}", "draws": 0, "seconds": 0.0}
    for method in methods:
        try:
            est = method_estimate(method, cfg, split, derive_seed(run_seed, "method", method))
            ev = evaluate(est, split.z_test, cfg.max_lag)
        except (HiddenDriverError, ArithmeticError, np.linalg.LinAlgError) as exc:
            rows.append({"run_id": run_id, "method": method, "error": str(exc)})
            continue
        rows.append({"run_id": run_id, "method": method, "abs_rho": ev.abs_rho,
                     "best_lag": ev.best_lag, "best_lag_rho": ev.best_lag_rho, "seed": run_seed,
                     "exceeds_ceiling": ev.exceeds_ceiling})
    return {"run_id": run_id, "rows": rows, "error": None, "draws": draws,
            "params": vars(params), "seconds": time.perf_counter() - t0}


@dataclass
class BatchResult:
    rows: list
    summaries: dict
    failures: list
    param_draws: list
    seconds: list


def run_batch(family="logistic", n_runs=50, methods=("asom", "random", "pca", "cca"), seed=0,
              cfg=None, out_dir=None, workers=None):
    """Repeat the experiment on ``n_runs`` random parameter sets.

    Each run samples parameters (redrawing diverging sets), simulates, and
    evaluates every method against the true driver on the test split.
    Failed method evaluations are listed in ``failures`` and excluded from
    the summaries. With ``out_dir``, writes ``batch.csv`` and
    ``summary.json``.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    base = cfg or ExperimentConfig(family=family)
    cfg = replace(base, family=family, sample_params=True, seed=seed,
                  noise_sd=base.noise_sd if cfg is not None else 0.0, n_runs=n_runs,
                  methods=list(methods))
    workers = workers or cfg.workers
    jobs = [(cfg, r, list(methods)) for r in range(n_runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_batch_run, jobs))
    else:
        results = [_batch_run(j) for j in jobs]

    rows, failures = [], []
    for res in results:
        if res["error"]:
            failures.append({"run_id": res["run_id"], "method": "*", "error": res["error"]})
        for row in res["rows"]:
            (failures if "error" in row else rows).append(row)
    summaries = {}
    for method in methods:
        vals = [r["abs_rho"] for r in rows if r["method"] == method]
        if vals:
            summaries[method] = batch_summary(vals)
    result = BatchResult(rows, summaries, failures, [r["draws"] for r in results],
                         [r["seconds"] for r in results])
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        artifacts.write_evaluation(os.path.join(out_dir, "batch.csv"), rows)
        artifacts.write_json(os.path.join(out_dir, "summary.json"), {
            "family": family, "n_runs": n_runs, "master_seed": seed,
            "methods": {m: s.to_dict() for m, s in summaries.items()},
            "completed_runs": {m: summaries[m].n if m in summaries else 0 for m in methods},
            "failures": failures, "param_draws": result.param_draws})
    return result


def export_figure_data(artifact_dir, kind, out_path=None, max_points=2000):
    """Write tidy CSV data for external plotting from a demo artifact directory.

    ``kind`` is one of ``manifold`` (embedded X and Y with one cross-mapped
    neighborhood highlighted), ``dimension-curves``, ``grid`` or ``readout``.
    Returns the output path.
    """
    if kind not in FIGURE_KINDS:
        raise ValueError(f"unknown figure kind {kind!r}; choose from {FIGURE_KINDS}")
    if not os.path.isdir(artifact_dir):
        raise FileNotFoundError(f"artifact directory {artifact_dir} does not exist")
    out_path = out_path or os.path.join(artifact_dir, f"figure-{kind}.csv")
    path = lambda name: os.path.join(artifact_dir, name)  # noqa: E731

    if kind == "dimension-curves":
        curves = artifacts.read_json(path("dimensions.json"))["per_k_curves"]
        rows = [(name, int(k), v) for name, curve in curves.items()
                for k, v in sorted(curve.items(), key=lambda kv: int(kv[0]))]
        artifacts.write_table(out_path, ["manifold", "k", "dimension"], rows)
    elif kind == "grid":
        grid = load_grid(path("grid.txt"))
        rows = [(i, j, *grid.centers[i, j]) for i in range(grid.n1) for j in range(grid.n2)]
        artifacts.write_table(out_path, ["i", "j"] + [f"c{c}" for c in range(grid.m)], rows)
    elif kind == "readout":
        cols = artifacts.read_numeric(path("readout.csv"))
        artifacts.write_columns(out_path, {"t": cols["t"].astype(int), "z_norm": cols["z_norm"],
                                           "zhat_norm": cols["zhat_norm"]})
    else:
        from .config import load_config

        cfg = load_config(path("config.txt"))
        series = artifacts.read_series(path("series.csv"))
        n = min(max_points, cfg.train_length)
        X = delay_embed(series["x"][:n], cfg.som_m, cfg.som_tau)
        Y = delay_embed(series["y"][:n], cfg.som_m, cfg.som_tau)
        t_s = int(generator(derive_seed(cfg.seed, "figure")).integers(0, len(X)))
        nb = cross_map_neighborhood(X, Y, t_s, min(cfg.K, len(X) - 1))
        role = np.zeros(len(X), dtype=int)
        role[nb.times] = 1
        role[t_s] = 2
        rows = [(name, t, role[t], *E.data[t]) for name, E in (("X", X), ("Y", Y))
                for t in range(len(E))]
        artifacts.write_table(out_path, ["manifold", "t", "highlight"]
                              + [f"dim{c}" for c in range(cfg.som_m)], rows)
    return out_path
