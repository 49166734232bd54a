import csv
import os

import numpy as np
import pytest

from hiddendriver import artifacts
from hiddendriver.config import ExperimentConfig
from hiddendriver.errors import PipelineError, UnsupportedShapeError
from hiddendriver.pipeline import (export_figure_data, run_batch, run_demo, simulate_config,
                                   split_and_embed)

SMALL = dict(n_train=3000, n_test=1500, dim_chunk=2000, N=400, snapshot_steps=[0, 200, 400],
             methods=["asom", "random", "pca", "cca"])

FILES = ["config.txt", "series.csv", "dimensions.json", "grid.txt", "snapshots.csv",
         "readout.csv", "evaluation.csv", "manifest.json"]


@pytest.fixture(scope="module")
def demo_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("demo")
    run_demo(ExperimentConfig(seed=4, **SMALL), str(out))
    return out


def test_demo_artifacts(demo_dir):
    for f in FILES:
        assert (demo_dir / f).is_file(), f
    rows = list(csv.DictReader(open(demo_dir / "evaluation.csv")))
    assert [r["method"] for r in rows] == ["asom", "random", "pca", "cca"]
    assert list(rows[0]) == ["run_id", "method", "abs_rho", "best_lag", "best_lag_rho", "seed"]
    series = artifacts.read_series(demo_dir / "series.csv")
    assert len(series["t"]) == 4500
    snaps = artifacts.read_numeric(demo_dir / "snapshots.csv")
    assert sorted(set(snaps["step"])) == [0, 200, 400] and len(snaps["step"]) == 3 * 800
    manifest = artifacts.read_json(demo_dir / "manifest.json")
    assert manifest["master_seed"] == 4


def test_demo_is_byte_reproducible(demo_dir, tmp_path):
    run_demo(ExperimentConfig(seed=4, **SMALL), str(tmp_path))
    for f in FILES:
        assert (tmp_path / f).read_bytes() == (demo_dir / f).read_bytes(), f


def test_demo_unsupported_shape(tmp_path):
    cfg = ExperimentConfig(seed=4, som_shape="2+1", **SMALL)
    with pytest.raises(PipelineError) as info:
        run_demo(cfg, str(tmp_path))
    assert info.value.step == 5 and isinstance(info.value.cause, UnsupportedShapeError)


def test_split_has_no_leakage():
    cfg = ExperimentConfig(seed=1, **SMALL)
    sim, *_ = simulate_config(cfg)
    sp = split_and_embed(cfg, sim)
    assert sp.X_train.times[-1] + cfg.som_m - 1 < cfg.train_length
    assert sp.X_test.times[0] == cfg.train_length
    assert np.array_equal(sp.z_test, sim.z[sp.X_test.times])
    assert np.array_equal(sp.Y_test.data[:, 0], sim.y[sp.Y_test.times])


def test_export_kinds(demo_dir, tmp_path):
    grid = artifacts.read_table(export_figure_data(str(demo_dir), "grid", str(tmp_path / "g.csv")))
    assert len(grid["i"]) == 40 * 20
    curves = artifacts.read_table(export_figure_data(str(demo_dir), "dimension-curves",
                                                     str(tmp_path / "d.csv")))
    for name in "XYJI":
        ks = [int(k) for m, k in zip(curves["manifold"], curves["k"]) if m == name]
        assert ks == list(range(10, 21))
    ro = artifacts.read_table(export_figure_data(str(demo_dir), "readout", str(tmp_path / "r.csv")))
    assert list(ro) == ["t", "z_norm", "zhat_norm"]
    man = artifacts.read_table(export_figure_data(str(demo_dir), "manifold", str(tmp_path / "m.csv")))
    assert set(man["manifold"]) == {"X", "Y"}
    assert sum(h == "1" for h in man["highlight"]) == 2 * 20
    with pytest.raises(ValueError):
        export_figure_data(str(demo_dir), "heatmap")
    with pytest.raises(FileNotFoundError):
        export_figure_data(str(tmp_path / "nope"), "grid")


def test_batch_small(tmp_path):
    cfg = ExperimentConfig(n_train=2000, n_test=1000, dim_chunk=1000, N=200)
    res = run_batch("logistic", 3, ("asom", "random", "pca", "cca"), seed=5, cfg=cfg,
                    out_dir=str(tmp_path))
    assert len(res.rows) == 12 and not res.failures
    assert set(res.summaries) == {"asom", "random", "pca", "cca"}
    assert all(d >= 1 for d in res.param_draws)
    summary = artifacts.read_json(tmp_path / "summary.json")
    assert summary["completed_runs"]["asom"] == 3
    rows = artifacts.read_table(tmp_path / "batch.csv")
    assert len(rows["run_id"]) == 12


def test_batch_parallel_matches_serial():
    cfg = ExperimentConfig(family="tent", n_train=2000, n_test=1000, dim_chunk=1000, N=100)
    a = run_batch("tent", 2, ("asom", "pca"), seed=1, cfg=cfg, workers=1)
    b = run_batch("tent", 2, ("asom", "pca"), seed=1, cfg=cfg, workers=2)
    assert a.rows == b.rows


def test_batch_redraws_diverging_parameters():
    cfg = ExperimentConfig(n_train=500, n_test=500, dim_chunk=500, N=10)
    res = run_batch("logistic", 6, ("random",), seed=0, cfg=cfg)
    assert len(res.rows) == 6
    assert max(res.param_draws) > 1
    with pytest.raises(ValueError):
        run_batch("logistic", 0)
