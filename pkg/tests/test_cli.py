import json
import subprocess
import sys

import pytest

from hiddendriver import artifacts
from hiddendriver.cli import main

SMALL = "n_train = 3000\nn_test = 1500\ndim_chunk = 2000\nN = 300\n"


@pytest.fixture
def cfg_file(tmp_path):
    p = tmp_path / "small.cfg"
    p.write_text(SMALL)
    return str(p)


def test_step_by_step_workflow(tmp_path, cfg_file, capsys):
    out = str(tmp_path / "o")
    base = ["--config", cfg_file, "--out", out, "--seed", "3"]
    assert main(["simulate", *base]) == 0
    series = f"{out}/series.csv"
    assert main(["embed", *base, "--input", series, "--column", "x", "--m", "3"]) == 0
    assert len(artifacts.read_table(f"{out}/embedded-x.csv")["dim2"]) == 4498
    assert main(["dimension", *base, "--input", series]) == 0
    assert "relation=" in capsys.readouterr().out
    assert main(["train", *base, "--input", series]) == 0
    assert main(["infer", *base, "--input", series, "--grid", f"{out}/grid.txt"]) == 0
    assert main(["evaluate", *base, "--input", f"{out}/readout.csv"]) == 0
    ev = artifacts.read_table(f"{out}/evaluation.csv")
    assert ev["method"] == ["zhat"]
    assert main(["baseline", *base, "--input", series, "--method", "random,pca,cca"]) == 0
    for m in ("random", "pca", "cca"):
        assert len(artifacts.read_table(f"{out}/baseline-{m}.csv")["estimate"]) == 1498


def test_demo_export_and_batch(tmp_path, cfg_file):
    out = str(tmp_path / "d")
    assert main(["demo", "--config", cfg_file, "--out", out, "--method", "asom,pca"]) == 0
    assert main(["export", "--artifact", out, "--kind", "readout"]) == 0
    assert (tmp_path / "d" / "figure-readout.csv").is_file()
    b = str(tmp_path / "b")
    assert main(["batch", "--config", cfg_file, "--out", b, "--family", "tent", "--runs", "2",
                 "--method", "asom,random"]) == 0
    summary = json.loads((tmp_path / "b" / "summary.json").read_text())
    assert summary["family"] == "tent" and summary["completed_runs"] == {"asom": 2, "random": 2}


def test_exit_codes(tmp_path, cfg_file):
    bad = tmp_path / "bad.cfg"
    bad.write_text("colour = blue\n")
    assert main(["simulate", "--config", str(bad)]) == 2
    shape = tmp_path / "shape.cfg"
    shape.write_text(SMALL + "som_shape = 2+2\n")
    assert main(["demo", "--config", str(shape), "--out", str(tmp_path / "s")]) == 2
    lit = tmp_path / "lit.cfg"
    lit.write_text("coupling = literal\nmax_restarts = 2\n")
    assert main(["simulate", "--config", str(lit), "--out", str(tmp_path / "l")]) == 3
    with pytest.raises(SystemExit) as info:
        main(["simulate", "--method", "ica"])
    assert info.value.code == 2


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "hiddendriver", "--help"], capture_output=True,
                       text=True)
    assert r.returncode == 0
    for cmd in ("simulate", "embed", "dimension", "train", "infer", "evaluate", "baseline",
                "batch", "export"):
        assert cmd in r.stdout
