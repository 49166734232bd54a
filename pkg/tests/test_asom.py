import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hiddendriver.asom import (SomGrid, TrainingSchedule, global_winner, init_grid, load_grid,
                               neighborhood_weights, readout, row_winner, save_grid, schedules,
                               train, update_centers, winners)
from hiddendriver.embedding import delay_embed
from hiddendriver.errors import (AlignmentError, DegenerateSeriesError, GridFormatError,
                                 NonFiniteCentersError)
from hiddendriver.neighbors import NeighborIndex
from hiddendriver.rng import generator


def test_init_grid():
    g = init_grid(40, 20, 3, seed=1)
    assert g.centers.shape == (40, 20, 3) and g.centers.reshape(-1, 3).shape[0] == 800
    assert g.centers.min() >= 0 and g.centers.max() < 1
    assert np.array_equal(g.centers, init_grid(40, 20, 3, seed=1).centers)
    b = init_grid(4, 3, 2, seed=1, bounds=(np.array([2.0, -1.0]), np.array([3.0, 0.0])))
    assert b.centers[..., 0].min() >= 2 and b.centers[..., 1].max() <= 0
    with pytest.raises(ValueError):
        init_grid(0, 3, 2)


def test_schedules_endpoints_exact():
    assert schedules(0) == (10.0, 20.0, 0.2)
    assert schedules(10000) == (10 / math.e, 4.0, 0.01)
    with pytest.raises(ValueError):
        schedules(10001)
    s1, s2, eps = TrainingSchedule().arrays(np.arange(0, 10001, 100))
    assert np.all(np.diff(s1) < 0) and np.all(np.diff(s2) < 0) and np.all(np.diff(eps) < 0)


def test_schedule_matches_exponential_form():
    sch = TrainingSchedule()
    for s in (1, 1234, 5000, 9999):
        s1, s2, e = schedules(s, sch)
        assert s1 == pytest.approx(10 * math.exp(-s / 1e4), rel=1e-14)
        assert s2 == pytest.approx(20 * math.exp(-s * math.log(5) / 1e4), rel=1e-14)
        assert e == pytest.approx(0.2 * math.exp(-s * math.log(20) / 1e4), rel=1e-14)


def test_schedule_validation():
    with pytest.raises(ValueError):
        TrainingSchedule(K=0)
    with pytest.raises(ValueError):
        TrainingSchedule(epsilon_0=0)


def test_winners_match_brute_force(rng):
    g = SomGrid(rng.random((7, 5, 3)))
    for _ in range(50):
        y = rng.random(3)
        d = ((g.centers - y) ** 2).sum(-1)
        assert global_winner(g, y) == np.unravel_index(np.argmin(d), d.shape)
        j = int(rng.integers(0, 5))
        assert row_winner(g, y, j) == int(np.argmin(d[:, j]))
    assert global_winner(g, g.centers[3, 2]) == (3, 2)
    assert global_winner(SomGrid(rng.random((1, 1, 3))), rng.random(3)) == (0, 0)
    assert row_winner(SomGrid(rng.random((1, 4, 3))), rng.random(3), 2) == 0
    with pytest.raises(IndexError):
        row_winner(g, rng.random(3), 5)


def test_winner_ties_lowest_index():
    g = SomGrid(np.zeros((3, 3, 2)))
    assert global_winner(g, np.ones(2)) == (0, 0)
    assert row_winner(g, np.ones(2), 2) == 0


def test_neighborhood_weights():
    w = neighborhood_weights(2, 1, 1.5, 2.5, 5, 4)
    assert w[2, 1] == 1.0
    i, j = np.meshgrid(np.arange(5), np.arange(4), indexing="ij")
    assert np.array_equal(w, np.exp(-((i - 2) ** 2 / 1.5 ** 2 + (j - 1) ** 2 / 2.5 ** 2)))
    w = neighborhood_weights(1, 0, 2.0, 3.0, 5, 4)
    assert w[3, 0] == pytest.approx(math.exp(-1))
    with pytest.raises(ValueError):
        neighborhood_weights(0, 0, 0.0, 1.0, 2, 2)


def test_update_centers(rng):
    g = SomGrid(rng.random((3, 2, 2)))
    y = np.array([5.0, -5.0])
    before = np.linalg.norm(g.centers - y, axis=-1)
    w = rng.random((3, 2))
    w[0, 0], w[1, 1] = 1.0, 0.0
    old = g.centers.copy()
    update_centers(g, y, w, 1.0)
    assert np.array_equal(g.centers[0, 0], y)
    assert np.array_equal(g.centers[1, 1], old[1, 1])
    assert np.all(np.linalg.norm(g.centers - y, axis=-1) <= before)
    with pytest.raises(ValueError):
        update_centers(g, y, w, 0.0)


def _small_data(n=400, seed=0):
    r = np.random.default_rng(seed)
    return delay_embed(r.random(n), 3), delay_embed(r.random(n), 3)


def reference_train(grid, X, Y, schedule, seed):
    """Algorithm written out with the single-step primitives."""
    g = grid.copy()
    ts = generator(seed).integers(0, len(X), schedule.N)
    idx = NeighborIndex(X.data)
    for s in range(1, schedule.N + 1):
        s1, s2, eps = schedules(s, schedule)
        t_s = int(ts[s - 1])
        _, j_star = global_winner(g, Y.data[t_s])
        for t_k, _ in idx.knn(t_s, schedule.K):
            i_a = row_winner(g, Y.data[t_k], j_star)
            update_centers(g, Y.data[t_k], neighborhood_weights(i_a, j_star, s1, s2, g.n1, g.n2), eps)
    return g


@pytest.mark.parametrize("backend", ["python", "cython"])
def test_train_matches_reference(backend):
    X, Y = _small_data()
    sch = TrainingSchedule(N=40, K=6)
    g0 = init_grid(6, 4, 3, seed=2)
    got, trace = train(g0, X, Y, sch, seed=5, backend=backend)
    ref = reference_train(g0, X, Y, sch, 5)
    assert np.allclose(got.centers, ref.centers, rtol=0, atol=1e-13)
    assert trace.outer_steps == 40 and trace.updates == 240


def test_train_n_zero_and_determinism():
    X, Y = _small_data()
    g0 = init_grid(5, 4, 3, seed=2)
    g, _ = train(g0, X, Y, TrainingSchedule(N=0), seed=1)
    assert np.array_equal(g.centers, g0.centers)
    a, _ = train(g0, X, Y, TrainingSchedule(N=50, K=5), seed=1)
    b, _ = train(g0, X, Y, TrainingSchedule(N=50, K=5), seed=1)
    assert np.array_equal(a.centers, b.centers)
    assert not np.array_equal(a.centers, g0.centers)


def test_train_stays_in_bounding_box():
    X, Y = _small_data()
    Y = Y.with_data(Y.data * 3 + 2)
    g0 = init_grid(8, 5, 3, seed=4)
    g, trace = train(g0, X, Y, TrainingSchedule(N=200, K=10), seed=2, snapshot_steps=[0, 50, 200])
    pts = np.vstack([g0.centers.reshape(-1, 3), Y.data])
    lo, hi = pts.min(0), pts.max(0)
    for snap in trace.snapshots + [g.centers]:
        flat = snap.reshape(-1, 3)
        assert np.all(flat >= lo) and np.all(flat <= hi)
    assert len(trace.snapshots) == 3 and np.array_equal(trace.snapshots[0], g0.centers)


def test_train_errors():
    X, Y = _small_data()
    g0 = init_grid(3, 3, 3, seed=0)
    with pytest.raises(AlignmentError):
        train(g0, X, delay_embed(np.random.default_rng(1).random(401), 3), TrainingSchedule(N=1))
    with pytest.raises(ValueError):
        train(g0, X, Y, TrainingSchedule(N=5), snapshot_steps=[6])
    with pytest.raises(ValueError):
        train(init_grid(3, 3, 2), X, Y, TrainingSchedule(N=1))
    bad = g0.copy()
    bad.centers[0, 0, 0] = np.nan
    with pytest.raises(NonFiniteCentersError):
        train(bad, X, Y, TrainingSchedule(N=3, K=2))


def test_one_dimensional_limit_matches_kohonen():
    # n2 = 1 and huge sigma2: the update is a plain 1-D Kohonen step along axis 1
    X, Y = _small_data()
    sch = TrainingSchedule(N=30, K=4, sigma2_0=1e12)
    g0 = init_grid(7, 1, 3, seed=3)
    got, _ = train(g0, X, Y, sch, seed=8)
    c = g0.centers[:, 0, :].copy()
    ts = generator(8).integers(0, len(X), sch.N)
    idx = NeighborIndex(X.data)
    for s in range(1, sch.N + 1):
        s1, _, eps = schedules(s, sch)
        for t_k, _ in idx.knn(int(ts[s - 1]), sch.K):
            y = Y.data[t_k]
            i_a = int(np.argmin(((c - y) ** 2).sum(1)))
            h = np.exp(-((np.arange(7) - i_a) ** 2) / s1 ** 2)
            c += eps * h[:, None] * (y - c)
    assert np.allclose(got.centers[:, 0, :], c, atol=1e-13)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 100), st.floats(-50, 50))
def test_winner_affine_invariance(scale, shift):
    r = np.random.default_rng(0)
    g = SomGrid(r.random((6, 4, 3)))
    Y = r.random((50, 3))
    w0 = winners(g, Y)
    w1 = winners(SomGrid(g.centers * scale + shift), Y * scale + shift)
    assert np.array_equal(w0, w1)


@pytest.mark.parametrize("backend", ["python", "cython"])
def test_readout(backend):
    X, Y = _small_data()
    g, _ = train(init_grid(10, 6, 3, seed=1), X, Y, TrainingSchedule(N=100, K=8), seed=3)
    ro = readout(g, Y, backend=backend)
    assert ro.levels.min() >= 0 and ro.levels.max() <= 5
    assert np.unique(ro.levels).size == ro.distinct_levels <= 6
    assert abs(ro.standardized.mean()) < 1e-12
    ref = [global_winner(g, y)[1] for y in Y.data]
    assert ro.levels.tolist() == ref
    rb = readout(g, Y, X_test=X, mode="bundle")
    assert rb.levels.shape == ro.levels.shape
    with pytest.raises(ValueError):
        readout(g, Y, mode="bundle")


def test_readout_collapse():
    # every column j sits at distance j from the queries -> constant readout
    c = np.zeros((3, 4, 1))
    for j in range(4):
        c[:, j, 0] = j
    g = SomGrid(c)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        with pytest.raises(DegenerateSeriesError):
            readout(g, np.zeros((10, 1)))
    with pytest.warns(RuntimeWarning, match="collapse"):
        ro = readout(g, np.r_[np.zeros((5, 1)), np.ones((5, 1))])
    assert ro.distinct_levels == 2 and ro.warnings


def test_grid_roundtrip(tmp_path):
    g = init_grid(40, 20, 3, seed=7)
    g.centers[0, 0, 0] = 1 / 3
    p1, p2 = tmp_path / "a.txt", tmp_path / "b.txt"
    save_grid(g, p1)
    h = load_grid(p1)
    assert np.array_equal(h.centers, g.centers)
    save_grid(h, p2)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert lines[0] == "ASOM v1 40 20 3"
    assert sum(len(ln.split()) - 2 for ln in lines[1:]) == 2400


def test_grid_format_errors(tmp_path):
    g = init_grid(3, 2, 2, seed=7)
    p = tmp_path / "g.txt"
    save_grid(g, p)
    text = p.read_text()
    bad = tmp_path / "bad.txt"
    bad.write_text("\n".join(text.splitlines()[:-1]) + "\n")
    with pytest.raises(GridFormatError):
        load_grid(bad)
    bad.write_text(text.replace("ASOM v1", "ASOM v2"))
    with pytest.raises(GridFormatError, match="version"):
        load_grid(bad)
    bad.write_text(text.replace("ASOM", "SOM"))
    with pytest.raises(GridFormatError):
        load_grid(bad)
    bad.write_text("")
    with pytest.raises(GridFormatError):
        load_grid(bad)
    lines = text.splitlines()
    lines[1] = "0 0 abc 1"
    bad.write_text("\n".join(lines))
    with pytest.raises(GridFormatError):
        load_grid(bad)
