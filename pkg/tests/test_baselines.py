import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hiddendriver.baselines import cca_first_pair, pca_first_component, phase_shuffle
from hiddendriver.errors import DegenerateSeriesError
from oracles import dft


@pytest.mark.parametrize("n", [2, 3, 64, 101, 1000])
def test_phase_shuffle_preserves_spectrum(n, rng):
    s = rng.normal(size=n) + 0.5
    out = phase_shuffle(s, seed=3)
    assert out.dtype == np.float64 and out.shape == s.shape
    ref, got = np.abs(dft(s)), np.abs(dft(out))
    assert np.allclose(got, ref, rtol=1e-9, atol=1e-9 * ref.max())
    assert out.mean() == pytest.approx(s.mean(), abs=1e-9)


def test_phase_shuffle_randomizes_and_is_seeded(rng):
    s = rng.normal(size=500)
    a, b = phase_shuffle(s, 1), phase_shuffle(s, 2)
    assert np.array_equal(a, phase_shuffle(s, 1))
    assert not np.allclose(a, b)
    assert abs(np.corrcoef(a, s)[0, 1]) < 0.3


def test_phase_shuffle_cosine():
    n, k = 256, 5
    t = np.arange(n)
    out = phase_shuffle(np.cos(2 * np.pi * k * t / n), seed=4)
    spec = dft(out)
    assert np.abs(spec[k]) == pytest.approx(n / 2, rel=1e-9)
    phase = np.angle(spec[k])
    assert np.allclose(out, np.cos(2 * np.pi * k * t / n + phase), atol=1e-9)


def test_phase_shuffle_autocorrelation(rng):
    s = rng.normal(size=300)
    out = phase_shuffle(s, 9)

    def circ_acf(x):
        x = x - x.mean()
        return np.array([np.dot(x, np.roll(x, -lag)) for lag in range(len(x))])

    assert np.allclose(circ_acf(out), circ_acf(s), atol=1e-6)


def test_pca_line():
    t = np.linspace(-1, 1, 100)
    proj, lp = pca_first_component(np.c_[t, t])
    assert np.allclose(lp.weights[0], np.array([1, 1]) / np.sqrt(2), atol=1e-10)
    assert np.allclose(proj, t * np.sqrt(2), atol=1e-10)


@pytest.mark.parametrize("seed", range(5))
def test_pca_matches_eigensolver(seed):
    r = np.random.default_rng(seed)
    F = r.normal(size=(3000, 6)) @ r.normal(size=(6, 6))
    _, lp = pca_first_component(F)
    vals, vecs = np.linalg.eigh(np.cov(F.T))
    v = vecs[:, -1]
    w = lp.weights[0]
    assert min(np.abs(w - v).max(), np.abs(w + v).max()) < 1e-8
    assert w[np.argmax(np.abs(w))] > 0
    assert np.linalg.norm(w) == pytest.approx(1.0, abs=1e-14)


def test_pca_variance_dominates_random_directions(rng):
    F = rng.normal(size=(1000, 4)) * [3, 1, 0.5, 2]
    proj, _ = pca_first_component(F)
    Fc = F - F.mean(0)
    for _ in range(100):
        d = rng.normal(size=4)
        d /= np.linalg.norm(d)
        assert proj.var() >= (Fc @ d).var() - 1e-12


def test_pca_errors():
    with pytest.raises(DegenerateSeriesError):
        pca_first_component(np.ones((10, 2)))
    with pytest.raises(ValueError):
        pca_first_component(np.ones((2, 2)))


def _shared_latent(seed, n=4000):
    r = np.random.default_rng(seed)
    L = r.normal(size=n)
    A = np.c_[L + r.normal(size=n), r.normal(size=(n, 2))] @ r.normal(size=(3, 3))
    B = np.c_[L + 0.5 * r.normal(size=n), r.normal(size=(n, 2))] @ r.normal(size=(3, 3))
    return L, A, B


def svd_cca_oracle(A, B):
    qa, _ = np.linalg.qr(A - A.mean(0))
    qb, _ = np.linalg.qr(B - B.mean(0))
    return np.linalg.svd(qa.T @ qb, compute_uv=False)[0]


@pytest.mark.parametrize("seed", range(5))
def test_cca_matches_svd_oracle(seed):
    L, A, B = _shared_latent(seed)
    res = cca_first_pair(A, B)
    assert res.correlation == pytest.approx(svd_cca_oracle(A, B), abs=1e-6)
    assert np.linalg.norm(res.u) == pytest.approx(1) and np.linalg.norm(res.v) == pytest.approx(1)
    assert abs(np.corrcoef(res.estimate, L)[0, 1]) > 0.7


def test_cca_identical_views(rng):
    A = rng.normal(size=(500, 3))
    res = cca_first_pair(A, A)
    assert res.correlation == pytest.approx(1.0, abs=1e-9)
    assert np.allclose(res.u, res.v, atol=1e-6)


def test_cca_affine_invariance(rng):
    _, A, B = _shared_latent(7)
    base = cca_first_pair(A, B).correlation
    M = rng.normal(size=(3, 3)) + 3 * np.eye(3)
    moved = cca_first_pair(A @ M + 5, B * 2 - 1).correlation
    assert moved == pytest.approx(base, abs=1e-4)


def test_cca_rank_deficient():
    r = np.random.default_rng(0)
    A = np.zeros((100, 2))
    with pytest.raises(np.linalg.LinAlgError):
        cca_first_pair(A, r.normal(size=(100, 2)), ridge=0.0)


def test_cca_transform_new_data():
    _, A, B = _shared_latent(3)
    res = cca_first_pair(A[:3000], B[:3000])
    est = res.estimate_for(A[3000:], B[3000:])
    assert est.shape == (1000,)


@settings(max_examples=20, deadline=None)
@given(st.integers(3, 200), st.integers(0, 1000))
def test_phase_shuffle_real_and_mean(n, seed):
    s = np.random.default_rng(seed).normal(size=n)
    out = phase_shuffle(s, seed)
    assert np.isfinite(out).all() and out.mean() == pytest.approx(s.mean(), abs=1e-9)
