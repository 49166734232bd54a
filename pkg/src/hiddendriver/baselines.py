"""Comparison estimators: phase-randomized surrogate, PCA and CCA projections."""

from dataclasses import dataclass

import numpy as np

from .embedding import EmbeddedSeries
from .errors import DegenerateSeriesError, SeriesTooShortError
from .rng import generator

POWER_TOL = 1e-10
POWER_MAX_ITER = 100000
CCA_RIDGE = 1e-8


@dataclass
class LinearProjection:
    """Unit-norm weights per view plus the column means used for centering."""

    weights: tuple
    means: tuple

    def transform(self, *views):
        """Project new data of each view with the stored weights and means."""
        if len(views) != len(self.weights):
            raise ValueError(f"expected {len(self.weights)} views")
        return tuple((_as_matrix(v) - mu) @ w for v, w, mu in zip(views, self.weights, self.means))


def _as_matrix(a):
    if isinstance(a, EmbeddedSeries):
        return a.data
    a = np.asarray(a, dtype=np.float64)
    return a[:, None] if a.ndim == 1 else a


def phase_shuffle(series, seed):
    """Surrogate with the same Fourier magnitudes and uniformly random phases.

    The DC term (and the Nyquist term for even lengths) is left unchanged so
    the output stays real and keeps the mean.
    """
    s = np.asarray(series, dtype=np.float64).ravel()
    n = len(s)
    if n < 2:
        raise SeriesTooShortError("phase_shuffle needs at least 2 samples")
    spec = np.fft.rfft(s)
    theta = generator(seed).uniform(0.0, 2.0 * np.pi, len(spec))
    rot = np.exp(1j * theta)
    rot[0] = 1.0
    if n % 2 == 0:
        rot[-1] = 1.0
    return np.fft.irfft(spec * rot, n)


def _top_eigvec(mat, tol=POWER_TOL):
    """Leading eigenvector of a symmetric PSD matrix by power iteration.

    Iterates until both the Rayleigh quotient (relative) and the vector
    change fall below ``tol``. Starts from the all-ones vector (or the first
    basis vector if that lies in the null space); returns
    ``(eigenvalue, unit vector)``.
    """
    d = mat.shape[0]
    v = np.ones(d) / np.sqrt(d)
    if not np.linalg.norm(mat @ v) > 0:
        v = np.eye(d)[0]
    lam = 0.0
    for _ in range(POWER_MAX_ITER):
        w = mat @ v
        norm = np.linalg.norm(w)
        if not norm > 0:
            break
        w /= norm
        lam_new = float(w @ mat @ w)
        done = abs(lam_new - lam) <= tol * abs(lam_new) and np.linalg.norm(w - v) <= tol
        v, lam = w, lam_new
        if done:
            break
    return lam, v


def _fix_sign(v):
    return v if v[np.argmax(np.abs(v))] >= 0 else -v


def pca_first_component(features):
    """Projection of centered ``features`` (T x d) onto their first principal axis.

    Returns
    -------
    projection : ndarray (T,)
    projector : LinearProjection
        Single-view projection; the largest-magnitude weight is positive.
    """
    F = _as_matrix(features)
    T, d = F.shape
    if T <= d:
        raise ValueError("need more samples than features")
    mu = F.mean(axis=0)
    Fc = F - mu
    cov = Fc.T @ Fc / (T - 1)
    if not np.trace(cov) > 0:
        raise DegenerateSeriesError("features have zero variance")
    _, w = _top_eigvec(cov)
    w = _fix_sign(w)
    return Fc @ w, LinearProjection((w,), (mu,))


def _inv_sqrt(cov):
    vals, vecs = np.linalg.eigh(cov)
    if not vals.min() > 0:
        raise np.linalg.LinAlgError("view is rank deficient after ridge")
    return (vecs / np.sqrt(vals)) @ vecs.T


def _standardized(p):
    sd = p.std()
    if not sd > 0:
        raise DegenerateSeriesError("canonical projection is constant")
    return (p - p.mean()) / sd


@dataclass
class CCAResult:
    u: np.ndarray
    v: np.ndarray
    correlation: float
    estimate: np.ndarray
    projection: LinearProjection

    def estimate_for(self, X_feats, Y_feats):
        """Averaged standardized projections of new data (standardized with its own moments)."""
        pu, pv = self.projection.transform(X_feats, Y_feats)
        return 0.5 * (_standardized(pu) + _standardized(pv))


def cca_first_pair(X_feats, Y_feats, ridge=CCA_RIDGE):
    """First canonical pair of two views.

    Each view is whitened by its ridge-regularized covariance; the leading
    singular pair of the whitened cross-covariance is found by power
    iteration on ``M M^T``. ``u`` and ``v`` are rescaled to unit norm (the
    correlation does not depend on the scale) with the sign chosen so the
    largest-magnitude entry of ``u`` is positive.

    Raises ``numpy.linalg.LinAlgError`` for a rank-deficient view.
    """
    A, B = _as_matrix(X_feats), _as_matrix(Y_feats)
    if len(A) != len(B):
        raise ValueError("views differ in length")
    T = len(A)
    if T <= max(A.shape[1], B.shape[1]):
        raise ValueError("need more samples than features")
    ma, mb = A.mean(axis=0), B.mean(axis=0)
    Ac, Bc = A - ma, B - mb
    caa = Ac.T @ Ac / (T - 1) + ridge * np.eye(A.shape[1])
    cbb = Bc.T @ Bc / (T - 1) + ridge * np.eye(B.shape[1])
    cab = Ac.T @ Bc / (T - 1)
    wa, wb = _inv_sqrt(caa), _inv_sqrt(cbb)
    M = wa @ cab @ wb
    _, a = _top_eigvec(M @ M.T)
    b = M.T @ a
    if not np.linalg.norm(b) > 0:
        raise DegenerateSeriesError("views are uncorrelated")
    b /= np.linalg.norm(b)
    u, v = wa @ a, wb @ b
    u /= np.linalg.norm(u)
    v /= np.linalg.norm(v)
    if u[np.argmax(np.abs(u))] < 0:
        u, v = -u, -v
    pu, pv = Ac @ u, Bc @ v
    corr = float(np.corrcoef(pu, pv)[0, 1])
    estimate = 0.5 * (_standardized(pu) + _standardized(pv))
    return CCAResult(u, v, corr, estimate, LinearProjection((u, v), (ma, mb)))
