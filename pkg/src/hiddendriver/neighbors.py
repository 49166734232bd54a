"""Exact Euclidean k-nearest-neighbor search and cross-mapping.

Results are defined by the canonical distance
``sqrt(sum((p - q)**2))`` evaluated in numpy, sorted by distance and then by
row index. The k-d tree (``scipy.spatial.cKDTree``) only proposes candidates;
every answer is re-ranked on canonical distances and certified against the
tree's search radius, falling back to a ball query when a tie or
near-tie straddles the candidate boundary.
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .embedding import EmbeddedSeries
from .errors import AlignmentError
from .rng import generator

_CANDIDATE_MARGIN = 4
_REL_SLACK = 1e-9
_BRUTE_LIMIT = 64


def _as_points(points):
    if isinstance(points, EmbeddedSeries):
        return points.data
    arr = np.ascontiguousarray(points, dtype=np.float64)
    if arr.ndim == 1:
        arr = arr[:, None]
    return arr


def canonical_distances(points, query):
    return np.sqrt(((points - query) ** 2).sum(axis=-1))


class NeighborIndex:
    """Immutable exact KNN index over the rows of a point set.

    Row positions (0-based) are used as time indices throughout.
    """

    def __init__(self, points, method="auto"):
        self.points = _as_points(points)
        if self.points.shape[0] < 1:
            raise ValueError("cannot index an empty point set")
        if method not in ("auto", "kdtree", "brute"):
            raise ValueError("method must be 'auto', 'kdtree' or 'brute'")
        if method == "auto":
            method = "brute" if len(self.points) <= _BRUTE_LIMIT else "kdtree"
        self.method = method
        self._tree = cKDTree(self.points) if method == "kdtree" else None

    def __len__(self):
        return self.points.shape[0]

    def _check_k(self, k, exclude_self):
        available = len(self) - (1 if exclude_self else 0)
        if k < 1 or k > available:
            raise ValueError(f"k={k} outside 1..{available}")

    def knn(self, query_time, k, exclude_self=True):
        """``k`` nearest rows to row ``query_time`` as ``[(row, distance), ...]``."""
        idx, dist = self.knn_many([query_time], k, exclude_self)
        return [(int(i), float(d)) for i, d in zip(idx[0], dist[0])]

    def knn_many(self, rows, k, exclude_self=True):
        """Neighbors of several indexed rows; returns ``(indices, distances)`` of shape (n, k)."""
        rows = np.asarray(rows, dtype=np.int64).ravel()
        if rows.size and (rows.min() < 0 or rows.max() >= len(self)):
            raise IndexError("query row out of range")
        self._check_k(k, exclude_self)
        return self._search(self.points[rows], k, rows if exclude_self else None)

    def knn_points(self, queries, k):
        """Neighbors of arbitrary query points (nothing excluded)."""
        queries = _as_points(queries)
        self._check_k(k, False)
        return self._search(queries, k, None)

    def neighbor_distances(self, k):
        """Sorted distances to the ``k`` nearest other rows, for every row."""
        _, dist = self.knn_many(np.arange(len(self)), k, exclude_self=True)
        return dist

    def _search(self, queries, k, self_rows):
        nq = queries.shape[0]
        out_idx = np.empty((nq, k), dtype=np.int64)
        out_dist = np.empty((nq, k))
        if nq == 0:
            return out_idx, out_dist
        n = len(self)
        if self.method == "brute":
            for q in range(nq):
                cand = np.arange(n)
                out_idx[q], out_dist[q] = self._rank(queries[q], cand, k, None if self_rows is None else self_rows[q])
            return out_idx, out_dist

        need = k + (0 if self_rows is None else 1)
        kq = min(n, need + _CANDIDATE_MARGIN)
        kd_dist, kd_idx = self._tree.query(queries, k=kq)
        kd_dist = kd_dist.reshape(nq, kq)
        kd_idx = kd_idx.reshape(nq, kq).astype(np.int64)
        dist = canonical_distances(self.points[kd_idx], queries[:, None, :])
        if self_rows is not None:
            dist = np.where(kd_idx == self_rows[:, None], np.inf, dist)
        order = np.lexsort((kd_idx, dist), axis=-1)[:, :k]
        out_idx[:] = np.take_along_axis(kd_idx, order, axis=1)
        out_dist[:] = np.take_along_axis(dist, order, axis=1)
        if kq < n:
            kth = out_dist[:, -1]
            unsafe = ~(kth < kd_dist[:, -1] * (1.0 - _REL_SLACK))
            for q in np.flatnonzero(unsafe):
                radius = kth[q] * (1.0 + _REL_SLACK) + 1e-300
                cand = np.asarray(self._tree.query_ball_point(queries[q], radius), dtype=np.int64)
                out_idx[q], out_dist[q] = self._rank(queries[q], cand, k, None if self_rows is None else self_rows[q])
        return out_idx, out_dist

    def _rank(self, query, cand, k, self_row):
        if self_row is not None:
            cand = cand[cand != self_row]
        d = canonical_distances(self.points[cand], query)
        order = np.lexsort((cand, d))[:k]
        return cand[order], d[order]


def build_index(points, method="auto"):
    return NeighborIndex(points, method)


@dataclass
class CrossMapNeighborhood:
    seed_time: int
    times: np.ndarray
    source_rows: np.ndarray
    target_rows: np.ndarray


def cross_map_neighborhood(X, Y, t_s, K=20, index=None):
    """Map the ``K``-neighborhood of ``X[t_s]`` (self excluded) onto ``Y``.

    ``index`` may be a prebuilt :class:`NeighborIndex` over ``X``.
    """
    Xd, Yd = _as_points(X), _as_points(Y)
    if isinstance(X, EmbeddedSeries) and isinstance(Y, EmbeddedSeries):
        if not X.aligned_with(Y):
            raise AlignmentError("X and Y are not aligned")
    elif Xd.shape[0] != Yd.shape[0]:
        raise AlignmentError("X and Y have different lengths")
    if index is None:
        index = NeighborIndex(Xd)
    idx, _ = index.knn_many([t_s], K, exclude_self=True)
    times = idx[0]
    return CrossMapNeighborhood(int(t_s), times, Xd[times], Yd[times])


def set_diameter(points):
    """Largest pairwise Euclidean distance within a point set."""
    P = _as_points(points)
    if len(P) < 2:
        return 0.0
    diff = P[:, None, :] - P[None, :, :]
    return float(np.sqrt((diff ** 2).sum(axis=-1)).max())


def cross_map_asymmetry(X, Y, n_seeds=100, K=20, seed=0):
    """Mean diameters of cross-mapped neighborhoods in both directions.

    Returns ``(mean diameter of Y-images of X-neighborhoods,
    mean diameter of X-images of Y-neighborhoods)``.
    """
    Xd, Yd = _as_points(X), _as_points(Y)
    gen = generator(seed)
    seeds = gen.integers(0, len(Xd), n_seeds)
    ix, iy = NeighborIndex(Xd), NeighborIndex(Yd)
    nx, _ = ix.knn_many(seeds, K)
    ny, _ = iy.knn_many(seeds, K)
    x_to_y = np.mean([set_diameter(Yd[r]) for r in nx])
    y_to_x = np.mean([set_diameter(Xd[r]) for r in ny])
    return float(x_to_y), float(y_to_x)
