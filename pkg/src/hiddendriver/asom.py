"""Anisotropic self-organizing map.

The grid has ``n1`` nodes along the self-dynamics axis (index ``i``) and
``n2`` along the driver axis (index ``j``); every node owns a center in the
``m``-dimensional embedding space of ``Y``.

One outer training step ``s`` (1..N):

1. draw a random time ``t_s``;
2. the global winner of ``Y[t_s]`` fixes the driver column ``j*``;
3. the ``K`` nearest neighbors of ``X[t_s]`` in ``X`` (``t_s`` excluded) are
   presented in ascending-distance order; for each neighbor ``t_k`` the
   winner row ``i_a`` is searched in column ``j*`` only, and every center
   moves toward ``Y[t_k]`` with weight
   ``eps(s) * exp(-((i - i_a)**2 / sigma1(s)**2 + (j - j*)**2 / sigma2(s)**2))``.

Readout reports the driver index ``j*`` of the global winner of each test
vector.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from . import _backend
from .embedding import EmbeddedSeries, standardize
from .errors import AlignmentError, GridFormatError, NonFiniteCentersError
from .neighbors import NeighborIndex
from .rng import generator

GRID_MAGIC = "ASOM"
GRID_VERSION = "v1"
MIN_DISTINCT_LEVELS = 3


@dataclass(frozen=True)
class TrainingSchedule:
    """Outer-loop count, neighborhood size and decay schedules.

    ``sigma2`` and ``epsilon`` decay as ``x_0 * exp(-s * ln(base) / N)``;
    the bases are stored instead of their logarithms and the decay is
    evaluated as ``x_0 / base**(s/N)`` so the end values (4 and 0.01 with the
    defaults) come out exact in floating point.
    """

    N: int = 10000
    K: int = 20
    sigma1_0: float = 10.0
    sigma2_0: float = 20.0
    sigma2_base: float = 5.0
    epsilon_0: float = 0.2
    epsilon_base: float = 20.0

    def __post_init__(self):
        if self.N < 0 or self.K < 1:
            raise ValueError("N must be >= 0 and K >= 1")
        for name in ("sigma1_0", "sigma2_0", "epsilon_0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (self.sigma2_base > 1 and self.epsilon_base > 1):
            raise ValueError("decay bases must exceed 1")

    @property
    def sigma2_decay(self):
        return math.log(self.sigma2_base)

    @property
    def epsilon_decay(self):
        return math.log(self.epsilon_base)

    def arrays(self, steps):
        """Schedule values at an array of outer steps."""
        frac = np.asarray(steps, dtype=np.float64) / max(self.N, 1)
        sigma1 = self.sigma1_0 / np.exp(frac)
        sigma2 = self.sigma2_0 / self.sigma2_base ** frac
        eps = self.epsilon_0 / self.epsilon_base ** frac
        return sigma1, sigma2, eps


def schedules(s, schedule=TrainingSchedule()):
    """``(sigma1, sigma2, epsilon)`` at outer step ``s``."""
    if not 0 <= s <= schedule.N:
        raise ValueError(f"step {s} outside 0..{schedule.N}")
    s1, s2, eps = schedule.arrays([s])
    return float(s1[0]), float(s2[0]), float(eps[0])


@dataclass
class SomGrid:
    centers: np.ndarray

    def __post_init__(self):
        self.centers = np.ascontiguousarray(self.centers, dtype=np.float64)
        if self.centers.ndim != 3:
            raise ValueError("centers must have shape (n1, n2, m)")

    @property
    def n1(self):
        return self.centers.shape[0]

    @property
    def n2(self):
        return self.centers.shape[1]

    @property
    def m(self):
        return self.centers.shape[2]

    def copy(self):
        return SomGrid(self.centers.copy())


def init_grid(n1=40, n2=20, m=3, seed=0, bounds=None):
    """Centers i.i.d. uniform in the unit cube.

    ``bounds`` (an ``EmbeddedSeries``, an array of points, or a ``(lo, hi)``
    pair) rescales the cube onto that bounding box.
    """
    if min(n1, n2, m) < 1:
        raise ValueError("grid dimensions must be positive")
    centers = generator(seed).random((n1, n2, m))
    if bounds is not None:
        if isinstance(bounds, EmbeddedSeries):
            bounds = bounds.data
        if isinstance(bounds, tuple):
            lo, hi = (np.asarray(b, dtype=float) for b in bounds)
        else:
            pts = np.asarray(bounds, dtype=float)
            lo, hi = pts.min(axis=0), pts.max(axis=0)
        centers = lo + centers * (hi - lo)
    return SomGrid(centers)


def _sqdist(points, y):
    return ((points - y) ** 2).sum(axis=-1)


def global_winner(grid, y):
    """Node ``(i, j)`` whose center is nearest ``y``; ties go to the lowest (i, j)."""
    d = _sqdist(grid.centers.reshape(-1, grid.m), np.asarray(y, dtype=float))
    w = int(np.argmin(d))
    return divmod(w, grid.n2)


def row_winner(grid, y, j_star):
    """Nearest node to ``y`` within driver column ``j_star``; ties go to the lowest i."""
    if not 0 <= j_star < grid.n2:
        raise IndexError("j_star out of range")
    return int(np.argmin(_sqdist(grid.centers[:, j_star, :], np.asarray(y, dtype=float))))


def neighborhood_weights(i_a, j_star, sigma1, sigma2, n1, n2):
    if not (sigma1 > 0 and sigma2 > 0):
        raise ValueError("radii must be positive")
    i = np.arange(n1, dtype=float)[:, None]
    j = np.arange(n2, dtype=float)[None, :]
    return np.exp(-((i - i_a) ** 2 / sigma1 ** 2 + (j - j_star) ** 2 / sigma2 ** 2))


def update_centers(grid, y, weights, epsilon):
    """Move every center toward ``y`` by ``epsilon * weight``; mutates ``grid``."""
    if weights.shape != (grid.n1, grid.n2):
        raise ValueError("weights shape does not match the grid")
    if not 0 < epsilon <= 1:
        raise ValueError("epsilon must lie in (0, 1]")
    y = np.asarray(y, dtype=float)
    grid.centers += (epsilon * weights)[:, :, None] * (y - grid.centers)
    return grid


@dataclass
class TrainingTrace:
    snapshot_steps: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    outer_steps: int = 0
    updates: int = 0
    backend: str = ""


def train(grid, X, Y, schedule=None, seed=0, snapshot_steps=(), backend=None, in_place=False):
    """Run anisotropic training; returns ``(trained grid, trace)``.

    ``snapshot_steps`` lists outer steps (0..N) after which a copy of the
    centers is stored; 0 captures the initial grid.
    """
    schedule = schedule or TrainingSchedule()
    if isinstance(X, EmbeddedSeries) and isinstance(Y, EmbeddedSeries) and not X.aligned_with(Y):
        raise AlignmentError("X and Y are not aligned")
    Xd = X.data if isinstance(X, EmbeddedSeries) else np.asarray(X, dtype=float)
    Yd = Y.data if isinstance(Y, EmbeddedSeries) else np.asarray(Y, dtype=float)
    Yd = np.ascontiguousarray(Yd, dtype=np.float64)
    if len(Xd) != len(Yd):
        raise AlignmentError("X and Y have different lengths")
    if Yd.shape[1] != grid.m:
        raise ValueError("grid dimensionality differs from Y")
    if schedule.K > len(Xd) - 1:
        raise ValueError("K exceeds the number of available neighbors")
    steps = sorted(set(int(s) for s in snapshot_steps))
    if steps and (steps[0] < 0 or steps[-1] > schedule.N):
        raise ValueError("snapshot steps must lie in 0..N")

    out = grid if in_place else grid.copy()
    kern = _backend.get_kernels(backend)
    trace = TrainingTrace(snapshot_steps=steps, backend=backend or _backend.BACKEND)
    N = schedule.N
    if 0 in steps:
        trace.snapshots.append(out.centers.copy())
    if N == 0:
        return out, trace

    gen = generator(seed)
    seeds = gen.integers(0, len(Xd), N).astype(np.int64)
    neighbors, _ = NeighborIndex(Xd).knn_many(seeds, schedule.K, exclude_self=True)
    neighbors = np.ascontiguousarray(neighbors, dtype=np.int64)
    sigma1, sigma2, eps = schedule.arrays(np.arange(1, N + 1))

    bounds = [s for s in steps if s > 0]
    if not bounds or bounds[-1] != N:
        bounds.append(N)
    start = 0
    for stop in bounds:
        failed = kern.asom_train(out.centers, Yd, seeds[start:stop], neighbors[start:stop],
                                 sigma1[start:stop], sigma2[start:stop], eps[start:stop])
        if failed >= 0:
            raise NonFiniteCentersError(f"non-finite center after outer step {start + failed + 1}")
        if stop in steps:
            trace.snapshots.append(out.centers.copy())
        start = stop
    trace.outer_steps = N
    trace.updates = N * schedule.K
    return out, trace


@dataclass
class Readout:
    """Discrete driver estimate (winner column per test vector)."""

    levels: np.ndarray
    standardized: np.ndarray
    rows: np.ndarray
    distinct_levels: int
    warnings: list = field(default_factory=list)


def winners(grid, Y, backend=None):
    """Flat global-winner index ``i * n2 + j`` for every row of ``Y``."""
    Yd = Y.data if isinstance(Y, EmbeddedSeries) else np.ascontiguousarray(Y, dtype=np.float64)
    return _backend.get_kernels(backend).global_winners(grid.centers, Yd)


def readout(grid, Y_test, X_test=None, mode="winner", bundle_k=20, backend=None):
    """Read the driver estimate from a trained grid.

    ``mode="winner"`` reports the driver index of each vector's global
    winner. ``mode="bundle"`` additionally uses ``X_test``: the estimate at
    ``t`` is the median winner index over the ``bundle_k`` nearest neighbors
    of ``X_test[t]`` (itself included).

    Raises ``DegenerateSeriesError`` when all levels coincide.
    """
    w = winners(grid, Y_test, backend)
    rows = w // grid.n2
    levels = (w % grid.n2).astype(np.float64)
    if mode == "bundle":
        if X_test is None:
            raise ValueError("bundle readout needs X_test")
        nb, _ = NeighborIndex(X_test).knn_many(np.arange(len(levels)), bundle_k - 1, exclude_self=True)
        stacked = np.concatenate([levels[:, None], levels[nb]], axis=1)
        levels = np.median(stacked, axis=1)
    elif mode != "winner":
        raise ValueError("mode must be 'winner' or 'bundle'")
    distinct = int(np.unique(levels).size)
    notes = []
    if distinct < MIN_DISTINCT_LEVELS:
        msg = f"grid collapse suspected: only {distinct} distinct driver levels in readout"
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
        notes.append(msg)
    return Readout(levels, standardize(levels), rows, distinct, notes)


def save_grid(grid, path):
    lines = [f"{GRID_MAGIC} {GRID_VERSION} {grid.n1} {grid.n2} {grid.m}"]
    for i in range(grid.n1):
        for j in range(grid.n2):
            coords = " ".join("%.17g" % c for c in grid.centers[i, j])
            lines.append(f"{i} {j} {coords}")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def load_grid(path):
    with open(path, encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise GridFormatError("empty grid file")
    head = lines[0].split()
    if len(head) != 5 or head[0] != GRID_MAGIC:
        raise GridFormatError("missing 'ASOM <version> n1 n2 m' header")
    if head[1] != GRID_VERSION:
        raise GridFormatError(f"unsupported grid file version {head[1]!r}")
    try:
        n1, n2, m = (int(v) for v in head[2:])
    except ValueError as exc:
        raise GridFormatError("non-integer grid dimensions") from exc
    body = [ln for ln in lines[1:] if ln.strip()]
    if len(body) != n1 * n2:
        raise GridFormatError(f"expected {n1 * n2} node lines, found {len(body)}")
    centers = np.empty((n1, n2, m))
    for k, ln in enumerate(body):
        parts = ln.split()
        i, j = divmod(k, n2)
        if len(parts) != m + 2:
            raise GridFormatError(f"line {k + 2}: expected {m + 2} fields")
        try:
            if (int(parts[0]), int(parts[1])) != (i, j):
                raise GridFormatError(f"line {k + 2}: nodes out of row-major order")
            centers[i, j] = [float(v) for v in parts[2:]]
        except ValueError as exc:
            raise GridFormatError(f"line {k + 2}: unparsable number") from exc
    return SomGrid(centers)
