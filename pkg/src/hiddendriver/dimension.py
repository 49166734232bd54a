"""Intrinsic-dimension estimates and the causal-relation classifier.

The local estimate at a point compares the distances to its k-th and 2k-th
nearest neighbors, ``ln 2 / ln(R_2k / R_k)``; the global estimate is the
median over points, averaged over a range of k.
"""

from dataclasses import dataclass, field
from enum import Enum
import math

import numpy as np

from .embedding import DEFAULT_JOINT_A, EmbeddedSeries, delay_embed, joint_embed, time_permute_joint
from .errors import InsufficientEstimatesError, UnsupportedShapeError
from .neighbors import NeighborIndex

MIN_VALID_ESTIMATES = 10
DEFAULT_TOL = 0.15


class Relation(str, Enum):
    X_TO_Y = "X->Y"
    CIRCULAR = "X<->Y"
    Y_TO_X = "X<-Y"
    HIDDEN_DRIVER = "hidden-common-driver"
    INDEPENDENT = "independent"
    UNDECIDED = "undecided"


def _index(points):
    return points if isinstance(points, NeighborIndex) else NeighborIndex(points)


def _local_from_distances(r_k, r_2k):
    valid = (r_k > 0) & (r_2k > r_k)
    with np.errstate(divide="ignore", invalid="ignore"):
        d = np.log(2.0) / np.log(r_2k / r_k)
    return np.where(valid, d, np.nan)


def local_dimension(index, t, k):
    """Local dimension at row ``t``; ``nan`` when the two radii coincide."""
    if 2 * k + 1 > len(index):
        raise ValueError("need at least 2k+1 points")
    nb = index.knn(t, 2 * k, exclude_self=True)
    r_k, r_2k = nb[k - 1][1], nb[2 * k - 1][1]
    return float(_local_from_distances(np.array([r_k]), np.array([r_2k]))[0])


def local_dimensions(points, k, distances=None):
    """Local estimates at every row; invalid rows are ``nan``."""
    if distances is None:
        index = _index(points)
        if 2 * k + 1 > len(index):
            raise ValueError("need at least 2k+1 points")
        distances = index.neighbor_distances(2 * k)
    return _local_from_distances(distances[:, k - 1], distances[:, 2 * k - 1])


def global_dimension(points, k, distances=None):
    """Median of the valid local estimates."""
    local = local_dimensions(points, k, distances)
    valid = local[np.isfinite(local)]
    if valid.size < MIN_VALID_ESTIMATES:
        raise InsufficientEstimatesError(f"only {valid.size} valid local estimates")
    return float(np.median(valid))


def dimension_curve(points, k_min=10, k_max=20):
    """Global estimate for every integer k in ``[k_min, k_max]`` as a dict."""
    if not k_max >= k_min >= 2:
        raise ValueError("require k_max >= k_min >= 2")
    index = _index(points)
    if 2 * k_max + 1 > len(index):
        raise ValueError("need at least 2*k_max+1 points")
    distances = index.neighbor_distances(2 * k_max)
    return {k: global_dimension(None, k, distances) for k in range(k_min, k_max + 1)}


def summarize_curve(curve):
    """``(mean, sample SD)`` of a per-k curve; SD is 0 for a single k."""
    vals = np.array(list(curve.values()), dtype=float)
    spread = float(vals.std(ddof=1)) if vals.size > 1 else 0.0
    return float(vals.mean()), spread


def dimension_over_k_range(points, k_min=10, k_max=20):
    """Mean global dimension over k in ``[k_min, k_max]`` and its spread across k."""
    return summarize_curve(dimension_curve(points, k_min, k_max))


def mutual_dimension(d_x, d_y, d_j):
    """Dimension shared by the two systems: ``d_x + d_y - d_j``."""
    return d_x + d_y - d_j


def classify_relation(d_x, d_y, d_j, d_i, tol=DEFAULT_TOL):
    """Label the causal relation from the four dimension estimates.

    hidden driver
        ``d_j > max(d_x, d_y) + tol`` and ``d_i > d_j + tol``
    independent
        ``d_j > max + tol`` and ``|d_j - d_i| <= tol``
    direct coupling
        ``|d_j - max| <= tol``; the lower-dimensional system drives the other,
        equal dimensions (within ``tol``) mean circular coupling.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    top = max(d_x, d_y)
    if d_j > top + tol:
        if d_i > d_j + tol:
            return Relation.HIDDEN_DRIVER
        if abs(d_j - d_i) <= tol:
            return Relation.INDEPENDENT
        return Relation.UNDECIDED
    if abs(d_j - top) <= tol:
        if d_y >= d_x + tol:
            return Relation.X_TO_Y
        if d_x >= d_y + tol:
            return Relation.Y_TO_X
        if abs(d_x - d_y) <= tol:
            return Relation.CIRCULAR
    return Relation.UNDECIDED


@dataclass(frozen=True)
class SomShape:
    self_dims: int
    driver_dims: int
    n1: int
    n2: int


def _round_positive(v):
    return max(1, int(math.floor(v + 0.5)))


def som_shape_from_dims(d_y, d_z, nodes_self=40, nodes_driver=20):
    """Grid layout from the observed and shared dimensions.

    Only the 1+1 layout (one self-dynamics axis, one driver axis) is supported.
    """
    if not (d_y >= d_z > 0):
        raise ValueError(f"require d_y >= d_z > 0, got d_y={d_y}, d_z={d_z}")
    driver = _round_positive(d_z)
    self_dims = _round_positive(d_y - d_z)
    if (self_dims, driver) != (1, 1):
        raise UnsupportedShapeError(
            f"derived SOM shape {self_dims}+{driver} is unsupported; only 1+1 grids are implemented")
    return SomShape(self_dims, driver, nodes_self, nodes_driver)


@dataclass
class DimensionReport:
    d_x: float
    d_y: float
    d_j: float
    d_i: float
    spread_x: float
    spread_y: float
    spread_j: float
    spread_i: float
    d_z: float
    relation: Relation
    per_k_curves: dict = field(default_factory=dict)
    m: int = 4
    tau: int = 1
    k_min: int = 10
    k_max: int = 20
    tol: float = DEFAULT_TOL

    def to_dict(self):
        return {
            "estimates": {"D_X": self.d_x, "D_Y": self.d_y, "D_J": self.d_j, "D_I": self.d_i, "D_Z": self.d_z},
            "spread_across_k": {"D_X": self.spread_x, "D_Y": self.spread_y, "D_J": self.spread_j,
                                "D_I": self.spread_i},
            "relation": self.relation.value,
            "per_k_curves": {name: {str(k): v for k, v in curve.items()}
                             for name, curve in self.per_k_curves.items()},
            "settings": {"m": self.m, "tau": self.tau, "k_min": self.k_min, "k_max": self.k_max,
                         "tol": self.tol},
        }


def analyze_dimensions(x, y, m=4, tau=1, k_min=10, k_max=20, a=DEFAULT_JOINT_A, seed=0,
                       tol=DEFAULT_TOL):
    """Embed ``x`` and ``y``, estimate D_X, D_Y, D_J, D_I and classify the relation."""
    X = x if isinstance(x, EmbeddedSeries) else delay_embed(x, m, tau)
    Y = y if isinstance(y, EmbeddedSeries) else delay_embed(y, m, tau)
    J = joint_embed(X, Y, a)
    I = time_permute_joint(X, Y, a, seed)
    curves = {name: dimension_curve(P, k_min, k_max) for name, P in
              (("X", X), ("Y", Y), ("J", J), ("I", I))}
    (dx, sx), (dy, sy), (dj, sj), (di, si) = (summarize_curve(curves[n]) for n in "XYJI")
    return DimensionReport(
        d_x=dx, d_y=dy, d_j=dj, d_i=di, spread_x=sx, spread_y=sy, spread_j=sj, spread_i=si,
        d_z=mutual_dimension(dx, dy, dj), relation=classify_relation(dx, dy, dj, di, tol),
        per_k_curves=curves, m=X.m, tau=X.tau, k_min=k_min, k_max=k_max, tol=tol)
