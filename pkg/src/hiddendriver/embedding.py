"""Delay embedding, joint observations and standardization."""

from dataclasses import dataclass

import numpy as np

from .errors import AlignmentError, DegenerateSeriesError, SeriesTooShortError
from .rng import generator

DEFAULT_JOINT_A = float(np.sqrt(29.0 / 31.0))


@dataclass
class EmbeddedSeries:
    """Delay vectors of a scalar series.

    Row ``r`` holds ``[s(t0+r), s(t0+r+tau), ..., s(t0+r+(m-1)*tau)]``.
    """

    data: np.ndarray
    m: int
    tau: int
    t0: int = 0

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.float64)
        if self.data.ndim != 2 or self.data.shape[1] != self.m:
            raise ValueError(f"data must have shape (T, {self.m})")

    def __len__(self):
        return self.data.shape[0]

    @property
    def times(self):
        return np.arange(self.t0, self.t0 + len(self))

    def aligned_with(self, other):
        return (self.m == other.m and self.tau == other.tau and self.t0 == other.t0
                and len(self) == len(other))

    def with_data(self, data):
        return EmbeddedSeries(data, self.m, self.tau, self.t0)


def delay_embed(series, m, tau=1, t0=0):
    """Embed ``series`` with dimension ``m`` and delay ``tau`` (forward delays).

    ``t0`` is recorded as the source index of the first row; pass it when
    ``series`` is a slice of a longer recording.
    """
    if m < 1 or tau < 1:
        raise ValueError("m and tau must be at least 1")
    s = np.asarray(series, dtype=np.float64).ravel()
    span = (m - 1) * tau
    if len(s) < span + 1:
        raise SeriesTooShortError(f"need at least {span + 1} samples for m={m}, tau={tau}; got {len(s)}")
    n = len(s) - span
    data = np.empty((n, m))
    for c in range(m):
        data[:, c] = s[c * tau:c * tau + n]
    return EmbeddedSeries(data, m, tau, t0)


def _check_pair(X, Y):
    if not X.aligned_with(Y):
        raise AlignmentError("embedded series differ in m, tau, start index or length")


def joint_embed(X, Y, a=DEFAULT_JOINT_A):
    """Rowwise joint observation ``X + a*Y``."""
    _check_pair(X, Y)
    if not a > 0:
        raise ValueError("mixing constant must be positive")
    return X.with_data(X.data + a * Y.data)


def time_permute_joint(X, Y, a=DEFAULT_JOINT_A, seed=0, permutation=None):
    """Joint observation with the rows of ``Y`` shuffled in time.

    Whole delay vectors are permuted, so each marginal manifold keeps its
    geometry while the pairing between ``X`` and ``Y`` is destroyed.
    ``permutation`` overrides the seeded draw (mainly for tests).
    """
    _check_pair(X, Y)
    if not a > 0:
        raise ValueError("mixing constant must be positive")
    if permutation is None:
        permutation = generator(seed).permutation(len(Y))
    else:
        permutation = np.asarray(permutation)
        if sorted(permutation.tolist()) != list(range(len(Y))):
            raise ValueError("permutation must be a rearrangement of 0..T'-1")
    return X.with_data(X.data + a * Y.data[permutation])


def standardize(series):
    """Zero mean, unit population standard deviation."""
    s = np.asarray(series, dtype=np.float64).ravel()
    if len(s) < 2:
        raise SeriesTooShortError("standardize needs at least 2 samples")
    sd = s.std()
    if not sd > 0:
        raise DegenerateSeriesError("cannot standardize a constant series")
    return (s - s.mean()) / sd
