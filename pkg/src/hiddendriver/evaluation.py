"""Correlation metrics, lag scans and batch summaries."""

from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegenerateSeriesError, SeriesTooShortError

# A readout with at most 20 discrete levels cannot correlate with a
# continuous driver beyond this value; anything higher signals a bug.
RHO_CEILING = 0.975


def _pair(a, b):
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if len(a) != len(b):
        raise ValueError("series differ in length")
    if len(a) < 2:
        raise SeriesTooShortError("need at least 2 samples")
    return a, b


def pearson(a, b):
    """Pearson correlation; raises ``DegenerateSeriesError`` on constant input."""
    a, b = _pair(a, b)
    da, db = a - a.mean(), b - b.mean()
    sa, sb = np.sqrt(da @ da), np.sqrt(db @ db)
    if not (sa > 0 and sb > 0):
        raise DegenerateSeriesError("correlation of a constant series is undefined")
    return float(np.clip((da @ db) / (sa * sb), -1.0, 1.0))


def cross_correlation(a, b, max_lag):
    """Correlation of ``a[t]`` with ``b[t + lag]`` for every lag in ``[-max_lag, max_lag]``.

    A positive lag therefore means ``b`` trails ``a``. Lags whose overlap is
    constant in either series are skipped.

    Returns
    -------
    rhos : dict
        ``lag -> rho``.
    best_lag : int
        Lag with the largest ``|rho|`` (the smaller ``|lag|`` wins ties, then
        the negative one).
    """
    a, b = _pair(a, b)
    n = len(a)
    if not 0 <= max_lag < n / 2:
        raise ValueError("max_lag must satisfy 0 <= max_lag < len/2")
    rhos = {}
    for lag in range(-max_lag, max_lag + 1):
        sa = a[max(0, -lag):n - max(0, lag)]
        sb = b[max(0, lag):n - max(0, -lag)]
        try:
            rhos[lag] = pearson(sa, sb)
        except DegenerateSeriesError:
            continue
    if not rhos:
        raise DegenerateSeriesError("no lag has a non-constant overlap")
    best = max(rhos, key=lambda k: (abs(rhos[k]), -abs(k), -k))
    return rhos, best


@dataclass
class EvaluationReport:
    rho: float
    abs_rho: float
    best_lag: int
    best_lag_rho: float
    n: int
    exceeds_ceiling: bool = False

    def to_dict(self):
        return asdict(self)


def evaluate(estimate, truth, max_lag=10):
    """Compare a driver estimate with the true driver.

    ``exceeds_ceiling`` flags ``|rho| > 0.975``, which a 20-level readout
    should not reach.
    """
    rho = pearson(estimate, truth)
    n = len(np.ravel(estimate))
    rhos, best = cross_correlation(estimate, truth, min(max_lag, (n - 1) // 2))
    return EvaluationReport(rho, abs(rho), best, rhos[best], n, abs(rho) > RHO_CEILING)


@dataclass
class BatchSummary:
    values: list
    median: float
    q1: float
    q3: float
    mad: float
    outliers: list = field(default_factory=list)

    @property
    def n(self):
        return len(self.values)

    def to_dict(self):
        d = asdict(self)
        d["n"] = self.n
        return d


def batch_summary(abs_rhos):
    """Median, type-7 quartiles, median absolute deviation (unscaled) and
    the values outside ``[Q1 - 1.5 IQR, Q3 + 1.5 IQR]``."""
    v = np.asarray(list(abs_rhos), dtype=np.float64)
    if v.size == 0:
        raise ValueError("batch_summary needs at least one value")
    med = float(np.median(v))
    q1, q3 = (float(q) for q in np.percentile(v, [25, 75], method="linear"))
    iqr = q3 - q1
    mad = float(np.median(np.abs(v - med)))
    outliers = [float(x) for x in v if x < q1 - 1.5 * iqr or x > q3 + 1.5 * iqr]
    return BatchSummary([float(x) for x in v], med, q1, q3, mad, outliers)
