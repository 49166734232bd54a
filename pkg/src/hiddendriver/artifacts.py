"""CSV and JSON artifact readers and writers.

Floats are written with ``%.17g`` so every value round-trips exactly.
"""

import csv
import json

import numpy as np

EVALUATION_COLUMNS = ("run_id", "method", "abs_rho", "best_lag", "best_lag_rho", "seed")


def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return "%.17g" % v
    return str(v)


def write_table(path, columns, rows):
    """Write ``rows`` (iterables aligned with ``columns``) as CSV."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            w.writerow([fmt(v) for v in row])


def write_columns(path, columns):
    """Write a dict of equal-length 1-D arrays as CSV columns."""
    names = list(columns)
    arrays = [np.asarray(columns[n]) for n in names]
    write_table(path, names, zip(*arrays))


def read_table(path):
    """Read a CSV into ``{column: list of str}``."""
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path} is empty") from None
        cols = {h: [] for h in header}
        for line in reader:
            if not line:
                continue
            if len(line) != len(header):
                raise ValueError(f"{path}: row has {len(line)} fields, expected {len(header)}")
            for h, v in zip(header, line):
                cols[h].append(v)
    return cols


def read_numeric(path):
    """Read a CSV into ``{column: float array}``."""
    return {k: np.array([float(v) for v in vals]) for k, vals in read_table(path).items()}


def write_series(path, sim):
    """Ground-truth and observed series with header ``t,z,x,y``."""
    z = sim.z if sim.z is not None else np.full(len(sim.x), np.nan)
    write_columns(path, {"t": np.arange(len(sim.x)), "z": z, "x": sim.x, "y": sim.y})


def read_series(path):
    cols = read_numeric(path)
    missing = {"x", "y"} - set(cols)
    if missing:
        raise ValueError(f"{path}: missing columns {sorted(missing)}")
    return cols


def write_embedded(path, embedded):
    cols = {"t": embedded.times}
    for c in range(embedded.m):
        cols[f"dim{c}"] = embedded.data[:, c]
    write_columns(path, cols)


def write_evaluation(path, rows):
    """Rows are dicts keyed by :data:`EVALUATION_COLUMNS`."""
    write_table(path, EVALUATION_COLUMNS, ([r[c] for c in EVALUATION_COLUMNS] for r in rows))


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
