"""Seeded random streams.

Every random draw in the package goes through :func:`generator`, which wraps
numpy's PCG64 bit generator. Gaussian variates are produced with the
Box-Muller transform from PCG64 uniforms so that the normal stream does not
depend on numpy's internal ziggurat tables.

Per-stage seeds are derived from a master seed with :func:`derive_seed`::

    state = master
    for label in labels:
        state = splitmix64(state ^ crc32(label))

where integer labels are formatted with ``str`` first.
"""

import zlib

import numpy as np

_MASK64 = (1 << 64) - 1


def splitmix64(x):
    """One step of the SplitMix64 output function on a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_seed(master, *labels):
    """Derive a reproducible 64-bit child seed from ``master`` and stage labels."""
    state = int(master) & _MASK64
    for label in labels:
        state = splitmix64(state ^ zlib.crc32(str(label).encode("utf-8")))
    return state


def generator(seed):
    """Return a ``numpy.random.Generator`` on PCG64 seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


def box_muller(gen, n):
    """Draw ``n`` standard normal variates using the Box-Muller transform."""
    pairs = (n + 1) // 2
    u = gen.random((pairs, 2))
    # 1 - U lies in (0, 1], so the log is finite
    radius = np.sqrt(-2.0 * np.log(1.0 - u[:, 0]))
    angle = 2.0 * np.pi * u[:, 1]
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:n]
