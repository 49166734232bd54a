"""Pure-Python kernels.

Reference implementation of the hot loops; ``_ckernels.pyx`` mirrors every
function here with the same signature and the same floating-point operation
order. Return conventions: simulation kernels return ``-1`` on success or the
step index at which the state left its domain; ``asom_train`` returns ``-1``
or the outer step at which a center became non-finite.
"""

import math

import numpy as np

TENT_ARG_NONE = 0
TENT_ARG_CLIP = 1
TENT_ARG_WRAP = 2


def tent(u, a):
    if u < a:
        return u / a
    return 1.0 - (u - a) / (1.0 - a)


def _tent_arg(u, mode):
    if mode == TENT_ARG_CLIP:
        if u < 0.0:
            return 0.0
        if u > 1.0:
            return 1.0
        return u
    if mode == TENT_ARG_WRAP:
        return u - math.floor(u)
    return u


def _logistic_bad(v):
    return not (-1.0 <= v <= 2.0)


def logistic_triad(params, state, noise, literal, burn, out):
    rz, rx, ry, bx, by = params
    z, x, y = state
    n = out.shape[0]
    for t in range(burn + n):
        if literal:
            nz = rz * z * (1.0 - z)
            nx = rx * x * (1.0 - x - bx * z)
            ny = ry * y * (1.0 - y - by * z)
        else:
            nz = z * (rz - rz * z)
            nx = x * (rx - rx * x - bx * z)
            ny = y * (ry - ry * y - by * z)
        z = nz + noise[t, 0]
        x = nx + noise[t, 1]
        y = ny + noise[t, 2]
        if _logistic_bad(z) or _logistic_bad(x) or _logistic_bad(y):
            return t
        if t >= burn:
            out[t - burn, 0] = z
            out[t - burn, 1] = x
            out[t - burn, 2] = y
    return -1


def logistic_pair(params, state, literal, burn, out):
    r, bf, bb = params
    x, y = state
    n = out.shape[0]
    for t in range(burn + n):
        if literal:
            nx = r * x * (1.0 - x - bb * y)
            ny = r * y * (1.0 - y - bf * x)
        else:
            nx = x * (r - r * x - bb * y)
            ny = y * (r - r * y - bf * x)
        x = nx
        y = ny
        if _logistic_bad(x) or _logistic_bad(y):
            return t
        if t >= burn:
            out[t - burn, 0] = x
            out[t - burn, 1] = y
    return -1


def tent_triad(params, state, arg_mode, burn, out):
    az, ax, ay, bx, by = params
    z, x, y = state
    n = out.shape[0]
    for t in range(burn + n):
        nz = tent(z, az)
        nx = tent(_tent_arg(x + bx * z, arg_mode), ax)
        ny = tent(_tent_arg(y + by * z, arg_mode), ay)
        z, x, y = nz, nx, ny
        if not (abs(z) <= 10.0 and abs(x) <= 10.0 and abs(y) <= 10.0):
            return t
        if t >= burn:
            out[t - burn, 0] = z
            out[t - burn, 1] = x
            out[t - burn, 2] = y
    return -1


def asom_train(centers, Y, seeds, neighbors, sigma1, sigma2, eps):
    n1, n2, m = centers.shape
    flat = centers.reshape(n1 * n2, m)
    ii = np.arange(n1, dtype=np.float64)
    jj = np.arange(n2, dtype=np.float64)
    for s in range(seeds.shape[0]):
        y = Y[seeds[s]]
        jstar = int(np.argmin(((flat - y) ** 2).sum(axis=1))) % n2
        s1sq = sigma1[s] * sigma1[s]
        s2sq = sigma2[s] * sigma2[s]
        wj = np.exp(-((jj - jstar) * (jj - jstar)) / s2sq)
        for t in neighbors[s]:
            yk = Y[t]
            col = centers[:, jstar, :]
            ia = int(np.argmin(((col - yk) ** 2).sum(axis=1)))
            wi = np.exp(-((ii - ia) * (ii - ia)) / s1sq)
            w = (eps[s] * wi)[:, None] * wj[None, :]
            centers += w[:, :, None] * (yk - centers)
        if not np.isfinite(centers).all():
            return s
    return -1


def global_winners(centers, Y, chunk=512):
    n1, n2, m = centers.shape
    flat = centers.reshape(n1 * n2, m)
    out = np.empty(Y.shape[0], dtype=np.int64)
    for start in range(0, Y.shape[0], chunk):
        block = Y[start:start + chunk]
        d = ((block[:, None, :] - flat[None, :, :]) ** 2).sum(axis=2)
        out[start:start + chunk] = np.argmin(d, axis=1)
    return out
