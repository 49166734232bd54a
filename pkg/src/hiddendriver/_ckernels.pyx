# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels; same contracts and operation order as ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport exp, floor, fabs, isfinite

cnp.import_array()

cdef enum:
    TENT_ARG_CLIP = 1
    TENT_ARG_WRAP = 2


cdef inline double _tent(double u, double a) nogil:
    if u < a:
        return u / a
    return 1.0 - (u - a) / (1.0 - a)


cdef inline double _tent_arg(double u, int mode) nogil:
    if mode == TENT_ARG_CLIP:
        if u < 0.0:
            return 0.0
        if u > 1.0:
            return 1.0
        return u
    if mode == TENT_ARG_WRAP:
        return u - floor(u)
    return u


cdef inline bint _logistic_bad(double v) nogil:
    return not (-1.0 <= v <= 2.0)


def logistic_triad(params, state, double[:, ::1] noise, bint literal, Py_ssize_t burn, double[:, ::1] out):
    cdef double rz = params[0], rx = params[1], ry = params[2], bx = params[3], by = params[4]
    cdef double z = state[0], x = state[1], y = state[2]
    cdef double nz, nx, ny
    cdef Py_ssize_t n = out.shape[0], t
    cdef Py_ssize_t failed = -1
    with nogil:
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
                failed = t
                break
            if t >= burn:
                out[t - burn, 0] = z
                out[t - burn, 1] = x
                out[t - burn, 2] = y
    return failed


def logistic_pair(params, state, bint literal, Py_ssize_t burn, double[:, ::1] out):
    cdef double r = params[0], bf = params[1], bb = params[2]
    cdef double x = state[0], y = state[1]
    cdef double nx, ny
    cdef Py_ssize_t n = out.shape[0], t
    cdef Py_ssize_t failed = -1
    with nogil:
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
                failed = t
                break
            if t >= burn:
                out[t - burn, 0] = x
                out[t - burn, 1] = y
    return failed


def tent_triad(params, state, int arg_mode, Py_ssize_t burn, double[:, ::1] out):
    cdef double az = params[0], ax = params[1], ay = params[2], bx = params[3], by = params[4]
    cdef double z = state[0], x = state[1], y = state[2]
    cdef double nz, nx, ny
    cdef Py_ssize_t n = out.shape[0], t
    cdef Py_ssize_t failed = -1
    with nogil:
        for t in range(burn + n):
            nz = _tent(z, az)
            nx = _tent(_tent_arg(x + bx * z, arg_mode), ax)
            ny = _tent(_tent_arg(y + by * z, arg_mode), ay)
            z = nz
            x = nx
            y = ny
            if not (fabs(z) <= 10.0 and fabs(x) <= 10.0 and fabs(y) <= 10.0):
                failed = t
                break
            if t >= burn:
                out[t - burn, 0] = z
                out[t - burn, 1] = x
                out[t - burn, 2] = y
    return failed


def asom_train(double[:, :, ::1] centers, double[:, ::1] Y, cnp.int64_t[::1] seeds,
               cnp.int64_t[:, ::1] neighbors, double[::1] sigma1, double[::1] sigma2,
               double[::1] eps):
    cdef Py_ssize_t n1 = centers.shape[0], n2 = centers.shape[1], m = centers.shape[2]
    cdef Py_ssize_t n_outer = seeds.shape[0], n_inner = neighbors.shape[1]
    cdef Py_ssize_t s, q, i, j, c, jstar, ia, row
    cdef double best, d, diff, s1sq, s2sq, w, ew
    cdef double[::1] wi = np.empty(n1)
    cdef double[::1] wj = np.empty(n2)
    cdef Py_ssize_t failed = -1
    with nogil:
        for s in range(n_outer):
            row = seeds[s]
            best = 0.0
            jstar = 0
            for i in range(n1):
                for j in range(n2):
                    d = 0.0
                    for c in range(m):
                        diff = centers[i, j, c] - Y[row, c]
                        d = d + diff * diff
                    if (i == 0 and j == 0) or d < best:
                        best = d
                        jstar = j
            s1sq = sigma1[s] * sigma1[s]
            s2sq = sigma2[s] * sigma2[s]
            for j in range(n2):
                wj[j] = exp(-(<double>(j - jstar) * <double>(j - jstar)) / s2sq)
            for q in range(n_inner):
                row = neighbors[s, q]
                best = 0.0
                ia = 0
                for i in range(n1):
                    d = 0.0
                    for c in range(m):
                        diff = centers[i, jstar, c] - Y[row, c]
                        d = d + diff * diff
                    if i == 0 or d < best:
                        best = d
                        ia = i
                for i in range(n1):
                    wi[i] = exp(-(<double>(i - ia) * <double>(i - ia)) / s1sq)
                for i in range(n1):
                    ew = eps[s] * wi[i]
                    for j in range(n2):
                        w = ew * wj[j]
                        for c in range(m):
                            centers[i, j, c] = centers[i, j, c] + w * (Y[row, c] - centers[i, j, c])
            for i in range(n1):
                for j in range(n2):
                    for c in range(m):
                        if not isfinite(centers[i, j, c]):
                            failed = s
            if failed >= 0:
                break
    return failed


def global_winners(double[:, :, ::1] centers, double[:, ::1] Y):
    cdef Py_ssize_t n1 = centers.shape[0], n2 = centers.shape[1], m = centers.shape[2]
    cdef Py_ssize_t T = Y.shape[0], t, i, j, c, win
    cdef double best, d, diff
    out = np.empty(T, dtype=np.int64)
    cdef cnp.int64_t[::1] res = out
    with nogil:
        for t in range(T):
            best = 0.0
            win = 0
            for i in range(n1):
                for j in range(n2):
                    d = 0.0
                    for c in range(m):
                        diff = centers[i, j, c] - Y[t, c]
                        d = d + diff * diff
                    if (i == 0 and j == 0) or d < best:
                        best = d
                        win = i * n2 + j
            res[t] = win
    return out
