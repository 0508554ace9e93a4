# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled root continuation kernel; mirrors ``_pytrack`` step for step."""

import numpy as np
from libc.math cimport INFINITY

cdef extern from "complex.h" nogil:
    double cabs(double complex)

DEF OK = 0
DEF AMBIGUOUS = 1
DEF NO_CONVERGENCE = 2
DEF COLLISION = 3
DEF MAXITER = 100
DEF NOISE = 16 * 2.220446049250313e-16


cdef void _fibre(const double complex[:, :] coeffs, double complex z, double complex[:] out) nogil:
    cdef Py_ssize_t i, j, n = coeffs.shape[0], m = coeffs.shape[1]
    cdef double complex acc
    out[0] = 1.0
    for i in range(n):
        acc = 0
        for j in range(m - 1, -1, -1):
            acc = acc * z + coeffs[i, j]
        out[i + 1] = acc


cdef bint _aberth(double complex[:] c, double complex[:] w) nogil:
    cdef Py_ssize_t n = w.shape[0], i, j, k, it
    cdef double complex x, p, dp, ratio, s, d, denom, corr
    cdef double worst, err, ax, mag
    for it in range(MAXITER):
        worst = 0.0
        for i in range(n):
            x = w[i]
            p = c[0]
            dp = 0
            ax = cabs(x)
            mag = cabs(c[0])
            for k in range(1, n + 1):
                dp = dp * x + p
                p = p * x + c[k]
                mag = mag * ax + cabs(c[k])
            if cabs(p) <= NOISE * mag:
                continue
            if dp == 0:
                ratio = p
            else:
                ratio = p / dp
            s = 0
            for j in range(n):
                if j != i:
                    d = x - w[j]
                    if d != 0:
                        s = s + 1.0 / d
            denom = 1.0 - ratio * s
            if denom != 0:
                corr = ratio / denom
            else:
                corr = ratio
            w[i] = x - corr
            err = cabs(corr) / (1.0 + cabs(w[i]))
            if err > worst:
                worst = err
        if worst <= 1e-14:
            return True
    return False


cdef bint _match(double complex[:] prev, double complex[:] new, Py_ssize_t[:] perm, char[:] used) nogil:
    cdef Py_ssize_t n = prev.shape[0], i, j, arg
    cdef double best, second, d
    for j in range(n):
        used[j] = 0
    for i in range(n):
        best = INFINITY
        second = INFINITY
        arg = -1
        for j in range(n):
            d = cabs(new[j] - prev[i])
            if d < best:
                second = best
                best = d
                arg = j
            elif d < second:
                second = d
        if n > 1 and not (second >= 2.0 * best):
            return False
        if used[arg]:
            return False
        used[arg] = 1
        perm[i] = arg
    return True


cdef double _min_gap(double complex[:] w) nogil:
    cdef Py_ssize_t n = w.shape[0], i, j
    cdef double gap = INFINITY, d
    for i in range(n):
        for j in range(i + 1, n):
            d = cabs(w[i] - w[j])
            if d < gap:
                gap = d
    return gap


cdef class _Tracker:
    cdef const double complex[:, :] coeffs
    cdef double gap_tol
    cdef int max_depth
    cdef public long steps
    cdef public double min_gap
    cdef double complex[:] c
    cdef Py_ssize_t[:] perm
    cdef char[:] used

    def __init__(self, coeffs, double gap_tol, int max_depth):
        self.coeffs = coeffs
        self.gap_tol = gap_tol
        self.max_depth = max_depth
        self.steps = 0
        self.min_gap = INFINITY
        n = coeffs.shape[0]
        self.c = np.empty(n + 1, dtype=complex)
        self.perm = np.empty(n, dtype=np.intp)
        self.used = np.empty(n, dtype=np.int8)

    cdef int step(self, double complex z0, double complex z1, double complex[:] roots, int depth):
        # on success roots is overwritten in place
        cdef Py_ssize_t n = roots.shape[0], i
        cdef double complex[:] w = np.empty(n, dtype=complex)
        cdef double complex[:] saved
        cdef bint converged, matched
        cdef double gap
        cdef int status
        cdef double complex mid
        for i in range(n):
            w[i] = roots[i]
        _fibre(self.coeffs, z1, self.c)
        converged = _aberth(self.c, w)
        matched = converged and _match(roots, w, self.perm, self.used)
        if matched:
            gap = _min_gap(w)
            if gap < self.min_gap:
                self.min_gap = gap
            if gap < self.gap_tol:
                return COLLISION
            self.steps += 1
            for i in range(n):
                roots[i] = w[self.perm[i]]
            return OK
        if depth >= self.max_depth:
            return AMBIGUOUS if converged else NO_CONVERGENCE
        mid = 0.5 * (z0 + z1)
        saved = np.empty(n, dtype=complex)
        for i in range(n):
            saved[i] = roots[i]
        status = self.step(z0, mid, saved, depth + 1)
        if status != OK:
            return status
        status = self.step(mid, z1, saved, depth + 1)
        if status != OK:
            return status
        for i in range(n):
            roots[i] = saved[i]
        return OK


def track_path(coeffs, path, roots0, double gap_tol=1e-9, int max_depth=12):
    """Continue ``roots0`` (valid at ``path[0]``) along the polyline ``path``.

    Returns ``(roots, status, min_gap, steps)`` where ``roots[i]`` is the
    continuation of ``roots0[i]``.
    """
    cdef double complex[:, :] cf = np.ascontiguousarray(coeffs, dtype=complex)
    cdef double complex[:] pts = np.ascontiguousarray(path, dtype=complex)
    cdef double complex[:] roots = np.array(roots0, dtype=complex)
    cdef Py_ssize_t k
    cdef int status
    tracker = _Tracker(cf, gap_tol, max_depth)
    if roots.shape[0] > 1:
        tracker.min_gap = _min_gap(roots)
    for k in range(1, pts.shape[0]):
        status = (<_Tracker>tracker).step(pts[k - 1], pts[k], roots, 0)
        if status != OK:
            return None, status, tracker.min_gap, tracker.steps
    return [complex(r) for r in roots], OK, tracker.min_gap, tracker.steps
