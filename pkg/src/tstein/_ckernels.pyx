# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled grid kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
from libc.math cimport floor


cdef inline double _cubic(double x0, double dx, const double[::1] v, Py_ssize_t n,
                          double xmax, double x) nogil:
    cdef double pos, tau
    cdef Py_ssize_t i
    if x <= x0:
        return v[0]
    if x >= xmax:
        return v[n - 1]
    pos = (x - x0) / dx
    i = <Py_ssize_t> floor(pos)
    if i < 1:
        i = 1
    elif i > n - 3:
        i = n - 3
    tau = pos - i
    return (-tau * (tau - 1.0) * (tau - 2.0) / 6.0 * v[i - 1]
            + (tau + 1.0) * (tau - 1.0) * (tau - 2.0) / 2.0 * v[i]
            - (tau + 1.0) * tau * (tau - 2.0) / 2.0 * v[i + 1]
            + (tau + 1.0) * tau * (tau - 1.0) / 6.0 * v[i + 2])


def cubic_eval(double x0, double dx, values, xs):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    xs_arr = np.asarray(xs, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(xs_arr.ravel())
    cdef Py_ssize_t n = v.shape[0], m = x.shape[0], i
    cdef double xmax = x0 + (n - 1) * dx
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            o[i] = _cubic(x0, dx, v, n, xmax, x[i])
    return out.reshape(xs_arr.shape)


def shifted_sum(double x0, double dx, values, xs, shifts, weights):
    cdef const double[::1] v = np.ascontiguousarray(values, dtype=np.float64)
    cdef const double[::1] x = np.ascontiguousarray(np.asarray(xs, dtype=np.float64).ravel())
    cdef const double[::1] s = np.ascontiguousarray(shifts, dtype=np.float64)
    cdef const double[::1] w = np.ascontiguousarray(weights, dtype=np.float64)
    cdef Py_ssize_t n = v.shape[0], m = x.shape[0], q = s.shape[0], i, k
    cdef double xmax = x0 + (n - 1) * dx, acc
    out = np.empty(m)
    cdef double[::1] o = out
    with nogil:
        for i in range(m):
            acc = 0.0
            for k in range(q):
                acc = acc + w[k] * _cubic(x0, dx, v, n, xmax, x[i] + s[k])
            o[i] = acc
    return out
