# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: discrete Legendre transform and sliding window filters.

Bit-compatible with bipot._kernels._fallback; see that module for contracts.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY


cdef void _lf_row(const double* xs, const double* v, Py_ssize_t n,
                  const double* ys, Py_ssize_t m,
                  double* out, Py_ssize_t* hull) noexcept nogil:
    cdef Py_ssize_t k = 0, i, j, p, i1, i2
    cdef double cross, t, t2, vi, y
    for i in range(n):
        vi = v[i]
        if vi == INFINITY:
            continue
        while k >= 2:
            i1 = hull[k - 2]
            i2 = hull[k - 1]
            cross = (xs[i2] - xs[i1]) * (vi - v[i1]) \
                - (xs[i] - xs[i1]) * (v[i2] - v[i1])
            if cross <= 0.0:
                k -= 1
            else:
                break
        hull[k] = i
        k += 1
    if k == 0:
        for j in range(m):
            out[j] = -INFINITY
        return
    p = 0
    for j in range(m):
        y = ys[j]
        t = xs[hull[p]] * y - v[hull[p]]
        while p + 1 < k:
            t2 = xs[hull[p + 1]] * y - v[hull[p + 1]]
            if t2 >= t:
                p += 1
                t = t2
            else:
                break
        out[j] = t


def lf_transform(xs, vals, ys, out=None):
    cdef cnp.ndarray[double, ndim=1, mode="c"] xs_ = \
        np.ascontiguousarray(xs, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] vals_ = \
        np.ascontiguousarray(vals, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1, mode="c"] ys_ = \
        np.ascontiguousarray(ys, dtype=np.float64)
    cdef Py_ssize_t B = vals_.shape[0]
    cdef Py_ssize_t n = vals_.shape[1]
    cdef Py_ssize_t m = ys_.shape[0]
    if out is None:
        out = np.empty((B, m), dtype=np.float64)
    cdef cnp.ndarray[double, ndim=2, mode="c"] out_ = out
    cdef cnp.ndarray[Py_ssize_t, ndim=1, mode="c"] hull = \
        np.empty(n, dtype=np.intp)
    cdef Py_ssize_t b
    with nogil:
        for b in range(B):
            _lf_row(&xs_[0], &vals_[b, 0], n, &ys_[0], m,
                    &out_[b, 0], &hull[0])
    return out


cdef void _slide_min_row(const double* a, Py_ssize_t n, Py_ssize_t w,
                         double* out, Py_ssize_t* dq) noexcept nogil:
    cdef Py_ssize_t head = 0, tail = 0, nxt = 0, i, hi, lo
    for i in range(n):
        hi = i + w
        if hi > n - 1:
            hi = n - 1
        while nxt <= hi:
            while tail > head and a[dq[tail - 1]] >= a[nxt]:
                tail -= 1
            dq[tail] = nxt
            tail += 1
            nxt += 1
        lo = i - w
        while dq[head] < lo:
            head += 1
        out[i] = a[dq[head]]


cdef void _slide_max_row_u8(const unsigned char* a, Py_ssize_t n, Py_ssize_t w,
                            unsigned char* out, Py_ssize_t* dq) noexcept nogil:
    cdef Py_ssize_t head = 0, tail = 0, nxt = 0, i, hi, lo
    for i in range(n):
        hi = i + w
        if hi > n - 1:
            hi = n - 1
        while nxt <= hi:
            while tail > head and a[dq[tail - 1]] <= a[nxt]:
                tail -= 1
            dq[tail] = nxt
            tail += 1
            nxt += 1
        lo = i - w
        while dq[head] < lo:
            head += 1
        out[i] = a[dq[head]]


def sliding_min(a, w, out=None):
    cdef cnp.ndarray[double, ndim=2, mode="c"] a_ = \
        np.ascontiguousarray(a, dtype=np.float64)
    cdef Py_ssize_t B = a_.shape[0]
    cdef Py_ssize_t n = a_.shape[1]
    cdef Py_ssize_t w_ = int(w)
    if out is None:
        out = np.empty_like(a_)
    cdef cnp.ndarray[double, ndim=2, mode="c"] out_ = out
    if w_ <= 0:
        out_[...] = a_
        return out
    cdef cnp.ndarray[Py_ssize_t, ndim=1, mode="c"] dq = \
        np.empty(n, dtype=np.intp)
    cdef Py_ssize_t b
    with nogil:
        for b in range(B):
            _slide_min_row(&a_[b, 0], n, w_, &out_[b, 0], &dq[0])
    return out


def sliding_max_u8(a, w, out=None):
    cdef cnp.ndarray[unsigned char, ndim=2, mode="c"] a_ = \
        np.ascontiguousarray(a, dtype=np.uint8)
    cdef Py_ssize_t B = a_.shape[0]
    cdef Py_ssize_t n = a_.shape[1]
    cdef Py_ssize_t w_ = int(w)
    if out is None:
        out = np.empty_like(a_)
    cdef cnp.ndarray[unsigned char, ndim=2, mode="c"] out_ = out
    if w_ <= 0:
        out_[...] = a_
        return out
    cdef cnp.ndarray[Py_ssize_t, ndim=1, mode="c"] dq = \
        np.empty(n, dtype=np.intp)
    cdef Py_ssize_t b
    with nogil:
        for b in range(B):
            _slide_max_row_u8(&a_[b, 0], n, w_, &out_[b, 0], &dq[0])
    return out
