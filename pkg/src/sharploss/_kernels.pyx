# cython: language_level=3
"""Compiled kernels: reflect-boundary correlation and its adjoint, and the
per-patch structure tensor forward/backward passes.

Loop orders are fixed so that results are deterministic run to run.
"""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _reflect(Py_ssize_t p, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t period
    if n == 1:
        return 0
    period = 2 * (n - 1)
    p = p % period
    if p < 0:
        p += period
    if p >= n:
        p = period - p
    return p


def correlate_reflect(const double[:, ::1] img, const double[:, ::1] kernel):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t k = kernel.shape[0], r = k // 2
    cdef Py_ssize_t i, j, u, v, ii
    cdef double acc
    out_arr = np.empty((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t[::1] ri = np.empty(h + 2 * r, dtype=np.intp)
    cdef Py_ssize_t[::1] ci = np.empty(w + 2 * r, dtype=np.intp)
    for i in range(h + 2 * r):
        ri[i] = _reflect(i - r, h)
    for j in range(w + 2 * r):
        ci[j] = _reflect(j - r, w)
    with nogil:
        for i in range(h):
            for j in range(w):
                acc = 0.0
                for u in range(k):
                    ii = ri[i + u]
                    for v in range(k):
                        acc = acc + kernel[u, v] * img[ii, ci[j + v]]
                out[i, j] = acc
    return out_arr


def correlate_reflect_adjoint(const double[:, ::1] img, const double[:, ::1] kernel):
    cdef Py_ssize_t h = img.shape[0], w = img.shape[1]
    cdef Py_ssize_t k = kernel.shape[0], r = k // 2
    cdef Py_ssize_t i, j, u, v, ii
    cdef double y
    out_arr = np.zeros((h, w), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    cdef Py_ssize_t[::1] ri = np.empty(h + 2 * r, dtype=np.intp)
    cdef Py_ssize_t[::1] ci = np.empty(w + 2 * r, dtype=np.intp)
    for i in range(h + 2 * r):
        ri[i] = _reflect(i - r, h)
    for j in range(w + 2 * r):
        ci[j] = _reflect(j - r, w)
    with nogil:
        for i in range(h):
            for j in range(w):
                y = img[i, j]
                for u in range(k):
                    ii = ri[i + u]
                    for v in range(k):
                        out[ii, ci[j + v]] += kernel[u, v] * y
    return out_arr


def patch_tensors(const double[:, ::1] gx, const double[:, ::1] gy, Py_ssize_t d):
    cdef Py_ssize_t ny = gx.shape[0] // d, nx = gx.shape[1] // d
    cdef Py_ssize_t p, q, i, j, y0, x0
    cdef double sa, sb, sc, vx, vy
    a_arr = np.empty((ny, nx), dtype=np.float64)
    b_arr = np.empty((ny, nx), dtype=np.float64)
    c_arr = np.empty((ny, nx), dtype=np.float64)
    cdef double[:, ::1] a = a_arr, b = b_arr, c = c_arr
    with nogil:
        for p in range(ny):
            y0 = p * d
            for q in range(nx):
                x0 = q * d
                sa = 0.0
                sb = 0.0
                sc = 0.0
                for i in range(y0, y0 + d):
                    for j in range(x0, x0 + d):
                        vx = gx[i, j]
                        vy = gy[i, j]
                        sa = sa + vx * vx
                        sb = sb + vx * vy
                        sc = sc + vy * vy
                a[p, q] = sa
                b[p, q] = sb
                c[p, q] = sc
    return a_arr, b_arr, c_arr


def patch_tensors_backward(const double[:, ::1] gx, const double[:, ::1] gy,
                           const double[:, ::1] ga, const double[:, ::1] gb,
                           const double[:, ::1] gc, Py_ssize_t d):
    cdef Py_ssize_t ny = ga.shape[0], nx = ga.shape[1]
    cdef Py_ssize_t p, q, i, j
    cdef double ca, cb, cc, vx, vy
    dgx_arr = np.zeros((gx.shape[0], gx.shape[1]), dtype=np.float64)
    dgy_arr = np.zeros((gx.shape[0], gx.shape[1]), dtype=np.float64)
    cdef double[:, ::1] dgx = dgx_arr, dgy = dgy_arr
    with nogil:
        for p in range(ny):
            for q in range(nx):
                ca = ga[p, q]
                cb = gb[p, q]
                cc = gc[p, q]
                if ca == 0.0 and cb == 0.0 and cc == 0.0:
                    continue
                for i in range(p * d, p * d + d):
                    for j in range(q * d, q * d + d):
                        vx = gx[i, j]
                        vy = gy[i, j]
                        dgx[i, j] = 2.0 * ca * vx + cb * vy
                        dgy[i, j] = cb * vx + 2.0 * cc * vy
    return dgx_arr, dgy_arr
