# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops.  Each function mirrors one in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from cython.parallel cimport prange

cnp.import_array()


def transfer_fill(const double complex[::1] wv, const double complex[::1] wh,
                  int n_states, int width, int threads=0):
    cdef Py_ssize_t dim = 1
    cdef int j
    for j in range(width):
        dim *= n_states
    cdef cnp.ndarray[cnp.int32_t, ndim=2] dig_arr = np.empty((dim, width), dtype=np.int32)
    cdef int[:, ::1] dig = dig_arr
    cdef Py_ssize_t i, rem
    for i in range(dim):
        rem = i
        for j in range(width):
            dig[i, j] = rem % n_states
            rem //= n_states

    out_arr = np.empty((dim, dim), dtype=np.complex128)
    cdef double complex[:, ::1] out = out_arr
    cdef int nthreads = threads if threads > 0 else 0
    if nthreads > 0:
        for i in prange(dim, nogil=True, schedule="static", num_threads=nthreads):
            _fill_row(out, dig, wv, wh, n_states, width, dim, i)
    else:
        for i in prange(dim, nogil=True, schedule="static"):
            _fill_row(out, dig, wv, wh, n_states, width, dim, i)
    return out_arr


cdef inline void _fill_row(double complex[:, ::1] out, int[:, ::1] dig,
                           const double complex[::1] wv, const double complex[::1] wh,
                           int n_states, int width, Py_ssize_t dim, Py_ssize_t i) noexcept nogil:
    cdef Py_ssize_t c
    cdef int j, jn, dv, dh
    cdef double complex v
    for c in range(dim):
        v = 1.0
        for j in range(width):
            jn = j + 1
            if jn == width:
                jn = 0
            dv = (dig[i, j] - dig[c, j]) % n_states
            if dv < 0:
                dv = dv + n_states
            dh = (dig[i, j] - dig[c, jn]) % n_states
            if dh < 0:
                dh = dh + n_states
            v = v * wv[dv]
            v = v * wh[dh]
        out[i, c] = v


cdef inline void _p3_rhs(double alpha, double beta, double gamma, double delta,
                         double x, double u, double du,
                         double* d_u, double* d_du) noexcept nogil:
    # deviation form, u = 1 - eta
    cdef double eta = 1.0 - u
    d_u[0] = du
    d_du[0] = -(du * du / eta + du / x
                + ((alpha + beta) - alpha * u * (2.0 - u)) / x
                + ((gamma + delta) - gamma * u * (4.0 - u * (6.0 - u * (4.0 - u)))) / eta)


def rk4_painleve(double alpha, double beta, double gamma, double delta,
                 double x0, double u0, double du0, double h, long n_steps):
    cdef double x = x0, y0 = u0, y1 = du0
    cdef double k1a, k1b, k2a, k2b, k3a, k3b, k4a, k4b
    cdef long n
    with nogil:
        for n in range(n_steps):
            _p3_rhs(alpha, beta, gamma, delta, x, y0, y1, &k1a, &k1b)
            _p3_rhs(alpha, beta, gamma, delta, x + 0.5 * h,
                    y0 + 0.5 * h * k1a, y1 + 0.5 * h * k1b, &k2a, &k2b)
            _p3_rhs(alpha, beta, gamma, delta, x + 0.5 * h,
                    y0 + 0.5 * h * k2a, y1 + 0.5 * h * k2b, &k3a, &k3b)
            _p3_rhs(alpha, beta, gamma, delta, x + h,
                    y0 + h * k3a, y1 + h * k3b, &k4a, &k4b)
            y0 = y0 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
            y1 = y1 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
            x = x0 + (n + 1) * h
    return x, y0, y1
