# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the loop-bound kernels in ``_pykernels``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport zgemv

cnp.import_array()

ctypedef double complex cplx


cdef inline double _abs2(cplx z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline void _matvec(const cplx* a, int n, const cplx* x, cplx* y) noexcept nogil:
    # y = A x for a C-ordered n x n A, i.e. A^T in BLAS column order
    cdef char trans = b'T'
    cdef cplx one = 1.0, zero = 0.0
    cdef int inc = 1
    zgemv(&trans, &n, &n, &one, <cplx*>a, &n, <cplx*>x, &inc, &zero, y, &inc)


def mgs_weighted(S, W, double drop_tol):
    cdef const cplx[:, ::1] s = np.ascontiguousarray(S, dtype=np.complex128)
    cdef const cplx[:, ::1] w = np.ascontiguousarray(W, dtype=np.complex128)
    cdef Py_ssize_t n = s.shape[0], k = s.shape[1]
    # column-major scratch: row j holds column j
    Qt = np.zeros((k, n), dtype=np.complex128)
    WQt = np.zeros((k, n), dtype=np.complex128)
    cdef cplx[:, ::1] q = Qt
    cdef cplx[:, ::1] wq = WQt
    cdef cplx[::1] v = np.empty(n, dtype=np.complex128)
    cdef cplx[::1] wv = np.empty(n, dtype=np.complex128)
    cdef Py_ssize_t i, j, a, b, sweep
    cdef cplx r, acc
    cdef double norm0, nrm
    cdef Py_ssize_t fail = -1

    if n == 0:
        return np.zeros((0, k), dtype=np.complex128), (0 if k else -1)
    with nogil:
        for j in range(k):
            for a in range(n):
                v[a] = s[a, j]
            _matvec(&w[0, 0], <int>n, &v[0], &wv[0])
            acc = 0
            for a in range(n):
                acc = acc + v[a].conjugate() * wv[a]
            norm0 = sqrt(acc.real) if acc.real > 0 else 0.0
            if norm0 == 0.0:
                fail = j
                break
            for sweep in range(2):
                for i in range(j):
                    r = 0
                    for a in range(n):
                        r = r + wq[i, a].conjugate() * v[a]
                    for a in range(n):
                        v[a] = v[a] - r * q[i, a]
            _matvec(&w[0, 0], <int>n, &v[0], &wv[0])
            acc = 0
            for a in range(n):
                acc = acc + v[a].conjugate() * wv[a]
            nrm = sqrt(acc.real) if acc.real > 0 else 0.0
            if nrm <= drop_tol * norm0:
                fail = j
                break
            for a in range(n):
                q[j, a] = v[a] / nrm
                wq[j, a] = wv[a] / nrm
    return np.ascontiguousarray(Qt.T), fail


def evolve(P, c0, Py_ssize_t steps, Fp, Fm):
    cdef const cplx[:, ::1] p = np.ascontiguousarray(P, dtype=np.complex128)
    cdef const cplx[:, ::1] fp = np.ascontiguousarray(Fp, dtype=np.complex128)
    cdef const cplx[:, ::1] fm = np.ascontiguousarray(Fm, dtype=np.complex128)
    cdef Py_ssize_t s = p.shape[0], nq = fp.shape[0], np_ = fm.shape[0]
    states_arr = np.empty((steps + 1, s), dtype=np.complex128)
    energy_arr = np.empty(steps + 1)
    fluxp_arr = np.empty(steps + 1)
    fluxm_arr = np.empty(steps + 1)
    cdef cplx[:, ::1] st = states_arr
    cdef double[::1] en = energy_arr
    cdef double[::1] fxp = fluxp_arr
    cdef double[::1] fxm = fluxm_arr
    cdef const cplx[::1] c = np.ascontiguousarray(c0, dtype=np.complex128)
    cdef Py_ssize_t k, i, j
    cdef cplx acc
    cdef double e

    if s == 0:
        return states_arr, np.zeros(steps + 1), np.zeros(steps + 1), np.zeros(steps + 1)
    with nogil:
        for i in range(s):
            st[0, i] = c[i]
        for k in range(steps + 1):
            if k > 0:
                _matvec(&p[0, 0], <int>s, &st[k - 1, 0], &st[k, 0])
            e = 0
            for i in range(s):
                e = e + _abs2(st[k, i])
            en[k] = e
            e = 0
            for i in range(nq):
                acc = 0
                for j in range(s):
                    acc = acc + fp[i, j] * st[k, j]
                e = e + _abs2(acc)
            fxp[k] = e
            e = 0
            for i in range(np_):
                acc = 0
                for j in range(s):
                    acc = acc + fm[i, j] * st[k, j]
                e = e + _abs2(acc)
            fxm[k] = e
    return states_arr, energy_arr, fluxp_arr, fluxm_arr
