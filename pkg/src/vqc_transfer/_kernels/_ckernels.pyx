# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled per-sample kernels; same contracts as ``_fallback``."""
import numpy as np

from libc.math cimport cos, sin

ctypedef double complex cplx


cdef inline void _rot(int k, double angle, cplx* m) noexcept nogil:
    cdef double c = cos(0.5 * angle)
    cdef double s = sin(0.5 * angle)
    if k == 1:
        m[0] = c; m[1] = -1j * s; m[2] = -1j * s; m[3] = c
    elif k == 2:
        m[0] = c; m[1] = -s; m[2] = s; m[3] = c
    else:
        m[0] = c - 1j * s; m[1] = 0; m[2] = 0; m[3] = c + 1j * s


cdef inline void _mul(const cplx* a, const cplx* b, cplx* out) noexcept nogil:
    cdef cplx r0 = a[0] * b[0] + a[1] * b[2]
    cdef cplx r1 = a[0] * b[1] + a[1] * b[3]
    cdef cplx r2 = a[2] * b[0] + a[3] * b[2]
    cdef cplx r3 = a[2] * b[1] + a[3] * b[3]
    out[0] = r0; out[1] = r1; out[2] = r2; out[3] = r3


cdef inline void _apply(const cplx* m, cplx* psi) noexcept nogil:
    cdef cplx a = m[0] * psi[0] + m[1] * psi[1]
    cdef cplx b = m[2] * psi[0] + m[3] * psi[1]
    psi[0] = a; psi[1] = b


cdef inline void _conj_by_dag(const cplx* u, cplx* op) noexcept nogil:
    # op <- u^dag op u
    cdef cplx ud[4]
    ud[0] = u[0].conjugate(); ud[1] = u[2].conjugate()
    ud[2] = u[1].conjugate(); ud[3] = u[3].conjugate()
    _mul(op, u, op)
    _mul(ud, op, op)


cdef inline void _half_i_bracket(int k, const cplx* op, cplx* out) noexcept nogil:
    # out <- (i/2) [sigma_k, op]
    cdef cplx s[4]
    cdef cplx a[4]
    cdef cplx b[4]
    if k == 1:
        s[0] = 0; s[1] = 1; s[2] = 1; s[3] = 0
    elif k == 2:
        s[0] = 0; s[1] = -1j; s[2] = 1j; s[3] = 0
    else:
        s[0] = 1; s[1] = 0; s[2] = 0; s[3] = -1
    _mul(s, op, a)
    _mul(op, s, b)
    cdef int t
    for t in range(4):
        out[t] = 0.5j * (a[t] - b[t])


cdef inline double _sandwich(const cplx* psi, const cplx* op) noexcept nogil:
    cdef cplx a = op[0] * psi[0] + op[1] * psi[1]
    cdef cplx b = op[2] * psi[0] + op[3] * psi[1]
    return (psi[0].conjugate() * a + psi[1].conjugate() * b).real


cdef void _load(const double complex[:, ::1] src, cplx* dst) noexcept nogil:
    dst[0] = src[0, 0]; dst[1] = src[0, 1]; dst[2] = src[1, 0]; dst[3] = src[1, 1]


def forward_batch(const int[::1] enc, const int[::1] var, const double[::1] theta,
                  const double[:, ::1] xs, const double complex[:, ::1] h,
                  const double complex[::1] psi0):
    cdef Py_ssize_t n = xs.shape[0], d = enc.shape[0], nv = var.shape[0]
    cdef Py_ssize_t i, j
    out_arr = np.empty(n, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef cplx hm[4]
    cdef cplx u[4]
    cdef cplx g[4]
    cdef cplx psi[2]
    _load(h, hm)
    u[0] = 1; u[1] = 0; u[2] = 0; u[3] = 1
    for j in range(nv):
        _rot(var[j], theta[j], g)
        _mul(g, u, u)
    with nogil:
        for i in range(n):
            psi[0] = psi0[0]; psi[1] = psi0[1]
            for j in range(d):
                _rot(enc[j], xs[i, j], g)
                _apply(g, psi)
            _apply(u, psi)
            out[i] = _sandwich(psi, hm)
    return out_arr


def grad_theta_batch(const int[::1] enc, const int[::1] var, const double[::1] theta,
                     const double[:, ::1] xs, const double complex[:, ::1] h,
                     const double complex[::1] psi0):
    cdef Py_ssize_t n = xs.shape[0], d = enc.shape[0], nv = var.shape[0]
    cdef Py_ssize_t i, j, t
    out_arr = np.empty((n, nv), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    br_arr = np.empty((nv, 4), dtype=np.complex128)
    cdef double complex[:, ::1] br = br_arr
    us_arr = np.empty((nv, 4), dtype=np.complex128)
    cdef double complex[:, ::1] us = us_arr
    cdef cplx op[4]
    cdef cplx g[4]
    cdef cplx tmp[4]
    cdef cplx psi[2]
    _load(h, op)
    for j in range(nv - 1, -1, -1):
        _rot(var[j], theta[j], g)
        for t in range(4):
            us[j, t] = g[t]
        _conj_by_dag(g, op)
        _half_i_bracket(var[j], op, tmp)
        for t in range(4):
            br[j, t] = tmp[t]
    with nogil:
        for i in range(n):
            psi[0] = psi0[0]; psi[1] = psi0[1]
            for j in range(d):
                _rot(enc[j], xs[i, j], g)
                _apply(g, psi)
            for j in range(nv):
                out[i, j] = _sandwich(psi, &br[j, 0])
                _apply(&us[j, 0], psi)
    return out_arr


def grad_x_batch(const int[::1] enc, const int[::1] var, const double[::1] theta,
                 const double[:, ::1] xs_left, const double[:, ::1] xs_right,
                 const double complex[:, ::1] h, const double complex[::1] psi0):
    cdef Py_ssize_t n = xs_left.shape[0], d = enc.shape[0], nv = var.shape[0]
    cdef Py_ssize_t i, j, t
    out_arr = np.empty((n, d), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    br_arr = np.empty((d, 4), dtype=np.complex128)
    cdef double complex[:, ::1] br = br_arr
    cdef cplx hu[4]
    cdef cplx op[4]
    cdef cplx g[4]
    cdef cplx tmp[4]
    cdef cplx psi[2]
    _load(h, hu)
    for j in range(nv - 1, -1, -1):
        _rot(var[j], theta[j], g)
        _conj_by_dag(g, hu)
    with nogil:
        for i in range(n):
            for t in range(4):
                op[t] = hu[t]
            for j in range(d - 1, -1, -1):
                _rot(enc[j], xs_right[i, j], g)
                _conj_by_dag(g, op)
                _half_i_bracket(enc[j], op, tmp)
                for t in range(4):
                    br[j, t] = tmp[t]
            psi[0] = psi0[0]; psi[1] = psi0[1]
            for j in range(d):
                out[i, j] = _sandwich(psi, &br[j, 0])
                _rot(enc[j], xs_left[i, j], g)
                _apply(g, psi)
    return out_arr
