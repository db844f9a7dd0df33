# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled twin of beccert._kernels_py.

Scalar C loops over the quadrature-node arrays; formulas and branch cuts
must match the NumPy module exactly (the parity test suite enforces this).
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport M_PI, cos, exp, fabs, hypot, pow, sin, sqrt
from scipy.special.cython_special cimport dawsn

cnp.import_array()

BACKEND_NAME = "cython"

cdef double A_CONST = 0.09916191351477185
cdef double M_CONST = 3.995895679077886
cdef double L_CONST = 0.6244889281697439
cdef double TWO_PI = 2.0 * M_PI
cdef double SQRT2 = sqrt(2.0)
cdef double INV_6A = 1.0 / (6.0 * A_CONST)
cdef double DHAT2_C1 = exp(INV_6A * INV_6A / 2.0) * (
    INV_6A / 2.0 - dawsn(INV_6A / SQRT2) / SQRT2)
cdef double EXP_108 = exp(1.0 / (108.0 * A_CONST * A_CONST))

globals()["A_CONST"] = A_CONST
globals()["M_CONST"] = M_CONST
globals()["L_CONST"] = L_CONST


cdef inline double _b(double t, double gamma) noexcept nogil:
    cdef double at = fabs(t)
    cdef double gt = gamma * at
    if gt < M_CONST:
        return -at * at + 2.0 * gamma * A_CONST * at * at * at
    if gt <= TWO_PI:
        return -(2.0 / (gamma * gamma)) * (1.0 - cos(gt))
    return 0.0


cdef inline double _cot_residual_prod(double v) noexcept nogil:
    # (1-v) * (cot(pi v) - 1/(pi v)) on (0, 1]
    cdef double x, w, xu, ratio
    if v < 0.02:
        x = M_PI * v
        return (1.0 - v) * (-x / 3.0 - x * x * x / 45.0
                            - 2.0 * x * x * x * x * x / 945.0
                            - x * x * x * x * x * x * x / 4725.0)
    if v > 0.5:
        w = 1.0 - v
        xu = M_PI * w
        if w > 0.0:
            ratio = w / sin(xu)
        else:
            ratio = 1.0 / M_PI
        return -cos(xu) * ratio - w / (M_PI * v)
    x = M_PI * v
    return (1.0 - v) * (cos(x) / sin(x) - 1.0 / x)


cdef cnp.ndarray[cnp.float64_t, ndim=1] _out_like(double[::1] t):
    return np.empty(t.shape[0], dtype=np.float64)


def b_vec(t, double gamma):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(tv)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = _b(tv[i], gamma)
    return out


def fhat1_vec(t, double eps):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(tv)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = exp(0.5 * _b(tv[i], 2.0 * eps))
    return out


def fhat2_vec(t, double eps, long n):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(tv)
    cdef double[::1] ov = out
    cdef double gamma = eps + 1.0 / sqrt(<double> n)
    cdef double base
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            base = 1.0 + _b(tv[i], gamma) / n
            if base < 0.0:
                base = 0.0
            ov[i] = pow(base, n / 2.0)
    return out


def fhat3_vec(t, double eps, long m):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(tv)
    cdef double[::1] ov = out
    cdef double gamma = eps + 1.0 / sqrt(<double> m)
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = exp(0.5 * _b(tv[i], gamma))
    return out


def dhat1_vec(t, double eps):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(tv)
    cdef double[::1] ov = out
    cdef double at
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            at = fabs(tv[i])
            ov[i] = eps * (at / 2.0 - dawsn(at / SQRT2) / SQRT2)
    return out


def dhat2_vec(t, double eps):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(tv)
    cdef double[::1] ov = out
    cdef double e13 = pow(eps, 1.0 / 3.0)
    cdef double A = 1.0 / (6.0 * A_CONST * e13)
    cdef double c12 = 1.0 / (12.0 * A_CONST * L_CONST)
    cdef double at, x, arg
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            at = fabs(tv[i])
            if at <= A:
                x = at * e13
                ov[i] = exp(at * at * (e13 * e13 - 1.0) / 2.0) * (
                    x / 2.0 - dawsn(x / SQRT2) / SQRT2)
            else:
                arg = 2.0 * A_CONST * eps * at * at * at - at * at / 2.0
                if arg > 700.0:
                    arg = 700.0
                ov[i] = (exp(-at * at / 2.0) * (DHAT2_C1 - EXP_108 * c12)
                         + exp(arg) * c12)
    return out


def dhat3_integrand_vec(s, double gamma, long n):
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(sv)
    cdef double[::1] ov = out
    cdef double base, x
    cdef Py_ssize_t i
    with nogil:
        for i in range(sv.shape[0]):
            x = sv[i]
            base = 1.0 + _b(x, gamma) / n
            if base < 0.0:
                base = 0.0
            ov[i] = pow(base, (n - 1) / 2.0) * (x * x / 2.0) * exp(x * x / 2.0)
    return out


def dhat4_integrand_vec(s, double gamma, long m):
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(sv)
    cdef double[::1] ov = out
    cdef double cm = (m - 1) / (2.0 * m)
    cdef double x
    cdef Py_ssize_t i
    with nogil:
        for i in range(sv.shape[0]):
            x = sv[i]
            ov[i] = exp(cm * _b(x, gamma) + x * x / 2.0) * (x * x / 2.0)
    return out


def cot_residual_prod_vec(v):
    cdef double[::1] vv = np.ascontiguousarray(v, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(vv)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(vv.shape[0]):
            ov[i] = _cot_residual_prod(vv[i])
    return out


def kernel_weight_vec(u, double U):
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(uv)
    cdef double[::1] ov = out
    cdef double v, re, im
    cdef Py_ssize_t i
    with nogil:
        for i in range(uv.shape[0]):
            v = uv[i] / U
            re = (1.0 - v) / (2.0 * U)
            im = (_cot_residual_prod(v) + 1.0 / M_PI) / (2.0 * U) \
                + (1.0 - v) / (2.0 * M_PI * uv[i])
            ov[i] = hypot(re, im)
    return out


def residual_weight_vec(u, double U):
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(uv)
    cdef double[::1] ov = out
    cdef double v, re, im
    cdef Py_ssize_t i
    with nogil:
        for i in range(uv.shape[0]):
            v = uv[i] / U
            re = (1.0 - v) / (2.0 * U)
            im = _cot_residual_prod(v) / (2.0 * U)
            ov[i] = hypot(re, im)
    return out


def phi_vec(t):
    cdef double[::1] tv = np.ascontiguousarray(t, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(tv)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(tv.shape[0]):
            ov[i] = exp(-tv[i] * tv[i] / 2.0)
    return out


def gauss_tail_vec(u):
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(uv)
    cdef double[::1] ov = out
    cdef Py_ssize_t i
    with nogil:
        for i in range(uv.shape[0]):
            ov[i] = exp(-uv[i] * uv[i] / 2.0) / (2.0 * M_PI * uv[i])
    return out


def i1_general_integrand_vec(u, double U, double eps):
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(uv)
    cdef double[::1] ov = out
    cdef double e13 = pow(eps, 1.0 / 3.0)
    cdef double A = 1.0 / (6.0 * A_CONST * e13)
    cdef double c12 = 1.0 / (12.0 * A_CONST * L_CONST)
    cdef double v, re, im, w, at, x, d1, d2, arg
    cdef Py_ssize_t i
    with nogil:
        for i in range(uv.shape[0]):
            v = uv[i] / U
            re = (1.0 - v) / (2.0 * U)
            im = (_cot_residual_prod(v) + 1.0 / M_PI) / (2.0 * U) \
                + (1.0 - v) / (2.0 * M_PI * uv[i])
            w = hypot(re, im)
            at = fabs(uv[i])
            d1 = eps * (at / 2.0 - dawsn(at / SQRT2) / SQRT2)
            if at <= A:
                x = at * e13
                d2 = exp(at * at * (e13 * e13 - 1.0) / 2.0) * (
                    x / 2.0 - dawsn(x / SQRT2) / SQRT2)
            else:
                arg = 2.0 * A_CONST * eps * at * at * at - at * at / 2.0
                if arg > 700.0:
                    arg = 700.0
                d2 = (exp(-at * at / 2.0) * (DHAT2_C1 - EXP_108 * c12)
                      + exp(arg) * c12)
            ov[i] = w * (d1 if d1 < d2 else d2)
    return out


def i3_integrand_vec(u, double U):
    cdef double[::1] uv = np.ascontiguousarray(u, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = _out_like(uv)
    cdef double[::1] ov = out
    cdef double v, re, im
    cdef Py_ssize_t i
    with nogil:
        for i in range(uv.shape[0]):
            v = uv[i] / U
            re = (1.0 - v) / (2.0 * U)
            im = _cot_residual_prod(v) / (2.0 * U)
            ov[i] = hypot(re, im) * exp(-uv[i] * uv[i] / 2.0)
    return out
