"""Compiled kernel: complex SVD, polynomial roots, matrix exponential.

Mirrors ``_fallback.py`` rotation for rotation; both backends satisfy the
same contracts and the test suite runs against each.
"""

import numpy as np

cimport cython
from libc.math cimport ceil, cos, fabs, hypot, log, sin, sqrt

DEF JACOBI_MAX_SWEEPS = 60
DEF ABERTH_MAX_ITER = 400
DEF EXPM_TERMS = 16

cdef double JACOBI_TOL = 50.0 * 2.220446049250313e-16
# pairs whose inner product is subnormal are orthogonal for any honestly
# scaled input; rotating them would divide by a denormal
cdef double SAFE_MIN = 2.2250738585072014e-308
cdef double ABERTH_TOL = 1e-14
cdef double EXPM_THETA = 0.25


cdef inline double _cabs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


cdef inline double _cabs(double complex z) nogil:
    return sqrt(_cabs2(z))


@cython.boundscheck(False)
@cython.wraparound(False)
def _jacobi_tall(a):
    cdef Py_ssize_t m = a.shape[0]
    cdef Py_ssize_t n = a.shape[1]
    w_arr = np.array(a, dtype=np.complex128, order="C", copy=True)
    v_arr = np.eye(n, dtype=np.complex128)
    norms2_arr = np.zeros(n, dtype=np.float64)
    cdef double complex[:, ::1] w = w_arr
    cdef double complex[:, ::1] v = v_arr
    cdef double[::1] norms2 = norms2_arr

    cdef Py_ssize_t i, j, r, sweep
    cdef double alpha, beta, g, tau, t, c, s, acc
    cdef double complex gamma, phase, phase_c, wi, wj

    for j in range(n):
        acc = 0.0
        for r in range(m):
            acc += _cabs2(w[r, j])
        norms2[j] = acc

    cdef bint rotated
    for sweep in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = norms2[i]
                beta = norms2[j]
                gamma = 0
                for r in range(m):
                    gamma += (w[r, i].real - 1j * w[r, i].imag) * w[r, j]
                g = _cabs(gamma)
                if g <= JACOBI_TOL * (sqrt(alpha) * sqrt(beta)) or g < SAFE_MIN:
                    continue
                rotated = True
                phase = gamma / g
                phase_c = phase.real - 1j * phase.imag
                tau = (beta - alpha) / (2.0 * g)
                # hypot keeps the rotation well defined when tau*tau overflows
                if tau >= 0.0:
                    t = 1.0 / (tau + hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + hypot(1.0, tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = c * t

                for r in range(m):
                    wi = w[r, i]
                    wj = phase_c * w[r, j]
                    w[r, i] = c * wi - s * wj
                    w[r, j] = phase * (s * wi + c * wj)
                for r in range(n):
                    wi = v[r, i]
                    wj = phase_c * v[r, j]
                    v[r, i] = c * wi - s * wj
                    v[r, j] = phase * (s * wi + c * wj)

                acc = 0.0
                for r in range(m):
                    acc += _cabs2(w[r, i])
                norms2[i] = acc
                acc = 0.0
                for r in range(m):
                    acc += _cabs2(w[r, j])
                norms2[j] = acc
        if not rotated:
            break

    sigma = np.sqrt(np.maximum(norms2_arr, 0.0))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w_arr = w_arr[:, order]
    v_arr = v_arr[:, order]
    u_arr = np.zeros((m, n), dtype=np.complex128)
    for j in range(n):
        if sigma[j] > 0.0:
            u_arr[:, j] = w_arr[:, j] / sigma[j]
    return u_arr, sigma, v_arr


def jacobi_svd(a):
    """Economy SVD a = U @ diag(s) @ V^H with s descending."""
    a = np.asarray(a, dtype=np.complex128)
    if a.shape[0] >= a.shape[1]:
        return _jacobi_tall(a)
    u, sigma, v = _jacobi_tall(np.ascontiguousarray(a.conj().T))
    return v, sigma, u


@cython.boundscheck(False)
@cython.wraparound(False)
def aberth_roots(monic, int max_iter=ABERTH_MAX_ITER, double tol=ABERTH_TOL):
    """All roots of a monic polynomial (coeffs ascending, last entry 1)."""
    b_arr = np.asarray(monic, dtype=np.complex128)
    cdef double complex[::1] b = b_arr
    cdef Py_ssize_t deg = b_arr.shape[0] - 1
    if deg == 1:
        return np.array([-b_arr[0]], dtype=np.complex128)

    cdef double complex center = -b[deg - 1] / deg
    cdef double radius = 1.0, mag
    cdef Py_ssize_t k, idx, jdx, it
    for k in range(deg):
        mag = _cabs(b[k])
        if 1.0 + mag > radius:
            radius = 1.0 + mag
    z_arr = np.empty(deg, dtype=np.complex128)
    cdef double complex[::1] z = z_arr
    cdef double ang
    for k in range(deg):
        ang = 2.0 * 3.141592653589793 * k / deg + 0.41
        z[k] = center + radius * (cos(ang) + 1j * sin(ang))

    done_arr = np.zeros(deg, dtype=np.uint8)
    cdef unsigned char[::1] done = done_arr
    cdef bint all_done, collision
    cdef double complex zi, p, dp, newton, rep, dz, denom, step

    for it in range(max_iter):
        all_done = True
        for idx in range(deg):
            if done[idx]:
                continue
            zi = z[idx]
            p = 1.0
            dp = 0.0
            for k in range(deg - 1, -1, -1):
                dp = dp * zi + p
                p = p * zi + b[k]
            if p == 0.0:
                done[idx] = 1
                continue
            if dp == 0.0:
                z[idx] = zi + (1.0 + 1.0j) * 1e-12 * (1.0 + _cabs(zi))
                all_done = False
                continue
            newton = p / dp
            rep = 0.0
            collision = False
            for jdx in range(deg):
                if jdx == idx:
                    continue
                dz = zi - z[jdx]
                if dz == 0.0:
                    collision = True
                    break
                rep = rep + 1.0 / dz
            if collision:
                z[idx] = zi + (1.0 + 1.0j) * 1e-12 * (1.0 + _cabs(zi))
                all_done = False
                continue
            denom = 1.0 - newton * rep
            if denom == 0.0:
                step = newton
            else:
                step = newton / denom
            z[idx] = zi - step
            if _cabs(step) <= tol * (1.0 + _cabs(z[idx])):
                done[idx] = 1
            else:
                all_done = False
        if all_done:
            break
    return z_arr


@cython.boundscheck(False)
@cython.wraparound(False)
cdef void _matmul(double complex[:, ::1] a, double complex[:, ::1] b,
                  double complex[:, ::1] out, Py_ssize_t d) nogil:
    cdef Py_ssize_t i, j, k
    cdef double complex acc
    for i in range(d):
        for j in range(d):
            acc = 0
            for k in range(d):
                acc += a[i, k] * b[k, j]
            out[i, j] = acc


@cython.boundscheck(False)
@cython.wraparound(False)
def expm_taylor(a):
    """Matrix exponential by scaling and squaring around a Taylor core."""
    a_arr = np.array(a, dtype=np.complex128, order="C", copy=True)
    cdef Py_ssize_t d = a_arr.shape[0]
    cdef Py_ssize_t i, j, k
    cdef double norm1 = 0.0, col
    cdef double complex[:, ::1] x = a_arr
    for j in range(d):
        col = 0.0
        for i in range(d):
            col += _cabs(x[i, j])
        if col > norm1:
            norm1 = col
    cdef int squarings = 0
    if norm1 > EXPM_THETA:
        squarings = <int>ceil(log(norm1 / EXPM_THETA) / log(2.0))
        if squarings < 0:
            squarings = 0
    cdef double scale = 2.0 ** squarings
    for i in range(d):
        for j in range(d):
            x[i, j] = x[i, j] / scale

    result_arr = np.eye(d, dtype=np.complex128)
    tmp_arr = np.zeros((d, d), dtype=np.complex128)
    cdef double complex[:, ::1] result = result_arr
    cdef double complex[:, ::1] tmp = tmp_arr
    cdef int term, sq
    for term in range(EXPM_TERMS, 0, -1):
        _matmul(x, result, tmp, d)
        for i in range(d):
            for j in range(d):
                result[i, j] = tmp[i, j] / term
                if i == j:
                    result[i, j] = result[i, j] + 1.0
    for sq in range(squarings):
        _matmul(result, result, tmp, d)
        for i in range(d):
            for j in range(d):
                result[i, j] = tmp[i, j]
    return result_arr
