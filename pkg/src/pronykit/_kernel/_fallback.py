"""Pure-Python kernel: complex SVD, polynomial roots, matrix exponential.

Algorithmically identical to the compiled kernel in ``_core.pyx`` (same sweep
order, same thresholds, same stopping rules) so either backend can serve the
same contracts. numpy is used as the array container; the inner loops are the
same rotations and iterations the compiled version runs.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

# Rotation threshold for the one-sided Jacobi sweep: a column pair is touched
# only while |<w_i, w_j>| exceeds JACOBI_TOL * ||w_i|| * ||w_j||.
JACOBI_TOL = 50.0 * np.finfo(np.float64).eps
JACOBI_MAX_SWEEPS = 60
# pairs whose inner product is subnormal are orthogonal for any honestly
# scaled input; rotating them would divide by a denormal
SAFE_MIN = float(np.finfo(np.float64).tiny)

ABERTH_MAX_ITER = 400
ABERTH_TOL = 1e-14

# Scaling target and series length for the exponential. With ||X|| <= 1/4 a
# degree-16 Taylor tail is ~1e-25, far below the squaring error floor.
EXPM_THETA = 0.25
EXPM_TERMS = 16


def _jacobi_tall(a):
    """One-sided Jacobi SVD of a with rows >= cols. Returns (U, s, V)."""
    m, n = a.shape
    w = np.array(a, dtype=np.complex128, order="F", copy=True)
    v = np.eye(n, dtype=np.complex128, order="F")
    norms2 = np.array([np.real(np.vdot(w[:, j], w[:, j])) for j in range(n)])

    for _ in range(JACOBI_MAX_SWEEPS):
        rotated = False
        for i in range(n - 1):
            for j in range(i + 1, n):
                alpha = norms2[i]
                beta = norms2[j]
                gamma = np.vdot(w[:, i], w[:, j])
                g = abs(gamma)
                if g <= JACOBI_TOL * (math.sqrt(alpha) * math.sqrt(beta)) \
                        or g < SAFE_MIN:
                    continue
                rotated = True
                # Phase removal turns the 2x2 Gram block real, then a real
                # Jacobi rotation orthogonalizes the pair.
                phase = gamma / g
                tau = (beta - alpha) / (2.0 * g)
                # hypot keeps the rotation well defined when tau*tau overflows
                if tau >= 0.0:
                    t = 1.0 / (tau + math.hypot(1.0, tau))
                else:
                    t = -1.0 / (-tau + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t

                wi = w[:, i].copy()
                wj_t = np.conj(phase) * w[:, j]
                w[:, i] = c * wi - s * wj_t
                w[:, j] = phase * (s * wi + c * wj_t)

                vi = v[:, i].copy()
                vj_t = np.conj(phase) * v[:, j]
                v[:, i] = c * vi - s * vj_t
                v[:, j] = phase * (s * vi + c * vj_t)

                norms2[i] = np.real(np.vdot(w[:, i], w[:, i]))
                norms2[j] = np.real(np.vdot(w[:, j], w[:, j]))
        if not rotated:
            break

    sigma = np.sqrt(np.maximum(norms2, 0.0))
    order = np.argsort(-sigma, kind="stable")
    sigma = sigma[order]
    w = w[:, order]
    v = v[:, order]
    u = np.zeros((m, n), dtype=np.complex128)
    for j in range(n):
        if sigma[j] > 0.0:
            u[:, j] = w[:, j] / sigma[j]
    return u, sigma, v


def jacobi_svd(a):
    """Economy SVD a = U @ diag(s) @ V^H with s descending.

    Shapes: a (m, n) -> U (m, k), s (k,), V (n, k), k = min(m, n).
    Columns of U belonging to zero singular values are zero vectors.
    """
    a = np.asarray(a, dtype=np.complex128)
    m, n = a.shape
    if m >= n:
        return _jacobi_tall(a)
    u, sigma, v = _jacobi_tall(a.conj().T)
    return v, sigma, u


def aberth_roots(monic, max_iter=ABERTH_MAX_ITER, tol=ABERTH_TOL):
    """All roots of a monic polynomial (coeffs ascending, last entry 1).

    Simultaneous Aberth-Ehrlich iteration started on a circle around the
    root centroid. Multiple roots converge linearly to a tight cluster;
    the repulsion term keeps the iteration stable at the noise floor.
    """
    b = np.asarray(monic, dtype=np.complex128)
    deg = len(b) - 1
    if deg == 1:
        return np.array([-b[0]], dtype=np.complex128)

    center = -b[deg - 1] / deg
    radius = 1.0 + max(abs(b[k]) for k in range(deg))
    k = np.arange(deg)
    z = center + radius * np.exp(1j * (2.0 * np.pi * k / deg + 0.41))
    done = np.zeros(deg, dtype=bool)

    for _ in range(max_iter):
        all_done = True
        for idx in range(deg):
            if done[idx]:
                continue
            zi = z[idx]
            # Horner for p and p' simultaneously.
            p = 1.0 + 0.0j
            dp = 0.0 + 0.0j
            for c in b[deg - 1 :: -1]:
                dp = dp * zi + p
                p = p * zi + c
            if p == 0.0:
                done[idx] = True
                continue
            if dp == 0.0:
                z[idx] = zi + (1.0 + 1.0j) * 1e-12 * (1.0 + abs(zi))
                all_done = False
                continue
            newton = p / dp
            rep = 0.0 + 0.0j
            collision = False
            for jdx in range(deg):
                if jdx == idx:
                    continue
                dz = zi - z[jdx]
                if dz == 0.0:
                    collision = True
                    break
                rep += 1.0 / dz
            if collision:
                z[idx] = zi + (1.0 + 1.0j) * 1e-12 * (1.0 + abs(zi))
                all_done = False
                continue
            denom = 1.0 - newton * rep
            if denom == 0.0:
                step = newton
            else:
                step = newton / denom
            z[idx] = zi - step
            if abs(step) <= tol * (1.0 + abs(z[idx])):
                done[idx] = True
            else:
                all_done = False
        if all_done:
            break
    return z


def expm_taylor(a):
    """Matrix exponential by scaling and squaring around a Taylor core."""
    a = np.asarray(a, dtype=np.complex128)
    d = a.shape[0]
    norm1 = 0.0
    for j in range(d):
        col = float(np.sum(np.abs(a[:, j])))
        if col > norm1:
            norm1 = col
    squarings = 0
    if norm1 > EXPM_THETA:
        squarings = max(0, int(math.ceil(math.log(norm1 / EXPM_THETA, 2.0))))
    x = a / (2.0 ** squarings)

    eye = np.eye(d, dtype=np.complex128)
    result = eye.copy()
    for k in range(EXPM_TERMS, 0, -1):
        result = eye + (x @ result) / k
    for _ in range(squarings):
        result = result @ result
    return result


def cis(theta):
    """e^{i theta} for a real theta (shared helper, mirrors the compiled one)."""
    return cmath.exp(1j * theta)
