"""Kernel and numerics-layer tests.

The kernel exists twice (compiled extension and pure Python); both
implementations are exercised here against numpy's LAPACK-backed
routines, which use entirely different algorithms and so serve as an
independent reference.
"""

import numpy as np
import pytest

import pronykit._kernel._fallback as fallback
from pronykit import numerics
from pronykit.errors import ContractViolationError

BACKENDS = [pytest.param(fallback, id="python")]
try:
    import pronykit._kernel._core as core
    BACKENDS.append(pytest.param(core, id="compiled"))
except ImportError:
    pass


@pytest.fixture(params=BACKENDS)
def kernel(request):
    return request.param


def random_matrix(rng, rows, cols):
    return rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))


# ---------------------------------------------------------------------------
# jacobi_svd


class TestJacobiSVD:
    @pytest.mark.parametrize("rows,cols", [(1, 1), (3, 3), (5, 3), (3, 5),
                                           (8, 8), (12, 7)])
    def test_reconstruction_and_orthogonality(self, kernel, rng, rows, cols):
        for trial in range(5):
            a = random_matrix(rng, rows, cols)
            u, s, v = kernel.jacobi_svd(a)
            k = min(rows, cols)
            assert s.shape == (k,)
            assert np.all(np.diff(s) <= 1e-14 * max(s[0], 1.0))
            assert np.all(s >= 0)
            recon = (u * s) @ v.conj().T
            assert np.linalg.norm(recon - a) <= 1e-12 * max(1.0, s[0])
            assert np.linalg.norm(u.conj().T @ u - np.eye(k)) < 1e-12
            assert np.linalg.norm(v.conj().T @ v - np.eye(k)) < 1e-12

    def test_matches_lapack_singular_values(self, kernel, rng):
        for trial in range(10):
            a = random_matrix(rng, 6, 4)
            _, s, _ = kernel.jacobi_svd(a)
            ref = np.linalg.svd(a, compute_uv=False)
            assert np.allclose(s, ref, rtol=1e-12, atol=1e-12)

    def test_rank_deficient(self, kernel, rng):
        a = random_matrix(rng, 6, 3)
        b = np.hstack([a, a[:, :1] + a[:, 1:2]])
        _, s, _ = kernel.jacobi_svd(b)
        assert s[-1] <= 1e-13 * s[0]

    def test_zero_matrix(self, kernel):
        u, s, v = kernel.jacobi_svd(np.zeros((3, 2), dtype=np.complex128))
        assert np.all(s == 0.0)


# ---------------------------------------------------------------------------
# aberth_roots


class TestAberthRoots:
    def test_quadratic_unit(self, kernel):
        # z^2 + 1
        roots = kernel.aberth_roots(np.array([1.0, 0.0, 1.0], dtype=complex))
        got = sorted(roots, key=lambda z: z.imag)
        assert abs(got[0] + 1j) < 1e-12
        assert abs(got[1] - 1j) < 1e-12

    def test_planted_cubic(self, kernel):
        planted = [2.0 + 0j, -1.0 + 0j, 1j]
        coeffs = np.array([1.0 + 0j])
        for r in planted:
            coeffs = np.convolve(coeffs, np.array([-r, 1.0 + 0j]))
        roots = kernel.aberth_roots(coeffs)
        for r in planted:
            assert min(abs(roots - r)) < 1e-9

    def test_residual_bound_random(self, kernel, rng):
        for trial in range(20):
            deg = int(rng.integers(1, 9))
            coeffs = random_matrix(rng, 1, deg + 1)[0]
            coeffs[-1] = 1.0
            roots = kernel.aberth_roots(coeffs)
            assert roots.shape == (deg,)
            scale = np.max(np.abs(coeffs))
            for z in roots:
                val = 0.0 + 0.0j
                for c in coeffs[::-1]:
                    val = val * z + c
                assert abs(val) <= 1e-8 * scale * max(1.0, abs(z)) ** deg

    def test_agrees_with_numpy_roots(self, kernel, rng):
        for trial in range(10):
            deg = int(rng.integers(2, 7))
            coeffs = random_matrix(rng, 1, deg + 1)[0]
            coeffs[-1] = 1.0
            got = np.sort_complex(kernel.aberth_roots(coeffs))
            ref = np.sort_complex(np.roots(coeffs[::-1]))
            assert np.allclose(got, ref, atol=1e-7)


# ---------------------------------------------------------------------------
# expm_taylor


class TestExpm:
    def test_zero(self, kernel):
        out = kernel.expm_taylor(np.zeros((2, 2), dtype=np.complex128))
        assert np.allclose(out, np.eye(2), atol=1e-15)

    def test_diagonal(self, kernel):
        a = np.diag([1j * np.pi, 0.0]).astype(np.complex128)
        out = kernel.expm_taylor(a)
        assert np.allclose(out, np.diag([-1.0, 1.0]), atol=1e-13)

    def test_against_scipy(self, kernel, rng):
        scipy_linalg = pytest.importorskip("scipy.linalg")
        for trial in range(5):
            a = random_matrix(rng, 5, 5)
            assert np.allclose(kernel.expm_taylor(a), scipy_linalg.expm(a),
                               atol=1e-10, rtol=1e-10)

    def test_group_property(self, kernel, rng):
        a = random_matrix(rng, 4, 4)
        half = kernel.expm_taylor(a / 2)
        assert np.allclose(np.asarray(half) @ np.asarray(half),
                           kernel.expm_taylor(a), atol=1e-10)


# ---------------------------------------------------------------------------
# numerics wrapper layer (runs on the backend selected at import)


class TestLeastSquares:
    def test_minimum_norm_hand_example(self):
        # a + b = 2, minimize |a|^2 + |b|^2 -> (1, 1)
        x = numerics.least_squares_solve([[1.0, 1.0]], [2.0])
        assert np.allclose(x, [1.0, 1.0], atol=1e-12)

    def test_square_solve(self, rng):
        a = random_matrix(rng, 5, 5)
        x_true = random_matrix(rng, 1, 5)[0]
        x = numerics.least_squares_solve(a, a @ x_true)
        assert np.allclose(x, x_true, atol=1e-10)

    def test_overdetermined_matches_lstsq(self, rng):
        a = random_matrix(rng, 8, 3)
        b = random_matrix(rng, 1, 8)[0]
        x = numerics.least_squares_solve(a, b)
        ref, *_ = np.linalg.lstsq(a, b, rcond=None)
        assert np.allclose(x, ref, atol=1e-10)

    def test_shape_mismatch(self):
        with pytest.raises(ContractViolationError):
            numerics.least_squares_solve(np.eye(2), [1.0, 2.0, 3.0])


class TestRank:
    def test_identity(self):
        assert numerics.numerical_rank(np.eye(3), rel_tol=1e-10) == 3

    def test_zero(self):
        assert numerics.numerical_rank(np.zeros((2, 3)), rel_tol=1e-10) == 0

    def test_near_rank_one(self):
        a = np.outer([1.0, 2.0, 3.0], [1.0, -1.0])
        a[2, 1] += 1e-13
        assert numerics.numerical_rank(a, rel_tol=1e-10) == 1
        assert numerics.numerical_rank(a, rel_tol=1e-15) == 2

    def test_rejects_bad_tol(self):
        with pytest.raises(ContractViolationError):
            numerics.numerical_rank(np.eye(2), rel_tol=0.0)


class TestOrthonormalRange:
    def test_rank_one(self):
        a = np.outer([1.0, 2.0, 2.0], [3.0, -1.0])
        q = numerics.orthonormal_range(a)
        assert q.shape == (3, 1)
        assert abs(np.linalg.norm(q[:, 0]) - 1.0) < 1e-14
        # spans the single column direction
        col = a[:, 0] / np.linalg.norm(a[:, 0])
        assert abs(abs(np.vdot(q[:, 0], col)) - 1.0) < 1e-13

    def test_projector_reproduces_columns(self):
        rng = np.random.default_rng(2)
        a = rng.normal(size=(6, 3)) + 1j * rng.normal(size=(6, 3))
        q = numerics.orthonormal_range(a)
        assert q.shape == (6, 3)
        assert np.max(np.abs(q.conj().T @ q - np.eye(3))) < 1e-13
        proj = q @ (q.conj().T @ a)
        assert np.max(np.abs(proj - a)) < 1e-12

    def test_zero_matrix(self):
        q = numerics.orthonormal_range(np.zeros((4, 2)))
        assert q.shape == (4, 0)


class TestPolynomial:
    def test_container_invariants(self):
        p = numerics.Polynomial(np.array([-1.0, 0.0, 1.0], dtype=complex))
        assert p.degree == 2
        assert p.is_monic
        assert abs(p(2.0) - 3.0) < 1e-15
        with pytest.raises(ContractViolationError):
            numerics.Polynomial(np.array([], dtype=complex))
        with pytest.raises(ContractViolationError):
            numerics.Polynomial(np.array([1.0, 0.0], dtype=complex))

    def test_from_roots_roundtrip(self):
        p = numerics.Polynomial.from_roots([2.0, -1.0, 1j])
        got = np.sort_complex(numerics.polynomial_roots(p))
        assert np.allclose(got, np.sort_complex(np.array([2.0, -1.0, 1j])),
                           atol=1e-9)

    def test_exact_zero_deflation(self):
        # z^3 - z^2 = z^2 (z - 1): two exact zero roots
        roots = numerics.polynomial_roots([0.0, 0.0, -1.0, 1.0])
        zeros = np.sum(roots == 0.0)
        assert zeros == 2
        assert min(abs(roots - 1.0)) < 1e-12

    def test_matrix_exponential_wrapper(self):
        out = numerics.matrix_exponential(np.zeros((2, 2)))
        assert np.allclose(out, np.eye(2))
        with pytest.raises(ContractViolationError):
            numerics.matrix_exponential(np.zeros((2, 3)))


def test_backend_name_reported():
    assert numerics.kernel_backend() in ("compiled", "python")
