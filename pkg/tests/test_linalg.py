import numpy as np
import pytest

from rrdof.exceptions import DegenerateDesignError, ShapeError
from rrdof.linalg import (
    build_h,
    effective_rank,
    gram_factors,
    projection_matrix,
    thin_svd,
)


def reconstruct(f):
    return f.left @ np.diag(f.d) @ f.right.T


class TestThinSvd:
    def test_identity(self):
        f = thin_svd(np.eye(3))
        assert np.allclose(f.d, [1, 1, 1])

    def test_diagonal(self):
        f = thin_svd(np.diag([3.0, 2.0]))
        assert np.allclose(f.d, [3, 2])
        assert np.allclose(f.left, np.eye(2))
        assert np.allclose(f.right, np.eye(2))

    def test_reconstruction(self):
        rng = np.random.default_rng(1)
        m = rng.standard_normal((4, 3))
        f = thin_svd(m)
        err = np.linalg.norm(reconstruct(f) - m) / max(1.0, np.linalg.norm(m))
        assert err < 1e-10

    def test_orthonormal_factors(self):
        rng = np.random.default_rng(2)
        m = rng.standard_normal((6, 4))
        f = thin_svd(m)
        assert np.allclose(f.left.T @ f.left, np.eye(4), atol=1e-10)
        assert np.allclose(f.right.T @ f.right, np.eye(4), atol=1e-10)
        assert np.all(np.diff(f.d) <= 0)

    def test_sign_convention_deterministic(self):
        rng = np.random.default_rng(3)
        m = rng.standard_normal((5, 3))
        f1, f2 = thin_svd(m), thin_svd(m.copy())
        assert np.array_equal(f1.right, f2.right)
        for k in range(3):
            j = np.argmax(np.abs(f1.right[:, k]))
            assert f1.right[j, k] > 0

    def test_rejects_nonfinite(self):
        with pytest.raises(ShapeError):
            thin_svd(np.array([[1.0, np.nan]]))


class TestGramFactors:
    def test_orthonormal_design(self):
        q_cols = np.linalg.qr(np.random.default_rng(4).standard_normal((10, 4)))[0]
        gf = gram_factors(q_cols)
        assert gf.r_x == 4
        assert np.allclose(gf.s, 1.0)

    def test_duplicated_column(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal((8, 3))
        x = np.column_stack([x, x[:, 0]])
        assert gram_factors(x).r_x < 4

    def test_wide_design_rank(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal((40, 80))
        gf = gram_factors(x)
        assert gf.r_x == np.linalg.matrix_rank(x) == 40

    def test_reconstructs_gram(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal((12, 5))
        gf = gram_factors(x)
        xtx = x.T @ x
        approx = gf.q_mat @ np.diag(gf.s**2) @ gf.q_mat.T
        assert np.linalg.norm(approx - xtx) / np.linalg.norm(xtx) < 1e-8

    def test_zero_design(self):
        with pytest.raises(DegenerateDesignError):
            gram_factors(np.zeros((4, 3)))


class TestBuildH:
    def test_orthonormal_design_gives_xty(self):
        # h lives in the gram eigenbasis; with unit scale factors, rotating it
        # back recovers x' y exactly
        rng = np.random.default_rng(8)
        x = np.linalg.qr(rng.standard_normal((10, 4)))[0]
        y = rng.standard_normal((10, 3))
        gf = gram_factors(x)
        hf = build_h(x, y, gf)
        assert np.allclose(gf.q_mat @ hf.h, x.T @ y, atol=1e-10)
        assert np.allclose(np.linalg.norm(hf.h), np.linalg.norm(x.T @ y))

    def test_spectrum_matches_projected_fit(self):
        rng = np.random.default_rng(9)
        x = rng.standard_normal((15, 6))
        y = rng.standard_normal((15, 4))
        gf = gram_factors(x)
        hf = build_h(x, y, gf)
        y_hat = x @ np.linalg.pinv(x) @ y
        d_ref = np.linalg.svd(y_hat, compute_uv=False)
        assert np.allclose(hf.svd.d, d_ref, rtol=1e-8)

    def test_zero_response(self):
        rng = np.random.default_rng(10)
        x = rng.standard_normal((6, 3))
        hf = build_h(x, np.zeros((6, 2)), gram_factors(x))
        assert np.allclose(hf.h, 0)

    def test_shape_mismatch(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal((6, 3))
        with pytest.raises(ShapeError):
            build_h(x, np.zeros((5, 2)), gram_factors(x))


class TestEffectiveRank:
    @pytest.mark.parametrize(
        "d,expected",
        [([5, 3, 1], 3), ([5, 3, 0], 2), ([1, 1e-14], 1), ([0.0, 0.0], 0)],
    )
    def test_cases(self, d, expected):
        assert effective_rank(np.array(d, dtype=float)) == expected


def test_projection_idempotent():
    rng = np.random.default_rng(12)
    x = rng.standard_normal((12, 20))  # wide: r_x = 12
    gf = gram_factors(x)
    p = projection_matrix(x, gf)
    assert np.linalg.norm(p @ p - p) < 1e-8
    assert abs(np.trace(p) - gf.r_x) < 1e-6
