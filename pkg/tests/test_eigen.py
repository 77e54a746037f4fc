import numpy as np
import pytest

from minsurf.eigen import sym_eigvalues, symmetrize, tangent_basis


def test_jacobi_matches_lapack_oracle():
    rng = np.random.default_rng(0)
    for k in range(1, 8):
        mats = rng.uniform(-3, 3, (40, k, k))
        mats = 0.5 * (mats + mats.transpose(0, 2, 1))
        ours = sym_eigvalues(mats)
        ref = np.linalg.eigvalsh(mats)
        assert np.max(np.abs(ours - ref)) < 1e-11


def test_jacobi_single_matrix_shape():
    vals = sym_eigvalues(np.diag([3.0, -1.0, 2.0]))
    assert vals.shape == (3,)
    assert np.allclose(vals, [-1.0, 2.0, 3.0])


def test_jacobi_handles_huge_scale_spread():
    m = np.diag([1e150, 1.0, -1e-150])
    m[0, 2] = m[2, 0] = 1e-200
    vals = sym_eigvalues(m)
    assert np.isfinite(vals).all()


def test_symmetrize_rejects_skew():
    with pytest.raises(ValueError):
        symmetrize(np.array([[0.0, 1.0], [0.0, 0.0]]))
    out = symmetrize(np.array([[1.0, 2.0], [2.0 + 1e-16, 3.0]]))
    assert np.array_equal(out, out.T)


def test_tangent_basis_orthonormal_and_orthogonal():
    rng = np.random.default_rng(1)
    for k in (3, 5, 7):
        g = rng.normal(size=(20, k))
        basis = tangent_basis(g)
        ghat = g / np.linalg.norm(g, axis=-1, keepdims=True)
        gram = np.einsum("pki,pkj->pij", basis, basis)
        assert np.max(np.abs(gram - np.eye(k - 1))) < 1e-14
        dots = np.einsum("pk,pki->pi", ghat, basis)
        assert np.max(np.abs(dots)) < 1e-14


def test_tangent_basis_axis_direction_exact():
    # coordinate-axis directions must produce exactly axis-aligned columns
    basis = tangent_basis(np.array([0.0, 0.0, 0.0, 5.0]))
    cols = {tuple(basis[:, j]) for j in range(3)}
    assert (0.0, 1.0, 0.0, 0.0) in cols
    assert (0.0, 0.0, 1.0, 0.0) in cols
