import numpy as np
import pytest

from minsurf.errors import DegenerateGradient
from minsurf.geometry import (AmbientPoint, Cone, Dims, area_gradient,
                              area_hessian, area_integrand, cone_contains,
                              pucci_minus, pucci_plus, residual_from_jets,
                              tangential_laplacian_min)

from conftest import fd_area_gradient, random_dims, sampled_frame_min


def test_dims_validation():
    Dims(2, 1)
    Dims(4, 3)
    with pytest.raises(ValueError):
        Dims(1, 1)
    with pytest.raises(ValueError):
        Dims(5, 1)
    with pytest.raises(ValueError):
        Dims(2, 4)
    with pytest.raises(ValueError):
        Dims(5, 3)


def test_area_integrand_trivials():
    assert area_integrand(np.zeros((3, 2))) == 1.0
    assert np.isclose(area_integrand(np.array([[3.0], [4.0]])), np.sqrt(26.0))
    assert np.isclose(area_integrand(np.eye(2)), 2.0)


def test_area_integrand_at_least_one():
    rng = np.random.default_rng(3)
    for _ in range(200):
        dims = random_dims(rng)
        a = rng.uniform(-3, 3, (dims.n, dims.m))
        assert area_integrand(a) >= 1.0


def test_sylvester_identity_seeded():
    rng = np.random.default_rng(11)
    for _ in range(300):
        dims = random_dims(rng)
        a = rng.uniform(-3, 3, (dims.n, dims.m))
        d1 = np.linalg.det(np.eye(dims.m) + a.T @ a)
        d2 = np.linalg.det(np.eye(dims.n) + a @ a.T)
        assert abs(d1 - d2) <= 1e-9 * max(1.0, d1)


def test_area_gradient_trivial_and_fd():
    assert np.allclose(area_gradient(np.zeros((2, 2))), 0.0)
    a = np.array([[3.0], [4.0]])
    expect = a / np.sqrt(26.0)
    assert np.max(np.abs(area_gradient(a) - expect)) < 1e-12
    assert np.max(np.abs(area_gradient(a) - fd_area_gradient(a))) < 1e-8


def test_area_gradient_fd_seeded():
    rng = np.random.default_rng(5)
    for _ in range(200):
        dims = random_dims(rng)
        a = rng.uniform(-2, 2, (dims.n, dims.m))
        ours = area_gradient(a)
        ref = fd_area_gradient(a)
        rel = np.max(np.abs(ours - ref)) / max(1.0, np.max(np.abs(ref)))
        assert rel <= 1e-6


def test_area_hessian_identity_at_zero():
    for n, m in [(2, 1), (2, 2), (3, 2)]:
        h = area_hessian(np.zeros((n, m)))
        expect = np.einsum("ab,ij->aibj", np.eye(m), np.eye(n))
        assert np.max(np.abs(h - expect)) < 1e-9


def test_area_hessian_symmetry():
    rng = np.random.default_rng(7)
    for _ in range(20):
        dims = random_dims(rng)
        a = rng.uniform(-2, 2, (dims.n, dims.m))
        h = area_hessian(a)
        assert np.max(np.abs(h - np.transpose(h, (2, 3, 0, 1)))) <= 1e-7


def test_area_hessian_scalar_case_closed_form():
    # m = 1: Hessian of sqrt(1 + |a|^2)
    rng = np.random.default_rng(9)
    for _ in range(20):
        n = int(rng.integers(2, 5))
        a = rng.uniform(-2, 2, (n, 1))
        v = a[:, 0]
        s = 1.0 + v @ v
        expect = np.eye(n) / np.sqrt(s) - np.outer(v, v) / s ** 1.5
        ours = area_hessian(a)[0, :, 0, :]
        assert np.max(np.abs(ours - expect)) < 1e-8


def test_residual_contraction_matches_hessian_tensor():
    rng = np.random.default_rng(13)
    for _ in range(20):
        dims = random_dims(rng)
        a = rng.uniform(-2, 2, (dims.n, dims.m))
        d2 = rng.uniform(-1, 1, (dims.n, dims.n, dims.m))
        d2 = 0.5 * (d2 + d2.transpose(1, 0, 2))
        tensor = area_hessian(a)
        direct = np.einsum("aibj,ijb->a", tensor, d2)
        fast = residual_from_jets(a, d2)
        assert np.max(np.abs(direct - fast)) < 1e-9


def test_pucci_trivials_and_validation():
    assert np.isclose(pucci_plus(np.eye(3), 0.5, 2.0), 6.0)
    assert np.isclose(pucci_plus(np.diag([2.0, -1.0]), 0.5, 1.0), 1.5)
    with pytest.raises(ValueError):
        pucci_plus(np.eye(2), 0.0, 1.0)
    with pytest.raises(ValueError):
        pucci_plus(np.eye(2), 2.0, 1.0)


def test_pucci_brute_force_oracle():
    # sup over a in [lam I, Lam I] of tr(a N), via sign choices per eigenvalue
    rng = np.random.default_rng(17)
    for _ in range(50):
        k = int(rng.integers(1, 8))
        mat = rng.uniform(-2, 2, (k, k))
        mat = 0.5 * (mat + mat.T)
        lam, upper = 0.3, 1.7
        eig = np.linalg.eigvalsh(mat)
        best = -np.inf
        for bits in range(2 ** k):
            coeffs = np.where(
                [(bits >> i) & 1 for i in range(k)], upper, lam)
            best = max(best, float(coeffs @ eig))
        assert abs(pucci_plus(mat, lam, upper) - best) <= 1e-10


def test_pucci_duality():
    rng = np.random.default_rng(19)
    for _ in range(100):
        k = int(rng.integers(1, 8))
        mat = rng.uniform(-2, 2, (k, k))
        mat = 0.5 * (mat + mat.T)
        assert abs(pucci_plus(mat, 0.4, 1.3)
                   + pucci_minus(-mat, 0.4, 1.3)) <= 1e-12


def test_tangential_laplacian_trivials():
    # isotropic Hessian: any normal n-plane carries 2n
    assert np.isclose(
        tangential_laplacian_min(2.0 * np.eye(4), np.array([1.0, 2, 0, 1]), 2),
        4.0)
    # diagonal with axis gradient is exact
    val = tangential_laplacian_min(np.diag([1.0, 2.0, 3.0, 4.0]),
                                   np.array([0.0, 0, 0, 1]), 2)
    assert val == 3.0


def test_tangential_laplacian_degenerate_gradient():
    with pytest.raises(DegenerateGradient):
        tangential_laplacian_min(np.eye(3), np.zeros(3), 2)


def test_tangential_laplacian_orthogonal_invariance():
    rng = np.random.default_rng(23)
    for _ in range(25):
        dims = random_dims(rng)
        k = dims.k
        h = rng.uniform(-2, 2, (k, k))
        h = 0.5 * (h + h.T)
        g = rng.normal(size=k)
        q, _ = np.linalg.qr(rng.normal(size=(k, k)))
        v1 = tangential_laplacian_min(h, g, dims.n)
        v2 = tangential_laplacian_min(q @ h @ q.T, q @ g, dims.n)
        assert abs(v1 - v2) <= 1e-9


def test_tangential_laplacian_frame_sampling_bound():
    rng = np.random.default_rng(29)
    for _ in range(5):
        dims = random_dims(rng)
        k = dims.k
        h = rng.uniform(-2, 2, (k, k))
        h = 0.5 * (h + h.T)
        g = rng.normal(size=k)
        ours = tangential_laplacian_min(h, g, dims.n)
        sampled = sampled_frame_min(h, g, dims.n, rng, samples=500)
        assert ours <= sampled + 1e-9
        polished = sampled_frame_min(h, g, dims.n, rng, samples=200,
                                     polish=True)
        assert abs(ours - polished) <= 1e-8


def test_cone_contains():
    cone = Cone(np.pi / 4)
    assert cone_contains(cone, AmbientPoint(np.array([1.0, 0.0]), np.array([0.0])))
    assert not cone_contains(Cone(1.0), AmbientPoint(np.zeros(2), np.array([0.5])))
    # boundary inclusive at 45 degrees
    assert cone_contains(cone, AmbientPoint(np.array([1.0, 0.0]), np.array([1.0])))
    with pytest.raises(ValueError):
        Cone(np.pi / 2)
