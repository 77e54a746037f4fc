"""Shared fixtures and independent oracles used across the suite."""

import numpy as np
import pytest

from minsurf.geometry import Dims, area_integrand
from minsurf.maps import AffineMap


def rng_for(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_dims(rng) -> Dims:
    while True:
        n = int(rng.integers(2, 5))
        m = int(rng.integers(1, 4))
        if n + m <= 7:
            return Dims(n, m)


def fd_area_gradient(a: np.ndarray, step: float = 1e-5) -> np.ndarray:
    """Central finite differences of the area integrand (independent oracle)."""
    n, m = a.shape
    out = np.empty_like(a)
    for i in range(n):
        for al in range(m):
            e = np.zeros_like(a)
            e[i, al] = step
            out[i, al] = (area_integrand(a + e) - area_integrand(a - e)) \
                / (2.0 * step)
    return out


def hyperplane_basis_svd(grad: np.ndarray) -> np.ndarray:
    """Orthonormal basis of grad-perp via SVD (independent of Householder)."""
    g = grad / np.linalg.norm(grad)
    k = len(g)
    u, _, _ = np.linalg.svd(g[:, None], full_matrices=True)
    return u[:, 1:]  # (k, k-1)


def sampled_frame_min(hess: np.ndarray, grad: np.ndarray, n: int,
                      rng, samples: int = 10_000,
                      polish: bool = False) -> float:
    """Brute-force min of tr(H|_L) over random n-frames in grad-perp.

    With ``polish`` the best frames are refined by two-column rotation
    descent on the trace itself (never touches an eigensolver), closing the
    gap left by pure random sampling.
    """
    basis = hyperplane_basis_svd(grad)
    b = basis.T @ hess @ basis
    k1 = b.shape[0]
    best = np.inf
    best_v = None
    for _ in range(samples):
        m0 = rng.normal(size=(k1, n))
        q, _ = np.linalg.qr(m0)
        val = float(np.trace(q.T @ b @ q))
        if val < best:
            best, best_v = val, q
    if not polish:
        return best

    # complete best_v to an orthogonal matrix, then descend by pair rotations
    full = np.linalg.qr(np.concatenate(
        [best_v, rng.normal(size=(k1, k1 - n))], axis=1))[0]
    # fix signs so the leading n columns still span the best frame
    mat = full.T @ b @ full
    for _ in range(200):
        improved = False
        for p in range(n):
            for q_col in range(n, k1):
                bpp, bqq, bpq = mat[p, p], mat[q_col, q_col], mat[p, q_col]
                if abs(bpq) < 1e-15 and bpp <= bqq:
                    continue
                theta = 0.5 * np.arctan2(2.0 * bpq, bpp - bqq)
                # two candidate rotations a quarter turn apart; pick the min
                cands = []
                for t in (theta, theta + np.pi / 2.0):
                    c, s = np.cos(t), np.sin(t)
                    new_pp = (c * c * bpp + s * s * bqq - 2.0 * s * c * bpq)
                    cands.append((new_pp, t))
                new_pp, t = min(cands)
                if new_pp < bpp - 1e-15:
                    c, s = np.cos(t), np.sin(t)
                    rot = np.eye(k1)
                    rot[p, p] = c
                    rot[q_col, q_col] = c
                    rot[p, q_col] = s
                    rot[q_col, p] = -s
                    mat = rot.T @ mat @ rot
                    improved = True
        if not improved:
            break
    return float(np.trace(mat[:n, :n]))


def random_affine(rng, dims: Dims, slope: float = 0.4,
                  shift: float = 0.2) -> AffineMap:
    return AffineMap(rng.uniform(-shift, shift, dims.m),
                     rng.uniform(-slope, slope, (dims.n, dims.m)))


@pytest.fixture
def rng():
    return np.random.default_rng(2024)
