"""Symmetric eigenvalues for tiny dense matrices, vectorized over batches.

All eigenvalue work in the toolkit runs through the cyclic Jacobi sweep
below.  Matrix sizes never exceed 7, so Jacobi converges in a handful of
sweeps and the rotations vectorize cleanly over arbitrarily many matrices
at once.
"""

from __future__ import annotations

import numpy as np

#: off-diagonal norm at which a matrix counts as diagonalized
JACOBI_TOL = 1e-12


def symmetrize(mat: np.ndarray, tol: float = 1e-14) -> np.ndarray:
    """Check near-symmetry of ``mat`` and return the symmetric average.

    Raises ValueError when the skew part exceeds ``tol`` relative to the
    matrix scale; symmetry is part of the SymMatrix contract, not something
    to be repaired silently.
    """
    m = np.asarray(mat, dtype=float)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {m.shape}")
    mt = np.swapaxes(m, -1, -2)
    scale = 1.0 + np.max(np.abs(m)) if m.size else 1.0
    skew = np.max(np.abs(m - mt)) if m.size else 0.0
    if skew > tol * scale:
        raise ValueError(f"matrix not symmetric: skew {skew:.3e} > {tol * scale:.3e}")
    return 0.5 * (m + mt)


def sym_eigvalues(mats: np.ndarray, *, tol: float = JACOBI_TOL,
                  max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of symmetric matrices by cyclic Jacobi rotations.

    Parameters
    ----------
    mats : (..., k, k) array
        Symmetric matrices, k <= 7.
    tol : float
        Convergence threshold on the largest off-diagonal entry, relative
        to ``1 + max|entry|`` per matrix.

    Returns
    -------
    (..., k) array of eigenvalues sorted ascending.
    """
    a = np.array(mats, dtype=float)
    k = a.shape[-1]
    lead = a.shape[:-2]
    flat = a.reshape(-1, k, k)
    if k == 1:
        return flat[:, 0, 0].reshape(lead + (1,))

    scale = 1.0 + np.max(np.abs(flat), axis=(1, 2))
    for _ in range(max_sweeps):
        off = np.zeros(flat.shape[0])
        for p in range(k - 1):
            for q in range(p + 1, k):
                off = np.maximum(off, np.abs(flat[:, p, q]))
        if np.all(off <= tol * scale):
            break
        for p in range(k - 1):
            for q in range(p + 1, k):
                apq = flat[:, p, q]
                rotate = np.abs(apq) > 1e-300
                # stable rotation angle: tan(2t) = 2 a_pq / (a_qq - a_pp)
                denom = np.where(rotate, 2.0 * apq, 1.0)
                tau = (flat[:, q, q] - flat[:, p, p]) / denom
                big = np.abs(tau) > 1e150  # avoid overflow in tau * tau
                tau_safe = np.where(big, 1.0, tau)
                t = np.sign(tau_safe) + (tau_safe == 0.0)
                t = t / (np.abs(tau_safe) + np.sqrt(1.0 + tau_safe * tau_safe))
                t = np.where(big, 0.5 / tau, t)
                t = np.where(rotate, t, 0.0)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                cp = flat[:, :, p].copy()
                cq = flat[:, :, q].copy()
                flat[:, :, p] = c[:, None] * cp - s[:, None] * cq
                flat[:, :, q] = s[:, None] * cp + c[:, None] * cq
                rp = flat[:, p, :].copy()
                rq = flat[:, q, :].copy()
                flat[:, p, :] = c[:, None] * rp - s[:, None] * rq
                flat[:, q, :] = s[:, None] * rp + c[:, None] * rq
                flat[:, p, q] = np.where(rotate, 0.0, flat[:, p, q])
                flat[:, q, p] = flat[:, p, q]
    else:
        raise RuntimeError("Jacobi iteration did not converge")

    eig = np.sort(np.diagonal(flat, axis1=1, axis2=2), axis=1)
    return eig.reshape(lead + (k,))


def tangent_basis(direction: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to ``direction``.

    Uses the Householder reflection taking the unit direction to the first
    coordinate axis and drops the first column.  Deterministic, and exact
    (axis-aligned columns) whenever ``direction`` is a coordinate axis.

    Parameters
    ----------
    direction : (..., k) array of nonzero vectors.

    Returns
    -------
    (..., k, k-1) array whose columns span ``direction``-perp.
    """
    g = np.asarray(direction, dtype=float)
    k = g.shape[-1]
    norm = np.linalg.norm(g, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise ValueError("zero direction has no tangent hyperplane")
    ghat = g / norm
    sign = np.where(ghat[..., 0] >= 0.0, 1.0, -1.0)
    v = ghat.copy()
    v[..., 0] += sign
    vv = 2.0 * (1.0 + np.abs(ghat[..., 0]))
    # columns 1..k-1 of I - 2 v v^T / (v.v)
    basis = -2.0 * v[..., :, None] * v[..., None, 1:] / vv[..., None, None]
    idx = np.arange(1, k)
    basis[..., idx, idx - 1] += 1.0
    return basis
