"""Pointwise calculus of the area functional for graphs of maps R^n -> R^m.

A gradient is an (n, m) array with entry (i, a) = d_i u^a.  Everything here
is written batch-first: any number of leading axes is allowed, so the same
code serves single points and whole lattices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .eigen import sym_eigvalues, symmetrize, tangent_basis
from .errors import DegenerateGradient

#: gradient-norm scale below which a level-set normal is meaningless
GRAD_TOL_SCALE = 1e-8


@dataclass(frozen=True)
class Dims:
    """Domain dimension n and codimension m of a graph."""

    n: int
    m: int

    def __post_init__(self):
        if not (2 <= self.n <= 4):
            raise ValueError(f"n must be in [2, 4], got {self.n}")
        if not (1 <= self.m <= 3):
            raise ValueError(f"m must be in [1, 3], got {self.m}")
        if self.n + self.m > 7:
            raise ValueError(f"n + m must be <= 7, got {self.n + self.m}")

    @property
    def k(self) -> int:
        """Ambient dimension n + m."""
        return self.n + self.m


@dataclass(frozen=True)
class AmbientPoint:
    """Point X = (x, z) of R^(n+m), split into domain and target parts."""

    x: np.ndarray
    z: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        object.__setattr__(self, "z", np.asarray(self.z, dtype=float))

    @property
    def ambient(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])


@dataclass(frozen=True)
class Cone:
    """Cone of half-angle gamma around the domain subspace."""

    gamma: float

    def __post_init__(self):
        if not (0.0 <= self.gamma < np.pi / 2):
            raise ValueError(f"gamma must lie in [0, pi/2), got {self.gamma}")


def cone_contains(cone: Cone, point: AmbientPoint) -> bool:
    """Whether |z| <= tan(gamma) |x| (boundary inclusive)."""
    return float(np.linalg.norm(point.z)) <= np.tan(cone.gamma) * float(
        np.linalg.norm(point.x)
    )


# ---------------------------------------------------------------------------
# small symmetric determinant / inverse (m <= 3), batch-friendly


def _det_inv_sym(mat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Determinant and inverse of symmetric positive matrices of size <= 3."""
    k = mat.shape[-1]
    if k == 1:
        det = mat[..., 0, 0]
        return det, (1.0 / det)[..., None, None]
    if k == 2:
        a, b, d = mat[..., 0, 0], mat[..., 0, 1], mat[..., 1, 1]
        det = a * d - b * b
        inv = np.empty_like(mat)
        inv[..., 0, 0] = d
        inv[..., 1, 1] = a
        inv[..., 0, 1] = -b
        inv[..., 1, 0] = -b
        return det, inv / det[..., None, None]
    if k == 3:
        a, b, c = mat[..., 0, 0], mat[..., 0, 1], mat[..., 0, 2]
        d, e, f = mat[..., 1, 1], mat[..., 1, 2], mat[..., 2, 2]
        det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d)
        inv = np.empty_like(mat)
        inv[..., 0, 0] = d * f - e * e
        inv[..., 0, 1] = c * e - b * f
        inv[..., 0, 2] = b * e - c * d
        inv[..., 1, 1] = a * f - c * c
        inv[..., 1, 2] = b * c - a * e
        inv[..., 2, 2] = a * d - b * b
        inv[..., 1, 0] = inv[..., 0, 1]
        inv[..., 2, 0] = inv[..., 0, 2]
        inv[..., 2, 1] = inv[..., 1, 2]
        return det, inv / det[..., None, None]
    raise ValueError(f"unsupported matrix size {k}")


def area_jets(grad: np.ndarray):
    """Shared factors of the area calculus at gradient A.

    Returns (F, G, W, P) with F the area integrand, G = (I_m + A^T A)^-1,
    W = A G (which equals (I_n + A A^T)^-1 A), and P = (I_n + A A^T)^-1.
    """
    a = np.asarray(grad, dtype=float)
    n, m = a.shape[-2], a.shape[-1]
    gram = np.einsum("...ia,...ib->...ab", a, a)
    gram[..., np.arange(m), np.arange(m)] += 1.0
    det, ginv = _det_inv_sym(gram)
    area = np.sqrt(det)
    w = np.einsum("...ia,...ab->...ib", a, ginv)
    p = -np.einsum("...ia,...ja->...ij", w, a)
    p[..., np.arange(n), np.arange(n)] += 1.0
    return area, ginv, w, p


def area_integrand(grad: np.ndarray) -> np.ndarray:
    """Area density F(A) = det(I_m + A^T A)^(1/2); always >= 1."""
    area, _, _, _ = area_jets(grad)
    return area[()] if np.ndim(area) == 0 else area


def area_gradient(grad: np.ndarray) -> np.ndarray:
    """Derivative DF(A) = F(A) (I_n + A A^T)^-1 A, same (n, m) layout as A."""
    area, _, w, _ = area_jets(grad)
    return area[..., None, None] * w


def area_hessian(grad: np.ndarray, *, step_scale: float = 1e-4) -> np.ndarray:
    """Second derivative tensor F_[ai,bj](A), indexed [a, i, b, j].

    Computed by Richardson-extrapolated central differences of the analytic
    ``area_gradient``; the step is ``step_scale * max(1, |A|_F)``.
    """
    a = np.asarray(grad, dtype=float)
    if a.ndim != 2:
        raise ValueError("area_hessian expects a single (n, m) gradient")
    n, m = a.shape
    step = step_scale * max(1.0, float(np.linalg.norm(a)))

    def central(h: float) -> np.ndarray:
        # batch all 2*n*m perturbed gradients through area_gradient at once
        eye = np.zeros((n * m, n, m))
        eye.reshape(n * m, -1)[np.arange(n * m), np.arange(n * m)] = 1.0
        plus = area_gradient(a[None] + h * eye)
        minus = area_gradient(a[None] - h * eye)
        diff = (plus - minus) / (2.0 * h)  # (n*m, n, m) indexed by (j,b) flat
        return diff.reshape(n, m, n, m)  # [j, b, i, a]

    d1 = central(step)
    d2 = central(step / 2.0)
    deriv = (4.0 * d2 - d1) / 3.0
    # reorder [j, b, i, a] -> [a, i, b, j]
    return np.transpose(deriv, (3, 2, 1, 0))


def residual_from_jets(grad: np.ndarray, hess: np.ndarray) -> np.ndarray:
    """Contraction F_[ai,bj](Du) u^b_ij for symmetric Hessian stacks.

    For ij-symmetric second derivatives the contraction collapses to
    F * G @ (P : D2u): the remaining terms of the second-derivative tensor
    are antisymmetric under (i,a) <-> (j,b) and cancel.  ``hess`` has shape
    (..., n, n, m).
    """
    area, ginv, _, p = area_jets(grad)
    traced = np.einsum("...ij,...ijb->...b", p, hess)
    return area[..., None] * np.einsum("...ab,...b->...a", ginv, traced)


# ---------------------------------------------------------------------------
# Pucci extremal operators


def _pucci_eigs(mat: np.ndarray, lam: float, upper: float) -> np.ndarray:
    if not (0.0 < lam <= upper):
        raise ValueError(f"need 0 < lambda <= Lambda, got {lam}, {upper}")
    return sym_eigvalues(symmetrize(mat))


def pucci_plus(mat: np.ndarray, lam: float, upper: float) -> float:
    """Maximal Pucci operator: Lambda |N+| - lambda |N-|."""
    eig = _pucci_eigs(mat, lam, upper)
    return float(upper * eig[eig > 0].sum() + lam * eig[eig < 0].sum())


def pucci_minus(mat: np.ndarray, lam: float, upper: float) -> float:
    """Minimal Pucci operator: lambda |N+| - Lambda |N-|."""
    eig = _pucci_eigs(mat, lam, upper)
    return float(lam * eig[eig > 0].sum() + upper * eig[eig < 0].sum())


# ---------------------------------------------------------------------------
# tangential Laplacian over normal n-planes


def tangential_laplacian_batch(hessians: np.ndarray, gradients: np.ndarray,
                               n: int):
    """Min over n-planes L orthogonal to each gradient of tr(H restricted to L).

    By Ky Fan this is the sum of the n smallest eigenvalues of the Hessian
    restricted to the gradient's orthogonal hyperplane.

    Returns
    -------
    margins : (...,) array (NaN where degenerate)
    grad_norms : (...,) array
    degenerate : (...,) bool mask where |grad| < GRAD_TOL_SCALE * (1 + |H|_F)
    """
    h = np.asarray(hessians, dtype=float)
    g = np.asarray(gradients, dtype=float)
    k = h.shape[-1]
    if not (0 < n < k):
        raise ValueError(f"need 0 < n < {k}, got n={n}")
    grad_norms = np.linalg.norm(g, axis=-1)
    hnorm = np.linalg.norm(h, axis=(-2, -1))
    degenerate = grad_norms < GRAD_TOL_SCALE * (1.0 + hnorm)

    safe_g = np.where(degenerate[..., None], 0.0, g)
    safe_g[..., 0] = np.where(degenerate, 1.0, safe_g[..., 0])
    basis = tangent_basis(safe_g)
    restricted = np.einsum("...ki,...kl,...lj->...ij", basis, h, basis)
    eig = sym_eigvalues(restricted)
    margins = eig[..., :n].sum(axis=-1)
    margins = np.where(degenerate, np.nan, margins)
    return margins, grad_norms, degenerate


def tangential_laplacian_min(hessian: np.ndarray, gradient: np.ndarray,
                             n: int) -> float:
    """Single-point variant; raises DegenerateGradient below the norm floor."""
    margins, grad_norms, degenerate = tangential_laplacian_batch(
        np.asarray(hessian, dtype=float)[None],
        np.asarray(gradient, dtype=float)[None], n)
    if bool(degenerate[0]):
        raise DegenerateGradient(
            f"|grad| = {grad_norms[0]:.3e} below tolerance for a level-set normal")
    return float(margins[0])
