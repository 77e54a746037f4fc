"""Smallest enclosing ball of a finite point set, exact for dimension <= 3.

Welzl-style recursion on the support set with the move-to-front heuristic.
Recursion depth is bounded by d + 2 (it only grows the support set), so
large inputs are safe, and the point order is deterministic for
reproducibility.
"""

from __future__ import annotations

import numpy as np

_CONTAIN_TOL = 1e-13


def _circumsphere(support: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and squared radius through <= d+1 points (least-norm center)."""
    if len(support) == 1:
        return support[0].copy(), 0.0
    u = support[1:] - support[0]
    rhs = 0.5 * np.sum(u * u, axis=1)
    gram = u @ u.T
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = support[0] + lam @ u
    r2 = float(np.max(np.sum((support - center) ** 2, axis=1)))
    return center, r2


def _contains(center: np.ndarray, r2: float, p: np.ndarray) -> bool:
    return float(np.sum((p - center) ** 2)) <= r2 + _CONTAIN_TOL * (1.0 + r2)


def _mtf_ball(pts: np.ndarray, order: list[int], end: int,
              support: list[int]) -> tuple[np.ndarray, float]:
    d = pts.shape[1]
    if support:
        center, r2 = _circumsphere(pts[support])
    else:
        center, r2 = pts[0].copy(), -1.0  # contains nothing
    if len(support) == d + 1:
        return center, r2
    i = 0
    while i < end:
        p = pts[order[i]]
        if not _contains(center, r2, p):
            center, r2 = _mtf_ball(pts, order, i, support + [order[i]])
            moved = order.pop(i)
            order.insert(0, moved)
        i += 1
    return center, r2


def smallest_enclosing_ball(points: np.ndarray) -> tuple[np.ndarray, float]:
    """Center and radius of the minimal ball containing ``points``.

    Parameters
    ----------
    points : (P, d) array with d <= 3.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.ndim != 2 or pts.shape[1] > 3:
        raise ValueError(f"expected (P, d<=3) points, got shape {pts.shape}")
    if pts.shape[0] == 0:
        raise ValueError("empty point set has no enclosing ball")
    pts = np.unique(pts, axis=0)
    if pts.shape[1] == 1:
        lo, hi = float(pts.min()), float(pts.max())
        return np.array([(lo + hi) / 2.0]), (hi - lo) / 2.0
    if pts.shape[0] == 1:
        return pts[0].copy(), 0.0
    center, r2 = _mtf_ball(pts, list(range(len(pts))), len(pts), [])
    radius = float(np.sqrt(max(r2, 0.0)))
    return center, radius
