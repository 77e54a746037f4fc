"""Tensor-product cubic B-spline interpolation with analytic derivatives.

Coefficients come from scipy's spline prefilter (mirror boundary), and the
basis functions are evaluated directly, which gives exact first and second
derivatives of the C^2 interpolant.  Used to lift discrete harmonic grids
into ambient scalar fields.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .grid import GridMap


def _bspline3(t: np.ndarray, order: int) -> np.ndarray:
    """Cubic B-spline kernel and derivatives, |t| < 2."""
    at = np.abs(t)
    s = np.sign(t)
    if order == 0:
        near = 2.0 / 3.0 - at ** 2 + at ** 3 / 2.0
        far = (2.0 - at) ** 3 / 6.0
    elif order == 1:
        near = s * (-2.0 * at + 1.5 * at ** 2)
        far = -s * (2.0 - at) ** 2 / 2.0
    elif order == 2:
        near = -2.0 + 3.0 * at
        far = 2.0 - at
    else:
        raise ValueError("order must be 0, 1 or 2")
    out = np.where(at < 1.0, near, np.where(at < 2.0, far, 0.0))
    return out


class SplineMap:
    """C^2 interpolant of a GridMap, exposing values/jacobians/hessians.

    Evaluation is reliable strictly inside the lattice cube; the mirror
    boundary affects only a two-cell collar, and callers here stay well
    inside the mask.
    """

    def __init__(self, gm: GridMap):
        self.n, self.m = gm.dims.n, gm.dims.m
        self.N = gm.N
        self.h = gm.h
        self.origin = -1.0
        self.coeffs = np.stack([
            ndimage.spline_filter(gm.values[..., a], order=3, mode="mirror")
            for a in range(self.m)
        ], axis=-1)

    def _weights(self, x: np.ndarray, deriv: tuple[int, ...]):
        x = np.asarray(x, dtype=float)
        t = (x - self.origin) / self.h  # lattice units
        base = np.floor(t).astype(np.int64) - 1
        base = np.clip(base, -1, self.N - 3)
        offsets = np.arange(4)
        idx = base[..., None, :] + offsets[:, None]  # (..., 4, n)
        # mirror reflection for the stray index at the edges
        idx = np.abs(idx)
        idx = np.where(idx > self.N - 1, 2 * (self.N - 1) - idx, idx)
        w = np.empty(x.shape[:-1] + (4, self.n))
        for d in range(self.n):
            rel = t[..., None, d] - (base[..., None, d] + offsets)
            w[..., d] = _bspline3(rel, deriv[d]) / self.h ** deriv[d]
        return idx, w

    def _contract(self, x: np.ndarray, deriv: tuple[int, ...]) -> np.ndarray:
        idx, w = self._weights(x, deriv)
        out = np.zeros(np.asarray(x).shape[:-1] + (self.m,))
        corner = np.empty(idx.shape[:-2] + (self.n,), dtype=np.int64)
        for offs in np.ndindex(*([4] * self.n)):
            weight = None
            for d, o in enumerate(offs):
                corner[..., d] = idx[..., o, d]
                f = w[..., o, d]
                weight = f if weight is None else weight * f
            vals = self.coeffs[tuple(corner[..., d] for d in range(self.n))]
            out += weight[..., None] * vals
        return out

    def values(self, x: np.ndarray) -> np.ndarray:
        return self._contract(x, (0,) * self.n)

    def jacobians(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape[:-1] + (self.n, self.m))
        for i in range(self.n):
            deriv = tuple(1 if d == i else 0 for d in range(self.n))
            out[..., i, :] = self._contract(x, deriv)
        return out

    def hessians(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape[:-1] + (self.n, self.n, self.m))
        for i in range(self.n):
            for j in range(i, self.n):
                deriv = tuple((1 if d == i else 0) + (1 if d == j else 0)
                              for d in range(self.n))
                val = self._contract(x, deriv)
                out[..., i, j, :] = val
                out[..., j, i, :] = val
        return out

    __call__ = values
