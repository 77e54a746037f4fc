"""Ambient C^2 scalar fields and the built-in comparison families.

A field exposes batch evaluation over ambient points X = (x, z) in
R^(n+m): ``values``, ``gradients`` and ``hessians``.  Analytic built-ins
carry exact derivatives; arbitrary callables can be wrapped with finite
differences.  Distance-type families declare a singular-tube exclusion
that region certification honors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .geometry import pucci_plus
from .maps import AffineMap, QuadraticMap

#: fraction of eps excluded around the non-smooth tube of |z - q(x)|
RHO_MIN = 0.1


class ScalarField:
    """Base class; subclasses fill in the batch evaluation methods."""

    family = "abstract"
    tag = "analytic"

    def __init__(self, n: int, m: int, params: dict | None = None):
        self.n, self.m = n, m
        self.params = dict(params or {})

    @property
    def k(self) -> int:
        return self.n + self.m

    def split(self, pts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        pts = np.asarray(pts, dtype=float)
        return pts[..., :self.n], pts[..., self.n:]

    def values(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def gradients(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hessians(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def exclusion_mask(self, pts: np.ndarray) -> np.ndarray:
        """Points too close to a declared singularity to certify."""
        pts = np.asarray(pts, dtype=float)
        return np.zeros(pts.shape[:-1], dtype=bool)

    # single-point conveniences
    def value(self, pt) -> float:
        return float(self.values(np.asarray(pt, dtype=float)[None])[0])

    def gradient(self, pt) -> np.ndarray:
        return self.gradients(np.asarray(pt, dtype=float)[None])[0]

    def hessian(self, pt) -> np.ndarray:
        return self.hessians(np.asarray(pt, dtype=float)[None])[0]

    def describe(self) -> dict:
        return {"family": self.family, "tag": self.tag,
                "n": self.n, "m": self.m, "params": self.params}


# ---------------------------------------------------------------------------
# concave bump phi shared by the distance families


@dataclass(frozen=True)
class PhiBump:
    """Scalar phi on the domain ball with analytic derivatives."""

    value_fn: Callable
    gradient_fn: Callable
    hessian_fn: Callable
    label: str = "custom"

    def values(self, x):
        return self.value_fn(np.asarray(x, dtype=float))

    def gradients(self, x):
        return self.gradient_fn(np.asarray(x, dtype=float))

    def hessians(self, x):
        return self.hessian_fn(np.asarray(x, dtype=float))


def radial_bump(n: int, amplitude: float, label: str = "radial") -> PhiBump:
    """phi(x) = amplitude (1 - |x|^2); concave, maximal at the origin."""
    eye = np.eye(n)

    def val(x):
        return amplitude * (1.0 - np.sum(x * x, axis=-1))

    def grad(x):
        return -2.0 * amplitude * x

    def hess(x):
        return np.broadcast_to(-2.0 * amplitude * eye,
                               x.shape[:-1] + (n, n)).copy()

    return PhiBump(val, grad, hess, label=label)


def zero_bump(n: int) -> PhiBump:
    return radial_bump(n, 0.0, label="zero")


def default_phi(n: int) -> PhiBump:
    """The admissible default (1 - |x|^2) / (4n)."""
    return radial_bump(n, 1.0 / (4.0 * n), label="default")


def check_phi_admissible(phi: PhiBump, n: int, c0: float,
                         points: np.ndarray) -> dict:
    """Sampled admissibility data for a phi candidate.

    Reports the C^(1,1)-type bounds (sup |phi|, |grad phi|, |D2 phi|) and
    the worst maximal-Pucci value of D2 phi with ellipticity (c0, 1); the
    family precondition needs the former <= 1 and the latter < 0.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    vals = np.abs(phi.values(pts))
    grads = np.linalg.norm(phi.gradients(pts), axis=-1)
    hess = phi.hessians(pts)
    hnorm = np.linalg.norm(hess, axis=(-2, -1), ord=2)
    pucci = max(pucci_plus(h, c0, 1.0) for h in hess)
    return {
        "sup_value": float(vals.max()),
        "sup_gradient": float(grads.max()),
        "sup_hessian": float(hnorm.max()),
        "c11_bound": float(max(vals.max(), grads.max(), hnorm.max())),
        "max_pucci_plus": float(pucci),
    }


def default_ellipticity(n: int, slope_norm: float) -> float:
    """Conservative Pucci ellipticity floor c0(n, |A|)."""
    return 1.0 / (4.0 * n * (1.0 + slope_norm ** 2) ** 2)


# ---------------------------------------------------------------------------
# distance-to-graph families: |z - q(x)| - eps phi(x)


class _DistanceField(ScalarField):
    """Shared implementation for an affine or quadratic anchor map."""

    def __init__(self, anchor, eps: float, phi: PhiBump | None, params: dict):
        if eps <= 0:
            raise ValueError(f"eps must be positive, got {eps}")
        n, m = anchor.n, anchor.m
        super().__init__(n, m, params)
        self.anchor = anchor
        self.eps = eps
        self.phi = phi if phi is not None else default_phi(n)
        self.params.setdefault("eps", eps)
        self.params.setdefault("phi", self.phi.label)

    def _parts(self, pts):
        x, z = self.split(pts)
        r = z - self.anchor.values(x)
        rho = np.linalg.norm(r, axis=-1)
        return x, z, r, rho

    def values(self, pts):
        x, _, _, rho = self._parts(pts)
        return rho - self.eps * self.phi.values(x)

    def gradients(self, pts):
        x, _, r, rho = self._parts(pts)
        rhat = r / rho[..., None]
        jac = self.anchor.jacobians(x)
        gx = -np.einsum("...ia,...a->...i", jac, rhat) \
            - self.eps * self.phi.gradients(x)
        return np.concatenate([gx, rhat], axis=-1)

    def hessians(self, pts):
        x, _, r, rho = self._parts(pts)
        rhat = r / rho[..., None]
        jac = self.anchor.jacobians(x)
        proj = -rhat[..., :, None] * rhat[..., None, :]
        proj[..., np.arange(self.m), np.arange(self.m)] += 1.0
        proj = proj / rho[..., None, None]
        out = np.zeros(np.asarray(pts).shape[:-1] + (self.k, self.k))
        jp = np.einsum("...ia,...ab->...ib", jac, proj)
        hxx = np.einsum("...ia,...ja->...ij", jp, jac) \
            - np.einsum("...ija,...a->...ij", self.anchor.hessians(x), rhat) \
            - self.eps * self.phi.hessians(x)
        out[..., :self.n, :self.n] = hxx
        out[..., :self.n, self.n:] = -jp
        out[..., self.n:, :self.n] = -np.swapaxes(jp, -1, -2)
        out[..., self.n:, self.n:] = proj
        return out

    def exclusion_mask(self, pts):
        _, _, _, rho = self._parts(pts)
        return rho < RHO_MIN * self.eps


class AffineDistanceField(_DistanceField):
    """H = |z - l(x)| - eps phi(x) around an affine anchor graph."""

    family = "affine_distance"

    def __init__(self, anchor: AffineMap, eps: float,
                 phi: PhiBump | None = None):
        super().__init__(anchor, eps, phi,
                         {"slope_norm": float(np.linalg.norm(anchor.A))})


class QuadraticDistanceField(_DistanceField):
    """H = |z - q(x)| - eps phi(x) around a harmonic quadratic anchor.

    The anchor's quadratic coefficients must respect the eps^beta budget,
    beta in (1/2, 1); the default phi is eps^(2 beta - 1) (1 - |x|^2)/(2n),
    whose Laplacian is exactly -eps^(2 beta - 1).
    """

    family = "quadratic_distance"

    def __init__(self, anchor: QuadraticMap, eps: float, beta: float,
                 phi: PhiBump | None = None):
        if not (0.5 < beta < 1.0):
            raise ValueError(f"beta must lie in (1/2, 1), got {beta}")
        bound = eps ** beta
        if anchor.coefficient_bound() > bound * (1.0 + 1e-9):
            raise ValueError(
                f"quadratic coefficients {anchor.coefficient_bound():.3e} exceed "
                f"eps^beta = {bound:.3e}")
        if phi is None:
            phi = radial_bump(anchor.n, eps ** (2.0 * beta - 1.0) / (2.0 * anchor.n),
                              label="default_quadratic")
        super().__init__(anchor, eps, phi, {"beta": beta})


# ---------------------------------------------------------------------------
# squared-deviation-from-harmonic family: |f|^2 + eta |x|^2


class _ZeroXMap:
    def __init__(self, n, m):
        self.n, self.m = n, m

    def values(self, x):
        return np.zeros(np.asarray(x).shape[:-1] + (self.m,))

    def jacobians(self, x):
        return np.zeros(np.asarray(x).shape[:-1] + (self.n, self.m))

    def hessians(self, x):
        return np.zeros(np.asarray(x).shape[:-1] + (self.n, self.n, self.m))


class HarmonicDeviationField(ScalarField):
    """H = |(z - q(x))/eps - h(x)|^2 + eta |x|^2.

    ``model`` is the affine or harmonic-quadratic approximant being tested
    (may be None for zero) and ``h`` the harmonic correction, either an
    analytic map or a spline interpolant of a discretely solved grid.
    """

    family = "harmonic_deviation"

    def __init__(self, h, model, eps: float, eta: float, n: int, m: int):
        if eps <= 0 or eta <= 0:
            raise ValueError(f"eps and eta must be positive, got {eps}, {eta}")
        super().__init__(n, m, {"eps": eps, "eta": eta})
        self.h = h if h is not None else _ZeroXMap(n, m)
        self.model = model if model is not None else _ZeroXMap(n, m)
        self.eps = eps
        self.eta = eta
        if hasattr(self.h, "tag"):
            self.tag = self.h.tag

    def _f(self, x, z):
        return (z - self.model.values(x)) / self.eps - self.h.values(x)

    def _fx(self, x):
        return -self.model.jacobians(x) / self.eps - self.h.jacobians(x)

    def values(self, pts):
        x, z = self.split(pts)
        f = self._f(x, z)
        return np.sum(f * f, axis=-1) + self.eta * np.sum(x * x, axis=-1)

    def gradients(self, pts):
        x, z = self.split(pts)
        f = self._f(x, z)
        fx = self._fx(x)
        gx = 2.0 * np.einsum("...ia,...a->...i", fx, f) + 2.0 * self.eta * x
        gz = 2.0 * f / self.eps
        return np.concatenate([gx, gz], axis=-1)

    def hessians(self, pts):
        x, z = self.split(pts)
        f = self._f(x, z)
        fx = self._fx(x)
        fxx = -self.model.hessians(x) / self.eps - self.h.hessians(x)
        out = np.zeros(np.asarray(pts).shape[:-1] + (self.k, self.k))
        hxx = 2.0 * np.einsum("...ia,...ja->...ij", fx, fx) \
            + 2.0 * np.einsum("...ija,...a->...ij", fxx, f)
        hxx[..., np.arange(self.n), np.arange(self.n)] += 2.0 * self.eta
        out[..., :self.n, :self.n] = hxx
        hxz = 2.0 * fx / self.eps
        out[..., :self.n, self.n:] = hxz
        out[..., self.n:, :self.n] = np.swapaxes(hxz, -1, -2)
        zz = np.zeros(np.asarray(pts).shape[:-1] + (self.m, self.m))
        zz[..., np.arange(self.m), np.arange(self.m)] = 2.0 / self.eps ** 2
        out[..., self.n:, self.n:] = zz
        return out


# ---------------------------------------------------------------------------
# simple fields and the raw-callback hook


class SphereField(ScalarField):
    """H = sign |X - center|^2; the canonical strict (anti-)comparison field."""

    family = "sphere"

    def __init__(self, center: np.ndarray, n: int, m: int, sign: float = 1.0):
        super().__init__(n, m, {"sign": sign})
        self.center = np.asarray(center, dtype=float)
        self.sign = float(sign)

    def values(self, pts):
        d = np.asarray(pts, dtype=float) - self.center
        return self.sign * np.sum(d * d, axis=-1)

    def gradients(self, pts):
        return 2.0 * self.sign * (np.asarray(pts, dtype=float) - self.center)

    def hessians(self, pts):
        pts = np.asarray(pts, dtype=float)
        return np.broadcast_to(2.0 * self.sign * np.eye(self.k),
                               pts.shape[:-1] + (self.k, self.k)).copy()


class RawField(ScalarField):
    """Wrap arbitrary callables; missing derivatives fall back to central FD."""

    family = "raw"

    def __init__(self, value_fn, n: int, m: int, gradient_fn=None,
                 hessian_fn=None, fd_step: float = 1e-5, params=None):
        super().__init__(n, m, params)
        self._value = value_fn
        self._gradient = gradient_fn
        self._hessian = hessian_fn
        self.fd_step = fd_step
        self.tag = "analytic" if (gradient_fn and hessian_fn) else "fd-wrapped"

    def values(self, pts):
        return np.asarray(self._value(np.asarray(pts, dtype=float)), dtype=float)

    def gradients(self, pts):
        pts = np.asarray(pts, dtype=float)
        if self._gradient is not None:
            return np.asarray(self._gradient(pts), dtype=float)
        out = np.empty(pts.shape[:-1] + (self.k,))
        for d in range(self.k):
            e = np.zeros(self.k)
            e[d] = self.fd_step
            out[..., d] = (self.values(pts + e) - self.values(pts - e)) \
                / (2.0 * self.fd_step)
        return out

    def hessians(self, pts):
        pts = np.asarray(pts, dtype=float)
        if self._hessian is not None:
            return np.asarray(self._hessian(pts), dtype=float)
        out = np.empty(pts.shape[:-1] + (self.k, self.k))
        for d in range(self.k):
            e = np.zeros(self.k)
            e[d] = self.fd_step
            diff = (self.gradients(pts + e) - self.gradients(pts - e)) \
                / (2.0 * self.fd_step)
            out[..., d, :] = diff
        return 0.5 * (out + np.swapaxes(out, -1, -2))


def conjugate_by_rigid_motion(field: ScalarField, rotation: np.ndarray,
                              shift: np.ndarray | None = None) -> RawField:
    """Field X -> H(R X + t); derivatives transform exactly."""
    rot = np.asarray(rotation, dtype=float)
    t = np.zeros(field.k) if shift is None else np.asarray(shift, dtype=float)

    def val(pts):
        return field.values(pts @ rot.T + t)

    def grad(pts):
        return field.gradients(pts @ rot.T + t) @ rot

    def hess(pts):
        h = field.hessians(pts @ rot.T + t)
        return np.einsum("ki,...kl,lj->...ij", rot, h, rot)

    out = RawField(val, field.n, field.m, gradient_fn=grad, hessian_fn=hess,
                   params={"base": field.family})
    out.tag = field.tag
    return out
