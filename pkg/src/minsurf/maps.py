"""Affine, quadratic and polynomial maps R^n -> R^m.

All map classes share the evaluation interface used throughout the
toolkit: ``values(x) -> (..., m)``, ``jacobians(x) -> (..., n, m)`` with
entry (i, a) = d_i u^a, and ``hessians(x) -> (..., n, n, m)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

HARMONIC_TRACE_TOL = 1e-12


@dataclass(frozen=True)
class AffineMap:
    """l(x) = b + A^T x with A the (n, m) slope array."""

    b: np.ndarray
    A: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        if self.A.ndim != 2 or self.A.shape[1] != self.b.shape[0]:
            raise ValueError(f"slope shape {self.A.shape} does not match b {self.b.shape}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]

    def values(self, x: np.ndarray) -> np.ndarray:
        return np.asarray(x, dtype=float) @ self.A + self.b

    def jacobians(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(self.A, x.shape[:-1] + self.A.shape).copy()

    def hessians(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.zeros(x.shape[:-1] + (self.n, self.n, self.m))

    __call__ = values

    @staticmethod
    def zero(n: int, m: int) -> "AffineMap":
        return AffineMap(np.zeros(m), np.zeros((n, m)))


@dataclass(frozen=True)
class QuadraticMap:
    """q(x) = b + A^T x + (1/2) x^T Q^a x per component, Q trace-free.

    ``quad`` has shape (m, n, n); each component slice must be symmetric and
    harmonic (trace <= HARMONIC_TRACE_TOL), which is the invariant every
    caller relies on.
    """

    b: np.ndarray
    A: np.ndarray
    quad: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "b", np.atleast_1d(np.asarray(self.b, dtype=float)))
        object.__setattr__(self, "A", np.asarray(self.A, dtype=float))
        object.__setattr__(self, "quad", np.asarray(self.quad, dtype=float))
        n, m = self.A.shape
        if self.quad.shape != (m, n, n):
            raise ValueError(f"quad shape {self.quad.shape}, expected {(m, n, n)}")
        if np.max(np.abs(self.quad - np.swapaxes(self.quad, 1, 2))) > 1e-13:
            raise ValueError("quadratic coefficient slices must be symmetric")
        traces = np.trace(self.quad, axis1=1, axis2=2)
        if np.max(np.abs(traces)) > HARMONIC_TRACE_TOL * (1.0 + np.max(np.abs(self.quad))):
            raise ValueError(f"quadratic part not harmonic: traces {traces}")

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.A.shape[1]

    @property
    def affine_part(self) -> AffineMap:
        return AffineMap(self.b, self.A)

    def coefficient_bound(self) -> float:
        """Largest absolute quadratic coefficient."""
        return float(np.max(np.abs(self.quad))) if self.quad.size else 0.0

    def values(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lin = x @ self.A + self.b
        qx = np.einsum("aij,...i,...j->...a", self.quad, x, x)
        return lin + 0.5 * qx

    def jacobians(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.A + np.einsum("aij,...j->...ia", self.quad, x)

    def hessians(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        h = np.transpose(self.quad, (1, 2, 0))
        return np.broadcast_to(h, x.shape[:-1] + h.shape).copy()

    __call__ = values

    @staticmethod
    def zero(n: int, m: int) -> "QuadraticMap":
        return QuadraticMap(np.zeros(m), np.zeros((n, m)), np.zeros((m, n, n)))


@dataclass(frozen=True)
class PolynomialMap:
    """Componentwise polynomial map given as (coefficient, exponent) terms.

    ``terms[a]`` is a list of ``(c, exps)`` pairs with ``exps`` a length-n
    tuple of nonnegative integers; component a is sum of c * x**exps.
    """

    n: int
    m: int
    terms: tuple = field(default_factory=tuple)

    def _eval(self, x: np.ndarray, dx: tuple[int, ...]) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape[:-1] + (self.m,))
        for a, comp in enumerate(self.terms):
            for c, exps in comp:
                coeff = float(c)
                term = None
                for i, e in enumerate(exps):
                    e_eff = e
                    for _ in range(dx[i]):
                        coeff *= e_eff
                        e_eff -= 1
                    if coeff == 0.0 or e_eff < 0:
                        coeff = 0.0
                        break
                    if e_eff > 0:
                        f = x[..., i] ** e_eff
                        term = f if term is None else term * f
                if coeff != 0.0:
                    out[..., a] += coeff * (term if term is not None else 1.0)
        return out

    def values(self, x: np.ndarray) -> np.ndarray:
        return self._eval(x, (0,) * self.n)

    def jacobians(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape[:-1] + (self.n, self.m))
        for i in range(self.n):
            dx = tuple(1 if j == i else 0 for j in range(self.n))
            out[..., i, :] = self._eval(x, dx)
        return out

    def hessians(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.empty(x.shape[:-1] + (self.n, self.n, self.m))
        for i in range(self.n):
            for j in range(i, self.n):
                dx = tuple((1 if l == i else 0) + (1 if l == j else 0)
                           for l in range(self.n))
                val = self._eval(x, dx)
                out[..., i, j, :] = val
                out[..., j, i, :] = val
        return out

    __call__ = values


def harmonic_quadratic_basis(n: int) -> list[np.ndarray]:
    """Symmetric trace-free (n, n) matrices spanning harmonic quadratics."""
    basis = []
    for i in range(n):
        for j in range(i + 1, n):
            b = np.zeros((n, n))
            b[i, j] = b[j, i] = 1.0
            basis.append(b)
    for i in range(n - 1):
        b = np.zeros((n, n))
        b[i, i] = 1.0
        b[i + 1, i + 1] = -1.0
        basis.append(b)
    return basis


def harmonic_cubic_terms(n: int) -> list[list[tuple[float, tuple]]]:
    """Scalar harmonic cubics as PolynomialMap term lists."""
    cubics = []
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            # x_i^3 - 3 x_i x_j^2
            e1 = tuple(3 if l == i else 0 for l in range(n))
            e2 = tuple((1 if l == i else 0) + (2 if l == j else 0) for l in range(n))
            cubics.append([(1.0, e1), (-3.0, e2)])
    for i in range(n):
        for j in range(i + 1, n):
            for l in range(j + 1, n):
                exps = tuple(1 if v in (i, j, l) else 0 for v in range(n))
                cubics.append([(1.0, exps)])
    return cubics
