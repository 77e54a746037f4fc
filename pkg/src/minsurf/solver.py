"""Desk-scale solvers for the minimal surface system and the Laplacian.

The Dirichlet solver runs the damped explicit descent u <- u + tau R(u)
with R the nondivergence residual, starting from the discrete harmonic
extension of the boundary data.  Nonconvergence is a reported outcome
(the report says which stopping rule fired), not an exception: the
Dirichlet problem for this system genuinely may lack solutions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sparse
from scipy.sparse.linalg import cg

from .eigen import sym_eigvalues
from .errors import Diverged, NotConverged
from .geometry import Dims, area_jets
from .grid import GridMap, ball_mask

LAPLACE_TOL = 1e-10


def default_grid_n(dims: Dims) -> int:
    """Default points per axis: 41 up to three dimensions, 21 in four."""
    return 41 if dims.n <= 3 else 21


class _DescentWorkspace:
    """Flat neighbor indices and scratch layout for the descent hot loop.

    The loop works in (small-index, P) layout so every vector op runs on a
    contiguous slab; results match the public residual evaluation to
    roundoff (same stencils, same closed-form coefficient algebra).
    """

    def __init__(self, gm: GridMap):
        st = gm._st
        self.idx = np.stack([st.nbr[o] for o in st.offsets])
        self.row = {o: i for i, o in enumerate(st.offsets)}
        self.interior = st.interior_flat
        self.n, self.m = gm.dims.n, gm.dims.m
        self.h = st.h
        n, m = self.n, self.m
        npts = len(self.interior)
        size = gm.values.size // m
        # scratch reused across iterations; fresh multi-MB allocations per
        # step would dominate the loop via page faults
        self._vt = np.empty((m, size))
        self._nb = np.empty((m, len(st.offsets), npts))
        self._cen = np.empty((m, npts))
        self._du = np.empty((n, m, npts))
        self._d2 = np.empty((n, n, m, npts))
        self._gram = np.empty((m, m, npts))
        self._w = np.empty((n, m, npts))
        self._pinv = np.empty((n, n, npts))
        self._traced = np.empty((m, npts))
        self._res = np.empty((npts, m))
        self._tmp = np.empty((m, npts))

    def _unit(self, i, s):
        return tuple(s if l == i else 0 for l in range(self.n))

    def _pair(self, i, si, j, sj):
        o = [0] * self.n
        o[i], o[j] = si, sj
        return tuple(o)

    def residual(self, values: np.ndarray):
        """Nondivergence residual at interior points plus shared factors.

        Returns (res (P, m), area (P,), ginv (m, m, P), pinv (n, n, P)).
        """
        n, m, h = self.n, self.m, self.h
        vt, nb, cen = self._vt, self._nb, self._cen
        vt[:] = values.reshape(-1, m).T
        np.take(vt, self.idx, axis=1, out=nb)  # (m, n_off, P)
        np.take(vt, self.interior, axis=1, out=cen)

        du, d2 = self._du, self._d2
        inv2h = 0.5 / h
        for i in range(n):
            ip, im = self.row[self._unit(i, 1)], self.row[self._unit(i, -1)]
            np.subtract(nb[:, ip], nb[:, im], out=du[i])
            du[i] *= inv2h

        invh2 = 1.0 / (h * h)
        tmp = self._tmp
        for i in range(n):
            ip, im = self.row[self._unit(i, 1)], self.row[self._unit(i, -1)]
            np.add(nb[:, ip], nb[:, im], out=tmp)
            tmp -= cen
            tmp -= cen
            np.multiply(tmp, invh2, out=d2[i, i])
        for i in range(n):
            for j in range(i + 1, n):
                pp = self.row[self._pair(i, 1, j, 1)]
                pm = self.row[self._pair(i, 1, j, -1)]
                mp = self.row[self._pair(i, -1, j, 1)]
                mm = self.row[self._pair(i, -1, j, -1)]
                np.subtract(nb[:, pp], nb[:, pm], out=tmp)
                tmp -= nb[:, mp]
                tmp += nb[:, mm]
                np.multiply(tmp, 0.25 * invh2, out=d2[i, j])
                d2[j, i] = d2[i, j]

        gram = self._gram
        for a in range(m):
            for b in range(a, m):
                acc = gram[a, b]
                np.multiply(du[0, a], du[0, b], out=acc)
                for i in range(1, n):
                    acc += du[i, a] * du[i, b]
                gram[b, a] = acc
            gram[a, a] += 1.0

        det, ginv = _det_inv_stack(gram)
        area = np.sqrt(det)

        w = self._w
        for i in range(n):
            for a in range(m):
                acc = w[i, a]
                np.multiply(du[i, 0], ginv[0, a], out=acc)
                for b in range(1, m):
                    acc += du[i, b] * ginv[b, a]

        pinv = self._pinv
        for i in range(n):
            for j in range(i, n):
                acc = pinv[i, j]
                np.multiply(w[i, 0], du[j, 0], out=acc)
                for a in range(1, m):
                    acc += w[i, a] * du[j, a]
                np.negative(acc, out=acc)
                pinv[j, i] = acc
            pinv[i, i] += 1.0

        traced = self._traced
        traced[:] = 0.0
        for b in range(m):
            for i in range(n):
                traced[b] += pinv[i, i] * d2[i, i, b]
                for j in range(i + 1, n):
                    traced[b] += 2.0 * pinv[i, j] * d2[i, j, b]

        res = self._res
        for a in range(m):
            acc = ginv[a, 0] * traced[0]
            for b in range(1, m):
                acc += ginv[a, b] * traced[b]
            acc *= area
            res[:, a] = acc
        return res, area, ginv, pinv


def _det_inv_stack(mat: np.ndarray):
    """Det and inverse for symmetric positive (k, k, P) stacks, k <= 3."""
    k = mat.shape[0]
    if k == 1:
        det = mat[0, 0]
        return det, (1.0 / det)[None, None]
    if k == 2:
        a, b, d = mat[0, 0], mat[0, 1], mat[1, 1]
        det = a * d - b * b
        inv = np.empty_like(mat)
        inv[0, 0] = d / det
        inv[1, 1] = a / det
        inv[0, 1] = -b / det
        inv[1, 0] = inv[0, 1]
        return det, inv
    a, b, c = mat[0, 0], mat[0, 1], mat[0, 2]
    d, e, f = mat[1, 1], mat[1, 2], mat[2, 2]
    det = a * (d * f - e * e) - b * (b * f - c * e) + c * (b * e - c * d)
    inv = np.empty_like(mat)
    inv[0, 0] = (d * f - e * e) / det
    inv[0, 1] = (c * e - b * f) / det
    inv[0, 2] = (b * e - c * d) / det
    inv[1, 1] = (a * f - c * c) / det
    inv[1, 2] = (b * c - a * e) / det
    inv[2, 2] = (a * d - b * b) / det
    inv[1, 0] = inv[0, 1]
    inv[2, 0] = inv[0, 2]
    inv[2, 1] = inv[1, 2]
    return det, inv


def _lam_max_stack(mat: np.ndarray) -> np.ndarray:
    """Largest eigenvalue of symmetric (k, k, P) stacks."""
    k = mat.shape[0]
    if k == 1:
        return mat[0, 0]
    if k == 2:
        a, b, d = mat[0, 0], mat[0, 1], mat[1, 1]
        half = 0.5 * (a + d)
        rad = np.sqrt(0.25 * (a - d) ** 2 + b * b)
        return half + rad
    return sym_eigvalues(np.ascontiguousarray(np.moveaxis(mat, 2, 0)))[:, -1]


@dataclass
class SolveReport:
    """Outcome of one Dirichlet descent."""

    iterations: int
    final_sup_residual: float
    converged: bool
    tau: float
    status: str
    lambda_hat: float
    area_monotone: bool
    max_area_increase: float

    def to_dict(self) -> dict:
        return {
            "iterations": self.iterations,
            "final_sup_residual": self.final_sup_residual,
            "converged": self.converged,
            "tau": self.tau,
            "status": self.status,
            "lambda_hat": self.lambda_hat,
            "area_monotone": self.area_monotone,
            "max_area_increase": self.max_area_increase,
        }


# ---------------------------------------------------------------------------
# discrete Laplacian


def _laplace_interior(gm: GridMap, tol: float) -> np.ndarray:
    """Solve the 2n+1-point discrete Laplace system on the interior."""
    st = gm._st
    n, m = gm.dims.n, gm.dims.m
    rows_n = len(st.interior_flat)
    if rows_n == 0:
        raise NotConverged("mask has no interior points at this resolution")
    flat = gm.values.reshape(-1, m)

    diag = np.full(rows_n, 2.0 * n)
    entries_r, entries_c, entries_v = [], [], []
    rhs = np.zeros((rows_n, m))
    for i in range(n):
        for s in (1, -1):
            off = tuple(s if l == i else 0 for l in range(n))
            nbr_flat = st.nbr[off]
            nbr_row = st.row_of[nbr_flat]
            inside = nbr_row >= 0
            entries_r.append(np.flatnonzero(inside))
            entries_c.append(nbr_row[inside])
            entries_v.append(np.full(int(inside.sum()), -1.0))
            rhs[~inside] += flat[nbr_flat[~inside]]
    entries_r.append(np.arange(rows_n))
    entries_c.append(np.arange(rows_n))
    entries_v.append(diag)
    mat = sparse.csr_matrix(
        (np.concatenate(entries_v),
         (np.concatenate(entries_r), np.concatenate(entries_c))),
        shape=(rows_n, rows_n))

    h2 = st.h * st.h
    out = np.empty((rows_n, m))
    for a in range(m):
        b = rhs[:, a]
        x, info = cg(mat, b, rtol=0.0, atol=0.5 * tol * h2,
                     maxiter=50 * (gm.N + 1) * n)
        res = np.max(np.abs(mat @ x - b)) / h2
        if info != 0 or res > tol:
            raise NotConverged(
                f"Laplace solve residual {res:.3e} above tolerance {tol:.3e}")
        out[:, a] = x
    return out


def laplace_extend(gm: GridMap, *, tol: float = LAPLACE_TOL) -> GridMap:
    """Replace interior values by the discrete harmonic extension."""
    out = gm.copy()
    interior = _laplace_interior(out, tol)
    out.values.reshape(-1, gm.dims.m)[out._st.interior_flat] = interior
    return out


def solve_laplace(dims: Dims, g, *, N: int | None = None, mask: str = "ball",
                  tol: float = LAPLACE_TOL) -> GridMap:
    """Discrete harmonic map with boundary data ``g`` on the mask collar."""
    N = N or default_grid_n(dims)
    gm = GridMap(dims, N, mask=mask)
    gm.set_boundary(g)
    return laplace_extend(gm, tol=tol)


# ---------------------------------------------------------------------------
# Dirichlet descent for the minimal surface system


def _lambda_hat(grad: np.ndarray) -> float:
    """Largest symmetric-contraction eigenvalue of the coefficient tensor."""
    area, ginv, _, pinv = area_jets(grad)
    lam_g = sym_eigvalues(ginv)[..., -1]
    lam_p = sym_eigvalues(pinv)[..., -1]
    return float(np.max(area * lam_g * lam_p))


def _lambda_hat_stacks(area, ginv, pinv) -> float:
    return float(np.max(area * _lam_max_stack(ginv) * _lam_max_stack(pinv)))


def solve_dirichlet(dims: Dims, g, *, N: int | None = None, mask: str = "ball",
                    tau: float | None = None, tol_res: float = 1e-8,
                    max_iter: int = 200_000, init="laplace",
                    area_check_every: int = 25) -> tuple[GridMap, SolveReport]:
    """Solve the Dirichlet problem by damped residual descent.

    Parameters
    ----------
    g : callable
        Boundary data, mapping (P, n) coordinates to (P, m) values.
    tau : float, optional
        Fixed step size; validated against the stability cap h^2/(4 n L)
        with L the coefficient bound of the initial iterate.  By default the
        cap is re-estimated every 100 iterations.
    init : "laplace" | "zero" | array
        Initial interior values; default is the harmonic extension.

    Returns
    -------
    (GridMap, SolveReport); ``report.converged`` distinguishes success from
    an exhausted iteration budget.  Raises ``Diverged`` if the iterate
    leaves the amplitude window 10 (1 + sup|g|).
    """
    if tol_res <= 0 or max_iter <= 0:
        raise ValueError("tol_res and max_iter must be positive")
    N = N or default_grid_n(dims)
    gm = GridMap(dims, N, mask=mask)
    gm.set_boundary(g)
    if isinstance(init, np.ndarray):
        if init.shape != gm.values.shape:
            raise ValueError("init array has wrong shape")
        interior_mask = gm._st.interior_flat
        gm.values.reshape(-1, dims.m)[interior_mask] = \
            init.reshape(-1, dims.m)[interior_mask]
    elif init == "laplace":
        gm = laplace_extend(gm, tol=min(LAPLACE_TOL, 0.1 * tol_res))
    elif init != "zero":
        raise ValueError(f"unknown init {init!r}")

    st = gm._st
    h = st.h
    flat = gm.values.reshape(-1, dims.m)
    bound_sup = float(np.max(np.abs(flat[st.boundary_flat]))) \
        if len(st.boundary_flat) else 0.0
    blow_up = 10.0 * (1.0 + bound_sup)

    ws = _DescentWorkspace(gm)
    res, area_pts, ginv, pinv = ws.residual(gm.values)
    lam_hat = _lambda_hat_stacks(area_pts, ginv, pinv)
    tau_max = h * h / (4.0 * dims.n * lam_hat)
    if tau is not None:
        if tau <= 0 or tau > tau_max:
            raise ValueError(f"tau must lie in (0, {tau_max:.3e}], got {tau}")
        tau_eff = tau
    else:
        tau_eff = tau_max

    area_prev = None
    area_monotone = True
    max_increase = 0.0
    sup = np.inf
    it = 0
    for it in range(max_iter + 1):
        res, area_pts, ginv, pinv = ws.residual(gm.values)
        sup = float(np.max(np.abs(res))) if res.size else 0.0
        if sup <= tol_res:
            break
        if it == max_iter:
            break
        if tau is None and it % 100 == 0 and it > 0:
            lam_hat = _lambda_hat_stacks(area_pts, ginv, pinv)
            tau_eff = h * h / (4.0 * dims.n * lam_hat)
        if it % area_check_every == 0:
            area = float(np.sum(area_pts)) * h ** dims.n
            if area_prev is not None and area > area_prev + 1e-10:
                area_monotone = False
                max_increase = max(max_increase, area - area_prev)
            area_prev = area
            if float(np.max(np.abs(flat[st.interior_flat]))) > blow_up:
                raise Diverged(
                    f"iterate amplitude exceeded {blow_up:.3e} at iteration {it}")
        flat[st.interior_flat] += tau_eff * res

    converged = sup <= tol_res
    report = SolveReport(
        iterations=it,
        final_sup_residual=sup,
        converged=converged,
        tau=tau_eff,
        status="converged" if converged else "max_iter",
        lambda_hat=lam_hat,
        area_monotone=area_monotone,
        max_area_increase=max_increase,
    )
    return gm, report


# ---------------------------------------------------------------------------
# the explicit Lipschitz solution built from the Hopf map


def lawson_osserman(x: np.ndarray) -> np.ndarray:
    """Lipschitz graph map R^4 -> R^3, (sqrt(5)/2) |x| eta(x/|x|).

    Identifying R^4 with C^2 via z1 = x1 + i x2, z2 = x3 + i x4, eta is the
    Hopf fibration (|z1|^2 - |z2|^2, 2 z1 conj(z2)); since eta is homogeneous
    of degree two this evaluates as (sqrt(5)/2) eta(x)/|x|, extended by 0.
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ValueError("expected points in R^4")
    a, b, c, d = x[..., 0], x[..., 1], x[..., 2], x[..., 3]
    eta = np.stack([
        a * a + b * b - c * c - d * d,
        2.0 * (a * c + b * d),
        2.0 * (b * c - a * d),
    ], axis=-1)
    r = np.linalg.norm(x, axis=-1)
    scale = np.zeros_like(r)
    nz = r > 0.0
    scale[nz] = (np.sqrt(5.0) / 2.0) / r[nz]
    return scale[..., None] * eta


def lawson_osserman_grid(N: int = 21, mask: str = "ball") -> GridMap:
    """The explicit solution sampled on the standard n=4, m=3 lattice."""
    return GridMap.from_function(Dims(4, 3), N, lawson_osserman, mask=mask)


# ---------------------------------------------------------------------------
# harmonic replacement


def harmonic_replacement_gap(u: GridMap, r: float, *,
                             tol: float = LAPLACE_TOL) -> float:
    """sup over the sub-ball B_r of |u - h|, h harmonic with u's trace.

    The comparison runs on the same lattice restricted to the smaller ball,
    so the boundary values of h agree with u exactly on the collar.
    """
    if not (0.0 < r <= 1.0):
        raise ValueError(f"radius must lie in (0, 1], got {r}")
    sub = GridMap(u.dims, u.N, u.values.copy(), ball_mask(r))
    if len(sub._st.interior_flat) == 0:
        raise NotConverged(f"radius {r} leaves no interior at N={u.N}")
    ext = laplace_extend(sub, tol=tol)
    rows = sub._st.domain_flat
    diff = u.values.reshape(-1, u.dims.m)[rows] - \
        ext.values.reshape(-1, u.dims.m)[rows]
    return float(np.max(np.linalg.norm(diff, axis=1)))
