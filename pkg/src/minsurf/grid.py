"""Lattice maps over the masked unit ball or cube, and their differences.

The lattice is the uniform grid on [-1, 1]^n with spacing h = 2/(N-1),
masked to the closed unit ball by default.  Interior points are those whose
full central-difference stencil (axis and pairwise-diagonal neighbors)
stays inside the mask; the remaining mask points form the boundary collar
that carries Dirichlet data.  Residuals are only ever evaluated on interior
points; requests elsewhere raise BoundaryProximity rather than silently
degrading to one-sided differences.
"""

from __future__ import annotations

import struct

import numpy as np

from .errors import BoundaryProximity
from .geometry import Dims, area_integrand, area_gradient, residual_from_jets

FORMAT_VERSION = "msl-v1"
_MAGIC = b"MSLG"

_STENCILS: dict = {}


def ball_mask(radius: float = 1.0) -> str:
    """Mask id for the closed ball of the given radius."""
    return "ball" if radius == 1.0 else f"ball@{radius:.12g}"


def _mask_radius(mask_id: str) -> float | None:
    if mask_id == "cube":
        return None
    if mask_id == "ball":
        return 1.0
    if mask_id.startswith("ball@"):
        return float(mask_id[5:])
    raise ValueError(f"unknown mask id {mask_id!r}")


def _shifted_in(domain: np.ndarray, off: tuple[int, ...]) -> np.ndarray:
    """out[p] = domain[p + off], False when p + off leaves the array."""
    out = np.zeros_like(domain)
    src, dst = [], []
    size = domain.shape[0]
    for o in off:
        if o >= 0:
            dst.append(slice(0, size - o))
            src.append(slice(o, size))
        else:
            dst.append(slice(-o, size))
            src.append(slice(0, size + o))
    out[tuple(dst)] = domain[tuple(src)]
    return out


class _Stencil:
    """Precomputed masks and gather indices for one (n, N, mask) lattice."""

    def __init__(self, n: int, N: int, mask_id: str):
        self.n, self.N, self.mask_id = n, N, mask_id
        self.h = 2.0 / (N - 1)
        self.axis = np.linspace(-1.0, 1.0, N)
        grids = np.meshgrid(*([self.axis] * n), indexing="ij")
        self.coords = np.stack(grids, axis=-1)

        radius = _mask_radius(mask_id)
        if radius is None:
            self.domain = np.ones((N,) * n, dtype=bool)
        else:
            r2 = np.sum(self.coords ** 2, axis=-1)
            self.domain = r2 <= radius * radius + 1e-12

        offs = []
        for i in range(n):
            for s in (1, -1):
                o = [0] * n
                o[i] = s
                offs.append(tuple(o))
        for i in range(n):
            for j in range(i + 1, n):
                for si in (1, -1):
                    for sj in (1, -1):
                        o = [0] * n
                        o[i], o[j] = si, sj
                        offs.append(tuple(o))
        self.offsets = offs

        ok = self.domain.copy()
        for off in offs:
            ok &= _shifted_in(self.domain, off)
        self.interior = ok
        self.boundary = self.domain & ~ok

        shape = (N,) * n
        self.interior_multi = np.argwhere(self.interior)
        self.interior_flat = np.ravel_multi_index(self.interior_multi.T, shape)
        self.interior_coords = self.axis[self.interior_multi]
        self.boundary_multi = np.argwhere(self.boundary)
        self.boundary_flat = np.ravel_multi_index(self.boundary_multi.T, shape)
        self.boundary_coords = self.axis[self.boundary_multi]
        self.domain_flat = np.flatnonzero(self.domain.reshape(-1))
        self.domain_coords = self.axis[np.argwhere(self.domain)]

        self.row_of = np.full(N ** n, -1, dtype=np.int64)
        self.row_of[self.interior_flat] = np.arange(len(self.interior_flat))

        self.nbr = {
            off: np.ravel_multi_index((self.interior_multi + off).T, shape)
            for off in offs
        }


def _stencil(n: int, N: int, mask_id: str) -> _Stencil:
    key = (n, N, mask_id)
    if key not in _STENCILS:
        _STENCILS[key] = _Stencil(n, N, mask_id)
    return _STENCILS[key]


class GridMap:
    """Discrete map u from the masked lattice to R^m."""

    def __init__(self, dims: Dims, N: int, values: np.ndarray | None = None,
                 mask: str = "ball"):
        if N < 5:
            raise ValueError(f"need at least 5 points per axis, got {N}")
        self.dims = dims
        self.N = N
        self.mask_id = mask
        self._st = _stencil(dims.n, N, mask)
        shape = (N,) * dims.n + (dims.m,)
        if values is None:
            self.values = np.zeros(shape)
        else:
            values = np.asarray(values, dtype=float)
            if values.shape != shape:
                raise ValueError(f"values shape {values.shape}, expected {shape}")
            self.values = values

    # -- lattice geometry ---------------------------------------------------
    @property
    def h(self) -> float:
        return self._st.h

    @property
    def axis(self) -> np.ndarray:
        return self._st.axis

    @property
    def domain(self) -> np.ndarray:
        return self._st.domain

    @property
    def interior(self) -> np.ndarray:
        return self._st.interior

    @property
    def boundary(self) -> np.ndarray:
        return self._st.boundary

    @property
    def interior_coords(self) -> np.ndarray:
        return self._st.interior_coords

    @property
    def boundary_coords(self) -> np.ndarray:
        return self._st.boundary_coords

    @property
    def domain_coords(self) -> np.ndarray:
        return self._st.domain_coords

    def copy(self) -> "GridMap":
        return GridMap(self.dims, self.N, self.values.copy(), self.mask_id)

    @classmethod
    def from_function(cls, dims: Dims, N: int, fn, mask: str = "ball") -> "GridMap":
        gm = cls(dims, N, mask=mask)
        st = gm._st
        flat = gm.values.reshape(-1, dims.m)
        flat[st.domain_flat] = np.asarray(fn(st.domain_coords), dtype=float)
        return gm

    def set_boundary(self, g) -> None:
        """Evaluate the boundary callback on the mask collar."""
        flat = self.values.reshape(-1, self.dims.m)
        flat[self._st.boundary_flat] = np.asarray(
            g(self._st.boundary_coords), dtype=float)

    def domain_values(self) -> np.ndarray:
        return self.values.reshape(-1, self.dims.m)[self._st.domain_flat]

    def interior_values(self) -> np.ndarray:
        return self.values.reshape(-1, self.dims.m)[self._st.interior_flat]

    def graph_points(self, which: str = "domain") -> np.ndarray:
        """Points (x, u(x)) as rows of an (P, n+m) array."""
        st = self._st
        flat = self.values.reshape(-1, self.dims.m)
        if which == "domain":
            return np.concatenate([st.domain_coords, flat[st.domain_flat]], axis=1)
        if which == "interior":
            return np.concatenate([st.interior_coords, flat[st.interior_flat]], axis=1)
        raise ValueError(f"unknown selector {which!r}")


# ---------------------------------------------------------------------------
# finite differences on the interior


def gradients(gm: GridMap) -> np.ndarray:
    """Central-difference gradients at all interior points, (P, n, m)."""
    st = gm._st
    flat = gm.values.reshape(-1, gm.dims.m)
    n = gm.dims.n
    out = np.empty((len(st.interior_flat), n, gm.dims.m))
    for i in range(n):
        ep = tuple(1 if l == i else 0 for l in range(n))
        em = tuple(-1 if l == i else 0 for l in range(n))
        out[:, i] = (flat[st.nbr[ep]] - flat[st.nbr[em]]) / (2.0 * st.h)
    return out


def hessian_stacks(gm: GridMap) -> np.ndarray:
    """Central second differences at all interior points, (P, n, n, m)."""
    st = gm._st
    flat = gm.values.reshape(-1, gm.dims.m)
    n = gm.dims.n
    h2 = st.h * st.h
    center = flat[st.interior_flat]
    out = np.empty((len(st.interior_flat), n, n, gm.dims.m))
    for i in range(n):
        ep = tuple(1 if l == i else 0 for l in range(n))
        em = tuple(-1 if l == i else 0 for l in range(n))
        out[:, i, i] = (flat[st.nbr[ep]] - 2.0 * center + flat[st.nbr[em]]) / h2
    for i in range(n):
        for j in range(i + 1, n):
            def off(si, sj):
                o = [0] * n
                o[i], o[j] = si, sj
                return tuple(o)
            mixed = (flat[st.nbr[off(1, 1)]] - flat[st.nbr[off(1, -1)]]
                     - flat[st.nbr[off(-1, 1)]] + flat[st.nbr[off(-1, -1)]]) / (4.0 * h2)
            out[:, i, j] = mixed
            out[:, j, i] = mixed
    return out


def residuals_nondivergence(gm: GridMap) -> np.ndarray:
    """Nondivergence-form system residual at all interior points, (P, m)."""
    return residual_from_jets(gradients(gm), hessian_stacks(gm))


def residuals_divergence(gm: GridMap) -> np.ndarray:
    """Conservative-form residual: discrete divergence of DF(Du), (P, m)."""
    st = gm._st
    flat = gm.values.reshape(-1, gm.dims.m)
    n, m = gm.dims.n, gm.dims.m
    h = st.h
    center = flat[st.interior_flat]
    out = np.zeros((len(st.interior_flat), m))

    def unit(i, s):
        o = [0] * n
        o[i] = s
        return tuple(o)

    def pair(i, si, j, sj):
        o = [0] * n
        o[i], o[j] = si, sj
        return tuple(o)

    for i in range(n):
        for side in (1, -1):
            half = np.empty((len(center), n, m))
            axis_nbr = flat[st.nbr[unit(i, side)]]
            half[:, i] = side * (axis_nbr - center) / h
            for j in range(n):
                if j == i:
                    continue
                half[:, j] = (flat[st.nbr[unit(j, 1)]] - flat[st.nbr[unit(j, -1)]]
                              + flat[st.nbr[pair(i, side, j, 1)]]
                              - flat[st.nbr[pair(i, side, j, -1)]]) / (4.0 * h)
            out += side * area_gradient(half)[:, i, :] / h
    return out


def _interior_row(gm: GridMap, index) -> int:
    st = gm._st
    idx = np.asarray(index, dtype=np.int64)
    if idx.shape != (gm.dims.n,):
        raise ValueError(f"index must have {gm.dims.n} entries")
    if np.any(idx < 0) or np.any(idx >= gm.N):
        raise BoundaryProximity(f"lattice index {tuple(index)} outside the grid")
    flat = int(np.ravel_multi_index(idx, (gm.N,) * gm.dims.n))
    row = int(st.row_of[flat])
    if row < 0:
        raise BoundaryProximity(
            f"point {tuple(index)} has no full interior stencil")
    return row


def residual_nondivergence(gm: GridMap, index) -> np.ndarray:
    """Nondivergence residual at one interior lattice multi-index."""
    return residuals_nondivergence(gm)[_interior_row(gm, index)]


def residual_divergence(gm: GridMap, index) -> np.ndarray:
    """Divergence-form residual at one interior lattice multi-index."""
    return residuals_divergence(gm)[_interior_row(gm, index)]


def area_sum(gm: GridMap) -> float:
    """Discrete graph area: sum of F(Du) h^n over interior points."""
    return float(np.sum(area_integrand(gradients(gm))) * gm.h ** gm.dims.n)


# ---------------------------------------------------------------------------
# serialization


def save_grid(gm: GridMap, path) -> None:
    """Write the msl-v1 binary layout (header + row-major little-endian f64)."""
    mask_bytes = gm.mask_id.encode("utf-8")
    header = _MAGIC + struct.pack("<IIIIH", 1, gm.dims.n, gm.dims.m, gm.N,
                                  len(mask_bytes)) + mask_bytes
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(np.ascontiguousarray(gm.values, dtype="<f8").tobytes())


def load_grid(path) -> GridMap:
    with open(path, "rb") as fh:
        raw = fh.read()
    if raw[:4] != _MAGIC:
        raise ValueError("not a minsurf grid file")
    version, n, m, N, mask_len = struct.unpack("<IIIIH", raw[4:22])
    if version != 1:
        raise ValueError(f"unsupported grid format version {version}")
    mask_id = raw[22:22 + mask_len].decode("utf-8")
    payload = np.frombuffer(raw[22 + mask_len:], dtype="<f8")
    values = payload.reshape((N,) * n + (m,)).astype(float)
    return GridMap(Dims(n, m), N, values, mask_id)


def grid_to_csv(gm: GridMap, path) -> None:
    """Domain points and values as CSV, lattice order, full precision."""
    pts = gm.graph_points("domain")
    cols = [f"x{i + 1}" for i in range(gm.dims.n)] + \
           [f"u{a + 1}" for a in range(gm.dims.m)]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        np.savetxt(fh, pts, fmt="%.17g", delimiter=",")
