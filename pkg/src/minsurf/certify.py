"""Certification of the strict tangential-Laplacian condition over regions,
and the one-sided touching screen for graphs against level sets.

A field H passes at a point when the minimum over level-normal n-planes of
the restricted Laplacian is strictly positive; ``certify_region`` samples a
declared region (deterministic lattice plus seeded quasi-random points),
honors the field's singular-tube exclusion, and aggregates a verdict.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateGradient, EmptySampleSet
from .fields import (AffineDistanceField, HarmonicDeviationField,
                     QuadraticDistanceField, ScalarField)
from .geometry import AmbientPoint, tangential_laplacian_batch
from .grid import GridMap
from .maps import AffineMap, QuadraticMap, harmonic_quadratic_basis
from .rng import stream

#: strict-positivity threshold scale, relative to the Hessian size
MARGIN_TOL_SCALE = 1e-9

#: lattice sample cap before a sampler coarsens its spacing
MAX_LATTICE_SAMPLES = 200_000


def _point(pt) -> np.ndarray:
    if isinstance(pt, AmbientPoint):
        return pt.ambient
    return np.asarray(pt, dtype=float)


def margins_on_points(H: ScalarField, pts: np.ndarray, n: int):
    """Batch margins, gradient norms, degeneracy mask and per-point tols."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    grads = H.gradients(pts)
    hess = H.hessians(pts)
    margins, gnorms, degenerate = tangential_laplacian_batch(hess, grads, n)
    tols = MARGIN_TOL_SCALE * (1.0 + np.linalg.norm(hess, axis=(-2, -1)))
    return margins, gnorms, degenerate, tols


def is_comparison_at(H: ScalarField, pt, n: int) -> float:
    """Margin of the strict condition at one ambient point.

    Positive return value means H satisfies the pointwise comparison
    condition there; raises DegenerateGradient below the gradient floor.
    """
    pts = _point(pt)[None]
    margins, gnorms, degenerate, _ = margins_on_points(H, pts, n)
    if bool(degenerate[0]):
        raise DegenerateGradient(
            f"|grad H| = {gnorms[0]:.3e} too small to define a normal")
    return float(margins[0])


# ---------------------------------------------------------------------------
# region samplers


_SOBOL_STREAM = 45059


def _sobol(dim: int, count: int, seed: int) -> np.ndarray:
    sub = int(stream(seed, _SOBOL_STREAM).integers(0, 2 ** 63))
    eng = qmc.Sobol(d=dim, scramble=True, seed=sub)
    return eng.random_base2(max(int(np.ceil(np.log2(count))), 1))[:count]


@dataclass(frozen=True)
class CylinderSampler:
    """Tube region {rho_lo <= |z - anchor(x)| <= rho_hi, |x| <= x_radius}.

    Deterministic lattice (x_spacing in x, z_spacing in z) plus qr_count
    seeded quasi-random points.
    """

    n: int
    m: int
    x_radius: float
    rho_lo: float
    rho_hi: float
    x_spacing: float
    z_spacing: float
    anchor: object | None = None
    seed: int = 0
    qr_count: int = 1000

    def points(self) -> np.ndarray:
        ax = np.arange(-self.x_radius, self.x_radius + 0.5 * self.x_spacing,
                       self.x_spacing)
        xg = np.stack(np.meshgrid(*([ax] * self.n), indexing="ij"),
                      axis=-1).reshape(-1, self.n)
        xg = xg[np.linalg.norm(xg, axis=1) <= self.x_radius + 1e-12]
        az = np.arange(-self.rho_hi, self.rho_hi + 0.5 * self.z_spacing,
                       self.z_spacing)
        zg = np.stack(np.meshgrid(*([az] * self.m), indexing="ij"),
                      axis=-1).reshape(-1, self.m)
        znorm = np.linalg.norm(zg, axis=1)
        zg = zg[(znorm >= self.rho_lo - 1e-15) & (znorm <= self.rho_hi + 1e-15)]
        if len(xg) * len(zg) > MAX_LATTICE_SAMPLES:
            stride = int(np.ceil(len(xg) * len(zg) / MAX_LATTICE_SAMPLES))
            xg = xg[::stride]
        xx = np.repeat(xg, len(zg), axis=0)
        zz = np.tile(zg, (len(xg), 1))

        raw = _sobol(self.n + self.m, 4 * self.qr_count, self.seed)
        qx = (2.0 * raw[:, :self.n] - 1.0) * self.x_radius
        qz = (2.0 * raw[:, self.n:] - 1.0) * self.rho_hi
        keep = (np.linalg.norm(qx, axis=1) <= self.x_radius)
        qn = np.linalg.norm(qz, axis=1)
        keep &= (qn >= self.rho_lo) & (qn <= self.rho_hi)
        qx, qz = qx[keep][:self.qr_count], qz[keep][:self.qr_count]

        xs = np.concatenate([xx, qx], axis=0)
        zoffs = np.concatenate([zz, qz], axis=0)
        base = self.anchor.values(xs) if self.anchor is not None else 0.0
        return np.concatenate([xs, base + zoffs], axis=1)

    def describe(self) -> dict:
        return {"kind": "cylinder", "x_radius": self.x_radius,
                "rho_lo": self.rho_lo, "rho_hi": self.rho_hi,
                "x_spacing": self.x_spacing, "z_spacing": self.z_spacing,
                "anchored": self.anchor is not None,
                "seed": self.seed, "qr_count": self.qr_count}


@dataclass(frozen=True)
class BallSampler:
    """Ambient ball of given center and radius, lattice plus quasi-random."""

    center: np.ndarray
    radius: float
    spacing: float
    seed: int = 0
    qr_count: int = 500

    def points(self) -> np.ndarray:
        c = np.asarray(self.center, dtype=float)
        k = c.shape[0]
        spacing = self.spacing
        while (2.0 * self.radius / spacing + 1) ** k > MAX_LATTICE_SAMPLES:
            spacing *= 2.0
        ax = np.arange(-self.radius, self.radius + 0.5 * spacing, spacing)
        grid = np.stack(np.meshgrid(*([ax] * k), indexing="ij"),
                        axis=-1).reshape(-1, k)
        grid = grid[np.linalg.norm(grid, axis=1) <= self.radius + 1e-12]
        raw = _sobol(k, 3 * self.qr_count, self.seed)
        q = (2.0 * raw - 1.0) * self.radius
        q = q[np.linalg.norm(q, axis=1) <= self.radius][:self.qr_count]
        return c + np.concatenate([grid, q], axis=0)

    def describe(self) -> dict:
        return {"kind": "ball", "center": [float(v) for v in self.center],
                "radius": self.radius, "spacing": self.spacing,
                "seed": self.seed, "qr_count": self.qr_count}


@dataclass(frozen=True)
class ExplicitSampler:
    """A fixed, caller-provided point set."""

    pts: np.ndarray

    def points(self) -> np.ndarray:
        return np.atleast_2d(np.asarray(self.pts, dtype=float))

    def describe(self) -> dict:
        return {"kind": "explicit", "count": int(len(self.points()))}


# ---------------------------------------------------------------------------
# certificates


@dataclass
class ComparisonCertificate:
    verdict: str
    min_margin: float
    argmin: list
    n_samples: int
    n_retained: int
    excluded_count: int
    excluded_tube: int
    excluded_degenerate: int
    margin_tol_at_min: float
    worst: list
    field: dict
    sampler: dict
    n: int

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "min_margin": self.min_margin,
            "argmin": self.argmin,
            "n_samples": self.n_samples,
            "n_retained": self.n_retained,
            "excluded_count": self.excluded_count,
            "excluded_tube": self.excluded_tube,
            "excluded_degenerate": self.excluded_degenerate,
            "margin_tol_at_min": self.margin_tol_at_min,
            "worst": self.worst,
            "field": self.field,
            "sampler": self.sampler,
            "n": self.n,
        }


def certify_region(H: ScalarField, sampler, n: int) -> ComparisonCertificate:
    """Sampled certificate of the strict condition over a region.

    Points inside the field's singular tube or with degenerate gradient are
    excluded and counted.  Verdict: ``pass`` iff every retained margin
    exceeds its roundoff tolerance, ``fail`` if some margin is strictly
    negative beyond tolerance, ``degenerate`` for the marginal band.
    Raises EmptySampleSet when nothing is retained.
    """
    pts = sampler.points()
    tube = H.exclusion_mask(pts)
    kept = pts[~tube]
    n_tube = int(tube.sum())
    if len(kept) == 0:
        raise EmptySampleSet("all sample points fell in the exclusion tube")
    margins, gnorms, degenerate, tols = margins_on_points(H, kept, n)
    retained = ~degenerate
    n_degen = int(degenerate.sum())
    if not np.any(retained):
        raise EmptySampleSet("all sample points had degenerate gradients")
    marg = margins[retained]
    tol = tols[retained]
    gn = gnorms[retained]
    kpts = kept[retained]

    if np.all(marg > tol):
        verdict = "pass"
    elif np.any(marg < -tol):
        verdict = "fail"
    else:
        verdict = "degenerate"

    order = np.argsort(marg)
    worst = [{"point": [float(v) for v in kpts[i]],
              "margin": float(marg[i]),
              "grad_norm": float(gn[i])} for i in order[:8]]
    imin = int(order[0])
    return ComparisonCertificate(
        verdict=verdict,
        min_margin=float(marg[imin]),
        argmin=[float(v) for v in kpts[imin]],
        n_samples=int(len(pts)),
        n_retained=int(retained.sum()),
        excluded_count=n_tube + n_degen,
        excluded_tube=n_tube,
        excluded_degenerate=n_degen,
        margin_tol_at_min=float(tol[imin]),
        worst=worst,
        field=H.describe(),
        sampler=sampler.describe(),
        n=n,
    )


# ---------------------------------------------------------------------------
# one-sided touching


@dataclass
class TouchingReport:
    max_value: float
    argmax: list
    interior: bool
    side_ok: bool
    violation: bool
    boundary_distance: float
    certificate: ComparisonCertificate | None = None
    field: dict = dc_field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "max_value": self.max_value,
            "argmax": self.argmax,
            "interior": self.interior,
            "side_ok": self.side_ok,
            "violation": self.violation,
            "boundary_distance": self.boundary_distance,
            "field": self.field,
        }
        out["certificate"] = self.certificate.to_dict() if self.certificate else None
        return out


def touching_check(u: GridMap, H: ScalarField, *, seed: int = 0) -> TouchingReport:
    """Detect forbidden one-sided touching of the graph against {H = c}.

    c is the maximum of H over the graph, so the graph lies in {H <= c} by
    construction.  A violation requires the argmax to sit at lattice
    distance >= 2h from the mask boundary and the field to certify as a
    comparison function on an ambient ball of radius 4h around it.
    """
    graph = u.graph_points("domain")
    vals = H.values(graph)
    imax = int(np.argmax(vals))
    top = graph[imax]
    bdist = float(np.min(np.linalg.norm(
        u.boundary_coords - top[:u.dims.n], axis=1)))
    interior = bdist >= 2.0 * u.h - 1e-12

    certificate = None
    violation = False
    if interior:
        sampler = BallSampler(center=top, radius=4.0 * u.h, spacing=u.h,
                              seed=seed)
        try:
            certificate = certify_region(H, sampler, u.dims.n)
            violation = certificate.verdict == "pass"
        except EmptySampleSet:
            certificate = None
    return TouchingReport(
        max_value=float(vals[imax]),
        argmax=[float(v) for v in top],
        interior=interior,
        side_ok=True,
        violation=violation,
        boundary_distance=bdist,
        certificate=certificate,
        field=H.describe(),
    )


# ---------------------------------------------------------------------------
# randomized screening battery


def _random_harmonic_quad(rng, n: int, m: int, amplitude: float) -> np.ndarray:
    basis = harmonic_quadratic_basis(n)
    quad = np.zeros((m, n, n))
    for a in range(m):
        coeffs = rng.uniform(-1.0, 1.0, size=len(basis))
        for c, b in zip(coeffs, basis):
            quad[a] += c * b
    peak = np.max(np.abs(quad))
    if peak > 0:
        quad *= amplitude / peak
    return quad


def viscosity_screen(u: GridMap, seed: int, count: int = 100) -> list[TouchingReport]:
    """Touching battery across the three families, anchored to graze the graph.

    Fields are anchored at a random offset from the graph's best affine fit
    so their level sets hug the graph from one side.  A discrete classical
    solution must come back violation-free; localized defects of height
    comparable to the flatness scale trip at least one report.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    from .flatness import best_affine_fit  # local import, no cycle

    n, m = u.dims.n, u.dims.m
    fit = best_affine_fit(u, 1.0)
    dev = float(np.max(np.linalg.norm(
        u.domain_values() - fit.values(u.domain_coords), axis=1)))
    eps_s = max(4.0 * dev, 1e-3)

    reports = []
    for i in range(count):
        rng = stream(seed, i + 1)
        xi = rng.normal(size=m)
        xi /= np.linalg.norm(xi)
        offset = (0.5 + 0.2 * rng.random()) * eps_s
        b = fit.b + offset * xi
        kind = i % 3
        if kind == 0:
            H = AffineDistanceField(AffineMap(b, fit.A), eps_s)
        elif kind == 1:
            h = QuadraticMap(np.zeros(m), np.zeros((n, m)),
                             _random_harmonic_quad(rng, n, m, 0.5))
            H = HarmonicDeviationField(h, AffineMap(b, fit.A), eps_s, 0.1, n, m)
        else:
            beta = 0.75
            quad = _random_harmonic_quad(rng, n, m, 0.5 * eps_s ** beta)
            H = QuadraticDistanceField(QuadraticMap(b, fit.A, quad), eps_s, beta)
        reports.append(touching_check(u, H, seed=seed))
    return reports
