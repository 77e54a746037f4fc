"""Oscillation, affine/quadratic fitting, flatness decay and density ratios.

These are the measurement operations behind the regularity experiments:
everything returns plain numbers or fitted maps, and the experiment
runners assemble them into reports.  Unspecified universal constants are
measured and reported, never asserted here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (DegenerateSample, FlatnessViolated, NonHarmonicFit,
                     PreconditionUnmet, ScaleTooFine)
from .geometry import area_integrand
from .grid import GridMap, gradients
from .maps import AffineMap, QuadraticMap, harmonic_quadratic_basis
from .miniball import smallest_enclosing_ball


@dataclass(frozen=True)
class ExperimentParams:
    """Knobs of the flatness experiments, recorded verbatim in reports."""

    eps: float = 1e-2
    eta: float = 0.25
    mu: float = 0.25
    delta: float = 0.1
    beta: float = 0.75
    c0: float | None = None
    eps0: float | None = None
    theta: float | None = None  # measured, when present

    def __post_init__(self):
        if self.eps <= 0:
            raise ValueError("eps must be positive")
        if not (0.0 < self.eta < 1.0):
            raise ValueError("eta must lie in (0, 1)")
        if not (0.0 < self.mu < 1.0):
            raise ValueError("mu must lie in (0, 1)")
        if not (0.0 < self.delta < 1.0):
            raise ValueError("delta must lie in (0, 1)")
        if not (0.5 < self.beta < 1.0):
            raise ValueError("beta must lie in (1/2, 1)")

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items()}


def ball_rows(u: GridMap, r: float, center=None) -> np.ndarray:
    """Domain-point rows with |x - center| <= r."""
    coords = u.domain_coords
    c = np.zeros(u.dims.n) if center is None else np.asarray(center, dtype=float)
    return np.flatnonzero(np.linalg.norm(coords - c, axis=1) <= r + 1e-12)


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)


def oscillation(u: GridMap, r: float, center=None, minus=None) -> float:
    """Radius of the smallest target-space ball containing u(B_r ∩ lattice).

    ``minus`` subtracts a reference map before measuring, which is how the
    oscillation of u - l is computed.
    """
    rows = ball_rows(u, r, center)
    if len(rows) == 0:
        raise ValueError(f"no lattice points in the ball of radius {r}")
    vals = u.domain_values()[rows]
    if minus is not None:
        vals = vals - minus.values(u.domain_coords[rows])
    _, radius = smallest_enclosing_ball(vals)
    return radius


def best_affine_fit(u: GridMap, r: float, center=None) -> AffineMap:
    """Componentwise least-squares affine fit over B_r ∩ lattice."""
    rows = ball_rows(u, r, center)
    xs = u.domain_coords[rows]
    vals = u.domain_values()[rows]
    design = np.concatenate([np.ones((len(xs), 1)), xs], axis=1)
    sol, _, rank, _ = np.linalg.lstsq(design, vals, rcond=None)
    if rank < u.dims.n + 1:
        raise DegenerateSample(
            f"affine fit needs {u.dims.n + 1} independent points, rank {rank}")
    return AffineMap(sol[0], sol[1:])


def best_harmonic_quadratic_fit(u: GridMap, r: float, center=None) -> QuadraticMap:
    """Least-squares quadratic fit constrained to trace-free quadratic parts."""
    rows = ball_rows(u, r, center)
    xs = u.domain_coords[rows]
    vals = u.domain_values()[rows]
    basis = harmonic_quadratic_basis(u.dims.n)
    cols = [np.ones((len(xs), 1)), xs]
    for b in basis:
        cols.append(0.5 * np.einsum("ij,pi,pj->p", b, xs, xs)[:, None])
    design = np.concatenate(cols, axis=1)
    sol, _, rank, _ = np.linalg.lstsq(design, vals, rcond=None)
    if rank < design.shape[1]:
        raise NonHarmonicFit(
            f"constrained quadratic fit is rank deficient ({rank} of "
            f"{design.shape[1]})")
    quad = np.zeros((u.dims.m, u.dims.n, u.dims.n))
    for a in range(u.dims.m):
        for c, b in zip(sol[u.dims.n + 1:, a], basis):
            quad[a] += c * b
    return QuadraticMap(sol[0], sol[1:u.dims.n + 1], quad)


def _sup_deviation(u: GridMap, reference, r: float = 1.0) -> float:
    rows = ball_rows(u, r)
    diff = u.domain_values()[rows] - reference.values(u.domain_coords[rows])
    return float(np.max(np.linalg.norm(diff, axis=1)))


def harnack_decay(u: GridMap, l: AffineMap, eps: float) -> float:
    """Measured oscillation gain 1 - osc_(B 1/2)(u - l)/eps.

    Requires osc_(B 1)(u - l) <= eps; the statistic is taken on the half
    ball, which is the region the underlying estimate actually controls.
    """
    osc_full = oscillation(u, 1.0, minus=l)
    if osc_full > eps * (1.0 + 1e-9):
        raise FlatnessViolated(
            f"osc over the unit ball is {osc_full:.3e} > eps = {eps:.3e}")
    osc_half = oscillation(u, 0.5, minus=l)
    return 1.0 - osc_half / eps


def improve_flatness_step(u: GridMap, l: AffineMap, eps: float,
                          eta: float) -> tuple[AffineMap, float, float]:
    """One affine improvement step.

    Fits the best affine map on B_eta and returns (fit, new_eps, ratio)
    with new_eps the sup deviation there and ratio = new_eps/(eps eta);
    the decay prediction is ratio <= 1/2 up to discretization slack.
    """
    dev = _sup_deviation(u, l)
    if dev > eps * (1.0 + 1e-9):
        raise FlatnessViolated(f"|u - l| = {dev:.3e} exceeds eps = {eps:.3e}")
    fit = best_affine_fit(u, eta)
    new_eps = _sup_deviation(u, fit, eta)
    return fit, new_eps, new_eps / (eps * eta)


def improve_flatness_quadratic(u: GridMap, q: QuadraticMap, eps: float,
                               eta: float, beta: float
                               ) -> tuple[QuadraticMap, float, float]:
    """One quadratic improvement step; ratio normalizes by eps eta^2."""
    if not (0.5 < beta < 1.0):
        raise ValueError(f"beta must lie in (1/2, 1), got {beta}")
    if q.coefficient_bound() > eps ** beta * (1.0 + 1e-9):
        raise FlatnessViolated(
            f"quadratic coefficients {q.coefficient_bound():.3e} exceed "
            f"eps^beta = {eps ** beta:.3e}")
    dev = _sup_deviation(u, q)
    if dev > eps * (1.0 + 1e-9):
        raise FlatnessViolated(f"|u - q| = {dev:.3e} exceeds eps = {eps:.3e}")
    fit = best_harmonic_quadratic_fit(u, eta)
    new_eps = _sup_deviation(u, fit, eta)
    return fit, new_eps, new_eps / (eps * eta * eta)


def density_ratio(u: GridMap, center, r: float) -> float:
    """Graph mass in the ambient ball over the flat-disk mass omega_n r^n.

    ``center`` is a domain point x0 (snapped to the lattice); the ball is
    centered at the graph point (x0, u(x0)).  Only interior lattice points
    (full central stencil) contribute, which keeps the gradient honest.
    """
    if r < 4.0 * u.h:
        raise ScaleTooFine(f"radius {r} below 4h = {4.0 * u.h}")
    c = np.asarray(center, dtype=float)
    rows = np.linalg.norm(u.domain_coords - c, axis=1)
    row0 = int(np.argmin(rows))
    x0 = u.domain_coords[row0]
    z0 = u.domain_values()[row0]
    graph = u.graph_points("interior")
    center_pt = np.concatenate([x0, z0])
    inside = np.linalg.norm(graph - center_pt, axis=1) <= r
    dens = area_integrand(gradients(u)[inside])
    mass = float(np.sum(dens)) * u.h ** u.dims.n
    return mass / (unit_ball_volume(u.dims.n) * r ** u.dims.n)


def harnack_measure_experiment(u: GridMap, l: AffineMap, eps: float,
                               xi: np.ndarray, eta_small: float,
                               c_values=None) -> dict:
    """Measure-fraction statistics of w = |u~ + xi|/2 near an extremal point.

    Requires some x0 in B_(1/2) with u~(x0) within eta_small of xi.  For a
    sweep of C this reports the fraction of B_1 where w > 1 - C eta and the
    pointwise inclusion of that set in {|u~ - xi| <= sqrt(8 C eta)}, then
    the empirical (C, mu) frontier.
    """
    xi = np.asarray(xi, dtype=float)
    if abs(np.linalg.norm(xi) - 1.0) > 1e-9:
        raise ValueError("xi must be a unit vector")
    osc_full = oscillation(u, 1.0, minus=l)
    if osc_full > eps * (1.0 + 1e-9):
        raise FlatnessViolated(
            f"osc over the unit ball is {osc_full:.3e} > eps = {eps:.3e}")

    rows = ball_rows(u, 1.0)
    coords = u.domain_coords[rows]
    utilde = (u.domain_values()[rows] - l.values(coords)) / eps
    half = np.linalg.norm(coords, axis=1) <= 0.5 + 1e-12
    dist_xi = np.linalg.norm(utilde - xi, axis=1)
    nearest = float(np.min(dist_xi[half])) if np.any(half) else np.inf
    if nearest > eta_small:
        raise PreconditionUnmet(
            f"no point of B_1/2 within {eta_small} of xi (closest {nearest:.3e})")

    w = 0.5 * np.linalg.norm(utilde + xi, axis=1)
    if c_values is None:
        c_values = np.geomspace(0.5, 8.0, 12)
    sweep = []
    for c in c_values:
        level = 1.0 - c * eta_small
        sel = w > level
        frac = float(np.mean(sel))
        bound = math.sqrt(8.0 * c * eta_small)
        included = float(np.mean(dist_xi[sel] <= bound + 1e-12)) if sel.any() else 1.0
        sweep.append({"C": float(c), "fraction": frac,
                      "inclusion_bound": bound, "inclusion_fraction": included})
    frontier = []
    for mu in (0.05, 0.1, 0.2, 0.25, 0.3, 0.4, 0.5):
        hits = [s["C"] for s in sweep if s["fraction"] >= 1.0 - mu]
        frontier.append({"mu": mu, "C": min(hits) if hits else None})
    return {
        "eta": eta_small,
        "nearest_extremal_distance": nearest,
        "w_max": float(np.max(w)),
        "w_min": float(np.min(w)),
        "sweep": sweep,
        "frontier": frontier,
    }


@dataclass
class FlatnessTrace:
    """Per-scale records of an iterated improvement run."""

    eta: float
    rows: list = field(default_factory=list)

    def add(self, k: int, eps_k: float, new_eps: float, ratio: float,
            fit, neglected_tilt: float) -> None:
        slope = fit.A if hasattr(fit, "A") else None
        self.rows.append({
            "k": k,
            "scale": self.eta ** (k + 1),
            "eps": eps_k,
            "new_eps": new_eps,
            "ratio": ratio,
            "fit_intercept": [float(v) for v in np.atleast_1d(fit.b)],
            "fit_slope": [[float(v) for v in row] for row in np.atleast_2d(slope)]
            if slope is not None else None,
            "neglected_tilt": neglected_tilt,
        })

    def ratios(self) -> list[float]:
        return [r["ratio"] for r in self.rows]

    def to_rows(self) -> list[dict]:
        return list(self.rows)
