"""Numerical toolkit for the minimal surface system in arbitrary codimension."""

from .errors import (BoundaryProximity, DegenerateGradient, DegenerateSample,
                     Diverged, EmptySampleSet, FlatnessViolated, MinsurfError,
                     NonHarmonicFit, NotConverged, PreconditionUnmet,
                     ScaleTooFine)
from .geometry import (AmbientPoint, Cone, Dims, area_gradient, area_hessian,
                       area_integrand, cone_contains, pucci_minus, pucci_plus,
                       residual_from_jets, tangential_laplacian_min)
from .maps import AffineMap, PolynomialMap, QuadraticMap
from .grid import (GridMap, area_sum, ball_mask, grid_to_csv, load_grid,
                   residual_divergence, residual_nondivergence,
                   residuals_divergence, residuals_nondivergence, save_grid)
from .fields import (AffineDistanceField, HarmonicDeviationField, PhiBump,
                     QuadraticDistanceField, RawField, ScalarField,
                     SphereField, check_phi_admissible, default_phi,
                     radial_bump)
from .certify import (BallSampler, ComparisonCertificate, CylinderSampler,
                      ExplicitSampler, TouchingReport, certify_region,
                      is_comparison_at, touching_check, viscosity_screen)
from .solver import (SolveReport, default_grid_n, harmonic_replacement_gap,
                     laplace_extend, lawson_osserman, lawson_osserman_grid,
                     solve_dirichlet, solve_laplace)
from .flatness import (ExperimentParams, FlatnessTrace, best_affine_fit,
                       best_harmonic_quadratic_fit, density_ratio,
                       harnack_decay, harnack_measure_experiment,
                       improve_flatness_quadratic, improve_flatness_step,
                       oscillation)
from .miniball import smallest_enclosing_ball
from .interpolate import SplineMap

__version__ = "0.1.0"
