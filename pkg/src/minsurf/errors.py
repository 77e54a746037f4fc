"""Exception types shared across the toolkit."""


class MinsurfError(Exception):
    """Base class for all toolkit errors."""


class DegenerateGradient(MinsurfError):
    """Gradient too small to define a level-surface normal."""


class BoundaryProximity(MinsurfError):
    """A finite-difference stencil would leave the lattice mask."""


class Diverged(MinsurfError):
    """Solver iterate blew past the admissible amplitude bound."""


class NotConverged(MinsurfError):
    """A linear solve failed to reach the requested residual."""


class EmptySampleSet(MinsurfError):
    """Every certification sample point was excluded."""


class FlatnessViolated(MinsurfError):
    """Input map is not within the declared flatness envelope."""


class NonHarmonicFit(MinsurfError):
    """Trace-free constrained quadratic fit could not be solved."""


class DegenerateSample(MinsurfError):
    """Sample set too degenerate for the requested fit."""


class ScaleTooFine(MinsurfError):
    """Requested radius is not resolvable at the lattice spacing."""


class PreconditionUnmet(MinsurfError):
    """Experiment-specific precondition failed on the given input."""
