"""Exception hierarchy shared across the numerical modules."""


class SpikeLabError(Exception):
    """Base class for all solver/validation failures."""


class DegenerateDenominator(SpikeLabError):
    """The cubic interaction term u^3/(w v) was evaluated with |v w| below tolerance."""


class GridTooSmall(SpikeLabError):
    """A stencil was requested on a grid with too few nodes."""


class GammaBranchCollision(SpikeLabError):
    """The quadratic for the core offset has (nearly) coincident roots; no spike exists."""


class QuadratureNotConverged(SpikeLabError):
    """Successive quadrature refinements disagreed beyond the requested tolerance."""


class PoleAtBackground(SpikeLabError):
    """Outer-problem rational function evaluated too close to u = a."""


class NewtonDiverged(SpikeLabError):
    """Damped Newton iteration failed to converge; carries the residual trace."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = list(trace) if trace is not None else []


class OutOfRange(SpikeLabError):
    """Newton iterates left the admissible region even after backtracking."""


class RegimeMismatch(SpikeLabError):
    """A nucleation-regime operation was invoked with homogeneous-regime parameters."""


class ComplexRoots(SpikeLabError):
    """A quadratic expected to have real roots has negative discriminant."""


class NearSingularResolvent(SpikeLabError):
    """Resolvent solve requested too close to the operator spectrum."""

    def __init__(self, message, distance=None):
        super().__init__(message)
        self.distance = distance


class NoRootInBracket(SpikeLabError):
    """Bisection bracket does not contain a sign change."""


class BlowUpDetected(SpikeLabError):
    """Simulation field magnitude exceeded the blow-up guard."""


class PositivityLost(SpikeLabError):
    """A field that must stay positive became non-positive and step halving ran out."""


class StepFailure(SpikeLabError):
    """Continuation step failed after the maximum number of retries."""
