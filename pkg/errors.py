#!/usr/bin/env python3
"""
Exception hierarchy for the set-convergence toolkit
"""

from typing import Optional, Sequence, Tuple


class SetConvergenceError(Exception):
    """Base class for every error raised by the toolkit"""


class EmptyInput(SetConvergenceError, ValueError):
    """An operation received an empty point set"""


class DimensionMismatch(SetConvergenceError, ValueError):
    """Inputs do not share one ambient dimension, or the dimension is unsupported"""


class WindowMismatch(SetConvergenceError, ValueError):
    """An evaluation grid leaves the validity window of a sample"""


class EmptyAfterShrink(SetConvergenceError, ValueError):
    """No sample survives the margin shrink of the window"""


class UnknownFamily(SetConvergenceError, ValueError):
    """A corpus family identifier is not registered"""


class InfeasibleFidelity(SetConvergenceError, ValueError):
    """Requested fidelity is below machine resolution or needs too many samples"""


class OutOfDomain(SetConvergenceError, ValueError):
    """A point lies outside the domain of a PL function"""


class Degenerate(SetConvergenceError, ValueError):
    """Affinely dependent input where independence is required"""


class DuplicateSites(SetConvergenceError, ValueError):
    """Two Delaunay sites coincide"""


class GeneralPositionViolation(SetConvergenceError, ValueError):
    """Collinear triple or co-circular quadruple met while triangulating"""

    def __init__(self, message: str, violations: Sequence[Tuple[int, ...]] = ()):
        super().__init__(message)
        self.violations = [tuple(v) for v in violations]


class OutsideHull(SetConvergenceError, ValueError):
    """A query point is not inside the convex hull of the sites"""


class EmptySlice(SetConvergenceError, ValueError):
    """No graph pair falls inside the slice tolerance band"""


class HypothesisFailed(SetConvergenceError):
    """A theorem hypothesis does not hold for the family under test"""


class NotRegularValue(SetConvergenceError, ValueError):
    """The level is not a regular value of the limit function on the window"""

    def __init__(self, message: str, gradient_bound: Optional[float] = None):
        super().__init__(message)
        self.gradient_bound = gradient_bound


class DerivativeDivergence(SetConvergenceError):
    """Jacobians of the family do not approach the limit Jacobian"""


class NotConvex(SetConvergenceError, ValueError):
    """A polygon fails the convexity certificate"""


class ZeroLevel(SetConvergenceError, ValueError):
    """The fiber counterexample needs a nonzero level"""


class NonFiniteCoordinate(SetConvergenceError, ValueError):
    """A coordinate is NaN or infinite"""
