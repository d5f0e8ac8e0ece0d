"""Objective-oracle contract shared by all objectives.

An objective exposes its value, an arbitrary (possibly randomized)
subgradient, and a "steepest" subgradient oracle that maximizes g'p over
the subdifferential at a point.  Objectives that restrict to a piecewise
quadratic along a ray additionally hand out a line-restriction object
consumed by the exact line searches.
"""

import numpy as np

# Width of the band around exact activity/margin used to classify a point
# as subdifferentiable; exact ties rarely survive floating point.
ACTIVE_ATOL = 1e-12


class Objective:
    """Contract for convex objectives used by the solvers."""

    #: Problem dimension (length of the parameter vector).
    dim = None
    #: Whether line_restriction() yields an exactly minimizable restriction.
    supports_exact_line_search = False
    #: Label structure, used by the CLI to match losses to datasets.
    kind = "generic"
    #: Whether the subdifferential at the all-zero point is expensive
    #: enough that the direction search tolerance should be relaxed there.
    relax_tolerance_at_zero = False

    def value(self, w):
        raise NotImplementedError

    def any_subgradient(self, w, rng):
        """An arbitrary element of the subdifferential at w."""
        raise NotImplementedError

    def sup_subgradient(self, w, p):
        """(g*, g*'p) with g* = argmax of g'p over the subdifferential at w."""
        raise NotImplementedError

    def line_restriction(self, w, p):
        """Restriction of the objective to w + eta p, or None if unsupported."""
        return None

    def check_vector(self, v, name="vector"):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"{name} must have shape ({self.dim},), got {v.shape}")
        return v
