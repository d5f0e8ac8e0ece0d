"""Small two-dimensional nonsmooth test objectives.

Three of the built-ins are pointwise maxima of affine pieces and share
PolyhedralObjective; the fourth mixes a conic region with a linear one
and gets its own class.  They serve as solver exercises: each is known
to defeat at least one classical method (steepest descent, steepest
subgradient descent, or BFGS with an exact line search).
"""

import numpy as np

from ..segmentation import LineSet, segment_max_lines
from ..line_search import BisectionRestriction, PiecewiseQuadraticRestriction
from .base import Objective, ACTIVE_ATOL


class PolyhedralObjective(Objective):
    """f(v) = max_k (A_k . v + c_k) for a fixed stack of affine pieces."""

    supports_exact_line_search = True
    kind = "analytic"

    def __init__(self, gradients, offsets):
        self.pieces = np.asarray(gradients, dtype=float)
        self.offsets = np.asarray(offsets, dtype=float)
        if self.pieces.ndim != 2 or self.offsets.shape != (self.pieces.shape[0],):
            raise ValueError("need one offset per gradient row")
        self.dim = self.pieces.shape[1]

    def _piece_values(self, v):
        return self.pieces @ v + self.offsets

    def _active(self, values):
        return np.flatnonzero(values >= values.max() - ACTIVE_ATOL)

    def value(self, w):
        w = self.check_vector(w, "w")
        return float(self._piece_values(w).max())

    def sup_subgradient(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        active = self._active(self._piece_values(w))
        slopes = self.pieces[active] @ p
        g = self.pieces[active[int(slopes.argmax())]]
        return g.copy(), float(g @ p)

    def any_subgradient(self, w, rng):
        w = self.check_vector(w, "w")
        active = self._active(self._piece_values(w))
        if active.size == 1:
            return self.pieces[active[0]].copy()
        weights = rng.dirichlet(np.ones(active.size))
        return weights @ self.pieces[active]

    def line_restriction(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        lines = LineSet(self.pieces @ p, self._piece_values(w))
        return PiecewiseQuadraticRestriction(
            linear=0.0,
            curvature=0.0,
            constant=0.0,
            examples=[(lines, segment_max_lines(lines, 0.0, np.inf))],
        )


class ScaledConeObjective(Objective):
    """f(x, y) = 5 sqrt(9x^2 + 16y^2) where x >= |y|, else 9x + 16|y|.

    Convex and positively homogeneous; nonsmooth on the ray x < 0,
    y = 0 and at the origin.  Unbounded below as x -> -inf.
    """

    supports_exact_line_search = True
    kind = "analytic"
    dim = 2

    def value(self, w):
        x, y = self.check_vector(w, "w")
        if x >= abs(y):
            return float(5.0 * np.sqrt(9.0 * x * x + 16.0 * y * y))
        return float(9.0 * x + 16.0 * abs(y))

    def _cone_gradient(self, x, y):
        norm = np.sqrt(9.0 * x * x + 16.0 * y * y)
        return np.array([45.0 * x, 80.0 * y]) / norm

    def _limit_gradient(self, direction):
        """Gradient limit approaching the origin along `direction`."""
        x, y = direction
        if x >= abs(y) and (x != 0.0 or y != 0.0):
            return self._cone_gradient(x, y)
        return np.array([9.0, 16.0 * np.sign(y)])

    def sup_subgradient(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        x, y = w
        if max(abs(x), abs(y)) <= ACTIVE_ATOL:
            # Positive homogeneity: sup over the subdifferential at the
            # origin equals the function itself.
            if not p.any():
                return np.array([9.0, 0.0]), 0.0
            g = self._limit_gradient(p)
            return g, float(self.value(p))
        if x >= abs(y):
            g = self._cone_gradient(x, y)
        elif abs(y) <= ACTIVE_ATOL:
            g = np.array([9.0, 16.0 * np.sign(p[1])])
        else:
            g = np.array([9.0, 16.0 * np.sign(y)])
        return g, float(g @ p)

    def any_subgradient(self, w, rng):
        w = self.check_vector(w, "w")
        x, y = w
        if max(abs(x), abs(y)) <= ACTIVE_ATOL:
            return self._limit_gradient(rng.standard_normal(2))
        if x >= abs(y):
            return self._cone_gradient(x, y)
        if abs(y) <= ACTIVE_ATOL:
            return np.array([9.0, rng.uniform(-16.0, 16.0)])
        return np.array([9.0, 16.0 * np.sign(y)])

    def line_restriction(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        return BisectionRestriction(self, w, p)


def scaled_absolute_objective():
    """f(x, y) = 10|x| + |y|: a separable vee with mismatched scales."""
    return PolyhedralObjective(
        [[10.0, 1.0], [10.0, -1.0], [-10.0, 1.0], [-10.0, -1.0]],
        [0.0, 0.0, 0.0, 0.0],
    )


def plateau_max_objective():
    """max(-100, +-2x + 3y, +-5x + 2y): linear pieces over a flat floor."""
    return PolyhedralObjective(
        [[2.0, 3.0], [-2.0, 3.0], [5.0, 2.0], [-5.0, 2.0], [0.0, 0.0]],
        [0.0, 0.0, 0.0, 0.0, -100.0],
    )


def vee_max_objective():
    """max(2|x| + y, 3y): unbounded below along the negative y hinge."""
    return PolyhedralObjective(
        [[2.0, 1.0], [-2.0, 1.0], [0.0, 3.0]],
        [0.0, 0.0, 0.0],
    )


#: name -> (objective factory, canonical start point)
ANALYTIC_PROBLEMS = {
    "toy": (scaled_absolute_objective, np.array([1.0, 1.0])),
    "wolfe": (ScaledConeObjective, np.array([2.0, 1.0])),
    "hul": (plateau_max_objective, np.array([1.0, 3.0])),
    "lo": (vee_max_objective, np.array([1.0, 0.0])),
}


def analytic_objective(name):
    """Instantiate a named two-dimensional test objective."""
    try:
        factory, _ = ANALYTIC_PROBLEMS[name]
    except KeyError:
        raise ValueError(
            f"unknown objective {name!r}; choose from {sorted(ANALYTIC_PROBLEMS)}"
        ) from None
    return factory()


def analytic_start(name):
    """Canonical starting point for a named test objective."""
    if name not in ANALYTIC_PROBLEMS:
        raise ValueError(
            f"unknown objective {name!r}; choose from {sorted(ANALYTIC_PROBLEMS)}"
        )
    return ANALYTIC_PROBLEMS[name][1].copy()
