"""Step-size selection along a descent direction.

Provides the subgradient Wolfe-condition test, a backtracking fallback,
and exact minimizers for the two families of one-dimensional
restrictions that arise here: the binary hinge restriction (piecewise
quadratic with per-example hinge points in closed form) and the
piecewise quadratic restriction whose nonsmooth part is a mean of
per-example upper envelopes of lines.  A derivative-bisection
restriction covers convex objectives without closed-form breakpoints.

All exact searches walk the sorted subdifferentiable points from zero,
tracking the one-sided slope, and stop in the first segment where the
slope turns nonnegative; the minimizer is that breakpoint or the zero of
the quadratic piece just before it.
"""

import heapq
from bisect import bisect_left, bisect_right
from dataclasses import dataclass

import numpy as np

from .segmentation import envelope_value


class LineSearchError(RuntimeError):
    """Backtracking exhausted its budget without an acceptable step."""


class UnboundedRayError(Exception):
    """The restriction decreases forever along the ray.

    eta_last is the last subdifferentiable point seen and slope the
    (negative) derivative of the restriction beyond it, so callers can
    extrapolate the linear tail.
    """

    def __init__(self, eta_last, slope):
        super().__init__(f"objective unbounded along ray (tail slope {slope})")
        self.eta_last = float(eta_last)
        self.slope = float(slope)


@dataclass(frozen=True)
class WolfeParams:
    c1: float = 1e-4
    c2: float = 0.9

    def __post_init__(self):
        if not 0.0 < self.c1 < self.c2 < 1.0:
            raise ValueError("need 0 < c1 < c2 < 1")


def check_wolfe(oracle, w, p, eta, params):
    """Evaluate the subgradient Wolfe conditions at step eta.

    Returns (sufficient_decrease, curvature):
      decrease:  J(w + eta p) <= J(w) + c1 eta sup_{dJ(w)} g'p
      curvature: sup_{dJ(w + eta p)} g'p >= c2 sup_{dJ(w)} g'p
    """
    sup0 = oracle.sup_subgradient(w, p)[1]
    w1 = w + eta * p
    decrease = oracle.value(w1) <= oracle.value(w) + params.c1 * eta * sup0
    curvature = oracle.sup_subgradient(w1, p)[1] >= params.c2 * sup0
    return decrease, curvature


def backtracking_search(oracle, w, p, params, eta0=1.0, decay=0.9, max_trials=100):
    """Find a step satisfying both subgradient Wolfe conditions.

    Starts from a step that satisfies the curvature condition (growing
    eta0 if necessary), then decays exponentially until the sufficient
    decrease condition holds as well.
    """
    j0 = oracle.value(w)
    sup0 = oracle.sup_subgradient(w, p)[1]
    if not sup0 < 0.0:
        raise LineSearchError("not a descent direction")
    eta = float(eta0)
    for _ in range(64):
        if oracle.sup_subgradient(w + eta * p, p)[1] >= params.c2 * sup0:
            break
        eta *= 2.0
    else:
        raise LineSearchError("could not satisfy the curvature condition")
    for _ in range(max_trials):
        w1 = w + eta * p
        decrease = oracle.value(w1) <= j0 + params.c1 * eta * sup0
        curvature = oracle.sup_subgradient(w1, p)[1] >= params.c2 * sup0
        if decrease and curvature:
            return eta
        eta *= decay
    raise LineSearchError(f"no Wolfe step within {max_trials} trials")


def _finish_walk(eta, eta_last, rho_prev_slope, curvature):
    """Shared endgame of the hinge walks.

    eta is the breakpoint where the one-sided slope first turned
    nonnegative (inf when the walk ran out of breakpoints);
    rho_prev_slope is the constant part of the slope on the segment just
    before it, so the quadratic piece there is rho_prev_slope +
    x * curvature.
    """
    if np.isinf(eta):
        if curvature <= 0.0:
            raise UnboundedRayError(eta_last, rho_prev_slope)
        return -rho_prev_slope / curvature
    if curvature <= 0.0:
        return eta
    return min(eta, -rho_prev_slope / curvature)


class BinaryHingeRestriction:
    """Binary hinge objective restricted to w + eta p.

    Caches the margins f = z.(Xw), their rates df = z.(Xp), and the
    scalar regularizer terms, after which evaluating the restriction or
    walking its hinge points costs O(n).
    """

    def __init__(self, lam, f, df, w_sqnorm, wp, p_sqnorm):
        self.lam = float(lam)
        self.f = np.asarray(f, dtype=float)
        self.df = np.asarray(df, dtype=float)
        # A rowless restriction degenerates to the pure quadratic part.
        self.n = max(1, self.f.size)
        self.w_sqnorm = float(w_sqnorm)
        self.wp = float(wp)
        self.p_sqnorm = float(p_sqnorm)

    def value(self, eta):
        hinge = np.maximum(0.0, 1.0 - self.f - eta * self.df).sum() / self.n
        return (0.5 * self.lam * self.w_sqnorm + eta * self.lam * self.wp
                + 0.5 * eta * eta * self.lam * self.p_sqnorm + hinge)

    def _slope(self, eta, include_negative_rates, atol):
        m = self.f + eta * self.df
        slack = 1.0 - m
        active = slack > atol
        on_hinge = np.abs(slack) <= atol
        if include_negative_rates:
            chosen = active | (on_hinge & (self.df < 0.0))
        else:
            chosen = active | (on_hinge & (self.df > 0.0))
        return (self.lam * self.wp + eta * self.lam * self.p_sqnorm
                - self.df[chosen].sum() / self.n)

    def sup_slope(self, eta, atol=0.0):
        return self._slope(eta, include_negative_rates=True, atol=atol)

    def inf_slope(self, eta, atol=0.0):
        return self._slope(eta, include_negative_rates=False, atol=atol)

    def minimize(self):
        """Exact minimizer over eta >= 0, or nonpositive slope certificate 0."""
        curvature = self.lam * self.p_sqnorm
        # Error indicators on the first open segment (0, first hinge).
        delta = (self.f < 1.0) | ((self.f == 1.0) & (self.df < 0.0))
        rho = self.df[delta].sum() / self.n - self.lam * self.wp
        g = -rho
        if g >= 0.0:
            return 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            hinge_etas = (1.0 - self.f) / self.df
        rows = np.flatnonzero((self.df != 0.0) & (hinge_etas > 0.0))
        order = rows[np.argsort(hinge_etas[rows], kind="stable")]
        etas = hinge_etas[order]

        eta = 0.0
        eta_last = 0.0
        rho_prev = rho
        j = 0
        m = order.size
        while g < 0.0:
            rho_prev = rho
            if j >= m:
                eta_last = eta
                eta = np.inf
                break
            eta = etas[j]
            while j < m and etas[j] == eta:
                i = order[j]
                rho += (-self.df[i] if delta[i] else self.df[i]) / self.n
                j += 1
            g = eta * curvature - rho
        return _finish_walk(eta, eta_last, -rho_prev, curvature)


class PiecewiseQuadraticRestriction:
    """Quadratic-plus-mean-of-envelopes restriction along a ray.

    examples holds (LineSet, segment stack over [0, inf)) per training
    example; the restriction value is

        constant + eta*linear + eta^2*curvature/2 + mean of envelopes.

    minimize() merges the per-example breakpoint streams with a heap and
    updates the slope in O(1) per breakpoint.
    """

    def __init__(self, linear, curvature, constant, examples):
        if not examples:
            raise ValueError("need at least one example")
        self.linear = float(linear)
        self.curvature = float(curvature)
        self.constant = float(constant)
        self.examples = examples
        self.n = len(examples)

    def value(self, eta):
        total = 0.0
        for lines, stack in self.examples:
            total += envelope_value(stack, lines, eta)[0]
        return (self.constant + eta * self.linear
                + 0.5 * eta * eta * self.curvature + total / self.n)

    def _active_slope_sum(self, eta, side):
        total = 0.0
        for lines, stack in self.examples:
            if side == "right":
                pos = bisect_right(stack, (eta, len(lines))) - 1
            else:
                pos = max(0, bisect_left(stack, (eta, -1)) - 1)
            total += lines.slopes[stack[pos][1]]
        return total

    def sup_slope(self, eta):
        return (self.linear + eta * self.curvature
                + self._active_slope_sum(eta, "right") / self.n)

    def inf_slope(self, eta):
        return (self.linear + eta * self.curvature
                + self._active_slope_sum(eta, "left") / self.n)

    def minimize(self):
        """Exact minimizer over eta >= 0, or nonpositive slope certificate 0."""
        rho = self.linear
        positions = [0] * self.n
        heap = []
        for i, (lines, stack) in enumerate(self.examples):
            rho += lines.slopes[stack[0][1]] / self.n
            if len(stack) > 1:
                heap.append((stack[1][0], i))
        heapq.heapify(heap)
        g = rho
        if g >= 0.0:
            return 0.0
        eta = 0.0
        eta_last = 0.0
        rho_prev = rho
        while g < 0.0:
            rho_prev = rho
            if not heap:
                eta_last = eta
                eta = np.inf
                break
            eta = heap[0][0]
            while heap and heap[0][0] == eta:
                _, i = heapq.heappop(heap)
                lines, stack = self.examples[i]
                old = stack[positions[i]][1]
                positions[i] += 1
                new = stack[positions[i]][1]
                rho += (lines.slopes[new] - lines.slopes[old]) / self.n
                if positions[i] + 1 < len(stack):
                    heapq.heappush(heap, (stack[positions[i] + 1][0], i))
            g = rho + eta * self.curvature
        return _finish_walk(eta, eta_last, rho_prev, self.curvature)


class BisectionRestriction:
    """Derivative-bisection fallback for convex objectives along a ray.

    Uses only the objective's steepest-subgradient oracle: the one-sided
    slope of the restriction at eta is sup g'p over the subdifferential
    at w + eta p, which is nondecreasing in eta.
    """

    def __init__(self, objective, w, p, expand_cap=1e12, max_bisections=200):
        self.objective = objective
        self.w = np.asarray(w, dtype=float)
        self.p = np.asarray(p, dtype=float)
        self.expand_cap = float(expand_cap)
        self.max_bisections = int(max_bisections)

    def value(self, eta):
        return self.objective.value(self.w + eta * self.p)

    def sup_slope(self, eta):
        return self.objective.sup_subgradient(self.w + eta * self.p, self.p)[1]

    def inf_slope(self, eta):
        return -self.objective.sup_subgradient(self.w + eta * self.p, -self.p)[1]

    def minimize(self):
        if self.sup_slope(0.0) >= 0.0:
            return 0.0
        lo = 0.0
        hi = 1.0
        while self.sup_slope(hi) < 0.0:
            lo = hi
            hi *= 2.0
            if hi > self.expand_cap:
                raise UnboundedRayError(lo, self.sup_slope(lo))
        for _ in range(self.max_bisections):
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            if self.sup_slope(mid) < 0.0:
                lo = mid
            else:
                hi = mid
        return hi
