"""Inverse-Hessian approximations for quasi-Newton methods.

Two interchangeable models are provided: a dense symmetric matrix kept
up to date by rank-two updates, and a limited-memory variant that stores
the last m displacement pairs and applies the matrix implicitly via the
two-loop recursion.  Both start from the identity.
"""

from collections import deque
from dataclasses import dataclass, field

import numpy as np


class DegenerateDisplacementError(ValueError):
    """Raised when a displacement pair carries no usable curvature."""


@dataclass(frozen=True)
class DisplacementPair:
    """A parameter/subgradient displacement pair (s, y) with s'y > 0."""

    s: np.ndarray
    y: np.ndarray
    rho: float = field(init=False)

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if s.shape != y.shape or s.ndim != 1:
            raise ValueError("s and y must be 1-d vectors of equal length")
        sy = float(s @ y)
        if not sy > 0.0:
            raise ValueError(f"curvature pair requires s'y > 0, got {sy!r}")
        rho = 1.0 / sy
        if not np.isfinite(rho):
            raise ValueError("1/(s'y) must be finite")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "rho", rho)


class DenseInverseHessian:
    """Dense symmetric positive-definite inverse-Hessian estimate.

    Holds the full d x d matrix and applies the rank-two update

        B <- (I - rho s y') B (I - rho y s') + rho s s'

    which enforces the secant relation B y = s.  Symmetry is re-enforced
    after each update to suppress roundoff drift.
    """

    def __init__(self, dim):
        self.dim = int(dim)
        self.matrix = np.eye(self.dim)

    def apply(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got {v.shape}")
        return self.matrix @ v

    def update(self, pair):
        s, y, rho = pair.s, pair.y, pair.rho
        if s.shape != (self.dim,):
            raise ValueError("displacement pair dimension mismatch")
        By = self.matrix @ y
        # Expanded form of (I - rho s y') B (I - rho y s') + rho s s'.
        yBy = float(y @ By)
        sy_outer = np.outer(s, By)
        B = self.matrix - rho * (sy_outer + sy_outer.T) + (rho * rho * yBy + rho) * np.outer(s, s)
        self.matrix = 0.5 * (B + B.T)


class LimitedMemoryInverseHessian:
    """Implicit inverse-Hessian estimate from the last m displacement pairs.

    apply() runs the standard two-loop recursion with identity as the
    base matrix; an empty buffer therefore acts as the identity.  The
    optional initial scaling (s'y / y'y on the base matrix) is off by
    default so runs are reproducible against the dense model.
    """

    def __init__(self, dim, max_pairs, scale_initial=False):
        if max_pairs < 1:
            raise ValueError("buffer size must be >= 1")
        self.dim = int(dim)
        self.max_pairs = int(max_pairs)
        self.scale_initial = bool(scale_initial)
        self.pairs = deque(maxlen=self.max_pairs)

    def update(self, pair):
        if pair.s.shape != (self.dim,):
            raise ValueError("displacement pair dimension mismatch")
        self.pairs.append(pair)

    def apply(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got {v.shape}")
        q = v.copy()
        alphas = []
        for pair in reversed(self.pairs):
            alpha = pair.rho * float(pair.s @ q)
            q -= alpha * pair.y
            alphas.append(alpha)
        if self.scale_initial and self.pairs:
            last = self.pairs[-1]
            q *= float(last.s @ last.y) / float(last.y @ last.y)
        for pair, alpha in zip(self.pairs, reversed(alphas)):
            beta = pair.rho * float(pair.y @ q)
            q += (alpha - beta) * pair.s
        return q


class IdentityModel:
    """Fixed identity model; apply() returns a copy of its input."""

    def __init__(self, dim):
        self.dim = int(dim)

    def apply(self, v):
        v = np.asarray(v, dtype=float)
        if v.shape != (self.dim,):
            raise ValueError(f"expected vector of length {self.dim}, got {v.shape}")
        return v.copy()


def curvature_safeguard(s, y, h):
    """Shift s along y so that s'y / y'y >= h.

    Returns s unchanged when the bound already holds.  Raises
    DegenerateDisplacementError for y = 0 (the caller should skip the
    curvature update in that case).
    """
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    if h <= 0.0:
        raise ValueError("h must be positive")
    yy = float(y @ y)
    if yy == 0.0:
        raise DegenerateDisplacementError("zero subgradient displacement")
    shift = max(0.0, h - float(s @ y) / yy)
    if shift == 0.0:
        return s
    return s + shift * y


def skip_update_test(s, y, min_ratio):
    """True when s'y / s's falls below min_ratio and the update should be skipped."""
    s = np.asarray(s, dtype=float)
    y = np.asarray(y, dtype=float)
    ss = float(s @ s)
    if ss == 0.0:
        raise DegenerateDisplacementError("zero parameter displacement")
    return float(s @ y) / ss < min_ratio
