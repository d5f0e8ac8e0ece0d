"""Shared fixtures and independent reference computations.

The reference (oracle) helpers here recompute quantities from problem
data directly (grids, exhaustive enumeration, dense inverses) so the
package code paths they check are never on both sides of an assertion.
"""

import numpy as np
import pytest
import scipy.sparse as sp

from subqn.objectives import (
    BinaryHingeObjective,
    L1LogisticObjective,
    MulticlassHingeObjective,
    MultilabelHingeObjective,
    uniform_label_loss,
)


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_sparse(rng, n, d, density=0.7):
    X = sp.random(n, d, density=density, random_state=np.random.RandomState(rng.integers(1 << 31)), format="csr")
    X.data = rng.standard_normal(X.nnz)
    return X


def random_binary(rng, n=20, d=6, lam=0.1, density=0.7):
    X = random_sparse(rng, n, d, density)
    z = rng.choice((-1.0, 1.0), size=n)
    return BinaryHingeObjective(lam, X, z)


def random_multiclass(rng, n=10, d=4, k=3, lam=0.1, margin=1.0, density=0.8):
    X = random_sparse(rng, n, d, density)
    z = rng.integers(0, k, size=n)
    return MulticlassHingeObjective(lam, X, z, k, uniform_label_loss(k, margin))


def random_multilabel(rng, n=8, d=4, k=3, lam=0.1, margin=1.0, density=0.8):
    X = random_sparse(rng, n, d, density)
    sets = []
    for _ in range(n):
        size = rng.integers(1, k + 1)
        sets.append(tuple(sorted(rng.choice(k, size=size, replace=False))))
    return MultilabelHingeObjective(lam, X, sets, k, uniform_label_loss(k, margin))


def random_l1_logistic(rng, n=20, d=6, lam=0.05, density=0.7):
    X = random_sparse(rng, n, d, density)
    z = rng.choice((-1.0, 1.0), size=n)
    return L1LogisticObjective(lam, X, z)


def random_spd(rng, d, lo=0.1, hi=10.0):
    """Symmetric matrix with eigenvalues sampled uniformly in [lo, hi]."""
    q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    eigs = rng.uniform(lo, hi, size=d)
    return (q * eigs) @ q.T, eigs.max(), eigs.min()


def subgradient_slack(objective, w, g, rng, probes=100, radius=2.0):
    """Smallest value of J(w') - J(w) - g'(w' - w) over random probes.

    Nonnegative (up to tolerance) iff g is a valid subgradient at w.
    """
    base = objective.value(w)
    worst = np.inf
    for _ in range(probes):
        delta = rng.standard_normal(objective.dim) * radius
        probe = w + delta
        worst = min(worst, objective.value(probe) - base - float(g @ delta))
    return worst


def grid_golden_min(phi, hi, grid_points=10_000, golden_iters=120):
    """Minimum of a scalar convex function on [0, hi].

    Coarse vectorized grid followed by golden-section refinement inside
    the best cell; phi must accept a numpy array of evaluation points.
    """
    etas = np.linspace(0.0, hi, grid_points)
    values = phi(etas)
    best = int(np.argmin(values))
    lo = etas[max(0, best - 1)]
    up = etas[min(grid_points - 1, best + 1)]
    inv_phi = (np.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, up
    c = b - inv_phi * (b - a)
    d = a + inv_phi * (b - a)
    fc = float(phi(np.array([c]))[0])
    fd = float(phi(np.array([d]))[0])
    for _ in range(golden_iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - inv_phi * (b - a)
            fc = float(phi(np.array([c]))[0])
        else:
            a, c, fc = c, d, fd
            d = a + inv_phi * (b - a)
            fd = float(phi(np.array([d]))[0])
    candidates = [float(values[best]), fc, fd]
    return min(candidates)


def binary_phi_reference(objective, w, p):
    """Vectorized, restriction-free evaluation of eta -> J(w + eta p)."""
    X, z, lam, n = objective.X, objective.z, objective.lam, objective.n
    f = z * (X @ w)
    df = z * (X @ p)
    ww, wp, pp = float(w @ w), float(w @ p), float(p @ p)

    def phi(etas):
        slack = 1.0 - f[None, :] - etas[:, None] * df[None, :]
        hinge = np.maximum(0.0, slack).sum(axis=1) / n
        return 0.5 * lam * ww + etas * lam * wp + 0.5 * etas**2 * lam * pp + hinge

    return phi


def multiclass_phi_reference(objective, w, p):
    """Same, for the block-feature hinge losses (multiclass variant)."""
    scores_w = objective.scores(w)
    scores_p = objective.scores(p)
    lam, n = objective.lam, objective.n
    z = objective.labels
    loss = objective.label_loss
    ww, wp, pp = float(w @ w), float(w @ p), float(p @ p)
    offs = loss[:, z].T + scores_w - scores_w[np.arange(n), z][:, None]
    slopes = scores_p - scores_p[np.arange(n), z][:, None]

    def phi(etas):
        envel = (offs[None, :, :] + etas[:, None, None] * slopes[None, :, :]).max(axis=2)
        return (0.5 * lam * ww + etas * lam * wp + 0.5 * etas**2 * lam * pp
                + envel.sum(axis=1) / n)

    return phi


def multilabel_phi_reference(objective, w, p):
    scores_w = objective.scores(w)
    scores_p = objective.scores(p)
    lam, n = objective.lam, objective.n
    loss = objective.label_loss
    ww, wp, pp = float(w @ w), float(w @ p), float(p @ p)
    per_example = []
    for i in range(n):
        first, second = objective._pairs[i]
        offs = loss[second, first] + scores_w[i, second] - scores_w[i, first]
        slopes = scores_p[i, second] - scores_p[i, first]
        per_example.append((offs, slopes))

    def phi(etas):
        total = np.zeros_like(etas)
        for offs, slopes in per_example:
            total += (offs[None, :] + etas[:, None] * slopes[None, :]).max(axis=1)
        return (0.5 * lam * ww + etas * lam * wp + 0.5 * etas**2 * lam * pp
                + total / n)

    return phi


def descent_direction_for(objective, w, rng, tries=50):
    """A certified descent direction at w, via the steepest oracle on -g."""
    for _ in range(tries):
        g = objective.any_subgradient(w, rng)
        p = -g
        if objective.sup_subgradient(w, p)[1] < 0.0:
            return p
    raise RuntimeError("no descent direction found; w may be optimal")


class Quadratic:
    """Smooth test objective 0.5 ||w||^2."""

    def __init__(self, dim=1):
        self.dim = dim

    def value(self, w):
        return 0.5 * float(w @ w)

    def any_subgradient(self, w, rng):
        return np.asarray(w, dtype=float).copy()

    def sup_subgradient(self, w, p):
        w = np.asarray(w, dtype=float)
        return w.copy(), float(w @ p)

    def line_restriction(self, w, p):
        from subqn.line_search import BisectionRestriction

        return BisectionRestriction(self, w, p)


class PolytopeOracle:
    """Synthetic oracle whose subdifferential is the hull of fixed points.

    Only sup_subgradient matters to the direction search, so value and
    any_subgradient are minimal.
    """

    def __init__(self, extreme_points):
        self.points = np.asarray(extreme_points, dtype=float)
        self.dim = self.points.shape[1]

    def value(self, w):
        return 0.0

    def any_subgradient(self, w, rng):
        weights = rng.dirichlet(np.ones(len(self.points)))
        return weights @ self.points

    def sup_subgradient(self, w, p):
        scores = self.points @ p
        g = self.points[int(scores.argmax())]
        return g.copy(), float(g @ p)
