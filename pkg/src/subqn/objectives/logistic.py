"""L1-regularized logistic loss.

J(w) = lam ||w||_1 + (1/n) sum_i log(1 + exp(-z_i w'x_i)).

The data term is smooth; the subdifferential picks up an interval
[-lam, lam] in every coordinate where w is zero.  The steepest
subgradient along p takes the interval endpoint matching the sign of
the corresponding component of p.  No closed-form exact line search
exists here, so restrictions fall back to derivative bisection.
"""

import numpy as np
import scipy.sparse as sp
from scipy.special import expit

from ..line_search import BisectionRestriction
from .base import Objective


class L1LogisticObjective(Objective):

    supports_exact_line_search = False
    kind = "binary"

    def __init__(self, lam, X, labels):
        if lam <= 0:
            raise ValueError("lam must be positive")
        self.lam = float(lam)
        self.X = sp.csr_matrix(X, dtype=float)
        z = np.asarray(labels, dtype=float)
        if z.ndim != 1 or z.shape[0] != self.X.shape[0] or z.shape[0] < 1:
            raise ValueError("labels must be one per data row")
        if not np.isin(z, (-1.0, 1.0)).all():
            raise ValueError("binary labels must be +-1")
        self.z = z
        self.n, self.dim = self.X.shape

    def value(self, w):
        w = self.check_vector(w, "w")
        margins = self.z * (self.X @ w)
        loss = np.logaddexp(0.0, -margins).sum() / self.n
        return float(self.lam * np.abs(w).sum() + loss)

    def smooth_gradient(self, w):
        margins = self.z * (self.X @ w)
        coeff = -self.z * expit(-margins)
        return self.X.T @ coeff / self.n

    def sup_subgradient(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        reg = np.where(w != 0.0, np.sign(w), np.sign(p))
        g = self.smooth_gradient(w) + self.lam * reg
        return g, float(g @ p)

    def any_subgradient(self, w, rng):
        w = self.check_vector(w, "w")
        signs = rng.choice((-1.0, 1.0), size=self.dim)
        reg = np.where(w != 0.0, np.sign(w), signs)
        return self.smooth_gradient(w) + self.lam * reg

    def line_restriction(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        return BisectionRestriction(self, w, p)
