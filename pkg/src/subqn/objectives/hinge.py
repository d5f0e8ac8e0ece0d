"""L2-regularized hinge-loss objectives: binary, multiclass, multilabel.

All three share the pattern J(w) = (lam/2)||w||^2 + mean of per-example
hinge terms.  The multiclass/multilabel versions use a block feature
map: w has one length-d block per class and the score of class z is
w_z'x.  Their restrictions along a ray are per-example upper envelopes
of lines, segmented once and then walked by the exact line search.
"""

import numpy as np
import scipy.sparse as sp

from ..segmentation import LineSet, segment_max_lines
from ..line_search import BinaryHingeRestriction, PiecewiseQuadraticRestriction
from .base import Objective, ACTIVE_ATOL


def uniform_label_loss(num_classes, margin=1.0):
    """Label-loss matrix with `margin` off the diagonal and zeros on it."""
    loss = np.full((num_classes, num_classes), float(margin))
    np.fill_diagonal(loss, 0.0)
    return loss


def _check_label_loss(label_loss, num_classes):
    label_loss = np.asarray(label_loss, dtype=float)
    if label_loss.shape != (num_classes, num_classes):
        raise ValueError("label loss must be K x K")
    if (label_loss < 0).any():
        raise ValueError("label loss must be nonnegative")
    if np.diagonal(label_loss).any():
        raise ValueError("label loss must vanish on the diagonal")
    return label_loss


class BinaryHingeObjective(Objective):
    """J(w) = (lam/2)||w||^2 + (1/n) sum_i max(0, 1 - z_i w'x_i)."""

    supports_exact_line_search = True
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

    def margins(self, w):
        return self.z * (self.X @ w)

    def value(self, w):
        w = self.check_vector(w, "w")
        f = self.margins(w)
        hinge = np.maximum(0.0, 1.0 - f).sum() / self.n
        return float(0.5 * self.lam * float(w @ w) + hinge)

    def _classify(self, f):
        slack = 1.0 - f
        error = slack > ACTIVE_ATOL
        margin = np.abs(slack) <= ACTIVE_ATOL
        return error, margin

    def _assemble(self, w, coeff):
        # g = lam w - X' (coeff * z) / n with coeff the per-example beta.
        return self.lam * w - self.X.T @ (coeff * self.z) / self.n

    def sup_subgradient(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        error, margin = self._classify(self.margins(w))
        coeff = error.astype(float)
        midx = np.flatnonzero(margin)
        if midx.size:
            slopes = self.z[midx] * (self.X[midx] @ p)
            coeff[midx[slopes < 0.0]] = 1.0
        g = self._assemble(w, coeff)
        return g, float(g @ p)

    def any_subgradient(self, w, rng):
        w = self.check_vector(w, "w")
        error, margin = self._classify(self.margins(w))
        coeff = error.astype(float)
        midx = np.flatnonzero(margin)
        if midx.size:
            coeff[midx] = rng.integers(0, 2, size=midx.size)
        return self._assemble(w, coeff)

    def line_restriction(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        return BinaryHingeRestriction(
            lam=self.lam,
            f=self.margins(w),
            df=self.z * (self.X @ p),
            w_sqnorm=float(w @ w),
            wp=float(w @ p),
            p_sqnorm=float(p @ p),
        )


class _BlockFeatureObjective(Objective):
    """Shared plumbing for the block feature map w = [w_0; ...; w_{K-1}]."""

    def __init__(self, lam, X, num_classes, label_loss):
        if lam <= 0:
            raise ValueError("lam must be positive")
        self.lam = float(lam)
        self.X = sp.csr_matrix(X, dtype=float)
        self.n, self.num_features = self.X.shape
        if num_classes < 1:
            raise ValueError("need at least one class")
        self.num_classes = int(num_classes)
        if label_loss is None:
            label_loss = uniform_label_loss(self.num_classes)
        self.label_loss = _check_label_loss(label_loss, self.num_classes)
        self.dim = self.num_classes * self.num_features

    def scores(self, w):
        """n x K matrix of per-class scores w_z'x_i."""
        W = np.asarray(w, dtype=float).reshape(self.num_classes, self.num_features)
        return self.X @ W.T

    def _assemble(self, w, rows, plus, minus):
        """lam*w + (1/n) sum over rows of [block(plus) - block(minus)] x_row."""
        keep = plus != minus
        rows, plus, minus = rows[keep], plus[keep], minus[keep]
        g = self.lam * np.asarray(w, dtype=float)
        if rows.size:
            data = np.concatenate([np.ones(rows.size), -np.ones(rows.size)])
            coeff = sp.coo_matrix(
                (data, (np.concatenate([rows, rows]), np.concatenate([plus, minus]))),
                shape=(self.n, self.num_classes),
            )
            g = g + (coeff.T @ self.X).toarray().ravel() / self.n
        return g


class MulticlassHingeObjective(_BlockFeatureObjective):
    """Multiclass hinge with per-pair margins from a label-loss matrix.

    Per-example loss: max over labels z of
    label_loss(z, z_i) + score(z) - score(z_i); the true label is
    included so the loss is never negative.
    """

    supports_exact_line_search = True
    kind = "multiclass"
    relax_tolerance_at_zero = True

    def __init__(self, lam, X, labels, num_classes, label_loss=None):
        super().__init__(lam, X, num_classes, label_loss)
        z = np.asarray(labels)
        if z.shape != (self.n,) or not np.issubdtype(z.dtype, np.integer):
            raise ValueError("labels must be one integer class id per row")
        if z.min() < 0 or z.max() >= self.num_classes:
            raise ValueError("class ids must lie in [0, K)")
        self.labels = z.astype(np.int64)

    def _loss_table(self, scores):
        """n x K matrix of label_loss(z, z_i) + score(z) - score(z_i)."""
        own = scores[np.arange(self.n), self.labels]
        return self.label_loss[:, self.labels].T + scores - own[:, None]

    def value(self, w):
        w = self.check_vector(w, "w")
        table = self._loss_table(self.scores(w))
        return float(0.5 * self.lam * float(w @ w) + table.max(axis=1).sum() / self.n)

    def sup_subgradient(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        table = self._loss_table(self.scores(w))
        worst = table >= table.max(axis=1, keepdims=True) - ACTIVE_ATOL
        slopes = self.scores(p)
        # Steepest label within the worst set; argmax takes the smallest
        # index on exact slope ties.
        masked = np.where(worst, slopes, -np.inf)
        chosen = masked.argmax(axis=1)
        g = self._assemble(w, np.arange(self.n), chosen, self.labels)
        return g, float(g @ p)

    def any_subgradient(self, w, rng):
        w = self.check_vector(w, "w")
        table = self._loss_table(self.scores(w))
        worst = table >= table.max(axis=1, keepdims=True) - ACTIVE_ATOL
        chosen = np.array([rng.choice(np.flatnonzero(row)) for row in worst])
        return self._assemble(w, np.arange(self.n), chosen, self.labels)

    def example_lines(self, scores_w, scores_p, i):
        """Lines whose upper envelope is example i's loss along the ray."""
        zi = self.labels[i]
        offsets = self.label_loss[:, zi] + scores_w[i] - scores_w[i, zi]
        slopes = scores_p[i] - scores_p[i, zi]
        return LineSet(slopes, offsets)

    def line_restriction(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        scores_w = self.scores(w)
        scores_p = self.scores(p)
        examples = []
        for i in range(self.n):
            lines = self.example_lines(scores_w, scores_p, i)
            examples.append((lines, segment_max_lines(lines, 0.0, np.inf)))
        return PiecewiseQuadraticRestriction(
            linear=self.lam * float(w @ p),
            curvature=self.lam * float(p @ p),
            constant=0.5 * self.lam * float(w @ w),
            examples=examples,
        )


class MultilabelHingeObjective(_BlockFeatureObjective):
    """Multilabel hinge over worst (in-set, out-of-set) label pairs.

    Per-example loss: max over pairs (z in Z_i, z' not in Z_i\\{z}) of
    label_loss(z', z) + score(z') - score(z); allowing z' = z keeps the
    loss nonnegative since label_loss vanishes on the diagonal.
    """

    supports_exact_line_search = True
    kind = "multilabel"
    relax_tolerance_at_zero = True

    def __init__(self, lam, X, label_sets, num_classes, label_loss=None):
        super().__init__(lam, X, num_classes, label_loss)
        if len(label_sets) != self.n:
            raise ValueError("need one label set per data row")
        cleaned = []
        for i, labels in enumerate(label_sets):
            ids = sorted(set(int(z) for z in labels))
            if not ids:
                raise ValueError(f"label set of row {i} is empty")
            if ids[0] < 0 or ids[-1] >= self.num_classes:
                raise ValueError(f"label set of row {i} out of range")
            cleaned.append(tuple(ids))
        self.label_sets = cleaned
        # Admissible (z, z') pairs per example, z' ranging over the
        # complement of Z_i plus z itself.
        self._pairs = []
        all_ids = np.arange(self.num_classes)
        for ids in cleaned:
            outside = all_ids[~np.isin(all_ids, ids)]
            first = []
            second = []
            for z in ids:
                candidates = np.sort(np.append(outside, z))
                first.append(np.full(candidates.size, z))
                second.append(candidates)
            self._pairs.append((np.concatenate(first), np.concatenate(second)))

    def _pair_values(self, scores_row, i):
        first, second = self._pairs[i]
        return self.label_loss[second, first] + scores_row[second] - scores_row[first]

    def value(self, w):
        w = self.check_vector(w, "w")
        scores = self.scores(w)
        total = 0.0
        for i in range(self.n):
            total += self._pair_values(scores[i], i).max()
        return float(0.5 * self.lam * float(w @ w) + total / self.n)

    def _steepest_pairs(self, scores_w, scores_p, rng=None):
        plus = np.empty(self.n, dtype=np.int64)
        minus = np.empty(self.n, dtype=np.int64)
        for i in range(self.n):
            first, second = self._pairs[i]
            values = self._pair_values(scores_w[i], i)
            worst = np.flatnonzero(values >= values.max() - ACTIVE_ATOL)
            if rng is not None:
                pick = rng.choice(worst)
            else:
                slopes = scores_p[i, second[worst]] - scores_p[i, first[worst]]
                pick = worst[slopes.argmax()]
            minus[i] = first[pick]
            plus[i] = second[pick]
        return plus, minus

    def sup_subgradient(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        scores_w = self.scores(w)
        scores_p = self.scores(p)
        plus, minus = self._steepest_pairs(scores_w, scores_p)
        g = self._assemble(w, np.arange(self.n), plus, minus)
        return g, float(g @ p)

    def any_subgradient(self, w, rng):
        w = self.check_vector(w, "w")
        scores_w = self.scores(w)
        plus, minus = self._steepest_pairs(scores_w, None, rng=rng)
        return self._assemble(w, np.arange(self.n), plus, minus)

    def example_lines(self, scores_w, scores_p, i):
        """One line per admissible label pair of example i."""
        first, second = self._pairs[i]
        offsets = self._pair_values(scores_w[i], i)
        slopes = scores_p[i, second] - scores_p[i, first]
        return LineSet(slopes, offsets)

    def line_restriction(self, w, p):
        w = self.check_vector(w, "w")
        p = self.check_vector(p, "p")
        scores_w = self.scores(w)
        scores_p = self.scores(p)
        examples = []
        for i in range(self.n):
            lines = self.example_lines(scores_w, scores_p, i)
            examples.append((lines, segment_max_lines(lines, 0.0, np.inf)))
        return PiecewiseQuadraticRestriction(
            linear=self.lam * float(w @ p),
            curvature=self.lam * float(p @ p),
            constant=0.5 * self.lam * float(w @ w),
            examples=examples,
        )
