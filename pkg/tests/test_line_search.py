import numpy as np
import pytest
import scipy.sparse as sp

from subqn.line_search import (
    BinaryHingeRestriction,
    BisectionRestriction,
    LineSearchError,
    PiecewiseQuadraticRestriction,
    UnboundedRayError,
    WolfeParams,
    backtracking_search,
    check_wolfe,
)
from subqn.objectives import (
    BinaryHingeObjective,
    MulticlassHingeObjective,
    MultilabelHingeObjective,
    scaled_absolute_objective,
)
from subqn.segmentation import LineSet, segment_max_lines
from subqn.quasi_newton import IdentityModel
from subqn.direction import descent_direction

from conftest import (
    Quadratic,
    binary_phi_reference,
    descent_direction_for,
    grid_golden_min,
    multiclass_phi_reference,
    multilabel_phi_reference,
    random_binary,
    random_l1_logistic,
    random_multiclass,
    random_multilabel,
)


def test_wolfe_params_ordering():
    with pytest.raises(ValueError):
        WolfeParams(c1=0.5, c2=0.5)
    with pytest.raises(ValueError):
        WolfeParams(c1=0.0, c2=0.9)


class TestCheckWolfe:
    def test_quadratic_exact_minimum(self):
        obj = Quadratic()
        ok = check_wolfe(obj, np.array([1.0]), np.array([-1.0]), 1.0,
                         WolfeParams(1e-4, 0.9))
        assert ok == (True, True)

    def test_tiny_step_fails_curvature(self):
        obj = Quadratic()
        decrease, curvature = check_wolfe(
            obj, np.array([1.0]), np.array([-1.0]), 1e-12, WolfeParams(1e-4, 0.9)
        )
        assert decrease and not curvature

    def test_exact_minimizer_always_passes_curvature(self, rng):
        for _ in range(10):
            obj = random_binary(rng, n=15, d=4, lam=0.3)
            w = rng.standard_normal(4)
            p = descent_direction_for(obj, w, rng)
            eta = obj.line_restriction(w, p).minimize()
            _, curvature = check_wolfe(obj, w, p, eta, WolfeParams(1e-4, 0.9))
            assert curvature


class TestBacktracking:
    def test_quadratic_accepts_unit_step(self):
        obj = Quadratic()
        eta = backtracking_search(obj, np.array([1.0]), np.array([-1.0]),
                                  WolfeParams(1e-4, 0.9))
        assert eta == pytest.approx(1.0)

    def test_toy_direction_passes_wolfe(self, rng):
        obj = scaled_absolute_objective()
        w = np.array([1.0, 1.0])
        g = obj.any_subgradient(w, rng)
        res = descent_direction(obj, IdentityModel(2), w, g, 1e-5, 50)
        eta = backtracking_search(obj, w, res.p, WolfeParams(1e-4, 0.9))
        assert check_wolfe(obj, w, res.p, eta, WolfeParams(1e-4, 0.9)) == (True, True)

    def test_l1_logistic_direction_passes_wolfe(self, rng):
        obj = random_l1_logistic(rng, n=25, d=6, lam=0.02)
        w = np.zeros(6)
        p = descent_direction_for(obj, w, rng)
        eta = backtracking_search(obj, w, p, WolfeParams(1e-4, 0.9))
        assert check_wolfe(obj, w, p, eta, WolfeParams(1e-4, 0.9)) == (True, True)

    def test_non_descent_direction_rejected(self, rng):
        obj = Quadratic()
        with pytest.raises(LineSearchError):
            backtracking_search(obj, np.array([1.0]), np.array([1.0]),
                                WolfeParams(1e-4, 0.9))


class TestBinaryExact:
    def test_pure_regularizer_quadratic_minimum(self):
        restriction = BinaryHingeRestriction(
            lam=1.0, f=np.array([]), df=np.array([]),
            w_sqnorm=1.0, wp=-1.0, p_sqnorm=1.0,
        )
        assert restriction.minimize() == pytest.approx(1.0)

    def test_minimum_lands_on_hinge(self):
        obj = BinaryHingeObjective(1.0, sp.csr_matrix(np.array([[1.0]])), np.array([1.0]))
        restriction = obj.line_restriction(np.array([0.0]), np.array([1.0]))
        eta = restriction.minimize()
        assert eta == pytest.approx(1.0, abs=1e-12)
        assert restriction.sup_slope(eta, atol=1e-9) >= -1e-9
        assert restriction.inf_slope(eta, atol=1e-9) <= 1e-9

    def test_minimum_clamped_to_quadratic_zero(self):
        obj = BinaryHingeObjective(4.0, sp.csr_matrix(np.array([[4.0]])), np.array([1.0]))
        restriction = obj.line_restriction(np.array([0.0]), np.array([1.0]))
        # phi(eta) = 2 eta^2 + max(0, 1 - 4 eta): hinge at 0.25 before the
        # unconstrained quadratic zero at 1.
        assert restriction.minimize() == pytest.approx(0.25, abs=1e-12)

    def test_matches_grid_oracle(self, rng):
        for _ in range(60):
            obj = random_binary(rng, n=int(rng.integers(1, 50)), d=int(rng.integers(1, 10)),
                                lam=float(rng.uniform(0.01, 1.0)))
            w = rng.standard_normal(obj.dim)
            try:
                p = descent_direction_for(obj, w, rng)
            except RuntimeError:
                continue
            restriction = obj.line_restriction(w, p)
            eta = restriction.minimize()
            phi = binary_phi_reference(obj, w, p)
            oracle_min = grid_golden_min(phi, hi=2.2 * max(eta, 1.0))
            assert float(phi(np.array([eta]))[0]) <= oracle_min + 1e-8
            assert restriction.sup_slope(eta, atol=1e-9) >= -1e-9
            assert restriction.inf_slope(eta, atol=1e-9) <= 1e-9

    def test_cached_value_matches_objective(self, rng):
        obj = random_binary(rng, n=30, d=6, lam=0.2)
        w = rng.standard_normal(6)
        p = rng.standard_normal(6)
        restriction = obj.line_restriction(w, p)
        for eta in rng.uniform(0.0, 5.0, 100):
            direct = obj.value(w + eta * p)
            cached = restriction.value(eta)
            assert cached == pytest.approx(direct, rel=1e-10, abs=1e-12)

    def test_sup_slope_monotone(self, rng):
        obj = random_binary(rng, n=20, d=5, lam=0.1)
        w = rng.standard_normal(5)
        p = rng.standard_normal(5)
        restriction = obj.line_restriction(w, p)
        etas = np.sort(rng.uniform(0.0, 4.0, 50))
        slopes = [restriction.sup_slope(eta) for eta in etas]
        assert all(a <= b + 1e-12 for a, b in zip(slopes, slopes[1:]))


class TestPiecewiseQuadraticExact:
    def test_single_class_reduces_to_quadratic(self, rng):
        X = sp.csr_matrix(rng.standard_normal((5, 3)))
        obj = MulticlassHingeObjective(0.7, X, np.zeros(5, dtype=np.int64), 1)
        w = rng.standard_normal(3)
        p = -w  # then w'p < 0
        restriction = obj.line_restriction(w, p)
        eta = restriction.minimize()
        assert eta == pytest.approx(-float(w @ p) / float(p @ p), rel=1e-12)

    def test_one_example_matches_grid(self, rng):
        obj = random_multiclass(rng, n=1, d=3, k=2, lam=1.0)
        w = np.zeros(obj.dim)
        p = descent_direction_for(obj, w, rng)
        restriction = obj.line_restriction(w, p)
        eta = restriction.minimize()
        phi = multiclass_phi_reference(obj, w, p)
        assert float(phi(np.array([eta]))[0]) <= grid_golden_min(phi, 2.2 * max(eta, 1.0)) + 1e-8

    @pytest.mark.parametrize("family", ["multiclass", "multilabel"])
    def test_random_instances_match_grid(self, rng, family):
        for _ in range(25):
            if family == "multiclass":
                obj = random_multiclass(
                    rng, n=int(rng.integers(1, 50)), d=int(rng.integers(1, 8)),
                    k=int(rng.integers(2, 6)), lam=float(rng.uniform(0.01, 1.0)),
                )
                phi_of = multiclass_phi_reference
            else:
                obj = random_multilabel(
                    rng, n=int(rng.integers(1, 30)), d=int(rng.integers(1, 8)),
                    k=int(rng.integers(2, 6)), lam=float(rng.uniform(0.01, 1.0)),
                )
                phi_of = multilabel_phi_reference
            w = rng.standard_normal(obj.dim) * 0.5
            try:
                p = descent_direction_for(obj, w, rng)
            except RuntimeError:
                continue
            restriction = obj.line_restriction(w, p)
            eta = restriction.minimize()
            phi = phi_of(obj, w, p)
            oracle_min = grid_golden_min(phi, hi=2.2 * max(eta, 1.0))
            assert float(phi(np.array([eta]))[0]) <= oracle_min + 1e-8
            assert restriction.sup_slope(eta) >= -1e-9
            assert restriction.inf_slope(eta) <= 1e-9

    def test_cached_value_matches_objective(self, rng):
        obj = random_multiclass(rng, n=10, d=4, k=3, lam=0.3)
        w = rng.standard_normal(obj.dim)
        p = rng.standard_normal(obj.dim)
        restriction = obj.line_restriction(w, p)
        for eta in rng.uniform(0.0, 3.0, 100):
            assert restriction.value(eta) == pytest.approx(
                obj.value(w + eta * p), rel=1e-10, abs=1e-12
            )

    def test_unbounded_ray_detected(self):
        lines = LineSet([-1.0, -2.0], [0.0, 1.0])
        stack = segment_max_lines(lines, 0.0, np.inf)
        restriction = PiecewiseQuadraticRestriction(
            linear=0.0, curvature=0.0, constant=0.0, examples=[(lines, stack)]
        )
        with pytest.raises(UnboundedRayError) as info:
            restriction.minimize()
        assert info.value.slope == pytest.approx(-1.0)

    def test_sup_slope_monotone(self, rng):
        obj = random_multiclass(rng, n=8, d=4, k=3, lam=0.2)
        w = rng.standard_normal(obj.dim)
        p = rng.standard_normal(obj.dim)
        restriction = obj.line_restriction(w, p)
        etas = np.sort(rng.uniform(0.0, 4.0, 50))
        slopes = [restriction.sup_slope(eta) for eta in etas]
        assert all(a <= b + 1e-12 for a, b in zip(slopes, slopes[1:]))


class TestMultilabelLineBuilder:
    def test_singleton_matches_multiclass_lines(self, rng):
        X = sp.csr_matrix(rng.standard_normal((3, 4)))
        labels = rng.integers(0, 3, size=3)
        mc = MulticlassHingeObjective(0.4, X, labels, 3)
        ml = MultilabelHingeObjective(0.4, X, [(int(z),) for z in labels], 3)
        w = rng.standard_normal(mc.dim)
        p = rng.standard_normal(mc.dim)
        for i in range(3):
            lm = mc.example_lines(mc.scores(w), mc.scores(p), i)
            ll = ml.example_lines(ml.scores(w), ml.scores(p), i)
            np.testing.assert_array_equal(ll.slopes, lm.slopes)
            np.testing.assert_array_equal(ll.offsets, lm.offsets)

    def test_full_set_zero_loss_envelope_is_zero(self, rng):
        X = sp.csr_matrix(rng.standard_normal((1, 3)))
        ml = MultilabelHingeObjective(1.0, X, [(0, 1)], 2, np.zeros((2, 2)))
        w = rng.standard_normal(ml.dim)
        p = rng.standard_normal(ml.dim)
        lines = ml.example_lines(ml.scores(w), ml.scores(p), 0)
        np.testing.assert_allclose(lines.slopes, 0.0, atol=1e-12)
        np.testing.assert_allclose(lines.offsets, 0.0, atol=1e-12)

    def test_envelope_matches_direct_pair_max(self, rng):
        obj = random_multilabel(rng, n=4, d=3, k=4)
        w = rng.standard_normal(obj.dim)
        p = rng.standard_normal(obj.dim)
        scores_w, scores_p = obj.scores(w), obj.scores(p)
        for i in range(obj.n):
            lines = obj.example_lines(scores_w, scores_p, i)
            first, second = obj._pairs[i]
            for eta in rng.uniform(0.0, 3.0, 100):
                direct = max(
                    obj.label_loss[zp, z]
                    + (scores_w[i, zp] + eta * scores_p[i, zp])
                    - (scores_w[i, z] + eta * scores_p[i, z])
                    for z, zp in zip(first, second)
                )
                mine = float((lines.offsets + eta * lines.slopes).max())
                assert mine == pytest.approx(direct, rel=1e-12, abs=1e-12)


class TestAnalyticRestrictions:
    def test_piecewise_linear_restriction_matches_grid(self, rng):
        from subqn.objectives import analytic_objective

        for name in ("toy", "hul", "lo"):
            obj = analytic_objective(name)
            for _ in range(10):
                w = rng.uniform(-3, 3, size=2)
                try:
                    p = descent_direction_for(obj, w, rng)
                except RuntimeError:
                    continue
                restriction = obj.line_restriction(w, p)
                try:
                    eta = restriction.minimize()
                except UnboundedRayError:
                    continue
                etas = np.linspace(0.0, 2.2 * max(eta, 1.0), 10_000)
                grid_min = min(obj.value(w + t * p) for t in etas)
                assert restriction.value(eta) <= grid_min + 1e-8
                assert restriction.sup_slope(eta) >= -1e-9


class TestBisection:
    def test_quadratic_minimum(self):
        obj = Quadratic(2)
        restriction = BisectionRestriction(obj, np.array([3.0, 4.0]), np.array([-3.0, -4.0]))
        assert restriction.minimize() == pytest.approx(1.0, rel=1e-12)

    def test_unbounded_ray(self):
        class Linear:
            dim = 1

            def value(self, w):
                return float(w[0])

            def sup_subgradient(self, w, p):
                return np.array([1.0]), float(p[0])

        restriction = BisectionRestriction(Linear(), np.zeros(1), np.array([-1.0]))
        with pytest.raises(UnboundedRayError):
            restriction.minimize()
