import math

import numpy as np
import pytest

from trpsim.robustness import (
    CostModel,
    NonFiniteCost,
    ZeroParameter,
    fourth_figure_unit,
    hessian,
    penalty,
    relative_step,
    robust_cost,
)


class TestRelativeStep:
    def test_mantissa_five(self):
        assert relative_step(5.000) == pytest.approx(2.0e-4, rel=1e-12)

    def test_mantissa_one(self):
        assert relative_step(1.000) == pytest.approx(1.0e-3, rel=1e-12)

    def test_exponent_independent(self):
        assert relative_step(7.820e-3) == pytest.approx(0.001 / 7.820, rel=1e-12)
        assert relative_step(7.820e-3) == pytest.approx(relative_step(7.820e5), rel=1e-12)

    def test_negative_parameter_uses_magnitude(self):
        assert relative_step(-5.0) == pytest.approx(2.0e-4, rel=1e-12)

    def test_zero_rejected(self):
        with pytest.raises(ZeroParameter):
            relative_step(0.0)


class TestFourthFigureUnit:
    def test_values(self):
        assert fourth_figure_unit(7.820) == pytest.approx(1e-3)
        assert fourth_figure_unit(1.792e-4) == pytest.approx(1e-7)
        assert fourth_figure_unit(99.3) == pytest.approx(1e-2)


class TestHessian:
    def test_sum_of_squares(self):
        # f = xi1^2 + xi2^2 around xbar = (1, 1)
        f = lambda x: float(x[0] ** 2 + x[1] ** 2)
        rep = hessian(f, [1.0, 1.0])
        assert np.allclose(rep.matrix, 2.0 * np.eye(2), rtol=1e-6, atol=1e-6)
        assert rep.l1_norm == pytest.approx(np.abs(rep.matrix).sum())

    def test_pure_cross_term(self):
        f = lambda x: float(x[0] * x[1])
        rep = hessian(f, [1.0, 1.0])
        assert rep.matrix[0, 1] == pytest.approx(1.0, rel=1e-6)
        assert rep.matrix[1, 0] == pytest.approx(1.0, rel=1e-6)
        assert abs(rep.matrix[0, 0]) < 1e-6
        assert abs(rep.matrix[1, 1]) < 1e-6

    def test_scale_invariance_in_xi(self):
        # same xi-space function expressed through very different xbar scales
        xbar = np.array([5.0, 2.0e-4])

        def f(x):
            xi = x / xbar
            return float(3.0 * xi[0] ** 2 + 0.5 * xi[1] ** 2 - 2.0 * xi[0] * xi[1] + 7.0 * xi[0])

        rep = hessian(f, xbar)
        expected = np.array([[6.0, -2.0], [-2.0, 1.0]])
        assert np.allclose(rep.matrix, expected, rtol=1e-6, atol=1e-6)

    def test_symmetry_by_construction(self):
        rng = np.random.default_rng(47)
        a = rng.standard_normal((3, 3))

        def f(x):
            return float(x @ a @ x + np.sin(x).sum())

        rep = hessian(f, [1.3, 0.7, 2.1])
        assert np.array_equal(rep.matrix, rep.matrix.T)

    def test_f0_shortcut_matches(self):
        f = lambda x: float((x[0] - 2.0) ** 2 + x[1] ** 4)
        full = hessian(f, [1.5, 0.5])
        shortcut = hessian(f, [1.5, 0.5], f0=f(np.array([1.5, 0.5])))
        assert np.array_equal(full.matrix, shortcut.matrix)

    def test_zero_component_rejected(self):
        with pytest.raises(ZeroParameter):
            hessian(lambda x: 0.0, [1.0, 0.0])

    def test_non_finite_cost(self):
        with pytest.raises(NonFiniteCost):
            hessian(lambda x: math.inf, [1.0, 1.0])


class TestPenalty:
    def test_boundary(self):
        assert penalty(2500.0, 2500.0) == 0.0

    def test_above_threshold(self):
        assert penalty(2600.0, 2500.0) == 1.0e4

    def test_below_threshold(self):
        assert penalty(1000.0, 2500.0) == 0.0

    def test_continuity_at_threshold(self):
        for eps in (1e-3, 1e-6, 1e-9):
            assert penalty(2500.0 - eps) == 0.0
            assert penalty(2500.0 + eps) == pytest.approx(eps**2)


class TestRobustCost:
    def test_r_zero_reverts_to_base(self):
        calls = []

        def base(x):
            calls.append(np.array(x))
            return float((x[0] - 1.0) ** 2 + x[1] ** 2)

        model = CostModel(r_weight=0.0)
        x = np.array([1.2, 0.3])
        assert robust_cost(x, base, model) == base(x)
        # r=0 must not trigger any stencil evaluations
        assert len(calls) == 2

    def test_below_threshold_penalty_free(self):
        base = lambda x: float(x[0] ** 2 + x[1] ** 2)  # Hessian l1 = 4 << 2500
        model = CostModel(r_weight=1.0)
        x = np.array([1.0, 1.0])
        assert robust_cost(x, base, model) == pytest.approx(base(x), rel=1e-12)

    def test_arithmetic_composition(self):
        # curvature chosen so the l1 norm lands at 2600 => penalty 1e4
        base = lambda x: float(650.0 * (x[0] / 2.0 - 1.0) ** 2 + 1e-4)
        model = CostModel(r_weight=1.0)
        value = robust_cost(np.array([2.0]), base, model)
        # H = 2*650 in xi coordinates; l1 = 1300 < 2500 so no penalty
        assert value == pytest.approx(1e-4, rel=1e-6)
        strong = lambda x: float(1300.0 * (x[0] / 2.0 - 1.0) ** 2 + 1e-4)
        value = robust_cost(np.array([2.0]), strong, model)
        assert value == pytest.approx(1e-4 + (2600.0 - 2500.0) ** 2, rel=1e-4)

    def test_deterministic(self):
        base = lambda x: float(np.cos(x[0]) + x[1] ** 2)
        model = CostModel(r_weight=0.5)
        x = np.array([0.7, 1.1])
        assert robust_cost(x, base, model) == robust_cost(x, base, model)


def test_cost_model_validation():
    with pytest.raises(ValueError):
        CostModel(r_weight=-1.0)
    with pytest.raises(ValueError):
        CostModel(l1_threshold=0.0)
