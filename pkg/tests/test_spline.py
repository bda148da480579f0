import math

import numpy as np
import pytest

from core.errors import ContractError, DomainError
from core.nurbs import NurbsSurface, circle_section, nurbs_cylinder
from core.spline import BSplineCurve2, KnotVector, basis_eval, basis_matrix, curve_eval
from core.surface import surface_jet
from data.data_generator import SceneGenerator


def central_jet(surface, u, v, h=1e-5):
    """Finite-difference partials of position and of the first partials"""
    p = lambda a, b: surface.jet(a, b)  # noqa: E731
    du = (p(u + h, v).position - p(u - h, v).position) / (2 * h)
    dv = (p(u, v + h).position - p(u, v - h).position) / (2 * h)
    duu = (p(u + h, v).du - p(u - h, v).du) / (2 * h)
    duv = (p(u, v + h).du - p(u, v - h).du) / (2 * h)
    dvu = (p(u + h, v).dv - p(u - h, v).dv) / (2 * h)
    dvv = (p(u, v + h).dv - p(u, v - h).dv) / (2 * h)
    return du, dv, duu, duv, dvu, dvv


class TestKnotVector:
    def test_uniform_quadratic(self):
        knots = KnotVector.uniform(5, 2)
        assert knots.values == pytest.approx((0.0, 0.0, 0.0, 1 / 3, 2 / 3, 1.0, 1.0, 1.0))
        assert knots.n_basis == 5
        np.testing.assert_allclose(knots.breakpoints, [0, 1 / 3, 2 / 3, 1])

    @pytest.mark.parametrize("values, degree", [
        ((0, 0, 0.5, 1, 1, 1), 2),          # not clamped at the start
        ((0, 0, 0, 0.6, 0.4, 1, 1, 1), 2),  # decreasing
        ((0, 0, 1, 1), 2),                  # too short
        ((1, 1, 1, 1, 1, 1), 2),            # empty range
    ])
    def test_invalid(self, values, degree):
        with pytest.raises(ContractError):
            KnotVector(values, degree)

    def test_greville_of_uniform_quadratic(self):
        g = KnotVector.uniform(4, 2).greville()
        np.testing.assert_allclose(g, [0.0, 0.25, 0.75, 1.0])


class TestBasis:
    @pytest.mark.parametrize("n, degree", [(3, 2), (11, 2), (8, 3), (30, 2)])
    def test_partition_of_unity(self, n, degree):
        knots = KnotVector.uniform(n, degree)
        x = np.linspace(0.0, 1.0, 101)
        np.testing.assert_allclose(basis_matrix(knots, x).sum(axis=1), 1.0, atol=1e-13)
        np.testing.assert_allclose(basis_matrix(knots, x, 1).sum(axis=1), 0.0, atol=1e-11)
        np.testing.assert_allclose(basis_matrix(knots, x, 2).sum(axis=1), 0.0, atol=1e-9)

    def test_clamped_end_values(self):
        knots = KnotVector.uniform(6, 2)
        assert basis_eval(knots, 0, 0.0) == 1.0
        assert basis_eval(knots, 5, 1.0) == 1.0
        assert basis_eval(knots, 2, 0.0) == 0.0

    def test_derivative_matches_finite_difference(self):
        knots = KnotVector.uniform(7, 2)
        x, h = 0.37, 1e-6
        for i in range(knots.n_basis):
            fd = (basis_eval(knots, i, x + h) - basis_eval(knots, i, x - h)) / (2 * h)
            assert basis_eval(knots, i, x, 1) == pytest.approx(fd, rel=1e-6, abs=1e-8)

    def test_outside_range_raises_with_index(self):
        knots = KnotVector.uniform(4, 2)
        with pytest.raises(DomainError) as info:
            basis_matrix(knots, [0.2, 0.5, 1.5])
        assert info.value.index == 2

    def test_rounding_noise_is_tolerated(self):
        knots = KnotVector.uniform(4, 2)
        row = basis_matrix(knots, 1.0 + 1e-14)[0]
        assert row[-1] == pytest.approx(1.0)

    def test_bad_index(self):
        with pytest.raises(ContractError):
            basis_eval(KnotVector.uniform(4, 2), 4, 0.5)


class TestCurve:
    def test_collinear_controls(self):
        curve = BSplineCurve2.from_points([(0, 0), (0.5, 0.5), (1, 1)])
        np.testing.assert_allclose(curve_eval(curve, 0.5), [0.5, 0.5], atol=1e-15)

    def test_endpoints_interpolate(self, rng):
        points = rng.uniform(-1, 1, size=(6, 2))
        curve = BSplineCurve2.from_points(points)
        np.testing.assert_array_equal(curve.evaluate(0.0), points[0])
        np.testing.assert_allclose(curve.evaluate(1.0), points[-1], atol=1e-15)

    def test_derivatives_match_finite_differences(self, rng):
        curve = BSplineCurve2.from_points(rng.uniform(-1, 1, size=(6, 2)))
        x, h = 0.37, 1e-6
        fd1 = (curve.evaluate(x + h) - curve.evaluate(x - h)) / (2 * h)
        fd2 = (curve.evaluate(x + h, 1) - curve.evaluate(x - h, 1)) / (2 * h)
        np.testing.assert_allclose(curve.evaluate(x, 1), fd1, rtol=1e-7, atol=1e-8)
        np.testing.assert_allclose(curve.evaluate(x, 2), fd2, rtol=1e-7, atol=1e-7)

    def test_rational_circle_is_exact(self):
        points, weights, knots = circle_section(1.5, (0.2, -0.3))
        curve = BSplineCurve2(tuple(points), knots, tuple(weights))
        xy = curve.sample(200)
        np.testing.assert_allclose(np.hypot(xy[:, 0] - 0.2, xy[:, 1] + 0.3), 1.5, atol=1e-12)

    def test_rational_derivatives(self):
        points, weights, knots = circle_section(1.0)
        curve = BSplineCurve2(tuple(points), knots, tuple(weights))
        x, h = 0.3, 1e-6
        fd1 = (curve.evaluate(x + h) - curve.evaluate(x - h)) / (2 * h)
        fd2 = (curve.evaluate(x + h, 1) - curve.evaluate(x - h, 1)) / (2 * h)
        np.testing.assert_allclose(curve.evaluate(x, 1), fd1, rtol=1e-7, atol=1e-8)
        np.testing.assert_allclose(curve.evaluate(x, 2), fd2, rtol=1e-6, atol=1e-6)

    def test_reversed_traces_same_points(self, rng):
        curve = BSplineCurve2.from_points(rng.uniform(-1, 1, size=(5, 2)))
        x = np.linspace(0, 1, 17)
        np.testing.assert_allclose(curve.reversed().evaluate(x), curve.evaluate(1 - x), atol=1e-14)

    def test_control_count_must_match(self):
        with pytest.raises(ContractError):
            BSplineCurve2(((0, 0), (1, 1)), KnotVector.uniform(3, 2))


class TestNurbsSurface:
    def test_flat_bilinear_patch(self):
        net = (((0, 0, 0), (0, 1, 0)), ((1, 0, 0), (1, 1, 0)))
        patch = NurbsSurface(net, KnotVector.uniform(2, 1), KnotVector.uniform(2, 1))
        jet = surface_jet(patch, 0.3, 0.7)
        np.testing.assert_allclose(jet.position, [0.3, 0.7, 0.0])
        for second in (jet.duu, jet.duv, jet.dvv):
            np.testing.assert_array_equal(second, 0.0)

    def test_exact_cylinder(self, rng):
        surface = nurbs_cylinder(1.0, 2.0)
        u, v = rng.uniform(0, 1, 20), rng.uniform(0, 1, 20)
        p = surface.point(u, v)
        np.testing.assert_allclose(np.hypot(p[:, 0], p[:, 1]), 1.0, atol=1e-12)

    def test_periodic_wrap(self, rng):
        surface = nurbs_cylinder(1.0, 2.0)
        u, v = rng.uniform(0, 1, 10), rng.uniform(0, 1, 10)
        a, b = surface.jet(u, v), surface.jet(u + 1.0, v)
        for name in ("position", "du", "dv", "duu", "duv", "dvv"):
            np.testing.assert_allclose(getattr(a, name), getattr(b, name), atol=1e-12)

    def test_non_periodic_direction_raises(self):
        with pytest.raises(DomainError):
            nurbs_cylinder(1.0, 2.0).jet(0.5, 1.5)

    def test_uniform_weights_match_polynomial_surface(self, rng):
        polynomial = SceneGenerator().bumpy_face().surface
        scaled = NurbsSurface(polynomial.control_net, polynomial.knots_u, polynomial.knots_v,
                              tuple(tuple(2.0 for _ in row) for row in polynomial.control_net))
        u, v = rng.uniform(0, 1, 30), rng.uniform(0, 1, 30)
        a, b = polynomial.jet(u, v), scaled.jet(u, v)
        for name in ("position", "du", "dv", "duu", "duv", "dvv"):
            np.testing.assert_allclose(getattr(a, name), getattr(b, name), rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("surface", [SceneGenerator().bumpy_face().surface, nurbs_cylinder(1.0, 2.0)],
                             ids=["bumpy", "cylinder"])
    def test_partials_match_finite_differences(self, surface, rng):
        for u, v in rng.uniform(0.05, 0.95, size=(50, 2)):
            jet = surface.jet(u, v)
            du, dv, duu, duv, dvu, dvv = central_jet(surface, u, v)
            scale = 1.0 + np.abs(jet.duu).max() + np.abs(jet.dvv).max()
            np.testing.assert_allclose(jet.du, du, rtol=1e-6, atol=1e-6 * scale)
            np.testing.assert_allclose(jet.dv, dv, rtol=1e-6, atol=1e-6 * scale)
            np.testing.assert_allclose(jet.duu, duu, rtol=1e-6, atol=1e-6 * scale)
            np.testing.assert_allclose(jet.duv, duv, rtol=1e-6, atol=1e-6 * scale)
            np.testing.assert_allclose(jet.duv, dvu, rtol=1e-6, atol=1e-6 * scale)
            np.testing.assert_allclose(jet.dvv, dvv, rtol=1e-6, atol=1e-6 * scale)

    def test_rejects_bad_weights(self):
        net = (((0, 0, 0), (0, 1, 0)), ((1, 0, 0), (1, 1, 0)))
        with pytest.raises(ContractError):
            NurbsSurface(net, KnotVector.uniform(2, 1), KnotVector.uniform(2, 1), ((1, 0), (1, 1)))

    def test_rejects_open_seam(self):
        net = (((0, 0, 0), (0, 1, 0)), ((1, 0, 0), (1, 1, 0)))
        with pytest.raises(ContractError):
            NurbsSurface(net, KnotVector.uniform(2, 1), KnotVector.uniform(2, 1), periodic_u=True)

    def test_serialisation(self):
        surface = nurbs_cylinder(1.0, 2.0)
        assert NurbsSurface.from_dict(surface.to_dict()["nurbs"]) == surface
        assert math.isclose(surface.domain()[1], 1.0)
