import math

import numpy as np
import pytest

from core.boundary import BoundaryCurve
from core.catalog import analytic_distance
from core.energy import error_percent, geodesic_residual
from core.errors import ContractError, ConvergenceError
from core.geodesic import DEFAULT_SCHEDULE, GeodesicLikeSolver, endpoint_orthogonality, refine_order, solve_distance
from core.problem import ProblemSpec, SolverConfig
from core.solver import boundaries_intersect, initialize, periodic_candidates
from core.spline import BSplineCurve2
from data.data_generator import SceneGenerator

TWO_PI = 2.0 * math.pi


def constant_curve(u, v):
    return BoundaryCurve.from_bspline(BSplineCurve2.from_points([(u, v)] * 3))


def meridian_length(surface, v0, v1):
    """Arc length of the revolution profile between two heights"""
    x, w = np.polynomial.legendre.leggauss(40)
    v = v0 + 0.5 * (x + 1.0) * (v1 - v0)
    speed = np.linalg.norm(surface.profile.evaluate(v, 1), axis=1)
    return 0.5 * (v1 - v0) * float(w @ speed)


class TestCandidates:
    def test_counts(self, plane, cylinder, torus):
        a, b = BoundaryCurve.at(0.5, 0.5), BoundaryCurve.at(1.0, 1.0)
        assert len(periodic_candidates(ProblemSpec.between(plane, a, b))) == 1
        assert len(periodic_candidates(ProblemSpec.between(cylinder, a, b))) == 2
        assert len(periodic_candidates(ProblemSpec.between(torus, a, b))) == 4

    def test_torus_order_and_shifts(self, torus):
        problem = ProblemSpec.between(torus, BoundaryCurve.at(5.0, 1.0), BoundaryCurve.at(1.0, 2.0))
        candidates = periodic_candidates(problem)
        assert [c.candidate_index for c in candidates] == [0, 1, 2, 3]
        assert [c.shift for c in candidates] == [(0.0, 0.0), (-TWO_PI, 0.0), (0.0, TWO_PI), (-TWO_PI, TWO_PI)]
        assert candidates[3].c1.point == pytest.approx((5.0 - TWO_PI, 1.0 + TWO_PI))
        assert all(c.c2 is problem.c2 for c in candidates)


class TestInitialize:
    def test_deterministic(self, torus):
        problem = ProblemSpec.between(torus, BoundaryCurve.circle((1.0, 1.0), 0.3),
                                      BoundaryCurve.segment((3.0, 2.0), (4.0, 4.0)), order=8)
        first, second = initialize(problem), initialize(problem)
        np.testing.assert_array_equal(first.values, second.values)

    def test_concentric_chord(self, plane, concentric):
        problem = ProblemSpec.between(plane, *concentric, order=5)
        dof = initialize(problem)
        a, b = problem.c1.evaluate(dof.s), problem.c2.evaluate(dof.t)
        assert np.linalg.norm(b - a) == pytest.approx(1.0, abs=1e-12)


class TestSolveDistance:
    def test_cylinder_wraps_the_short_way(self, cylinder):
        problem = ProblemSpec.between(cylinder, BoundaryCurve.at(0.2, 0.5), BoundaryCurve.at(0.2 + 1.5 * math.pi, 0.5))
        report = solve_distance(problem)
        assert report.candidate_index == 1
        assert report.length == pytest.approx(0.5 * math.pi, rel=1e-10)
        assert report.candidate_lengths[0] == pytest.approx(1.5 * math.pi, rel=1e-10)
        assert len(report.candidate_curves) == 2

    def test_concentric_circles(self, plane, concentric):
        report = solve_distance(ProblemSpec.between(plane, *concentric, order=5))
        assert report.converged
        assert report.length == pytest.approx(1.0, rel=1e-10)
        angle1, angle2 = endpoint_orthogonality(report)
        assert angle1 == pytest.approx(90.0, abs=1e-6)
        assert angle2 == pytest.approx(90.0, abs=1e-6)

    def test_symmetric(self, sphere):
        p, q = BoundaryCurve.at(0.3, 0.0), BoundaryCurve.at(1.0, 0.7)
        forward = solve_distance(ProblemSpec.between(sphere, p, q))
        backward = solve_distance(ProblemSpec.between(sphere, q, p))
        assert forward.length == pytest.approx(backward.length, rel=1e-9)

    def test_constant_curves_reduce_to_points(self, plane):
        points = solve_distance(ProblemSpec.between(plane, BoundaryCurve.at(0.0, 0.0), BoundaryCurve.at(3.0, 4.0)))
        curves = solve_distance(ProblemSpec.between(plane, constant_curve(0.0, 0.0), constant_curve(3.0, 4.0)))
        assert points.length == pytest.approx(5.0, rel=1e-12)
        assert curves.length == pytest.approx(points.length, rel=1e-10)

    def test_long_arc_loses_to_the_wrapped_copy(self, sphere):
        problem = ProblemSpec.between(sphere, BoundaryCurve.at(0.0, 0.0), BoundaryCurve.at(4.5, 0.0), order=4)
        report = solve_distance(problem)
        assert report.candidate_index == 1
        assert report.length == pytest.approx(TWO_PI - 4.5, rel=1e-10)

    def test_cylinder_parallels(self, cylinder):
        bottom, top = BoundaryCurve.parallel(0.5, TWO_PI), BoundaryCurve.parallel(1.5, TWO_PI)
        report = solve_distance(ProblemSpec.between(cylinder, bottom, top, order=5))
        assert report.length == pytest.approx(1.0, rel=1e-9)
        assert report.candidate_index == 0
        for angle in endpoint_orthogonality(report):
            assert angle == pytest.approx(90.0, abs=1e-5)

    def test_torus_rings(self, torus):
        ring_a, ring_b = BoundaryCurve.parallel(0.5, TWO_PI), BoundaryCurve.parallel(2.5, TWO_PI)
        report = solve_distance(ProblemSpec.between(torus, ring_a, ring_b, order=9))
        assert report.length == pytest.approx(1.0, rel=1e-8)
        assert len(report.candidate_lengths) == 4
        for angle in endpoint_orthogonality(report):
            assert angle == pytest.approx(90.0, abs=1e-5)

    def test_torus_rings_at_high_order(self, torus):
        ring_a, ring_b = BoundaryCurve.parallel(0.5, TWO_PI), BoundaryCurve.parallel(2.5, TWO_PI)
        report = solve_distance(ProblemSpec.between(torus, ring_a, ring_b, order=40))
        assert report.length == pytest.approx(1.0, rel=1e-8)
        for angle in endpoint_orthogonality(report):
            assert angle == pytest.approx(90.0, abs=0.1)

    def test_winner_is_no_longer_than_any_converged_candidate(self, torus):
        report = solve_distance(ProblemSpec.between(torus, BoundaryCurve.at(0.4, 0.5), BoundaryCurve.at(5.5, 5.8)))
        assert len(report.candidate_lengths) == 4
        converged = [value for value in report.candidate_lengths if value is not None]
        assert report.length in converged
        assert all(report.length <= value for value in converged)

    def test_revolution_rings_meet_the_meridian(self, revolution):
        low, high = BoundaryCurve.parallel(0.15, TWO_PI), BoundaryCurve.parallel(0.85, TWO_PI)
        report = solve_distance(ProblemSpec.between(revolution, low, high, order=11))
        assert report.converged
        assert len(report.candidate_lengths) == 2
        assert report.length == pytest.approx(meridian_length(revolution, 0.15, 0.85), rel=1e-6)
        for angle in endpoint_orthogonality(report):
            assert angle == pytest.approx(90.0, abs=1e-3)

    def test_revolution_candidates(self, revolution):
        problem = ProblemSpec.between(revolution, BoundaryCurve.at(0.3, 0.2), BoundaryCurve.at(4.0, 0.8))
        candidates = periodic_candidates(problem)
        assert len(candidates) == 2
        assert candidates[1].shift == (TWO_PI, 0.0)

    def test_crossing_circles_are_degenerate(self, plane):
        problem = ProblemSpec.between(plane, BoundaryCurve.circle((0.0, 0.0), 1.0),
                                      BoundaryCurve.circle((1.0, 0.0), 1.0))
        report = solve_distance(problem)
        assert report.degenerate and report.converged
        assert report.length == 0.0
        assert np.linalg.norm(report.curve.evaluate(0.5) - (0.5, math.sqrt(0.75))) < 1e-2

    def test_point_on_curve_is_degenerate(self, plane):
        problem = ProblemSpec.between(plane, BoundaryCurve.at(0.0, 1.0), BoundaryCurve.circle((0.0, 0.0), 1.0))
        contact = boundaries_intersect(problem)
        assert contact is not None
        assert contact.t == pytest.approx(0.25, abs=1e-9)
        assert solve_distance(problem).length == 0.0

    def test_no_candidate_converges(self, sphere):
        problem = ProblemSpec.between(sphere, BoundaryCurve.at(0.3, 0.0), BoundaryCurve.at(1.0, 0.7))
        with pytest.raises(ConvergenceError) as info:
            solve_distance(problem, SolverConfig(max_iters=0))
        assert len(info.value.diagnostics) == 2
        assert not info.value.trim_failure

    def test_solver_class(self, cylinder):
        solver = GeodesicLikeSolver(ProblemSpec.between(cylinder, BoundaryCurve.at(0.0, 0.5),
                                                        BoundaryCurve.at(0.5 * math.pi, 1.5)))
        report = solver.solve()
        assert solver.total_length == report.length
        assert solver.calculate_length(report.curve) == pytest.approx(report.length, rel=1e-12)
        points = solver.polyline(33)
        assert points.shape == (33, 3)
        np.testing.assert_allclose(np.hypot(points[:, 0], points[:, 1]), 1.0)


class TestRefineOrder:
    def test_plane_is_exact_at_every_order(self, plane):
        problem = ProblemSpec.between(plane, BoundaryCurve.at(0.0, 0.0), BoundaryCurve.at(1.0, 2.0))
        reports = refine_order(problem, schedule=(4, 8, 16))
        assert [r.order for r in reports] == [4, 8, 16]
        for report in reports:
            assert report.length == pytest.approx(math.sqrt(5.0), rel=1e-12)

    def test_sphere_error_decreases(self, sphere):
        p, q = (0.3, 0.0), (1.0, 0.7)
        reports = refine_order(ProblemSpec.between(sphere, BoundaryCurve.at(*p), BoundaryCurve.at(*q)),
                               schedule=(5, 10, 20))
        reference = analytic_distance(sphere, p, q)
        errors = [abs(r.length - reference) for r in reports]
        assert all(r.converged for r in reports)
        assert errors[1] <= errors[0] and errors[2] <= errors[1]
        assert errors[2] < 1e-4 * reference

    def test_warm_start_keeps_the_candidate(self, cylinder):
        problem = ProblemSpec.between(cylinder, BoundaryCurve.at(0.2, 0.5), BoundaryCurve.at(0.2 + 1.5 * math.pi, 1.0))
        reports = refine_order(problem, schedule=(5, 9))
        assert [r.candidate_index for r in reports] == [1, 1]

    def test_revolution_lengths_do_not_grow_on_nested_orders(self, revolution):
        problem = ProblemSpec.between(revolution, BoundaryCurve.at(0.3, 0.2), BoundaryCurve.at(4.0, 0.8))
        reports = refine_order(problem, schedule=(4, 6, 10, 18, 34))
        assert all(r.converged for r in reports)
        lengths = [r.length for r in reports]
        for coarse, fine in zip(lengths, lengths[1:]):
            assert fine <= coarse + 1e-12

    def test_cylinder_parallels_over_the_default_schedule(self):
        scene = SceneGenerator().cylinder()
        problem = ProblemSpec.between(scene.surface, scene.curve("bottom"), scene.curve("top"))
        reports = refine_order(problem)
        assert [r.order for r in reports] == list(DEFAULT_SCHEDULE)
        errors = [abs(error_percent(r.length, 1.0)) for r in reports]
        for coarse, fine in zip(errors, errors[1:]):
            assert fine <= coarse + 1e-9
        assert errors[-1] < 1e-5

    @pytest.mark.parametrize("surface_name, p, q", [
        ("torus", (0.4, 0.5), (2.0, 2.0)),
        ("sphere", (0.3, 0.0), (1.0, 0.7)),
    ])
    def test_residual_falls_with_order(self, surface_name, p, q, request):
        surface = request.getfixturevalue(surface_name)
        reports = refine_order(ProblemSpec.between(surface, BoundaryCurve.at(*p), BoundaryCurve.at(*q)),
                               schedule=(10, 20, 40))
        residuals = [geodesic_residual(surface, r.curve) for r in reports]
        assert residuals[1] < residuals[0] and residuals[2] < residuals[1]
        assert residuals[2] < 1e-2

    def test_schedule_must_increase(self, plane):
        problem = ProblemSpec.between(plane, BoundaryCurve.at(0.0, 0.0), BoundaryCurve.at(1.0, 2.0))
        with pytest.raises(ContractError):
            refine_order(problem, schedule=(10, 5))

    def test_failed_orders_are_reported(self, sphere):
        problem = ProblemSpec.between(sphere, BoundaryCurve.at(0.3, 0.0), BoundaryCurve.at(1.0, 0.7))
        reports = refine_order(problem, SolverConfig(max_iters=0), schedule=(5, 10))
        assert [r.converged for r in reports] == [False, False]
        assert all(math.isnan(r.length) and r.failure for r in reports)


def test_point_ends_have_no_angle(plane):
    report = solve_distance(ProblemSpec.between(plane, BoundaryCurve.at(0.5, 1.5),
                                                BoundaryCurve.segment((-2.0, 0.0), (2.0, 0.0)), order=5))
    angle1, angle2 = endpoint_orthogonality(report)
    assert angle1 is None
    assert angle2 == pytest.approx(90.0, abs=1e-6)
