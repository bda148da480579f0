import numpy as np
import pytest

from core.boundary import BoundaryCurve
from core.energy import DofVector, greville_interior
from core.newton import solve_newton
from core.problem import ProblemSpec, SolverConfig
from core.solver import initialize
from core.spline import BSplineCurve2, KnotVector
from core.trimming import (curve_intersections, fit_interior, interior_intersections, polyline_crossings,
                           trim_and_resolve)


@pytest.fixture
def crossing(plane):
    """A point above the unit circle joined to the far side of the circle, so the curve cuts through it"""
    problem = ProblemSpec.between(plane, BoundaryCurve.at(0.0, 3.0), BoundaryCurve.circle((0.0, 0.0), 1.0), order=7)
    end = problem.c2.evaluate(0.75)
    init = DofVector.from_parts(problem.mode, 0.0, 0.75,
                                greville_interior(problem.knots, problem.c1.point, end))
    return problem, solve_newton(problem, init, SolverConfig(max_iters=0))


class TestPolylines:
    def test_x_crossing(self):
        A = np.array([(0.0, 0.0), (2.0, 2.0)])
        B = np.array([(0.0, 2.0), (2.0, 0.0)])
        [(i, lam, j, mu)] = polyline_crossings(A, B)
        assert (i, j) == (0, 0)
        assert lam == pytest.approx(0.5) and mu == pytest.approx(0.5)

    def test_parallel_segments(self):
        A = np.array([(0.0, 0.0), (1.0, 0.0)])
        B = np.array([(0.0, 1.0), (1.0, 1.0)])
        assert polyline_crossings(A, B) == []

    def test_collinear_overlap_is_ignored(self):
        A = np.array([(0.0, 0.0), (2.0, 0.0)])
        B = np.array([(1.0, 0.0), (3.0, 0.0)])
        assert polyline_crossings(A, B) == []


class TestCurveIntersections:
    def test_line_through_circle(self):
        line = BSplineCurve2.from_points([(0.0, -3.0), (0.0, 0.0), (0.0, 3.0)])
        hits = curve_intersections(line, BoundaryCurve.circle((0.0, 0.0), 1.0))
        assert len(hits) == 2
        np.testing.assert_allclose([x for x, _ in hits], [1.0 / 3.0, 2.0 / 3.0], atol=1e-5)
        np.testing.assert_allclose([s for _, s in hits], [0.75, 0.25], atol=1e-5)

    def test_point_boundary_has_no_crossings(self):
        line = BSplineCurve2.from_points([(-1.0, 0.0), (0.0, 0.0), (1.0, 0.0)])
        assert curve_intersections(line, BoundaryCurve.at(0.0, 0.0)) == []

    def test_end_contacts_are_not_interior(self, plane, concentric):
        problem = ProblemSpec.between(plane, *concentric, order=5)
        report = solve_newton(problem, initialize(problem))
        assert interior_intersections(report.curve, problem) == []


def test_fit_reproduces_a_line():
    knots = KnotVector.uniform(8, 2)
    tau = np.linspace(0.0, 1.0, 64)
    targets = np.outer(1.0 - tau, (0.0, 1.0)) + np.outer(tau, (2.0, -1.0))
    interior = fit_interior(knots, targets, tau, (0.0, 1.0), (2.0, -1.0))
    np.testing.assert_allclose(interior, greville_interior(knots, (0.0, 1.0), (2.0, -1.0)), atol=1e-12)


class TestTrimAndResolve:
    def test_clean_report_is_unchanged(self, plane, concentric):
        problem = ProblemSpec.between(plane, *concentric, order=5)
        report = solve_newton(problem, initialize(problem))
        trimmed = trim_and_resolve(problem, report)
        assert trimmed.trim_rounds == 0
        assert trimmed.length == report.length
        assert trimmed.converged == report.converged

    def test_curve_through_circle_is_trimmed(self, crossing):
        problem, report = crossing
        assert len(interior_intersections(report.curve, problem)) == 1
        trimmed = trim_and_resolve(problem, report)
        assert trimmed.trim_rounds == 1
        [(x0, x1)] = trimmed.trimmed_ranges
        assert x0 == 0.0 and x1 == pytest.approx(0.5, abs=1e-4)
        assert trimmed.converged and not trimmed.trim_failed
        assert interior_intersections(trimmed.curve, problem) == []
        assert trimmed.length == pytest.approx(2.0, rel=1e-9)
        assert trimmed.length <= report.length
        np.testing.assert_allclose(problem.c2.evaluate(trimmed.dof.t), (0.0, 1.0), atol=1e-8)

    def test_round_limit(self, crossing):
        problem, report = crossing
        trimmed = trim_and_resolve(problem, report, SolverConfig(trim_max_rounds=0))
        assert trimmed.trim_failed
        assert not trimmed.converged
        assert trimmed.trim_rounds == 0
        assert "trimming" in trimmed.failure
