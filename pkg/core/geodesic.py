"""
Geodesic-like distance between boundaries on a surface.

Every periodic copy of the problem is initialised, solved by damped Newton and trimmed;
the shortest converged copy wins.
"""
import logging
import math
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from core.boundary import BoundaryCurve
from core.energy import DofVector, greville_interior
from core.errors import ContractError, ConvergenceError, DegenerateTangentError, GeodesicError
from core.newton import solve_newton
from core.problem import ProblemSpec, SolveReport, SolverConfig
from core.solver import Contact, Solver, boundaries_intersect, initialize, periodic_candidates
from core.spline import BSplineCurve2
from core.trimming import refit, trim_and_resolve

logger = logging.getLogger(__name__)

TIE_TOL = 1e-12
DEFAULT_SCHEDULE = (5, 10, 20, 40, 60)


class GeodesicLikeSolver(Solver):
    """Shortest geodesic-like curve over all periodic candidates"""

    def solve(self) -> SolveReport:
        self.report = solve_distance(self.problem, self.config)
        self.total_length = self.report.length
        return self.report


def solve_candidate(candidate: ProblemSpec, cfg: SolverConfig, init: Optional[DofVector] = None) -> SolveReport:
    """initialize, solve_newton and trim_and_resolve for one periodic copy"""
    init = init if init is not None else initialize(candidate)
    report = trim_and_resolve(candidate, solve_newton(candidate, init, cfg), cfg)
    logger.info("candidate %d (shift %s): length=%.12g converged=%s iterations=%d trim_rounds=%d",
                candidate.candidate_index, candidate.shift, report.length, report.converged,
                report.iterations, report.trim_rounds)
    return report


def select_winner(reports: Sequence[SolveReport]) -> Optional[SolveReport]:
    """Shortest converged report; near-ties go to the lowest candidate index"""
    converged = [r for r in reports if r.converged]
    if not converged:
        return None
    shortest = min(r.length for r in converged)
    return min((r for r in converged if r.length <= shortest + TIE_TOL), key=lambda r: r.candidate_index)


def degenerate_report(contact: Contact) -> SolveReport:
    """Zero-length report for boundaries that touch"""
    problem = contact.problem
    interior = np.tile(contact.uv, (problem.order - 2, 1))
    dof = DofVector.from_parts(problem.mode, contact.s, contact.t, interior)
    curve = BSplineCurve2(tuple(map(tuple, np.tile(contact.uv, (problem.order, 1)))), problem.knots)
    return SolveReport(curve=curve, dof=dof, length=0.0, energy=0.0, grad_norm=0.0, iterations=0,
                       candidate_index=problem.candidate_index, converged=True, problem=problem,
                       initial_energy=0.0, degenerate=True)


def solve_distance(problem: ProblemSpec, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Locally shortest geodesic-like curve between c1 and c2"""
    cfg = cfg or SolverConfig()
    contact = boundaries_intersect(problem)
    if contact is not None:
        logger.warning("boundaries touch at (%.6g, %.6g) on candidate %d; distance is 0",
                       contact.uv[0], contact.uv[1], contact.problem.candidate_index)
        return degenerate_report(contact)

    reports, diagnostics = [], []
    for candidate in periodic_candidates(problem):
        try:
            report = solve_candidate(candidate, cfg)
        except GeodesicError as exc:
            logger.warning("candidate %d failed: %s", candidate.candidate_index, exc)
            diagnostics.append({"candidate_index": candidate.candidate_index, "converged": False,
                                "trim_failed": False, "failure": str(exc)})
            reports.append(None)
            continue
        reports.append(report)
        if not report.converged:
            diagnostics.append(report.diagnostics())

    winner = select_winner([r for r in reports if r is not None])
    if winner is None:
        raise ConvergenceError(f"none of {len(reports)} periodic candidates converged", diagnostics)

    lengths = tuple(r.length if r is not None and r.converged else None for r in reports)
    curves = tuple(None if r is None else r.curve for r in reports)
    logger.info("winner: candidate %d, length %.12g", winner.candidate_index, winner.length)
    return replace(winner, candidate_lengths=lengths, candidate_curves=curves)


def failed_report(problem: ProblemSpec, message: str) -> SolveReport:
    """Placeholder for an order whose solve raised; carries the straight initial curve"""
    start, end = problem.c1.evaluate(0.0), problem.c2.evaluate(0.0)
    dof = DofVector.from_parts(problem.mode, 0.0, 0.0, greville_interior(problem.knots, start, end))
    model = problem.energy_model()
    return SolveReport(curve=model.curve(dof.values), dof=dof, length=math.nan, energy=math.nan,
                       grad_norm=math.nan, iterations=0, problem=problem, failure=message)


def refine_order(problem: ProblemSpec, cfg: Optional[SolverConfig] = None,
                 schedule: Sequence[int] = DEFAULT_SCHEDULE) -> List[SolveReport]:
    """Solve at every order of the schedule, each warm-started from the last converged one"""
    cfg = cfg or SolverConfig()
    orders = list(schedule)
    if any(b <= a for a, b in zip(orders, orders[1:])):
        raise ContractError(f"order schedule must be increasing, got {orders}")

    reports, previous = [], None
    for order in orders:
        current = problem.with_order(order)
        try:
            if previous is None or previous.degenerate:
                report = solve_distance(current, cfg)
            else:
                candidate = periodic_candidates(current)[previous.candidate_index]
                init = refit(candidate, previous.curve, previous.dof.s, previous.dof.t)
                report = solve_candidate(candidate, cfg, init)
        except GeodesicError as exc:
            logger.warning("order %d failed: %s", order, exc)
            report = failed_report(current, str(exc))

        logger.info("order %d: length=%.12g converged=%s", order, report.length, report.converged)
        reports.append(report)
        if report.converged:
            previous = report
    return reports


def _angle(a: np.ndarray, b: np.ndarray, which: str) -> float:
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na < 1e-14 or nb < 1e-14:
        raise DegenerateTangentError(f"zero tangent at the {which} contact")
    return math.degrees(math.atan2(np.linalg.norm(np.cross(a, b)), float(np.dot(a, b))))


def endpoint_orthogonality(report: SolveReport, c1: Optional[BoundaryCurve] = None,
                           c2: Optional[BoundaryCurve] = None) -> Tuple[Optional[float], Optional[float]]:
    """Angles in degrees between the curve and each boundary at its contacts; None for point ends"""
    problem = report.problem
    c1 = c1 or problem.c1
    c2 = c2 or problem.c2
    a, b = report.curve.domain
    angles = []
    for x, boundary, param, which in ((a, c1, report.dof.s, "c1"), (b, c2, report.dof.t, "c2")):
        if boundary.is_point:
            angles.append(None)
            continue
        p, d = report.curve.evaluate(x), report.curve.evaluate(x, 1)
        jet = problem.surface.jet(p[0], p[1])
        db = boundary.evaluate(param, 1)
        angles.append(_angle(jet.velocity(d[0], d[1]), jet.velocity(db[0], db[1]), which))
    return angles[0], angles[1]
