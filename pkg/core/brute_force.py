import logging
from typing import NamedTuple, Optional

import numpy as np

from core.boundary import BoundaryCurve
from core.errors import ContractError, ConvergenceError, GeodesicError
from core.geodesic import solve_distance
from core.problem import DEFAULT_DEGREE, DEFAULT_ORDER, ProblemSpec, SolveReport, SolverConfig
from core.solver import Solver
from core.surface import Surface

logger = logging.getLogger(__name__)


class BruteForceResult(NamedTuple):
    length: float
    i: int
    j: int
    skipped: int
    report: SolveReport


def digitize(boundary: BoundaryCurve, count: int) -> np.ndarray:
    """Boundary parameters of the digitised points; closed curves skip the repeated end"""
    if count < 1:
        raise ContractError(f"need at least one sample per boundary, got {count}")
    if boundary.is_point or count == 1:
        return np.zeros(1)
    if boundary.closed:
        return np.arange(count) / count
    return np.linspace(0.0, 1.0, count)


def brute_force_distance(surface: Surface, c1: BoundaryCurve, c2: BoundaryCurve, m: int, n: int,
                         cfg: Optional[SolverConfig] = None, order: int = DEFAULT_ORDER,
                         degree: int = DEFAULT_DEGREE) -> BruteForceResult:
    """Shortest of the point-to-point solves between m samples of c1 and n samples of c2"""
    S, T = digitize(c1, m), digitize(c2, n)
    P, Q = c1.evaluate(S), c2.evaluate(T)

    best: Optional[BruteForceResult] = None
    skipped = 0
    for i, p in enumerate(np.atleast_2d(P)):
        for j, q in enumerate(np.atleast_2d(Q)):
            problem = ProblemSpec.between(surface, BoundaryCurve.at(*p), BoundaryCurve.at(*q), order, degree)
            try:
                report = solve_distance(problem, cfg)
            except GeodesicError as exc:
                skipped += 1
                logger.warning("pair (%d, %d) skipped: %s", i, j, exc)
                continue
            logger.debug("pair (%d, %d): length %.12g", i, j, report.length)
            if best is None or report.length < best.length:
                best = BruteForceResult(report.length, i, j, 0, report)

    if best is None:
        raise ConvergenceError(f"all {len(S) * len(T)} digitised pairs failed")
    return best._replace(skipped=skipped)


class BruteForceSolver(Solver):
    """Digitise both boundaries and keep the shortest point-to-point geodesic"""

    def __init__(self, problem: ProblemSpec, config: Optional[SolverConfig] = None, m: int = 16, n: int = 16):
        super().__init__(problem, config)
        self.m = m
        self.n = n
        self.result: Optional[BruteForceResult] = None

    def solve(self) -> SolveReport:
        self.result = brute_force_distance(self.problem.surface, self.problem.c1, self.problem.c2,
                                           self.m, self.n, self.config, self.problem.order,
                                           self.problem.knots.degree)
        self.report = self.result.report
        self.total_length = self.result.length
        return self.report
