import logging
from abc import ABC, abstractmethod
from dataclasses import replace
from typing import List, NamedTuple, Optional

import numpy as np
from scipy import optimize
from scipy.spatial.distance import cdist

from core.boundary import BoundaryCurve
from core.energy import DofVector, greville_interior, length
from core.errors import DomainError
from core.problem import ProblemSpec, SolveReport, SolverConfig
from core.quadrature import QuadratureRule
from core.spline import BSplineCurve2
from core.trimming import polyline_crossings

logger = logging.getLogger(__name__)

# samples per boundary in the endpoint grid search
CHORD_GRID = 32
CONTACT_SAMPLES = 512
CONTACT_TOL = 1e-9


class Solver(ABC):
    """Abstract base class for distance solvers"""

    def __init__(self, problem: ProblemSpec, config: Optional[SolverConfig] = None):
        self.problem = problem
        self.config = config or SolverConfig()
        self.report: Optional[SolveReport] = None
        self.total_length = 0.0

    @abstractmethod
    def solve(self) -> SolveReport:
        """Solve the distance problem"""
        pass

    def calculate_length(self, curve: BSplineCurve2) -> float:
        """Surface length of a parameter-domain curve of the problem's knots"""
        return length(self.problem.surface, curve, QuadratureRule.gauss_legendre(curve.knots))

    def polyline(self, count: int = 256) -> np.ndarray:
        """3D samples of the solved curve"""
        if self.report is None:
            self.solve()
        uv = self.report.curve.sample(count)
        return self.problem.surface.point(uv[:, 0], uv[:, 1])


def _grid(boundary: BoundaryCurve, free: bool) -> np.ndarray:
    if not free:
        return np.zeros(1)
    if boundary.closed:
        return np.arange(CHORD_GRID) / CHORD_GRID
    return np.linspace(0.0, 1.0, CHORD_GRID)


def initialize(problem: ProblemSpec) -> DofVector:
    """Endpoints from the closest ambient chord on a coarse grid, interior on the straight segment"""
    mode, surface = problem.mode, problem.surface
    S, T = _grid(problem.c1, mode.free_s), _grid(problem.c2, mode.free_t)
    A, B = problem.c1.evaluate(S), problem.c2.evaluate(T)
    chords = cdist(surface.point(A[:, 0], A[:, 1]), surface.point(B[:, 0], B[:, 1]))
    i, j = np.unravel_index(int(np.argmin(chords)), chords.shape)

    s, t = float(S[i]), float(T[j])
    logger.debug("initial endpoints s=%.6f t=%.6f, chord %.6e", s, t, chords[i, j])
    interior = greville_interior(problem.knots, problem.c1.evaluate(s), problem.c2.evaluate(t))
    return DofVector.from_parts(mode, s, t, interior)


def _shift_sign(c1: BoundaryCurve, c2: BoundaryCurve, axis: int) -> float:
    return 1.0 if c1.centroid()[axis] <= c2.centroid()[axis] else -1.0


def periodic_candidates(problem: ProblemSpec) -> List[ProblemSpec]:
    """Copies of the problem with c1 moved by whole periods; c2 stays in the base domain"""
    period_u, period_v = problem.surface.periods()
    steps_u = (0, 1) if period_u else (0,)
    steps_v = (0, 1) if period_v else (0,)
    du = period_u * _shift_sign(problem.c1, problem.c2, 0) if period_u else 0.0
    dv = period_v * _shift_sign(problem.c1, problem.c2, 1) if period_v else 0.0

    candidates = []
    for jv in steps_v:
        for ju in steps_u:
            shift = (ju * du, jv * dv)
            c1 = problem.c1.translated(*shift) if ju or jv else problem.c1
            candidates.append(replace(problem, c1=c1, candidate_index=len(candidates), shift=shift))
    return candidates


class Contact(NamedTuple):
    """Where the boundaries of a periodic candidate touch"""
    problem: ProblemSpec
    s: float
    t: float
    uv: np.ndarray


def _gap(boundary: BoundaryCurve, point: np.ndarray, s: float) -> float:
    return float(np.linalg.norm(boundary.evaluate(s) - point))


def _point_on_curve(point: np.ndarray, boundary: BoundaryCurve) -> Optional[float]:
    ss = np.linspace(0.0, 1.0, CONTACT_SAMPLES)
    gaps = np.linalg.norm(boundary.evaluate(ss) - point, axis=1)
    k = int(np.argmin(gaps))
    lo, hi = ss[max(k - 1, 0)], ss[min(k + 1, len(ss) - 1)]
    s = float(optimize.fminbound(lambda x: _gap(boundary, point, x) ** 2, lo, hi, xtol=1e-12))

    # the bounded search stops near sqrt(eps) in s; polish on the foot-point condition
    def foot(x):
        return float((boundary.evaluate(x) - point) @ boundary.evaluate(x, 1))

    def foot_slope(x):
        d1 = boundary.evaluate(x, 1)
        return float(d1 @ d1 + (boundary.evaluate(x) - point) @ boundary.evaluate(x, 2))

    try:
        polished = float(optimize.newton(foot, s, fprime=foot_slope, tol=1e-15, maxiter=20))
        polished = float(boundary.wrap(polished))
        if _gap(boundary, point, polished) < _gap(boundary, point, s):
            s = polished
    except (RuntimeError, DomainError):
        pass

    if _gap(boundary, point, s) <= CONTACT_TOL:
        return s
    return float(ss[k]) if gaps[k] <= CONTACT_TOL else None


def _contact(problem: ProblemSpec) -> Optional[Contact]:
    c1, c2, surface = problem.c1, problem.c2, problem.surface
    if c1.is_point and c2.is_point:
        gap = np.linalg.norm(surface.point(*c1.point) - surface.point(*c2.point))
        return Contact(problem, 0.0, 0.0, np.array(c1.point)) if gap <= CONTACT_TOL else None
    if c1.is_point:
        t = _point_on_curve(np.array(c1.point), c2)
        return None if t is None else Contact(problem, 0.0, t, np.array(c1.point))

    A, B = c1.sample(CONTACT_SAMPLES), c2.sample(CONTACT_SAMPLES)
    crossings = polyline_crossings(A, B)
    if not crossings:
        return None
    i, lam, j, mu = crossings[0]
    scale = CONTACT_SAMPLES - 1
    return Contact(problem, (i + lam) / scale, (j + mu) / scale, A[i] + lam * (A[i + 1] - A[i]))


def boundaries_intersect(problem: ProblemSpec) -> Optional[Contact]:
    """First periodic candidate whose boundaries touch, or None"""
    for candidate in periodic_candidates(problem):
        contact = _contact(candidate)
        if contact is not None:
            return contact
    return None
