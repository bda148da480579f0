"""
Trimming of solved curves that run through a boundary curve, then re-solving.

The solved curve must meet c1 and c2 only at its own ends. When it crosses them in its
interior, the piece kept is a sub-arc between consecutive contacts, one on c1 and one on
c2, with no other contact inside; among those the shortest on the surface is kept, refitted
by least squares at the same order and solved again.
"""
import logging
from dataclasses import replace
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg, optimize

from core.boundary import BoundaryCurve
from core.energy import DofVector
from core.newton import solve_newton
from core.problem import ProblemSpec, SolveReport, SolverConfig
from core.spline import BSplineCurve2, KnotVector, basis_matrix

logger = logging.getLogger(__name__)

SAMPLES = 512
BISECT_TOL = 1e-10
LIFTED_TURNS = (-1, 2)


def _cross(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def polyline_crossings(A: np.ndarray, B: np.ndarray) -> List[Tuple[int, float, int, float]]:
    """Segment pairs that cross: (segment of A, fraction along it, segment of B, fraction along it)"""
    p, r = A[:-1], np.diff(A, axis=0)
    q, w = B[:-1], np.diff(B, axis=0)
    denom = _cross(r[:, None, :], w[None, :, :])
    qp = q[None, :, :] - p[:, None, :]
    with np.errstate(divide='ignore', invalid='ignore'):
        lam = _cross(qp, w[None, :, :]) / denom
        mu = _cross(qp, r[:, None, :]) / denom
    hit = (denom != 0) & (lam >= 0) & (lam < 1) & (mu >= 0) & (mu < 1)
    return [(int(i), float(lam[i, j]), int(j), float(mu[i, j])) for i, j in zip(*np.nonzero(hit))]


def curve_intersections(curve: BSplineCurve2, boundary: BoundaryCurve,
                        samples: int = SAMPLES) -> List[Tuple[float, float]]:
    """(curve parameter, boundary parameter) of each crossing, curve parameter refined by bisection"""
    if boundary.is_point:
        return []
    a, b = curve.domain
    xs = np.linspace(a, b, samples)
    # a lifted end may sit on the neighbouring turn of the boundary
    first, last = LIFTED_TURNS if boundary.lifted else (0, 1)
    ss = np.linspace(first, last, (last - first) * (samples - 1) + 1)
    A, B = curve.evaluate(xs), boundary.evaluate(ss)

    hits = []
    for i, lam, j, mu in polyline_crossings(A, B):
        q, w = B[j], B[j + 1] - B[j]

        def side(x):
            return float(_cross(w, curve.evaluate(x) - q))

        lo, hi = xs[i], xs[i + 1]
        f_lo, f_hi = side(lo), side(hi)
        if f_lo == 0.0:
            x_hit = lo
        elif f_hi == 0.0:
            x_hit = hi
        elif f_lo * f_hi < 0:
            x_hit = optimize.bisect(side, lo, hi, xtol=BISECT_TOL)
        else:
            x_hit = lo + lam * (hi - lo)

        along = float(np.dot(curve.evaluate(x_hit) - q, w) / np.dot(w, w))
        s_hit = ss[j] + min(max(along, 0.0), 1.0) * (ss[j + 1] - ss[j])
        hits.append((float(x_hit), float(s_hit)))
    return sorted(hits)


def interior_intersections(curve: BSplineCurve2, problem: ProblemSpec,
                           samples: int = SAMPLES) -> List[Tuple[float, int, float]]:
    """Contacts other than the two end contacts: (curve parameter, 1 or 2, boundary parameter)"""
    a, b = curve.domain
    window = 1.5 * (b - a) / (samples - 1)
    events = [(x, 1, s) for x, s in curve_intersections(curve, problem.c1, samples) if x > a + window]
    events += [(x, 2, s) for x, s in curve_intersections(curve, problem.c2, samples) if x < b - window]
    return sorted(events)


def fit_interior(knots: KnotVector, targets: np.ndarray, tau: np.ndarray,
                 start: Sequence[float], end: Sequence[float]) -> np.ndarray:
    """Least-squares interior controls with the end controls pinned"""
    B = basis_matrix(knots, knots.start + tau * (knots.end - knots.start))
    rhs = targets - np.outer(B[:, 0], start) - np.outer(B[:, -1], end)
    return linalg.lstsq(B[:, 1:-1], rhs)[0]


def refit(problem: ProblemSpec, curve: BSplineCurve2, s: float, t: float,
          x_range: Optional[Tuple[float, float]] = None) -> DofVector:
    """Fit a fresh curve of the problem's order to curve restricted to x_range (reversed if x0 > x1)"""
    x0, x1 = x_range or curve.domain
    tau = np.linspace(0.0, 1.0, max(8 * problem.order, 128))
    targets = curve.evaluate(x0 + tau * (x1 - x0))
    interior = fit_interior(problem.knots, targets, tau, problem.c1.evaluate(s), problem.c2.evaluate(t))
    return DofVector.from_parts(problem.mode, s, t, interior)


def _arc_length(problem: ProblemSpec, curve: BSplineCurve2, x0: float, x1: float) -> float:
    uv = curve.evaluate(np.linspace(x0, x1, 128))
    pts = problem.surface.point(uv[:, 0], uv[:, 1])
    return float(np.sum(np.linalg.norm(np.diff(pts, axis=0), axis=1)))


def trimmed_start(problem: ProblemSpec, report: SolveReport,
                  events: List[Tuple[float, int, float]]) -> Tuple[DofVector, Tuple[float, float]]:
    """Initial dof for the re-solve (the kept sub-arc refitted at the same order) and the kept x range"""
    a, b = report.curve.domain
    chain = [(a, 1, report.dof.s)] + events + [(b, 2, report.dof.t)]
    pairs = [(e, f) for e, f in zip(chain, chain[1:]) if e[1] != f[1]]
    first, second = min(pairs, key=lambda pair: _arc_length(problem, report.curve, pair[0][0], pair[1][0]))

    on_c1, on_c2 = (first, second) if first[1] == 1 else (second, first)
    logger.debug("keeping sub-arc x in [%.6f, %.6f] between c1 and c2", on_c1[0], on_c2[0])
    kept = (on_c1[0], on_c2[0])
    return refit(problem, report.curve, on_c1[2], on_c2[2], kept), kept


def trim_and_resolve(problem: ProblemSpec, report: SolveReport, cfg: Optional[SolverConfig] = None) -> SolveReport:
    """Trim and re-solve until the curve meets the boundaries only at its ends"""
    cfg = cfg or SolverConfig()
    rounds = 0
    current = report
    kept: List[Tuple[float, float]] = []
    while True:
        events = interior_intersections(current.curve, problem)
        if not events:
            return replace(current, trim_rounds=rounds, trimmed_ranges=tuple(kept))
        if rounds >= cfg.trim_max_rounds:
            logger.warning("candidate %d: %d interior intersections left after %d trimming rounds",
                           problem.candidate_index, len(events), rounds)
            return replace(current, trim_rounds=rounds, trimmed_ranges=tuple(kept), converged=False,
                           trim_failed=True, failure=f"trimming did not finish within {cfg.trim_max_rounds} rounds")
        rounds += 1
        logger.debug("candidate %d: trimming round %d, %d interior intersections",
                     problem.candidate_index, rounds, len(events))
        start, x_range = trimmed_start(problem, current, events)
        kept.append(x_range)
        current = solve_newton(problem, start, cfg)
