"""
Discretised energy, length and gradient of a curve alpha(x) = sum N_i(x) P_i on a surface.

The first control point is c1(s), the last c2(t); the free unknowns are laid out as
[s?, t?, u_1 .. u_{n-1}, v_1 .. v_{n-1}] depending on which ends may slide.
"""
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from core.boundary import BoundaryCurve
from core.errors import ContractError, DomainError, SingularityError
from core.quadrature import QuadratureRule
from core.spline import BSplineCurve2, KnotVector, basis_matrix
from core.surface import Surface


class Mode(str, Enum):
    TWO_POINTS = "two_points"
    POINT_CURVE = "point_curve"
    TWO_CURVES = "two_curves"

    @property
    def free_s(self) -> bool:
        return self is Mode.TWO_CURVES

    @property
    def free_t(self) -> bool:
        return self is not Mode.TWO_POINTS

    @property
    def n_free_ends(self) -> int:
        return int(self.free_s) + int(self.free_t)

    @staticmethod
    def for_boundaries(c1: BoundaryCurve, c2: BoundaryCurve) -> 'Mode':
        """Mode implied by the boundary kinds (c1 is the point in point_curve)"""
        if c1.is_point and c2.is_point:
            return Mode.TWO_POINTS
        if c1.is_point:
            return Mode.POINT_CURVE
        if c2.is_point:
            raise ContractError("point_curve problems keep the point as c1")
        return Mode.TWO_CURVES


@dataclass(frozen=True, eq=False)
class DofVector:
    """Flattened unknowns [s?, t?, u_1..u_{n-1}, v_1..v_{n-1}]"""
    values: np.ndarray
    mode: Mode

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        object.__setattr__(self, 'values', values)
        rest = len(values) - self.mode.n_free_ends
        if rest < 2 or rest % 2:
            raise ContractError(f"{len(values)} values do not fit mode {self.mode.value}")

    @classmethod
    def from_parts(cls, mode: Mode, s: float, t: float, interior: np.ndarray) -> 'DofVector':
        interior = np.asarray(interior, dtype=float).reshape(-1, 2)
        head = ([s] if mode.free_s else []) + ([t] if mode.free_t else [])
        return cls(np.concatenate([head, interior[:, 0], interior[:, 1]]), mode)

    @property
    def n_interior(self) -> int:
        return (len(self.values) - self.mode.n_free_ends) // 2

    @property
    def s(self) -> float:
        return float(self.values[0]) if self.mode.free_s else 0.0

    @property
    def t(self) -> float:
        return float(self.values[int(self.mode.free_s)]) if self.mode.free_t else 0.0

    @property
    def interior(self) -> np.ndarray:
        k, m = self.mode.n_free_ends, self.n_interior
        return np.column_stack([self.values[k:k + m], self.values[k + m:]])

    def with_values(self, values: np.ndarray) -> 'DofVector':
        return DofVector(values, self.mode)

    def to_list(self):
        return [float(x) for x in self.values]


def assemble_curve(dof: DofVector, c1: BoundaryCurve, c2: BoundaryCurve, knots: KnotVector) -> BSplineCurve2:
    """B-spline whose first control is c1(s), last is c2(t), interior controls from dof"""
    if dof.n_interior != knots.n_basis - 2:
        raise ContractError(f"dof carries {dof.n_interior} interior controls, knots need {knots.n_basis - 2}")
    P = np.vstack([c1.evaluate(dof.s), dof.interior, c2.evaluate(dof.t)])
    return BSplineCurve2(tuple(map(tuple, P)), knots)


def _check_rule(curve_domain, quad: QuadratureRule):
    a, b = curve_domain
    if abs(a - quad.start) > 1e-12 or abs(b - quad.end) > 1e-12:
        raise ContractError(f"quadrature interval [{quad.start}, {quad.end}] differs from curve domain [{a}, {b}]")


def _velocity(surface: Surface, curve: BSplineCurve2, quad: QuadratureRule) -> np.ndarray:
    _check_rule(curve.domain, quad)
    x = quad.node_array
    a0, a1 = curve.evaluate(x), curve.evaluate(x, 1)
    return surface.jet(a0[:, 0], a0[:, 1]).velocity(a1[:, 0], a1[:, 1])


def energy(surface: Surface, curve: BSplineCurve2, quad: QuadratureRule) -> float:
    """1/2 * integral of |d/dx x(alpha(x))|^2"""
    V = _velocity(surface, curve, quad)
    return 0.5 * quad.integrate(np.sum(V * V, axis=1))


def length(surface: Surface, curve: BSplineCurve2, quad: QuadratureRule) -> float:
    """Integral of |d/dx x(alpha(x))|"""
    V = _velocity(surface, curve, quad)
    return quad.integrate(np.linalg.norm(V, axis=1))


class EnergyModel:
    """Energy and its exact gradient for one (surface, c1, c2, knots) setup, basis tables cached"""

    def __init__(self, surface: Surface, c1: BoundaryCurve, c2: BoundaryCurve, knots: KnotVector,
                 mode: Mode, quad: Optional[QuadratureRule] = None):
        self.surface = surface
        self.c1 = c1
        self.c2 = c2
        self.knots = knots
        self.mode = mode
        self.quad = quad or QuadratureRule.gauss_legendre(knots)
        _check_rule((knots.start, knots.end), self.quad)
        self.n_interior = knots.n_basis - 2

    @cached_property
    def _bases(self):
        x = self.quad.node_array
        return basis_matrix(self.knots, x, 0), basis_matrix(self.knots, x, 1)

    @property
    def size(self) -> int:
        return self.mode.n_free_ends + 2 * self.n_interior

    def dof(self, values) -> DofVector:
        return DofVector(values, self.mode)

    def controls(self, values: np.ndarray) -> np.ndarray:
        dof = self.dof(values)
        if dof.n_interior != self.n_interior:
            raise ContractError(f"dof carries {dof.n_interior} interior controls, knots need {self.n_interior}")
        return np.vstack([self.c1.evaluate(dof.s), dof.interior, self.c2.evaluate(dof.t)])

    def curve(self, values: np.ndarray) -> BSplineCurve2:
        return assemble_curve(self.dof(values), self.c1, self.c2, self.knots)

    def _terms(self, values: np.ndarray):
        B0, B1 = self._bases
        P = self.controls(values)
        a0, a1 = B0 @ P, B1 @ P
        jet = self.surface.jet(a0[:, 0], a0[:, 1])
        return P, a1, jet, jet.velocity(a1[:, 0], a1[:, 1])

    def energy(self, values: np.ndarray) -> float:
        V = self._terms(values)[3]
        return 0.5 * self.quad.integrate(np.sum(V * V, axis=1))

    def length(self, values: np.ndarray) -> float:
        V = self._terms(values)[3]
        return self.quad.integrate(np.linalg.norm(V, axis=1))

    def gradient(self, values: np.ndarray) -> np.ndarray:
        """Exact gradient of the quadrature sum with respect to the free unknowns"""
        B0, B1 = self._bases
        _, a1, jet, V = self._terms(values)
        w = self.quad.width * self.quad.weight_array[:, None]
        du, dv = a1[:, 0:1], a1[:, 1:2]

        # dV/dP_i = (x_uu u' + x_uv v') N_i + x_u N_i'   (u component; v alike)
        g0 = np.column_stack([np.sum(V * (jet.duu * du + jet.duv * dv), axis=1),
                              np.sum(V * (jet.duv * du + jet.dvv * dv), axis=1)])
        g1 = np.column_stack([np.sum(V * jet.du, axis=1), np.sum(V * jet.dv, axis=1)])
        dP = B0.T @ (w * g0) + B1.T @ (w * g1)

        dof = self.dof(values)
        head = []
        if self.mode.free_s:
            head.append(dP[0] @ self.c1.evaluate(dof.s, 1))
        if self.mode.free_t:
            head.append(dP[-1] @ self.c2.evaluate(dof.t, 1))
        return np.concatenate([head, dP[1:-1, 0], dP[1:-1, 1]])

    def end_slots(self):
        """(index in the dof vector, boundary) for every sliding endpoint"""
        slots = []
        if self.mode.free_s:
            slots.append((0, self.c1))
        if self.mode.free_t:
            slots.append((int(self.mode.free_s), self.c2))
        return slots

    def normalize(self, values: np.ndarray) -> np.ndarray:
        """Open-curve parameters clamped to [0, 1]; closed-curve parameters are left lifted"""
        values = np.array(values, dtype=float)
        for i, boundary in self.end_slots():
            if not boundary.closed:
                values[i] = min(max(values[i], 0.0), 1.0)
        return values

    def blocked(self, values: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """Mask of open-curve parameters pinned at a bound with the descent direction pointing out"""
        mask = np.zeros(len(values), dtype=bool)
        for i, boundary in self.end_slots():
            if not boundary.closed:
                mask[i] = (values[i] <= 0.0 and grad[i] > 0) or (values[i] >= 1.0 and grad[i] < 0)
        return mask


def energy_gradient(surface: Surface, dof: DofVector, c1: BoundaryCurve, c2: BoundaryCurve,
                    knots: KnotVector, quad: Optional[QuadratureRule] = None) -> np.ndarray:
    """Gradient of the discretised energy in dof layout"""
    return EnergyModel(surface, c1, c2, knots, dof.mode, quad).gradient(dof.values)


def _sample_parameters(curve, samples) -> np.ndarray:
    """Span midpoints of a spline unless samples are given; other points are moved off interior knots"""
    a, b = curve.domain
    knots = getattr(curve, 'knots', None)
    if samples is None and knots is not None:
        edges = knots.breakpoints
        return 0.5 * (edges[:-1] + edges[1:])
    if samples is None or np.ndim(samples) == 0:
        count = 64 if samples is None else int(samples)
        x = np.linspace(a, b, count + 2)[1:-1]
    else:
        x = np.asarray(samples, dtype=float)
    if knots is not None:
        # the second derivative jumps at interior knots
        near = np.isclose(x[:, None], knots.breakpoints[None, 1:-1], rtol=0.0, atol=1e-9).any(axis=1)
        x = np.where(near, x + 1e-7 * (b - a), x)
    return x


def geodesic_residual(surface: Surface, curve, samples=None) -> float:
    """Max over samples of |alpha'' + Gamma(alpha', alpha')|; curve needs evaluate(x, order) and domain"""
    x = _sample_parameters(curve, samples)
    p, d1, d2 = (np.atleast_2d(curve.evaluate(x, k)) for k in range(3))
    jet = surface.jet(p[:, 0], p[:, 1])

    degenerate = jet.area_element() < 1e-12
    if degenerate.any():
        idx = int(np.flatnonzero(degenerate)[0])
        raise SingularityError(f"degenerate metric at sample x={x[idx]!r}", sample=float(x[idx]))

    E, F, G = jet.metric()
    a, b = d1[:, 0], d1[:, 1]
    acc = jet.duu * (a * a)[:, None] + 2.0 * jet.duv * (a * b)[:, None] + jet.dvv * (b * b)[:, None]
    qu, qv = np.sum(acc * jet.du, axis=1), np.sum(acc * jet.dv, axis=1)
    det = E * G - F * F
    christoffel = np.column_stack([(G * qu - F * qv) / det, (E * qv - F * qu) / det])
    return float(np.max(np.linalg.norm(d2 + christoffel, axis=1)))


def error_percent(computed_length: float, reference_length: float) -> float:
    """(computed - reference) / reference * 100"""
    if not reference_length > 0:
        raise DomainError(f"reference length must be positive, got {reference_length}")
    return (computed_length - reference_length) / reference_length * 100.0


def greville_interior(knots: KnotVector, start: Sequence[float], end: Sequence[float]) -> np.ndarray:
    """Interior controls that make the curve the straight segment start->end at constant speed"""
    g = knots.greville()
    g = (g - knots.start) / (knots.end - knots.start)
    a, b = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
    return a + np.outer(g[1:-1], b - a)
