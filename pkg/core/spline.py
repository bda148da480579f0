from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from core.errors import ContractError, DomainError

# Slack allowed when a parameter sits a rounding error outside the knot range
KNOT_TOL = 1e-12


@dataclass(frozen=True)
class KnotVector:
    """Clamped knot vector of a B-spline basis"""
    values: Tuple[float, ...]
    degree: int

    def __post_init__(self):
        object.__setattr__(self, 'values', tuple(float(k) for k in self.values))
        object.__setattr__(self, 'degree', int(self.degree))
        t, p = self.values, self.degree

        if p < 1:
            raise ContractError(f"degree must be positive, got {p}")
        if len(t) < 2 * (p + 1):
            raise ContractError(f"degree {p} needs at least {2 * (p + 1)} knots, got {len(t)}")
        if any(b < a for a, b in zip(t, t[1:])):
            raise ContractError("knot values must be nondecreasing")
        if len(set(t[:p + 1])) != 1 or len(set(t[-(p + 1):])) != 1:
            raise ContractError(f"knot vector must be clamped: end knots repeated {p + 1} times")
        if t[0] == t[-1]:
            raise ContractError("knot range is empty")

    @classmethod
    def uniform(cls, n_control: int, degree: int = 2, start: float = 0.0, end: float = 1.0) -> 'KnotVector':
        """Uniform clamped knots for n_control basis functions"""
        if n_control < degree + 1:
            raise ContractError(f"{n_control} control points cannot carry degree {degree}")
        inner = np.linspace(start, end, n_control - degree + 1)
        return cls(tuple([start] * degree + list(inner) + [end] * degree), degree)

    @cached_property
    def array(self) -> np.ndarray:
        values = np.array(self.values, dtype=float)
        values.flags.writeable = False
        return values

    @property
    def n_basis(self) -> int:
        return len(self.values) - self.degree - 1

    @property
    def start(self) -> float:
        return self.values[0]

    @property
    def end(self) -> float:
        return self.values[-1]

    @cached_property
    def breakpoints(self) -> np.ndarray:
        """Distinct knot values, i.e. the span boundaries"""
        return np.unique(self.array)

    def greville(self) -> np.ndarray:
        """Greville abscissae; controls placed here reproduce linear functions"""
        t, p = self.array, self.degree
        return np.array([t[i + 1:i + p + 1].mean() for i in range(self.n_basis)])

    def to_dict(self):
        """Convert to dictionary for JSON serialization"""
        return {"degree": self.degree, "values": list(self.values)}

    @staticmethod
    def from_dict(data: dict):
        """Create KnotVector from dictionary"""
        return KnotVector(tuple(data["values"]), data["degree"])


def _safe_div(num: np.ndarray, den: np.ndarray) -> np.ndarray:
    """Elementwise num / den with the B-spline convention 0/0 = 0"""
    out = np.zeros(np.broadcast(num, den).shape)
    return np.divide(num, den, out=out, where=(den != 0))


def _raise_degree(t: np.ndarray, x: np.ndarray, N: np.ndarray, k: int) -> np.ndarray:
    """One Cox-de Boor step: degree k-1 values -> degree k values"""
    i = np.arange(N.shape[1] - 1)
    left = _safe_div(x[:, None] - t[i], t[i + k] - t[i])
    right = _safe_div(t[i + k + 1] - x[:, None], t[i + k + 1] - t[i + 1])
    return left * N[:, :-1] + right * N[:, 1:]


def _differentiate(t: np.ndarray, N: np.ndarray, k: int) -> np.ndarray:
    """Derivative formula: degree k-1 functions -> derivative of degree k functions"""
    i = np.arange(N.shape[1] - 1)
    return k * (_safe_div(N[:, :-1], t[i + k] - t[i]) - _safe_div(N[:, 1:], t[i + k + 1] - t[i + 1]))


def check_parameters(knots: KnotVector, x) -> np.ndarray:
    """Validate parameters against the knot range and clip rounding noise"""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    slack = KNOT_TOL * max(1.0, abs(knots.start), abs(knots.end))
    outside = ~((x >= knots.start - slack) & (x <= knots.end + slack))
    if outside.any():
        idx = int(np.flatnonzero(outside)[0])
        raise DomainError(f"parameter {x[idx]!r} outside knot range [{knots.start}, {knots.end}]", index=idx)
    return np.clip(x, knots.start, knots.end)


def basis_matrix(knots: KnotVector, x, deriv_order: int = 0) -> np.ndarray:
    """All basis functions (or their derivatives) at every parameter, shape (len(x), n_basis)"""
    if deriv_order < 0:
        raise ContractError(f"derivative order must be nonnegative, got {deriv_order}")
    t, p = knots.array, knots.degree
    x = check_parameters(knots, x)

    if deriv_order > p:
        return np.zeros((len(x), knots.n_basis))

    N = ((t[:-1] <= x[:, None]) & (x[:, None] < t[1:])).astype(float)
    # the right end of the range belongs to the last nonempty span
    last = int(np.searchsorted(t, t[-1], side='left')) - 1
    at_end = x >= t[-1]
    N[at_end] = 0.0
    N[at_end, last] = 1.0

    for k in range(1, p - deriv_order + 1):
        N = _raise_degree(t, x, N, k)
    for k in range(p - deriv_order + 1, p + 1):
        N = _differentiate(t, N, k)
    return N


def basis_eval(knots: KnotVector, i: int, x, deriv_order: int = 0):
    """N_i(x), N_i'(x) or N_i''(x)"""
    if not 0 <= i < knots.n_basis:
        raise ContractError(f"basis index {i} outside 0..{knots.n_basis - 1}")
    values = basis_matrix(knots, x, deriv_order)[:, i]
    return float(values[0]) if np.ndim(x) == 0 else values


@dataclass(frozen=True)
class BSplineCurve2:
    """Planar B-spline curve in parameter units; rational when weights are given"""
    control: Tuple[Tuple[float, float], ...]
    knots: KnotVector
    weights: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        control = tuple((float(p[0]), float(p[1])) for p in self.control)
        object.__setattr__(self, 'control', control)
        if any(len(p) != 2 for p in self.control):
            raise ContractError("control points must be (u, v) pairs")
        if len(control) != self.knots.n_basis:
            raise ContractError(f"{len(control)} control points but the knot vector carries {self.knots.n_basis}")
        if self.weights is not None:
            weights = tuple(float(w) for w in self.weights)
            if len(weights) != len(control):
                raise ContractError("one weight per control point is required")
            if min(weights) <= 0:
                raise ContractError("weights must be strictly positive")
            object.__setattr__(self, 'weights', weights)

    @classmethod
    def from_points(cls, points: Sequence[Sequence[float]], degree: int = 2,
                    weights: Optional[Sequence[float]] = None) -> 'BSplineCurve2':
        """Curve over [0, 1] with uniform clamped knots"""
        return cls(tuple(map(tuple, points)), KnotVector.uniform(len(points), degree),
                   None if weights is None else tuple(weights))

    @cached_property
    def control_array(self) -> np.ndarray:
        return np.array(self.control, dtype=float)

    @property
    def degree(self) -> int:
        return self.knots.degree

    @property
    def domain(self) -> Tuple[float, float]:
        return self.knots.start, self.knots.end

    def evaluate(self, x, deriv_order: int = 0) -> np.ndarray:
        """Position or derivative; shape (2,) for a scalar parameter, (M, 2) otherwise"""
        P = self.control_array
        if self.weights is None:
            out = basis_matrix(self.knots, x, deriv_order) @ P
        else:
            if deriv_order > 2:
                raise ContractError("rational curves support derivatives up to order 2")
            w = np.array(self.weights)
            A = [basis_matrix(self.knots, x, k) @ (P * w[:, None]) for k in range(deriv_order + 1)]
            W = [(basis_matrix(self.knots, x, k) @ w)[:, None] for k in range(deriv_order + 1)]
            C = A[0] / W[0]
            if deriv_order >= 1:
                C1 = (A[1] - W[1] * C) / W[0]
                if deriv_order == 2:
                    C = (A[2] - 2.0 * W[1] * C1 - W[2] * C) / W[0]
                else:
                    C = C1
            out = C
        return out[0] if np.ndim(x) == 0 else out

    def sample(self, count: int) -> np.ndarray:
        """Evenly spaced parameter samples over the whole knot range"""
        return self.evaluate(np.linspace(self.knots.start, self.knots.end, count))

    def reversed(self) -> 'BSplineCurve2':
        """Same point set traversed backwards"""
        a, b = self.domain
        knots = KnotVector(tuple(a + b - k for k in reversed(self.knots.values)), self.degree)
        weights = None if self.weights is None else tuple(reversed(self.weights))
        return BSplineCurve2(tuple(reversed(self.control)), knots, weights)

    def translated(self, du: float, dv: float) -> 'BSplineCurve2':
        return BSplineCurve2(tuple((u + du, v + dv) for u, v in self.control), self.knots, self.weights)

    def to_dict(self):
        """Convert to dictionary for JSON serialization"""
        data = {"controls": [list(p) for p in self.control], "knots": self.knots.to_dict()}
        if self.weights is not None:
            data["weights"] = list(self.weights)
        return data

    @staticmethod
    def from_dict(data: dict):
        """Create BSplineCurve2 from dictionary"""
        weights = data.get("weights")
        return BSplineCurve2(tuple(tuple(p) for p in data["controls"]), KnotVector.from_dict(data["knots"]),
                             None if weights is None else tuple(weights))


def curve_eval(c: BSplineCurve2, x, deriv_order: int = 0) -> np.ndarray:
    """Position or derivative pair of a planar B-spline"""
    return c.evaluate(x, deriv_order)
