from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple

import numpy as np

from core.errors import ContractError, DomainError
from core.nurbs import circle_section
from core.spline import BSplineCurve2

PARAM_TOL = 1e-12


@dataclass(frozen=True)
class BoundaryCurve:
    """Constant point or B-spline curve in the parameter domain, parameterised by s in [0, 1]"""
    point: Optional[Tuple[float, float]] = None
    curve: Optional[BSplineCurve2] = None
    closed: bool = False

    def __post_init__(self):
        if (self.point is None) == (self.curve is None):
            raise ContractError("a boundary is either a point or a curve")
        if self.point is not None:
            if self.closed:
                raise ContractError("a point boundary cannot be closed")
            object.__setattr__(self, 'point', (float(self.point[0]), float(self.point[1])))
        object.__setattr__(self, 'closed', bool(self.closed))

    @classmethod
    def at(cls, u: float, v: float) -> 'BoundaryCurve':
        return cls(point=(u, v))

    @classmethod
    def from_bspline(cls, curve: BSplineCurve2, closed: bool = False) -> 'BoundaryCurve':
        return cls(curve=curve, closed=closed)

    @classmethod
    def circle(cls, center: Sequence[float], radius: float) -> 'BoundaryCurve':
        """Exact circle as a closed rational quadratic loop starting at angle 0"""
        if radius <= 0:
            raise ContractError(f"circle radius must be positive, got {radius}")
        points, weights, knots = circle_section(radius, (center[0], center[1]))
        return cls(curve=BSplineCurve2(tuple(points), knots, tuple(weights)), closed=True)

    @classmethod
    def segment(cls, start: Sequence[float], end: Sequence[float], closed: bool = False) -> 'BoundaryCurve':
        """Straight quadratic segment traversed at constant parameter speed"""
        a, b = np.asarray(start, dtype=float), np.asarray(end, dtype=float)
        return cls(curve=BSplineCurve2.from_points([a, 0.5 * (a + b), b], degree=2), closed=closed)

    @classmethod
    def parallel(cls, level: float, period: float, direction: str = 'u', start: float = 0.0) -> 'BoundaryCurve':
        """Closed iso-line running once around a periodic direction"""
        if direction == 'u':
            return cls.segment((start, level), (start + period, level), closed=True)
        if direction == 'v':
            return cls.segment((level, start), (level, start + period), closed=True)
        raise ContractError(f"direction must be 'u' or 'v', got {direction!r}")

    @property
    def is_point(self) -> bool:
        return self.point is not None

    @cached_property
    def seam_offset(self) -> np.ndarray:
        """c(1) - c(0): zero for a loop closed in the plane, one period for a parallel"""
        if self.is_point or not self.closed:
            return np.zeros(2)
        a, b = self.curve.domain
        return self.curve.evaluate(b) - self.curve.evaluate(a)

    @property
    def lifted(self) -> bool:
        """True when whole turns of s move c(s) in the parameter plane"""
        return bool(np.any(np.abs(self.seam_offset) > PARAM_TOL))

    def wrap(self, s):
        """Closed curves take s modulo 1; open curves must stay in [0, 1]"""
        s = np.asarray(s, dtype=float)
        if self.closed:
            return np.mod(s, 1.0)
        bad = (s < -PARAM_TOL) | (s > 1.0 + PARAM_TOL)
        if np.any(bad):
            raise DomainError(f"boundary parameter {s} outside [0, 1] on an open curve")
        return np.clip(s, 0.0, 1.0)

    def evaluate(self, s, deriv_order: int = 0) -> np.ndarray:
        """Position c(s) or its s-derivatives; shape (2,) or (M, 2)"""
        if self.is_point:
            value = np.array(self.point) if deriv_order == 0 else np.zeros(2)
            return value if np.ndim(s) == 0 else np.tile(value, (np.size(s), 1))
        a, b = self.curve.domain
        if not self.closed:
            x = a + self.wrap(s) * (b - a)
            return self.curve.evaluate(x, deriv_order) * (b - a) ** deriv_order

        # closed curves continue past [0, 1] by whole turns: c(s + k) = c(s) + k (c(1) - c(0))
        s = np.asarray(s, dtype=float)
        turns = np.floor(s)
        value = self.curve.evaluate(a + (s - turns) * (b - a), deriv_order) * (b - a) ** deriv_order
        if deriv_order == 0:
            value = value + np.multiply.outer(turns, self.seam_offset)
        return value

    def sample(self, count: int) -> np.ndarray:
        """Points at evenly spaced s, both ends included"""
        return self.evaluate(np.linspace(0.0, 1.0, count))

    def translated(self, du: float, dv: float) -> 'BoundaryCurve':
        if self.is_point:
            return BoundaryCurve(point=(self.point[0] + du, self.point[1] + dv))
        return BoundaryCurve(curve=self.curve.translated(du, dv), closed=self.closed)

    def centroid(self) -> np.ndarray:
        return self.sample(65).mean(axis=0)

    def to_dict(self):
        """Convert to dictionary for JSON serialization"""
        if self.is_point:
            return {"point": list(self.point)}
        return {"bspline": self.curve.to_dict(), "closed": self.closed}

    @staticmethod
    def from_dict(data: dict):
        """Create BoundaryCurve from a scene entry (point, bspline, circle or segment)"""
        if "point" in data:
            return BoundaryCurve.at(*data["point"])
        if "bspline" in data:
            return BoundaryCurve.from_bspline(BSplineCurve2.from_dict(data["bspline"]), data.get("closed", False))
        if "circle" in data:
            return BoundaryCurve.circle(data["circle"]["center"], data["circle"]["radius"])
        if "segment" in data:
            return BoundaryCurve.segment(data["segment"]["start"], data["segment"]["end"], data.get("closed", False))
        raise ContractError(f"unrecognised boundary entry with keys {sorted(data)}")

