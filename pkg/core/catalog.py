"""Analytic test surfaces with closed-form jets and, where one exists, geodesic distance."""
import math
from dataclasses import dataclass
from typing import ClassVar, Optional, Sequence, Tuple

import numpy as np

from core.errors import ContractError, InputError
from core.spline import BSplineCurve2
from core.surface import Surface, SurfaceJet

TWO_PI = 2.0 * math.pi


class AnalyticSurface(Surface):
    """Catalog surface; subclasses fix the kind and its periodicity"""

    kind: ClassVar[str] = ""

    def geodesic_distance(self, p: Sequence[float], q: Sequence[float]) -> Optional[float]:
        """Closed-form distance, or None when the kind has no oracle"""
        return None

    def parameters(self) -> dict:
        return {}

    def to_dict(self):
        """Convert to dictionary for JSON serialization"""
        return {"analytic": {"kind": self.kind, **self.parameters()}}


def _stack(*columns) -> np.ndarray:
    return np.stack(np.broadcast_arrays(*columns), axis=-1).astype(float)


@dataclass(frozen=True)
class Plane(AnalyticSurface):
    """x(u, v) = origin + u * axis_u + v * axis_v"""
    origin: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    axis_u: Tuple[float, float, float] = (1.0, 0.0, 0.0)
    axis_v: Tuple[float, float, float] = (0.0, 1.0, 0.0)

    kind: ClassVar[str] = "plane"

    def __post_init__(self):
        for name in ("origin", "axis_u", "axis_v"):
            object.__setattr__(self, name, tuple(float(c) for c in getattr(self, name)))
        if np.linalg.norm(np.cross(self.axis_u, self.axis_v)) == 0.0:
            raise ContractError("plane axes must be linearly independent")

    def domain(self):
        return -math.inf, math.inf, -math.inf, math.inf

    def _jet(self, u, v):
        o, a, b = (np.array(c) for c in (self.origin, self.axis_u, self.axis_v))
        zero = np.zeros((len(u), 3))
        return SurfaceJet(o + u[:, None] * a + v[:, None] * b,
                          np.tile(a, (len(u), 1)), np.tile(b, (len(u), 1)), zero, zero.copy(), zero.copy())

    def geodesic_distance(self, p, q):
        return float(np.linalg.norm(self.point(*q) - self.point(*p)))

    def parameters(self):
        return {"origin": list(self.origin), "axis_u": list(self.axis_u), "axis_v": list(self.axis_v)}


@dataclass(frozen=True)
class Sphere(AnalyticSurface):
    """u = longitude in [0, 2pi) (periodic), v = latitude in [-pi/2, pi/2]"""
    radius: float = 1.0

    kind: ClassVar[str] = "sphere"
    periodic_u: ClassVar[bool] = True

    def __post_init__(self):
        if not self.radius > 0:
            raise ContractError(f"sphere radius must be positive, got {self.radius}")

    def domain(self):
        return 0.0, TWO_PI, -0.5 * math.pi, 0.5 * math.pi

    def _jet(self, u, v):
        R = self.radius
        cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
        zero = np.zeros_like(u)
        return SurfaceJet(
            R * _stack(cv * cu, cv * su, sv),
            R * _stack(-cv * su, cv * cu, zero),
            R * _stack(-sv * cu, -sv * su, cv),
            R * _stack(-cv * cu, -cv * su, zero),
            R * _stack(sv * su, -sv * cu, zero),
            R * _stack(-cv * cu, -cv * su, -sv),
        )

    def geodesic_distance(self, p, q):
        n1 = self.point(*p) / self.radius
        n2 = self.point(*q) / self.radius
        return float(self.radius * math.atan2(np.linalg.norm(np.cross(n1, n2)), float(np.dot(n1, n2))))

    def parameters(self):
        return {"radius": self.radius}


@dataclass(frozen=True)
class Cylinder(AnalyticSurface):
    """u = angle (periodic, period 2pi), v = height in [0, height]"""
    radius: float = 1.0
    height: float = 1.0

    kind: ClassVar[str] = "cylinder"
    periodic_u: ClassVar[bool] = True

    def __post_init__(self):
        if not (self.radius > 0 and self.height > 0):
            raise ContractError(f"cylinder needs positive radius and height, got {self.radius}, {self.height}")

    def domain(self):
        return 0.0, TWO_PI, 0.0, self.height

    def _jet(self, u, v):
        r = self.radius
        cu, su = np.cos(u), np.sin(u)
        zero, one = np.zeros_like(u), np.ones_like(u)
        return SurfaceJet(
            _stack(r * cu, r * su, v),
            _stack(-r * su, r * cu, zero),
            _stack(zero, zero, one),
            _stack(-r * cu, -r * su, zero),
            _stack(zero, zero, zero),
            _stack(zero, zero, zero),
        )

    def geodesic_distance(self, p, q):
        # unrolled cylinder: take the shorter way around
        dtheta = math.remainder(q[0] - p[0], TWO_PI)
        return math.hypot(self.radius * dtheta, q[1] - p[1])

    def parameters(self):
        return {"radius": self.radius, "height": self.height}


@dataclass(frozen=True)
class Torus(AnalyticSurface):
    """u around the axis, v around the tube, both periodic with period 2pi"""
    major: float = 2.0
    minor: float = 0.5

    kind: ClassVar[str] = "torus"
    periodic_u: ClassVar[bool] = True
    periodic_v: ClassVar[bool] = True

    def __post_init__(self):
        if not self.major > self.minor > 0:
            raise ContractError(f"torus requires major > minor > 0, got {self.major}, {self.minor}")

    def domain(self):
        return 0.0, TWO_PI, 0.0, TWO_PI

    def _jet(self, u, v):
        R, r = self.major, self.minor
        cu, su, cv, sv = np.cos(u), np.sin(u), np.cos(v), np.sin(v)
        rho = R + r * cv
        zero = np.zeros_like(u)
        return SurfaceJet(
            _stack(rho * cu, rho * su, r * sv),
            _stack(-rho * su, rho * cu, zero),
            _stack(-r * sv * cu, -r * sv * su, r * cv),
            _stack(-rho * cu, -rho * su, zero),
            _stack(r * sv * su, -r * sv * cu, zero),
            _stack(-r * cv * cu, -r * cv * su, -r * sv),
        )

    def parameters(self):
        return {"major": self.major, "minor": self.minor}


@dataclass(frozen=True)
class Revolution(AnalyticSurface):
    """Planar profile (rho(v), z(v)) swept around the z axis; u periodic with period 2pi"""
    profile: BSplineCurve2

    kind: ClassVar[str] = "revolution"
    periodic_u: ClassVar[bool] = True

    def __post_init__(self):
        rho = self.profile.sample(64)[:, 0]
        if np.any(rho <= 0):
            raise ContractError("revolution profile must keep a positive radius")

    def domain(self):
        a, b = self.profile.domain
        return 0.0, TWO_PI, a, b

    def _jet(self, u, v):
        p0, p1, p2 = (self.profile.evaluate(v, k) for k in range(3))
        cu, su = np.cos(u), np.sin(u)
        zero = np.zeros_like(u)
        return SurfaceJet(
            _stack(p0[:, 0] * cu, p0[:, 0] * su, p0[:, 1]),
            _stack(-p0[:, 0] * su, p0[:, 0] * cu, zero),
            _stack(p1[:, 0] * cu, p1[:, 0] * su, p1[:, 1]),
            _stack(-p0[:, 0] * cu, -p0[:, 0] * su, zero),
            _stack(-p1[:, 0] * su, p1[:, 0] * cu, zero),
            _stack(p2[:, 0] * cu, p2[:, 0] * su, p2[:, 1]),
        )

    def parameters(self):
        return {"profile": self.profile.to_dict()}


CATALOG = {cls.kind: cls for cls in (Plane, Sphere, Cylinder, Torus, Revolution)}


def make_surface(kind: str, **params) -> AnalyticSurface:
    """Build a catalog entry by kind name and numeric parameters"""
    if kind not in CATALOG:
        raise InputError(f"unknown analytic surface kind {kind!r}; expected one of {sorted(CATALOG)}")
    if kind == "revolution":
        params = {"profile": BSplineCurve2.from_dict(params["profile"])}
    elif kind == "plane":
        params = {k: tuple(v) for k, v in params.items()}
    try:
        return CATALOG[kind](**params)
    except TypeError as exc:
        raise InputError(f"bad parameters for {kind}: {exc}") from exc


def analytic_jet(s: AnalyticSurface, u, v) -> SurfaceJet:
    """Closed-form position and partials"""
    return s.jet(u, v)


def analytic_distance(s: AnalyticSurface, p: Sequence[float], q: Sequence[float]) -> Optional[float]:
    """Closed-form geodesic distance; None means the kind has no oracle"""
    return s.geodesic_distance(p, q)
