from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple

import numpy as np

from core.errors import ContractError
from core.spline import KnotVector, basis_matrix
from core.surface import Surface, SurfaceJet


@dataclass(frozen=True)
class NurbsSurface(Surface):
    """Tensor-product NURBS surface; control_net[i][j] pairs basis i in u with basis j in v"""
    control_net: Tuple[Tuple[Tuple[float, float, float], ...], ...]
    knots_u: KnotVector
    knots_v: KnotVector
    weights: Optional[Tuple[Tuple[float, ...], ...]] = None
    periodic_u: bool = False
    periodic_v: bool = False

    def __post_init__(self):
        net = np.asarray(self.control_net, dtype=float)
        if net.ndim != 3 or net.shape[2] != 3:
            raise ContractError(f"control net must be a grid of 3D points, got shape {net.shape}")
        if net.shape[:2] != (self.knots_u.n_basis, self.knots_v.n_basis):
            raise ContractError(f"control net {net.shape[:2]} does not match knot vectors "
                                f"({self.knots_u.n_basis}, {self.knots_v.n_basis})")
        weights = np.ones(net.shape[:2]) if self.weights is None else np.asarray(self.weights, dtype=float)
        if weights.shape != net.shape[:2]:
            raise ContractError(f"weight grid {weights.shape} does not match control net {net.shape[:2]}")
        if np.any(weights <= 0):
            raise ContractError("all weights must be strictly positive")

        object.__setattr__(self, 'control_net', tuple(tuple(tuple(p) for p in row) for row in net.tolist()))
        object.__setattr__(self, 'weights', tuple(tuple(row) for row in weights.tolist()))
        object.__setattr__(self, 'periodic_u', bool(self.periodic_u))
        object.__setattr__(self, 'periodic_v', bool(self.periodic_v))
        self._check_periodic_seams()

    def _check_periodic_seams(self):
        u0, u1, v0, v1 = self.domain()
        samples = np.linspace(0.0, 1.0, 7)
        if self.periodic_u:
            v = v0 + samples * (v1 - v0)
            gap = self._jet(np.full_like(v, u0), v).position - self._jet(np.full_like(v, u1), v).position
            if np.max(np.abs(gap)) > 1e-9:
                raise ContractError("periodic_u set but the surface does not close across the u seam")
        if self.periodic_v:
            u = u0 + samples * (u1 - u0)
            gap = self._jet(u, np.full_like(u, v0)).position - self._jet(u, np.full_like(u, v1)).position
            if np.max(np.abs(gap)) > 1e-9:
                raise ContractError("periodic_v set but the surface does not close across the v seam")

    @cached_property
    def net_array(self) -> np.ndarray:
        return np.array(self.control_net, dtype=float)

    @cached_property
    def weight_array(self) -> np.ndarray:
        return np.array(self.weights, dtype=float)

    @cached_property
    def is_polynomial(self) -> bool:
        return bool(np.all(self.weight_array == 1.0))

    def domain(self) -> Tuple[float, float, float, float]:
        return self.knots_u.start, self.knots_u.end, self.knots_v.start, self.knots_v.end

    def _jet(self, u: np.ndarray, v: np.ndarray) -> SurfaceJet:
        Nu = [basis_matrix(self.knots_u, u, k) for k in range(3)]
        Nv = [basis_matrix(self.knots_v, v, k) for k in range(3)]
        P = self.net_array

        if self.is_polynomial:
            def tp(a, b):
                return np.einsum('mi,ijc,mj->mc', Nu[a], P, Nv[b])
            return SurfaceJet(tp(0, 0), tp(1, 0), tp(0, 1), tp(2, 0), tp(1, 1), tp(0, 2))

        w = self.weight_array
        Pw = P * w[..., None]

        def A(a, b):
            return np.einsum('mi,ijc,mj->mc', Nu[a], Pw, Nv[b])

        def W(a, b):
            return np.einsum('mi,ij,mj->m', Nu[a], w, Nv[b])[:, None]

        # quotient rule on homogeneous coordinates
        w0 = W(0, 0)
        S = A(0, 0) / w0
        Su = (A(1, 0) - W(1, 0) * S) / w0
        Sv = (A(0, 1) - W(0, 1) * S) / w0
        Suu = (A(2, 0) - 2.0 * W(1, 0) * Su - W(2, 0) * S) / w0
        Suv = (A(1, 1) - W(1, 0) * Sv - W(0, 1) * Su - W(1, 1) * S) / w0
        Svv = (A(0, 2) - 2.0 * W(0, 1) * Sv - W(0, 2) * S) / w0
        return SurfaceJet(S, Su, Sv, Suu, Suv, Svv)

    def to_dict(self):
        """Convert to dictionary for JSON serialization"""
        return {
            "nurbs": {
                "control_net": [[list(p) for p in row] for row in self.control_net],
                "weights": [list(row) for row in self.weights],
                "knots_u": self.knots_u.to_dict(),
                "knots_v": self.knots_v.to_dict(),
                "periodic_u": self.periodic_u,
                "periodic_v": self.periodic_v,
            }
        }

    @staticmethod
    def from_dict(data: dict):
        """Create NurbsSurface from the inner dictionary of a scene surface entry"""
        weights = data.get("weights")
        return NurbsSurface(
            tuple(tuple(tuple(p) for p in row) for row in data["control_net"]),
            KnotVector.from_dict(data["knots_u"]),
            KnotVector.from_dict(data["knots_v"]),
            None if weights is None else tuple(tuple(row) for row in weights),
            data.get("periodic_u", False),
            data.get("periodic_v", False),
        )


def circle_section(radius: float = 1.0, center: Tuple[float, float] = (0.0, 0.0)):
    """Nine-point rational quadratic full circle: (points, weights, knots) over [0, 1]"""
    cx, cy = center
    r = radius
    points = [(cx + r, cy), (cx + r, cy + r), (cx, cy + r), (cx - r, cy + r), (cx - r, cy),
              (cx - r, cy - r), (cx, cy - r), (cx + r, cy - r), (cx + r, cy)]
    h = np.sqrt(0.5)
    weights = [1.0, h, 1.0, h, 1.0, h, 1.0, h, 1.0]
    knots = KnotVector((0, 0, 0, 0.25, 0.25, 0.5, 0.5, 0.75, 0.75, 1, 1, 1), 2)
    return points, weights, knots


def nurbs_cylinder(radius: float = 1.0, height: float = 1.0) -> NurbsSurface:
    """Exact cylinder: rational circle in u (periodic, period 1) extruded linearly in v"""
    points, weights, knots_u = circle_section(radius)
    net = [[(x, y, 0.0), (x, y, height)] for x, y in points]
    grid = [[w, w] for w in weights]
    return NurbsSurface(tuple(net), knots_u, KnotVector.uniform(2, 1), tuple(grid), periodic_u=True)
