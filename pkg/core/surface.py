from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from core.errors import DomainError

DOMAIN_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class SurfaceJet:
    """Position with first and second partials; arrays of shape (3,) or (M, 3)"""
    position: np.ndarray
    du: np.ndarray
    dv: np.ndarray
    duu: np.ndarray
    duv: np.ndarray
    dvv: np.ndarray

    def velocity(self, du_dt, dv_dt) -> np.ndarray:
        """Chain rule: d/dt x(u(t), v(t))"""
        return self.du * np.asarray(du_dt)[..., None] + self.dv * np.asarray(dv_dt)[..., None]

    def metric(self) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Coefficients E, F, G of the first fundamental form"""
        return (np.sum(self.du * self.du, axis=-1), np.sum(self.du * self.dv, axis=-1),
                np.sum(self.dv * self.dv, axis=-1))

    def area_element(self) -> np.ndarray:
        """|x_u x x_v|"""
        return np.linalg.norm(np.cross(self.du, self.dv), axis=-1)


class Surface(ABC):
    """Parametric surface x(u, v) with optional periodic directions"""

    periodic_u: bool = False
    periodic_v: bool = False

    @abstractmethod
    def domain(self) -> Tuple[float, float, float, float]:
        """Base domain (u_min, u_max, v_min, v_max); infinite bounds are allowed"""
        pass

    @abstractmethod
    def _jet(self, u: np.ndarray, v: np.ndarray) -> SurfaceJet:
        """Evaluate at parameters already inside the base domain"""
        pass

    @abstractmethod
    def to_dict(self) -> dict:
        pass

    def periods(self) -> Tuple[Optional[float], Optional[float]]:
        """Period lengths in parameter units, None for non-periodic directions"""
        u0, u1, v0, v1 = self.domain()
        return (u1 - u0 if self.periodic_u else None), (v1 - v0 if self.periodic_v else None)

    def wrap(self, u, v) -> Tuple[np.ndarray, np.ndarray]:
        """Translate periodic parameters into the base domain and validate the others"""
        u = np.atleast_1d(np.asarray(u, dtype=float))
        v = np.atleast_1d(np.asarray(v, dtype=float))
        u, v = np.broadcast_arrays(u, v)
        u0, u1, v0, v1 = self.domain()
        return self._wrap_axis(u, u0, u1, self.periodic_u, 'u'), self._wrap_axis(v, v0, v1, self.periodic_v, 'v')

    @staticmethod
    def _wrap_axis(x: np.ndarray, lo: float, hi: float, periodic: bool, name: str) -> np.ndarray:
        if periodic:
            return lo + np.mod(x - lo, hi - lo)
        bad = ~np.isfinite(x)
        if np.isfinite(lo):
            bad |= x < lo - DOMAIN_TOL
        if np.isfinite(hi):
            bad |= x > hi + DOMAIN_TOL
        if bad.any():
            idx = int(np.flatnonzero(bad)[0])
            raise DomainError(f"{name}={x[idx]!r} at sample {idx} outside domain [{lo}, {hi}]", index=idx)
        return np.clip(x, lo, hi)

    def jet(self, u, v) -> SurfaceJet:
        """Position and partials; scalar parameters give (3,) arrays"""
        scalar = np.ndim(u) == 0 and np.ndim(v) == 0
        jet = self._jet(*self.wrap(u, v))
        if scalar:
            return SurfaceJet(*(a[0] for a in (jet.position, jet.du, jet.dv, jet.duu, jet.duv, jet.dvv)))
        return jet

    def point(self, u, v) -> np.ndarray:
        return self.jet(u, v).position

    def contains(self, u: float, v: float) -> bool:
        """True when (u, v) lies in the base domain (periodic directions always do)"""
        u0, u1, v0, v1 = self.domain()
        ok_u = self.periodic_u or (u0 - DOMAIN_TOL <= u <= u1 + DOMAIN_TOL)
        ok_v = self.periodic_v or (v0 - DOMAIN_TOL <= v <= v1 + DOMAIN_TOL)
        return bool(ok_u and ok_v)


def surface_jet(s: Surface, u, v) -> SurfaceJet:
    """Evaluate a surface and its first and second partials"""
    return s.jet(u, v)
