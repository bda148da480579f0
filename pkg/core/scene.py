from dataclasses import dataclass, field
from typing import Dict

from core.boundary import BoundaryCurve
from core.catalog import make_surface
from core.errors import ContractError, DomainError, InputError
from core.nurbs import NurbsSurface
from core.surface import Surface


def surface_from_dict(data: dict) -> Surface:
    """Surface entry of a scene: {"analytic": {"kind": ..., ...}} or {"nurbs": {...}}"""
    if "analytic" in data:
        params = dict(data["analytic"])
        kind = params.pop("kind", None)
        if kind is None:
            raise InputError("analytic surface entry needs a 'kind'")
        return make_surface(kind, **params)
    if "nurbs" in data:
        return NurbsSurface.from_dict(data["nurbs"])
    raise InputError(f"surface entry must be 'analytic' or 'nurbs', got keys {sorted(data)}")


@dataclass
class Scene:
    """A surface and named boundary curves in its parameter domain"""
    surface: Surface
    curves: Dict[str, BoundaryCurve] = field(default_factory=dict)

    def add_curve(self, name: str, curve: BoundaryCurve):
        """Add a named boundary"""
        self.curves[name] = curve

    def curve(self, name: str) -> BoundaryCurve:
        if name not in self.curves:
            raise InputError(f"scene has no curve named {name!r}; available: {sorted(self.curves)}")
        return self.curves[name]

    def validate(self):
        """Every point and control point must lie in the surface's base domain"""
        for name, boundary in self.curves.items():
            points = [boundary.point] if boundary.is_point else boundary.curve.control
            for u, v in points:
                if not self.surface.contains(u, v):
                    raise InputError(f"curve {name!r}: ({u}, {v}) lies outside the surface domain")

    def to_dict(self):
        """Convert to dictionary for JSON serialization"""
        return {
            "surface": self.surface.to_dict(),
            "curves": {name: curve.to_dict() for name, curve in self.curves.items()},
        }

    @staticmethod
    def from_dict(data: dict):
        """Create Scene from dictionary"""
        try:
            scene = Scene(surface_from_dict(data["surface"]))
            for name, entry in data.get("curves", {}).items():
                scene.add_curve(name, BoundaryCurve.from_dict(entry))
        except KeyError as exc:
            raise InputError(f"scene is missing the {exc} entry") from exc
        except (ContractError, DomainError, TypeError) as exc:
            raise InputError(f"invalid scene: {exc}") from exc
        scene.validate()
        return scene
