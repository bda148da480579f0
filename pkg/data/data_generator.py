import math
from typing import Dict

import numpy as np

from core.boundary import BoundaryCurve
from core.catalog import Cylinder, Plane, Revolution, Sphere, Torus
from core.nurbs import NurbsSurface
from core.scene import Scene
from core.spline import BSplineCurve2, KnotVector

TWO_PI = 2.0 * math.pi
REVOLUTION_PROFILE = ((1.0, 0.0), (1.6, 0.35), (1.6, 0.65), (1.0, 1.0))


class SceneGenerator:
    """Builds the fixture scenes; seed shifts the height pattern of the face patch"""

    def __init__(self, seed: int = 7, bump: float = 0.25):
        self.seed = seed
        self.bump = bump

    def plane_circles(self) -> Scene:
        """Concentric circles, their common center and a point outside both"""
        scene = Scene(Plane())
        scene.add_curve("inner", BoundaryCurve.circle((0.0, 0.0), 1.0))
        scene.add_curve("outer", BoundaryCurve.circle((0.0, 0.0), 2.0))
        scene.add_curve("center", BoundaryCurve.at(0.0, 0.0))
        scene.add_curve("far", BoundaryCurve.at(3.0, 0.0))
        return scene

    def plane_line_point(self) -> Scene:
        scene = Scene(Plane())
        scene.add_curve("line", BoundaryCurve.segment((-2.0, 0.0), (2.0, 0.0)))
        scene.add_curve("p", BoundaryCurve.at(0.5, 1.5))
        scene.add_curve("q", BoundaryCurve.at(1.5, 2.5))
        return scene

    def cylinder(self) -> Scene:
        """Unit cylinder of height 2 with two parallels and three points"""
        scene = Scene(Cylinder(1.0, 2.0))
        scene.add_curve("bottom", BoundaryCurve.parallel(0.5, TWO_PI))
        scene.add_curve("top", BoundaryCurve.parallel(1.5, TWO_PI))
        scene.add_curve("a", BoundaryCurve.at(0.2, 0.5))
        scene.add_curve("b", BoundaryCurve.at(0.2 + 0.5 * math.pi, 1.5))
        scene.add_curve("c", BoundaryCurve.at(0.2 + 1.5 * math.pi, 0.5))
        return scene

    def sphere(self) -> Scene:
        scene = Scene(Sphere(1.0))
        scene.add_curve("a", BoundaryCurve.at(0.3, 0.0))
        scene.add_curve("b", BoundaryCurve.at(0.3 + 0.5 * math.pi, 0.0))
        scene.add_curve("p", BoundaryCurve.at(1.0, 0.7))
        scene.add_curve("equator", BoundaryCurve.parallel(0.0, TWO_PI))
        return scene

    def torus(self) -> Scene:
        """Two parallels of the tube angle on a (2, 0.5) torus"""
        scene = Scene(Torus(2.0, 0.5))
        scene.add_curve("ring_a", BoundaryCurve.parallel(0.5, TWO_PI))
        scene.add_curve("ring_b", BoundaryCurve.parallel(2.5, TWO_PI))
        scene.add_curve("p", BoundaryCurve.at(0.4, 0.5))
        scene.add_curve("q", BoundaryCurve.at(5.5, 5.8))
        return scene

    def revolution(self) -> Scene:
        """Convex bump profile swept about the z axis; a single cubic span keeps the surface C2"""
        profile = BSplineCurve2.from_points(REVOLUTION_PROFILE, degree=3)
        scene = Scene(Revolution(profile))
        scene.add_curve("low", BoundaryCurve.parallel(0.15, TWO_PI))
        scene.add_curve("high", BoundaryCurve.parallel(0.85, TWO_PI))
        scene.add_curve("p", BoundaryCurve.at(0.3, 0.2))
        scene.add_curve("q", BoundaryCurve.at(4.0, 0.8))
        return scene

    def bump_heights(self, nu: int, nv: int) -> np.ndarray:
        """Heights in steps of bump / 4 between -bump and bump; exact binary fractions for the default bump"""
        i, j = np.meshgrid(np.arange(nu), np.arange(nv), indexing="ij")
        return self.bump * ((5 * i + 3 * j + self.seed) % 9 - 4) / 4.0

    def bumpy_face(self) -> Scene:
        """Cubic patch with (8, 4) control points and two circular holes"""
        nu, nv = 8, 4
        heights = self.bump_heights(nu, nv)
        net = [[(0.25 * i, 0.5 * j, float(heights[i, j])) for j in range(nv)]
               for i in range(nu)]
        surface = NurbsSurface(tuple(tuple(row) for row in net), KnotVector.uniform(nu, 3), KnotVector.uniform(nv, 3))
        scene = Scene(surface)
        scene.add_curve("left_hole", BoundaryCurve.circle((0.3, 0.6), 0.12))
        scene.add_curve("right_hole", BoundaryCurve.circle((0.7, 0.4), 0.12))
        scene.add_curve("p", BoundaryCurve.at(0.5, 0.9))
        return scene

    def generate_all(self) -> Dict[str, Scene]:
        """Every fixture scene keyed by its file stem"""
        return {
            "plane_circles": self.plane_circles(),
            "plane_line_point": self.plane_line_point(),
            "cylinder": self.cylinder(),
            "sphere": self.sphere(),
            "torus": self.torus(),
            "revolution": self.revolution(),
            "bumpy_face": self.bumpy_face(),
        }
