import os
import sys

import numpy as np
import pytest

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if ROOT not in sys.path:
    sys.path.insert(0, ROOT)

from core.boundary import BoundaryCurve  # noqa: E402
from core.catalog import Cylinder, Plane, Revolution, Sphere, Torus  # noqa: E402
from core.spline import BSplineCurve2  # noqa: E402
from data.data_generator import REVOLUTION_PROFILE  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def plane():
    return Plane()


@pytest.fixture
def sphere():
    return Sphere(1.0)


@pytest.fixture
def cylinder():
    return Cylinder(1.0, 2.0)


@pytest.fixture
def torus():
    return Torus(2.0, 0.5)


@pytest.fixture
def revolution():
    return Revolution(BSplineCurve2.from_points(REVOLUTION_PROFILE, degree=3))


@pytest.fixture
def concentric():
    """Unit and radius-2 circles about the origin"""
    return BoundaryCurve.circle((0.0, 0.0), 1.0), BoundaryCurve.circle((0.0, 0.0), 2.0)


@pytest.fixture
def input_dir():
    return os.path.join(ROOT, "data", "input")
