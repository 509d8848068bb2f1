"""
Pytest configuration and fixtures
"""

import pytest
import sys
from pathlib import Path

# Add the package root to path
root_path = Path(__file__).parent.parent
sys.path.insert(0, str(root_path))

from src.diffmod import Distribution, OneForm, VectorField  # noqa: E402
from src.poly import PolyRing  # noqa: E402


CORPUS = root_path / "corpus"


@pytest.fixture
def corpus():
    """Directory of shipped problem files"""
    return CORPUS


@pytest.fixture
def plane():
    """Q[x, y]"""
    return PolyRing(["x", "y"])


@pytest.fixture
def space():
    """Q[x, y, z]"""
    return PolyRing(["x", "y", "z"])


@pytest.fixture
def parabola(plane):
    """Leaves y = x^2 + c: relation dy - 2x dx"""
    return Distribution(plane, [OneForm(plane, {"x": "-2*x", "y": "1"})])


@pytest.fixture
def radii(plane):
    """Lines through the origin: relation -y dx + x dy"""
    return Distribution(plane, [OneForm(plane, {"x": "-y", "y": "x"})])


@pytest.fixture
def hyperbolae(plane):
    """Leaves xy = c: relation y dx + x dy"""
    return Distribution(plane, [OneForm(plane, {"x": "y", "y": "x"})])


@pytest.fixture
def hyperbolae3d(space):
    """Orbits of -x d/dx + y d/dy + z d/dz"""
    field = VectorField(space, {"x": "-x", "y": "y", "z": "z"})
    return Distribution.from_vector_fields(space, [field])


@pytest.fixture
def contact(space):
    """The contact form dz - y dx"""
    return Distribution(space, [OneForm(space, {"x": "-y", "z": "1"})])
