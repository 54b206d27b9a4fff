"""
Shared spaces, towers and scratch directories.
"""
from unittest.mock import MagicMock

import numpy as np
import pytest

from core.chains import Chain
from core.fixtures import (
    cat0_sphere_tower, circle, cycle, ngon, projective_plane, solenoid_tower,
)
from core.run_ledger import RunLedger


@pytest.fixture
def square():
    """Unit square: sides 1, diagonals sqrt(2)."""
    return ngon(4, 1.0)


@pytest.fixture
def hexagon():
    """6-cycle with unit edges; at 2.5 its Rips complex is an octahedron."""
    return cycle(6, 1.0)


@pytest.fixture
def circle12():
    return circle(12, 1.0)


@pytest.fixture
def boundary_loop():
    """The square's boundary loop at a given scale."""
    def make(scale):
        return Chain(scale, (0, 1, 2, 3, 0))
    return make


@pytest.fixture
def rp2():
    """Subdivided projective plane; edge-path group Z/2 for 1 < eps <= 2."""
    return projective_plane()


@pytest.fixture
def solenoid8():
    """Two stages: 8 and 16 points, same spacing 1/8."""
    return solenoid_tower(2, 8)


@pytest.fixture
def cat0_tower():
    return cat0_sphere_tower([1.0, 1.25, 1.5, 1.75])


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def temp_data_dir(tmp_path):
    """Create temporary data directory for tests."""
    data_dir = tmp_path / "data"
    data_dir.mkdir()
    (data_dir / "logs").mkdir()
    (data_dir / "runs").mkdir()
    return data_dir


@pytest.fixture
def ledger(temp_data_dir):
    return RunLedger(temp_data_dir / "runs")


@pytest.fixture
def mock_ledger():
    return MagicMock(spec=RunLedger)
