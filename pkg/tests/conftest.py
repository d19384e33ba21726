import numpy as np
import pytest

from wellspectra.assemble import assemble_pencil, classify_nodes
from wellspectra.model import GridSpec, PotentialField, build_potential


def make_pencil(dim, res, family, e, box_half=2.0):
    grid = GridSpec(box=((-box_half, box_half),) * dim, resolution=(res,) * dim)
    V = build_potential(family, grid)
    dec = classify_nodes(V, e)
    return V, assemble_pencil(dec, V, e)


@pytest.fixture(scope="session")
def disk2d():
    """Small 2D smooth-well pencil used across boundary-operator tests."""
    family = {"name": "gaussian_well", "center": [0.0, 0.0], "width": 0.6, "depth": 4.0}
    return make_pencil(2, 25, family, -0.8)


@pytest.fixture(scope="session")
def ball3d():
    """Coarse 3D square-well pencil (the reference benchmark geometry)."""
    family = {"name": "ball_well", "center": [0.0, 0.0, 0.0], "radius": 1.0, "depth": 12.0}
    return make_pencil(3, 17, family, -0.5)


@pytest.fixture()
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def path3():
    """1D three-node toy: I = {middle}, B = {ends}, h = 1, interior mass m."""
    grid = GridSpec(box=((0.0, 2.0),), resolution=(3,))
    V = PotentialField(grid=grid, values=np.array([0.0, -1.0, 0.0]))
    dec = classify_nodes(V, -0.5)
    return V, assemble_pencil(dec, V, -0.5)
