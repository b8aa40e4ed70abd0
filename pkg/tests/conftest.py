import numpy as np
import pytest

from stable_jacobi import Grid, Interval, JacobiParams, SamplePath, StableLaw


@pytest.fixture
def legendre():
    return JacobiParams(0.0, 0.0)


@pytest.fixture
def window():
    return Interval(-0.5, 0.5)


def make_identity_path(interval, n_steps, law=None):
    """Deterministic path X(v) = v - a, so increments are exactly delta."""
    grid = Grid(interval, n_steps)
    values = grid.points - interval.a
    values[0] = 0.0
    return SamplePath(grid=grid, values=values, label="X", path_id=0,
                      law=law or StableLaw(1.5))


def make_zero_path(interval, n_steps):
    grid = Grid(interval, n_steps)
    return SamplePath(grid=grid, values=np.zeros(n_steps + 1), label="X",
                      path_id=0, law=StableLaw(1.5))
