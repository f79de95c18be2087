import functools

import numpy as np
import pytest

from cubeflow.cochains import IntCochain
from cubeflow.complex import torus_grid


@functools.lru_cache(maxsize=None)
def grid(*shape):
    return torus_grid(shape)


def random_cochain(cx, degree, rng, density=0.5, scale=3):
    cubes = cx.cubes_of_dim(degree)
    values = {c: int(rng.integers(-scale, scale + 1)) for c in cubes if rng.random() < density}
    return IntCochain(cx, degree, values)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def torus33():
    return grid(3, 3)


@pytest.fixture(scope="session")
def torus333():
    return grid(3, 3, 3)
