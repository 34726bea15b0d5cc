# -*- coding: utf-8 -*-
import numpy as np
import pytest

from lefton.numerics.grid import make_grid
from lefton.numerics.profiles import LeftonParams


@pytest.fixture
def p3() -> LeftonParams:
    # b = -3, A = 1: Q = 2 sech^3, q = sech, nu = 1, L = 6
    return LeftonParams(b=-3.0, A=1.0)


@pytest.fixture
def grid_wide():
    return make_grid(80.0, 1024)


@pytest.fixture
def grid_short():
    return make_grid(40.0, 512)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
