import numpy as np
import pytest

from besseldt.measure import LambdaSpace
from besseldt.quadrature import QuadratureSpec


@pytest.fixture
def space1():
    return LambdaSpace(1.0)


@pytest.fixture
def quad():
    return QuadratureSpec()


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def rel_err(got, want):
    got = np.asarray(got, dtype=float)
    want = np.asarray(want, dtype=float)
    scale = np.maximum(np.abs(want), 1e-300)
    return float(np.max(np.abs(got - want) / scale))
