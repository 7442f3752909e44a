import numpy as np
import pytest

from alpha12.families import from_L, from_phi, mroot
from alpha12.lie import build_su
from alpha12.norm import DatumDecomposition


@pytest.fixture(scope="session")
def su3():
    return build_su(3)


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


SHIPPED_FAMILIES = {
    "linear": lambda: from_L("u + 2*v"),
    "mroot2": lambda: mroot(2),
    "mroot3": lambda: mroot(3),
    "sqrt": lambda: from_phi("sqrt(1 + s^2)"),
}

DIMS = [(2, 2), (4, 2), (5, 3)]


def unit_directions(datum: DatumDecomposition, count: int, seed: int = 0) -> np.ndarray:
    r = np.random.default_rng(seed)
    y = r.standard_normal((count, datum.n))
    return y / np.linalg.norm(y, axis=1, keepdims=True)
