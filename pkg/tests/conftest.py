import numpy as np
import pytest

from wlra import BipartiteGraph

SMALL_M = np.array([[1.0, 0.0, 1.0], [0.0, 1.0, 1.0], [1.0, 1.0, 1.0]])
SMALL_W = np.array([[1.0, 100.0, 2.0], [100.0, 1.0, 2.0], [1.0, 1.0, 1.0]])


@pytest.fixture
def small():
    return SMALL_M.copy(), SMALL_W.copy()


@pytest.fixture
def g1():
    """3x3 graph with 7 edges and four maximal bicliques."""
    return BipartiteGraph(SMALL_M)


@pytest.fixture
def masked2():
    from wlra import MaskedMatrix
    return MaskedMatrix([[1.0, 0.0], [0.0, 1.0]], [[True, False], [True, True]])


def all_graphs(s, t):
    for bits in range(2 ** (s * t)):
        B = np.array([(bits >> k) & 1 for k in range(s * t)], dtype=float).reshape(s, t)
        yield BipartiteGraph(B)
