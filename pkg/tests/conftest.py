import numpy as np
import pytest

from epicut.forge import CAPParams, LLAParams, SnipParams, generate
from epicut.model import Block, BlockDiagonalProblem, FirstStageSet

# desk sizes small enough for enumeration (n <= 12)
TINY = {
    "cap": CAPParams(facilities=8, customers=10, scenarios=5),
    "lla": LLAParams(n=12, segments=10, p=6),
    "snip": SnipParams(nodes=12, arcs=30, interdictable=12, scenarios=8, budget=2),
}


def tiny(family, seed):
    return generate(family, seed, TINY[family])


def cover_block(k=0, n=1, d=1.0):
    """min d y  s.t.  y >= 1 - x_0 (one row)."""
    T = np.zeros((1, n))
    T[0, 0] = 1.0
    return Block(k, np.array([d]), T, np.array([[1.0]]), np.array([1.0]), [">="])


def one_var_problem(c=0.0, N=1):
    return BlockDiagonalProblem(np.array([c]), FirstStageSet(1), [cover_block(k) for k in range(N)], "unit")


@pytest.fixture
def cap_problem():
    return tiny("cap", 1)
