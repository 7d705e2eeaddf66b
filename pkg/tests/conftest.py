import numpy as np
import pytest

from emsched import Edge, Instance, PowerLaw, Task


def powerlaw_tasks(n, work=1.0, alpha=3.0):
    return tuple(Task(j, PowerLaw(work, alpha)) for j in range(n))


def make_instance(n, edges=(), m=2, E=1.0, work=1.0, alpha=3.0, rho=None, R=None):
    """Instance of ``n`` identical power-law tasks; edges as (i, j) or (i, j, c)."""
    es = tuple(Edge(e[0], e[1], float(e[2]) if len(e) > 2 else 0.0) for e in edges)
    return Instance(powerlaw_tasks(n, work, alpha), es, m, E, rho=rho, R=R)


DIAMOND = [(0, 1), (0, 2), (1, 3), (2, 3)]


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
