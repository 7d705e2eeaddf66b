"""Seeded random instances for tests, benchmarks and demos."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .energy import PowerLaw
from .instance import Edge, Instance, Task


def random_instance(
    rng: np.random.Generator,
    n: int,
    m: int = 2,
    alphas: Sequence[float] = (2.0, 3.0),
    edge_prob: Optional[float] = None,
    budget_per_task: tuple[float, float] = (0.5, 4.0),
    max_delay: float = 0.0,
    rho: Optional[float] = None,
    R: Optional[float] = None,
) -> Instance:
    """Random DAG on ``n`` power-law tasks.

    Edges go from lower to higher id with probability ``edge_prob`` (drawn
    uniformly from [0.1, 0.6] when omitted).  Work is uniform on [0.2, 3],
    each task's exponent is drawn from ``alphas``, delays are uniform on
    ``[0, max_delay]`` and the budget is ``n`` times a uniform draw from
    ``budget_per_task``.
    """
    p = float(rng.uniform(0.1, 0.6)) if edge_prob is None else edge_prob
    tasks = tuple(
        Task(j, PowerLaw(float(rng.uniform(0.2, 3.0)), float(rng.choice(alphas)))) for j in range(n)
    )
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                c = float(rng.uniform(0.0, max_delay)) if max_delay > 0 else 0.0
                edges.append(Edge(i, j, c))
    E = float(rng.uniform(*budget_per_task)) * n
    return Instance(tasks, tuple(edges), m, E, rho=rho, R=R)


def relabel(inst: Instance, perm: Sequence[int]) -> Instance:
    """Same instance with task ``j`` renamed ``perm[j]``."""
    perm = list(perm)
    tasks = [None] * inst.n
    for t in inst.tasks:
        tasks[perm[t.id]] = Task(perm[t.id], t.energy, t.label)
    edges = tuple(Edge(perm[e.src], perm[e.dst], e.delay) for e in inst.edges)
    return Instance(tuple(tasks), edges, inst.m, inst.E, inst.rho, inst.R)
