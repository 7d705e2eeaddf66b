"""Schedulers for the model without communication delays."""
from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import InstanceError, ScheduleError
from .instance import Instance
from .schedule import ModelFlags, Schedule, ScheduleSegment, validate_schedule
from .solver import (
    Program1Solution,
    SolverConfig,
    TwoProcSolution,
    solve_program2,
    solve_program3,
)
from .solver.programs import DEFAULT_CONFIG

#: Pair or solo times at or below this are dropped when building segments.
SNAP = 1e-12


def unlimited_schedule(sol: Program1Solution) -> Schedule:
    """Run every task on its own processor at its program start time."""
    segs = [
        ScheduleSegment(j, j, float(t), float(t + d))
        for j, (t, d) in enumerate(zip(sol.t, sol.d))
    ]
    return Schedule(tuple(segs), ModelFlags(False, False, True))


def schedule_to_program1(inst: Instance, s: Schedule) -> Program1Solution:
    """Read ``(mu, t, d)`` off a feasible zero-delay schedule.

    ``t_j`` is the first time task ``j`` runs and ``d_j`` the total length of
    its segments, so preempted tasks are handled.  ``mu`` is the smallest
    value feasible for that ``(t, d)``: the makespan, raised to the average
    load ``sum(d) / m`` when the schedule uses more than ``m`` processors.
    """
    report = validate_schedule(inst, s)
    if not report.feasible:
        raise ScheduleError("cannot convert an infeasible schedule: " + "; ".join(d for _, d in report.violations))
    t = [s.start(j) for j in range(inst.n)]
    d = s.durations(inst.n)
    return Program1Solution(max(s.makespan, float(np.sum(d)) / inst.m), t, d)


def list_schedule(inst: Instance, sol: Program1Solution) -> Schedule:
    """Greedy list scheduling on ``inst.m`` processors with the program's durations.

    At every step the earliest time at which some processor is free and some
    task has all predecessors finished is chosen; ties go to the smallest
    task id, then the smallest processor index.  The makespan is at most
    ``(2 - 1/m)`` times the program objective.
    """
    if inst.has_delays:
        raise InstanceError("list scheduling applies to instances without communication delays")
    n, m = inst.n, inst.m
    d = [float(v) for v in sol.d]
    free = [0.0] * m
    finish = [None] * n
    left = set(range(n))
    segs = []
    while left:
        best = None
        earliest_free = min(free)
        for j in sorted(left):
            if any(finish[i] is None for i in inst.preds[j]):
                continue
            ready = max((finish[i] for i in inst.preds[j]), default=0.0)
            t = max(ready, earliest_free)
            if best is None or t < best[0]:
                best = (t, j)
        t, j = best
        p = min(q for q in range(m) if free[q] <= t)
        segs.append(ScheduleSegment(j, p, t, t + d[j]))
        finish[j] = t + d[j]
        free[p] = t + d[j]
        left.remove(j)
    return Schedule(tuple(segs), ModelFlags(False, False, True))


def _key(order_pos: dict, a: int, b: int) -> tuple:
    return (a, b) if order_pos[a] < order_pos[b] else (b, a)


def next_source_exchange(
    sol: TwoProcSolution,
    graph: Instance,
    tasks: Optional[Sequence[int]] = None,
) -> tuple[int, TwoProcSolution]:
    """Find a source that pairs only with other sources, exchanging pair times if needed.

    ``tasks`` restricts the graph to a set closed under predecessors (the
    tasks not yet scheduled).  Each exchange takes two positive entries
    ``(i, j)`` and ``(h, k)`` with sources ``i != h`` and incomparable
    non-sources ``j != k``, moves ``min(l_ij, l_hk)`` onto ``(i, h)`` and
    ``(j, k)``, and leaves every duration and the objective unchanged.

    Returns
    -------
    next : int
        A source ``s`` with ``l_sj == 0`` for every non-source ``j``.
    sol : TwoProcSolution
        The exchanged solution.
    """
    alive = sorted(range(graph.n) if tasks is None else tasks)
    if not alive:
        raise ValueError("cannot pick a next task from an empty graph")
    pos = {j: k for k, j in enumerate(sol.order)}
    S = graph.sources(alive)
    S_set = set(S)
    rest = [j for j in alive if j not in S_set]
    ell = dict(sol.ell_pair)

    def get(a, b):
        return ell.get(_key(pos, a, b), 0.0)

    def put(a, b, v):
        k = _key(pos, a, b)
        if v > 0:
            ell[k] = v
        else:
            ell.pop(k, None)

    while True:
        Z = [(i, j) for i in S for j in rest if get(i, j) > 0]
        if not Z:
            nxt = S[0]
            break
        pair = None
        for a, (i, j) in enumerate(Z):
            for h, k in Z[a + 1:]:
                if i != h and j != k and not graph.comparable(j, k):
                    pair = ((i, j), (h, k))
                    break
            if pair:
                break
        if pair is None:
            firsts = {i for i, _ in Z}
            T = sorted({j for _, j in Z})
            least = next(j for j in T if not any(graph.reach[k, j] for k in T))
            below = [s for s in S if graph.reach[s, least] and s not in firsts]
            free = [s for s in S if s not in firsts]
            if not (below or free):
                raise RuntimeError("next-task exchange found no free source (pairing solution is infeasible)")
            nxt = (below or free)[0]
            break
        (i, j), (h, k) = pair
        lij, lhk = get(i, j), get(h, k)
        delta = min(lij, lhk)
        put(i, h, get(i, h) + delta)
        put(j, k, get(j, k) + delta)
        if lij <= lhk:
            put(i, j, 0.0)
            put(h, k, lhk - delta)
        else:
            put(h, k, 0.0)
            put(i, j, lij - delta)

    return nxt, TwoProcSolution(sol.mu, sol.d, sol.ell_solo, ell, sol.order)


def _merge(segs: list) -> list:
    """Join touching segments of one task on one processor."""
    out = []
    for s in sorted(segs, key=lambda g: (g.task, g.processor, g.start)):
        prev = out[-1] if out else None
        if prev and prev.task == s.task and prev.processor == s.processor and prev.end == s.start:
            out[-1] = ScheduleSegment(s.task, s.processor, prev.start, s.end)
        else:
            out.append(s)
    return out


def two_proc_schedule(
    inst: Instance,
    cfg: SolverConfig = DEFAULT_CONFIG,
    solution: Optional[TwoProcSolution] = None,
    debug: bool = False,
) -> Schedule:
    """Optimal preemptive, migratory schedule on two processors.

    Durations come from the two-processor energy program (pass ``solution``
    to reuse one).  A vertex of the pairing LP at those durations is then
    peeled one source at a time: the chosen source runs alone on processor 0,
    then alongside each partner on processor 1.  Pair times left over after
    an iteration are reused for the next, so the LP is solved once; with
    ``debug`` it is re-solved every iteration and the objectives compared.
    """
    if inst.m != 2:
        raise InstanceError(f"two-processor scheduling needs m = 2, got m = {inst.m}")
    if inst.has_delays:
        raise InstanceError("two-processor scheduling applies to instances without communication delays")
    if inst.n == 0:
        return Schedule((), ModelFlags(True, True, True))
    sol3 = solution if solution is not None else solve_program3(inst, cfg)
    order = tuple(inst.order)
    cur = solve_program2(inst, sol3.d, order)
    dhat = np.array(cur.d, dtype=float)
    alive = list(range(inst.n))
    now = 0.0
    segs = []
    for _ in range(inst.n):
        s, cur = next_source_exchange(cur, inst, alive)
        pos = {j: k for k, j in enumerate(order)}
        solo = float(cur.ell_solo[s])
        if solo > SNAP:
            segs.append(ScheduleSegment(s, 0, now, now + solo))
            now += solo
        ell = dict(cur.ell_pair)
        for i in order:
            if i == s or i not in alive:
                continue
            v = ell.pop(_key(pos, s, i), 0.0)
            if v > SNAP:
                segs.append(ScheduleSegment(s, 0, now, now + v))
                segs.append(ScheduleSegment(i, 1, now, now + v))
                now += v
            dhat[i] -= v
        for k in [k for k in ell if s in k]:
            ell.pop(k)
        alive.remove(s)
        dhat[s] = 0.0
        solo_left = np.array(cur.ell_solo, dtype=float)
        solo_left[s] = 0.0
        cur = TwoProcSolution(0.0, dhat, solo_left, ell, order)
        cur = TwoProcSolution(cur.objective(), dhat, solo_left, ell, order)
        if debug and alive:
            fresh = solve_program2(inst, dhat, order, tasks=[j for j in alive if dhat[j] > SNAP])
            scale = max(1.0, cur.mu)
            if abs(fresh.mu - cur.mu) > 1e-9 * inst.n * scale:
                raise RuntimeError(
                    f"carried pairing objective {cur.mu!r} differs from a fresh solve {fresh.mu!r}"
                )
    return Schedule(tuple(_merge(segs)), ModelFlags(True, True, True))
