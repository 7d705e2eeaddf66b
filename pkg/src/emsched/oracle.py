"""Exhaustive reference solvers for tiny instances.

These exist to check the convex programs and the approximation algorithms,
so they share no code with either: durations are searched on a grid and
schedules are enumerated outright.
"""
from __future__ import annotations

import itertools
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import EmschedError, InstanceTooLarge
from .instance import Instance

MAX_BRUTE_FORCE = 8
MAX_GRID = 4
_EPS = 1e-12


def _tails(inst: Instance, d: Sequence[float]) -> list[float]:
    tail = [0.0] * inst.n
    for j in reversed(inst.order):
        tail[j] = d[j] + max((tail[k] for k in inst.succs[j]), default=0.0)
    return tail


def _greedy_upper_bound(inst, d, m, with_delays) -> float:
    free = [0.0] * m
    fin, proc = {}, {}
    for j in inst.order:
        best = None
        for p in range(m):
            t = free[p]
            for i in inst.preds[j]:
                lag = inst.delay[(i, j)] if with_delays and proc[i] != p else 0.0
                t = max(t, fin[i] + lag)
            if best is None or t < best[0]:
                best = (t, p)
        t, p = best
        fin[j], proc[j] = t + d[j], p
        free[p] = t + d[j]
    return max(fin.values(), default=0.0)


def brute_force_makespan(
    inst: Instance,
    fixed_d: Sequence[float],
    m: Optional[int] = None,
    with_delays: bool = True,
) -> float:
    """Exact optimal makespan over non-preemptive, non-migratory schedules.

    Branch and bound over processor assignments and task sequences.  Tasks
    are appended in non-decreasing start order (ties by id), each to a used
    processor or the first unused one, and started as early as possible.
    The bound is the larger of the remaining critical path and the remaining
    work spread over ``m`` processors.

    Raises
    ------
    InstanceTooLarge
        For more than eight tasks.
    """
    n = inst.n
    if n > MAX_BRUTE_FORCE:
        raise InstanceTooLarge(f"brute force handles at most {MAX_BRUTE_FORCE} tasks, got {n}")
    m = inst.m if m is None else m
    if n == 0:
        return 0.0
    d = [float(v) for v in fixed_d]
    tail = _tails(inst, d)
    preds = inst.preds
    delay = inst.delay
    best = [_greedy_upper_bound(inst, d, m, with_delays) + 1e-12]
    finish = [0.0] * n
    proc = [-1] * n
    free = [0.0] * m
    total = sum(d)

    def search(done: int, used: int, last_start: float, last_id: int, span: float, work_left: float):
        if done == (1 << n) - 1:
            best[0] = min(best[0], span)
            return
        floor = last_start
        lb = span
        load = sum(max(f, floor) for f in free) + work_left
        lb = max(lb, load / m)
        for j in range(n):
            if not done >> j & 1:
                r = floor
                for i in preds[j]:
                    if done >> i & 1:
                        r = max(r, finish[i])
                lb = max(lb, r + tail[j])
        if lb >= best[0] - _EPS:
            return
        for j in range(n):
            if done >> j & 1 or any(not done >> i & 1 for i in preds[j]):
                continue
            for p in range(min(used + 1, m)):
                t = free[p]
                for i in preds[j]:
                    lag = delay[(i, j)] if with_delays and proc[i] != p else 0.0
                    if finish[i] + lag > t:
                        t = finish[i] + lag
                if t < last_start - _EPS or (abs(t - last_start) <= _EPS and j < last_id):
                    continue
                old_free = free[p]
                finish[j] = t + d[j]
                proc[j] = p
                free[p] = finish[j]
                search(done | 1 << j, max(used, p + 1), t, j, max(span, finish[j]), work_left - d[j])
                free[p] = old_free
                proc[j] = -1

    search(0, 0, 0.0, -1, 0.0, total)
    return best[0]


# -- duration grids --------------------------------------------------------


def _batch_longest(inst: Instance, D: np.ndarray, lags: Optional[dict] = None) -> np.ndarray:
    t = np.zeros_like(D)
    for j in inst.order:
        for i in inst.preds[j]:
            lag = lags[(i, j)] if lags else 0.0
            np.maximum(t[:, j], t[:, i] + D[:, i] + lag, out=t[:, j])
    return np.max(t + D, axis=1)


def eval_program1(inst: Instance, D: np.ndarray) -> np.ndarray:
    """Unlimited-processor makespan with the averaging bound, for each row of durations."""
    return np.maximum(_batch_longest(inst, D), D.sum(axis=1) / inst.m)


def _half_integral_covers(inst: Instance) -> np.ndarray:
    n = inst.n
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n) if not inst.comparable(i, j)]
    covers = []
    for pi in itertools.product((0.0, 0.5, 1.0), repeat=n):
        if all(pi[i] + pi[j] >= 1.0 for i, j in pairs):
            covers.append(pi)
    return np.array(covers)


def eval_program3(inst: Instance, D: np.ndarray) -> np.ndarray:
    """Two-processor preemptive makespan for each row of durations.

    Total work minus the largest fractional pairing of incomparable tasks;
    the pairing is computed as its dual, the cheapest fractional vertex
    cover, whose vertices are half-integral.
    """
    covers = _half_integral_covers(inst)
    pairing = np.min(D @ covers.T, axis=1)
    return D.sum(axis=1) - pairing


def indicator_assignments(inst: Instance) -> list[dict]:
    """Every 0/1 indicator vector with at most one 1 per task in each direction.

    Edges with no delay are fixed at 0 since their indicator has no effect.
    """
    edges = [(e.src, e.dst) for e in inst.edges if e.delay > 0]
    out = []
    for bits in itertools.product((0, 1), repeat=len(edges)):
        outs, ins = set(), set()
        ok = True
        for (i, j), b in zip(edges, bits):
            if b:
                if i in outs or j in ins:
                    ok = False
                    break
                outs.add(i)
                ins.add(j)
        if ok:
            x = {(e.src, e.dst): 0.0 for e in inst.edges}
            x.update({k: float(b) for k, b in zip(edges, bits)})
            out.append(x)
    return out


def eval_program4(inst: Instance, D: np.ndarray) -> np.ndarray:
    """Best integral small-delay objective for each row of durations."""
    best = np.full(D.shape[0], np.inf)
    avg = D.sum(axis=1) / inst.m
    for x in indicator_assignments(inst):
        lags = {k: inst.delay[k] * (1.0 - v) for k, v in x.items()}
        best = np.minimum(best, np.maximum(_batch_longest(inst, D, lags), avg))
    return best


def best_integral_indicators(inst: Instance, cfg=None):
    """Optimal integral small-delay solution by enumerating indicator vectors.

    Each admissible 0/1 vector is fixed and the remaining convex program
    solved; the best objective wins.  Limited to six tasks.
    """
    from .solver import SolverConfig, solve_program4_fixed

    if inst.n > 6:
        raise InstanceTooLarge(f"indicator enumeration handles at most 6 tasks, got {inst.n}")
    cfg = cfg or SolverConfig()
    best = None
    for x in indicator_assignments(inst):
        sol = solve_program4_fixed(inst, x, cfg)
        if best is None or sol.mu < best.mu:
            best = sol
    return best


EVALUATORS = {"program1": eval_program1, "program3": eval_program3, "program4": eval_program4}


def _geometric(a: float, b: float, r: float) -> np.ndarray:
    if b <= a:
        return np.array([a])
    k = int(np.ceil(np.log(b / a) / np.log(r)))
    return np.minimum(a * r ** np.arange(k + 1), b)


def _frontier_search(inst, evaluate, lo, hi, step, chunk):
    """Coarse-to-fine geometric grid search of one convex objective.

    The first pass covers ``[lo, hi]`` in every coordinate with ratio 1.25;
    each later pass zooms to two cells either side of the incumbent with a
    finer ratio, ending at ``1 + step``.  The last coordinate is always the
    shortest value on the fine grid that the leftover budget affords.
    """
    funcs = [t.energy for t in inst.tasks]
    n = inst.n
    last = n - 1
    ratios = [r for r in (1.25, 1.05) if r > 1.0 + step] + [1.0 + step]
    g_last = _geometric(lo[last], hi[last], 1.0 + step)
    e_last = np.array([funcs[last].value(float(v)) for v in g_last])
    box_lo, box_hi = lo.copy(), hi.copy()
    best_val, best_d = np.inf, None
    for r in ratios:
        grids = [_geometric(box_lo[j], box_hi[j], r) for j in range(last)]
        energies = [np.array([funcs[j].value(float(v)) for v in g]) for j, g in enumerate(grids)]
        if last >= 1:
            mesh = np.array(np.meshgrid(*grids, indexing="ij")).reshape(last, -1).T
            emesh = np.array(np.meshgrid(*energies, indexing="ij")).reshape(last, -1).sum(axis=0)
        else:
            mesh, emesh = np.zeros((1, 0)), np.zeros(1)
        left = inst.E * (1.0 + 1e-12) - emesh
        # energies along g_last are non-increasing: first index that fits
        k = len(e_last) - np.searchsorted(e_last[::-1], left, side="right")
        rows = np.nonzero(k < len(e_last))[0]
        for s in range(0, len(rows), chunk):
            part = rows[s:s + chunk]
            Dm = np.column_stack([mesh[part], g_last[k[part]]])
            vals = evaluate(inst, Dm)
            a = int(np.argmin(vals))
            if vals[a] < best_val:
                best_val, best_d = float(vals[a]), Dm[a].copy()
        if best_d is None:
            break
        box_lo = np.maximum(lo, best_d / r ** 2)
        box_hi = np.minimum(hi, best_d * r ** 2)
    return best_val, best_d


def grid_search_durations(
    inst: Instance,
    step: float = 0.01,
    inner: Union[str, Callable] = "program1",
    chunk: int = 200_000,
) -> tuple[np.ndarray, float]:
    """Best duration vector on a geometric grid whose energy fits the budget.

    Each duration ranges from the smallest value the budget allows up to the
    makespan of a simple feasible point (no optimum has a longer task), with
    neighbouring grid values in ratio ``1 + step``.  The objectives are
    convex in the durations, so the grid is explored coarse-to-fine around
    the incumbent.  The integral indicator objective is a minimum of convex
    functions and is searched once per indicator assignment.  Every
    objective is non-decreasing in each duration, so the last task takes the
    shortest grid value the leftover budget affords.

    Parameters
    ----------
    inner : {"program1", "program3", "program4"} or callable
        Evaluator mapping an ``(k, n)`` array of durations to ``k`` makespans.
        A callable should be convex for the search to find the grid optimum.

    Returns
    -------
    d : ndarray
        Best durations found.
    value : float
        Objective at ``d``.

    Raises
    ------
    EmschedError
        If no grid point meets the budget.
    """
    n = inst.n
    if n > MAX_GRID:
        raise InstanceTooLarge(f"grid search handles at most {MAX_GRID} tasks, got {n}")
    if step <= 0:
        raise ValueError("step must be positive")
    if n == 0:
        return np.zeros(0), 0.0
    funcs = [t.energy for t in inst.tasks]
    floors = inst.duration_floors()
    inf = np.array([f.infimum for f in funcs])
    spare = inst.E - inf.sum()
    if spare < 0:
        raise EmschedError("grid empty: budget below the total energy infimum")
    lo = np.empty(n)
    for j, f in enumerate(funcs):
        own = inst.E - (inf.sum() - inf[j])
        shortest = f.inverse(own) if own > f.infimum or f.attains_infimum else np.inf
        lo[j] = max(floors[j], shortest, 1e-9)
    share = spare / n
    start = np.array([
        max(lo[j], f.inverse(f.infimum + share) if share > 0 or f.attains_infimum else np.inf)
        for j, f in enumerate(funcs)
    ])
    if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(start))):
        raise EmschedError("grid empty: no duration vector meets the energy budget")

    if inner == "program4":
        pieces = []
        for x in indicator_assignments(inst):
            lags = {k: inst.delay[k] * (1.0 - v) for k, v in x.items()}
            pieces.append(
                lambda I, D, lags=lags: np.maximum(_batch_longest(I, D, lags), D.sum(axis=1) / I.m)
            )
    else:
        pieces = [EVALUATORS[inner] if isinstance(inner, str) else inner]
    best_val, best_d = np.inf, None
    for evaluate in pieces:
        hi = np.maximum(lo, float(evaluate(inst, start[None, :])[0]))
        val, d = _frontier_search(inst, evaluate, lo, hi, step, chunk)
        if d is not None and val < best_val:
            best_val, best_d = val, d
    if best_d is None:
        raise EmschedError("grid empty: no grid point meets the energy budget")
    return best_d, best_val
