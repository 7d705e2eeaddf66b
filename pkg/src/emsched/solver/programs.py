"""The scheduling programs and their solutions.

``solve_program1``
    unlimited-processor makespan with an averaging constraint (zero delays)
``solve_program2``
    two-processor pairing LP for fixed durations
``solve_program3``
    the pairing LP with durations free under the energy budget
``solve_program4_relaxed``
    small communication delays with fractional same-processor indicators
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from ..energy import AffineReciprocal, Constant, PiecewiseLinear
from ..errors import EmschedError, InfeasibleEnergy, InstanceError
from ..instance import Instance
from .barrier import ConvexProblem, SolverConfig, barrier_solve

DEFAULT_CONFIG = SolverConfig()


def _ro(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Program1Solution:
    mu: float
    t: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "t", _ro(self.t))
        object.__setattr__(self, "d", _ro(self.d))


@dataclass(frozen=True, eq=False)
class Program4Solution:
    mu: float
    t: np.ndarray
    d: np.ndarray
    x: dict = field(default_factory=dict)  # (i, j) -> value in [0, 1]

    def __post_init__(self):
        object.__setattr__(self, "t", _ro(self.t))
        object.__setattr__(self, "d", _ro(self.d))
        object.__setattr__(self, "x", dict(self.x))

    def is_integral(self) -> bool:
        return all(v in (0.0, 1.0) for v in self.x.values())


@dataclass(frozen=True, eq=False)
class TwoProcSolution:
    """Pairing solution: ``ell_pair[(i, j)]`` is keyed with ``i`` before ``j`` in ``order``."""

    mu: float
    d: np.ndarray
    ell_solo: np.ndarray
    ell_pair: dict
    order: tuple

    def __post_init__(self):
        object.__setattr__(self, "d", _ro(self.d))
        object.__setattr__(self, "ell_solo", _ro(self.ell_solo))
        object.__setattr__(self, "ell_pair", dict(self.ell_pair))
        object.__setattr__(self, "order", tuple(self.order))

    def objective(self) -> float:
        return float(np.sum(self.ell_solo) + sum(self.ell_pair.values()))


# -- shared problem assembly ---------------------------------------------


def _energy_setup(inst: Instance, cfg: SolverConfig):
    """Split curves into smooth, epigraph (piecewise) and constant parts.

    Returns ``(smooth, pw_tasks, const_energy, budget)`` where ``budget`` is the
    effective right-hand side of the energy constraint.
    """
    funcs = [t.energy for t in inst.tasks]
    smooth = [f if getattr(f, "smooth", False) else None for f in funcs]
    pw = [j for j, f in enumerate(funcs) if isinstance(f, PiecewiseLinear)]
    const = sum(
        f.c if isinstance(f, Constant) else f.a
        for f in funcs
        if isinstance(f, Constant) or (isinstance(f, AffineReciprocal) and f.b == 0)
    )
    inf_sum = sum(f.infimum for f in funcs)
    open_inf = any(not f.attains_infimum for f in funcs)
    if inf_sum > inst.E or (open_inf and inf_sum >= inst.E):
        raise InfeasibleEnergy(
            f"energy budget {inst.E:g} cannot be met: durations can lower total energy only to {inf_sum:g}"
        )
    # a strictly interior point needs slack; borrow at most half the feasibility tolerance
    budget = max(inst.E, inf_sum + 0.5 * cfg.eps_feas)
    return smooth, pw, const, budget, inf_sum


def _initial_durations(inst: Instance, floors: np.ndarray, budget: float, inf_sum: float) -> np.ndarray:
    funcs = [t.energy for t in inst.tasks]
    variable = [j for j, f in enumerate(funcs) if f.smooth or isinstance(f, PiecewiseLinear)]
    spare = budget - inf_sum
    d = floors.copy()
    for j in variable:
        f = funcs[j]
        d[j] = max(d[j], f.inverse(f.infimum + 0.5 * spare / len(variable)))
    return d * 1.01


def _pw_initial(inst, pw, d, budget, const, smooth):
    used = const + sum(f.value(d[j]) for j, f in enumerate(smooth) if f is not None)
    used += sum(inst.tasks[j].energy.value(d[j]) for j in pw)
    room = budget - used
    return [inst.tasks[j].energy.value(d[j]) + 0.5 * room / len(pw) for j in pw]


class _Rows:
    def __init__(self, nv: int):
        self.nv = nv
        self.G: list = []
        self.h: list = []

    def add(self, coefs: dict, rhs: float):
        row = np.zeros(self.nv)
        for k, v in coefs.items():
            row[k] += v
        self.G.append(row)
        self.h.append(rhs)

    def arrays(self):
        if not self.G:
            return np.zeros((0, self.nv)), np.zeros(0)
        return np.array(self.G), np.array(self.h)


def _solve_timing(
    inst: Instance,
    cfg: SolverConfig,
    lags: Optional[dict] = None,
    relax_x: bool = False,
):
    """Programs 1 and 4 share one structure.

    Variables are ``[mu, t_0..t_{n-1}, d_0..d_{n-1}, x_e.., u_j..]``.  ``lags``
    gives fixed extra waits per edge; with ``relax_x`` every edge with a
    positive delay gets a fractional indicator instead.
    """
    n = inst.n
    smooth, pw, const, budget, inf_sum = _energy_setup(inst, cfg)
    floors = inst.duration_floors()
    xe = [k for k, e in enumerate(inst.edges) if relax_x and e.delay > 0]
    MU, T0, D0, X0 = 0, 1, 1 + n, 1 + 2 * n
    U0 = X0 + len(xe)
    nv = U0 + len(pw)
    xpos = {k: X0 + r for r, k in enumerate(xe)}
    upos = {j: U0 + r for r, j in enumerate(pw)}
    lags = lags or {}

    rows = _Rows(nv)
    for k, e in enumerate(inst.edges):
        i, j = e.src, e.dst
        coefs = {T0 + i: 1.0, D0 + i: 1.0, T0 + j: -1.0}
        if k in xpos:
            coefs[xpos[k]] = -e.delay
            rows.add(coefs, -e.delay)
        else:
            rows.add(coefs, -lags.get((i, j), 0.0))
    for j in range(n):
        rows.add({T0 + j: 1.0, D0 + j: 1.0, MU: -1.0}, 0.0)
    rows.add({**{D0 + j: 1.0 / inst.m for j in range(n)}, MU: -1.0}, 0.0)
    for j in range(n):
        rows.add({T0 + j: -1.0}, 0.0)
        rows.add({D0 + j: -1.0}, -floors[j])
    if xe:
        for i in range(n):
            out = [xpos[k] for k in xe if inst.edges[k].src == i]
            if out:
                rows.add({p: 1.0 for p in out}, 1.0)
            inn = [xpos[k] for k in xe if inst.edges[k].dst == i]
            if inn:
                rows.add({p: 1.0 for p in inn}, 1.0)
        for p in xpos.values():
            rows.add({p: -1.0}, 0.0)
    for j in pw:
        for slope, icpt in inst.tasks[j].energy.epigraph():
            rows.add({D0 + j: slope, upos[j]: -1.0}, -icpt)
    G, h = rows.arrays()

    D = np.zeros((n, nv))
    D[np.arange(n), D0 + np.arange(n)] = 1.0
    a = np.zeros(nv)
    for j in pw:
        a[upos[j]] = 1.0
    has_energy = any(f is not None for f in smooth) or bool(pw)
    c = np.zeros(nv)
    c[MU] = 1.0
    prob = ConvexProblem(c, G, h, D, smooth, a, budget - const, has_energy)

    # strictly feasible start
    d = _initial_durations(inst, floors, budget, inf_sum)
    x = np.zeros(len(xe))
    if xe:
        outdeg = np.zeros(n)
        indeg = np.zeros(n)
        for k in xe:
            outdeg[inst.edges[k].src] += 1
            indeg[inst.edges[k].dst] += 1
        for r, k in enumerate(xe):
            e = inst.edges[k]
            x[r] = 1.0 / (max(outdeg[e.src], indeg[e.dst]) + 1.0)
    gap = 0.01 * float(np.median(d))
    xval = {k: x[r] for r, k in enumerate(xe)}
    t = np.zeros(n)
    for j in inst.order:
        t[j] = gap
        for i in inst.preds[j]:
            k = inst.edge_index[(i, j)]
            if k in xval:
                lag = inst.edges[k].delay * (1.0 - xval[k])
            else:
                lag = lags.get((i, j), 0.0)
            t[j] = max(t[j], t[i] + d[i] + lag + gap)
    mu = max(float(np.max(t + d)), float(np.sum(d)) / inst.m) + gap
    z0 = np.concatenate([[mu], t, d, x, _pw_initial(inst, pw, d, budget, const, smooth) if pw else []])

    res = barrier_solve(prob, z0, cfg)
    z = res.z
    t_out = z[T0:T0 + n]
    d_out = z[D0:D0 + n]
    xs = {}
    for k, e in enumerate(inst.edges):
        xs[(e.src, e.dst)] = float(z[xpos[k]]) if k in xpos else 0.0
    return float(z[MU]), t_out, d_out, xs


def _empty_guard(inst: Instance) -> bool:
    return inst.n == 0


def solve_program1(inst: Instance, cfg: SolverConfig = DEFAULT_CONFIG) -> Program1Solution:
    """Optimal unlimited-processor makespan under the energy budget, ignoring delays.

    Raises
    ------
    InfeasibleEnergy
        If no finite durations meet the budget.
    NonConvergence
        If the barrier method exhausts ``cfg.max_iterations``.
    """
    if _empty_guard(inst):
        return Program1Solution(0.0, [], [])
    mu, t, d, _ = _solve_timing(inst, cfg)
    return Program1Solution(mu, t, d)


def solve_program4_relaxed(inst: Instance, cfg: SolverConfig = DEFAULT_CONFIG) -> Program4Solution:
    """Continuous relaxation of the small-delay program (``0 <= x <= 1``)."""
    if inst.rho is None:
        raise InstanceError("the small-delay program needs rho to be set on the instance")
    if _empty_guard(inst):
        return Program4Solution(0.0, [], [], {})
    mu, t, d, x = _solve_timing(inst, cfg, relax_x=True)
    return Program4Solution(mu, t, d, x)


def solve_program4_fixed(inst: Instance, x: dict, cfg: SolverConfig = DEFAULT_CONFIG) -> Program4Solution:
    """The small-delay program with every indicator pinned to the given value."""
    if _empty_guard(inst):
        return Program4Solution(0.0, [], [], {})
    lags = {(e.src, e.dst): e.delay * (1.0 - x.get((e.src, e.dst), 0.0)) for e in inst.edges}
    mu, t, d, _ = _solve_timing(inst, cfg, lags=lags)
    full = {(e.src, e.dst): float(x.get((e.src, e.dst), 0.0)) for e in inst.edges}
    return Program4Solution(mu, t, d, full)


# -- two processors -------------------------------------------------------


def incomparable_pairs(inst: Instance, order: Sequence[int], tasks: Optional[Sequence[int]] = None):
    """Pairs ``(i, j)`` of incomparable tasks with ``i`` before ``j`` in ``order``."""
    alive = set(range(inst.n)) if tasks is None else set(tasks)
    seq = [j for j in order if j in alive]
    return [
        (i, j)
        for a, i in enumerate(seq)
        for j in seq[a + 1:]
        if not inst.comparable(i, j)
    ]


def solve_program2(
    inst: Instance,
    fixed_d: Sequence[float],
    order: Optional[Sequence[int]] = None,
    tasks: Optional[Sequence[int]] = None,
) -> TwoProcSolution:
    """Pairing LP for fixed durations, restricted to ``tasks`` if given.

    Returns a vertex optimum; entries below ``1e-12`` are snapped to zero and
    each solo time is recomputed so the duration split holds exactly.
    """
    order = tuple(inst.order if order is None else order)
    pos = {j: k for k, j in enumerate(order)}
    for e in inst.edges:
        if pos[e.src] > pos[e.dst]:
            raise ValueError("order is not a linear extension of the precedence graph")
    alive = list(range(inst.n)) if tasks is None else sorted(tasks)
    d = np.zeros(inst.n)
    for j in alive:
        if not fixed_d[j] > 0:
            raise ValueError(f"fixed duration of task {j} must be positive")
        d[j] = float(fixed_d[j])
    pairs = incomparable_pairs(inst, order, alive)
    solo = np.zeros(inst.n)
    if not alive:
        return TwoProcSolution(0.0, d, solo, {}, order)
    if not pairs:
        solo[alive] = d[alive]
        return TwoProcSolution(float(np.sum(d[alive])), d, solo, {}, order)
    ns = len(alive)
    col = {j: k for k, j in enumerate(alive)}
    A = np.zeros((ns, ns + len(pairs)))
    A[np.arange(ns), np.arange(ns)] = 1.0
    for p, (i, j) in enumerate(pairs):
        A[col[i], ns + p] = 1.0
        A[col[j], ns + p] = 1.0
    res = linprog(np.ones(ns + len(pairs)), A_eq=A, b_eq=d[alive], bounds=(0, None), method="highs",
                  options={"primal_feasibility_tolerance": 1e-10, "dual_feasibility_tolerance": 1e-10})
    if res.status != 0:
        raise EmschedError(f"pairing LP failed unexpectedly: {res.message}")
    lp = np.where(res.x[ns:] < 1e-12, 0.0, res.x[ns:])
    ell_pair = {pr: float(v) for pr, v in zip(pairs, lp) if v > 0}
    load = np.zeros(inst.n)
    for (i, j), v in ell_pair.items():
        load[i] += v
        load[j] += v
    for j in alive:
        solo[j] = max(0.0, d[j] - load[j])
    sol = TwoProcSolution(0.0, d, solo, ell_pair, order)
    return TwoProcSolution(sol.objective(), d, solo, ell_pair, order)


def solve_program3(inst: Instance, cfg: SolverConfig = DEFAULT_CONFIG) -> TwoProcSolution:
    """Two-processor pairing program with durations chosen under the budget.

    Variables are solo times, pair times and (for piecewise curves) energy
    epigraph values; durations are the linear image ``d = L @ ell`` so the
    duration split holds identically.
    """
    if inst.m != 2:
        raise InstanceError(f"the two-processor program needs m = 2, got m = {inst.m}")
    order = tuple(inst.order)
    n = inst.n
    if n == 0:
        return TwoProcSolution(0.0, [], [], {}, order)
    smooth, pw, const, budget, inf_sum = _energy_setup(inst, cfg)
    floors = inst.duration_floors()
    pairs = incomparable_pairs(inst, order)
    P = len(pairs)
    S0, P0, U0 = 0, n, n + P
    nv = U0 + len(pw)
    upos = {j: U0 + r for r, j in enumerate(pw)}

    D = np.zeros((n, nv))
    D[np.arange(n), np.arange(n)] = 1.0
    for p, (i, j) in enumerate(pairs):
        D[i, P0 + p] = 1.0
        D[j, P0 + p] = 1.0

    rows = _Rows(nv)
    for k in range(n + P):
        rows.add({k: -1.0}, 0.0)
    G, h = rows.arrays()
    floor_rows = -D
    G = np.vstack([G, floor_rows])
    h = np.concatenate([h, -floors])
    extra_G, extra_h = [], []
    for j in pw:
        for slope, icpt in inst.tasks[j].energy.epigraph():
            row = slope * D[j].copy()
            row[upos[j]] -= 1.0
            extra_G.append(row)
            extra_h.append(-icpt)
    if extra_G:
        G = np.vstack([G, np.array(extra_G)])
        h = np.concatenate([h, extra_h])
    a = np.zeros(nv)
    for j in pw:
        a[upos[j]] = 1.0
    c = np.zeros(nv)
    c[:n + P] = 1.0
    has_energy = any(f is not None for f in smooth) or bool(pw)
    prob = ConvexProblem(c, G, h, D, smooth, a, budget - const, has_energy)

    d = _initial_durations(inst, floors, budget, inf_sum)
    deg = np.zeros(n)
    for i, j in pairs:
        deg[i] += 1
        deg[j] += 1
    share = d / (2.0 * (deg + 1.0))
    lpair = np.array([min(share[i], share[j]) for i, j in pairs])
    load = D[:, P0:P0 + P] @ lpair if P else np.zeros(n)
    lsolo = d - load
    z0 = np.concatenate([lsolo, lpair, _pw_initial(inst, pw, d, budget, const, smooth) if pw else []])

    res = barrier_solve(prob, z0, cfg)
    z = res.z
    ell_pair = {pr: float(z[P0 + p]) for p, pr in enumerate(pairs)}
    ell_solo = z[:n]
    d_out = D @ z
    sol = TwoProcSolution(0.0, d_out, ell_solo, ell_pair, order)
    return TwoProcSolution(sol.objective(), d_out, ell_solo, ell_pair, order)


# -- residuals and serialization --------------------------------------------


def _energy_excess(inst: Instance, d) -> float:
    return max(0.0, inst.energy(d) - inst.E)


def residuals(solution, inst: Instance) -> dict:
    """Largest violation of each constraint family (``0.0`` when satisfied).

    Raises
    ------
    ValueError
        If the solution's vectors do not match the instance size.
    """
    n = inst.n
    if len(solution.d) != n:
        raise ValueError(f"solution has {len(solution.d)} durations for an instance with {n} tasks")
    d = np.asarray(solution.d, dtype=float)
    pos = lambda v: max(0.0, float(v))  # noqa: E731
    if isinstance(solution, TwoProcSolution):
        load = solution.ell_solo.astype(float).copy()
        comparable = 0.0
        negative = pos(-np.min(solution.ell_solo)) if n else 0.0
        for (i, j), v in solution.ell_pair.items():
            load[i] += v
            load[j] += v
            if inst.comparable(i, j):
                comparable = max(comparable, abs(v))
            negative = max(negative, pos(-v))
        return {
            "duration_split": float(np.max(np.abs(load - d))) if n else 0.0,
            "comparable_pairs": comparable,
            "nonnegativity": negative,
            "objective": abs(solution.mu - solution.objective()),
            "energy": _energy_excess(inst, d) if n else 0.0,
            "duration_floor": pos(np.max(inst.duration_floors() - d)) if n else 0.0,
        }
    if len(solution.t) != n:
        raise ValueError(f"solution has {len(solution.t)} start times for an instance with {n} tasks")
    t = np.asarray(solution.t, dtype=float)
    x = getattr(solution, "x", None)
    if x is not None and set(x) != set(inst.delay):
        raise ValueError("solution indicators do not match the instance's edges")
    prec = 0.0
    for e in inst.edges:
        lag = e.delay * (1.0 - x[(e.src, e.dst)]) if x is not None else 0.0
        prec = max(prec, pos(t[e.src] + d[e.src] + lag - t[e.dst]))
    out = {
        "precedence": prec,
        "makespan": pos(np.max(t + d) - solution.mu) if n else 0.0,
        "energy": _energy_excess(inst, d) if n else 0.0,
        "average_load": pos(np.sum(d) / inst.m - solution.mu),
        "nonnegativity": pos(max([-solution.mu] + list(-t) + list(-d))),
        "duration_floor": pos(np.max(inst.duration_floors() - d)) if n else 0.0,
    }
    if x is not None:
        outdeg = np.zeros(n)
        indeg = np.zeros(n)
        xb = 0.0
        for (i, j), v in x.items():
            outdeg[i] += v
            indeg[j] += v
            xb = max(xb, pos(-v), pos(v - 1.0))
        out["out_indicators"] = pos(np.max(outdeg) - 1.0) if n else 0.0
        out["in_indicators"] = pos(np.max(indeg) - 1.0) if n else 0.0
        out["indicator_bounds"] = xb
        rho_need = (inst.rho or 1.0) * inst.c_max
        out["rho_bound"] = pos(rho_need - np.min(d)) if n else 0.0
    return out


def solution_to_dict(solution, inst: Optional[Instance] = None) -> dict:
    out = {"mu": float(solution.mu), "d": [float(v) for v in solution.d]}
    if hasattr(solution, "t"):
        out["t"] = [float(v) for v in solution.t]
    if isinstance(solution, Program4Solution):
        out["x"] = {f"{i}->{j}": v for (i, j), v in sorted(solution.x.items())}
    if isinstance(solution, TwoProcSolution):
        out["ell_solo"] = [float(v) for v in solution.ell_solo]
        out["ell_pair"] = {f"{i},{j}": v for (i, j), v in sorted(solution.ell_pair.items())}
        out["order"] = list(solution.order)
    if inst is not None:
        out["residuals"] = residuals(solution, inst)
    return out


def solution_dumps(solution, inst: Optional[Instance] = None) -> str:
    return json.dumps(solution_to_dict(solution, inst), indent=2)
