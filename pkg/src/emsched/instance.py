"""Problem instances: a task DAG with delays, energy curves and a budget."""
from __future__ import annotations

import heapq
import json
import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import Iterable, Optional, Sequence

import numpy as np

from .energy import EnergyFunction, duration_floor, energy_from_dict, shape_violation
from .errors import InstanceError

ARROW = "→"


@dataclass(frozen=True)
class Task:
    id: int
    energy: EnergyFunction
    label: Optional[str] = None

    @property
    def name(self) -> str:
        return self.label if self.label is not None else str(self.id)


@dataclass(frozen=True)
class Edge:
    src: int
    dst: int
    delay: float = 0.0


def _find_cycle(n: int, succs: Sequence[Sequence[int]]) -> list[int] | None:
    color = [0] * n
    parent = [-1] * n
    for root in range(n):
        if color[root]:
            continue
        stack = [(root, iter(succs[root]))]
        color[root] = 1
        while stack:
            u, it = stack[-1]
            v = next(it, None)
            if v is None:
                color[u] = 2
                stack.pop()
            elif color[v] == 0:
                color[v] = 1
                parent[v] = u
                stack.append((v, iter(succs[v])))
            elif color[v] == 1:
                cycle = [u]
                while cycle[-1] != v:
                    cycle.append(parent[cycle[-1]])
                cycle.reverse()
                return cycle + [v]
    return None


@dataclass(frozen=True)
class Instance:
    """Precedence-constrained tasks on ``m`` identical processors.

    Parameters
    ----------
    tasks : sequence of Task
        Ids must be exactly ``0..n-1`` (they are re-sorted by id).
    edges : sequence of Edge
        Precedence ``src -> dst`` with a communication delay paid when the two
        tasks run on different processors.
    m : int
        Processor count.
    E : float
        Global energy budget.
    rho, R : float, optional
        Small-delay (every duration at least ``rho`` times every delay) and
        large-delay (every delay at most ``R`` times every duration) model
        parameters.
    """

    tasks: tuple
    edges: tuple = ()
    m: int = 1
    E: float = 0.0
    rho: Optional[float] = None
    R: Optional[float] = None

    def __post_init__(self):
        tasks = tuple(sorted(self.tasks, key=lambda t: t.id))
        object.__setattr__(self, "tasks", tasks)
        object.__setattr__(self, "edges", tuple(self.edges))
        n = len(tasks)
        if [t.id for t in tasks] != list(range(n)):
            raise InstanceError("task ids must be dense 0..n-1")
        labels = [t.label for t in tasks if t.label is not None]
        if len(set(labels)) != len(labels):
            raise InstanceError("task labels must be unique")
        if not (isinstance(self.m, (int, np.integer)) and self.m >= 1):
            raise InstanceError(f"processor count must be a positive integer, got {self.m!r}")
        if not (self.E >= 0 and math.isfinite(self.E)):
            raise InstanceError(f"energy budget must be finite and >= 0, got {self.E!r}")
        if self.rho is not None and not self.rho >= 1:
            raise InstanceError(f"rho must be >= 1, got {self.rho!r}")
        if self.R is not None and not self.R >= 1:
            raise InstanceError(f"R must be >= 1, got {self.R!r}")
        seen = set()
        for e in self.edges:
            for end in (e.src, e.dst):
                if not (0 <= end < n):
                    raise InstanceError(f"edge {e.src}{ARROW}{e.dst} references unknown task {end}")
            if e.src == e.dst:
                raise InstanceError(f"cycle detected: {e.src}{ARROW}{e.src}")
            if (e.src, e.dst) in seen:
                raise InstanceError(f"duplicate edge {e.src}{ARROW}{e.dst}")
            if not (e.delay >= 0 and math.isfinite(e.delay)):
                raise InstanceError(f"edge {e.src}{ARROW}{e.dst} has invalid delay {e.delay!r}")
            seen.add((e.src, e.dst))
        cycle = _find_cycle(n, self.succs)
        if cycle is not None:
            raise InstanceError("cycle detected: " + ARROW.join(map(str, cycle)))

    # -- graph structure -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.tasks)

    @cached_property
    def succs(self) -> tuple:
        out = [[] for _ in self.tasks]
        for e in self.edges:
            out[e.src].append(e.dst)
        return tuple(tuple(sorted(s)) for s in out)

    @cached_property
    def preds(self) -> tuple:
        out = [[] for _ in self.tasks]
        for e in self.edges:
            out[e.dst].append(e.src)
        return tuple(tuple(sorted(p)) for p in out)

    @cached_property
    def delay(self) -> dict:
        return {(e.src, e.dst): e.delay for e in self.edges}

    @cached_property
    def edge_index(self) -> dict:
        return {(e.src, e.dst): k for k, e in enumerate(self.edges)}

    @cached_property
    def order(self) -> tuple:
        """Linear extension: Kahn's procedure, smallest available id first."""
        indeg = [len(p) for p in self.preds]
        heap = [j for j in range(self.n) if indeg[j] == 0]
        heapq.heapify(heap)
        out = []
        while heap:
            j = heapq.heappop(heap)
            out.append(j)
            for k in self.succs[j]:
                indeg[k] -= 1
                if indeg[k] == 0:
                    heapq.heappush(heap, k)
        return tuple(out)

    @cached_property
    def reach(self) -> np.ndarray:
        """``reach[i, j]`` is true iff there is a directed path from i to j."""
        r = np.zeros((self.n, self.n), dtype=bool)
        for j in reversed(self.order):
            for k in self.succs[j]:
                r[j, k] = True
                r[j] |= r[k]
        r.flags.writeable = False
        return r

    def comparable(self, i: int, j: int) -> bool:
        return bool(self.reach[i, j] or self.reach[j, i])

    @property
    def c_max(self) -> float:
        return max((e.delay for e in self.edges), default=0.0)

    @property
    def has_delays(self) -> bool:
        return any(e.delay > 0 for e in self.edges)

    def sources(self, among: Iterable[int] | None = None) -> list[int]:
        """Tasks with no predecessor inside ``among`` (default: all tasks)."""
        alive = set(range(self.n)) if among is None else set(among)
        return sorted(j for j in alive if not any(i in alive for i in self.preds[j]))

    def duration_floors(self) -> np.ndarray:
        """Per-task lower bound on duration implied by the curves and the delay model."""
        floors = np.array([duration_floor(t.energy) for t in self.tasks], dtype=float)
        cmax = self.c_max
        if self.rho is not None:
            floors = np.maximum(floors, self.rho * cmax)
        if self.R is not None:
            floors = np.maximum(floors, cmax / self.R)
        return floors

    def energy(self, d: Sequence[float]) -> float:
        return float(sum(t.energy.value(float(dj)) for t, dj in zip(self.tasks, d)))

    def longest_path(self, d: Sequence[float], with_delays: bool = False) -> np.ndarray:
        """Earliest start times with unlimited processors (delays on every edge if asked)."""
        t = np.zeros(self.n)
        for j in self.order:
            for i in self.preds[j]:
                lag = self.delay[(i, j)] if with_delays else 0.0
                t[j] = max(t[j], t[i] + d[i] + lag)
        return t

    # -- convenience constructors ----------------------------------------

    def with_budget(self, E: float) -> "Instance":
        return replace(self, E=E)

    def with_delays(self, scale: float) -> "Instance":
        edges = tuple(Edge(e.src, e.dst, e.delay * scale) for e in self.edges)
        return replace(self, edges=edges)

    def to_dict(self) -> dict:
        tasks = []
        for t in self.tasks:
            d = {"id": t.id, "energy": t.energy.to_dict()}
            if t.label is not None:
                d["label"] = t.label
            tasks.append(d)
        return {
            "tasks": tasks,
            "edges": [{"from": e.src, "to": e.dst, "delay": e.delay} for e in self.edges],
            "processors": int(self.m),
            "energy_budget": self.E,
            "rho": self.rho,
            "R": self.R,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def linear_extension(inst: Instance) -> list[int]:
    """Topological order of ``inst``; ties go to the smallest id."""
    return list(inst.order)


def _number(obj: dict, key: str, default=None, required=True):
    if key not in obj or obj[key] is None:
        if required and default is None:
            raise InstanceError(f"missing field {key!r}")
        return default
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InstanceError(f"field {key!r} must be a number, got {v!r}")
    return v


def instance_from_dict(obj: dict) -> Instance:
    if not isinstance(obj, dict):
        raise InstanceError("instance must be a JSON object")
    raw_tasks = obj.get("tasks")
    if not isinstance(raw_tasks, list):
        raise InstanceError("missing field 'tasks'")
    tasks = []
    for rt in raw_tasks:
        if not isinstance(rt, dict) or "id" not in rt or "energy" not in rt:
            raise InstanceError(f"task entry needs 'id' and 'energy': {rt!r}")
        tid = rt["id"]
        if isinstance(tid, bool) or not isinstance(tid, int):
            raise InstanceError(f"task id must be an integer, got {tid!r}")
        f = energy_from_dict(rt["energy"])
        problem = shape_violation(f)
        if problem:
            raise InstanceError(f"task {tid}: {problem}")
        tasks.append(Task(tid, f, rt.get("label")))
    ids = sorted(t.id for t in tasks)
    if ids != list(range(len(tasks))):
        raise InstanceError("task ids must be dense 0..n-1")
    edges = []
    for re_ in obj.get("edges", []) or []:
        if not isinstance(re_, dict) or "from" not in re_ or "to" not in re_:
            raise InstanceError(f"edge entry needs 'from' and 'to': {re_!r}")
        src, dst = re_["from"], re_["to"]
        for end in (src, dst):
            if isinstance(end, bool) or not isinstance(end, int) or not 0 <= end < len(tasks):
                raise InstanceError(f"unknown task {end!r} referenced by edge {src}{ARROW}{dst}")
        edges.append(Edge(src, dst, float(_number(re_, "delay", 0.0, required=False))))
    m = obj.get("processors")
    if isinstance(m, bool) or not isinstance(m, int):
        raise InstanceError(f"field 'processors' must be an integer, got {m!r}")
    E = float(_number(obj, "energy_budget"))
    rho = _number(obj, "rho", required=False)
    R = _number(obj, "R", required=False)
    return Instance(
        tasks=tuple(tasks),
        edges=tuple(edges),
        m=m,
        E=E,
        rho=None if rho is None else float(rho),
        R=None if R is None else float(R),
    )


def parse_instance(text: str) -> Instance:
    """Read an instance from its JSON text.

    Raises
    ------
    InstanceError
        On malformed JSON (with line and column), a cycle, an edge naming an
        unknown task, or an energy table that increases or is not convex.
    """
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(obj)


def load_instance(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return parse_instance(fh.read())
