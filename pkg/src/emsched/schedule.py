"""Schedules and the feasibility validator."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

from .energy import D_MIN
from .errors import ScheduleError
from .instance import ARROW, Instance

EPS_FEAS = 1e-6


@dataclass(frozen=True)
class ScheduleSegment:
    task: int
    processor: int
    start: float
    end: float

    @property
    def length(self) -> float:
        return self.end - self.start


@dataclass(frozen=True)
class ModelFlags:
    allow_preemption: bool = False
    allow_migration: bool = False
    enforce_delays: bool = True


@dataclass(frozen=True)
class Schedule:
    segments: tuple = ()
    flags: ModelFlags = field(default_factory=ModelFlags)

    def __post_init__(self):
        segs = tuple(sorted(self.segments, key=lambda s: (s.start, s.processor, s.task)))
        object.__setattr__(self, "segments", segs)
        for s in segs:
            if not s.end > s.start:
                raise ScheduleError(f"segment of task {s.task} has non-positive length [{s.start}, {s.end}]")
            if s.processor < 0:
                raise ScheduleError(f"segment of task {s.task} has negative processor index")

    @property
    def makespan(self) -> float:
        return max((s.end for s in self.segments), default=0.0)

    @cached_property
    def by_task(self) -> dict:
        out = defaultdict(list)
        for s in self.segments:
            out[s.task].append(s)
        return dict(out)

    def duration(self, j: int) -> float:
        return sum(s.length for s in self.by_task.get(j, ()))

    def durations(self, n: int) -> list[float]:
        return [self.duration(j) for j in range(n)]

    def start(self, j: int) -> float:
        return min(s.start for s in self.by_task[j])

    def finish(self, j: int) -> float:
        return max(s.end for s in self.by_task[j])

    def processor(self, j: int) -> int:
        """Processor of a non-migratory task (that of its first segment)."""
        return self.by_task[j][0].processor

    @property
    def processors_used(self) -> int:
        return len({s.processor for s in self.segments})

    def energy(self, inst: Instance) -> float:
        return sum(inst.tasks[j].energy.value(self.duration(j)) for j in self.by_task)

    def to_dict(self, inst: Optional[Instance] = None) -> dict:
        out = {
            "segments": [
                {"task": s.task, "processor": s.processor, "start": s.start, "end": s.end}
                for s in self.segments
            ],
            "flags": {
                "preemption": self.flags.allow_preemption,
                "migration": self.flags.allow_migration,
                "delays": self.flags.enforce_delays,
            },
            "makespan": self.makespan,
        }
        if inst is not None:
            out["energy"] = self.energy(inst)
        return out

    def dumps(self, inst: Optional[Instance] = None) -> str:
        return json.dumps(self.to_dict(inst), indent=2)


def schedule_from_dict(obj: dict) -> Schedule:
    """Build a schedule from its JSON form; stored makespan/energy are ignored."""
    try:
        segs = tuple(
            ScheduleSegment(int(s["task"]), int(s["processor"]), float(s["start"]), float(s["end"]))
            for s in obj["segments"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScheduleError(f"malformed schedule segment: {exc}") from None
    fl = obj.get("flags", {}) or {}
    flags = ModelFlags(
        allow_preemption=bool(fl.get("preemption", False)),
        allow_migration=bool(fl.get("migration", False)),
        enforce_delays=bool(fl.get("delays", True)),
    )
    return Schedule(segs, flags)


def parse_schedule(text: str) -> Schedule:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScheduleError(f"syntax error at line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return schedule_from_dict(obj)


@dataclass(frozen=True)
class ValidationReport:
    feasible: bool
    makespan: float
    total_energy: float
    violations: tuple = ()
    processors_used: int = 0

    def tags(self) -> set:
        return {tag for tag, _ in self.violations}

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "makespan": self.makespan,
            "total_energy": self.total_energy,
            "processors_used": self.processors_used,
            "violations": [{"constraint": t, "description": d} for t, d in self.violations],
        }

    def __str__(self) -> str:
        lines = [
            f"feasible: {'yes' if self.feasible else 'no'}",
            f"makespan: {self.makespan:.9g}",
            f"total_energy: {self.total_energy:.9g}",
            f"processors_used: {self.processors_used}",
        ]
        lines += [f"violation [{t}]: {d}" for t, d in self.violations]
        return "\n".join(lines)


def validate_schedule(inst: Instance, s: Schedule, eps_feas: float = EPS_FEAS) -> ValidationReport:
    """Check ``s`` against every constraint of the scheduling problem.

    Violation tags are ``precedence``, ``co-occurrence``, ``energy``,
    ``delay`` and ``rho-bound``, plus ``coverage`` (a task never runs),
    ``model`` (preemption or migration the flags forbid) and ``duration``
    (a task shorter than the minimum duration).  Time comparisons allow a
    round-off slack of ``1e-9 * max(1, makespan)``.
    """
    for seg in s.segments:
        if not 0 <= seg.task < inst.n:
            raise ScheduleError(f"segment references unknown task {seg.task}")
    makespan = s.makespan
    tol = 1e-9 * max(1.0, makespan)
    v = []
    by_task = s.by_task
    d = {j: s.duration(j) for j in by_task}

    for j in range(inst.n):
        if j not in by_task:
            v.append(("coverage", f"task {j} is never scheduled"))
    for j, segs in by_task.items():
        if not s.flags.allow_preemption and len(segs) > 1:
            v.append(("model", f"task {j} is preempted ({len(segs)} segments)"))
        if not s.flags.allow_migration and len({g.processor for g in segs}) > 1:
            v.append(("model", f"task {j} migrates between processors"))
        if d[j] < D_MIN * (1 - 1e-9):
            v.append(("duration", f"task {j} runs {d[j]:g} < minimum duration {D_MIN:g}"))
    for seg in s.segments:
        if seg.start < -tol:
            v.append(("model", f"task {seg.task} starts at negative time {seg.start:g}"))

    # (a) precedence and (f) communication delay
    for e in inst.edges:
        i, j = e.src, e.dst
        if i not in by_task or j not in by_task:
            continue
        fin_i = s.finish(i)
        last_i = max(by_task[i], key=lambda g: g.end)
        for seg in by_task[j]:
            if seg.start < fin_i - tol:
                v.append((
                    "precedence",
                    f"task {j} starts at {seg.start:g} before predecessor {i} ends at {fin_i:g}",
                ))
                break
            if (
                s.flags.enforce_delays
                and e.delay > 0
                and seg.processor != last_i.processor
                and seg.start < fin_i + e.delay - tol
            ):
                v.append((
                    "delay",
                    f"edge {i}{ARROW}{j} crosses processors {last_i.processor}->{seg.processor}: "
                    f"start {seg.start:g} < {fin_i:g} + {e.delay:g}",
                ))
                break

    # (b) one task per processor at a time; open intervals
    per_proc = defaultdict(list)
    for seg in s.segments:
        per_proc[seg.processor].append(seg)
    for p, segs in sorted(per_proc.items()):
        segs.sort(key=lambda g: (g.start, g.end))
        busy_until, owner = -float("inf"), None
        for g in segs:
            if g.start < busy_until - tol:
                v.append((
                    "co-occurrence",
                    f"tasks {owner} and {g.task} overlap on processor {p} at {g.start:g}",
                ))
            if g.end > busy_until:
                busy_until, owner = g.end, g.task

    # (d) energy budget
    total_energy = 0.0
    for j, dj in d.items():
        total_energy += inst.tasks[j].energy.value(dj) if dj > 0 else float("inf")
    if total_energy > inst.E + eps_feas:
        v.append(("energy", f"total energy {total_energy:.9g} exceeds budget {inst.E:.9g}"))

    # small/large delay model
    cmax = inst.c_max
    if cmax > 0 and (inst.rho is not None or inst.R is not None):
        need = max(
            inst.rho * cmax if inst.rho is not None else 0.0,
            cmax / inst.R if inst.R is not None else 0.0,
        )
        for j, dj in sorted(d.items()):
            if dj < need - tol:
                v.append(("rho-bound", f"task {j} duration {dj:g} < required {need:g}"))

    return ValidationReport(
        feasible=not v,
        makespan=makespan,
        total_energy=total_energy,
        violations=tuple(v),
        processors_used=s.processors_used,
    )
