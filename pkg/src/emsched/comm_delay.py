"""Schedulers for small and large communication delays.

Small delays (every duration at least ``rho`` times every delay) are handled
by rounding the relaxed indicator program at 1/2, which gives a
``beta = (2 + 2 rho) / (1 + 2 rho)`` approximation on unlimited processors,
and ``1 + beta (1 - 1/m)`` after compressing onto ``m`` processors.  Large
delays (every delay at most ``R`` times every duration) are divided by ``R``,
scheduled as small delays with ``rho = 1`` and stretched back, for a factor
of ``2 (R + 1) / 3``.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

from .certificate import BoundCertificate
from .errors import BoundViolated, InstanceError, ScheduleError
from .instance import Edge, Instance
from .schedule import EPS_FEAS, ModelFlags, Schedule, ScheduleSegment, validate_schedule
from .solver import Program4Solution, SolverConfig, solve_program4_relaxed
from .solver.programs import DEFAULT_CONFIG

_NO_PREEMPT = ModelFlags(allow_preemption=False, allow_migration=False, enforce_delays=True)


def beta(rho: float) -> float:
    return (2.0 + 2.0 * rho) / (1.0 + 2.0 * rho)


@dataclass(frozen=True)
class RoundedAssignment:
    xhat: dict  # (i, j) -> 0 or 1

    def __post_init__(self):
        outs, ins = {}, {}
        for (i, j), v in self.xhat.items():
            if v not in (0, 1):
                raise ValueError(f"rounded indicator for {i}->{j} is {v!r}")
            if v:
                if i in outs or j in ins:
                    raise ValueError(f"task {i if i in outs else j} has two rounded indicators set")
                outs[i] = j
                ins[j] = i

    def successor(self, i: int) -> Optional[int]:
        return next((j for (a, j), v in self.xhat.items() if a == i and v), None)

    def predecessor(self, j: int) -> Optional[int]:
        return next((i for (i, b), v in self.xhat.items() if b == j and v), None)


def round_indicators(sol: Program4Solution) -> RoundedAssignment:
    """Set an indicator to 1 exactly when its relaxed value is strictly above 1/2."""
    return RoundedAssignment({k: 1 if v > 0.5 else 0 for k, v in sol.x.items()})


def integral_solution_to_schedule(sol: Program4Solution, inst: Instance) -> Schedule:
    """Turn an integral indicator solution into a schedule.

    Tasks are visited in linear-extension order; a task whose incoming
    indicator is 1 joins its predecessor's processor, any other task opens a
    new one.  Start times and durations are copied.
    """
    if not sol.is_integral():
        raise ValueError("indicator values must all be 0 or 1")
    proc = {}
    nxt = 0
    segs = []
    for j in inst.order:
        via = [i for i in inst.preds[j] if sol.x.get((i, j), 0.0) == 1.0]
        if via:
            proc[j] = proc[via[0]]
        else:
            proc[j] = nxt
            nxt += 1
        t, d = float(sol.t[j]), float(sol.d[j])
        segs.append(ScheduleSegment(j, proc[j], t, t + d))
    return Schedule(tuple(segs), _NO_PREEMPT)


def _require_rho(inst: Instance, rho: Optional[float]) -> Instance:
    if rho is not None:
        inst = replace(inst, rho=float(rho))
    if inst.rho is None:
        raise InstanceError("the small-delay model needs rho")
    return inst


def schedule_to_program4(inst: Instance, s: Schedule) -> Program4Solution:
    """Recover an integral indicator solution from a feasible small-delay schedule.

    ``x_ij = 1`` exactly when ``j`` starts before ``t_i + d_i + c_ij``.
    ``mu`` is the makespan, raised to the average load ``sum(d) / m`` when
    the schedule uses more than ``m`` processors.
    """
    if inst.rho is None or inst.rho < 1:
        raise InstanceError("converting a schedule to indicators needs rho >= 1")
    for j, segs in s.by_task.items():
        if len(segs) > 1:
            raise ScheduleError(f"task {j} is preempted or migrates; indicators need single segments")
    report = validate_schedule(inst, replace(s, flags=_NO_PREEMPT))
    if not report.feasible:
        raise ScheduleError("cannot convert an infeasible schedule: " + "; ".join(d for _, d in report.violations))
    t = [s.start(j) for j in range(inst.n)]
    d = s.durations(inst.n)
    x = {}
    for e in inst.edges:
        i, j = e.src, e.dst
        x[(i, j)] = 1.0 if t[j] < t[i] + d[i] + e.delay else 0.0
    return Program4Solution(max(s.makespan, sum(d) / inst.m), t, d, x)


def rounded_schedule(inst: Instance, sol: Program4Solution) -> Schedule:
    """Place tasks from a relaxed solution after rounding its indicators.

    A task with a rounded-up incoming edge runs on that predecessor's
    processor, otherwise on a fresh one; it starts as soon as every
    predecessor's output can reach it (no wait from a predecessor on the same
    processor).  Durations are the relaxation's.
    """
    xhat = round_indicators(sol)
    proc, finish = {}, {}
    nxt = 0
    segs = []
    for j in inst.order:
        via = xhat.predecessor(j)
        if via is not None:
            proc[j] = proc[via]
        else:
            proc[j] = nxt
            nxt += 1
        start = 0.0
        for i in inst.preds[j]:
            lag = 0.0 if proc[i] == proc[j] else inst.delay[(i, j)]
            start = max(start, finish[i] + lag)
        finish[j] = start + float(sol.d[j])
        segs.append(ScheduleSegment(j, proc[j], start, finish[j]))
    return Schedule(tuple(segs), _NO_PREEMPT)


def small_delay_unlimited(
    inst: Instance,
    cfg: SolverConfig = DEFAULT_CONFIG,
    rho: Optional[float] = None,
    relaxation: Optional[Program4Solution] = None,
) -> tuple[Schedule, BoundCertificate]:
    """Round the relaxed small-delay program onto as many processors as needed.

    Every task starts no later than ``beta`` times its relaxed start, so the
    makespan is at most ``beta`` times the relaxation optimum.
    """
    inst = _require_rho(inst, rho)
    sol = relaxation if relaxation is not None else solve_program4_relaxed(inst, cfg)
    sched = rounded_schedule(inst, sol)
    cert = BoundCertificate("small_delay", sol.mu, beta(inst.rho), sched.makespan)
    return sched, cert


def _chain_parent(inst: Instance, s: Schedule, j: int) -> Optional[int]:
    """Predecessor of ``j`` that ``s`` runs on the same processor without a delay wait."""
    best = None
    for i in inst.preds[j]:
        if s.processor(i) == s.processor(j) and s.start(j) < s.finish(i) + inst.delay[(i, j)]:
            if best is None or s.finish(i) > s.finish(best):
                best = i
    return best


def _greedy_compress(inst: Instance, s: Schedule, m: int, follow_chains: bool) -> Schedule:
    order = sorted(range(inst.n), key=lambda j: (s.start(j), j))
    free = [0.0] * m
    proc, finish = {}, {}
    segs = []
    for j in order:
        def est(p):
            t = free[p]
            for i in inst.preds[j]:
                lag = 0.0 if proc[i] == p else inst.delay[(i, j)]
                t = max(t, finish[i] + lag)
            return t

        parent = _chain_parent(inst, s, j) if follow_chains else None
        if parent is not None:
            p = proc[parent]
            t = est(p)
        else:
            t, p = min((est(q), q) for q in range(m))
        d = s.duration(j)
        proc[j], finish[j] = p, t + d
        free[p] = t + d
        segs.append(ScheduleSegment(j, p, t, t + d))
    return Schedule(tuple(segs), _NO_PREEMPT)


def compression_bound(inst: Instance, s: Schedule, m: int) -> float:
    """``(1/m) * total work + (1 - 1/m) * makespan(s)``."""
    work = sum(s.durations(inst.n))
    return work / m + (1.0 - 1.0 / m) * s.makespan


def compress_to_m(inst: Instance, s: Schedule, m: Optional[int] = None, eps: float = EPS_FEAS) -> Schedule:
    """Fold a delay-feasible schedule onto ``m`` processors keeping every duration.

    Tasks are taken in order of their start in ``s``.  A task that followed a
    predecessor on the same processor without paying its delay stays with
    that predecessor; any other task goes where it can start earliest.  The
    pure earliest-start rule (no chain following) is run as well and the
    shorter result is returned; it must meet the target
    ``(1/m) W + (1 - 1/m) makespan(s)``.

    Raises
    ------
    BoundViolated
        If no construction meets the target.
    """
    m = inst.m if m is None else m
    if m < 1:
        raise ValueError("m must be at least 1")
    if s.processors_used <= m and all(seg.processor < m for seg in s.segments):
        return s
    target = compression_bound(inst, s, m) + eps
    candidates = [_greedy_compress(inst, s, m, follow) for follow in (True, False)]
    best = min(candidates, key=lambda c: c.makespan)
    if best.makespan > target:
        raise BoundViolated(
            f"compression onto {m} processors reached makespan {best.makespan:.9g} above the target {target:.9g}"
        )
    return best


def small_delay_m(
    inst: Instance,
    cfg: SolverConfig = DEFAULT_CONFIG,
    rho: Optional[float] = None,
    m: Optional[int] = None,
    relaxation: Optional[Program4Solution] = None,
) -> tuple[Schedule, BoundCertificate]:
    """Small-delay rounding followed by compression onto ``m`` processors."""
    inst = _require_rho(inst, rho)
    if m is not None and m != inst.m:
        inst = replace(inst, m=int(m))
    wide, cert = small_delay_unlimited(inst, cfg, relaxation=relaxation)
    if wide.processors_used <= inst.m:
        return wide, BoundCertificate("small_delay_m", cert.lower_bound, cert.factor, wide.makespan)
    sched = compress_to_m(inst, wide, inst.m)
    factor = 1.0 + beta(inst.rho) * (1.0 - 1.0 / inst.m)
    return sched, BoundCertificate("small_delay_m", cert.lower_bound, factor, sched.makespan)


def scaled_instance(inst: Instance, R: float) -> Instance:
    """Delays divided by ``R``, treated as small delays with ``rho = 1``."""
    edges = tuple(Edge(e.src, e.dst, e.delay / R) for e in inst.edges)
    return replace(inst, edges=edges, rho=1.0, R=None)


def stretch_delays(inst: Instance, s: Schedule) -> Schedule:
    """Re-time ``s`` under ``inst``'s delays, keeping every processor placement.

    Forward pass in linear-extension order: a task starts once each
    predecessor has finished, plus the delay when the two sit on different
    processors.
    """
    finish = {}
    segs = []
    for j in inst.order:
        p = s.processor(j)
        start = 0.0
        for i in inst.preds[j]:
            lag = 0.0 if s.processor(i) == p else inst.delay[(i, j)]
            start = max(start, finish[i] + lag)
        finish[j] = start + s.duration(j)
        segs.append(ScheduleSegment(j, p, start, finish[j]))
    return Schedule(tuple(segs), _NO_PREEMPT)


def large_delay_schedule(
    inst: Instance,
    cfg: SolverConfig = DEFAULT_CONFIG,
    R: Optional[float] = None,
) -> tuple[Schedule, BoundCertificate]:
    """Schedule with delays up to ``R`` times any duration.

    The certificate's lower bound is the relaxation optimum of the instance
    with delays divided by ``R``.
    """
    R = inst.R if R is None else float(R)
    if R is None:
        raise InstanceError("the large-delay model needs R")
    if R < 1:
        raise InstanceError(f"R must be at least 1, got {R!r}")
    inst = replace(inst, R=R)
    small = scaled_instance(inst, R)
    sigma1, cert1 = small_delay_unlimited(small, cfg)
    sigma2 = stretch_delays(inst, sigma1)
    factor = 2.0 * (R + 1.0) / 3.0
    return sigma2, BoundCertificate("large_delay", cert1.lower_bound, factor, sigma2.makespan)
