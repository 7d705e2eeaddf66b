"""One entry point per scheduling algorithm, each returning a checked certificate."""
from __future__ import annotations

from dataclasses import replace
from typing import Callable, Optional

from .certificate import BoundCertificate
from .comm_delay import large_delay_schedule, small_delay_m, small_delay_unlimited
from .errors import BoundViolated, InstanceError
from .instance import Instance
from .schedule import Schedule
from .solver import SolverConfig, solve_program1, solve_program3
from .solver.programs import DEFAULT_CONFIG
from .zero_delay import list_schedule, two_proc_schedule, unlimited_schedule


def _unlimited(inst, cfg):
    sol = solve_program1(inst, cfg)
    s = unlimited_schedule(sol)
    return s, BoundCertificate("unlimited", sol.mu, 1.0, s.makespan)


def _list(inst, cfg):
    sol = solve_program1(inst, cfg)
    s = list_schedule(inst, sol)
    return s, BoundCertificate("list", sol.mu, 2.0 - 1.0 / inst.m, s.makespan)


def _two_proc(inst, cfg):
    sol = solve_program3(inst, cfg)
    s = two_proc_schedule(inst, cfg, solution=sol)
    tol = max(cfg.eps_feas, cfg.eps_opt) * max(1, inst.n) * max(1.0, sol.mu)
    return s, BoundCertificate("two_proc", sol.mu, 1.0, s.makespan, tolerance=tol)


ALGORITHMS: dict[str, Callable] = {
    "unlimited": _unlimited,
    "list": _list,
    "two-proc": _two_proc,
    "small-delay": lambda inst, cfg: small_delay_unlimited(inst, cfg),
    "small-delay-m": lambda inst, cfg: small_delay_m(inst, cfg),
    "large-delay": lambda inst, cfg: large_delay_schedule(inst, cfg),
}


def run_algorithm(
    name: str,
    inst: Instance,
    cfg: SolverConfig = DEFAULT_CONFIG,
    rho: Optional[float] = None,
    R: Optional[float] = None,
) -> tuple[Schedule, BoundCertificate]:
    """Run the named algorithm and check its certificate.

    ``rho`` and ``R`` override the instance's own model parameters.

    Raises
    ------
    InstanceError
        For an unknown algorithm name or a missing model parameter.
    BoundViolated
        If the makespan exceeds the certified factor times the lower bound.
    """
    if name not in ALGORITHMS:
        raise InstanceError(f"unknown algorithm {name!r}; choose from {', '.join(ALGORITHMS)}")
    if rho is not None:
        inst = replace(inst, rho=float(rho))
    if R is not None:
        inst = replace(inst, R=float(R))
    sched, cert = ALGORITHMS[name](inst, cfg)
    if not cert.holds:
        raise BoundViolated(
            f"{cert.algorithm}: makespan {cert.achieved:.9g} exceeds "
            f"{cert.factor:.6g} x lower bound {cert.lower_bound:.9g}"
        )
    return sched, cert
