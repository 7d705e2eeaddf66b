"""Command-line interface: ``emsched {solve,validate,sweep,oracle,gantt}``.

Exit status is 0 on success, 1 when a schedule is infeasible or a bound is
violated, 2 on usage or input errors and 3 when the solver fails to
converge.  Every error is reported as one line on stderr,
``emsched: <kind>: <message>``.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from typing import Optional, Sequence

import numpy as np

from .algorithms import ALGORITHMS, run_algorithm
from .errors import (
    BoundViolated,
    EmschedError,
    InfeasibleEnergy,
    InstanceTooLarge,
    NonConvergence,
)
from .gantt import render_svg
from .instance import load_instance
from .oracle import MAX_GRID, brute_force_makespan, grid_search_durations
from .schedule import parse_schedule, validate_schedule
from .solver import SolverConfig, solve_program1

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_NONCONVERGENCE = 0, 1, 2, 3


def _config(args) -> SolverConfig:
    if getattr(args, "eps", None) is None:
        return SolverConfig()
    return SolverConfig(eps_opt=args.eps, eps_feas=args.eps)


def _write(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    sched, cert = run_algorithm(args.algorithm, inst, _config(args), rho=args.rho, R=args.R)
    out = sched.to_dict(inst)
    out["certificate"] = cert.to_dict()
    _write(args.output, json.dumps(out, indent=2) + "\n")
    print(f"makespan {sched.makespan:.9g}")
    print(f"energy {sched.energy(inst):.9g}")
    print(f"lower_bound {cert.lower_bound:.9g} factor {cert.factor:.6g}")
    return EXIT_OK


def cmd_validate(args) -> int:
    inst = load_instance(args.instance)
    with open(args.schedule, encoding="utf-8") as fh:
        sched = parse_schedule(fh.read())
    report = validate_schedule(inst, sched, eps_feas=args.eps if args.eps is not None else 1e-6)
    print(report)
    return EXIT_OK if report.feasible else EXIT_INFEASIBLE


def sweep_rows(inst, budgets, algorithm: str = "unlimited", cfg: Optional[SolverConfig] = None,
               rho=None, R=None) -> list[dict]:
    """Solve ``inst`` once per budget; rows come back in budget order."""
    cfg = cfg or SolverConfig()
    rows = []
    for E in budgets:
        sched, cert = run_algorithm(algorithm, inst.with_budget(float(E)), cfg, rho=rho, R=R)
        rows.append({
            "energy_budget": float(E),
            "makespan": sched.makespan,
            "energy_used": sched.energy(inst),
            "lower_bound": cert.lower_bound,
            "certified_factor": cert.factor,
        })
    return rows


def cmd_sweep(args) -> int:
    if args.steps < 1:
        raise argparse.ArgumentTypeError("--steps must be at least 1")
    if not 0 < args.e_min <= args.e_max:
        raise argparse.ArgumentTypeError("need 0 < --e-min <= --e-max")
    inst = load_instance(args.instance)
    space = np.geomspace if args.log else np.linspace
    budgets = space(args.e_min, args.e_max, args.steps)
    rows = sweep_rows(inst, budgets, args.algorithm, _config(args), rho=args.rho, R=args.R)
    fields = ["energy_budget", "makespan", "energy_used", "lower_bound", "certified_factor"]
    if args.output in (None, "-"):
        fh, close = sys.stdout, False
    else:
        fh, close = open(args.output, "w", encoding="utf-8", newline=""), True
    try:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: repr(float(r[k])) for k in fields})
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_oracle(args) -> int:
    inst = load_instance(args.instance)
    if args.fixed_d:
        with open(args.fixed_d, encoding="utf-8") as fh:
            raw = json.load(fh)
        d = raw["durations"] if isinstance(raw, dict) else raw
        d = [float(v) for v in d]
        if len(d) != inst.n:
            raise EmschedError(f"expected {inst.n} durations, got {len(d)}")
        source = "given"
    else:
        d = [float(v) for v in solve_program1(inst, _config(args)).d]
        source = "energy-optimal, unlimited processors"
    print(f"durations ({source}): " + " ".join(f"{v:.9g}" for v in d))
    print(f"optimal makespan, m={inst.m}, with delays: {brute_force_makespan(inst, d, inst.m, True):.9g}")
    if inst.has_delays:
        print(f"optimal makespan, m={inst.m}, without delays: {brute_force_makespan(inst, d, inst.m, False):.9g}")
    if not args.fixed_d and inst.n <= MAX_GRID:
        gd, gv = grid_search_durations(inst, 0.01, "program4" if inst.has_delays else "program1")
        print("grid optimum (step 0.01): " + f"{gv:.9g} at " + " ".join(f"{v:.6g}" for v in gd))
    return EXIT_OK


def cmd_gantt(args) -> int:
    with open(args.schedule, encoding="utf-8") as fh:
        sched = parse_schedule(fh.read())
    inst = load_instance(args.instance) if args.instance else None
    _write(args.output, render_svg(sched, inst))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emsched", description="Energy-constrained DAG scheduling.")
    sub = p.add_subparsers(dest="command", required=True)
    names = list(ALGORITHMS)

    def model_opts(sp):
        sp.add_argument("--rho", type=float, help="small-delay parameter (overrides the instance)")
        sp.add_argument("--R", type=float, help="large-delay parameter (overrides the instance)")
        sp.add_argument("--eps", type=float, help="solver optimality and feasibility tolerance")

    sp = sub.add_parser("solve", help="schedule an instance and write schedule + certificate JSON")
    sp.add_argument("--algorithm", "-a", choices=names, required=True)
    model_opts(sp)
    sp.add_argument("instance")
    sp.add_argument("-o", "--output", help="schedule JSON path (default: stdout)")
    sp.set_defaults(func=cmd_solve)

    sp = sub.add_parser("validate", help="check a schedule against an instance")
    sp.add_argument("instance")
    sp.add_argument("schedule")
    sp.add_argument("--eps", type=float, help="feasibility tolerance (default 1e-6)")
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser("sweep", help="makespan against energy budget, as CSV")
    sp.add_argument("instance")
    sp.add_argument("--e-min", type=float, required=True)
    sp.add_argument("--e-max", type=float, required=True)
    sp.add_argument("--steps", type=int, required=True)
    sp.add_argument("--algorithm", "-a", choices=names, default="unlimited")
    sp.add_argument("--log", action="store_true", help="geometric instead of linear budget grid")
    model_opts(sp)
    sp.add_argument("-o", "--output", help="CSV path (default: stdout)")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("oracle", help="exact makespan by exhaustive search (n <= 8)")
    sp.add_argument("instance")
    sp.add_argument("--fixed-d", help="JSON list of durations (default: energy-optimal ones)")
    sp.add_argument("--eps", type=float)
    sp.set_defaults(func=cmd_oracle)

    sp = sub.add_parser("gantt", help="render a schedule as SVG")
    sp.add_argument("schedule")
    sp.add_argument("--instance", help="instance file, for task labels")
    sp.add_argument("-o", "--output", help="SVG path (default: stdout)")
    sp.set_defaults(func=cmd_gantt)
    return p


def _fail(kind: str, msg: str, code: int) -> int:
    msg = " ".join(str(msg).split())
    print(f"emsched: {kind}: {msg}", file=sys.stderr)
    return code


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NonConvergence as exc:
        return _fail(exc.kind, exc, EXIT_NONCONVERGENCE)
    except (BoundViolated, InfeasibleEnergy) as exc:
        return _fail(exc.kind, exc, EXIT_INFEASIBLE)
    except InstanceTooLarge as exc:
        return _fail(exc.kind, exc, EXIT_USAGE)
    except EmschedError as exc:
        return _fail(exc.kind, exc, EXIT_USAGE)
    except argparse.ArgumentTypeError as exc:
        return _fail("usage", exc, EXIT_USAGE)
    except OSError as exc:
        return _fail("io", f"{exc.filename}: {exc.strerror}", EXIT_USAGE)
    except (ValueError, KeyError, TypeError) as exc:
        return _fail("invalid-input", exc, EXIT_USAGE)


if __name__ == "__main__":
    sys.exit(main())
