"""Two processors and no delays: an exact energy-optimal schedule.

The two-processor program pairs up incomparable tasks to run side by side.
Its optimum is attained by a preemptive, migratory schedule built one
source at a time, so the makespan equals the lower bound.  Brute force
over non-preemptive schedules at the same durations shows what allowing
preemption buys.
"""
from pathlib import Path

from emsched import brute_force_makespan, load_instance, solve_program3, two_proc_schedule, validate_schedule

HERE = Path(__file__).parent


def main():
    inst = load_instance(HERE / "pipeline_nodelay.json")
    sol = solve_program3(inst)
    s = two_proc_schedule(inst, solution=sol)
    print(f"program objective : {sol.mu:.6f}")
    print(f"schedule makespan : {s.makespan:.6f}")
    print(f"energy used       : {s.energy(inst):.6f} of {inst.E:g}")
    print(f"feasible          : {validate_schedule(inst, s).feasible}")
    print(f"best non-preemptive at these durations: {brute_force_makespan(inst, sol.d, 2, False):.6f}\n")
    for seg in s.segments:
        print(f"  P{seg.processor}  {inst.tasks[seg.task].name:<7} [{seg.start:7.4f}, {seg.end:7.4f})")


if __name__ == "__main__":
    main()
