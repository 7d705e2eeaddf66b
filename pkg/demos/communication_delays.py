"""Scheduling with communication delays.

Each edge of the pipeline carries a delay paid only when the two tasks run
on different processors.  With every duration at least as long as every
delay (rho = 1) we solve the relaxed placement program, round it at 1/2 and
compress onto two processors.  Treating the same delays as large (R = 2)
gives a different guarantee.  Each line shows the makespan, the lower bound
and the factor the pair is certified against.
"""
from pathlib import Path

from emsched import load_instance, run_algorithm, validate_schedule

HERE = Path(__file__).parent


def main():
    inst = load_instance(HERE / "pipeline.json")
    print("delays: " + ", ".join(f"{e.src}->{e.dst}: {e.delay:g}" for e in inst.edges) + "\n")
    for name in ("small-delay", "small-delay-m", "large-delay"):
        s, cert = run_algorithm(name, inst)
        rep = validate_schedule(inst, s)
        print(f"{name:<14} makespan {s.makespan:7.4f}  bound {cert.lower_bound:7.4f}  "
              f"factor {cert.factor:.3f}  ratio {cert.ratio:.3f}  processors {rep.processors_used}")


if __name__ == "__main__":
    main()
