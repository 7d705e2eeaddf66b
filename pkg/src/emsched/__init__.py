"""Scheduling precedence-constrained tasks under a global energy budget.

Durations are chosen by convex programs (energy is a convex, non-increasing
function of each task's duration); schedules are then built by list
scheduling, by an exact two-processor construction, or by rounding a
relaxed placement program when communication delays are present.  Each
algorithm returns a certificate tying its makespan to a convex lower bound.
"""
from .algorithms import ALGORITHMS, run_algorithm
from .certificate import BoundCertificate, certificate_from_dict
from .comm_delay import (
    RoundedAssignment,
    beta,
    compress_to_m,
    integral_solution_to_schedule,
    large_delay_schedule,
    round_indicators,
    schedule_to_program4,
    small_delay_m,
    small_delay_unlimited,
)
from .energy import (
    AffineReciprocal,
    Constant,
    PiecewiseLinear,
    PowerLaw,
    evaluate_energy,
    invert_energy,
)
from .errors import (
    BoundViolated,
    BudgetUnachievable,
    EmschedError,
    InfeasibleEnergy,
    InstanceError,
    InstanceTooLarge,
    NonConvergence,
    ScheduleError,
)
from .gantt import render_svg
from .instance import Edge, Instance, Task, linear_extension, load_instance, parse_instance
from .oracle import brute_force_makespan, grid_search_durations
from .schedule import (
    ModelFlags,
    Schedule,
    ScheduleSegment,
    ValidationReport,
    parse_schedule,
    validate_schedule,
)
from .solver import (
    Program1Solution,
    Program4Solution,
    SolverConfig,
    TwoProcSolution,
    residuals,
    solve_program1,
    solve_program2,
    solve_program3,
    solve_program4_relaxed,
)
from .zero_delay import (
    list_schedule,
    next_source_exchange,
    schedule_to_program1,
    two_proc_schedule,
    unlimited_schedule,
)

__version__ = "0.1.0"
