from .barrier import SolverConfig
from .programs import (
    Program1Solution,
    Program4Solution,
    TwoProcSolution,
    residuals,
    solution_dumps,
    solution_to_dict,
    solve_program1,
    solve_program2,
    solve_program3,
    solve_program4_fixed,
    solve_program4_relaxed,
)
