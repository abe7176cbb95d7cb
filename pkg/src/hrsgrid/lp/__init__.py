from .check import check_solution, dual_objective, duality_gap, reduced_costs
from .lpformat import write_lp
from .program import (EQ, FEAS_TOL, GAP_TOL, GE, INT_TOL, LE, Constraint, LinearProgram,
                      Solution, Status, Variable)
from .solve import solve_lp, solve_milp

__all__ = [
    "EQ", "GE", "LE", "FEAS_TOL", "GAP_TOL", "INT_TOL",
    "Constraint", "LinearProgram", "Solution", "Status", "Variable",
    "check_solution", "dual_objective", "duality_gap", "reduced_costs",
    "solve_lp", "solve_milp", "write_lp",
]
