"""LP backend on top of the HiGHS dual simplex shipped with scipy."""

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .program import EQ, GE, LE, LinearProgram, Solution, Status

_STATUS = {0: Status.OPTIMAL, 2: Status.INFEASIBLE, 3: Status.UNBOUNDED}


def solve_highs(lp: LinearProgram, lower=None, upper=None) -> Solution:
    """Solve the continuous relaxation of ``lp``.

    ``lower``/``upper`` override the variable bounds without copying the
    program (used by branch-and-bound).
    """
    c = lp.c()
    lo, hi = lp.bounds()
    if lower is not None:
        lo = lower
    if upper is not None:
        hi = upper
    n = lp.n_vars
    if n == 0:
        bad = [con.name for con in lp.constraints if not _trivially_ok(con)]
        st = Status.INFEASIBLE if bad else Status.OPTIMAL
        duals = np.zeros(lp.n_rows)
        return Solution(st, np.zeros(0), duals if st == Status.OPTIMAL else None,
                        0.0 if st == Status.OPTIMAL else None, lp)

    A = lp.matrix()
    b = lp.rhs()
    senses = np.array(lp.senses())
    le = np.flatnonzero(senses == LE)
    ge = np.flatnonzero(senses == GE)
    eq = np.flatnonzero(senses == EQ)
    ub_rows = np.concatenate([le, ge])
    sign = np.concatenate([np.ones(len(le)), -np.ones(len(ge))])
    A_ub = sp.diags(sign) @ A[ub_rows] if len(ub_rows) else None
    b_ub = sign * b[ub_rows] if len(ub_rows) else None
    A_eq = A[eq] if len(eq) else None
    b_eq = b[eq] if len(eq) else None

    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                  bounds=np.column_stack([lo, hi]), method="highs-ds",
                  options={"presolve": True, "primal_feasibility_tolerance": 1e-9,
                           "dual_feasibility_tolerance": 1e-9})
    status = _STATUS.get(res.status, Status.ERROR)
    if status != Status.OPTIMAL:
        return Solution(status, None, None, None, lp, message=res.message)

    duals = np.zeros(lp.n_rows)
    if len(ub_rows):
        duals[ub_rows] = sign * res.ineqlin.marginals
    if len(eq):
        duals[eq] = res.eqlin.marginals
    x = np.asarray(res.x, dtype=float)
    return Solution(status, x, duals, float(c @ x), lp, message=res.message)


def _trivially_ok(con):
    if con.sense == LE:
        return 0.0 <= con.rhs
    if con.sense == GE:
        return 0.0 >= con.rhs
    return con.rhs == 0.0
