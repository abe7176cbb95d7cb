"""Public solving entry points: ``solve_lp`` and ``solve_milp``."""

import heapq
import itertools
import math

import numpy as np

from ..errors import ValidationError
from .highs import solve_highs
from .program import INT_TOL, LinearProgram, Solution, Status
from .simplex import solve_simplex

BACKENDS = {"highs": solve_highs, "simplex": solve_simplex}


def _backend(method):
    try:
        return BACKENDS[method]
    except KeyError:
        raise ValueError(f"unknown LP method {method!r}; choose from {sorted(BACKENDS)}")


def solve_lp(lp: LinearProgram, method="highs") -> Solution:
    """Solve a continuous LP, returning primal values and row duals."""
    if lp.is_mip:
        raise ValidationError("solve_lp got integer variables; use solve_milp")
    return _backend(method)(lp)


def _most_fractional(x, int_idx):
    best, pick = INT_TOL, None
    for j in int_idx:
        frac = abs(x[j] - round(x[j]))
        # strict '>' keeps the lowest index on ties
        if frac > best + 1e-12:
            best, pick = frac, j
    return pick


def solve_milp(lp: LinearProgram, method="highs", max_nodes=200_000) -> Solution:
    """Exact branch-and-bound on the LP relaxation.

    Best-bound node selection (ties broken by creation order), branching on
    the most fractional integer variable with ties to the lowest index.
    Nodes are pruned only when their bound cannot beat the incumbent, so the
    returned optimum has zero gap.
    """
    relax = _backend(method)
    int_idx = [j for j, v in enumerate(lp.variables) if v.integer]
    for j in int_idx:
        v = lp.variables[j]
        if not (math.isfinite(v.lower) and math.isfinite(v.upper)):
            raise ValidationError(f"integer variable {v.name!r} must be bounded")
    lo0, hi0 = lp.bounds()
    lo0[int_idx] = np.ceil(lo0[int_idx] - INT_TOL)
    hi0[int_idx] = np.floor(hi0[int_idx] + INT_TOL)

    counter = itertools.count()
    root = relax(lp, lo0, hi0)
    if root.status == Status.UNBOUNDED:
        return Solution(Status.UNBOUNDED, lp=lp, nodes=1)
    if root.status != Status.OPTIMAL:
        return Solution(root.status, lp=lp, nodes=1, message=root.message)

    heap = [(root.objective, next(counter), lo0, hi0, root)]
    incumbent = None
    nodes = 0
    while heap:
        bound, _, lo, hi, sol = heapq.heappop(heap)
        if incumbent is not None and bound >= incumbent.objective - _prune_tol(incumbent.objective):
            continue
        nodes += 1
        if nodes > max_nodes:
            raise RuntimeError("branch-and-bound node limit reached")
        j = _most_fractional(sol.x, int_idx)
        if j is None:
            x = sol.x.copy()
            x[int_idx] = np.round(x[int_idx])
            incumbent = Solution(Status.OPTIMAL, x, sol.duals, sol.objective, lp)
            continue
        v = sol.x[j]
        for child_lo, child_hi in ((lo, _with(hi, j, math.floor(v))),
                                   (_with(lo, j, math.ceil(v)), hi)):
            child = relax(lp, child_lo, child_hi)
            if child.status != Status.OPTIMAL:
                continue
            if incumbent is not None and child.objective >= incumbent.objective - _prune_tol(incumbent.objective):
                continue
            heapq.heappush(heap, (child.objective, next(counter), child_lo, child_hi, child))

    if incumbent is None:
        return Solution(Status.INFEASIBLE, lp=lp, nodes=nodes)
    incumbent.nodes = nodes
    return incumbent


def _with(arr, j, val):
    out = arr.copy()
    out[j] = val
    return out


def _prune_tol(obj):
    return 1e-9 * max(1.0, abs(obj))
