"""Dense two-phase primal simplex with Bland's rule.

Small and slow, but entirely self-contained: it shares no code with the
HiGHS backend, which makes it usable as an independent cross-check on
desk-sized programs.
"""

import math

import numpy as np

from .program import EQ, GE, LE, LinearProgram, Solution, Status

_EPS = 1e-10


def _standard_form(lp, lo, hi):
    """Map ``lp`` to ``min c.y  s.t.  M y = r, y >= 0``.

    Returns the data plus the recipe to map ``y`` back to ``x`` and standard
    duals back to the original rows.
    """
    n = lp.n_vars
    cols = []          # (orig var, multiplier) for each structural column
    offset = np.zeros(n)
    extra_rows = []    # x' <= ub - lb rows for doubly bounded variables
    for j in range(n):
        l, u = lo[j], hi[j]
        if math.isfinite(l):
            offset[j] = l
            cols.append((j, 1.0))
            if math.isfinite(u):
                extra_rows.append((len(cols) - 1, u - l))
        elif math.isfinite(u):
            offset[j] = u
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))

    A = lp.matrix().toarray()
    b = lp.rhs() - A @ offset
    senses = lp.senses()
    m0 = lp.n_rows
    m = m0 + len(extra_rows)
    n_struct = len(cols)
    n_slack = sum(1 for s in senses if s != EQ) + len(extra_rows)
    M = np.zeros((m, n_struct + n_slack))
    r = np.zeros(m)
    for k, (j, mult) in enumerate(cols):
        M[:m0, k] = A[:, j] * mult
    s = n_struct
    for i, sense in enumerate(senses):
        if sense == LE:
            M[i, s] = 1.0
            s += 1
        elif sense == GE:
            M[i, s] = -1.0
            s += 1
    r[:m0] = b
    for e, (k, cap) in enumerate(extra_rows):
        M[m0 + e, k] = 1.0
        M[m0 + e, s] = 1.0
        r[m0 + e] = cap
        s += 1
    c_std = np.zeros(M.shape[1])
    cost = lp.c()
    for k, (j, mult) in enumerate(cols):
        c_std[k] = cost[j] * mult
    flip = np.where(r < 0, -1.0, 1.0)
    M *= flip[:, None]
    r *= flip
    return M, r, c_std, cols, offset, flip, m0


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i] -= T[i, col] * T[row]
    basis[row] = col


def _run(T, basis, n_cols, max_iter):
    """Minimize the objective held in the last row of tableau ``T``."""
    for _ in range(max_iter):
        red = T[-1, :n_cols]
        entering = next((j for j in range(n_cols) if red[j] < -_EPS * 10), None)
        if entering is None:
            return "optimal"
        col = T[:-1, entering]
        best, leave = math.inf, None
        for i in range(len(col)):
            if col[i] > _EPS:
                ratio = T[i, -1] / col[i]
                if ratio < best - 1e-12 or (abs(ratio - best) <= 1e-12 and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(T, basis, leave, entering)
    raise RuntimeError("simplex iteration limit reached")


def solve_simplex(lp: LinearProgram, lower=None, upper=None, max_iter=50_000) -> Solution:
    lo, hi = lp.bounds()
    if lower is not None:
        lo = lower
    if upper is not None:
        hi = upper
    M, r, c_std, cols, offset, flip, m0 = _standard_form(lp, lo, hi)
    m, n = M.shape

    # Phase 1 tableau: [M | I | r] with artificial basis.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = M
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = r
    T[-1, :n] = -M.sum(axis=0)
    T[-1, -1] = -r.sum()
    basis = list(range(n, n + m))
    _run(T, basis, n + m, max_iter)
    if -T[-1, -1] > 1e-7 * max(1.0, np.abs(r).max(initial=0.0)):
        return Solution(Status.INFEASIBLE, lp=lp)

    # Drive artificials out of the basis; rows where that fails are redundant.
    keep = []
    for i in range(m):
        if basis[i] >= n:
            cand = next((j for j in range(n) if abs(T[i, j]) > 1e-9), None)
            if cand is None:
                continue
            _pivot(T, basis, i, cand)
        keep.append(i)
    keep_set = set(keep)
    rows = [i for i in range(m) if i in keep_set]

    T2 = np.zeros((len(rows) + 1, n + 1))
    T2[:-1, :n] = T[rows, :n]
    T2[:-1, -1] = T[rows, -1]
    basis2 = [basis[i] for i in rows]
    T2[-1, :n] = c_std
    for i, bcol in enumerate(basis2):
        if T2[-1, bcol] != 0.0:
            T2[-1] -= T2[-1, bcol] * T2[i]
    outcome = _run(T2, basis2, n, max_iter)
    if outcome == "unbounded":
        return Solution(Status.UNBOUNDED, lp=lp)

    y = np.zeros(n)
    for i, bcol in enumerate(basis2):
        y[bcol] = T2[i, -1]
    x = offset.copy()
    for k, (j, mult) in enumerate(cols):
        x[j] += mult * y[k]

    # Duals of the standard rows: solve B^T w = c_B on the retained rows.
    B = M[np.ix_(rows, basis2)]
    w = np.linalg.solve(B.T, c_std[basis2]) if rows else np.zeros(0)
    std_duals = np.zeros(m)
    std_duals[rows] = w
    duals = (std_duals * flip)[:m0]
    obj = float(lp.c() @ x)
    return Solution(Status.OPTIMAL, x, duals, obj, lp)
