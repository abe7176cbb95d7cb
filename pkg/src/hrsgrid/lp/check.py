"""Independent re-verification of solver output."""

import math

import numpy as np

from .program import FEAS_TOL, GAP_TOL, GE, INT_TOL, LE, LinearProgram, Solution


def reduced_costs(lp: LinearProgram, duals) -> np.ndarray:
    return lp.c() - lp.matrix().T @ np.asarray(duals, dtype=float)


def dual_objective(lp: LinearProgram, duals, tol=1e-9) -> float:
    """Lagrangian dual value ``b.y + sum(bound * reduced cost)``.

    Reduced costs below ``tol`` (scaled by the cost magnitude) are treated as
    zero; a significant reduced cost against an infinite bound makes the
    dual unbounded and returns -inf.
    """
    y = np.asarray(duals, dtype=float)
    r = reduced_costs(lp, y)
    lo, hi = lp.bounds()
    scale = max(1.0, float(np.abs(lp.c()).max(initial=0.0)))
    total = float(lp.rhs() @ y)
    for j, rj in enumerate(r):
        if abs(rj) <= tol * scale:
            continue
        bound = lo[j] if rj > 0 else hi[j]
        if not math.isfinite(bound):
            return -math.inf
        total += bound * rj
    return total


def row_activity(lp: LinearProgram, x) -> np.ndarray:
    return lp.matrix() @ np.asarray(x, dtype=float)


def check_solution(lp: LinearProgram, sol: Solution, feas_tol=FEAS_TOL, gap_tol=GAP_TOL) -> list[str]:
    """Return a list of human-readable problems; empty means the solution checks out.

    Primal feasibility is checked for every program (absolute ``feas_tol``,
    scaled by the row's magnitude). For continuous programs with duals the
    report also covers dual sign feasibility, complementary slackness and
    the primal/dual objective gap, all relative to ``max(1, |objective|)``.
    """
    report = []
    x = np.asarray(sol.x, dtype=float)
    lo, hi = lp.bounds()
    for j, v in enumerate(lp.variables):
        if x[j] < lo[j] - feas_tol * max(1.0, abs(lo[j])):
            report.append(f"bound: {v.name} = {x[j]:.9g} below lower {lo[j]:.9g}")
        if x[j] > hi[j] + feas_tol * max(1.0, abs(hi[j])):
            report.append(f"bound: {v.name} = {x[j]:.9g} above upper {hi[j]:.9g}")
        if v.integer and abs(x[j] - round(x[j])) > INT_TOL:
            report.append(f"integrality: {v.name} = {x[j]:.9g}")
    act = row_activity(lp, x)
    for i, con in enumerate(lp.constraints):
        tol = feas_tol * max(1.0, abs(con.rhs))
        viol = _violation(con.sense, act[i], con.rhs)
        if viol > tol:
            report.append(f"feasibility: {con.name} violated by {viol:.3g}")

    obj = float(lp.c() @ x)
    if sol.objective is not None and abs(obj - sol.objective) > gap_tol * max(1.0, abs(obj)):
        report.append(f"objective: reported {sol.objective!r} but c.x = {obj!r}")

    if lp.is_mip or sol.duals is None:
        return report

    y = np.asarray(sol.duals, dtype=float)
    scale = max(1.0, abs(obj))
    cs_total = 0.0
    for i, con in enumerate(lp.constraints):
        yi = y[i]
        if con.sense == GE and yi < -gap_tol * scale:
            report.append(f"dual sign: {con.name} (>=) has dual {yi:.9g} < 0")
        if con.sense == LE and yi > gap_tol * scale:
            report.append(f"dual sign: {con.name} (<=) has dual {yi:.9g} > 0")
        cs_total += abs(yi * (act[i] - con.rhs))
    r = reduced_costs(lp, y)
    cscale = max(1.0, float(np.abs(lp.c()).max(initial=0.0)))
    for j, v in enumerate(lp.variables):
        rj = r[j]
        if abs(rj) <= 1e-9 * cscale:
            continue
        bound = lo[j] if rj > 0 else hi[j]
        if not math.isfinite(bound):
            report.append(f"dual feasibility: {v.name} has reduced cost {rj:.9g} "
                          f"against an infinite bound")
            continue
        cs_total += abs(rj * (x[j] - bound))
    if cs_total > gap_tol * scale:
        report.append(f"complementary slackness: total violation {cs_total:.3g} "
                      f"(relative {cs_total / scale:.3g})")
    dobj = dual_objective(lp, y)
    gap = abs(obj - dobj) / scale
    if not gap <= gap_tol:
        report.append(f"duality gap: primal {obj!r} vs dual {dobj!r} (relative {gap:.3g})")
    return report


def duality_gap(lp: LinearProgram, sol: Solution) -> float:
    obj = float(lp.c() @ sol.x)
    return abs(obj - dual_objective(lp, sol.duals)) / max(1.0, abs(obj))


def _violation(sense, act, rhs):
    if sense == LE:
        return act - rhs
    if sense == GE:
        return rhs - act
    return abs(act - rhs)
