"""Node-capacitated flow-refueling location model (arc-cover formulation).

Every retained trip must be fully refueled (coverage target 100 %), which
turns the per-trip coverage decision into a constant and keeps the capacity
rows linear.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InconsistentInputError, InfeasibleError, ParamError
from .highway import CandidateSet, HighwayNetwork, ODTrip, TripPath
from .lp import EQ, GE, LE, LinearProgram, Status, solve_lp, solve_milp

CAPACITY_TOL = 1e-6


@dataclass(frozen=True)
class FrlmConfig:
    range_km: float
    fuel_per_km: float = 0.066       # kg/km, 6.6 kg per 100 km
    node_capacity: float = 30_000.0  # kg/day
    initial_fuel_km: float | None = None
    coverage_target: float = 1.0

    def __post_init__(self):
        for name in ("range_km", "fuel_per_km", "node_capacity"):
            if not getattr(self, name) > 0:
                raise ParamError(f"{name} must be positive")
        if self.initial_fuel_km is not None and not self.initial_fuel_km > 0:
            raise ParamError("initial_fuel_km must be positive")
        if self.coverage_target != 1.0:
            raise ParamError("only full coverage (coverage_target = 1.0) is supported")

    @property
    def initial_fuel(self):
        return self.range_km if self.initial_fuel_km is None else self.initial_fuel_km


@dataclass
class FrlmModel:
    lp: LinearProgram
    cfg: FrlmConfig
    trips: list[ODTrip]
    paths: dict[str, TripPath]
    candidate_sets: dict[str, list[CandidateSet]]
    z: dict[str, int]                    # node -> variable index
    x: dict[tuple[str, str], int]        # (node, trip) -> variable index
    load_per_unit: dict[tuple[str, str], float]   # kg/day served per unit of x


@dataclass
class SitingSolution:
    stations: tuple[str, ...]
    allocations: dict[tuple[str, str], float]
    node_load: dict[str, float]
    objective: int
    paths: dict[str, TripPath] = field(default_factory=dict, repr=False)
    z: dict[str, float] = field(default_factory=dict, repr=False)


def _serve_per_unit(trip: ODTrip, path: TripPath, cfg: FrlmConfig) -> float:
    # one refuel occasion replenishes d_q / l_q km worth of fuel
    return trip.flow * cfg.fuel_per_km * path.total_distance / path.refuel_occasions


def build_model(paths: dict[str, TripPath], candidate_sets: dict[str, list[CandidateSet]],
                trips, cfg: FrlmConfig, candidates=None) -> FrlmModel:
    """Assemble the siting MILP.

    ``candidates`` restricts where stations may open (a network or an
    iterable of node ids); by default every node on some path qualifies.
    """
    trips = list(trips)
    for t in trips:
        if t.id not in paths:
            raise InconsistentInputError(f"trip {t.id} has no computed path")
        if t.id not in candidate_sets:
            raise InconsistentInputError(f"trip {t.id} has no candidate sets")
        if len(candidate_sets[t.id]) != len(paths[t.id].arcs):
            raise InconsistentInputError(f"trip {t.id}: candidate sets do not match its arcs")

    if candidates is None:
        cand = sorted({n for t in trips for n in paths[t.id].node_sequence})
    elif isinstance(candidates, HighwayNetwork):
        cand = sorted(n.id for n in candidates.nodes if n.is_candidate)
    else:
        cand = sorted(set(candidates))
    cand_set = set(cand)

    lp = LinearProgram("frlm")
    z = {i: lp.add_variable(f"z[{i}]", 0, 1, cost=1.0, integer=True, tag="z", key=(i,))
         for i in cand}
    x, per_unit = {}, {}
    for t in trips:
        path = paths[t.id]
        unit = _serve_per_unit(t, path, cfg)
        for i in path.node_sequence:
            if i in cand_set:
                x[i, t.id] = lp.add_variable(f"x[{i},{t.id}]", 0, 1, tag="x", key=(i, t.id))
                per_unit[i, t.id] = unit

    for t in trips:
        path = paths[t.id]
        for k, cs in enumerate(candidate_sets[t.id]):
            if cs.pre_covered:
                continue
            members = [i for i in cs.members if i in cand_set]
            arc = f"{cs.arc[0]}>{cs.arc[1]}"
            lp.add_constraint(f"cover[{t.id},{arc}]", {z[i]: 1.0 for i in members}, GE, 1.0,
                              tag="cover", key=(t.id, k))
            lp.add_constraint(f"alloc_arc[{t.id},{arc}]", {x[i, t.id]: 1.0 for i in members},
                              EQ, 1.0, tag="alloc_arc", key=(t.id, k))
        on_path = [i for i in path.node_sequence if i in cand_set]
        lp.add_constraint(f"alloc_trip[{t.id}]", {x[i, t.id]: 1.0 for i in on_path}, EQ,
                          float(path.refuel_occasions), tag="alloc_trip", key=(t.id,))

    served_at = {}
    for (i, q), j in x.items():
        served_at.setdefault(i, []).append((j, per_unit[i, q]))
    for i in cand:
        terms = {j: a for j, a in served_at.get(i, [])}
        terms[z[i]] = terms.get(z[i], 0.0) - cfg.node_capacity
        lp.add_constraint(f"capacity[{i}]", terms, LE, 0.0, tag="capacity", key=(i,))
    for (i, q), j in x.items():
        lp.add_constraint(f"link[{i},{q}]", {j: 1.0, z[i]: -1.0}, LE, 0.0, tag="link", key=(i, q))

    return FrlmModel(lp, cfg, trips, dict(paths), dict(candidate_sets), z, x, per_unit)


def solve_siting(model: FrlmModel, method="highs") -> SitingSolution:
    """Minimum station count; raises :class:`InfeasibleError` with a diagnosis."""
    sol = solve_milp(model.lp, method)
    if sol.status != Status.OPTIMAL:
        report = diagnose_infeasibility(model)
        raise InfeasibleError("siting model is infeasible: " + "; ".join(report[:5]),
                              status=sol.status, report=report)
    zval = {i: float(sol.x[j]) for i, j in model.z.items()}
    stations = tuple(sorted(i for i, v in zval.items() if v > 0.5))
    alloc = {k: float(np.clip(sol.x[j], 0.0, 1.0)) for k, j in model.x.items()}
    result = SitingSolution(stations, alloc, {}, int(round(sol.objective)), model.paths, zval)
    result.node_load = station_loads(result, model.trips, model.cfg)
    return result


def station_loads(solution: SitingSolution, trips, cfg: FrlmConfig) -> dict[str, float]:
    """Daily hydrogen served at each open station (kg/day)."""
    load = {i: 0.0 for i in solution.stations}
    by_id = {t.id: t for t in trips}
    for (i, q), v in sorted(solution.allocations.items()):
        if q not in by_id or v == 0.0:
            continue
        path = solution.paths[q]
        load[i] = load.get(i, 0.0) + _serve_per_unit(by_id[q], path, cfg) * v
    return load


def total_fuel(trips, paths, cfg: FrlmConfig) -> float:
    return math.fsum(t.flow * cfg.fuel_per_km * paths[t.id].total_distance for t in trips)


def verify_solution(solution: SitingSolution, model: FrlmModel, tol=CAPACITY_TOL) -> list[str]:
    """Re-check every constraint class of the model against ``solution``."""
    report = []
    z = {i: (1.0 if i in solution.stations else 0.0) for i in model.z}
    x = {k: solution.allocations.get(k, 0.0) for k in model.x}
    for (i, q), v in x.items():
        if v < -tol or v > 1 + tol:
            report.append(f"bounds: x[{i},{q}] = {v:.9g} outside [0, 1]")
        if v > z[i] + tol:
            report.append(f"link: x[{i},{q}] = {v:.9g} at closed node {i}")
    for t in model.trips:
        path = model.paths[t.id]
        for cs in model.candidate_sets[t.id]:
            if cs.pre_covered:
                continue
            members = [i for i in cs.members if i in model.z]
            arc = f"{cs.arc[0]}>{cs.arc[1]}"
            if sum(z[i] for i in members) < 1 - tol:
                report.append(f"coverage: trip {t.id} arc {arc} has no open station in range")
            s = sum(x[i, t.id] for i in members)
            if abs(s - 1.0) > tol:
                report.append(f"arc allocation: trip {t.id} arc {arc} sums to {s:.9g}, expected 1")
        s = sum(x[i, t.id] for i in path.node_sequence if (i, t.id) in x)
        if abs(s - path.refuel_occasions) > tol:
            report.append(f"trip allocation: trip {t.id} sums to {s:.9g}, "
                          f"expected {path.refuel_occasions}")
    load = {i: 0.0 for i in model.z}
    for (i, q), v in x.items():
        load[i] += model.load_per_unit[i, q] * v
    for i, l in load.items():
        if l > model.cfg.node_capacity * z[i] + tol:
            report.append(f"capacity: node {i} serves {l:.9g} kg/day, "
                          f"limit {model.cfg.node_capacity * z[i]:.9g}")
    return report


def diagnose_infeasibility(model: FrlmModel) -> list[str]:
    """Name requirements that cannot be met even with every candidate open.

    Coverage rows over empty sets are reported directly. Otherwise an elastic
    LP with all stations open minimizes total violation of the allocation and
    capacity rows; rows that need slack are reported. Opening every candidate
    is integral, so whenever the MILP is infeasible one of the two applies.
    """
    report = []
    for t in model.trips:
        for cs in model.candidate_sets[t.id]:
            if not cs.pre_covered and not any(i in model.z for i in cs.members):
                report.append(f"coverage: trip {t.id} arc {cs.arc[0]}>{cs.arc[1]} "
                              f"has no candidate station within range")
    if report:
        return report

    lp = model.lp
    el = LinearProgram("frlm_elastic")
    idx = {}
    for j, v in enumerate(lp.variables):
        lo, hi = (1.0, 1.0) if v.tag == "z" else (v.lower, v.upper)
        idx[j] = el.add_variable(v.name, lo, hi)
    for con in lp.constraints:
        if con.tag == "cover":
            continue
        terms = {idx[j]: a for j, a in zip(con.indices, con.coefs)}
        if con.sense in (LE, EQ):
            terms[el.add_variable(f"s-[{con.name}]", cost=1.0)] = -1.0
        if con.sense in (GE, EQ):
            terms[el.add_variable(f"s+[{con.name}]", cost=1.0)] = 1.0
        el.add_constraint(con.name, terms, con.sense, con.rhs)
    sol = solve_lp(el)
    for con in lp.constraints:
        if con.tag == "cover":
            continue
        slack = sum(sol.value(n) for n in (f"s-[{con.name}]", f"s+[{con.name}]")
                    if n in el._var_index)
        if slack > 1e-7:
            report.append(f"{_LABEL[con.tag]}: {con.name} needs {slack:.6g} of slack")
    return report


_LABEL = {"alloc_arc": "arc allocation", "alloc_trip": "trip allocation",
          "capacity": "capacity", "link": "link"}
