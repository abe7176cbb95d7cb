"""Attach refueling stations to the grid, size them locally, and embed them
in the expansion model under either integration scenario.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .catalog import (MAX_STORE_MWH, HrsDemandProfile, HrsSite, ProfileParams, demand_series,
                      kg_to_mwh, synth_profile)
from .errors import EmptySystemError, InfeasibleError, MissingDesignsError, ParamError
from .highway import GeoNode, haversine_distance
from .lp import EQ, LE, LinearProgram, Status, solve_lp
from .power.components import HydrogenStation, PowerSystem, annuity
from .power.expansion import SolvedCase, solve_expansion


HOURS_PER_YEAR = 8760.0


class ScenarioMode(enum.IntEnum):
    OPERATIONAL_ONLY = 1
    INVESTMENT_AND_OPERATIONAL = 2


@dataclass(frozen=True)
class StationCosts:
    efficiency: float = 0.68
    electrolyzer_capex: float = 510.0     # euro/kW_el
    electrolyzer_fom_pct: float = 4.0
    electrolyzer_lifetime: float = 20
    store_capex: float = 19.0             # euro/kWh
    store_fom_pct: float = 0.0
    store_lifetime: float = 20
    store_max: float = MAX_STORE_MWH      # MWh
    connection_per_mw_km: float = 400.0   # euro/MW/km
    connection_fom_pct: float = 2.0
    connection_lifetime: float = 40
    vom: float = 0.0
    discount_rate: float = 0.07

    def electrolyzer_annuity(self):
        return annuity(self.electrolyzer_capex * 1000.0, self.discount_rate,
                       self.electrolyzer_lifetime, self.electrolyzer_fom_pct)

    def store_annuity(self):
        return annuity(self.store_capex * 1000.0, self.discount_rate, self.store_lifetime,
                       self.store_fom_pct)

    def connection_annuity(self, distance_km):
        return annuity(distance_km * self.connection_per_mw_km, self.discount_rate,
                       self.connection_lifetime, self.connection_fom_pct)


@dataclass(frozen=True)
class GridAttachment:
    station_id: str
    bus_id: str
    distance_km: float
    connection_cost: float        # euro/MW_el (not annualized)


@dataclass(frozen=True)
class HrsNodeDesign:
    station_id: str
    bus_id: str
    electrolyzer_power: float     # MW_el
    lp_storage_energy: float      # MWh_H2
    capex: float                  # euro/a, electrolyzer + store + connection


@dataclass(frozen=True)
class ScenarioSpec:
    mode: ScenarioMode = ScenarioMode.INVESTMENT_AND_OPERATIONAL
    costs: StationCosts = field(default_factory=StationCosts)
    profile: ProfileParams = field(default_factory=ProfileParams)
    profile_hours_per_snapshot: float = 2.0

    def __post_init__(self):
        object.__setattr__(self, "mode", ScenarioMode(int(self.mode)))


def attach_stations(sites, sys: PowerSystem, cost_per_mw_km=400.0) -> list[GridAttachment]:
    """Nearest bus by great-circle distance; ties go to the smallest bus id."""
    if not sys.buses:
        raise EmptySystemError("power system has no buses")
    buses = sorted(sys.buses, key=lambda b: b.id)
    out = []
    for s in sites:
        here = GeoNode(s.id, s.lat, s.lon)
        best = None
        for b in buses:
            d = haversine_distance(here, GeoNode(b.id, b.lat, b.lon))
            if best is None or d < best[0]:
                best = (d, b.id)
        out.append(GridAttachment(s.id, best[1], best[0], best[0] * cost_per_mw_km))
    return out


def station_profile(spec: ScenarioSpec, snapshots: int) -> HrsDemandProfile:
    return synth_profile(spec.profile, snapshots, spec.profile_hours_per_snapshot)


def station_demand_mwh(site: HrsSite, profile: HrsDemandProfile, weights) -> np.ndarray:
    """Hydrogen demand per snapshot (MWh), scaled to the modelled share of a year."""
    share = float(np.sum(weights)) / HOURS_PER_YEAR
    return kg_to_mwh(demand_series(site, profile)) * share


def _station_lp(demand_mwh, weights, costs: StationCosts, conn_annuity, objective="capex"):
    T = len(demand_mwh)
    lp = LinearProgram("local_sizing")
    p_cost = costs.electrolyzer_annuity() + conn_annuity if objective == "capex" else 1.0
    e_cost = costs.store_annuity() if objective == "capex" else 0.0
    P = lp.add_variable("P", cost=p_cost)
    E = lp.add_variable("E", 0.0, costs.store_max, cost=e_cost)
    prod = [lp.add_variable(f"p[{t}]") for t in range(T)]
    soc = [lp.add_variable(f"soc[{t}]") for t in range(T)]
    for t in range(T):
        lp.add_constraint(f"p_cap[{t}]", {prod[t]: 1.0, P: -1.0}, LE, 0.0)
        lp.add_constraint(f"soc_cap[{t}]", {soc[t]: 1.0, E: -1.0}, LE, 0.0)
        terms = {soc[t]: 1.0, prod[t]: -costs.efficiency * weights[t]}
        terms[soc[t - 1]] = terms.get(soc[t - 1], 0.0) - 1.0
        lp.add_constraint(f"h2[{t}]", terms, EQ, -float(demand_mwh[t]))
    return lp


def local_sizing(site: HrsSite, profile: HrsDemandProfile, attachment: GridAttachment,
                 costs: StationCosts, weights) -> HrsNodeDesign:
    """Cheapest electrolyzer/store pair that meets the station's demand on its own.

    Electricity prices play no role: only annualized capex of electrolyzer,
    grid connection and low-pressure store is minimized.
    """
    weights = np.asarray(weights, dtype=float)
    if profile.snapshots != len(weights):
        raise ParamError("profile length does not match the snapshot count")
    demand = station_demand_mwh(site, profile, weights)
    conn = costs.connection_annuity(attachment.distance_km)
    sol = solve_lp(_station_lp(demand, weights, costs, conn))
    if sol.status != Status.OPTIMAL:
        raise InfeasibleError(f"station {site.id}: demand cannot be met locally", status=sol.status)
    P = max(0.0, sol.value("P"))
    E = min(max(0.0, sol.value("E")), costs.store_max)
    capex = P * (costs.electrolyzer_annuity() + conn) + E * costs.store_annuity()
    return HrsNodeDesign(site.id, attachment.bus_id, P, E, capex)


def minimum_feasible_power(site: HrsSite, profile: HrsDemandProfile, costs: StationCosts,
                           weights) -> float:
    """Smallest electrolyzer rating that can serve the demand with the largest allowed store."""
    weights = np.asarray(weights, dtype=float)
    demand = station_demand_mwh(site, profile, weights)
    sol = solve_lp(_station_lp(demand, weights, costs, 0.0, objective="power"))
    if sol.status != Status.OPTIMAL:
        raise InfeasibleError(f"station {site.id}: demand cannot be met locally", status=sol.status)
    return sol.value("P")


def embed_hrs(sys: PowerSystem, sites, attachments, profile: HrsDemandProfile,
              spec: ScenarioSpec, designs: dict | None = None) -> PowerSystem:
    """Return a copy of ``sys`` with one electrolyzer + store + demand per site.

    In the operational-only scenario capacities are fixed to ``designs``;
    otherwise they are left to the global optimization.
    """
    if spec.mode == ScenarioMode.OPERATIONAL_ONLY:
        missing = [s.id for s in sites if not designs or s.id not in designs]
        if missing:
            raise MissingDesignsError(f"no local designs for stations {missing}")
    att = {a.station_id: a for a in attachments}
    c = spec.costs
    stations = list(sys.stations)
    for site in sites:
        a = att[site.id]
        fixed_p = fixed_e = None
        if spec.mode == ScenarioMode.OPERATIONAL_ONLY:
            fixed_p = designs[site.id].electrolyzer_power
            fixed_e = designs[site.id].lp_storage_energy
        stations.append(HydrogenStation(
            id=site.id, bus=a.bus_id, demand=station_demand_mwh(site, profile, sys.weights),
            efficiency=c.efficiency, electrolyzer_capex=c.electrolyzer_capex,
            electrolyzer_fom_pct=c.electrolyzer_fom_pct,
            electrolyzer_lifetime=c.electrolyzer_lifetime,
            connection_capex=a.connection_cost, connection_fom_pct=c.connection_fom_pct,
            connection_lifetime=c.connection_lifetime, store_capex=c.store_capex,
            store_fom_pct=c.store_fom_pct, store_lifetime=c.store_lifetime,
            store_max=c.store_max, vom=c.vom, fixed_power=fixed_p, fixed_energy=fixed_e))
    return sys.copy(stations=stations)


@dataclass
class ScenarioRun:
    case: SolvedCase
    sites: list
    attachments: list[GridAttachment]
    designs: dict[str, HrsNodeDesign]
    profile: HrsDemandProfile
    spec: ScenarioSpec


def run_scenario(sys: PowerSystem, sites, spec: ScenarioSpec, method="highs",
                 raise_on_failure=True) -> ScenarioRun:
    """attach -> (local sizing in scenario 1) -> embed -> solve."""
    sites = list(sites)
    costs = spec.costs
    if costs.discount_rate != sys.discount_rate:
        costs = StationCosts(**{**costs.__dict__, "discount_rate": sys.discount_rate})
        spec = ScenarioSpec(spec.mode, costs, spec.profile, spec.profile_hours_per_snapshot)
    profile = station_profile(spec, sys.snapshots)
    attachments = attach_stations(sites, sys, costs.connection_per_mw_km) if sites else []
    designs = {}
    if spec.mode == ScenarioMode.OPERATIONAL_ONLY:
        for site, a in zip(sites, attachments):
            designs[site.id] = local_sizing(site, profile, a, costs, sys.weights)
    augmented = embed_hrs(sys, sites, attachments, profile, spec, designs)
    case = solve_expansion(augmented, method, raise_on_failure=raise_on_failure)
    case.mode = int(spec.mode)
    if case.status == Status.OPTIMAL:
        case.designs = used_designs(case, attachments, costs)
    return ScenarioRun(case, sites, attachments, case.designs, profile, spec)


def used_designs(case: SolvedCase, attachments, costs: StationCosts) -> dict[str, HrsNodeDesign]:
    """Station capacities as solved, with their annualized local capex."""
    out = {}
    for a in attachments:
        P = max(0.0, case.capacity("hrs_p", a.station_id))
        E = max(0.0, case.capacity("hrs_e", a.station_id))
        capex = (P * (costs.electrolyzer_annuity() + costs.connection_annuity(a.distance_km))
                 + E * costs.store_annuity())
        out[a.station_id] = HrsNodeDesign(a.station_id, a.bus_id, P, E, capex)
    return out
