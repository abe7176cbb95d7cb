"""Hydrogen refueling stations for heavy-duty trucks, sited on a highway
network and integrated into a power-system capacity-expansion model.
"""

from .catalog import (COST_SHEETS, H2_KWH_PER_KG, SIZE_CLASSES, HrsDemandProfile, HrsSite,
                      ProfileParams, annuity_factor, classify_station, diesel_parity,
                      electricity_parity, expost_capex, synth_profile)
from .coupling import (GridAttachment, HrsNodeDesign, ScenarioMode, ScenarioSpec, StationCosts,
                       attach_stations, embed_hrs, local_sizing, run_scenario)
from .errors import HrsGridError
from .frlm import FrlmConfig, SitingSolution, build_model, solve_siting, verify_solution
from .highway import (CandidateSet, GeoNode, HighwayNetwork, ODTrip, TripPath,
                      build_candidate_sets, filter_trips, haversine_distance, refuel_occasions,
                      route_trips, shortest_path)
from .metrics import (LcohBreakdown, LmpSeries, SystemCostReport, all_lcoh, correlate,
                      expansion_volume, extract_lmp, lcoh, mean_lcoh, system_cost_report)
from .power import PowerSystem, SolvedCase, annuity, build_expansion_lp, solve_expansion

__version__ = "0.1.0"

__all__ = [
    "COST_SHEETS", "H2_KWH_PER_KG", "SIZE_CLASSES", "HrsDemandProfile", "HrsSite", "ProfileParams",
    "annuity_factor", "classify_station", "diesel_parity", "electricity_parity", "expost_capex",
    "synth_profile", "GridAttachment", "HrsNodeDesign", "ScenarioMode", "ScenarioSpec",
    "StationCosts", "attach_stations", "embed_hrs", "local_sizing", "run_scenario", "HrsGridError",
    "FrlmConfig", "SitingSolution", "build_model", "solve_siting", "verify_solution",
    "CandidateSet", "GeoNode", "HighwayNetwork", "ODTrip", "TripPath", "build_candidate_sets",
    "filter_trips", "haversine_distance", "refuel_occasions", "route_trips", "shortest_path",
    "LcohBreakdown", "LmpSeries", "all_lcoh", "SystemCostReport", "correlate", "expansion_volume",
    "extract_lmp", "lcoh", "mean_lcoh", "system_cost_report", "PowerSystem", "SolvedCase",
    "annuity", "build_expansion_lp", "solve_expansion",
]
