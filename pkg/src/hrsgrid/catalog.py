"""Refueling-station size classes, ex-post component costs, demand profiles
and the diesel price-parity calculation.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, OverCapError, ParamError, ParseError

H2_KWH_PER_KG = 33.33          # higher heating value; 30 t <-> 999.9 MWh
MAX_DAILY_KG = 30_000.0
MAX_STORE_MWH = MAX_DAILY_KG * H2_KWH_PER_KG / 1000.0
DAYS_PER_YEAR = 365


@dataclass(frozen=True)
class StationSizeClass:
    label: str
    hdv_per_day: int
    demand: float                  # kg/day
    low_pressure_storage: float    # kg
    high_pressure_storage: float   # kg
    electrolyzer: float            # MW


@dataclass(frozen=True)
class StationCostSheet:
    """Component costs in million euro for one size class."""
    label: str
    high_pressure_storage: float
    dispenser: float
    compressors: float
    cooling: float
    safety: float
    total: float

    @property
    def component_sum(self):
        return (self.high_pressure_storage + self.dispenser + self.compressors
                + self.cooling + self.safety)


SIZE_CLASSES = (
    StationSizeClass("XS", 15, 938, 938, 113, 2),
    StationSizeClass("S", 31, 1875, 1875, 225, 5),
    StationSizeClass("M", 61, 3750, 3750, 450, 9),
    StationSizeClass("L", 123, 7500, 7500, 900, 19),
    StationSizeClass("XL", 246, 15000, 15000, 1800, 37),
    StationSizeClass("XXL", 492, 30000, 30000, 3600, 74),
)

# The printed totals do not equal the component sums; totals are used as given.
COST_SHEETS = {
    "XS": StationCostSheet("XS", 0.13, 0.11, 1.58, 0.12, 0.14, 0.59),
    "S": StationCostSheet("S", 0.26, 0.11, 2.76, 0.12, 0.14, 1.19),
    "M": StationCostSheet("M", 0.51, 0.21, 5.52, 0.12, 0.28, 2.37),
    "L": StationCostSheet("L", 1.03, 0.43, 10.65, 0.12, 0.56, 4.74),
    "XL": StationCostSheet("XL", 2.06, 0.86, 21.30, 0.12, 1.12, 9.48),
    "XXL": StationCostSheet("XXL", 2.06, 0.86, 21.30, 0.12, 1.12, 18.96),
}


def annuity_factor(discount: float, lifetime: float) -> float:
    """``r (1+r)^n / ((1+r)^n - 1)``, with the ``1/n`` limit at ``r = 0``."""
    if discount < 0:
        raise DomainError("discount rate must be non-negative")
    if not lifetime >= 1:
        raise DomainError("lifetime must be at least one year")
    if discount == 0:
        return 1.0 / lifetime
    if math.isinf(lifetime):
        return discount
    # the discount term (1+r)^-n underflows gracefully for very long lifetimes
    return discount / -math.expm1(-lifetime * math.log1p(discount))


def classify_station(daily_demand: float, classes=SIZE_CLASSES) -> StationSizeClass:
    """Smallest class whose daily demand covers ``daily_demand``."""
    if not daily_demand > 0:
        raise DomainError("daily demand must be positive")
    for cls in sorted(classes, key=lambda c: c.demand):
        if daily_demand <= cls.demand:
            return cls
    raise OverCapError(f"daily demand {daily_demand} kg exceeds the largest class")


def expost_capex(cls: StationSizeClass, lifetime: float = 20, discount: float = 0.07,
                 sheets=None) -> float:
    """Annualized cost (euro/a) of the components sized outside the optimization."""
    sheet = (sheets or COST_SHEETS)[cls.label]
    return sheet.total * 1e6 * annuity_factor(discount, lifetime)


@dataclass(frozen=True)
class ProfileParams:
    night_factor: float = 0.3
    weekend_factor: float = 0.5
    seasonal_amplitude: float = 0.1
    night_start: int = 22
    night_end: int = 6

    def __post_init__(self):
        if self.night_factor < 0 or self.weekend_factor < 0 or self.seasonal_amplitude < 0:
            raise ParamError("profile factors must be non-negative")
        if self.seasonal_amplitude > 1:
            raise ParamError("seasonal amplitude above 1 would produce negative demand")


@dataclass(frozen=True)
class HrsDemandProfile:
    weights: np.ndarray
    hours_per_snapshot: float
    params: ProfileParams = field(default_factory=ProfileParams)

    @property
    def snapshots(self):
        return len(self.weights)


def _raw_profile(params: ProfileParams, snapshots: int, hours_per_snapshot: float):
    hours = np.arange(snapshots) * hours_per_snapshot
    hour_of_day = np.mod(hours, 24.0)
    day_of_week = np.floor_divide(hours, 24.0).astype(int) % 7
    if params.night_start > params.night_end:
        night = (hour_of_day >= params.night_start) | (hour_of_day < params.night_end)
    else:
        night = (hour_of_day >= params.night_start) & (hour_of_day < params.night_end)
    w = np.ones(snapshots)
    w[night] *= params.night_factor
    w[day_of_week >= 5] *= params.weekend_factor
    # one yearly cycle, trough at new year
    w *= 1.0 - params.seasonal_amplitude * np.cos(2 * np.pi * hours / 8760.0)
    return w


def synth_profile(params: ProfileParams | None, snapshots: int,
                  hours_per_snapshot: float = 1.0) -> HrsDemandProfile:
    """Weekly truck-traffic pattern with a seasonal modulation, normalized to sum 1.

    Snapshot ``t`` starts at hour ``t * hours_per_snapshot`` of a year that
    begins on a Monday at midnight.
    """
    params = params or ProfileParams()
    if snapshots <= 0:
        raise ParamError("snapshot count must be positive")
    w = _raw_profile(params, snapshots, hours_per_snapshot)
    total = w.sum()
    if total <= 0:
        raise ParamError("profile parameters leave no demand in any snapshot")
    return HrsDemandProfile(w / total, hours_per_snapshot, params)


@dataclass(frozen=True)
class HrsSite:
    id: str
    lat: float
    lon: float
    daily_demand: float            # kg/day

    def __post_init__(self):
        if self.daily_demand < 0:
            raise DomainError(f"site {self.id}: negative demand")
        if self.daily_demand > MAX_DAILY_KG + 1e-6:
            raise OverCapError(f"site {self.id}: {self.daily_demand} kg/day exceeds the 30 t cap")

    @property
    def annual_demand(self) -> float:
        return self.daily_demand * DAYS_PER_YEAR


def demand_series(site: HrsSite, profile: HrsDemandProfile) -> np.ndarray:
    """Hydrogen demand per snapshot in kg."""
    return site.annual_demand * np.asarray(profile.weights, dtype=float)


def kg_to_mwh(kg):
    return np.asarray(kg, dtype=float) * H2_KWH_PER_KG / 1000.0


def diesel_parity(energy_at_wheel, eta_diesel, eta_fcev, diesel_energy, diesel_price,
                  h2_energy=H2_KWH_PER_KG) -> float:
    """Hydrogen price (euro/kg) at which a fuel-cell truck costs the same per km as diesel."""
    for eta in (eta_diesel, eta_fcev):
        if not 0 < eta <= 1:
            raise DomainError("efficiencies must lie in (0, 1]")
    diesel_cost = diesel_price * (energy_at_wheel / eta_diesel) / diesel_energy
    h2_kg = (energy_at_wheel / eta_fcev) / h2_energy
    return diesel_cost / h2_kg


def electricity_parity(energy_at_wheel, eta_diesel, eta_bev, diesel_energy, diesel_price) -> float:
    """Electricity price (euro/kWh) at which a battery-electric truck matches diesel."""
    for eta in (eta_diesel, eta_bev):
        if not 0 < eta <= 1:
            raise DomainError("efficiencies must lie in (0, 1]")
    diesel_cost = diesel_price * (energy_at_wheel / eta_diesel) / diesel_energy
    return diesel_cost / (energy_at_wheel / eta_bev)


# Fuel-cost comparison inputs. The tabulated diesel tank energy (360.7 kWh per
# 100 km) is what the tabulated prices were computed from; it corresponds to a
# powertrain efficiency of 120 / 360.7, printed rounded as 0.30.
PARITY_INPUTS = {
    "energy_at_wheel": 120.0,
    "diesel_tank_energy": 360.7,
    "eta_fcev": 0.55,
    "eta_bev": 0.75,
    "diesel_energy": 10.0,
    "diesel_price": 1.2,
    "h2_energy": 33.3,
}


def tabulated_diesel_efficiency(inputs=PARITY_INPUTS):
    return inputs["energy_at_wheel"] / inputs["diesel_tank_energy"]


def load_catalog(path):
    """Read size classes and cost sheets from one CSV (one row per class)."""
    classes, sheets = [], {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        for row in reader:
            line = reader.line_num
            try:
                label = row["label"].strip()
                classes.append(StationSizeClass(
                    label, int(row["hdv_per_day"]), float(row["demand_kg_per_day"]),
                    float(row["low_pressure_storage_kg"]), float(row["high_pressure_storage_kg"]),
                    float(row["electrolyzer_mw"])))
                sheets[label] = StationCostSheet(
                    label, float(row["high_pressure_storage_meur"]), float(row["dispenser_meur"]),
                    float(row["compressors_meur"]), float(row["cooling_meur"]),
                    float(row["safety_meur"]), float(row["total_meur"]))
            except (KeyError, TypeError, ValueError) as exc:
                raise ParseError(path, line, f"bad catalog row: {exc}") from None
    return tuple(classes), sheets
