"""Power-system components and their default cost data."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from ..catalog import MAX_STORE_MWH, annuity_factor

DISCOUNT_RATE = 0.07
LINE_USABLE_FRACTION = 0.70
LINE_MAX_FACTOR = 2.0
LINK_MAX_MW = 10_000.0
GAS_CO2_T_PER_MWH_TH = 0.187
PUMPED_HYDRO_HOURS = 6.0
SNAPSHOT_HOURS = 2.0


def annuity(capex, discount=DISCOUNT_RATE, lifetime=20, fom_pct=0.0):
    """Annual cost of ``capex``: capital recovery plus fixed O&M as % of capex."""
    return capex * annuity_factor(discount, lifetime) + capex * fom_pct / 100.0


@dataclass
class Bus:
    id: str
    lat: float = 0.0
    lon: float = 0.0
    load: np.ndarray | None = None   # MW per snapshot


@dataclass
class AcLine:
    id: str
    bus0: str
    bus1: str
    length_km: float
    reactance: float                 # flow [MW] = angle difference / reactance
    existing_capacity: float         # MW
    max_capacity: float | None = None
    usable_fraction: float = LINE_USABLE_FRACTION
    capex_per_mw_km: float = 400.0
    fom_pct: float = 2.0
    lifetime: float = 40

    def __post_init__(self):
        if self.max_capacity is None:
            self.max_capacity = LINE_MAX_FACTOR * self.existing_capacity


@dataclass
class DcLink:
    id: str
    bus0: str
    bus1: str
    length_km: float
    existing_capacity: float = 0.0
    max_capacity: float = LINK_MAX_MW
    inverter_capex: float = 150_000.0   # euro/MW for the converter pair
    capex_per_mw_km: float = 400.0      # 2000 for submarine cable
    fom_pct: float = 2.0
    lifetime: float = 40


@dataclass
class Generator:
    id: str
    bus: str
    carrier: str
    capex: float                 # euro/kW
    fom_pct: float = 0.0
    vom: float = 0.0             # euro/MWh_el
    efficiency: float = 1.0
    fuel_cost: float = 0.0       # euro/MWh_th
    co2_intensity: float = 0.0   # t/MWh_th
    lifetime: float = 30
    availability: np.ndarray | None = None
    p_nom_min: float = 0.0
    p_nom_max: float = math.inf

    @property
    def marginal_cost(self):
        return self.vom + self.fuel_cost / self.efficiency

    @property
    def emission_factor(self):
        """t CO2 per MWh_el."""
        return self.co2_intensity / self.efficiency


@dataclass
class StorageUnit:
    id: str
    bus: str
    kind: str
    power_capex: float           # euro/kW
    energy_capex: float = 0.0    # euro/kWh
    eta_charge: float = 1.0
    eta_discharge: float = 1.0
    lifetime: float = 20
    fom_pct: float = 0.0
    energy_lifetime: float | None = None
    energy_fom_pct: float = 0.0
    max_hours: float | None = None   # fixes energy = max_hours * power
    p_nom_min: float = 0.0
    p_nom_max: float = math.inf
    e_nom_max: float = math.inf


@dataclass
class HydrogenStation:
    """Electrolyzer plus low-pressure store serving a fixed hydrogen demand."""
    id: str
    bus: str
    demand: np.ndarray               # MWh_H2 per snapshot
    efficiency: float = 0.68
    electrolyzer_capex: float = 510.0   # euro/kW_el
    electrolyzer_fom_pct: float = 4.0
    electrolyzer_lifetime: float = 20
    connection_capex: float = 0.0       # euro/MW_el, distance * line cost
    connection_fom_pct: float = 2.0
    connection_lifetime: float = 40
    store_capex: float = 19.0           # euro/kWh
    store_fom_pct: float = 0.0
    store_lifetime: float = 20
    store_max: float = MAX_STORE_MWH
    vom: float = 0.0
    fixed_power: float | None = None
    fixed_energy: float | None = None


@dataclass
class PowerSystem:
    buses: list[Bus]
    weights: np.ndarray                       # hours per snapshot
    lines: list[AcLine] = field(default_factory=list)
    links: list[DcLink] = field(default_factory=list)
    generators: list[Generator] = field(default_factory=list)
    storages: list[StorageUnit] = field(default_factory=list)
    stations: list[HydrogenStation] = field(default_factory=list)
    co2_cap: float | None = None              # t/a
    discount_rate: float = DISCOUNT_RATE

    @property
    def snapshots(self):
        return len(self.weights)

    def copy(self, **changes) -> "PowerSystem":
        fields = dict(buses=list(self.buses), lines=list(self.lines), links=list(self.links),
                      generators=list(self.generators), storages=list(self.storages),
                      stations=list(self.stations))
        fields.update(changes)
        return replace(self, **fields)

    def bus(self, bus_id) -> Bus:
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise KeyError(bus_id)

    def load(self, bus: Bus) -> np.ndarray:
        if bus.load is None:
            return np.zeros(self.snapshots)
        return np.asarray(bus.load, dtype=float)


# Asset costs: capex, FOM %/a, VOM euro/MWh_el, efficiency, fuel euro/MWh_th, lifetime a.
GENERATOR_TECH = {
    "CCGT": dict(capex=800, fom_pct=2.5, vom=4.0, efficiency=0.50, fuel_cost=21.6,
                 co2_intensity=GAS_CO2_T_PER_MWH_TH, lifetime=30),
    "OCGT": dict(capex=400, fom_pct=3.75, vom=3.0, efficiency=0.39, fuel_cost=21.6,
                 co2_intensity=GAS_CO2_T_PER_MWH_TH, lifetime=30),
    "ror": dict(capex=3000, fom_pct=2.0, efficiency=0.90, lifetime=80),
    "solar": dict(capex=600, fom_pct=4.17, vom=0.01, lifetime=25),
    "biomass": dict(capex=2209, fom_pct=4.53, efficiency=0.468, fuel_cost=7.0, lifetime=30),
    "onwind": dict(capex=1110, fom_pct=2.45, vom=2.3, lifetime=30),
    "offwind-ac": dict(capex=1640, fom_pct=2.30, vom=2.7, lifetime=30),
    "offwind-dc": dict(capex=1640, fom_pct=2.30, vom=2.7, lifetime=30),
}

STORAGE_TECH = {
    # single inverter rating; tabulated inverter efficiency applies per direction
    "battery": dict(power_capex=323, fom_pct=3.0, lifetime=20, energy_capex=154,
                    energy_lifetime=15, eta_charge=0.81, eta_discharge=0.81),
    # electrolysis (510 euro/kW, 4 %) + fuel cell (339 euro/kW, 3 %) share one rating
    "hydrogen": dict(power_capex=849, fom_pct=(510 * 4 + 339 * 3) / 849, lifetime=20,
                     energy_capex=19, energy_lifetime=20, eta_charge=0.68, eta_discharge=0.58),
    # round-trip efficiency split evenly between pumping and generation
    "pumped-hydro": dict(power_capex=2000, fom_pct=1.0, lifetime=80,
                         eta_charge=math.sqrt(0.75), eta_discharge=math.sqrt(0.75),
                         max_hours=PUMPED_HYDRO_HOURS),
}


def make_generator(id, bus, carrier, **overrides) -> Generator:
    params = dict(GENERATOR_TECH[carrier])
    params.update(overrides)
    return Generator(id=id, bus=bus, carrier=carrier, **params)


def make_storage(id, bus, kind, **overrides) -> StorageUnit:
    params = dict(STORAGE_TECH[kind])
    params.update(overrides)
    return StorageUnit(id=id, bus=bus, kind=kind, **params)


def validate_system(sys: PowerSystem) -> list[str]:
    """Referential integrity, series lengths, bounds. Returns problems found."""
    report = []
    T = sys.snapshots
    w = np.asarray(sys.weights, dtype=float)
    if T == 0:
        report.append("snapshots: none defined")
    if np.any(w <= 0) or not np.all(np.isfinite(w)):
        report.append("snapshots: weights must be positive and finite")
    if sys.co2_cap is not None and sys.co2_cap < 0:
        report.append("co2_cap: negative")
    if sys.discount_rate < 0:
        report.append("discount_rate: negative")

    ids = [b.id for b in sys.buses]
    buses = set(ids)
    if len(buses) != len(ids):
        report.append("buses: duplicate ids")
    for b in sys.buses:
        if b.load is not None:
            load = np.asarray(b.load, dtype=float)
            if load.shape != (T,):
                report.append(f"bus {b.id}: load series length {load.size} != {T} snapshots")
            elif np.any(load < 0):
                report.append(f"bus {b.id}: negative load")

    seen = set()
    for kind, items in (("line", sys.lines), ("link", sys.links), ("generator", sys.generators),
                        ("storage", sys.storages), ("station", sys.stations)):
        for c in items:
            if (kind, c.id) in seen:
                report.append(f"{kind} {c.id}: duplicate id")
            seen.add((kind, c.id))
    for ln in sys.lines:
        for end in (ln.bus0, ln.bus1):
            if end not in buses:
                report.append(f"line {ln.id}: unknown bus {end}")
        if ln.bus0 == ln.bus1:
            report.append(f"line {ln.id}: both ends at {ln.bus0}")
        if not ln.reactance > 0:
            report.append(f"line {ln.id}: reactance must be positive")
        if not 0 < ln.usable_fraction <= 1:
            report.append(f"line {ln.id}: usable fraction outside (0, 1]")
        if ln.existing_capacity < 0 or ln.max_capacity < ln.existing_capacity:
            report.append(f"line {ln.id}: capacity bounds inconsistent")
        if ln.length_km < 0:
            report.append(f"line {ln.id}: negative length")
    for lk in sys.links:
        for end in (lk.bus0, lk.bus1):
            if end not in buses:
                report.append(f"link {lk.id}: unknown bus {end}")
        if lk.existing_capacity < 0 or lk.max_capacity < lk.existing_capacity:
            report.append(f"link {lk.id}: capacity bounds inconsistent")
        if lk.length_km < 0:
            report.append(f"link {lk.id}: negative length")
    for g in sys.generators:
        if g.bus not in buses:
            report.append(f"generator {g.id}: unknown bus {g.bus}")
        if g.availability is not None:
            a = np.asarray(g.availability, dtype=float)
            if a.shape != (T,):
                report.append(f"generator {g.id}: availability length {a.size} != {T} snapshots")
            elif np.any(a < 0) or np.any(a > 1):
                report.append(f"generator {g.id}: availability outside [0, 1]")
        if not g.efficiency > 0:
            report.append(f"generator {g.id}: efficiency must be positive")
        if g.p_nom_min < 0 or g.p_nom_max < g.p_nom_min:
            report.append(f"generator {g.id}: capacity bounds inconsistent")
    for s in sys.storages:
        if s.bus not in buses:
            report.append(f"storage {s.id}: unknown bus {s.bus}")
        if not (0 < s.eta_charge <= 1 and 0 < s.eta_discharge <= 1):
            report.append(f"storage {s.id}: efficiencies outside (0, 1]")
        if s.p_nom_min < 0 or s.p_nom_max < s.p_nom_min or s.e_nom_max < 0:
            report.append(f"storage {s.id}: capacity bounds inconsistent")
    for h in sys.stations:
        if h.bus not in buses:
            report.append(f"station {h.id}: unknown bus {h.bus}")
        d = np.asarray(h.demand, dtype=float)
        if d.shape != (T,):
            report.append(f"station {h.id}: demand length {d.size} != {T} snapshots")
        elif np.any(d < 0):
            report.append(f"station {h.id}: negative demand")
        if not 0 < h.efficiency <= 1:
            report.append(f"station {h.id}: efficiency outside (0, 1]")
        if h.connection_capex < 0:
            report.append(f"station {h.id}: negative connection cost")
        if h.store_max < 0 or h.store_max > MAX_STORE_MWH + 1e-9:
            report.append(f"station {h.id}: store cap outside [0, {MAX_STORE_MWH}] MWh")
    return report
