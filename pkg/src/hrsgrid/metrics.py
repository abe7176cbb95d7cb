"""Post-solution analytics: nodal prices, hydrogen cost, system cost accounting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .catalog import (COST_SHEETS, H2_KWH_PER_KG, SIZE_CLASSES, DAYS_PER_YEAR, classify_station,
                      expost_capex)
from .errors import DegenerateError, MissingDualsError, ParamError, ZeroProductionError
from .lp import Status
from .power.expansion import SolvedCase, connection_cost, electrolyzer_cost, station_store_cost

HOURS_PER_YEAR = 8760.0


@dataclass(frozen=True)
class LmpSeries:
    bus: str
    prices: np.ndarray       # euro/MWh per snapshot

    @property
    def mean(self):
        return float(np.mean(self.prices))

    @property
    def median(self):
        return float(np.median(self.prices))

    @property
    def variance(self):
        return float(np.var(self.prices))


def extract_lmp(case: SolvedCase) -> list[LmpSeries]:
    """Balance duals divided by snapshot weight, one series per bus."""
    sol = case.solution
    if sol.status != Status.OPTIMAL or sol.duals is None:
        raise MissingDualsError("solved case carries no dual values")
    w = np.asarray(case.system.weights, dtype=float)
    rows = case.lp.rows_tagged("balance")
    out = []
    for b in case.system.buses:
        d = np.array([sol.duals[rows[b.id, t]] for t in range(case.system.snapshots)])
        out.append(LmpSeries(b.id, d / w))
    return out


def lmp_by_bus(case: SolvedCase) -> dict[str, LmpSeries]:
    return {s.bus: s for s in extract_lmp(case)}


@dataclass(frozen=True)
class LcohCosts:
    include_expost: bool = True
    expost_lifetime: float = 20
    discount_rate: float | None = None    # None: the system's rate
    classes: tuple = SIZE_CLASSES
    sheets: dict = field(default_factory=lambda: dict(COST_SHEETS))


@dataclass(frozen=True)
class LcohBreakdown:
    station: str
    electrolyzer: float       # euro/a
    storage: float
    connection: float
    expost: float
    electricity: float
    vom: float
    annual_kg: float

    @property
    def capex(self):
        return math.fsum((self.electrolyzer, self.storage, self.connection, self.expost))

    @property
    def opex(self):
        return self.electricity + self.vom

    @property
    def total(self):
        return math.fsum((self.electrolyzer, self.storage, self.connection, self.expost,
                          self.electricity, self.vom))

    @property
    def lcoh(self):
        return self.total / self.annual_kg

    @property
    def capex_share(self):
        return self.capex / self.total if self.total else 0.0

    @property
    def opex_share(self):
        return 1.0 - self.capex_share


def annual_hydrogen_kg(station, weights) -> float:
    """Annual hydrogen output of a station, scaled up from the modelled horizon."""
    mwh = math.fsum(np.asarray(station.demand, dtype=float))
    return mwh * 1000.0 / H2_KWH_PER_KG * HOURS_PER_YEAR / float(np.sum(weights))


def lcoh(station, case: SolvedCase, costs: LcohCosts | None = None) -> LcohBreakdown:
    """Annual cost of one station's hydrogen over its annual output.

    ``station`` is a station id or a :class:`HydrogenStation` of the case.
    """
    costs = costs or LcohCosts()
    sys = case.system
    sid = station if isinstance(station, str) else station.id
    matches = [h for h in sys.stations if h.id == sid]
    if not matches:
        raise ParamError(f"station {sid} is not part of the solved case")
    h = matches[0]
    r = sys.discount_rate if costs.discount_rate is None else costs.discount_rate
    w = np.asarray(sys.weights, dtype=float)
    kg = annual_hydrogen_kg(h, w)
    if not kg > 0:
        raise ZeroProductionError(f"station {sid} produces no hydrogen; LCOH is undefined")
    P = case.capacity("hrs_p", sid)
    E = case.capacity("hrs_e", sid)
    el = case.series("hrs_el", sid)
    prices = lmp_by_bus(case)[h.bus].prices
    expost = 0.0
    if costs.include_expost:
        # tolerate float noise right at a class boundary
        daily = round(kg / DAYS_PER_YEAR, 6)
        cls = classify_station(daily, costs.classes)
        expost = expost_capex(cls, costs.expost_lifetime, r, costs.sheets)
    return LcohBreakdown(
        station=sid,
        electrolyzer=P * electrolyzer_cost(h, r),
        storage=E * station_store_cost(h, r),
        connection=P * connection_cost(h, r),
        expost=expost,
        electricity=math.fsum(prices * el * w),
        vom=math.fsum(h.vom * el * w),
        annual_kg=kg,
    )


def all_lcoh(case: SolvedCase, costs: LcohCosts | None = None) -> list[LcohBreakdown]:
    return [lcoh(h.id, case, costs) for h in case.system.stations]


def mean_lcoh(breakdowns) -> float:
    """Production-weighted average LCOH."""
    breakdowns = list(breakdowns)
    kg = math.fsum(b.annual_kg for b in breakdowns)
    if not kg > 0:
        raise ZeroProductionError("no hydrogen produced")
    return math.fsum(b.total for b in breakdowns) / kg


CATEGORIES = ("generation", "storage", "transmission", "hrs_electrolyzers", "hrs_storage")
_CATEGORY_OF_TAG = {
    "gen_cap": "generation", "gen_p": "generation",
    "sto_p": "storage", "sto_e": "storage", "sto_ch": "storage", "sto_dis": "storage",
    "line_ext": "transmission", "link_ext": "transmission",
    "hrs_p": "hrs_electrolyzers", "hrs_el": "hrs_electrolyzers",
    "hrs_e": "hrs_storage",
}


@dataclass(frozen=True)
class SystemCostReport:
    total: float                       # euro/a
    categories: dict[str, float]
    delivered_mwh: float
    expansion_twkm: float
    expansion_pct: float

    @property
    def relative(self):
        """euro per MWh of electricity delivered (loads plus electrolyzers)."""
        return self.total / self.delivered_mwh if self.delivered_mwh > 0 else math.nan


def system_cost_report(case: SolvedCase, sys=None) -> SystemCostReport:
    """Re-derive the objective from primal values, split by asset category."""
    sys = sys or case.system
    lp, x = case.lp, case.solution.x
    c = lp.c()
    cats = {k: [] for k in CATEGORIES}
    for j, v in enumerate(lp.variables):
        if c[j] == 0.0:
            continue
        cats[_CATEGORY_OF_TAG[v.tag]].append(c[j] * x[j])
    categories = {k: math.fsum(v) for k, v in cats.items()}
    w = np.asarray(sys.weights, dtype=float)
    delivered = math.fsum(float(np.dot(sys.load(b), w)) for b in sys.buses)
    delivered += math.fsum(float(np.dot(case.series("hrs_el", h.id), w)) for h in sys.stations)
    twkm, pct = expansion_volume(case, sys)
    return SystemCostReport(math.fsum(categories.values()), categories, delivered, twkm, pct)


def expansion_volume(case: SolvedCase, sys=None) -> tuple[float, float]:
    """Added transmission (TWkm) and its share of the initial volume (%)."""
    sys = sys or case.system
    added, initial = [], []
    for ln in sys.lines:
        added.append(case.capacity("line_ext", ln.id) * ln.length_km)
        initial.append(ln.existing_capacity * ln.length_km)
    for lk in sys.links:
        added.append(case.capacity("link_ext", lk.id) * lk.length_km)
        initial.append(lk.existing_capacity * lk.length_km)
    mwkm, base = math.fsum(added), math.fsum(initial)
    if mwkm <= 0:
        return 0.0, 0.0
    return mwkm / 1e6, (mwkm / base * 100.0 if base > 0 else math.inf)


def correlate(xs, ys) -> float:
    """Pearson correlation coefficient."""
    xs, ys = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise ParamError("need two series of equal length >= 2")
    dx, dy = xs - xs.mean(), ys - ys.mean()
    sx, sy = math.sqrt(np.dot(dx, dx)), math.sqrt(np.dot(dy, dy))
    if sx == 0 or sy == 0:
        raise DegenerateError("correlation undefined for a constant series")
    return float(np.clip(np.dot(dx, dy) / (sx * sy), -1.0, 1.0))
