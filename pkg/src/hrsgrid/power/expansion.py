"""Greenfield capacity-expansion LP with linearized (DC) power flow."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import InfeasibleError, SolveError, UnboundedError, ValidationError
from ..lp import EQ, LE, LinearProgram, Solution, Status, solve_lp
from .components import PowerSystem, annuity, validate_system


# -- annualized cost coefficients (euro per MW or MWh per year) ----------------

def generator_capital_cost(g, r):
    return annuity(g.capex * 1000.0, r, g.lifetime, g.fom_pct)


def storage_power_cost(s, r):
    return annuity(s.power_capex * 1000.0, r, s.lifetime, s.fom_pct)


def storage_energy_cost(s, r):
    life = s.energy_lifetime if s.energy_lifetime is not None else s.lifetime
    return annuity(s.energy_capex * 1000.0, r, life, s.energy_fom_pct)


def line_capital_cost(ln, r):
    return annuity(ln.capex_per_mw_km * ln.length_km, r, ln.lifetime, ln.fom_pct)


def link_capital_cost(lk, r):
    return annuity(lk.inverter_capex + lk.capex_per_mw_km * lk.length_km, r, lk.lifetime,
                   lk.fom_pct)


def electrolyzer_cost(h, r):
    return annuity(h.electrolyzer_capex * 1000.0, r, h.electrolyzer_lifetime, h.electrolyzer_fom_pct)


def connection_cost(h, r):
    return annuity(h.connection_capex, r, h.connection_lifetime, h.connection_fom_pct)


def station_store_cost(h, r):
    return annuity(h.store_capex * 1000.0, r, h.store_lifetime, h.store_fom_pct)


def _ac_reference_buses(sys: PowerSystem) -> set:
    """Smallest bus id of every connected component of the AC line graph."""
    parent = {}

    def find(a):
        while parent.setdefault(a, a) != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for ln in sys.lines:
        ra, rb = find(ln.bus0), find(ln.bus1)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for b in parent:
        groups.setdefault(find(b), []).append(b)
    return {min(members) for members in groups.values()}


def build_expansion_lp(sys: PowerSystem) -> LinearProgram:
    report = validate_system(sys)
    if report:
        raise ValidationError("invalid power system: " + "; ".join(report[:5]), report)
    r = sys.discount_rate
    T = sys.snapshots
    w = np.asarray(sys.weights, dtype=float)
    lp = LinearProgram("expansion")
    inj = {(b.id, t): {} for b in sys.buses for t in range(T)}

    def inject(bus, t, j, coef):
        terms = inj[bus, t]
        terms[j] = terms.get(j, 0.0) + coef

    for g in sys.generators:
        cap = lp.add_variable(f"gen_cap[{g.id}]", g.p_nom_min, g.p_nom_max,
                              cost=generator_capital_cost(g, r), tag="gen_cap", key=(g.id,))
        avail = np.ones(T) if g.availability is None else np.asarray(g.availability, dtype=float)
        for t in range(T):
            p = lp.add_variable(f"gen_p[{g.id},{t}]", cost=g.marginal_cost * w[t],
                                tag="gen_p", key=(g.id, t))
            lp.add_constraint(f"gen_avail[{g.id},{t}]", {p: 1.0, cap: -avail[t]}, LE, 0.0,
                              tag="gen_avail", key=(g.id, t))
            inject(g.bus, t, p, 1.0)

    for s in sys.storages:
        P = lp.add_variable(f"sto_p[{s.id}]", s.p_nom_min, s.p_nom_max,
                            cost=storage_power_cost(s, r), tag="sto_p", key=(s.id,))
        E = lp.add_variable(f"sto_e[{s.id}]", 0.0, s.e_nom_max,
                            cost=storage_energy_cost(s, r), tag="sto_e", key=(s.id,))
        if s.max_hours is not None:
            lp.add_constraint(f"sto_hours[{s.id}]", {E: 1.0, P: -s.max_hours}, EQ, 0.0,
                              tag="sto_hours", key=(s.id,))
        ch, dis, soc = [], [], []
        for t in range(T):
            ch.append(lp.add_variable(f"sto_ch[{s.id},{t}]", tag="sto_ch", key=(s.id, t)))
            dis.append(lp.add_variable(f"sto_dis[{s.id},{t}]", tag="sto_dis", key=(s.id, t)))
            soc.append(lp.add_variable(f"sto_soc[{s.id},{t}]", tag="sto_soc", key=(s.id, t)))
            lp.add_constraint(f"sto_ch_cap[{s.id},{t}]", {ch[t]: 1.0, P: -1.0}, LE, 0.0,
                              tag="sto_ch_cap", key=(s.id, t))
            lp.add_constraint(f"sto_dis_cap[{s.id},{t}]", {dis[t]: 1.0, P: -1.0}, LE, 0.0,
                              tag="sto_dis_cap", key=(s.id, t))
            lp.add_constraint(f"sto_soc_cap[{s.id},{t}]", {soc[t]: 1.0, E: -1.0}, LE, 0.0,
                              tag="sto_soc_cap", key=(s.id, t))
            inject(s.bus, t, dis[t], 1.0)
            inject(s.bus, t, ch[t], -1.0)
        for t in range(T):
            # cyclic: the state before the first snapshot is the last state
            terms = {soc[t]: 1.0, ch[t]: -s.eta_charge * w[t], dis[t]: w[t] / s.eta_discharge}
            prev = soc[t - 1]
            terms[prev] = terms.get(prev, 0.0) - 1.0
            lp.add_constraint(f"sto_soc_bal[{s.id},{t}]", terms, EQ, 0.0,
                              tag="sto_soc_bal", key=(s.id, t))

    refs = _ac_reference_buses(sys)
    theta = {}
    for b in sorted({b for ln in sys.lines for b in (ln.bus0, ln.bus1)}):
        for t in range(T):
            fixed = b in refs
            theta[b, t] = lp.add_variable(f"theta[{b},{t}]", 0.0 if fixed else None,
                                          0.0 if fixed else None, tag="theta", key=(b, t))
    for ln in sys.lines:
        ext = lp.add_variable(f"line_ext[{ln.id}]", 0.0, ln.max_capacity - ln.existing_capacity,
                              cost=line_capital_cost(ln, r), tag="line_ext", key=(ln.id,))
        usable = ln.usable_fraction
        for t in range(T):
            f = lp.add_variable(f"line_flow[{ln.id},{t}]", None, None,
                                tag="line_flow", key=(ln.id, t))
            lp.add_constraint(f"line_up[{ln.id},{t}]", {f: 1.0, ext: -usable}, LE,
                              usable * ln.existing_capacity, tag="line_up", key=(ln.id, t))
            lp.add_constraint(f"line_dn[{ln.id},{t}]", {f: -1.0, ext: -usable}, LE,
                              usable * ln.existing_capacity, tag="line_dn", key=(ln.id, t))
            lp.add_constraint(f"kvl[{ln.id},{t}]",
                              {f: 1.0, theta[ln.bus0, t]: -1.0 / ln.reactance,
                               theta[ln.bus1, t]: 1.0 / ln.reactance},
                              EQ, 0.0, tag="kvl", key=(ln.id, t))
            inject(ln.bus0, t, f, -1.0)
            inject(ln.bus1, t, f, 1.0)

    for lk in sys.links:
        ext = lp.add_variable(f"link_ext[{lk.id}]", 0.0, lk.max_capacity - lk.existing_capacity,
                              cost=link_capital_cost(lk, r), tag="link_ext", key=(lk.id,))
        for t in range(T):
            f = lp.add_variable(f"link_flow[{lk.id},{t}]", None, None,
                                tag="link_flow", key=(lk.id, t))
            lp.add_constraint(f"link_up[{lk.id},{t}]", {f: 1.0, ext: -1.0}, LE,
                              lk.existing_capacity, tag="link_up", key=(lk.id, t))
            lp.add_constraint(f"link_dn[{lk.id},{t}]", {f: -1.0, ext: -1.0}, LE,
                              lk.existing_capacity, tag="link_dn", key=(lk.id, t))
            inject(lk.bus0, t, f, -1.0)
            inject(lk.bus1, t, f, 1.0)

    for h in sys.stations:
        lo_p, hi_p = (h.fixed_power, h.fixed_power) if h.fixed_power is not None else (0.0, None)
        lo_e, hi_e = (h.fixed_energy, h.fixed_energy) if h.fixed_energy is not None else (0.0, h.store_max)
        P = lp.add_variable(f"hrs_p[{h.id}]", lo_p, hi_p,
                            cost=electrolyzer_cost(h, r) + connection_cost(h, r),
                            tag="hrs_p", key=(h.id,))
        E = lp.add_variable(f"hrs_e[{h.id}]", lo_e, hi_e, cost=station_store_cost(h, r),
                            tag="hrs_e", key=(h.id,))
        demand = np.asarray(h.demand, dtype=float)
        el, soc = [], []
        for t in range(T):
            el.append(lp.add_variable(f"hrs_el[{h.id},{t}]", cost=h.vom * w[t],
                                      tag="hrs_el", key=(h.id, t)))
            soc.append(lp.add_variable(f"hrs_soc[{h.id},{t}]", tag="hrs_soc", key=(h.id, t)))
            lp.add_constraint(f"hrs_el_cap[{h.id},{t}]", {el[t]: 1.0, P: -1.0}, LE, 0.0,
                              tag="hrs_el_cap", key=(h.id, t))
            lp.add_constraint(f"hrs_soc_cap[{h.id},{t}]", {soc[t]: 1.0, E: -1.0}, LE, 0.0,
                              tag="hrs_soc_cap", key=(h.id, t))
            inject(h.bus, t, el[t], -1.0)
        for t in range(T):
            terms = {soc[t]: 1.0, el[t]: -h.efficiency * w[t]}
            terms[soc[t - 1]] = terms.get(soc[t - 1], 0.0) - 1.0
            lp.add_constraint(f"hrs_h2_bal[{h.id},{t}]", terms, EQ, -float(demand[t]),
                              tag="hrs_h2_bal", key=(h.id, t))

    for b in sys.buses:
        load = sys.load(b)
        for t in range(T):
            lp.add_constraint(f"balance[{b.id},{t}]", inj[b.id, t], EQ, float(load[t]),
                              tag="balance", key=(b.id, t))

    if sys.co2_cap is not None:
        terms = {}
        for g in sys.generators:
            if g.emission_factor == 0:
                continue
            for t in range(T):
                terms[lp.var_at("gen_p", (g.id, t))] = g.emission_factor * w[t]
        lp.add_constraint("co2", terms, LE, float(sys.co2_cap), tag="co2", key=())
    return lp


@dataclass
class SolvedCase:
    system: PowerSystem
    lp: LinearProgram
    solution: Solution
    mode: int | None = None
    designs: dict = field(default_factory=dict)

    @property
    def status(self):
        return self.solution.status

    @property
    def objective(self):
        return self.solution.objective

    def capacity(self, tag, cid) -> float:
        return float(self.solution.x[self.lp.var_at(tag, (cid,))])

    def series(self, tag, cid) -> np.ndarray:
        T = self.system.snapshots
        return np.array([self.solution.x[self.lp.var_at(tag, (cid, t))] for t in range(T)])

    def line_capacity(self, ln) -> float:
        return ln.existing_capacity + self.capacity("line_ext", ln.id)

    def link_capacity(self, lk) -> float:
        return lk.existing_capacity + self.capacity("link_ext", lk.id)

    def balance_duals(self) -> dict:
        if self.solution.duals is None:
            return {}
        return self.solution.duals_tagged("balance")

    @property
    def carbon_price(self) -> float | None:
        """euro/t; the negated shadow price of the emission cap."""
        rows = self.lp.rows_tagged("co2")
        if not rows or self.solution.duals is None:
            return None
        return -float(self.solution.duals[rows[()]])


def solve_expansion(sys: PowerSystem, method="highs", raise_on_failure=True) -> SolvedCase:
    lp = build_expansion_lp(sys)
    sol = solve_lp(lp, method)
    if raise_on_failure and sol.status != Status.OPTIMAL:
        _raise_for(sol)
    return SolvedCase(sys, lp, sol)


def _raise_for(sol):
    if sol.status == Status.INFEASIBLE:
        raise InfeasibleError("power system LP is infeasible", status=sol.status)
    if sol.status == Status.UNBOUNDED:
        raise UnboundedError("power system LP is unbounded", status=sol.status)
    raise SolveError(f"power system LP failed: {sol.message}", status=sol.status)
