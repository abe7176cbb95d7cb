"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line."""

import json
import math
import time

import numpy as np
import pytest

from hrsgrid.catalog import (COST_SHEETS, PARITY_INPUTS, SIZE_CLASSES, HrsSite, ProfileParams,
                             annuity_factor, classify_station, diesel_parity, electricity_parity,
                             expost_capex, tabulated_diesel_efficiency)
from hrsgrid.cli import main
from hrsgrid.coupling import ScenarioSpec, _station_lp, run_scenario, station_demand_mwh
from hrsgrid.errors import InfeasibleError
from hrsgrid.frlm import build_model, solve_siting
from hrsgrid.lp import check_solution, duality_gap, solve_lp
from hrsgrid.metrics import all_lcoh, correlate, lcoh, lmp_by_bus
from hrsgrid.power import annuity, solve_expansion
from criteria import record
from fixtures import flat_price_bus, random_frlm, sites_near, synth_small, two_bus
from oracles import annuity_closed_form, frlm_brute_force, power_residuals

FRLM_SEEDS = range(100)
COUPLED_SEEDS = range(12)
FLAT = ProfileParams(1.0, 1.0, 0.0)


# --- shared fixtures --------------------------------------------------------------

@pytest.fixture(scope="module")
def siting_runs():
    """Every random siting instance solved once, with its brute-force reference."""
    runs, solve_seconds = [], 0.0
    for seed in FRLM_SEEDS:
        net, trips, paths, sets, cfg = random_frlm(seed)
        cand = [n.id for n in net.nodes if n.is_candidate]
        ref = frlm_brute_force(paths, sets, trips, cfg.node_capacity, cfg.fuel_per_km, cand)
        t0 = time.perf_counter()
        try:
            sol = solve_siting(build_model(paths, sets, trips, cfg, candidates=net))
        except InfeasibleError:
            sol = None
        solve_seconds += time.perf_counter() - t0
        runs.append((seed, trips, paths, cfg, ref, sol))
    return runs, solve_seconds


def coupled_fixture(seed):
    """Synthetic 3-bus system with a binding carbon cap and six large stations."""
    sys = synth_small(seed, T=24, buses=3)
    base = solve_expansion(sys)
    emitted = sum(float(np.dot(base.series("gen_p", g.id), sys.weights)) * g.emission_factor
                  for g in sys.generators)
    sys.co2_cap = 0.2 * emitted
    return sys, sites_near(sys, [30000.0] * 4 + [15000.0] * 2, seed=seed)


@pytest.fixture(scope="module")
def coupled_runs():
    out = []
    for seed in COUPLED_SEEDS:
        sys, sites = coupled_fixture(seed)
        one = run_scenario(sys, sites, ScenarioSpec(1))
        two = run_scenario(sys, sites, ScenarioSpec(2))
        out.append((seed, sys, sites, one, two))
    return out


@pytest.fixture(scope="module")
def solved_lps(coupled_runs):
    """(label, lp, solution) for every continuous program solved by the suite."""
    items = []
    for seed, sys, sites, one, two in coupled_runs:
        for tag, run in (("scenario1", one), ("scenario2", two)):
            items.append((f"seed {seed} {tag}", run.case.lp, run.case.solution))
    for seed in range(4):
        case = solve_expansion(synth_small(seed, T=24, buses=4))
        items.append((f"baseline {seed}", case.lp, case.solution))
    for load in (300.0, 1800.0):
        case = solve_expansion(two_bus(load=load))
        items.append((f"two-bus {load}", case.lp, case.solution))
    case = solve_expansion(flat_price_bus(), "simplex")
    items.append(("flat bus (simplex)", case.lp, case.solution))
    # the local sizing programs of scenario 1, re-solved with both backends
    seed, sys, sites, one, _ = coupled_runs[0]
    costs = one.spec.costs
    for site, att in zip(sites[:2], one.attachments):
        lp = _station_lp(station_demand_mwh(site, one.profile, sys.weights), sys.weights, costs,
                         costs.connection_annuity(att.distance_km))
        for method in ("highs", "simplex"):
            items.append((f"local {site.id} ({method})", lp, solve_lp(lp, method)))
    return items


# --- criteria -----------------------------------------------------------------------

def test_criterion_01_siting_matches_brute_force(siting_runs):
    runs, seconds = siting_runs
    mismatches = []
    for seed, trips, paths, cfg, ref, sol in runs:
        got = None if sol is None else len(sol.stations)
        want = None if ref is None else ref[0]
        if got != want:
            mismatches.append((seed, got, want))
    feasible = sum(1 for r in runs if r[4] is not None)
    ok = not mismatches and seconds < 60.0
    record(1, ok, f"{len(runs)} instances ({feasible} feasible), {len(mismatches)} mismatches, "
                  f"solver time {seconds:.2f} s")
    assert not mismatches, mismatches
    assert seconds < 60.0


def test_criterion_02_capacity_compliance(siting_runs):
    runs, _ = siting_runs
    worst_excess, worst_rel = -math.inf, 0.0
    for seed, trips, paths, cfg, ref, sol in runs:
        if sol is None:
            continue
        loads = list(sol.node_load.values())
        worst_excess = max(worst_excess, max(loads, default=0.0) - cfg.node_capacity)
        need = math.fsum(t.flow * cfg.fuel_per_km * paths[t.id].total_distance for t in trips)
        got = math.fsum(loads)
        worst_rel = max(worst_rel, abs(got - need) / max(need, 1e-300))
    ok = worst_excess <= 1e-6 and worst_rel <= 1e-9
    record(2, ok, f"max load - capacity = {worst_excess:.3g} kg/day, "
                  f"fuel balance error {worst_rel:.2g} relative")
    assert ok


def test_criterion_03_lp_duality(solved_lps):
    worst_gap, problems = 0.0, []
    for label, lp, sol in solved_lps:
        worst_gap = max(worst_gap, duality_gap(lp, sol))
        report = check_solution(lp, sol, gap_tol=1e-6)
        if report:
            problems.append((label, report[:3]))
    ok = worst_gap <= 1e-6 and not problems
    record(3, ok, f"{len(solved_lps)} programs, worst relative gap {worst_gap:.2g}, "
                  f"{len(problems)} with slackness or sign violations")
    assert ok, problems


def test_criterion_04_balance_limits_and_cycles(coupled_runs):
    worst = [0.0, 0.0, 0.0]
    cases = [run.case for _, _, _, one, two in coupled_runs for run in (one, two)]
    cases += [solve_expansion(synth_small(s, T=24, buses=4)) for s in range(4)]
    for case in cases:
        worst = [max(a, b) for a, b in zip(worst, power_residuals(case.system, case))]
    ok = all(v <= 1e-6 for v in worst)
    record(4, ok, f"{len(cases)} cases: imbalance {worst[0]:.2g} MW, flow above 70% "
                  f"{worst[1]:.2g} MW, SOC cycle gap {worst[2]:.2g} MWh")
    assert ok


def test_criterion_05_scenario_ordering(coupled_runs):
    gains, violations = [], []
    for seed, sys, sites, one, two in coupled_runs:
        a, b = one.case.objective, two.case.objective
        if b > a * (1 + 1e-6):
            violations.append(seed)
        gains.append((a - b) / a)
    best = max(gains)
    ok = len(coupled_runs) >= 10 and not violations and best > 1e-3
    record(5, ok, f"{len(coupled_runs)} fixtures, {len(violations)} order violations, "
                  f"best improvement {100 * best:.3f} %, "
                  f"{sum(g > 1e-3 for g in gains)} above 0.1 %")
    assert ok


def spreadsheet_lcoh(price, daily, discount=0.07):
    """Recompute the LCOH from raw inputs only, as one would in a spreadsheet."""
    kg = daily * 365.0
    P = kg * 33.33 / 1000.0 / 0.68 / 8760.0                     # constant output, MW_el
    r = discount
    af = lambda n: r / (1 - (1 + r) ** -n)                       # noqa: E731
    electrolyzer = P * (510.0 * 1000 * af(20) + 510.0 * 1000 * 0.04)
    totals = {938: 0.59, 1875: 1.19, 3750: 2.37, 7500: 4.74, 15000: 9.48, 30000: 18.96}
    expost = min(t for d, t in totals.items() if daily <= d) * 1e6 * af(20)
    electricity = price * P * 8760.0
    return (electrolyzer + expost + electricity) / kg


def test_criterion_06_analytic_lcoh():
    sys = flat_price_bus(6, 50.0)
    daily = 1000.0
    run = run_scenario(sys, [HrsSite("h", 50.0, 8.0, daily)], ScenarioSpec(2, profile=FLAT))
    b = lcoh("h", run.case)
    per_kg = b.electricity / b.annual_kg
    hand = 33.33 / 0.68 * 0.050
    el_rel = abs(per_kg - hand) / hand
    sheet = spreadsheet_lcoh(50.0, daily)
    full_rel = abs(b.lcoh - sheet) / sheet
    ok = el_rel <= 1e-6 and full_rel <= 1e-8
    record(6, ok, f"electricity {per_kg:.7f} EUR/kg vs 33.33/0.68*0.05 = {hand:.7f} "
                  f"({el_rel:.1g} rel; the reference 2.4510 is {abs(hand - 2.4510) / 2.4510:.1e} "
                  f"away from this product); full LCOH {b.lcoh:.6f} vs spreadsheet "
                  f"({full_rel:.1g} rel)")
    assert ok


def test_criterion_07_north_south_gradient():
    sys = two_bus(load=1800.0)
    sites = [HrsSite("north", 54.0, 9.0, 3000.0), HrsSite("south", 48.0, 9.0, 3000.0)]
    run = run_scenario(sys, sites, ScenarioSpec(profile=FLAT))
    by = {b.station: b.lcoh for b in all_lcoh(run.case)}

    five = synth_small(0, T=24, buses=5)
    stations = sites_near(five, [10000.0] * 10, seed=0, jitter=0.05)
    case = run_scenario(five, stations, ScenarioSpec(2)).case
    lmp = lmp_by_bus(case)
    xs = [lmp[h.bus].mean for h in case.system.stations]
    ys = [b.lcoh for b in all_lcoh(case)]
    r = correlate(xs, ys)
    ok = by["north"] < by["south"] and r > 0.9 and len(ys) >= 5
    record(7, ok, f"LCOH north {by['north']:.3f} < south {by['south']:.3f} EUR/kg; "
                  f"LMP-LCOH r = {r:.4f} over {len(ys)} stations on 5 buses")
    assert ok


def test_criterion_08_diesel_parity():
    inp = PARITY_INPUTS
    eta = tabulated_diesel_efficiency()
    h2 = diesel_parity(inp["energy_at_wheel"], eta, inp["eta_fcev"], inp["diesel_energy"],
                       inp["diesel_price"], inp["h2_energy"])
    el = electricity_parity(inp["energy_at_wheel"], eta, inp["eta_bev"], inp["diesel_energy"],
                            inp["diesel_price"])
    ok = abs(h2 - 6.6) <= 0.05 and abs(el - 0.27) <= 0.005
    record(8, ok, f"hydrogen parity {h2:.3f} EUR/kg, electricity parity {el:.4f} EUR/kWh")
    assert ok


def test_criterion_09_annuity_and_catalog():
    a = annuity(1000.0, 0.07, 20, 0)
    boundaries = []
    for prev, cls in zip((None,) + SIZE_CLASSES[:-1], SIZE_CLASSES):
        boundaries.append(classify_station(cls.demand).label == cls.label)
        if prev is not None:
            boundaries.append(classify_station(prev.demand + 1e-9).label == cls.label)
    xxl = SIZE_CLASSES[-1]
    want = 18.96e6 * annuity_closed_form(1.0, 0.07, 20)
    xxl_rel = abs(expost_capex(xxl) - want) / want
    ok = (abs(a - 94.39) <= 0.01 and all(boundaries) and xxl_rel <= 1e-9
          and COST_SHEETS["XXL"].total == 18.96
          and abs(annuity_factor(0.07, 20) * 1000 - a) < 1e-9)
    record(9, ok, f"annuity {a:.4f} EUR/a, {sum(boundaries)}/{len(boundaries)} class boundaries, "
                  f"XXL ex-post {expost_capex(xxl) / 1e6:.6f} M EUR/a ({xxl_rel:.1g} rel)")
    assert ok


def test_criterion_10_determinism(tmp_path):
    src = tmp_path / "src"
    assert main(["synth", "--seed", "11", "--out", str(src)]) == 0
    commands = [["synth", "--seed", "11"],
                ["site", "--config", str(src / "run.cfg")],
                ["power", "--config", str(src / "run.cfg")],
                ["couple", "--config", str(src / "run.cfg"), "--mode", "both",
                 "--format", "geojson"]]
    differing, compared = [], 0
    for k, cmd in enumerate(commands):
        sums = []
        for rep in range(2):
            out = tmp_path / f"{k}_{rep}"
            assert main(cmd + ["--out", str(out)]) == 0
            sums.append(json.loads((out / "manifest.json").read_text())["outputs"])
        compared += len(sums[0])
        if sums[0] != sums[1]:
            differing.append(cmd[0])
    ok = not differing
    record(10, ok, f"{len(commands)} commands re-run, {compared} output checksums compared, "
                   f"differing: {differing or 'none'}")
    assert ok
