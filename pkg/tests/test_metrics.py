import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from hrsgrid.catalog import (H2_KWH_PER_KG, HrsSite, ProfileParams, classify_station,
                             expost_capex)
from hrsgrid.coupling import ScenarioMode, ScenarioSpec, StationCosts, run_scenario
from hrsgrid.errors import DegenerateError, MissingDualsError, ParamError, ZeroProductionError
from hrsgrid.metrics import (CATEGORIES, LcohBreakdown, LcohCosts, all_lcoh, correlate,
                             expansion_volume, extract_lmp, lcoh, lmp_by_bus, mean_lcoh,
                             system_cost_report)
from hrsgrid.power import AcLine, Bus, Generator, PowerSystem, solve_expansion
from fixtures import flat, flat_price_bus, synth_small, sites_near, two_bus

FLAT = ProfileParams(1.0, 1.0, 0.0)


def flat_station_run(price=50.0, daily=1000.0, T=6, mode=ScenarioMode.INVESTMENT_AND_OPERATIONAL):
    sys = flat_price_bus(T, price)
    run = run_scenario(sys, [HrsSite("h", 50.0, 8.0, daily)], ScenarioSpec(mode, profile=FLAT))
    return sys, run


def hand_lcoh(price, daily, costs=StationCosts()):
    kg = daily * 365.0
    mwh_el = kg * H2_KWH_PER_KG / 1000.0 / costs.efficiency
    P = mwh_el / 8760.0
    expost = expost_capex(classify_station(daily))
    return (P * costs.electrolyzer_annuity() + expost + price * mwh_el) / kg, P


def test_flat_prices_equal_marginal_cost():
    sys, run = flat_station_run(price=42.0)
    for s in extract_lmp(run.case):
        np.testing.assert_allclose(s.prices, 42.0, atol=1e-9)
        assert s.mean == pytest.approx(42.0) and s.median == pytest.approx(42.0)
        assert s.variance == pytest.approx(0.0, abs=1e-12)


def test_missing_duals():
    case = solve_expansion(flat_price_bus())
    case.solution = dataclasses.replace(case.solution, duals=None)
    with pytest.raises(MissingDualsError):
        extract_lmp(case)


def test_congestion_shows_in_prices():
    free = lmp_by_bus(solve_expansion(two_bus(load=300.0)))
    tight = lmp_by_bus(solve_expansion(two_bus(load=1800.0)))
    assert free["b0"].mean == pytest.approx(free["b1"].mean)
    assert tight["b1"].mean - tight["b0"].mean == pytest.approx(70.0)


@pytest.mark.parametrize("daily", [500.0, 1000.0, 5000.0, 30000.0])
def test_lcoh_matches_hand_calculation(daily):
    _, run = flat_station_run(50.0, daily)
    b = lcoh("h", run.case)
    expected, P = hand_lcoh(50.0, daily)
    assert run.designs["h"].electrolyzer_power == pytest.approx(P, rel=1e-9)
    assert b.annual_kg == pytest.approx(daily * 365.0, rel=1e-12)
    assert b.lcoh == pytest.approx(expected, rel=1e-9)
    # electricity per kg: 33.33 kWh / 0.68 at 0.05 euro/kWh
    assert b.electricity / b.annual_kg == pytest.approx(33.33 / 0.68 * 0.05, rel=1e-9)
    assert b.storage == pytest.approx(0.0, abs=1e-9) and b.connection == 0.0


def test_lcoh_without_expost_and_by_object():
    _, run = flat_station_run()
    station = run.case.system.stations[0]
    a = lcoh(station, run.case, LcohCosts(include_expost=False))
    b = lcoh("h", run.case)
    assert a.expost == 0.0
    assert b.total - a.total == pytest.approx(b.expost)
    with pytest.raises(ParamError):
        lcoh("nope", run.case)


def test_doubling_price_changes_only_electricity():
    _, one = flat_station_run(40.0)
    _, two = flat_station_run(80.0)
    a, b = lcoh("h", one.case), lcoh("h", two.case)
    assert b.electricity == pytest.approx(2 * a.electricity, rel=1e-9)
    for name in ("electrolyzer", "storage", "connection", "expost", "vom", "annual_kg"):
        assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-9, abs=1e-9)


def test_zero_production_station():
    _, run = flat_station_run(daily=0.0)
    with pytest.raises(ZeroProductionError):
        lcoh("h", run.case)
    with pytest.raises(ZeroProductionError):
        mean_lcoh([])


def test_north_station_is_cheaper_behind_congestion():
    sys = two_bus(load=1800.0)
    sites = [HrsSite("north", 54.0, 9.0, 3000.0), HrsSite("south", 48.0, 9.0, 3000.0)]
    run = run_scenario(sys, sites, ScenarioSpec(profile=FLAT))
    by = {b.station: b for b in all_lcoh(run.case)}
    assert by["north"].lcoh < by["south"].lcoh


@pytest.mark.parametrize("seed", range(3))
def test_cost_categories_add_up(seed):
    sys = synth_small(seed, T=24)
    sites = sites_near(sys, [4000.0, 9000.0], seed=seed)
    base = system_cost_report(solve_expansion(sys))
    run = run_scenario(sys, sites, ScenarioSpec())
    rep = system_cost_report(run.case)
    assert set(rep.categories) == set(CATEGORIES)
    assert rep.total == pytest.approx(run.case.objective, rel=1e-8)
    assert base.total == pytest.approx(solve_expansion(sys).objective, rel=1e-8)
    assert base.total < rep.total
    assert base.categories["hrs_electrolyzers"] == 0.0
    assert rep.categories["hrs_electrolyzers"] > 0.0
    assert rep.delivered_mwh > base.delivered_mwh
    breakdowns = all_lcoh(run.case)
    kg = math.fsum(b.annual_kg for b in breakdowns)
    assert mean_lcoh(breakdowns) * kg == pytest.approx(
        math.fsum(b.lcoh * b.annual_kg for b in breakdowns), rel=1e-12)


def test_expansion_volume_example():
    T = 2
    buses = [Bus("a", 50, 8, flat(T, 0.0)), Bus("b", 50, 9, flat(T, 1800.0))]
    gens = [Generator("g0", "a", "x", capex=0.0, vom=1.0),
            Generator("g1", "b", "y", capex=0.0, vom=500.0)]
    line = AcLine("l", "a", "b", 100.0, 0.01, 1000.0, 2000.0)
    case = solve_expansion(PowerSystem(buses, flat(T, 4380.0), [line], [], gens))
    twkm, pct = expansion_volume(case)
    assert twkm == pytest.approx(0.1)
    assert pct == pytest.approx(100.0)
    assert system_cost_report(case).expansion_twkm == pytest.approx(0.1)


def test_no_expansion_reports_zero():
    assert expansion_volume(solve_expansion(two_bus(load=100.0))) == (0.0, 0.0)


def test_correlate_examples():
    assert correlate([1, 2, 3], [2, 4, 6]) == pytest.approx(1.0)
    assert correlate([1, 2, 3], [3, 2, 1]) == pytest.approx(-1.0)
    assert correlate([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8)
    with pytest.raises(DegenerateError):
        correlate([1, 1, 1], [1, 2, 3])
    with pytest.raises(ParamError):
        correlate([1, 2], [1, 2, 3])


@given(st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=20), st.floats(0.1, 10),
       st.floats(-100, 100))
def test_correlate_matches_numpy_and_is_affine_invariant(xs, a, b):
    xs = np.array(xs)
    ys = np.sin(xs) + 0.1 * xs
    if np.ptp(xs) < 1e-6 or np.ptp(ys) < 1e-6:
        return
    r = correlate(xs, ys)
    assert r == pytest.approx(np.corrcoef(xs, ys)[0, 1], abs=1e-9)
    assert correlate(a * xs + b, ys) == pytest.approx(r, abs=1e-9)


@given(st.lists(st.floats(0, 1e7), min_size=6, max_size=6), st.floats(1.0, 1e7))
def test_breakdown_identities(parts, kg):
    b = LcohBreakdown("s", *parts, annual_kg=kg)
    assert b.lcoh * b.annual_kg == pytest.approx(b.total, rel=1e-12, abs=1e-9)
    assert b.capex + b.opex == pytest.approx(b.total, rel=1e-12, abs=1e-9)
    if b.total > 0:
        assert b.capex_share + b.opex_share == pytest.approx(1.0)
        if b.capex_share > 0.5:
            assert b.capex > b.opex
