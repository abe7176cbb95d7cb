"""Hand-built and seeded instances shared by the test modules."""

import random

import numpy as np

from hrsgrid.frlm import FrlmConfig
from hrsgrid.highway import (GeoNode, HighwayNetwork, ODTrip, build_candidate_sets, filter_trips,
                             route_trips)


def t1_network():
    nodes = [GeoNode("A", 50.0, 8.0), GeoNode("B", 50.0, 9.4), GeoNode("C", 50.0, 10.8)]
    return HighwayNetwork(nodes, [("A", "B", 100.0), ("B", "C", 100.0)])


def t1(capacity=30000.0):
    """Line A-B-C of 100 km arcs, one trip A->C with 100 trucks/day, range 250 km."""
    net = t1_network()
    trips = [ODTrip("q1", "A", "C", 100.0)]
    cfg = FrlmConfig(range_km=250.0, node_capacity=capacity)
    return prepare(net, trips, cfg)


def prepare(net, trips, cfg, min_km=0.0):
    paths = route_trips(net, trips, cfg.range_km)
    kept = filter_trips(trips, paths, min_km)
    sets = {t.id: build_candidate_sets(paths[t.id], cfg.range_km, cfg.initial_fuel, net)
            for t in kept}
    return net, kept, paths, sets, cfg


def random_frlm(seed):
    """Connected graph with <= 8 nodes and <= 6 trips; capacity sometimes binds."""
    rng = random.Random(seed)
    n = rng.randint(3, 8)
    names = [f"v{k}" for k in range(n)]
    nodes = [GeoNode(v, 50.0 + rng.random(), 8.0 + rng.random(), rng.random() > 0.15)
             for v in names]
    edges = []
    for k in range(1, n):
        edges.append((names[rng.randrange(k)], names[k], float(rng.randint(40, 200))))
    for _ in range(rng.randint(0, n)):
        a, b = rng.sample(names, 2)
        edges.append((a, b, float(rng.randint(40, 200))))
    net = HighwayNetwork(nodes, edges)
    trips = []
    for k in range(rng.randint(1, 6)):
        o, d = rng.sample(names, 2)
        trips.append(ODTrip(f"q{k}", o, d, float(rng.randint(10, 200))))
    vrange = float(rng.choice([150, 200, 250, 300, 400]))
    fuel = rng.choice([None, vrange, 0.5 * vrange])
    cap = rng.choice([1500.0, 3000.0, 6000.0, 30000.0])
    cfg = FrlmConfig(range_km=vrange, node_capacity=cap, initial_fuel_km=fuel)
    return prepare(net, trips, cfg)


# -- power systems ---------------------------------------------------------------

from hrsgrid.power.components import (AcLine, Bus, Generator, PowerSystem,  # noqa: E402
                                      make_generator)


def flat(T, value):
    return np.full(T, float(value))


def one_bus_gas(T=4, load=1.0, co2_cap=None):
    w = flat(T, 8760.0 / T)
    g = make_generator("gas", "b0", "OCGT")
    return PowerSystem([Bus("b0", 50.0, 8.0, flat(T, load))], w, generators=[g], co2_cap=co2_cap)


def flat_price_bus(T=6, price=50.0, load=100.0):
    """Single bus whose only generator has no capex, so every LMP equals ``price``."""
    w = flat(T, 8760.0 / T)
    g = Generator("cheap", "b0", "gas", capex=0.0, vom=price)
    return PowerSystem([Bus("b0", 50.0, 8.0, flat(T, load))], w, generators=[g])


def two_bus(T=4, existing=1000.0, max_capacity=None, load=300.0, x=0.01):
    """Cheap zero-capex generation at b0, dear generation at b1, load at b1."""
    w = flat(T, 8760.0 / T)
    buses = [Bus("b0", 54.0, 9.0, flat(T, 0.0)), Bus("b1", 48.0, 9.0, flat(T, load))]
    gens = [Generator("north", "b0", "wind", capex=0.0, vom=10.0),
            Generator("south", "b1", "gas", capex=0.0, vom=80.0)]
    line = AcLine("l0", "b0", "b1", 600.0, x, existing, max_capacity)
    return PowerSystem(buses, w, [line], [], gens)


def synth_small(seed, T=24, buses=3, co2_cap=None):
    from hrsgrid.synth import synth_power
    rng = np.random.default_rng(seed)
    sys = synth_power(rng, buses, T, 2.0)
    sys.co2_cap = co2_cap
    return sys


def sites_near(sys, dailies, seed=0, jitter=0.2):
    """One refueling site per entry of ``dailies`` scattered around the buses."""
    from hrsgrid.catalog import HrsSite
    rng = np.random.default_rng(seed)
    out = []
    for k, daily in enumerate(dailies):
        b = sys.buses[k % len(sys.buses)]
        out.append(HrsSite(f"s{k}", round(b.lat + rng.uniform(-jitter, jitter), 5),
                           round(b.lon + rng.uniform(-jitter, jitter), 5), float(daily)))
    return out
