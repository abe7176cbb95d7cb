"""Seeded synthetic instances: a highway grid with truck trips and a small
power network with solar/wind availability and loads.

Everything is drawn from one ``numpy.random.Generator`` so a seed fixes the
output byte for byte.
"""

from __future__ import annotations

import math

import numpy as np

from .frlm import FrlmConfig
from .highway import (GeoNode, HighwayNetwork, ODTrip, build_candidate_sets, haversine_distance,
                      route_trips)
from .lp import EQ, LinearProgram, Status, solve_lp
from .power.components import AcLine, Bus, PowerSystem, make_generator, make_storage

LAT0, LON0 = 47.5, 7.0      # south-west corner
STEP_DEG = 0.8              # grid spacing, roughly 60-90 km


def synth_highway(rng, n_nodes=12, n_trips=10, vehicle_range=400.0, max_tries=200):
    """Jittered grid graph plus trips that each admit a full-coverage refuel plan."""
    cols = math.ceil(math.sqrt(n_nodes))
    nodes, pos = [], {}
    for k in range(n_nodes):
        r, c = divmod(k, cols)
        lat = LAT0 + r * STEP_DEG + rng.uniform(-0.15, 0.15)
        lon = LON0 + c * STEP_DEG * 1.4 + rng.uniform(-0.2, 0.2)
        nid = f"n{k:02d}"
        nodes.append(GeoNode(nid, round(lat, 5), round(lon, 5)))
        pos[r, c] = nid
    by_id = {n.id: n for n in nodes}
    edges = []
    for (r, c), a in sorted(pos.items()):
        for nb in ((r, c + 1), (r + 1, c)):
            if nb in pos:
                b = pos[nb]
                detour = 1.0 + rng.uniform(0.0, 0.15)
                edges.append((a, b, round(haversine_distance(by_id[a], by_id[b]) * detour, 3)))
    net = HighwayNetwork(nodes, edges)
    trips, k = [], 0
    ids = [n.id for n in nodes]
    for _ in range(max_tries):
        if len(trips) >= n_trips:
            break
        o, d = rng.choice(len(ids), size=2, replace=False)
        trip = ODTrip(f"q{k:02d}", ids[o], ids[d], float(rng.integers(10, 120)))
        k += 1
        if single_trip_feasible(net, trip, vehicle_range):
            trips.append(trip)
    return net, trips


def single_trip_feasible(net, trip, vehicle_range) -> bool:
    """Can the trip be refueled with every node open? (capacity ignored)"""
    path = route_trips(net, [trip], vehicle_range)[trip.id]
    sets = build_candidate_sets(path, vehicle_range)
    lp = LinearProgram("trip_check")
    x = {i: lp.add_variable(i, 0, 1) for i in path.node_sequence}
    for cs in sets:
        if cs.pre_covered:
            continue
        if not cs.members:
            return False
        lp.add_constraint(f"arc{cs.arc}", {x[i]: 1.0 for i in cs.members}, EQ, 1.0)
    lp.add_constraint("trip", {v: 1.0 for v in x.values()}, EQ, float(path.refuel_occasions))
    return solve_lp(lp).status == Status.OPTIMAL


def solar_profile(snapshots, hours_per_snapshot, lat):
    h = (np.arange(snapshots) + 0.5) * hours_per_snapshot
    hod = np.mod(h, 24.0)
    peak = 0.75 - 0.01 * (lat - LAT0)
    return np.clip(peak * np.sin(np.pi * (hod - 6.0) / 12.0), 0.0, 1.0)


def wind_profile(rng, snapshots, mean):
    # AR(1) noise around a bus-specific mean, clipped to [0, 1]
    z = np.zeros(snapshots)
    eps = rng.normal(0.0, 0.12, snapshots)
    for t in range(snapshots):
        z[t] = 0.85 * z[t - 1] + eps[t] if t else eps[t]
    return np.clip(mean + z, 0.0, 1.0)


def synth_power(rng, n_buses=4, snapshots=84, hours_per_snapshot=2.0, lat_span=None):
    """North-south chain of buses (index 0 is the south); wind is stronger up north."""
    lat_span = lat_span or (LAT0, LAT0 + 3 * STEP_DEG)
    lats = np.linspace(lat_span[0], lat_span[1], n_buses)
    weights = np.full(snapshots, 8760.0 / snapshots)
    h = np.arange(snapshots) * hours_per_snapshot
    daily = 1.0 + 0.25 * np.sin(2 * np.pi * (np.mod(h, 24.0) - 8.0) / 24.0)
    buses, gens, stores, lines = [], [], [], []
    for k in range(n_buses):
        bid = f"b{k}"
        lon = LON0 + 1.5 + rng.uniform(-0.5, 0.5)
        north = k / max(1, n_buses - 1)
        base = rng.uniform(400.0, 900.0) * (1.5 - north)     # load concentrated in the south
        buses.append(Bus(bid, round(float(lats[k]), 5), round(float(lon), 5),
                         np.round(base * daily, 6)))
        gens.append(make_generator(f"{bid}-solar", bid, "solar",
                                   availability=np.round(solar_profile(snapshots, hours_per_snapshot,
                                                                       lats[k]), 6)))
        gens.append(make_generator(f"{bid}-onwind", bid, "onwind",
                                   availability=np.round(wind_profile(rng, snapshots,
                                                                      0.2 + 0.3 * north), 6)))
        gens.append(make_generator(f"{bid}-OCGT", bid, "OCGT"))
        stores.append(make_storage(f"{bid}-battery", bid, "battery"))
    for k in range(n_buses - 1):
        a, b = buses[k], buses[k + 1]
        length = round(haversine_distance(GeoNode(a.id, a.lat, a.lon),
                                          GeoNode(b.id, b.lat, b.lon)) * 1.1, 3)
        lines.append(AcLine(f"l{k}", a.id, b.id, length, reactance=round(1e-4 * length, 9),
                            existing_capacity=float(rng.integers(3, 12) * 100)))
    return PowerSystem(buses, weights, lines, [], gens, stores)


def synth_instance(seed=0, n_nodes=12, n_trips=10, n_buses=4, snapshots=84,
                   hours_per_snapshot=2.0, vehicle_range=400.0):
    """(highway network, trips, power system) for one seed."""
    rng = np.random.default_rng(seed)
    net, trips = synth_highway(rng, n_nodes, n_trips, vehicle_range)
    lats = [n.lat for n in net.nodes]
    sys = synth_power(rng, n_buses, snapshots, hours_per_snapshot, (min(lats), max(lats)))
    return net, trips, sys


def default_frlm(vehicle_range=400.0) -> FrlmConfig:
    return FrlmConfig(range_km=vehicle_range)
