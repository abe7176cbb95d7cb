import math
import random

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from hrsgrid.errors import DomainError, UnreachableError, ValidationError
from hrsgrid.highway import (GeoNode, HighwayNetwork, ODTrip, TripPath, build_candidate_sets,
                             filter_trips, haversine_distance, refuel_occasions, route_trips,
                             shortest_path)
from oracles import great_circle_cosines

lat = st.floats(-89.9, 89.9)
lon = st.floats(-179.9, 179.9)


def line(names, length):
    nodes = [GeoNode(n, 50.0, 8.0 + k) for k, n in enumerate(names)]
    edges = [(a, b, length) for a, b in zip(names, names[1:])]
    return HighwayNetwork(nodes, edges)


def random_graph(seed, n):
    rng = random.Random(seed)
    nodes = [GeoNode(f"v{k}", 50.0, 8.0) for k in range(n)]
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.45:
                # integer lengths make ties common
                edges.append((f"v{a}", f"v{b}", float(rng.randint(1, 6) * 10)))
    return HighwayNetwork(nodes, edges)


def to_nx(net):
    g = nx.Graph()
    g.add_nodes_from(n.id for n in net.nodes)
    for a, b, w in net.edges:
        if not g.has_edge(a, b) or g[a][b]["weight"] > w:
            g.add_edge(a, b, weight=w)
    return g


def test_haversine_coincident_is_zero():
    a = GeoNode("a", 48.1, 11.5)
    assert haversine_distance(a, a) == 0.0


def test_haversine_berlin_munich_against_cosine_law():
    berlin, munich = GeoNode("B", 52.52, 13.405), GeoNode("M", 48.137, 11.575)
    ref = great_circle_cosines(52.52, 13.405, 48.137, 11.575)
    d = haversine_distance(berlin, munich)
    assert d == haversine_distance(munich, berlin)
    assert abs(d - ref) / ref < 1e-3
    assert 500 < d < 510


def test_haversine_antipodes_half_circumference():
    d = haversine_distance(GeoNode("a", 0, 0), GeoNode("b", 0, 180))
    assert d == pytest.approx(math.pi * 6371.0, abs=1.0)


@settings(max_examples=200, deadline=None)
@given(lat, lon, lat, lon)
def test_haversine_symmetric_and_matches_oracle(la1, lo1, la2, lo2):
    a, b = GeoNode("a", la1, lo1), GeoNode("b", la2, lo2)
    d = haversine_distance(a, b)
    assert d == haversine_distance(b, a)
    assert d >= 0
    # the cosine law loses precision for tiny angles; compare absolutely there
    assert d == pytest.approx(great_circle_cosines(la1, lo1, la2, lo2), rel=1e-6, abs=1e-3)


def test_bad_coordinates_rejected():
    with pytest.raises(ValidationError):
        GeoNode("x", 91.0, 0.0)
    with pytest.raises(ValidationError):
        GeoNode("x", 0.0, -181.0)


def test_single_edge_path():
    net = line("AB", 100.0)
    p = shortest_path(net, ODTrip("q", "A", "B", 1.0))
    assert p.node_sequence == ("A", "B")
    assert p.total_distance == 100.0


def test_diamond_tie_breaks_lexicographically():
    nodes = [GeoNode(n, 50, 8) for n in "ABCD"]
    # A-C-D and A-B-D both 20 km; A-B-D is lexicographically smaller
    net = HighwayNetwork(nodes, [("A", "C", 10.0), ("C", "D", 10.0), ("A", "B", 10.0),
                                 ("B", "D", 10.0)])
    assert shortest_path(net, ODTrip("q", "A", "D", 1.0)).node_sequence == ("A", "B", "D")
    assert shortest_path(net, ODTrip("q", "D", "A", 1.0)).node_sequence == ("D", "B", "A")


def test_tie_break_survives_float_noise():
    nodes = [GeoNode(n, 50, 8) for n in "ABCD"]
    net = HighwayNetwork(nodes, [("A", "C", 0.1), ("C", "D", 0.2), ("A", "B", 0.2),
                                 ("B", "D", 0.1)])
    # 0.1 + 0.2 and 0.2 + 0.1 are the same length
    assert shortest_path(net, ODTrip("q", "A", "D", 1.0)).node_sequence == ("A", "B", "D")


@pytest.mark.parametrize("seed", range(40))
def test_shortest_path_matches_simple_path_enumeration(seed):
    n = 5 + seed % 6
    net = random_graph(seed, n)
    g = to_nx(net)
    rng = random.Random(1000 + seed)
    ids = [v.id for v in net.nodes]
    for _ in range(5):
        o, d = rng.sample(ids, 2)
        trip = ODTrip("q", o, d, 1.0)
        candidates = list(nx.all_simple_paths(g, o, d))
        if not candidates:
            with pytest.raises(UnreachableError):
                shortest_path(net, trip)
            continue
        lengths = [sum(g[a][b]["weight"] for a, b in zip(p, p[1:])) for p in candidates]
        best = min(lengths)
        best_seqs = sorted(tuple(p) for p, l in zip(candidates, lengths) if abs(l - best) < 1e-9)
        path = shortest_path(net, trip)
        assert path.total_distance == pytest.approx(best)
        assert path.node_sequence == best_seqs[0]


@pytest.mark.parametrize("seed", range(10))
def test_triangle_property(seed):
    net = random_graph(seed, 8)
    g = to_nx(net)
    dist = dict(nx.all_pairs_dijkstra_path_length(g))
    ids = [v.id for v in net.nodes]
    for o in ids:
        for d in ids:
            if o == d or d not in dist[o]:
                continue
            od = shortest_path(net, ODTrip("q", o, d, 1.0)).total_distance
            for m in ids:
                if m in (o, d) or m not in dist[o]:
                    continue
                om = shortest_path(net, ODTrip("q", o, m, 1.0)).total_distance
                md = shortest_path(net, ODTrip("q", m, d, 1.0)).total_distance
                assert od <= om + md + 1e-9


def test_unreachable_and_unknown_nodes():
    nodes = [GeoNode(n, 50, 8) for n in "ABC"]
    net = HighwayNetwork(nodes, [("A", "B", 10.0)])
    with pytest.raises(UnreachableError):
        shortest_path(net, ODTrip("q", "A", "C", 1.0))
    with pytest.raises(UnreachableError):
        shortest_path(net, ODTrip("q", "A", "Z", 1.0))


def test_network_validation():
    nodes = [GeoNode(n, 50, 8) for n in "AB"]
    with pytest.raises(ValidationError):
        HighwayNetwork(nodes, [("A", "Z", 10.0)])
    with pytest.raises(ValidationError):
        HighwayNetwork(nodes, [("A", "B", 0.0)])
    with pytest.raises(ValidationError):
        HighwayNetwork(nodes + [GeoNode("A", 1, 1)], [])
    with pytest.raises(ValidationError):
        ODTrip("q", "A", "B", 0.0)


@pytest.mark.parametrize("d,r,expected", [(200, 250, 1), (1000, 400, 3), (400, 400, 1),
                                          (400.0000001, 400, 2), (1, 1000, 1)])
def test_refuel_occasions(d, r, expected):
    assert refuel_occasions(d, r) == expected


def test_refuel_occasions_domain():
    with pytest.raises(DomainError):
        refuel_occasions(100, 0)
    with pytest.raises(DomainError):
        refuel_occasions(100, -5)


@given(st.floats(1, 5000), st.floats(1, 5000), st.floats(10, 1000), st.floats(10, 1000))
def test_refuel_occasions_monotone(d1, d2, r1, r2):
    d1, d2 = sorted((d1, d2))
    r1, r2 = sorted((r1, r2))
    assert refuel_occasions(d1, r1) <= refuel_occasions(d2, r1)
    assert refuel_occasions(d1, r1) >= refuel_occasions(d1, r2)


def _path(trip_id, dist):
    return TripPath(trip_id, ("A", "B"), (("A", "B"),), (dist,), dist)


def test_filter_trips_threshold():
    trips = [ODTrip("short", "A", "B", 1.0), ODTrip("long", "A", "B", 1.0)]
    paths = {"short": _path("short", 49.0), "long": _path("long", 51.0)}
    assert [t.id for t in filter_trips(trips, paths)] == ["long"]
    assert filter_trips([], {}) == []
    # exactly 50 km is not longer than 50 km
    assert filter_trips([trips[0]], {"short": _path("short", 50.0)}) == []


def test_candidate_sets_short_arcs():
    net = line("ABC", 100.0)
    path = route_trips(net, [ODTrip("q", "A", "C", 1.0)], 250)["q"]
    sets = build_candidate_sets(path, 250, 250)
    assert [(cs.arc, cs.members, cs.pre_covered) for cs in sets] == [
        (("A", "B"), ("A",), True),
        (("B", "C"), ("A", "B"), True),
    ]


def test_candidate_sets_long_arcs():
    net = line("ABC", 200.0)
    path = route_trips(net, [ODTrip("q", "A", "C", 1.0)], 250)["q"]
    sets = build_candidate_sets(path, 250, 250)
    assert sets[1].arc == ("B", "C")
    assert sets[1].members == ("B",)
    assert sets[1].pre_covered is False
    assert sets[0].pre_covered is True


def test_candidate_sets_respect_candidate_flags():
    nodes = [GeoNode("A", 50, 8), GeoNode("B", 50, 9, is_candidate=False), GeoNode("C", 50, 10)]
    net = HighwayNetwork(nodes, [("A", "B", 100.0), ("B", "C", 100.0)])
    path = route_trips(net, [ODTrip("q", "A", "C", 1.0)], 250)["q"]
    sets = build_candidate_sets(path, 250, 250, net)
    assert sets[1].members == ("A",)
    assert build_candidate_sets(path, 250, 250, {"B"})[1].members == ("B",)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(5, 300), min_size=1, max_size=8), st.floats(50, 800),
       st.floats(0.1, 1.0))
def test_candidate_set_properties(lengths, rng_km, fuel_share):
    names = [f"n{k}" for k in range(len(lengths) + 1)]
    nodes = [GeoNode(n, 50, 8) for n in names]
    net = HighwayNetwork(nodes, [(a, b, l) for a, b, l in zip(names, names[1:], lengths)])
    path = shortest_path(net, ODTrip("q", names[0], names[-1], 1.0))
    sets = build_candidate_sets(path, rng_km, rng_km * fuel_share)
    cum = path.cumulative()
    assert len(sets) == len(path.arcs)
    for pos, cs in enumerate(sets):
        assert set(cs.members) <= set(path.node_sequence)
        # members are exactly the nodes at or before the tail within range of the head
        expected = tuple(path.node_sequence[i] for i in range(pos + 1)
                         if cum[pos + 1] - cum[i] <= rng_km + 1e-9)
        assert cs.members == expected
        assert cs.pre_covered == (cum[pos + 1] <= rng_km * fuel_share + 1e-9)


def test_all_pre_covered_when_range_exceeds_path():
    net = line("ABCD", 100.0)
    path = shortest_path(net, ODTrip("q", "A", "D", 1.0))
    assert all(cs.pre_covered for cs in build_candidate_sets(path, 300.0))
