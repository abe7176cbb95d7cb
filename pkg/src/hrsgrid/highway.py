"""Highway network, OD shortest paths and arc-cover candidate sets."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .errors import DomainError, UnreachableError, ValidationError

EARTH_RADIUS_KM = 6371.0


@dataclass(frozen=True)
class GeoNode:
    id: str
    lat: float
    lon: float
    is_candidate: bool = True

    def __post_init__(self):
        if not -90.0 <= self.lat <= 90.0:
            raise ValidationError(f"node {self.id}: latitude {self.lat} out of range")
        if not -180.0 <= self.lon <= 180.0:
            raise ValidationError(f"node {self.id}: longitude {self.lon} out of range")


@dataclass(frozen=True)
class ODTrip:
    id: str
    origin: str
    destination: str
    flow: float

    def __post_init__(self):
        if not self.flow > 0:
            raise ValidationError(f"trip {self.id}: flow must be positive")
        if self.origin == self.destination:
            raise ValidationError(f"trip {self.id}: origin equals destination")


@dataclass(frozen=True)
class TripPath:
    trip_id: str
    node_sequence: tuple[str, ...]
    arcs: tuple[tuple[str, str], ...]
    arc_lengths: tuple[float, ...]
    total_distance: float
    refuel_occasions: int = 1

    def cumulative(self) -> list[float]:
        """Path distance from the origin to each node of ``node_sequence``."""
        out = [0.0]
        for length in self.arc_lengths:
            out.append(out[-1] + length)
        return out


@dataclass(frozen=True)
class CandidateSet:
    trip_id: str
    arc: tuple[str, str]
    members: tuple[str, ...]
    pre_covered: bool


@dataclass
class HighwayNetwork:
    nodes: list[GeoNode]
    edges: list[tuple[str, str, float]]
    _adj: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate node ids in highway network")
        known = set(ids)
        adj = {i: {} for i in ids}
        for a, b, length in self.edges:
            if a not in known or b not in known:
                raise ValidationError(f"edge {a}-{b} references an unknown node")
            if a == b:
                raise ValidationError(f"self-loop at node {a}")
            if not length > 0:
                raise ValidationError(f"edge {a}-{b} has non-positive length {length}")
            # parallel edges collapse to the shorter one
            if b not in adj[a] or length < adj[a][b]:
                adj[a][b] = length
                adj[b][a] = length
        self._adj = adj

    @property
    def node_map(self) -> dict[str, GeoNode]:
        return {n.id: n for n in self.nodes}

    def neighbors(self, node_id) -> dict[str, float]:
        return self._adj[node_id]


def haversine_distance(a: GeoNode, b: GeoNode) -> float:
    """Great-circle distance in km; symmetric by construction."""
    # Order the endpoints so that (a, b) and (b, a) run the exact same arithmetic.
    if (a.lat, a.lon) > (b.lat, b.lon):
        a, b = b, a
    p1, p2 = math.radians(a.lat), math.radians(b.lat)
    dp = p2 - p1
    dl = math.radians(b.lon - a.lon)
    h = math.sin(dp / 2) ** 2 + math.cos(p1) * math.cos(p2) * math.sin(dl / 2) ** 2
    return 2 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(h)))


def shortest_path(net: HighwayNetwork, trip: ODTrip) -> TripPath:
    """Dijkstra from origin to destination.

    Labels are ``(distance, node sequence)`` so that among equal-length routes
    the lexicographically smallest node sequence wins.
    """
    src, dst = trip.origin, trip.destination
    for nid in (src, dst):
        if nid not in net._adj:
            raise UnreachableError(f"trip {trip.id}: node {nid} not in network")
    heap = [(0.0, (src,))]
    settled = set()
    while heap:
        dist, seq = heapq.heappop(heap)
        node = seq[-1]
        if node in settled:
            continue
        settled.add(node)
        if node == dst:
            arcs = tuple(zip(seq[:-1], seq[1:]))
            lengths = tuple(net._adj[a][b] for a, b in arcs)
            return TripPath(trip.id, seq, arcs, lengths, math.fsum(lengths))
        for nxt, length in net._adj[node].items():
            if nxt not in settled:
                heapq.heappush(heap, (_key(dist + length), seq + (nxt,)))
    raise UnreachableError(f"trip {trip.id}: no path from {src} to {dst}")


def _key(d):
    # absorbs float noise so that equal-length routes compare as ties
    return round(d, 9)


def refuel_occasions(total_distance: float, vehicle_range: float) -> int:
    if not vehicle_range > 0:
        raise DomainError("vehicle range must be positive")
    if not total_distance > 0:
        raise DomainError("trip distance must be positive")
    return max(1, math.ceil(total_distance / vehicle_range - 1e-12))


def route_trips(net: HighwayNetwork, trips, vehicle_range: float) -> dict[str, TripPath]:
    """Shortest path with refuel occasions for every trip, keyed by trip id."""
    out = {}
    for trip in trips:
        p = shortest_path(net, trip)
        out[trip.id] = TripPath(p.trip_id, p.node_sequence, p.arcs, p.arc_lengths,
                                p.total_distance,
                                refuel_occasions(p.total_distance, vehicle_range))
    return out


def filter_trips(trips, paths: dict[str, TripPath], min_km: float = 50.0):
    """Keep trips strictly longer than ``min_km`` whose endpoints differ."""
    return [t for t in trips
            if t.origin != t.destination and paths[t.id].total_distance > min_km]


def build_candidate_sets(path: TripPath, vehicle_range: float,
                         initial_fuel_km: float | None = None,
                         candidates=None) -> list[CandidateSet]:
    """Arc-cover sets ``K`` for every directed arc on ``path``.

    A node ``i`` can refuel arc ``(j, k)`` when it is a candidate, sits at or
    before ``j`` on the path and the path distance ``i -> k`` is within range.
    Arcs whose head is reachable on the initial fuel are flagged pre-covered.

    ``candidates`` is a network (its ``is_candidate`` flags are used) or an
    iterable of node ids; ``None`` treats every node on the path as a candidate.
    """
    if not vehicle_range > 0:
        raise DomainError("vehicle range must be positive")
    if initial_fuel_km is None:
        initial_fuel_km = vehicle_range
    candidates = set(path.node_sequence) if candidates is None else _candidate_ids(candidates)
    cum = path.cumulative()
    seq = path.node_sequence
    out = []
    tol = 1e-9
    for pos_j, arc in enumerate(path.arcs):
        pos_k = pos_j + 1
        members = tuple(seq[i] for i in range(pos_j + 1)
                        if seq[i] in candidates and cum[pos_k] - cum[i] <= vehicle_range + tol)
        pre = cum[pos_k] <= initial_fuel_km + tol
        out.append(CandidateSet(path.trip_id, arc, members, pre))
    return out


def _candidate_ids(obj):
    if isinstance(obj, HighwayNetwork):
        return {n.id for n in obj.nodes if n.is_candidate}
    return set(obj)
