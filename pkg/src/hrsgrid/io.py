"""CSV ingestion and export (CSV, GeoJSON, SVG).

All readers report problems as :class:`ParseError` with the file and line.
Floats are written with ``repr`` so that every emitted CSV reads back
bit-identically.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from .errors import InputError, ParseError
from .highway import GeoNode, HighwayNetwork, ODTrip
from .power.components import (AcLine, Bus, DcLink, Generator, PowerSystem, StorageUnit,
                               make_generator, make_storage)


def fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
    return path


def read_rows(path, required=()):
    """Yield ``(line_number, row_dict)``; checks the header first."""
    path = Path(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise ParseError(path, 0, f"cannot open: {exc.strerror}") from None
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if not header:
            raise ParseError(path, 1, "missing header row")
        header = [h.strip() for h in header]
        reader.fieldnames = header
        missing = [c for c in required if c not in header]
        if missing:
            raise ParseError(path, 1, f"missing column(s) {', '.join(missing)}")
        for row in reader:
            if None in row:
                raise ParseError(path, reader.line_num, "too many fields")
            if any(v is None for v in row.values()):
                raise ParseError(path, reader.line_num, "too few fields")
            yield reader.line_num, {k: v.strip() for k, v in row.items()}


def _num(path, line, row, key, default=None, kind=float):
    raw = row.get(key, "")
    if raw == "":
        if default is not None:
            return default
        raise ParseError(path, line, f"empty value for {key}")
    try:
        return kind(raw)
    except ValueError:
        raise ParseError(path, line, f"{key}: not a number: {raw!r}") from None


def _wrap(path, line, fn, *args, **kwargs):
    # domain validation errors raised by constructors keep their line number
    try:
        return fn(*args, **kwargs)
    except (InputError, ValueError, TypeError) as exc:
        raise ParseError(path, line, str(exc)) from None


# -- highway ---------------------------------------------------------------------

def read_nodes(path) -> list[GeoNode]:
    out = []
    for line, r in read_rows(path, ("id", "lat", "lon")):
        cand = r.get("is_candidate", "1") or "1"
        if cand.lower() not in ("0", "1", "true", "false"):
            raise ParseError(path, line, f"is_candidate: expected 0/1, got {cand!r}")
        out.append(_wrap(path, line, GeoNode, r["id"], _num(path, line, r, "lat"),
                         _num(path, line, r, "lon"), cand.lower() in ("1", "true")))
    return out


def read_edges(path) -> list[tuple[str, str, float]]:
    out = []
    for line, r in read_rows(path, ("from", "to", "length_km")):
        length = _num(path, line, r, "length_km")
        if not length > 0:
            raise ParseError(path, line, "length_km must be positive")
        out.append((r["from"], r["to"], length))
    return out


def read_trips(path) -> list[ODTrip]:
    return [_wrap(path, line, ODTrip, r["id"], r["origin"], r["destination"],
                  _num(path, line, r, "flow_per_day"))
            for line, r in read_rows(path, ("id", "origin", "destination", "flow_per_day"))]


def read_highway(directory):
    d = Path(directory)
    nodes, edges = read_nodes(d / "nodes.csv"), read_edges(d / "edges.csv")
    trips = read_trips(d / "trips.csv")
    return HighwayNetwork(nodes, edges), trips


def write_highway(directory, net: HighwayNetwork, trips):
    d = Path(directory)
    write_csv(d / "nodes.csv", ("id", "lat", "lon", "is_candidate"),
              [(n.id, n.lat, n.lon, n.is_candidate) for n in net.nodes])
    write_csv(d / "edges.csv", ("from", "to", "length_km"), net.edges)
    write_csv(d / "trips.csv", ("id", "origin", "destination", "flow_per_day"),
              [(t.id, t.origin, t.destination, t.flow) for t in trips])


# -- power -----------------------------------------------------------------------

GENERATOR_COLUMNS = ("capex", "fom_pct", "vom", "efficiency", "fuel_cost", "co2_intensity",
                     "lifetime", "p_nom_min", "p_nom_max")
STORAGE_COLUMNS = ("power_capex", "energy_capex", "eta_charge", "eta_discharge", "lifetime",
                   "fom_pct", "energy_lifetime", "energy_fom_pct", "max_hours", "p_nom_min",
                   "p_nom_max", "e_nom_max")


def _overrides(path, line, row, columns):
    return {c: _num(path, line, row, c) for c in columns if row.get(c, "") != ""}


def _matrix(path, snapshots=None):
    """snapshot x column matrix -> (snapshot labels, {column: array})."""
    labels, cols = [], {}
    for line, r in read_rows(path, ("snapshot",)):
        labels.append(r["snapshot"])
        for k, v in r.items():
            if k == "snapshot":
                continue
            cols.setdefault(k, []).append(_num(path, line, r, k))
    if snapshots is not None and labels != list(snapshots):
        raise ParseError(path, 2, "snapshots differ from snapshots.csv")
    return labels, {k: np.array(v) for k, v in cols.items()}


def read_power(directory, snapshot_hours=None, co2_cap=None, discount_rate=0.07) -> PowerSystem:
    """Read a power system directory.

    ``snapshots.csv`` (snapshot, weight_h) sets the time axis; without it the
    rows of ``loads.csv`` define the snapshots and each gets ``snapshot_hours``.
    """
    d = Path(directory)
    buses = [_wrap(d / "buses.csv", line, Bus, r["id"], _num(d / "buses.csv", line, r, "lat"),
                   _num(d / "buses.csv", line, r, "lon"))
             for line, r in read_rows(d / "buses.csv", ("id", "lat", "lon"))]
    snaps = weights = None
    if (d / "snapshots.csv").exists():
        rows = list(read_rows(d / "snapshots.csv", ("snapshot", "weight_h")))
        snaps = [r["snapshot"] for _, r in rows]
        weights = np.array([_num(d / "snapshots.csv", line, r, "weight_h") for line, r in rows])
    if (d / "loads.csv").exists():
        labels, loads = _matrix(d / "loads.csv", snaps)
        if snaps is None:
            if snapshot_hours is None:
                raise ParseError(d / "loads.csv", 0, "no snapshots.csv and no snapshot_hours set")
            snaps, weights = labels, np.full(len(labels), float(snapshot_hours))
        by_id = {b.id: b for b in buses}
        for k, v in loads.items():
            if k not in by_id:
                raise ParseError(d / "loads.csv", 1, f"unknown bus column {k!r}")
            by_id[k].load = v
    if snaps is None:
        raise ParseError(d / "snapshots.csv", 0, "no snapshots defined")

    lines, links, gens, stores = [], [], [], []
    p = d / "lines.csv"
    if p.exists():
        for line, r in read_rows(p, ("id", "bus0", "bus1", "length_km", "reactance", "existing_mw")):
            mx = _num(p, line, r, "max_mw") if r.get("max_mw", "") != "" else None
            lines.append(AcLine(r["id"], r["bus0"], r["bus1"], _num(p, line, r, "length_km"),
                                _num(p, line, r, "reactance"), _num(p, line, r, "existing_mw"),
                                mx, **_overrides(p, line, r, ("capex_per_mw_km",))))
    p = d / "links.csv"
    if p.exists():
        for line, r in read_rows(p, ("id", "bus0", "bus1", "length_km")):
            kw = _overrides(p, line, r, ("capex_per_mw_km", "inverter_capex"))
            if r.get("existing_mw", "") != "":
                kw["existing_capacity"] = _num(p, line, r, "existing_mw")
            if r.get("max_mw", "") != "":
                kw["max_capacity"] = _num(p, line, r, "max_mw")
            links.append(DcLink(r["id"], r["bus0"], r["bus1"], _num(p, line, r, "length_km"), **kw))
    avail = {}
    adir = d / "availability"
    if adir.is_dir():
        for f in sorted(adir.glob("*.csv")):
            avail[f.stem] = _matrix(f, snaps)[1]
    p = d / "generators.csv"
    if p.exists():
        for line, r in read_rows(p, ("id", "bus", "carrier")):
            kw = _overrides(p, line, r, GENERATOR_COLUMNS)
            a = avail.get(r["carrier"], {}).get(r["bus"])
            try:
                g = make_generator(r["id"], r["bus"], r["carrier"], availability=a, **kw)
            except KeyError:
                if "capex" not in kw:
                    raise ParseError(p, line, f"unknown carrier {r['carrier']!r} and no capex given") from None
                g = Generator(r["id"], r["bus"], r["carrier"], availability=a, **kw)
            gens.append(g)
    p = d / "storages.csv"
    if p.exists():
        for line, r in read_rows(p, ("id", "bus", "kind")):
            kw = _overrides(p, line, r, STORAGE_COLUMNS)
            try:
                s = make_storage(r["id"], r["bus"], r["kind"], **kw)
            except KeyError:
                if "power_capex" not in kw:
                    raise ParseError(p, line, f"unknown storage kind {r['kind']!r}") from None
                s = StorageUnit(r["id"], r["bus"], r["kind"], **kw)
            stores.append(s)
    return PowerSystem(buses, weights, lines, links, gens, stores, co2_cap=co2_cap,
                       discount_rate=discount_rate)


def write_power(directory, sys: PowerSystem):
    """Write ``sys`` in the layout :func:`read_power` reads.

    Availability is stored per (carrier, bus); generators sharing both
    must share their series.
    """
    d = Path(directory)
    T = sys.snapshots
    snaps = [f"t{t}" for t in range(T)]
    write_csv(d / "buses.csv", ("id", "lat", "lon"), [(b.id, b.lat, b.lon) for b in sys.buses])
    write_csv(d / "snapshots.csv", ("snapshot", "weight_h"), zip(snaps, map(float, sys.weights)))
    loads = [sys.load(b) for b in sys.buses]
    write_csv(d / "loads.csv", ["snapshot"] + [b.id for b in sys.buses],
              ([snaps[t]] + [float(l[t]) for l in loads] for t in range(T)))
    write_csv(d / "lines.csv", ("id", "bus0", "bus1", "length_km", "reactance", "existing_mw",
                                "max_mw", "capex_per_mw_km"),
              [(l.id, l.bus0, l.bus1, float(l.length_km), float(l.reactance),
                float(l.existing_capacity), float(l.max_capacity), float(l.capex_per_mw_km))
               for l in sys.lines])
    write_csv(d / "links.csv", ("id", "bus0", "bus1", "length_km", "existing_mw", "max_mw",
                                "capex_per_mw_km", "inverter_capex"),
              [(l.id, l.bus0, l.bus1, float(l.length_km), float(l.existing_capacity),
                float(l.max_capacity), float(l.capex_per_mw_km), float(l.inverter_capex))
               for l in sys.links])
    write_csv(d / "generators.csv", ("id", "bus", "carrier") + GENERATOR_COLUMNS,
              [(g.id, g.bus, g.carrier) + tuple(float(getattr(g, c)) for c in GENERATOR_COLUMNS)
               for g in sys.generators])
    write_csv(d / "storages.csv", ("id", "bus", "kind") + STORAGE_COLUMNS,
              [(s.id, s.bus, s.kind) + tuple("" if getattr(s, c) is None else float(getattr(s, c))
                                             for c in STORAGE_COLUMNS)
               for s in sys.storages])
    series = {}
    for g in sys.generators:
        if g.availability is not None:
            series.setdefault(g.carrier, {}).setdefault(g.bus, np.asarray(g.availability, float))
    for carrier, cols in sorted(series.items()):
        buses = sorted(cols)
        write_csv(d / "availability" / f"{carrier}.csv", ["snapshot"] + buses,
                  ([snaps[t]] + [float(cols[b][t]) for b in buses] for t in range(T)))


# -- results ---------------------------------------------------------------------

def read_stations(path, net: HighwayNetwork | None = None):
    """(node_id, open, load_kg_per_day) rows, as written by :func:`write_stations`."""
    out = []
    for line, r in read_rows(path, ("node_id", "open", "load_kg_per_day")):
        out.append((r["node_id"], r["open"] == "1", _num(path, line, r, "load_kg_per_day")))
    return out


def write_stations(path, solution, net: HighwayNetwork):
    rows = []
    for n in sorted(net.nodes, key=lambda n: n.id):
        if not n.is_candidate:
            continue
        is_open = n.id in solution.stations
        rows.append((n.id, is_open, float(solution.node_load.get(n.id, 0.0)) if is_open else 0.0))
    return write_csv(path, ("node_id", "open", "load_kg_per_day"), rows)


def write_geojson(path, features):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"type": "FeatureCollection", "features": features}
    path.write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path


def point(lat, lon, **props):
    return {"type": "Feature", "geometry": {"type": "Point", "coordinates": [lon, lat]},
            "properties": props}


def stations_geojson(path, solution, net: HighwayNetwork):
    nodes = net.node_map
    feats = [point(nodes[i].lat, nodes[i].lon, id=i, load_kg_per_day=solution.node_load.get(i, 0.0))
             for i in solution.stations]
    return write_geojson(path, feats)


def bar_chart_svg(path, values: dict, title="", unit=""):
    """Horizontal bar chart as a standalone SVG file."""
    width, bar_h, left, pad = 640, 26, 190, 12
    height = pad * 3 + 20 + bar_h * len(values)
    vmax = max([abs(v) for v in values.values()] + [1e-12])
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'font-family="sans-serif" font-size="12">',
             f'<text x="{pad}" y="{pad + 12}" font-weight="bold">{_esc(title)}</text>']
    for k, (label, v) in enumerate(values.items()):
        y = pad * 2 + 20 + k * bar_h
        w = (width - left - 120) * abs(v) / vmax
        parts.append(f'<text x="{pad}" y="{y + 16}">{_esc(label)}</text>')
        parts.append(f'<rect x="{left}" y="{y + 3}" width="{w:.2f}" height="{bar_h - 8}" '
                     f'fill="#4477aa"/>')
        parts.append(f'<text x="{left + w + 6:.2f}" y="{y + 16}">{v:.4g} {_esc(unit)}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n", encoding="utf-8")
    return path


def _esc(s):
    return str(s).replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")
