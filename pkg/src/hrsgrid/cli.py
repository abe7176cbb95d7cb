"""``hrsgrid`` command line: site, power, couple, synth, report.

Exit codes: 0 success, 1 input error, 2 infeasible/unbounded, 3 internal error.
Every command writes ``manifest.json`` into its output directory, also when
it fails.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import math
import platform
import sys as _sys
import time
from contextlib import contextmanager
from importlib import metadata
from pathlib import Path

import numpy as np
import scipy

from . import io
from .catalog import ProfileParams, HrsSite, load_catalog
from .config import RunConfig, load_config
from .coupling import ScenarioSpec, StationCosts, run_scenario
from .errors import HrsGridError, InfeasibleError, InputError, ParamError, SolveError, ZeroProductionError
from .frlm import FrlmConfig, build_model, solve_siting, total_fuel
from .highway import build_candidate_sets, filter_trips, route_trips
from .metrics import (CATEGORIES, LcohCosts, extract_lmp, lcoh, mean_lcoh, system_cost_report)
from .power import solve_expansion
from .synth import synth_instance

log = logging.getLogger("hrsgrid")

EXIT_OK, EXIT_INPUT, EXIT_SOLVE, EXIT_INTERNAL = 0, 1, 2, 3


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


class Run:
    """Bookkeeping for one command: stage timings, inputs, manifest."""

    def __init__(self, command, cfg: RunConfig, config_path=None):
        self.command = command
        self.cfg = cfg
        self.out = Path(cfg.out_dir)
        self.stages = []
        self.inputs = {}
        self.status = "ok"
        if config_path:
            self.add_input(config_path)

    def add_input(self, path):
        path = Path(path)
        if path.is_dir():
            for p in sorted(path.rglob("*")):
                if p.is_file():
                    self.inputs[str(p)] = sha256_file(p)
        elif path.is_file():
            self.inputs[str(path)] = sha256_file(path)

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        rec = {"name": name, "status": "ok"}
        self.stages.append(rec)
        try:
            yield rec
        except HrsGridError as exc:
            rec["status"] = exc.code
            exc.stage = getattr(exc, "stage", None) or name
            raise
        except Exception as exc:
            rec["status"] = "INTERNAL"
            exc.stage = name
            raise
        finally:
            rec["seconds"] = round(time.perf_counter() - t0, 6)

    def write_manifest(self, exit_code):
        self.out.mkdir(parents=True, exist_ok=True)
        outputs = {}
        for p in sorted(self.out.rglob("*")):
            if p.is_file() and p.name != "manifest.json":
                outputs[str(p.relative_to(self.out))] = sha256_file(p)
        doc = {
            "command": self.command,
            "config_hash": self.cfg.digest(),
            "config": {k: v for k, v in self.cfg.items()},
            "inputs": self.inputs,
            "outputs": outputs,
            "versions": _versions(),
            "stages": self.stages,
            "status": self.status,
            "exit_code": exit_code,
        }
        (self.out / "manifest.json").write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n",
                                                encoding="utf-8")


def _versions():
    try:
        own = metadata.version("artifact")
    except metadata.PackageNotFoundError:
        own = "unknown"
    return {"python": platform.python_version(), "numpy": np.__version__,
            "scipy": scipy.__version__, "hrsgrid": own}


# -- stages ----------------------------------------------------------------------

def frlm_config(cfg: RunConfig) -> FrlmConfig:
    if not cfg.range_km > 0:
        raise ParamError("range_km must be set to a positive vehicle range")
    return FrlmConfig(cfg.range_km, cfg.fuel_per_km, cfg.node_capacity,
                      cfg.initial_fuel_km if cfg.initial_fuel_km > 0 else None)


def cmd_site(run: Run):
    cfg = run.cfg
    with run.stage("read_highway"):
        fcfg = frlm_config(cfg)
        run.add_input(cfg.highway_dir)
        net, trips = io.read_highway(cfg.highway_dir)
    with run.stage("route"):
        paths = route_trips(net, trips, fcfg.range_km)
        kept = filter_trips(trips, paths, cfg.min_trip_km)
        sets = {t.id: build_candidate_sets(paths[t.id], fcfg.range_km, fcfg.initial_fuel, net)
                for t in kept}
    if not kept:
        log.warning("no trips longer than %s km; no stations needed", cfg.min_trip_km)
    with run.stage("site"):
        model = build_model(paths, sets, kept, fcfg, candidates=net)
        try:
            solution = solve_siting(model)
        except InfeasibleError as exc:
            run.out.mkdir(parents=True, exist_ok=True)
            (run.out / "diagnosis.txt").write_text("\n".join(exc.report) + "\n", encoding="utf-8")
            raise
    with run.stage("write_siting"):
        io.write_stations(run.out / "stations.csv", solution, net)
        if cfg.format == "geojson":
            io.stations_geojson(run.out / "stations.geojson", solution, net)
        loads = [solution.node_load[i] for i in solution.stations]
        io.write_csv(run.out / "siting_summary.csv", ("metric", "value"), [
            ("trips", len(kept)),
            ("stations", len(solution.stations)),
            ("mean_load_kg_per_day", float(np.mean(loads)) if loads else 0.0),
            ("min_load_kg_per_day", float(min(loads)) if loads else 0.0),
            ("max_load_kg_per_day", float(max(loads)) if loads else 0.0),
            ("total_fuel_kg_per_day", total_fuel(kept, paths, fcfg)),
        ])
    return net, solution


def read_power_system(run: Run):
    cfg = run.cfg
    run.add_input(cfg.power_dir)
    return io.read_power(cfg.power_dir, cfg.snapshot_hours,
                         cfg.co2_cap if cfg.co2_cap >= 0 else None, cfg.discount_rate)


def _capacity_rows(case):
    sys = case.system
    rows = []
    for g in sys.generators:
        rows.append(("generator", g.id, g.bus, case.capacity("gen_cap", g.id)))
    for s in sys.storages:
        rows.append(("storage_power", s.id, s.bus, case.capacity("sto_p", s.id)))
        rows.append(("storage_energy", s.id, s.bus, case.capacity("sto_e", s.id)))
    for ln in sys.lines:
        rows.append(("line", ln.id, f"{ln.bus0}-{ln.bus1}", case.line_capacity(ln)))
    for lk in sys.links:
        rows.append(("link", lk.id, f"{lk.bus0}-{lk.bus1}", case.link_capacity(lk)))
    for h in sys.stations:
        rows.append(("electrolyzer", h.id, h.bus, case.capacity("hrs_p", h.id)))
        rows.append(("hrs_storage", h.id, h.bus, case.capacity("hrs_e", h.id)))
    return rows


def write_case(out: Path, tag: str, case, fmt: str):
    io.write_csv(out / f"capacities_{tag}.csv", ("component", "id", "location", "capacity"),
                 _capacity_rows(case))
    lmps = extract_lmp(case)
    io.write_csv(out / f"lmp_{tag}.csv", ("bus", "snapshot", "lmp_eur_per_mwh"),
                 [(s.bus, t, float(p)) for s in lmps for t, p in enumerate(s.prices)])
    io.write_csv(out / f"lmp_summary_{tag}.csv",
                 ("bus", "mean_eur_per_mwh", "median_eur_per_mwh", "variance"),
                 [(s.bus, s.mean, s.median, s.variance) for s in lmps])
    if fmt == "geojson":
        buses = {b.id: b for b in case.system.buses}
        io.write_geojson(out / f"buses_lmp_{tag}.geojson",
                         [io.point(buses[s.bus].lat, buses[s.bus].lon, id=s.bus,
                                   median_lmp=s.median, mean_lmp=s.mean) for s in lmps])


def summary_column(case, lcohs):
    rep = system_cost_report(case)
    sys = case.system
    col = {
        "total_cost_eur_pa": rep.total,
        "relative_cost_eur_per_mwh": rep.relative,
    }
    for k in CATEGORIES:
        col[f"cost_{k}_eur_pa"] = rep.categories[k]
    col["expansion_twkm"] = rep.expansion_twkm
    col["expansion_pct"] = rep.expansion_pct
    col["hrs_electrolyzer_mw"] = math.fsum(case.capacity("hrs_p", h.id) for h in sys.stations)
    col["hrs_storage_mwh"] = math.fsum(case.capacity("hrs_e", h.id) for h in sys.stations)
    defined = [b for b in lcohs if b is not None]
    col["mean_lcoh_eur_per_kg"] = mean_lcoh(defined) if defined else math.nan
    tot = math.fsum(b.total for b in defined)
    col["capex_share"] = math.fsum(b.capex for b in defined) / tot if tot else math.nan
    col["stations"] = len(sys.stations)
    return col


def cmd_power(run: Run):
    with run.stage("read_power"):
        sys = read_power_system(run)
    with run.stage("solve_baseline"):
        case = solve_expansion(sys)
    with run.stage("write_power"):
        write_case(run.out, "baseline", case, run.cfg.format)
        col = summary_column(case, [])
        io.write_csv(run.out / "summary.csv", ("metric", "baseline"), list(col.items()))
    return case


def scenario_spec(cfg: RunConfig, mode: int) -> ScenarioSpec:
    costs = StationCosts(efficiency=cfg.electrolyzer_efficiency,
                         electrolyzer_capex=cfg.electrolyzer_capex, store_max=cfg.store_max_mwh,
                         connection_per_mw_km=cfg.connection_per_mw_km,
                         discount_rate=cfg.discount_rate)
    profile = ProfileParams(cfg.night_factor, cfg.weekend_factor, cfg.seasonal_amplitude)
    return ScenarioSpec(mode, costs, profile, cfg.profile_hours)


def lcoh_costs(cfg: RunConfig) -> LcohCosts:
    if cfg.catalog_file:
        classes, sheets = load_catalog(cfg.catalog_file)
        return LcohCosts(classes=classes, sheets=sheets)
    return LcohCosts()


def cmd_couple(run: Run):
    cfg = run.cfg
    net, siting = cmd_site(run)
    nodes = net.node_map
    sites = [HrsSite(i, nodes[i].lat, nodes[i].lon, siting.node_load[i]) for i in siting.stations]
    with run.stage("read_power"):
        sys = read_power_system(run)
        costs = lcoh_costs(cfg)
        if cfg.catalog_file:
            run.add_input(cfg.catalog_file)
    with run.stage("solve_baseline"):
        baseline = solve_expansion(sys)
    with run.stage("write_baseline"):
        write_case(run.out, "baseline", baseline, cfg.format)
    columns = {"baseline": summary_column(baseline, [])}
    for mode in cfg.modes:
        tag = f"mode{mode}"
        with run.stage(f"couple_{tag}"):
            result = run_scenario(sys, sites, scenario_spec(cfg, mode))
            case = result.case
        with run.stage(f"write_{tag}"):
            write_case(run.out, tag, case, cfg.format)
            att = {a.station_id: a for a in result.attachments}
            io.write_csv(run.out / f"designs_{tag}.csv",
                         ("station", "bus", "distance_km", "P_MW", "E_MWh", "capex_eur_pa"),
                         [(d.station_id, d.bus_id, att[d.station_id].distance_km,
                           d.electrolyzer_power, d.lp_storage_energy, d.capex)
                          for d in result.designs.values()])
            lcohs = []
            for s in sites:
                try:
                    lcohs.append(lcoh(s.id, case, costs))
                except ZeroProductionError:
                    lcohs.append(None)
            io.write_csv(run.out / f"lcoh_{tag}.csv",
                         ("station", "bus", "annual_kg", "electrolyzer_eur_pa", "storage_eur_pa",
                          "connection_eur_pa", "expost_eur_pa", "electricity_eur_pa", "vom_eur_pa",
                          "lcoh_eur_per_kg", "capex_share"),
                         [_lcoh_row(s, att[s.id], b) for s, b in zip(sites, lcohs)])
            if cfg.format == "geojson":
                io.write_geojson(run.out / f"stations_lcoh_{tag}.geojson",
                                 [io.point(s.lat, s.lon, id=s.id, bus=att[s.id].bus_id,
                                           lcoh=None if b is None else b.lcoh)
                                  for s, b in zip(sites, lcohs)])
            columns[tag] = summary_column(case, lcohs)
    with run.stage("write_summary"):
        _write_summary(run.out, columns)
        if "mode1" in columns and "mode2" in columns:
            a, b = columns["mode1"], columns["mode2"]
            io.write_csv(run.out / "comparison.csv", ("metric", "scenario1", "scenario2", "difference"),
                         [(k, a[k], b[k], b[k] - a[k]) for k in a])
        last = columns[f"mode{cfg.modes[-1]}"]
        io.bar_chart_svg(run.out / "cost_categories.svg",
                         {k: last[f"cost_{k}_eur_pa"] / 1e6 for k in CATEGORIES},
                         title=f"Annual system cost by category, scenario {cfg.modes[-1]}",
                         unit="M EUR/a")
    return columns


def _lcoh_row(site, attachment, b):
    if b is None:
        return (site.id, attachment.bus_id, 0.0, "", "", "", "", "", "", "undefined", "")
    return (site.id, attachment.bus_id, b.annual_kg, b.electrolyzer, b.storage, b.connection,
            b.expost, b.electricity, b.vom, b.lcoh, b.capex_share)


def _write_summary(out, columns):
    names = list(columns)
    metrics = list(next(iter(columns.values())))
    io.write_csv(out / "summary.csv", ["metric"] + names,
                 [[m] + [columns[n][m] for n in names] for m in metrics])


def cmd_synth(run: Run):
    cfg = run.cfg
    vrange = cfg.range_km if cfg.range_km > 0 else 400.0
    with run.stage("synth"):
        net, trips, sys = synth_instance(cfg.seed, cfg.synth_nodes, cfg.synth_trips,
                                         cfg.synth_buses, cfg.synth_snapshots, cfg.profile_hours,
                                         vrange)
    with run.stage("write_synth"):
        io.write_highway(run.out / "highway", net, trips)
        io.write_power(run.out / "power", sys)
        (run.out / "run.cfg").write_text(
            f"# synthetic instance, seed {cfg.seed}\n"
            "highway_dir = highway\npower_dir = power\nout_dir = results\n"
            f"range_km = {vrange!r}\nseed = {cfg.seed}\n", encoding="utf-8")
    return net, trips, sys


def cmd_report(run: Run):
    """Re-render the chart and a text table from an existing ``summary.csv``."""
    path = run.out / "summary.csv"
    with run.stage("read_summary"):
        rows = list(io.read_rows(path, ("metric",)))
        if not rows:
            raise ParamError(f"{path} holds no metrics")
        cols = [c for c in rows[0][1] if c != "metric"]
        table = {r["metric"]: r for _, r in rows}
    with run.stage("write_report"):
        lines = ["| metric | " + " | ".join(cols) + " |", "|---" * (len(cols) + 1) + "|"]
        for m, r in table.items():
            lines.append(f"| {m} | " + " | ".join(_pretty(r[c]) for c in cols) + " |")
        (run.out / "report.md").write_text("\n".join(lines) + "\n", encoding="utf-8")
        values = {}
        for c in cols:
            key = "total_cost_eur_pa"
            if key in table and table[key][c]:
                values[c] = float(table[key][c]) / 1e9
        io.bar_chart_svg(run.out / "total_cost.svg", values, title="Total annual system cost",
                         unit="bn EUR/a")


def _pretty(raw):
    try:
        v = float(raw)
    except ValueError:
        return raw
    return f"{v:.6g}"


COMMANDS = {"site": cmd_site, "power": cmd_power, "couple": cmd_couple, "synth": cmd_synth,
            "report": cmd_report}


def build_parser():
    p = argparse.ArgumentParser(prog="hrsgrid", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name, help=COMMANDS[name].__doc__)
        s.add_argument("--config", help="key = value configuration file")
        s.add_argument("--mode", choices=("1", "2", "both"))
        s.add_argument("--seed", type=int)
        s.add_argument("--out", dest="out_dir", help="output directory")
        s.add_argument("--format", choices=("csv", "geojson"))
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any configuration key (repeatable)")
        s.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    overrides = {}
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            print(f"error: --set expects KEY=VALUE, got {item!r}", file=_sys.stderr)
            return EXIT_INPUT
        overrides[key.strip()] = value.strip()
    for key in ("mode", "seed", "out_dir", "format"):
        if getattr(args, key) is not None:
            overrides[key] = getattr(args, key)
    try:
        unknown = [k for k in overrides if k not in dict(RunConfig().items())]
        if unknown:
            raise ParamError(f"unknown configuration key(s): {', '.join(unknown)}")
        cfg = load_config(args.config, overrides=overrides)
    except HrsGridError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_INPUT
    run = Run(args.command, cfg, args.config)
    code = EXIT_OK
    try:
        COMMANDS[args.command](run)
    except InputError as exc:
        code = _fail(run, exc, EXIT_INPUT)
    except SolveError as exc:
        code = _fail(run, exc, EXIT_SOLVE)
    except Exception as exc:    # anything else is a bug
        log.debug("internal error", exc_info=True)
        code = _fail(run, exc, EXIT_INTERNAL)
    finally:
        run.write_manifest(code)
    return code


def _fail(run, exc, code):
    stage = getattr(exc, "stage", None)
    where = f"stage {stage}: " if stage else ""
    print(f"error: {where}{exc}", file=_sys.stderr)
    run.status = getattr(exc, "code", "INTERNAL")
    return code


if __name__ == "__main__":
    raise SystemExit(main())
