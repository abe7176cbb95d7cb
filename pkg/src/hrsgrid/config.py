"""Run configuration: flat ``key = value`` file < environment < command line."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ParamError, ParseError

ENV_PREFIX = "HRSGRID_"


@dataclass
class RunConfig:
    # inputs / outputs
    highway_dir: str = "highway"
    power_dir: str = "power"
    out_dir: str = "out"
    catalog_file: str = ""
    format: str = "csv"
    seed: int = 0
    # siting
    range_km: float = 0.0            # required for siting
    initial_fuel_km: float = 0.0     # 0: start with a full tank
    fuel_per_km: float = 0.066
    node_capacity: float = 30000.0
    min_trip_km: float = 50.0
    # power model
    snapshot_hours: float = 2.0      # used only without snapshots.csv
    co2_cap: float = -1.0            # negative: no cap
    discount_rate: float = 0.07
    # coupling
    mode: str = "2"                  # 1, 2 or both
    electrolyzer_capex: float = 510.0
    electrolyzer_efficiency: float = 0.68
    store_max_mwh: float = 999.9
    connection_per_mw_km: float = 400.0
    profile_hours: float = 2.0
    night_factor: float = 0.3
    weekend_factor: float = 0.5
    seasonal_amplitude: float = 0.1
    # synthetic instances
    synth_nodes: int = 12
    synth_trips: int = 10
    synth_buses: int = 4
    synth_snapshots: int = 84

    def __post_init__(self):
        if self.format not in ("csv", "geojson"):
            raise ParamError(f"format must be csv or geojson, got {self.format!r}")
        if str(self.mode) not in ("1", "2", "both"):
            raise ParamError(f"mode must be 1, 2 or both, got {self.mode!r}")
        self.mode = str(self.mode)

    @property
    def modes(self) -> tuple[int, ...]:
        return (1, 2) if self.mode == "both" else (int(self.mode),)

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    def digest(self) -> str:
        text = "\n".join(f"{k}={v}" for k, v in self.items())
        return hashlib.sha256(text.encode()).hexdigest()

    def resolve(self, path) -> Path:
        return Path(path)


_TYPES = {f.name: f.type for f in fields(RunConfig)}


def _convert(key, raw, where):
    kind = _TYPES[key]
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
    except ValueError:
        raise ParamError(f"{where}: {key}: cannot parse {raw!r}") from None
    return raw


def parse_config_file(path) -> dict:
    values = {}
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParseError(path, 0, f"cannot open: {exc.strerror}") from None
    base = path.parent
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ParseError(path, n, "expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        if key not in _TYPES:
            raise ParseError(path, n, f"unknown key {key!r}")
        try:
            values[key] = _convert(key, raw, f"{path}:{n}")
        except ParamError as exc:
            raise ParseError(path, n, str(exc)) from None
        # relative paths are relative to the config file
        if key.endswith("_dir") or key.endswith("_file"):
            if raw and not os.path.isabs(raw):
                values[key] = str(base / raw)
    return values


def load_config(path=None, env=None, overrides=None) -> RunConfig:
    values = parse_config_file(path) if path else {}
    env = os.environ if env is None else env
    for key in _TYPES:
        name = ENV_PREFIX + key.upper()
        if name in env:
            values[key] = _convert(key, env[name], name)
    for key, v in (overrides or {}).items():
        if v is not None:
            values[key] = _convert(key, str(v), f"--{key}")
    return RunConfig(**values)
