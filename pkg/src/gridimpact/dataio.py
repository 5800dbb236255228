"""File formats: weather and series CSVs, county YAML, report writers.

Loaders validate aggressively and name the offending field or row; writers
pin column order and float formatting so identical runs produce identical
bytes. All CSVs are plain comma-separated with a single header row.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import os
from typing import Iterable, Optional, Sequence

import numpy as np
import yaml

from .devices import PerformanceCurve, WeatherSeries
from .fleet import (Archetype, BauShares, CommuteSchedule, ConfigError,
                    CountySpec, LognormalDist, NormalDist)
from .sizing import HP_PROFILES, HpProfile

log = logging.getLogger(__name__)


def _parse_timestamps(rows: list[str], path: str) -> np.ndarray:
    try:
        ts = np.array(rows, dtype="datetime64[s]")
    except ValueError as exc:
        raise ConfigError(f"{path}: bad timestamp ({exc})") from None
    deltas = np.diff(ts).astype("timedelta64[s]").astype(np.int64)
    bad = np.flatnonzero(deltas <= 0)
    if bad.size:
        raise ConfigError(
            f"{path}: timestamps out of order at data row {int(bad[0]) + 3}")
    return ts


def _check_uniform(ts: np.ndarray, path: str, step_hours: Optional[float]) -> float:
    deltas = np.diff(ts).astype("timedelta64[s]").astype(np.int64)
    expected = int(round(step_hours * 3600)) if step_hours else int(deltas[0])
    bad = np.flatnonzero(deltas != expected)
    if bad.size:
        k = int(bad[0])
        raise ConfigError(
            f"{path}: gap or irregular step at data row {k + 3}: "
            f"{deltas[k]} s, expected {expected} s")
    return expected / 3600.0


def _read_csv_columns(path: str, required: Sequence[str]) -> dict[str, list[str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise ConfigError(f"{path}: empty file")
        for col in required:
            if col not in reader.fieldnames:
                raise ConfigError(f"{path}: missing column {col!r}")
        data: dict[str, list[str]] = {c: [] for c in required}
        for i, row in enumerate(reader):
            for col in required:
                v = row.get(col)
                if v is None or v.strip() == "":
                    raise ConfigError(
                        f"{path}: empty {col!r} at data row {i + 2}")
                data[col].append(v.strip())
    if not data[required[0]]:
        raise ConfigError(f"{path}: no data rows")
    return data


def _parse_floats(values: list[str], col: str, path: str) -> np.ndarray:
    try:
        arr = np.array(values, dtype=float)
    except ValueError:
        for i, v in enumerate(values):
            try:
                float(v)
            except ValueError:
                raise ConfigError(
                    f"{path}: bad number in {col!r} at data row {i + 2}: {v!r}"
                ) from None
        raise
    bad = np.flatnonzero(~np.isfinite(arr))
    if bad.size:
        raise ConfigError(
            f"{path}: non-finite {col!r} at data row {int(bad[0]) + 2}")
    return arr


def load_weather(path: str, step_hours: Optional[float] = None) -> WeatherSeries:
    """Read a (timestamp, outdoor_temp_c) CSV into a validated series."""
    data = _read_csv_columns(path, ["timestamp", "outdoor_temp_c"])
    ts = _parse_timestamps(data["timestamp"], path)
    temps = _parse_floats(data["outdoor_temp_c"], "outdoor_temp_c", path)
    step = _check_uniform(ts, path, step_hours)
    return WeatherSeries(ts, temps, step)


def load_power_series(path: str) -> tuple[np.ndarray, np.ndarray, float]:
    """Read a (timestamp, value_kw) CSV; returns (timestamps, kw, step_hours)."""
    data = _read_csv_columns(path, ["timestamp", "value_kw"])
    ts = _parse_timestamps(data["timestamp"], path)
    vals = _parse_floats(data["value_kw"], "value_kw", path)
    if np.any(vals < 0):
        k = int(np.flatnonzero(vals < 0)[0])
        raise ConfigError(f"{path}: negative value_kw at data row {k + 2}")
    step = _check_uniform(ts, path, None)
    return ts, vals, step


def load_curve_file(path: str) -> tuple[PerformanceCurve, PerformanceCurve]:
    """Read (outdoor_temp_c, capacity_kw, cop) nodes for one reference unit."""
    data = _read_csv_columns(path, ["outdoor_temp_c", "capacity_kw", "cop"])
    temps = _parse_floats(data["outdoor_temp_c"], "outdoor_temp_c", path)
    caps = _parse_floats(data["capacity_kw"], "capacity_kw", path)
    cops = _parse_floats(data["cop"], "cop", path)
    if np.any(np.diff(temps) <= 0):
        raise ConfigError(f"{path}: outdoor_temp_c must increase strictly")
    try:
        return PerformanceCurve(temps, caps), PerformanceCurve(temps, cops)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None


def _hourly_shape_from_series(ts: np.ndarray, vals: np.ndarray) -> np.ndarray:
    hours = (ts.astype("datetime64[s]").astype(np.int64) % 86400) // 3600
    shape = np.zeros(24)
    for h in range(24):
        mask = hours == h
        if not mask.any():
            raise ConfigError("misc profile series does not cover every hour")
        shape[h] = vals[mask].mean()
    return shape


def _field(raw: dict, key: str, kind, path: str):
    if key not in raw:
        raise ConfigError(f"{path}: county field {key!r} missing")
    value = raw[key]
    if kind is float and isinstance(value, (int, float)) \
            and not isinstance(value, bool):
        return float(value)
    if kind is int and isinstance(value, int) and not isinstance(value, bool):
        return value
    if not isinstance(value, kind):
        raise ConfigError(
            f"{path}: county field {key!r} has type {type(value).__name__}, "
            f"expected {kind.__name__}")
    return value


def _dist_normal(raw: dict, key: str, path: str) -> NormalDist:
    d = _field(raw, key, dict, path)
    try:
        return NormalDist(float(d["mean"]), float(d["sd"]),
                          float(d["lo"]), float(d["hi"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: {key}: needs mean/sd/lo/hi ({exc})") from None


def load_county(path: str) -> CountySpec:
    """Parse a county YAML; paths inside resolve relative to the file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read county file ({exc})") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: county file must hold a mapping")
    base = os.path.dirname(os.path.abspath(path))

    mix = []
    for i, a in enumerate(_field(raw, "housing_mix", list, path)):
        try:
            mix.append(Archetype(
                label=str(a["label"]),
                probability=float(a["probability"]),
                floor_area_m2=float(a["floor_area_m2"]),
                resistance_range=(float(a["resistance_range"][0]),
                                  float(a["resistance_range"][1])),
                capacitance_range=(float(a["capacitance_range"][0]),
                                   float(a["capacitance_range"][1])),
            ))
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise ConfigError(
                f"{path}: housing_mix[{i}]: malformed archetype ({exc})") from None

    veh_raw = _field(raw, "vehicles_per_household", dict, path)
    try:
        vehicles = {int(k): float(v) for k, v in veh_raw.items()}
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"{path}: vehicles_per_household: malformed ({exc})") from None

    bau_raw = _field(raw, "bau", dict, path)
    try:
        bau = BauShares(
            electric_heat=float(bau_raw["electric_heat"]),
            electric_water=float(bau_raw["electric_water"]),
            air_conditioning=float(bau_raw["air_conditioning"]),
            electric_vehicles=float(bau_raw["electric_vehicles"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: bau: malformed shares ({exc})") from None

    com_raw = _field(raw, "commute", dict, path)
    try:
        commute = LognormalDist(float(com_raw["median_km"]),
                                float(com_raw["sigma"]),
                                float(com_raw["max_km"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{path}: commute: needs median_km/sigma/max_km "
                          f"({exc})") from None

    misc_shape = None
    if raw.get("misc_profile_file"):
        ts, vals, _ = load_power_series(
            os.path.join(base, str(raw["misc_profile_file"])))
        misc_shape = _hourly_shape_from_series(ts, vals)

    custom_profile = None
    if raw.get("hp_curve_file"):
        cap_curve, cop_curve = load_curve_file(
            os.path.join(base, str(raw["hp_curve_file"])))
        ref = float(cap_curve(8.3))
        if ref <= 0:
            raise ConfigError(
                f"{path}: hp_curve_file: zero capacity at the 8.3 C rating point")
        fallback = HP_PROFILES["cchp"]
        custom_profile = HpProfile(
            name="custom",
            heat_capacity_frac=cap_curve.scaled(1.0 / ref),
            heat_cop=cop_curve,
            cool_capacity_frac=fallback.cool_capacity_frac,
            cool_cop=fallback.cool_cop,
        )

    headroom = raw.get("bau_headroom_range", [0.15, 0.36])
    try:
        headroom = (float(headroom[0]), float(headroom[1]))
    except (TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"{path}: bau_headroom_range: malformed ({exc})") from None

    zone = raw.get("climate_zone")
    if not isinstance(zone, (str, int)) or isinstance(zone, bool):
        raise ConfigError(f"{path}: county field 'climate_zone' missing or "
                          f"not a zone name")

    kwargs = dict(
        county_id=str(_field(raw, "county_id", str, path)),
        climate_zone=str(zone),
        true_household_count=_field(raw, "true_household_count", int, path),
        design_temp_heat_c=_field(raw, "design_temp_heat_c", float, path),
        design_temp_cool_c=_field(raw, "design_temp_cool_c", float, path),
        weather_file=os.path.join(base, _field(raw, "weather", str, path)),
        housing_mix=tuple(mix),
        heat_setpoint=_dist_normal(raw, "heat_setpoint", path),
        cool_setpoint=_dist_normal(raw, "cool_setpoint", path),
        vehicles_per_household=vehicles,
        large_vehicle_fraction=_field(raw, "large_vehicle_fraction", float, path),
        commute=commute,
        bau=bau,
        bau_headroom_range=headroom,
        water_setpoint_c=float(raw.get("water_setpoint_c", 51.0)),
        hp_curve_file=raw.get("hp_curve_file"),
    )
    if "sample_households" in raw:
        kwargs["sample_households"] = _field(raw, "sample_households", int, path)
    if misc_shape is not None:
        kwargs["misc_shape"] = misc_shape
    if custom_profile is not None:
        kwargs["custom_hp_profile"] = custom_profile
    try:
        spec = CountySpec(**kwargs)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if not os.path.exists(spec.weather_file):
        raise ConfigError(f"{path}: weather file {spec.weather_file} not found")
    return spec


# ---------------------------------------------------------------------------
# writers


def _fmt(v: float, nd: int = 6) -> str:
    return f"{v:.{nd}f}"


def write_profile_csv(path: str, profile) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "scored", "misc_kw", "water_kw", "ev_kw",
                    "hvac_kw", "total_kw"])
        for k in range(profile.total_kw.size):
            w.writerow([
                str(profile.timestamps[k]),
                1 if k >= profile.warmup_steps else 0,
                _fmt(profile.misc_kw[k]), _fmt(profile.water_kw[k]),
                _fmt(profile.ev_kw[k]), _fmt(profile.hvac_kw[k]),
                _fmt(profile.total_kw[k]),
            ])


def write_csv(path: str, fieldnames: Sequence[str], rows: Iterable[dict]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=list(fieldnames))
        w.writeheader()
        for row in rows:
            w.writerow(row)


def file_sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(path: str, manifest: dict) -> None:
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
