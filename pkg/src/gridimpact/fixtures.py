"""Synthetic test counties: a cold-climate valley and a hot-humid flat.

Weather is a seasonal + diurnal sinusoid with AR(1) noise, generated at any
step width; design temperatures are taken from the generated series itself
(1st and 99th percentile) so county files are always self-consistent. Run
as a module to drop the fixture pair plus a ready run config into a
directory:

    python -m gridimpact.fixtures --out fixtures --dt 0.25
"""

from __future__ import annotations

import argparse
import csv
import os

import numpy as np
import yaml
from scipy.signal import lfilter

from .dataio import load_county, load_weather
from .devices import WeatherSeries


def synth_weather(
    start: str,
    days: int,
    dt_hours: float,
    mean_c: float,
    seasonal_amp: float,
    diurnal_amp: float,
    noise_sd: float,
    noise_corr_hours: float,
    seed: int,
) -> WeatherSeries:
    """One synthetic year: cosine season and day plus correlated noise."""
    steps = int(round(days * 24.0 / dt_hours))
    t0 = np.datetime64(start, "s")
    ts = t0 + (np.arange(steps) * dt_hours * 3600.0).astype("timedelta64[s]")
    hours = np.arange(steps) * dt_hours
    doy = hours / 24.0
    hod = hours % 24.0
    season = mean_c - seasonal_amp * np.cos(2.0 * np.pi * (doy - 14.0) / 365.0)
    diurnal = -diurnal_amp * np.cos(2.0 * np.pi * (hod - 15.0) / 24.0)
    rho = float(np.exp(-dt_hours / noise_corr_hours))
    rng = np.random.default_rng(seed)
    white = rng.normal(0.0, noise_sd, steps)
    noise = lfilter([np.sqrt(1.0 - rho * rho)], [1.0, -rho], white)
    return WeatherSeries(ts, season + diurnal + noise, dt_hours)


def write_weather_csv(path: str, weather: WeatherSeries) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["timestamp", "outdoor_temp_c"])
        for k in range(len(weather)):
            w.writerow([str(weather.timestamps[k]), f"{weather.temps_c[k]:.4f}"])


_COLD = dict(
    county_id="cold-valley",
    climate_zone="7",
    true_household_count=40000,
    sample_households=1000,
    housing_mix=[
        dict(label="small_detached", probability=0.30, floor_area_m2=120,
             resistance_range=[2.8, 4.2], capacitance_range=[1.2, 2.2]),
        dict(label="medium_detached", probability=0.45, floor_area_m2=190,
             resistance_range=[2.2, 3.4], capacitance_range=[1.8, 3.0]),
        dict(label="large_older", probability=0.25, floor_area_m2=260,
             resistance_range=[1.8, 2.8], capacitance_range=[2.4, 4.0]),
    ],
    heat_setpoint=dict(mean=20.5, sd=0.8, lo=18.0, hi=23.0),
    cool_setpoint=dict(mean=24.5, sd=0.8, lo=22.0, hi=27.0),
    vehicles_per_household={0: 0.08, 1: 0.37, 2: 0.43, 3: 0.12},
    large_vehicle_fraction=0.55,
    commute=dict(median_km=16.0, sigma=0.55, max_km=90.0),
    bau=dict(electric_heat=0.04, electric_water=0.22,
             air_conditioning=0.60, electric_vehicles=0.02),
    bau_headroom_range=[0.10, 0.28],
    water_setpoint_c=51.0,
)

_HOT = dict(
    county_id="hot-flats",
    climate_zone="1A",
    true_household_count=60000,
    sample_households=1000,
    housing_mix=[
        dict(label="small_slab", probability=0.35, floor_area_m2=110,
             resistance_range=[3.0, 4.5], capacitance_range=[1.0, 1.8]),
        dict(label="medium_slab", probability=0.45, floor_area_m2=170,
             resistance_range=[2.6, 3.8], capacitance_range=[1.5, 2.6]),
        dict(label="large_stucco", probability=0.20, floor_area_m2=240,
             resistance_range=[2.2, 3.2], capacitance_range=[2.0, 3.2]),
    ],
    heat_setpoint=dict(mean=20.0, sd=0.7, lo=18.0, hi=22.0),
    cool_setpoint=dict(mean=23.5, sd=1.0, lo=21.0, hi=26.0),
    vehicles_per_household={0: 0.06, 1: 0.34, 2: 0.46, 3: 0.14},
    large_vehicle_fraction=0.60,
    commute=dict(median_km=18.0, sigma=0.55, max_km=90.0),
    bau=dict(electric_heat=0.35, electric_water=0.55,
             air_conditioning=0.98, electric_vehicles=0.03),
    bau_headroom_range=[0.15, 0.36],
    water_setpoint_c=51.0,
)

_WEATHER_PARAMS = {
    "cold-valley": dict(mean_c=6.5, seasonal_amp=19.0, diurnal_amp=4.0,
                        noise_sd=3.5, noise_corr_hours=30.0, seed=712),
    "hot-flats": dict(mean_c=24.5, seasonal_amp=4.5, diurnal_amp=3.5,
                      noise_sd=2.2, noise_corr_hours=30.0, seed=313),
}


def write_county(
    out_dir: str,
    which: str,
    dt_hours: float = 0.25,
    days: int = 365,
    sample_households: int | None = None,
) -> str:
    """Write one fixture county (YAML + weather CSV); returns the YAML path."""
    base = {"cold-valley": _COLD, "hot-flats": _HOT}[which]
    os.makedirs(out_dir, exist_ok=True)
    weather = synth_weather("2021-01-01", days, dt_hours,
                            **_WEATHER_PARAMS[which])
    slug = which.replace("-", "_")
    weather_name = f"{slug}_weather.csv"
    write_weather_csv(os.path.join(out_dir, weather_name), weather)

    county = dict(base)
    if sample_households is not None:
        county["sample_households"] = int(sample_households)
    county["weather"] = weather_name
    county["design_temp_heat_c"] = round(
        float(np.percentile(weather.temps_c, 1.0)), 1)
    county["design_temp_cool_c"] = round(
        float(np.percentile(weather.temps_c, 99.0)), 1)
    path = os.path.join(out_dir, f"{slug}.yaml")
    with open(path, "w") as fh:
        yaml.safe_dump(county, fh, sort_keys=False)
    return path


def write_run_config(out_dir: str, county_paths: list[str],
                     dt_hours: float = 0.25, seed: int = 0) -> str:
    """Run config pointing at the fixture counties with default prices.

    The default price pair (capital 830, recurring 10 $/kW/yr over 25 years
    at matched 2.5% escalation and discount) lands on an effective one-shot
    price of 960 $/kW: 830 + 10 * (25+1)/2 = 960.
    """
    cfg = dict(
        counties=[os.path.relpath(p, out_dir) for p in county_paths],
        price=dict(capital_per_kw=830.0, recurring_per_kw_year=10.0,
                   escalation_rate=0.025, discount_rate=0.025,
                   build_years=25, sigma_frac=0.2),
        dt_hours=dt_hours,
        seed=seed,
        headroom_future=0.2,
    )
    path = os.path.join(out_dir, "run.yaml")
    with open(path, "w") as fh:
        yaml.safe_dump(cfg, fh, sort_keys=False)
    return path


def load_fixture(out_dir: str, which: str, dt_hours: float = 0.25,
                 days: int = 365, sample_households: int | None = None):
    """Write and immediately load one fixture; returns (county, weather)."""
    path = write_county(out_dir, which, dt_hours, days, sample_households)
    county = load_county(path)
    return county, load_weather(county.weather_file, dt_hours)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(
        description="generate the synthetic fixture counties")
    ap.add_argument("--out", required=True, help="output directory")
    ap.add_argument("--dt", type=float, default=0.25,
                    help="weather step in hours (default 0.25)")
    ap.add_argument("--days", type=int, default=365)
    args = ap.parse_args(argv)
    paths = [write_county(args.out, w, args.dt, args.days)
             for w in ("cold-valley", "hot-flats")]
    cfg = write_run_config(args.out, paths, args.dt)
    print(f"wrote {len(paths)} counties and {cfg}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
