"""County descriptions and synthetic household fleets.

A county is described by distributions (housing archetypes, setpoints,
vehicle ownership, commutes, BAU equipment shares); a fleet is a concrete
sample of households drawn from them. Draws use named, independent RNG
streams derived from (seed, county_id, stream), so the same seed yields the
same homes in every scenario and any later stream addition leaves existing
streams untouched. Scenario only decides the installed equipment: the BAU
fleet keeps its fossil shares, the all-electric fleet gets heat pumps sized
to the home, hybrid heat pump water tanks, and an EV for every vehicle.
"""

from __future__ import annotations

import dataclasses
import hashlib
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from . import sizing
from .devices import BuildingEnvelope, EvBattery, HeatPumpUnit, WaterHeaterTank

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Bad county or run configuration; message names the offending field."""


# Default daily shape of the non-HVAC, non-water, non-EV electric load, kW at
# hourly resolution starting at midnight. Mean 0.74, evening peak 1.40.
DEFAULT_MISC_SHAPE = np.array([
    0.45, 0.40, 0.38, 0.37, 0.38, 0.45, 0.65, 0.90, 0.85, 0.75, 0.70, 0.72,
    0.75, 0.72, 0.70, 0.75, 0.95, 1.25, 1.40, 1.35, 1.20, 1.00, 0.75, 0.55,
])

# Share of the miscellaneous electric load that ends up as indoor heat.
MISC_HEAT_FRACTION = 0.7

HPWH_COP = 3.0
HPWH_COMPRESSOR_KW = 0.6
WH_RESISTANCE_KW = 4.5


def stream_rng(seed: int, county_id: str, stream: str) -> np.random.Generator:
    """Independent generator for one named draw stream of one county."""
    digest = hashlib.sha256(f"{county_id}/{stream}".encode()).digest()
    key = int.from_bytes(digest[:8], "big")
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(key,)))


@dataclass(frozen=True)
class NormalDist:
    mean: float
    sd: float
    lo: float
    hi: float

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.clip(rng.normal(self.mean, self.sd, size=n), self.lo, self.hi)


@dataclass(frozen=True)
class LognormalDist:
    median: float
    sigma: float
    max_value: float

    def draw(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.minimum(self.median * np.exp(rng.normal(0.0, self.sigma, size=n)),
                          self.max_value)


@dataclass(frozen=True)
class Archetype:
    """One housing type: probability plus envelope parameter ranges."""

    label: str
    probability: float
    floor_area_m2: float
    resistance_range: tuple[float, float]   # C/kW
    capacitance_range: tuple[float, float]  # kWh/C


@dataclass(frozen=True)
class BauShares:
    """Fractions of BAU homes with each kind of electric equipment."""

    electric_heat: float
    electric_water: float
    air_conditioning: float
    electric_vehicles: float

    def __post_init__(self) -> None:
        for name in ("electric_heat", "electric_water", "air_conditioning",
                     "electric_vehicles"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ConfigError(f"bau.{name}: share {v} outside [0, 1]")


@dataclass(frozen=True)
class CountySpec:
    county_id: str
    climate_zone: str
    true_household_count: int
    design_temp_heat_c: float
    design_temp_cool_c: float
    weather_file: str
    housing_mix: tuple[Archetype, ...]
    heat_setpoint: NormalDist
    cool_setpoint: NormalDist
    vehicles_per_household: dict[int, float]
    large_vehicle_fraction: float
    commute: LognormalDist
    bau: BauShares
    sample_households: int = 1000
    bau_headroom_range: tuple[float, float] = (0.15, 0.36)
    water_setpoint_c: float = 51.0
    misc_shape: np.ndarray = field(default_factory=lambda: DEFAULT_MISC_SHAPE.copy())
    hp_curve_file: Optional[str] = None
    custom_hp_profile: Optional[sizing.HpProfile] = None

    def __post_init__(self) -> None:
        if not self.county_id:
            raise ConfigError("county_id: must be a non-empty string")
        if self.true_household_count < 1:
            raise ConfigError(
                f"true_household_count: must be >= 1, got {self.true_household_count}")
        if self.sample_households < 1:
            raise ConfigError(
                f"sample_households: must be >= 1, got {self.sample_households}")
        if not self.housing_mix:
            raise ConfigError("housing_mix: needs at least one archetype")
        total = math.fsum(a.probability for a in self.housing_mix)
        if abs(total - 1.0) > 1e-9:
            raise ConfigError(f"housing_mix: probabilities sum to {total}, expected 1")
        for arch in self.housing_mix:
            lo, hi = arch.resistance_range
            if not 0 < lo <= hi:
                raise ConfigError(
                    f"housing_mix[{arch.label}].resistance_range: bad range ({lo}, {hi})")
            lo, hi = arch.capacitance_range
            if not 0 < lo <= hi:
                raise ConfigError(
                    f"housing_mix[{arch.label}].capacitance_range: bad range ({lo}, {hi})")
        vtotal = math.fsum(self.vehicles_per_household.values())
        if abs(vtotal - 1.0) > 1e-9:
            raise ConfigError(
                f"vehicles_per_household: probabilities sum to {vtotal}, expected 1")
        if any(k < 0 for k in self.vehicles_per_household):
            raise ConfigError("vehicles_per_household: negative vehicle count")
        if not 0.0 <= self.large_vehicle_fraction <= 1.0:
            raise ConfigError(
                f"large_vehicle_fraction: {self.large_vehicle_fraction} outside [0, 1]")
        lo, hi = self.bau_headroom_range
        if not 0.0 <= lo <= hi:
            raise ConfigError(f"bau_headroom_range: bad range ({lo}, {hi})")
        if self.design_temp_heat_c >= self.design_temp_cool_c:
            raise ConfigError(
                "design temperatures: heating design must lie below cooling design")
        shape = np.asarray(self.misc_shape, dtype=float)
        if shape.ndim != 1 or shape.size != 24 or np.any(shape < 0):
            raise ConfigError("misc_shape: expected 24 non-negative hourly values")
        object.__setattr__(self, "misc_shape", shape)

    def is_cold_zone(self) -> bool:
        digits = "".join(ch for ch in self.climate_zone if ch.isdigit())
        if not digits:
            raise ConfigError(f"climate_zone: no zone number in {self.climate_zone!r}")
        return int(digits) >= 6


@dataclass(frozen=True)
class BauHvac:
    """Pre-electrification HVAC: fossil or resistance heat, optional AC."""

    heat_kind: str  # "fossil" | "resistance"
    resistance_kw: float = 0.0
    ac_cooling_kw: float = 0.0  # thermal at rating; 0 means no AC


@dataclass(frozen=True)
class BauVehicle:
    """Combustion vehicle; occupies a driveway slot, draws nothing."""

    size: str = "small"


@dataclass(frozen=True)
class CommuteSchedule:
    """Clock-time driving pattern for one vehicle."""

    distance_km: float
    depart_hour: float
    return_hour: float
    weekend_hour: float
    kwh_per_km: float
    speed_kmh: float = 40.0


@dataclass
class Setback:
    start_hour: float
    duration_hours: float
    depth_c: float


@dataclass
class BehaviorProfile:
    """Per-home scaling and timing knobs for the synthesized series."""

    misc_scale: float
    misc_phase_hours: float
    solar_peak_kw: float
    internal_gain_kw: float
    draw_kwh_per_day: float
    draw_morning_hour: float
    draw_evening_hour: float
    setback: Optional[Setback] = None


@dataclass
class Household:
    envelope: BuildingEnvelope
    hvac: Union[HeatPumpUnit, BauHvac]
    water_heater: Optional[WaterHeaterTank]
    vehicles: list
    commutes: list
    behavior: BehaviorProfile
    heat_setpoint: float
    cool_setpoint: float
    electrified: bool
    misc_load_series: Optional[np.ndarray] = None


@dataclass
class Fleet:
    county: CountySpec
    scenario: str
    seed: int
    households: list
    scale_factor: float
    sizing_rule: sizing.SizingRule
    hp_profile: sizing.HpProfile

    def __len__(self) -> int:
        return len(self.households)


def resolve_hp_profile(county: CountySpec, setting: str) -> sizing.HpProfile:
    """Profile for new heat pumps in this county.

    The default setting gives cold-climate units to IECC zones 6 and up;
    "today" forces currently common units everywhere. A county-level custom
    curve file overrides both.
    """
    if county.custom_hp_profile is not None:
        return county.custom_hp_profile
    if setting == "today":
        return sizing.HP_PROFILES["today"]
    if setting == "cchp":
        return sizing.HP_PROFILES["cchp"] if county.is_cold_zone() \
            else sizing.HP_PROFILES["today"]
    raise ConfigError(f"hp_profile: unknown setting {setting!r}")


def _draw_base(county: CountySpec, seed: int, n: int) -> dict:
    """Scenario-independent draws for n homes."""
    rng_env = stream_rng(seed, county.county_id, "envelope")
    rng_sp = stream_rng(seed, county.county_id, "setpoints")
    rng_veh = stream_rng(seed, county.county_id, "vehicles")
    rng_beh = stream_rng(seed, county.county_id, "behavior")
    rng_wat = stream_rng(seed, county.county_id, "water")
    rng_kind = stream_rng(seed, county.county_id, "equipment-kind")

    probs = np.array([a.probability for a in county.housing_mix])
    arch_idx = rng_env.choice(len(probs), size=n, p=probs / probs.sum())
    r_lo = np.array([a.resistance_range[0] for a in county.housing_mix])[arch_idx]
    r_hi = np.array([a.resistance_range[1] for a in county.housing_mix])[arch_idx]
    c_lo = np.array([a.capacitance_range[0] for a in county.housing_mix])[arch_idx]
    c_hi = np.array([a.capacitance_range[1] for a in county.housing_mix])[arch_idx]
    area = np.array([a.floor_area_m2 for a in county.housing_mix])[arch_idx]
    resistance = r_lo + rng_env.random(n) * (r_hi - r_lo)
    capacitance = c_lo + rng_env.random(n) * (c_hi - c_lo)

    heat_sp = county.heat_setpoint.draw(rng_sp, n)
    cool_sp = np.maximum(county.cool_setpoint.draw(rng_sp, n), heat_sp + 1.0)

    counts = np.array(sorted(county.vehicles_per_household))
    cprobs = np.array([county.vehicles_per_household[int(k)] for k in counts], float)
    n_veh = rng_veh.choice(counts, size=n, p=cprobs / cprobs.sum())
    total_v = int(n_veh.sum())
    large = rng_veh.random(total_v) < county.large_vehicle_fraction
    batt_kwh = np.where(large, rng_veh.uniform(100.0, 135.0, total_v),
                        rng_veh.uniform(70.0, 95.0, total_v))
    rate = np.where(large, rng_veh.uniform(0.27, 0.33, total_v),
                    rng_veh.uniform(0.15, 0.18, total_v))
    charger = rng_veh.choice([7.2, 9.6, 11.5], size=total_v, p=[0.25, 0.5, 0.25])
    dist = county.commute.draw(rng_veh, total_v)
    depart = rng_veh.uniform(6.5, 9.0, total_v)
    ret = depart + rng_veh.uniform(8.0, 10.0, total_v)
    weekend = rng_veh.uniform(10.0, 15.0, total_v)
    ev_u = rng_kind.random(total_v)

    tank_liters = rng_wat.choice([150.0, 190.0, 230.0, 300.0], size=n,
                                 p=[0.25, 0.35, 0.25, 0.15])
    tank_r = rng_wat.uniform(300.0, 700.0, n)
    draw_kwh = rng_wat.uniform(6.0, 14.0, n)

    return {
        "resistance": resistance, "capacitance": capacitance, "area": area,
        "heat_sp": heat_sp, "cool_sp": cool_sp,
        "n_veh": n_veh, "large": large, "batt_kwh": batt_kwh, "rate": rate,
        "charger": charger, "dist": dist, "depart": depart, "ret": ret,
        "weekend": weekend, "ev_u": ev_u,
        "tank_liters": tank_liters, "tank_r": tank_r, "draw_kwh": draw_kwh,
        "heat_u": rng_kind.random(n), "water_u": rng_kind.random(n),
        "ac_u": rng_kind.random(n),
        "misc_scale": rng_beh.uniform(0.6, 1.5, n),
        "misc_phase": rng_beh.choice([-1.0, 0.0, 1.0], size=n),
        "solar_peak": rng_beh.uniform(0.4, 2.2, n) * (area / 150.0),
        "internal": rng_beh.uniform(0.2, 0.6, n),
        "draw_morning": rng_beh.uniform(6.0, 8.5, n),
        "draw_evening": rng_beh.uniform(17.5, 20.5, n),
    }


def _household_design_loads(county: CountySpec, resistance: float,
                            heat_sp: float, cool_sp: float,
                            misc_scale: float) -> sizing.DesignLoads:
    allowance = MISC_HEAT_FRACTION * misc_scale * float(np.max(county.misc_shape))
    return sizing.design_loads(
        resistance, heat_sp, cool_sp,
        county.design_temp_heat_c, county.design_temp_cool_c,
        gain_allowance_kw=allowance,
    )


def _electric_equipment(county: CountySpec, base: dict, i: int,
                        rule: sizing.SizingRule,
                        profile: sizing.HpProfile) -> HeatPumpUnit:
    loads = _household_design_loads(
        county, base["resistance"][i], base["heat_sp"][i], base["cool_sp"][i],
        base["misc_scale"][i])
    return sizing.size_equipment(loads, rule=rule, profile=profile)


def _bau_equipment(county: CountySpec, base: dict, i: int) -> BauHvac:
    loads = _household_design_loads(
        county, base["resistance"][i], base["heat_sp"][i], base["cool_sp"][i],
        base["misc_scale"][i])
    electric_heat = base["heat_u"][i] < county.bau.electric_heat
    has_ac = base["ac_u"][i] < county.bau.air_conditioning
    return BauHvac(
        heat_kind="resistance" if electric_heat else "fossil",
        resistance_kw=float(math.ceil(loads.heating_kw)) if electric_heat else 0.0,
        ac_cooling_kw=1.2 * loads.cooling_kw if has_ac else 0.0,
    )


def _make_tank(county: CountySpec, base: dict, i: int, hybrid: bool) -> WaterHeaterTank:
    # 1 liter of water holds 4186 J/K = 0.001163 kWh/C
    cap = base["tank_liters"][i] * 0.001163
    return WaterHeaterTank(
        water_temp=county.water_setpoint_c,
        capacitance=float(cap),
        loss_resistance=float(base["tank_r"][i]),
        setpoint_c=county.water_setpoint_c,
        cop=HPWH_COP if hybrid else 1.0,
        hp_power_cap=HPWH_COMPRESSOR_KW if hybrid else 0.0,
        resistance_power_cap=WH_RESISTANCE_KW,
    )


def synthesize_fleet(
    county: CountySpec,
    scenario: str,
    seed: int,
    sizing_rule: sizing.SizingRule = sizing.SizingRule.MAX_OF_BOTH,
    hp_profile_setting: str = "cchp",
    sample_size: Optional[int] = None,
) -> Fleet:
    """Draw a household sample and install scenario equipment.

    scenario is "bau" or "all-electric". Identical (county, seed) give the
    same homes in both scenarios; only equipment differs.
    """
    if scenario not in ("bau", "all-electric"):
        raise ConfigError(f"scenario: expected 'bau' or 'all-electric', got {scenario!r}")
    n = sample_size if sample_size is not None else county.sample_households
    n = int(min(n, county.true_household_count))
    if n < 1:
        raise ConfigError(f"sample size must be >= 1, got {n}")
    profile = resolve_hp_profile(county, hp_profile_setting)
    base = _draw_base(county, seed, n)

    households = []
    v0 = 0
    for i in range(n):
        nv = int(base["n_veh"][i])
        vehicles: list = []
        commutes: list = []
        for j in range(v0, v0 + nv):
            size = "large" if base["large"][j] else "small"
            is_ev = scenario == "all-electric" or \
                base["ev_u"][j] < county.bau.electric_vehicles
            if is_ev:
                vehicles.append(EvBattery(
                    energy=float(base["batt_kwh"][j]),
                    capacity=float(base["batt_kwh"][j]),
                    charge_power_cap=float(base["charger"][j]),
                ))
            else:
                vehicles.append(BauVehicle(size=size))
            commutes.append(CommuteSchedule(
                distance_km=float(base["dist"][j]),
                depart_hour=float(base["depart"][j]),
                return_hour=float(base["ret"][j]),
                weekend_hour=float(base["weekend"][j]),
                kwh_per_km=float(base["rate"][j]),
            ))
        v0 += nv

        if scenario == "all-electric":
            hvac: Union[HeatPumpUnit, BauHvac] = _electric_equipment(
                county, base, i, sizing_rule, profile)
            tank: Optional[WaterHeaterTank] = _make_tank(county, base, i, hybrid=True)
        else:
            hvac = _bau_equipment(county, base, i)
            tank = _make_tank(county, base, i, hybrid=False) \
                if base["water_u"][i] < county.bau.electric_water else None

        households.append(Household(
            envelope=BuildingEnvelope(
                resistance=float(base["resistance"][i]),
                capacitance=float(base["capacitance"][i]),
                indoor_temp=float(base["heat_sp"][i]),
            ),
            hvac=hvac,
            water_heater=tank,
            vehicles=vehicles,
            commutes=commutes,
            behavior=BehaviorProfile(
                misc_scale=float(base["misc_scale"][i]),
                misc_phase_hours=float(base["misc_phase"][i]),
                solar_peak_kw=float(base["solar_peak"][i]),
                internal_gain_kw=float(base["internal"][i]),
                draw_kwh_per_day=float(base["draw_kwh"][i]),
                draw_morning_hour=float(base["draw_morning"][i]),
                draw_evening_hour=float(base["draw_evening"][i]),
            ),
            heat_setpoint=float(base["heat_sp"][i]),
            cool_setpoint=float(base["cool_sp"][i]),
            electrified=scenario == "all-electric",
        ))

    return Fleet(
        county=county,
        scenario=scenario,
        seed=seed,
        households=households,
        scale_factor=county.true_household_count / n,
        sizing_rule=sizing_rule,
        hp_profile=profile,
    )


def apply_adoption_rate(fleet: Fleet, fraction: float, seed: int) -> Fleet:
    """Electrify a random fraction of a BAU fleet.

    The same seed electrifies nested subsets as the fraction grows, and
    fraction 1.0 reproduces the all-electric synthesis exactly (equipment is
    copied from the all-electric twin of the same base seed).
    """
    if not 0.0 <= fraction <= 1.0:
        raise ConfigError(f"adoption fraction {fraction} outside [0, 1]")
    if fleet.scenario != "bau":
        raise ConfigError("adoption applies to a BAU fleet")
    twin = synthesize_fleet(
        fleet.county, "all-electric", fleet.seed,
        sizing_rule=fleet.sizing_rule,
        hp_profile_setting=fleet.hp_profile.name,
        sample_size=len(fleet.households),
    )
    rng = stream_rng(seed, fleet.county.county_id, "adoption")
    order = rng.permutation(len(fleet.households))
    chosen = set(order[: int(round(fraction * len(fleet.households)))].tolist())

    households = []
    for i, home in enumerate(fleet.households):
        if i in chosen:
            t = twin.households[i]
            households.append(dataclasses.replace(
                home, hvac=t.hvac, water_heater=t.water_heater,
                vehicles=list(t.vehicles), electrified=True))
        else:
            households.append(dataclasses.replace(home))
    return dataclasses.replace(
        fleet, households=households,
        scenario="all-electric" if fraction >= 1.0 else "bau")


def apply_night_setback(fleet: Fleet, seed: int) -> Fleet:
    """Give every home an overnight heating setback of 1 to 4 C."""
    rng = stream_rng(seed, fleet.county.county_id, "setback")
    start = rng.uniform(21.0, 23.5, len(fleet.households))
    duration = rng.uniform(6.0, 9.0, len(fleet.households))
    depth = rng.uniform(1.0, 4.0, len(fleet.households))
    households = []
    for i, home in enumerate(fleet.households):
        behavior = dataclasses.replace(
            home.behavior,
            setback=Setback(float(start[i]), float(duration[i]), float(depth[i])))
        households.append(dataclasses.replace(home, behavior=behavior))
    return dataclasses.replace(fleet, households=households)
