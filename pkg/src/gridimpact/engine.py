"""Vectorized week simulation, peak statistics, and reinforcement sizing.

The engine materializes per-step series for every home in a fleet over one
simulation window (a peak week plus a 24 h warm-up prefix), then walks the
window step by step with all homes updated at once. Peaks are scored on the
99th percentile (nearest rank) of the scaled aggregate, warm-up excluded;
grid capacity is that peak plus a headroom margin, and the reinforcement
requirement is the capacity gap between the all-electric and BAU scenarios.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .devices import EV_RATE_EPS, PerformanceCurve, WeatherSeries
from .fleet import (BauHvac, BauVehicle, ConfigError, CountySpec, Fleet,
                    MISC_HEAT_FRACTION, stream_rng)
from .sizing import BAU_AC_COP

log = logging.getLogger(__name__)

WARMUP_HOURS = 24.0

# Drive energy per km grows in the cold (battery conditioning, cabin heat)
# and mildly in the heat (air conditioning). Multiplier on the rated rate.
EV_EFFICIENCY_MULT = PerformanceCurve.from_nodes(
    [(-30, 1.90), (-20, 1.60), (-10, 1.35), (0, 1.20), (10, 1.05),
     (15, 1.00), (20, 1.00), (25, 1.05), (30, 1.10), (40, 1.25)]
)


@dataclass(frozen=True)
class WeekWindow:
    """One simulation window: scored week plus warm-up prefix."""

    label: str
    weather: WeatherSeries
    warmup_steps: int

    def __post_init__(self) -> None:
        if not 0 <= self.warmup_steps < len(self.weather):
            raise ValueError("warm-up must be shorter than the window")

    @property
    def steps(self) -> int:
        return len(self.weather)


def select_peak_weeks(weather: WeatherSeries) -> tuple[WeekWindow, WeekWindow]:
    """Windows around the annual minimum and maximum temperatures.

    Each scored window is seven days starting three days before the extreme,
    shifted when the extreme sits near either end of the year so that both
    the window and its 24 h warm-up prefix stay inside the series. Requires
    at least eight days of data.
    """
    spd = int(round(24.0 / weather.step_hours))
    week = 7 * spd
    warm = spd
    n = len(weather)
    if n < week + warm:
        raise ValueError(
            f"weather series too short: {n} steps, need {week + warm} "
            f"(seven days plus warm-up)")

    def window(extreme_idx: int, label: str) -> WeekWindow:
        start = int(np.clip(extreme_idx - 3 * spd, warm, n - week))
        return WeekWindow(
            label=label,
            weather=weather.window(start - warm, start + week),
            warmup_steps=warm,
        )

    return (
        window(int(np.argmin(weather.temps_c)), "heat"),
        window(int(np.argmax(weather.temps_c)), "cool"),
    )


# ---------------------------------------------------------------------------
# series materialization


def _time_arrays(ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    secs = ts.astype("datetime64[s]").astype(np.int64)
    hod = (secs % 86400) / 3600.0
    weekday = ((secs // 86400) + 3) % 7  # epoch day 0 was a Thursday
    return hod, weekday >= 5


def _wrap_hours(delta: np.ndarray) -> np.ndarray:
    return (delta + 12.0) % 24.0 - 12.0


@dataclass
class FleetArrays:
    """Time-major packed series and parameters for one fleet and window.

    Shapes: [K] for shared series, [K, H] for per-home, [K, V] for
    per-vehicle. Tanks are packed densely over the homes that have one.
    """

    dt: float
    theta: np.ndarray            # [K]
    hod: np.ndarray              # [K]
    # buildings
    a1: np.ndarray               # [H]
    r1: np.ndarray               # [H]
    hsp: np.ndarray              # [K, H]
    csp: np.ndarray              # [H]
    w1: np.ndarray               # [K, H]
    misc: np.ndarray             # [K, H]
    heat_kind: np.ndarray        # [H] 1 hp, 2 resistance, 3 fossil
    cool_kind: np.ndarray        # [H] 0 none, 1 hp/ac
    cap_central: np.ndarray      # [K, H] thermal
    cop_central: np.ndarray      # [K, H]
    cap_mini: np.ndarray         # [K, H]
    cop_mini: np.ndarray         # [K, H]
    backup_kw: np.ndarray        # [H]
    cap_cool: np.ndarray         # [K, H]
    cop_cool: np.ndarray         # [K, H]
    # water tanks, packed over homes that have one
    tank_home: np.ndarray        # [Hw] indices into homes
    a3: np.ndarray               # [Hw]
    r3: np.ndarray               # [Hw]
    tank_sp: np.ndarray          # [Hw]
    tank_ambient: np.ndarray     # [Hw]
    tank_cop: np.ndarray         # [Hw]
    tank_hp_kw: np.ndarray       # [Hw]
    tank_res_kw: np.ndarray      # [Hw]
    w3: np.ndarray               # [K, Hw]
    # electric vehicles
    ev_home: np.ndarray          # [V]
    ev_cap: np.ndarray           # [V]
    ev_charger: np.ndarray       # [V]
    ev_eta: np.ndarray           # [V]
    ev_rate: np.ndarray          # [V] dissipation 1/h
    w2: np.ndarray               # [K, V]
    plugged: np.ndarray          # [K, V]

    @property
    def steps(self) -> int:
        return int(self.theta.size)

    @property
    def homes(self) -> int:
        return int(self.a1.size)


def materialize(fleet: Fleet, window: WeekWindow) -> FleetArrays:
    """Build per-step series for the window and bind them to the households."""
    weather = window.weather
    dt = weather.step_hours
    theta = weather.temps_c
    K = len(weather)
    H = len(fleet.households)
    county = fleet.county
    hod, weekend = _time_arrays(weather.timestamps)

    homes = fleet.households
    r1 = np.array([h.envelope.resistance for h in homes])
    c1 = np.array([h.envelope.capacitance for h in homes])
    a1 = np.exp(-dt / (r1 * c1))
    heat_base = np.array([h.heat_setpoint for h in homes])
    csp = np.array([h.cool_setpoint for h in homes])

    # miscellaneous load from the county daily shape, phase-shifted per home
    scale = np.array([h.behavior.misc_scale for h in homes])
    phase = np.array([h.behavior.misc_phase_hours for h in homes])
    shifted = (hod[:, None] + phase[None, :]) % 24.0
    misc = np.interp(shifted.ravel(), np.arange(24.0), county.misc_shape,
                     period=24.0).reshape(K, H) * scale[None, :]

    # exogenous gains: misc heat share, solar bell, constant occupant load
    doy = (weather.timestamps.astype("datetime64[D]")
           - weather.timestamps.astype("datetime64[Y]").astype("datetime64[D]")
           ).astype(int)
    season = 0.6 + 0.4 * 0.5 * (1.0 - np.cos(2.0 * np.pi * (doy - 10) / 365.0))
    bell = np.clip(np.sin(np.pi * (hod - 7.0) / 10.0), 0.0, None) ** 1.5 * season
    solar_peak = np.array([h.behavior.solar_peak_kw for h in homes])
    internal = np.array([h.behavior.internal_gain_kw for h in homes])
    w1 = MISC_HEAT_FRACTION * misc + bell[:, None] * solar_peak[None, :] \
        + internal[None, :]

    # heating setpoints with optional overnight setback
    hsp = np.repeat(heat_base[None, :], K, axis=0)
    for i, h in enumerate(homes):
        sb = h.behavior.setback
        if sb is not None:
            inside = (hod - sb.start_hour) % 24.0 < sb.duration_hours
            hsp[inside, i] -= sb.depth_c

    # equipment performance per step
    cap_central = np.zeros((K, H))
    cop_central = np.ones((K, H))
    cap_mini = np.zeros((K, H))
    cop_mini = np.ones((K, H))
    backup = np.zeros(H)
    cap_cool = np.zeros((K, H))
    cop_cool = np.ones((K, H))
    heat_kind = np.zeros(H, dtype=np.int8)
    cool_kind = np.zeros(H, dtype=np.int8)
    frac35 = float(fleet.hp_profile.cool_capacity_frac(35.0))
    for i, h in enumerate(homes):
        unit = h.hvac
        if isinstance(unit, BauHvac):
            heat_kind[i] = 2 if unit.heat_kind == "resistance" else 3
            backup[i] = unit.resistance_kw
            if unit.ac_cooling_kw > 0.0:
                cool_kind[i] = 1
                cap_cool[:, i] = unit.ac_cooling_kw / frac35 \
                    * fleet.hp_profile.cool_capacity_frac(theta)
                cop_cool[:, i] = BAU_AC_COP(theta)
        else:
            heat_kind[i] = 1
            cap_central[:, i] = unit.capacity_curve(theta)
            cop_central[:, i] = unit.cop_curve(theta)
            backup[i] = unit.backup_resistance_kw
            if unit.minisplit is not None:
                cap_mini[:, i] = unit.minisplit.capacity_curve(theta)
                cop_mini[:, i] = unit.minisplit.cop_curve(theta)
            cool_kind[i] = 1
            cap_cool[:, i] = unit.cooling_capacity_curve(theta)
            cop_cool[:, i] = unit.cooling_cop_curve(theta)
            if unit.minisplit is not None:
                cap_cool[:, i] += unit.minisplit.cooling_capacity_curve(theta)

    # water tanks
    tank_idx = [i for i, h in enumerate(homes) if h.water_heater is not None]
    Hw = len(tank_idx)
    tank_home = np.array(tank_idx, dtype=np.int64)
    a3 = np.zeros(Hw)
    r3 = np.zeros(Hw)
    tank_sp = np.zeros(Hw)
    tank_amb = np.zeros(Hw)
    tank_cop = np.ones(Hw)
    tank_hp = np.zeros(Hw)
    tank_res = np.zeros(Hw)
    w3 = np.zeros((K, Hw))
    base_draw = 0.04  # standing trickle, kW thermal
    for j, i in enumerate(tank_idx):
        h = homes[i]
        t = h.water_heater
        a3[j] = t.decay(dt)
        r3[j] = t.loss_resistance
        tank_sp[j] = t.setpoint_c
        tank_amb[j] = t.ambient_temp_c
        tank_cop[j] = t.cop
        tank_hp[j] = t.hp_power_cap
        tank_res[j] = t.resistance_power_cap
        b = h.behavior
        centers = np.array([b.draw_morning_hour, b.draw_evening_hour])
        amp = max(b.draw_kwh_per_day - base_draw * 24.0, 0.5) \
            / (len(centers) * math.sqrt(2.0 * math.pi) * 0.5)
        pulse = np.zeros(K)
        shift = np.where(weekend, 1.0, 0.0)
        for c in centers:
            d = _wrap_hours(hod - (c + shift))
            pulse += amp * np.exp(-0.5 * (d / 0.5) ** 2)
        w3[:, j] = base_draw + pulse

    # electric vehicles
    ev_rows = []
    for i, h in enumerate(homes):
        for v, (veh, com) in enumerate(zip(h.vehicles, h.commutes)):
            if isinstance(veh, BauVehicle):
                continue
            ev_rows.append((i, veh, com))
    V = len(ev_rows)
    ev_home = np.array([r[0] for r in ev_rows], dtype=np.int64)
    ev_cap = np.array([r[1].capacity for r in ev_rows])
    ev_charger = np.array([r[1].charge_power_cap for r in ev_rows])
    ev_eta = np.array([r[1].charge_efficiency for r in ev_rows])
    ev_rate = np.array([r[1].dissipation_rate for r in ev_rows])
    if V:
        dist = np.array([r[2].distance_km for r in ev_rows])
        dep = np.array([r[2].depart_hour for r in ev_rows])
        ret = np.array([r[2].return_hour for r in ev_rows])
        wk = np.array([r[2].weekend_hour for r in ev_rows])
        speed = np.array([r[2].speed_kmh for r in ev_rows])
        rate = np.array([r[2].kwh_per_km for r in ev_rows])
        dur = np.minimum(dist / speed, (ret - dep) / 2.0)

        h = hod[:, None]
        we = weekend[:, None]
        away_wd = (h >= dep) & (h < ret)
        drive_wd = ((h >= dep) & (h < dep + dur)) | ((h >= ret - dur) & (h < ret))
        wk_end = wk + 2.0 * dur + 1.0
        away_we = (h >= wk) & (h < wk_end)
        drive_we = ((h >= wk) & (h < wk + dur)) | \
                   ((h >= wk_end - dur) & (h < wk_end))
        away = np.where(we, away_we, away_wd)
        drive = np.where(we, drive_we, drive_wd)
        mult = EV_EFFICIENCY_MULT(theta)
        w2 = drive * (speed * rate)[None, :] * mult[:, None]
        plugged = ~away
    else:
        w2 = np.zeros((K, 0))
        plugged = np.ones((K, 0), dtype=bool)

    arrays = FleetArrays(
        dt=dt, theta=theta, hod=hod,
        a1=a1, r1=r1, hsp=hsp, csp=csp, w1=w1, misc=misc,
        heat_kind=heat_kind, cool_kind=cool_kind,
        cap_central=cap_central, cop_central=cop_central,
        cap_mini=cap_mini, cop_mini=cop_mini, backup_kw=backup,
        cap_cool=cap_cool, cop_cool=cop_cool,
        tank_home=tank_home, a3=a3, r3=r3, tank_sp=tank_sp,
        tank_ambient=tank_amb, tank_cop=tank_cop, tank_hp_kw=tank_hp,
        tank_res_kw=tank_res, w3=w3,
        ev_home=ev_home, ev_cap=ev_cap, ev_charger=ev_charger,
        ev_eta=ev_eta, ev_rate=ev_rate, w2=w2, plugged=plugged,
    )

    # bind the materialized series back onto the household objects
    for i, h in enumerate(homes):
        h.envelope.heat_setpoints = hsp[:, i]
        h.envelope.cool_setpoints = np.full(K, csp[i])
        h.envelope.gains = w1[:, i]
        h.misc_load_series = misc[:, i]
    for j, i in enumerate(tank_idx):
        homes[i].water_heater.draws = w3[:, j]
    for n, (i, veh, _c) in enumerate(ev_rows):
        veh.drive_powers = w2[:, n]
        veh.plugged = plugged[:, n]

    return arrays


# ---------------------------------------------------------------------------
# simulation


@dataclass
class AggregateProfile:
    """Scaled fleet demand by category over one window."""

    timestamps: np.ndarray
    step_hours: float
    misc_kw: np.ndarray
    water_kw: np.ndarray
    ev_kw: np.ndarray
    hvac_kw: np.ndarray
    total_kw: np.ndarray
    warmup_steps: int
    label: str = ""
    diagnostics: dict = field(default_factory=dict)

    def scored_total(self) -> np.ndarray:
        return self.total_kw[self.warmup_steps:]

    def categories(self) -> dict[str, np.ndarray]:
        return {"misc": self.misc_kw, "water": self.water_kw,
                "ev": self.ev_kw, "hvac": self.hvac_kw}


@dataclass
class SimulationTrace:
    """Optional per-home state trace used by the coordination layer."""

    indoor_temp: np.ndarray      # [K, H] end-of-step
    tank_temp: np.ndarray        # [K, Hw]
    ev_energy: np.ndarray        # [K, V]
    hvac_elec: np.ndarray        # [K, H]
    tank_elec: np.ndarray        # [K, Hw]
    ev_elec: np.ndarray          # [K, V]


def _simulate_arrays(arr: FleetArrays, keep_trace: bool) -> tuple[dict, Optional[SimulationTrace]]:
    K, H = arr.steps, arr.homes
    Hw = arr.tank_home.size
    V = arr.ev_home.size
    dt = arr.dt

    one_m_a1 = 1.0 - arr.a1
    t1 = arr.hsp[0].copy()
    t3 = arr.tank_sp.copy()
    ev = arr.ev_cap.copy()
    a2 = np.where(arr.ev_rate < EV_RATE_EPS, 1.0, np.exp(-arr.ev_rate * dt))
    # (1-a2)/r with the dt limit below the rate floor
    gain2 = np.where(arr.ev_rate < EV_RATE_EPS, dt,
                     (1.0 - a2) / np.where(arr.ev_rate < EV_RATE_EPS, 1.0, arr.ev_rate))
    one_m_a3 = 1.0 - arr.a3
    tank_th_cap = arr.tank_cop * arr.tank_hp_kw + arr.tank_res_kw
    hp_th_cap = arr.tank_cop * arr.tank_hp_kw

    is_hp = arr.heat_kind == 1
    is_fossil = arr.heat_kind == 3
    can_cool = arr.cool_kind > 0

    misc_kw = arr.misc.sum(axis=1)
    water_kw = np.zeros(K)
    ev_kw = np.zeros(K)
    hvac_kw = np.zeros(K)
    depleted = 0
    comfort = 0

    trace = None
    if keep_trace:
        trace = SimulationTrace(
            indoor_temp=np.zeros((K, H)), tank_temp=np.zeros((K, Hw)),
            ev_energy=np.zeros((K, V)), hvac_elec=np.zeros((K, H)),
            tank_elec=np.zeros((K, Hw)), ev_elec=np.zeros((K, V)),
        )

    for k in range(K):
        th = arr.theta[k]
        hsp_k = arr.hsp[k]
        w1_k = arr.w1[k]

        drive = ((hsp_k - arr.a1 * t1) / one_m_a1 - th) / arr.r1 - w1_k
        need_heat = drive > 0.0
        drive_cool = ((arr.csp - arr.a1 * t1) / one_m_a1 - th) / arr.r1 - w1_k
        need_cool = ~need_heat & (drive_cool < 0.0) & can_cool

        qc = np.clip(drive, 0.0, arr.cap_central[k])
        qm = np.clip(drive - arr.cap_central[k], 0.0, arr.cap_mini[k])
        qr = np.clip(drive - arr.cap_central[k] - arr.cap_mini[k], 0.0, arr.backup_kw)
        p_heat = qc / arr.cop_central[k] + qm / arr.cop_mini[k] + qr
        q_heat = qc + qm + qr

        q_removed = np.clip(-drive_cool, 0.0, arr.cap_cool[k])
        p_cool = q_removed / arr.cop_cool[k]

        delivered = np.where(
            need_heat, np.where(is_fossil, drive, q_heat),
            np.where(need_cool, -q_removed, 0.0))
        p_hvac = np.where(need_heat & ~is_fossil, p_heat,
                          np.where(need_cool, p_cool, 0.0))
        t1 = arr.a1 * t1 + one_m_a1 * (th + arr.r1 * (delivered + w1_k))
        hvac_kw[k] = p_hvac.sum()
        comfort += int(np.count_nonzero(
            (need_heat & (t1 < hsp_k - 0.5)) | (need_cool & (t1 > arr.csp + 0.5))))

        if Hw:
            w3_k = arr.w3[k]
            duty = ((arr.tank_sp - arr.a3 * t3) / one_m_a3 - arr.tank_ambient) \
                / arr.r3 + w3_k
            q3 = np.clip(duty, 0.0, tank_th_cap)
            hp_part = np.minimum(q3, hp_th_cap)
            p3 = hp_part / arr.tank_cop + (q3 - hp_part)
            t3 = arr.a3 * t3 + one_m_a3 * (
                arr.tank_ambient + arr.r3 * (q3 - w3_k))
            water_kw[k] = p3.sum()
        else:
            p3 = np.zeros(0)

        if V:
            w2_k = arr.w2[k]
            fill = (arr.ev_cap - a2 * ev + gain2 * w2_k) / (gain2 * arr.ev_eta)
            p2 = np.where(arr.plugged[k] & (ev < arr.ev_cap),
                          np.clip(fill, 0.0, arr.ev_charger), 0.0)
            raw = a2 * ev + gain2 * (arr.ev_eta * p2 - w2_k)
            depleted += int(np.count_nonzero(raw < -1e-9))
            ev = np.clip(raw, 0.0, arr.ev_cap)
            ev_kw[k] = p2.sum()
        else:
            p2 = np.zeros(0)

        if keep_trace:
            trace.indoor_temp[k] = t1
            trace.hvac_elec[k] = p_hvac
            if Hw:
                trace.tank_temp[k] = t3
                trace.tank_elec[k] = p3
            if V:
                trace.ev_energy[k] = ev
                trace.ev_elec[k] = p2

    return ({"misc": misc_kw, "water": water_kw, "ev": ev_kw, "hvac": hvac_kw,
             "depleted_steps": depleted, "comfort_violation_steps": comfort},
            trace)


def simulate_week(
    fleet: Fleet,
    window: WeekWindow,
    dt_hours: Optional[float] = None,
    keep_trace: bool = False,
) -> AggregateProfile | tuple[AggregateProfile, FleetArrays, SimulationTrace]:
    """Simulate one window and return the scaled aggregate profile.

    dt_hours, when given, must match the window's native step; the engine
    never resamples. With keep_trace the packed arrays and per-home state
    trace are returned as well (the coordination layer builds on them).
    """
    if dt_hours is not None and abs(dt_hours - window.weather.step_hours) > 1e-12:
        raise ConfigError(
            f"dt {dt_hours} h does not match the weather step "
            f"{window.weather.step_hours} h")
    arr = materialize(fleet, window)
    sums, trace = _simulate_arrays(arr, keep_trace)
    s = fleet.scale_factor
    misc, water, evs, hvac = (sums["misc"] * s, sums["water"] * s,
                              sums["ev"] * s, sums["hvac"] * s)
    diagnostics = {
        "ev_depleted_steps": sums["depleted_steps"],
        "comfort_violation_steps": sums["comfort_violation_steps"],
    }
    if sums["depleted_steps"]:
        log.info("%s/%s: %d vehicle-steps hit an empty battery",
                 fleet.county.county_id, window.label, sums["depleted_steps"])
    if sums["comfort_violation_steps"]:
        log.info("%s/%s: %d home-steps outside comfort tolerance",
                 fleet.county.county_id, window.label,
                 sums["comfort_violation_steps"])
    profile = AggregateProfile(
        timestamps=window.weather.timestamps,
        step_hours=window.weather.step_hours,
        misc_kw=misc, water_kw=water, ev_kw=evs, hvac_kw=hvac,
        total_kw=misc + water + evs + hvac,
        warmup_steps=window.warmup_steps,
        label=window.label,
        diagnostics=diagnostics,
    )
    if keep_trace:
        return profile, arr, trace
    return profile


# ---------------------------------------------------------------------------
# peaks, capacity, reinforcement


def percentile_nearest_rank(values: np.ndarray, q: float = 0.99) -> float:
    """Nearest-rank percentile: the ceil(q*n)-th smallest value."""
    v = np.sort(np.asarray(values, dtype=float))
    if v.size == 0:
        raise ValueError("cannot take a percentile of nothing")
    rank = max(1, math.ceil(q * v.size))
    return float(v[rank - 1])


def peak99(profile: AggregateProfile) -> float:
    return percentile_nearest_rank(profile.scored_total(), 0.99)


@dataclass(frozen=True)
class GridCapacityEstimate:
    peak99_kw: float
    headroom: float
    capacity_kw: float


def capacity_estimate(profiles: Sequence[AggregateProfile],
                      headroom: float) -> GridCapacityEstimate:
    """Capacity needed to carry the worst scored week at a headroom margin."""
    if headroom < 0.0:
        raise ConfigError(f"headroom must be non-negative, got {headroom}")
    peak = max(peak99(p) for p in profiles)
    return GridCapacityEstimate(peak, headroom, peak * (1.0 + headroom))


def draw_bau_headroom(county: CountySpec) -> float:
    """Unknown existing margin, a stable county property drawn from its id."""
    lo, hi = county.bau_headroom_range
    rng = stream_rng(0, county.county_id, "bau-headroom")
    return float(rng.uniform(lo, hi))


@dataclass(frozen=True)
class ReinforcementRequirement:
    county_id: str
    bau: GridCapacityEstimate
    future: GridCapacityEstimate
    gap_kw: float
    gap_per_household_kw: float


def reinforcement_requirement(
    county: CountySpec,
    bau_estimate: GridCapacityEstimate,
    future_estimate: GridCapacityEstimate,
) -> ReinforcementRequirement:
    """Capacity shortfall of today's grid against the future scenario."""
    gap = max(0.0, future_estimate.capacity_kw - bau_estimate.capacity_kw)
    return ReinforcementRequirement(
        county_id=county.county_id,
        bau=bau_estimate,
        future=future_estimate,
        gap_kw=gap,
        gap_per_household_kw=gap / county.true_household_count,
    )


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class PeakSample:
    peaks_kw: np.ndarray
    mean_kw: float
    std_kw: float
    histogram: tuple[np.ndarray, np.ndarray]


def monte_carlo_peaks(
    county: CountySpec,
    weather: WeatherSeries,
    runs: int,
    master_seed: int,
    scenario: str = "all-electric",
    sample_size: Optional[int] = None,
    seeds: Optional[Sequence[int]] = None,
    bins: int = 30,
    **synth_kwargs,
) -> PeakSample:
    """Distribution of the capacity-defining peak across fleet resamples.

    Each run resynthesizes the fleet with a seed spawned from the master
    seed (or taken from an explicit list) and scores the worse of the two
    peak weeks. Weather stays fixed; only the household sample varies.
    """
    from .fleet import synthesize_fleet

    if runs < 1:
        raise ConfigError(f"runs must be >= 1, got {runs}")
    heat_week, cool_week = select_peak_weeks(weather)
    if seeds is None:
        children = np.random.SeedSequence(master_seed).spawn(runs)
        seeds = [int(c.generate_state(1)[0]) for c in children]
    elif len(seeds) != runs:
        raise ConfigError(f"{len(seeds)} seeds for {runs} runs")

    peaks = np.empty(runs)
    for r, run_seed in enumerate(seeds):
        fl = synthesize_fleet(county, scenario, int(run_seed),
                              sample_size=sample_size, **synth_kwargs)
        peaks[r] = max(peak99(simulate_week(fl, heat_week)),
                       peak99(simulate_week(fl, cool_week)))
    counts, edges = np.histogram(peaks, bins=bins)
    return PeakSample(
        peaks_kw=peaks,
        mean_kw=float(peaks.mean()),
        std_kw=float(peaks.std(ddof=1)) if runs > 1 else 0.0,
        histogram=(counts, edges),
    )
