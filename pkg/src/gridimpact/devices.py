"""Discrete-time device models for household electric loads.

Every stateful device follows the same first-order pattern: a lumped store
(indoor air, battery, tank) relaxes toward an ambient level and is pushed by
controllable power.  With step width dt hours the exact update for a store with
resistance R and capacitance C is

    x(k+1) = a * x(k) + (1 - a) * (ambient + R * net_power),   a = exp(-dt / (R * C))

which is the zero-order-hold solution of the continuous balance, so the model
is exact for piecewise-constant inputs regardless of step width.  Units are
kW, kWh, hours and degrees Celsius throughout.

Sign conventions: building thermal power q is positive when heating and
negative when cooling; water draw and vehicle driving are positive losses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

# Below this self-dissipation rate (1/h) the exact battery update divides two
# near-zero quantities; the limit form is used instead.
EV_RATE_EPS = 1e-6


def _check_finite(**named: float) -> None:
    for name, value in named.items():
        if not np.all(np.isfinite(value)):
            raise ValueError(f"non-finite value for {name!r}: {value}")


def decay_factor(resistance: float, capacitance: float, dt_hours: float) -> float:
    """Per-step retention a = exp(-dt/(R*C)) of a first-order store."""
    if resistance <= 0.0 or capacitance <= 0.0 or dt_hours <= 0.0:
        raise ValueError(
            f"resistance, capacitance and dt must be positive, got "
            f"R={resistance}, C={capacitance}, dt={dt_hours}"
        )
    return math.exp(-dt_hours / (resistance * capacitance))


@dataclass(frozen=True)
class PerformanceCurve:
    """Piecewise-linear value vs outdoor temperature, clamped at both ends.

    Used for heat pump capacity and COP. Temperatures must be strictly
    increasing; evaluation outside the node range holds the end value.
    """

    temps_c: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        temps = np.asarray(self.temps_c, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if temps.size == 0:
            raise ValueError("performance curve needs at least one node")
        if temps.shape != values.shape or temps.ndim != 1:
            raise ValueError("curve temps and values must be 1-d and equal length")
        if temps.size > 1 and not np.all(np.diff(temps) > 0):
            raise ValueError("curve temperatures must be strictly increasing")
        if not (np.all(np.isfinite(temps)) and np.all(np.isfinite(values))):
            raise ValueError("curve nodes must be finite")
        object.__setattr__(self, "temps_c", temps)
        object.__setattr__(self, "values", values)

    def __call__(self, theta_c):
        return np.interp(theta_c, self.temps_c, self.values)

    def scaled(self, factor: float) -> "PerformanceCurve":
        return PerformanceCurve(self.temps_c, self.values * factor)

    @classmethod
    def from_nodes(cls, nodes) -> "PerformanceCurve":
        temps, values = zip(*nodes)
        return cls(np.asarray(temps, float), np.asarray(values, float))


@dataclass
class WeatherSeries:
    """Uniformly sampled outdoor temperature trace."""

    timestamps: np.ndarray  # datetime64[s]
    temps_c: np.ndarray
    step_hours: float

    def __post_init__(self) -> None:
        self.timestamps = np.asarray(self.timestamps, dtype="datetime64[s]")
        self.temps_c = np.asarray(self.temps_c, dtype=float)
        if self.timestamps.shape != self.temps_c.shape or self.timestamps.ndim != 1:
            raise ValueError("weather timestamps and temperatures must align")
        if self.timestamps.size < 2:
            raise ValueError("weather series needs at least two samples")
        if not np.all(np.isfinite(self.temps_c)):
            bad = int(np.flatnonzero(~np.isfinite(self.temps_c))[0])
            raise ValueError(f"weather temperature is not finite at row {bad}")
        deltas = np.diff(self.timestamps).astype("timedelta64[s]").astype(np.int64)
        expected = int(round(self.step_hours * 3600.0))
        if expected <= 0:
            raise ValueError(f"step_hours must be positive, got {self.step_hours}")
        bad = np.flatnonzero(deltas != expected)
        if bad.size:
            k = int(bad[0])
            raise ValueError(
                f"weather series is not uniform at row {k + 1}: "
                f"step of {deltas[k]} s, expected {expected} s"
            )

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def window(self, start: int, stop: int) -> "WeatherSeries":
        return WeatherSeries(
            self.timestamps[start:stop], self.temps_c[start:stop], self.step_hours
        )


@dataclass
class BuildingEnvelope:
    """Single-zone building: indoor air node behind one resistance.

    resistance in C/kW, capacitance in kWh/C. Setpoint and gain series are
    bound per simulation window; length checks happen at binding time.
    """

    resistance: float
    capacitance: float
    indoor_temp: float
    heat_setpoints: Optional[np.ndarray] = None
    cool_setpoints: Optional[np.ndarray] = None
    gains: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.resistance <= 0.0 or self.capacitance <= 0.0:
            raise ValueError(
                f"envelope R and C must be positive, got R={self.resistance}, "
                f"C={self.capacitance}"
            )

    def decay(self, dt_hours: float) -> float:
        return decay_factor(self.resistance, self.capacitance, dt_hours)


@dataclass
class HeatPumpUnit:
    """Air-source heat pump with optional resistance backup and mini-split.

    Curves are absolute: capacity_curve gives deliverable thermal kW at a
    given outdoor temperature, cop_curve the heating COP there. Cooling has
    its own pair. nameplate_cooling_kw names the unit; central units top out
    at 17.6 kW (five tons).
    """

    capacity_curve: PerformanceCurve
    cop_curve: PerformanceCurve
    nameplate_cooling_kw: float
    backup_resistance_kw: float = 0.0
    cooling_capacity_curve: Optional[PerformanceCurve] = None
    cooling_cop_curve: Optional[PerformanceCurve] = None
    minisplit: Optional["HeatPumpUnit"] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.nameplate_cooling_kw <= 17.6:
            raise ValueError(
                f"nameplate must lie in (0, 17.6] kW, got {self.nameplate_cooling_kw}"
            )
        if self.backup_resistance_kw < 0.0:
            raise ValueError("backup resistance capacity cannot be negative")
        if np.any(self.cop_curve.values < 1.0):
            raise ValueError("heating COP below 1 is not physical for a heat pump")
        if np.any(self.capacity_curve.values < 0.0):
            raise ValueError("negative thermal capacity in curve")


def hp_performance(unit: HeatPumpUnit, theta_c):
    """Heating capacity (kW thermal) and COP at outdoor temperature theta."""
    return unit.capacity_curve(theta_c), unit.cop_curve(theta_c)


def hp_cooling_performance(unit: HeatPumpUnit, theta_c):
    """Cooling capacity (kW thermal removed) and COP at outdoor temperature."""
    if unit.cooling_capacity_curve is None or unit.cooling_cop_curve is None:
        raise ValueError("unit has no cooling curves")
    return unit.cooling_capacity_curve(theta_c), unit.cooling_cop_curve(theta_c)


# ---------------------------------------------------------------------------
# building


def step_building(
    env: BuildingEnvelope, theta_c: float, thermal_kw: float, dt_hours: float,
    gain_kw: float = 0.0,
) -> float:
    """One exact step of the indoor temperature; returns the new temperature.

    thermal_kw is delivered HVAC heat (negative when cooling), gain_kw the
    exogenous gain for this step. Rejects non-finite inputs.
    """
    _check_finite(theta_c=theta_c, thermal_kw=thermal_kw, gain_kw=gain_kw,
                  indoor_temp=env.indoor_temp)
    a = env.decay(dt_hours)
    return a * env.indoor_temp + (1.0 - a) * (
        theta_c + env.resistance * (thermal_kw + gain_kw)
    )


def ideal_thermal_power(
    env: BuildingEnvelope, target_c: float, theta_c: float, dt_hours: float,
    gain_kw: float = 0.0,
) -> float:
    """Thermal power that lands the indoor temperature exactly on target.

    Inverts the one-step update; unclamped, so the result may exceed what the
    installed equipment can deliver or fall below zero (a cooling need).
    """
    _check_finite(target_c=target_c, theta_c=theta_c, gain_kw=gain_kw,
                  indoor_temp=env.indoor_temp)
    a = env.decay(dt_hours)
    return ((target_c - a * env.indoor_temp) / (1.0 - a) - theta_c) / env.resistance - gain_kw


def hvac_electric_power(thermal_need_kw, capacity_kw, backup_kw, cop):
    """Electric draw for a heating need served by heat pump then resistance.

    Piecewise: zero below zero need, need/cop up to capacity, then one-for-one
    resistance up to backup_kw, then flat at the installed maximum. Continuous
    and non-decreasing in the need. Works element-wise on arrays.
    """
    hp_heat = np.clip(thermal_need_kw, 0.0, capacity_kw)
    resist = np.clip(thermal_need_kw - capacity_kw, 0.0, backup_kw)
    return hp_heat / cop + resist


def cooling_electric_power(thermal_need_kw, capacity_kw, cop):
    """Electric draw for a (negative) cooling need; same saturation, no backup."""
    removed = np.clip(-np.asarray(thermal_need_kw, dtype=float), 0.0, capacity_kw)
    return removed / cop


def delivered_heat(thermal_need_kw, capacity_kw, backup_kw):
    """Thermal power actually delivered for a heating need (saturation only)."""
    return np.clip(thermal_need_kw, 0.0, capacity_kw + backup_kw)


# ---------------------------------------------------------------------------
# electric vehicle battery


@dataclass
class EvBattery:
    """EV battery with charger, self-dissipation and driving loss.

    energy/capacity in kWh, charge_power_cap in kW electric,
    dissipation_rate in 1/h, charge_efficiency dimensionless. Driving and
    plug state series are bound per simulation window.
    """

    energy: float
    capacity: float
    charge_power_cap: float
    charge_efficiency: float = 0.9
    dissipation_rate: float = 1e-4
    drive_powers: Optional[np.ndarray] = None
    plugged: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.capacity <= 0.0:
            raise ValueError(f"battery capacity must be positive, got {self.capacity}")
        if not 0.0 <= self.energy <= self.capacity:
            raise ValueError(
                f"battery energy {self.energy} outside [0, {self.capacity}]"
            )
        if not 0.0 < self.charge_efficiency <= 1.0:
            raise ValueError("charge efficiency must lie in (0, 1]")
        if self.charge_power_cap < 0.0 or self.dissipation_rate < 0.0:
            raise ValueError("charger cap and dissipation rate cannot be negative")


def step_ev(
    batt: EvBattery, charge_kw: float, drive_kw: float, dt_hours: float,
) -> tuple[float, bool]:
    """One battery step; returns (new energy, depleted flag).

    Exact exponential form for a real dissipation rate; below EV_RATE_EPS the
    r -> 0 limit E + dt*(eta*p - w) is used. Energy clamps to [0, capacity]
    and the depleted flag reports a clamp at zero (drive demand unmet).
    """
    _check_finite(charge_kw=charge_kw, drive_kw=drive_kw, energy=batt.energy)
    net = batt.charge_efficiency * charge_kw - drive_kw
    r = batt.dissipation_rate
    if r < EV_RATE_EPS:
        raw = batt.energy + dt_hours * net
    else:
        a = math.exp(-r * dt_hours)
        raw = a * batt.energy + (1.0 - a) / r * net
    depleted = raw < 0.0
    return float(min(max(raw, 0.0), batt.capacity)), bool(depleted)


def uncoordinated_ev_charge_policy(batt: EvBattery, step: int, dt_hours: float) -> float:
    """Charge at full rate whenever plugged in and below capacity.

    The final increment tapers so the battery lands exactly on its capacity
    instead of overshooting into the clamp; everywhere else the draw is the
    charger cap.
    """
    if batt.plugged is None:
        raise ValueError("battery has no plug-state series bound")
    if not batt.plugged[step] or batt.energy >= batt.capacity:
        return 0.0
    r = batt.dissipation_rate
    if r < EV_RATE_EPS:
        fill = (batt.capacity - batt.energy) / (dt_hours * batt.charge_efficiency)
    else:
        a = math.exp(-r * dt_hours)
        fill = (batt.capacity - a * batt.energy) * r / ((1.0 - a) * batt.charge_efficiency)
    return float(min(batt.charge_power_cap, fill))


# ---------------------------------------------------------------------------
# water heater


@dataclass
class WaterHeaterTank:
    """Storage water heater, heat pump with resistance backup.

    loss_resistance in C/kW against the ambient_temp_c room, capacitance in
    kWh/C of the stored water. cop of 1 with hp_power_cap of 0 models a pure
    resistance tank. Draw series w (kW thermal removed) binds per window.
    """

    water_temp: float
    capacitance: float
    loss_resistance: float
    setpoint_c: float
    cop: float = 1.0
    hp_power_cap: float = 0.0
    resistance_power_cap: float = 4.5
    ambient_temp_c: float = 20.0
    draws: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        if self.capacitance <= 0.0 or self.loss_resistance <= 0.0:
            raise ValueError("tank R and C must be positive")
        if self.cop < 1.0:
            raise ValueError("tank COP below 1 is not physical")
        if self.hp_power_cap < 0.0 or self.resistance_power_cap < 0.0:
            raise ValueError("heater power caps cannot be negative")

    def thermal_cap(self) -> float:
        """Largest deliverable thermal power, cop*hp_cap + resistance cap."""
        return self.cop * self.hp_power_cap + self.resistance_power_cap

    def decay(self, dt_hours: float) -> float:
        return decay_factor(self.loss_resistance, self.capacitance, dt_hours)


def step_water_heater(
    tank: WaterHeaterTank, thermal_kw: float, draw_kw: float, dt_hours: float,
) -> float:
    """One tank step; thermal_kw in [0, tank.thermal_cap()] is the caller's duty.

    The draw enters with a minus sign: hot water leaving is a loss the same
    way standby leakage is.
    """
    _check_finite(thermal_kw=thermal_kw, draw_kw=draw_kw, water_temp=tank.water_temp)
    a = tank.decay(dt_hours)
    return a * tank.water_temp + (1.0 - a) * (
        tank.ambient_temp_c + tank.loss_resistance * (thermal_kw - draw_kw)
    )


def ideal_tank_power(
    tank: WaterHeaterTank, target_c: float, draw_kw: float, dt_hours: float,
) -> float:
    """Thermal power that would land the tank exactly on target (unclamped)."""
    a = tank.decay(dt_hours)
    return (
        (target_c - a * tank.water_temp) / (1.0 - a) - tank.ambient_temp_c
    ) / tank.loss_resistance + draw_kw


def tank_electric_power(thermal_kw, cop, hp_power_cap, resistance_power_cap):
    """Electric draw for a tank thermal duty, heat pump first then resistance."""
    hp_thermal_cap = cop * np.asarray(hp_power_cap, dtype=float)
    hp_thermal = np.clip(thermal_kw, 0.0, hp_thermal_cap)
    resist = np.clip(thermal_kw - hp_thermal_cap, 0.0, resistance_power_cap)
    return hp_thermal / cop + resist
