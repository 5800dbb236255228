import math

import numpy as np
import pytest

from gridimpact.devices import (BuildingEnvelope, EvBattery, HeatPumpUnit,
                                PerformanceCurve, WaterHeaterTank,
                                WeatherSeries, cooling_electric_power,
                                decay_factor, delivered_heat,
                                hvac_electric_power, ideal_tank_power,
                                ideal_thermal_power, step_building, step_ev,
                                step_water_heater, tank_electric_power,
                                uncoordinated_ev_charge_policy)


def make_env(r=2.0, c=5.0, t=20.0):
    return BuildingEnvelope(resistance=r, capacitance=c, indoor_temp=t)


class TestDecayFactor:
    def test_hand_value(self):
        # R*C = 10 h, dt = 1 h: one-step retention exp(-0.1)
        assert decay_factor(2.0, 5.0, 1.0) == pytest.approx(
            math.exp(-0.1), rel=1e-15)

    def test_step_composition(self):
        # two half steps must equal one full step exactly
        a_full = decay_factor(3.0, 2.0, 1.0)
        a_half = decay_factor(3.0, 2.0, 0.5)
        assert a_half * a_half == pytest.approx(a_full, rel=1e-14)

    @pytest.mark.parametrize("r,c,dt", [(0, 1, 1), (1, -2, 1), (1, 1, 0)])
    def test_rejects_nonpositive(self, r, c, dt):
        with pytest.raises(ValueError):
            decay_factor(r, c, dt)


class TestStepBuilding:
    def test_free_response_decays_to_ambient(self):
        env = make_env(t=20.0)
        t = env.indoor_temp
        for _ in range(400):
            t = step_building(
                BuildingEnvelope(2.0, 5.0, t), -5.0, 0.0, 1.0)
        assert t == pytest.approx(-5.0, abs=1e-9)

    def test_matches_continuous_solution(self):
        # constant input: T(t) = T_inf + (T0 - T_inf) exp(-t/RC)
        r, c, theta, q = 2.5, 4.0, -10.0, 6.0
        t_inf = theta + r * q
        env = make_env(r, c, 18.0)
        got = step_building(env, theta, q, 3.0)
        want = t_inf + (18.0 - t_inf) * math.exp(-3.0 / (r * c))
        assert got == pytest.approx(want, rel=1e-12)

    def test_two_small_steps_equal_one_big(self):
        env = make_env(3.0, 2.0, 21.0)
        mid = step_building(env, -2.0, 4.0, 0.5)
        end = step_building(BuildingEnvelope(3.0, 2.0, mid), -2.0, 4.0, 0.5)
        assert end == pytest.approx(
            step_building(env, -2.0, 4.0, 1.0), rel=1e-12)

    def test_rejects_nan(self):
        with pytest.raises(ValueError):
            step_building(make_env(), float("nan"), 0.0, 1.0)


class TestIdealThermalPower:
    def test_exact_tracking_property(self, rng):
        # criterion-4 shape: inverted power always lands on the target
        for _ in range(2000):
            r = rng.uniform(0.5, 6.0)
            c = rng.uniform(0.5, 8.0)
            t0 = rng.uniform(-10, 35)
            theta = rng.uniform(-30, 45)
            target = rng.uniform(15, 25)
            gain = rng.uniform(-1, 3)
            dt = rng.choice([0.25, 0.5, 1.0])
            env = BuildingEnvelope(r, c, t0)
            q = ideal_thermal_power(env, target, theta, dt, gain)
            landed = step_building(env, theta, q, dt, gain)
            assert landed == pytest.approx(target, abs=1e-9)

    def test_steady_state_value(self):
        # holding temperature forever costs the conduction loss exactly
        env = BuildingEnvelope(2.0, 5.0, 20.0)
        q = ideal_thermal_power(env, 20.0, -5.0, 1.0)
        assert q == pytest.approx((20.0 - (-5.0)) / 2.0, rel=1e-12)

    def test_sign_flips_for_cooling(self):
        env = BuildingEnvelope(2.0, 5.0, 24.0)
        assert ideal_thermal_power(env, 24.0, 35.0, 1.0) < 0.0


class TestHvacElectricPower:
    def test_branch_values(self):
        # cop 3, cap 6 kW, backup 4 kW
        assert hvac_electric_power(-2.0, 6.0, 4.0, 3.0) == 0.0
        assert hvac_electric_power(3.0, 6.0, 4.0, 3.0) == pytest.approx(1.0)
        assert hvac_electric_power(8.0, 6.0, 4.0, 3.0) == pytest.approx(
            6.0 / 3.0 + 2.0)
        assert hvac_electric_power(99.0, 6.0, 4.0, 3.0) == pytest.approx(
            6.0 / 3.0 + 4.0)

    def test_continuity_and_monotonicity(self, rng):
        # criterion-3 shape: no jumps at the clip corners, never decreasing
        for _ in range(300):
            cap = rng.uniform(0.5, 20.0)
            backup = rng.uniform(0.0, 15.0)
            cop = rng.uniform(1.0, 6.0)
            for corner in (0.0, cap, cap + backup):
                eps = 1e-7
                below = hvac_electric_power(corner - eps, cap, backup, cop)
                above = hvac_electric_power(corner + eps, cap, backup, cop)
                assert abs(above - below) < 1e-5
            needs = np.sort(rng.uniform(-5, cap + backup + 5, 50))
            draws = hvac_electric_power(needs, cap, backup, cop)
            assert np.all(np.diff(draws) >= -1e-12)

    def test_vectorized_matches_scalar(self, rng):
        needs = rng.uniform(-5, 30, 64)
        vec = hvac_electric_power(needs, 7.0, 3.0, 2.5)
        scl = [hvac_electric_power(float(n), 7.0, 3.0, 2.5) for n in needs]
        np.testing.assert_allclose(vec, scl, rtol=0, atol=0)

    def test_cooling_power(self):
        assert cooling_electric_power(-6.0, 8.0, 3.0) == pytest.approx(2.0)
        assert cooling_electric_power(-20.0, 8.0, 3.0) == pytest.approx(
            8.0 / 3.0)
        assert cooling_electric_power(4.0, 8.0, 3.0) == 0.0

    def test_delivered_heat_saturates(self):
        assert delivered_heat(5.0, 6.0, 2.0) == 5.0
        assert delivered_heat(10.0, 6.0, 2.0) == 8.0
        assert delivered_heat(-3.0, 6.0, 2.0) == 0.0


class TestPerformanceCurve:
    def test_interpolates_and_clamps(self):
        curve = PerformanceCurve.from_nodes([(-10, 2.0), (10, 4.0)])
        assert curve(0.0) == pytest.approx(3.0)
        assert curve(-40.0) == 2.0
        assert curve(50.0) == 4.0

    def test_scaled(self):
        curve = PerformanceCurve.from_nodes([(0, 1.0), (10, 2.0)])
        assert curve.scaled(3.5)(10.0) == pytest.approx(7.0)

    def test_rejects_unsorted(self):
        with pytest.raises(ValueError):
            PerformanceCurve(np.array([5.0, 1.0]), np.array([1.0, 2.0]))


class TestHeatPumpUnit:
    def test_rejects_bad_nameplate(self):
        curve = PerformanceCurve.from_nodes([(0, 5.0)])
        cop = PerformanceCurve.from_nodes([(0, 3.0)])
        with pytest.raises(ValueError):
            HeatPumpUnit(curve, cop, nameplate_cooling_kw=18.0)
        with pytest.raises(ValueError):
            HeatPumpUnit(curve, cop, nameplate_cooling_kw=0.0)

    def test_rejects_subunity_cop(self):
        curve = PerformanceCurve.from_nodes([(0, 5.0)])
        bad = PerformanceCurve.from_nodes([(0, 0.8)])
        with pytest.raises(ValueError):
            HeatPumpUnit(curve, bad, nameplate_cooling_kw=5.0)


class TestEvBattery:
    def test_zero_rate_limit_form(self):
        batt = EvBattery(40.0, 80.0, 11.0, charge_efficiency=0.9,
                         dissipation_rate=0.0)
        e, depleted = step_ev(batt, 10.0, 2.0, 1.0)
        assert e == pytest.approx(40.0 + 0.9 * 10.0 - 2.0, rel=1e-12)
        assert not depleted

    def test_exact_form_matches_series_limit(self):
        # small but real rate: exact form within o(r) of the limit form
        e_small, _ = step_ev(
            EvBattery(40.0, 80.0, 11.0, dissipation_rate=1e-5), 5.0, 1.0, 1.0)
        e_zero, _ = step_ev(
            EvBattery(40.0, 80.0, 11.0, dissipation_rate=0.0), 5.0, 1.0, 1.0)
        assert e_small == pytest.approx(e_zero, abs=1e-3)

    def test_self_discharge_only(self):
        batt = EvBattery(60.0, 80.0, 11.0, dissipation_rate=0.01)
        e, _ = step_ev(batt, 0.0, 0.0, 2.0)
        assert e == pytest.approx(60.0 * math.exp(-0.02), rel=1e-12)

    def test_depletion_clamps_and_flags(self):
        batt = EvBattery(1.0, 80.0, 11.0, dissipation_rate=0.0)
        e, depleted = step_ev(batt, 0.0, 5.0, 1.0)
        assert e == 0.0 and depleted

    def test_charge_clamps_at_capacity(self):
        batt = EvBattery(79.5, 80.0, 11.0, dissipation_rate=0.0)
        e, depleted = step_ev(batt, 11.0, 0.0, 1.0)
        assert e == 80.0 and not depleted

    def test_taper_lands_exactly_on_full(self):
        batt = EvBattery(78.0, 80.0, 11.0, charge_efficiency=0.9,
                         dissipation_rate=1e-4,
                         plugged=np.array([True]))
        p = uncoordinated_ev_charge_policy(batt, 0, 1.0)
        assert 0.0 < p < 11.0
        e, _ = step_ev(batt, p, 0.0, 1.0)
        assert e == pytest.approx(80.0, abs=1e-9)

    def test_policy_zero_when_unplugged(self):
        batt = EvBattery(10.0, 80.0, 11.0, plugged=np.array([False]))
        assert uncoordinated_ev_charge_policy(batt, 0, 1.0) == 0.0

    def test_rejects_inconsistent_energy(self):
        with pytest.raises(ValueError):
            EvBattery(90.0, 80.0, 11.0)


class TestWaterHeater:
    def test_step_matches_first_order_form(self):
        tank = WaterHeaterTank(50.0, 0.35, 60.0, 51.0, cop=3.0,
                               hp_power_cap=0.6, ambient_temp_c=20.0)
        a = tank.decay(1.0)
        got = step_water_heater(tank, 1.5, 0.8, 1.0)
        want = a * 50.0 + (1 - a) * (20.0 + 60.0 * (1.5 - 0.8))
        assert got == pytest.approx(want, rel=1e-12)

    def test_ideal_power_tracks_setpoint(self, rng):
        for _ in range(500):
            tank = WaterHeaterTank(
                water_temp=rng.uniform(35, 55), capacitance=rng.uniform(0.2, 0.6),
                loss_resistance=rng.uniform(30, 90), setpoint_c=51.0)
            draw = rng.uniform(0, 3)
            duty = ideal_tank_power(tank, 51.0, draw, 0.5)
            landed = step_water_heater(tank, duty, draw, 0.5)
            assert landed == pytest.approx(51.0, abs=1e-9)

    def test_electric_split_hp_then_resistance(self):
        # cop 3, hp cap 0.6 kW electric -> 1.8 kW thermal, backup 4.5
        assert tank_electric_power(0.9, 3.0, 0.6, 4.5) == pytest.approx(0.3)
        assert tank_electric_power(2.8, 3.0, 0.6, 4.5) == pytest.approx(
            0.6 + 1.0)
        assert tank_electric_power(99.0, 3.0, 0.6, 4.5) == pytest.approx(
            0.6 + 4.5)

    def test_pure_resistance_tank(self):
        assert tank_electric_power(3.0, 1.0, 0.0, 4.5) == pytest.approx(3.0)

    def test_thermal_cap(self):
        tank = WaterHeaterTank(50.0, 0.3, 60.0, 51.0, cop=3.0,
                               hp_power_cap=0.6, resistance_power_cap=4.5)
        assert tank.thermal_cap() == pytest.approx(3.0 * 0.6 + 4.5)


class TestWeatherSeries:
    def test_rejects_non_uniform(self):
        ts = np.array(["2021-01-01T00:00", "2021-01-01T01:00",
                       "2021-01-01T03:00"], dtype="datetime64[s]")
        with pytest.raises(ValueError, match="row 2"):
            WeatherSeries(ts, np.zeros(3), 1.0)

    def test_rejects_nan_with_row(self):
        ts = np.array(["2021-01-01T00:00", "2021-01-01T01:00"],
                      dtype="datetime64[s]")
        with pytest.raises(ValueError, match="row 1"):
            WeatherSeries(ts, np.array([1.0, np.nan]), 1.0)

    def test_window_preserves_step(self):
        ts = np.datetime64("2021-01-01", "s") + np.arange(48) * np.timedelta64(
            3600, "s")
        w = WeatherSeries(ts, np.arange(48.0), 1.0)
        sub = w.window(10, 20)
        assert len(sub) == 10 and sub.temps_c[0] == 10.0
