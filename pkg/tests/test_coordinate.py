"""Coordination LP against a brute-force oracle and on fleet fixtures."""

import math

import numpy as np
import pytest

import oracle_tools
from gridimpact.coordinate import (
    BuildingBlock,
    CoordinationProblem,
    EvBlock,
    TankBlock,
    coordinate_fleet,
    fleet_to_problem,
    solve_min_peak,
)
from gridimpact.engine import select_peak_weeks
from gridimpact.fleet import synthesize_fleet

K8 = 8


def small_building(band_halfwidth=0.4):
    """Heating building: tracking a 20 C target needs most of its 6 kW."""
    theta = np.array([0.0, -2.0, -5.0, -5.0, -3.0, 0.0, 2.0, 3.0])
    a = math.exp(-1.0 / 40.0)  # r=5 C/kW, c=8 kWh/C, dt=1 h
    return BuildingBlock(
        a=a, r=5.0, t0=20.0, theta=theta,
        gains=np.full(K8, 0.3),
        band_lo=np.full(K8, 20.0 - band_halfwidth),
        band_hi=np.full(K8, 20.0 + band_halfwidth),
        mode="heat",
        cap_central=np.full(K8, 6.0),
        cop_central=np.full(K8, 2.5),
        cap_mini=np.zeros(K8),
        cop_mini=np.ones(K8),
        backup_kw=0.0,
        cap_cool=np.zeros(K8),
        cop_cool=np.ones(K8),
    )


def small_tank():
    """Tank with two big draws; compressor only, no element."""
    a = math.exp(-1.0 / 18.0)  # r=60 C/kW, c=0.3 kWh/C
    return TankBlock(
        a=a, r=60.0, t0=51.0, ambient=20.0, cop=2.5,
        hp_kw=1.0, res_kw=0.0,
        draws=np.array([0.2, 0.2, 1.2, 0.2, 0.2, 1.2, 0.2, 0.2]),
        band_lo=np.full(K8, 46.0),
        band_hi=np.full(K8, 51.0),
    )


def small_ev():
    """EV away for steps 2-3, needs the trip covered and a full-ish return."""
    rate = 1e-4
    a = math.exp(-rate)
    gain = (1.0 - a) / rate
    plugged = np.array([1, 1, 0, 0, 1, 1, 1, 1], dtype=bool)
    w2 = np.array([0.0, 0.0, 3.0, 3.0, 0.0, 0.0, 0.0, 0.0])
    floor = np.zeros(K8)
    floor[1] = 6.0   # departure-step energy to cover the trip
    floor[7] = 9.0   # end the window nearly full
    return EvBlock(a=a, gain=gain, eta=0.9, cap=10.0, charger=2.0,
                   e0=6.0, w2=w2, plugged=plugged, energy_floor=floor)


def three_device_problem():
    base = np.array([3.0, 2.0, 1.0, 1.0, 2.0, 4.0, 3.0, 2.0])
    return CoordinationProblem(
        dt=1.0, steps=K8, scored_from=0,
        base_misc=base, base_hvac=np.zeros(K8),
        base_water=np.zeros(K8), base_ev=np.zeros(K8),
        buildings=[small_building()],
        tanks=[small_tank()],
        evs=[small_ev()],
    )


class TestBruteForceOracle:
    def test_lp_matches_enumeration_within_resolution(self):
        problem = three_device_problem()
        peak_lp, schedules, residual, status, _ = solve_min_peak(problem)
        assert status == "optimal"
        assert residual < 1e-6

        bld = oracle_tools.building_sequences(problem.buildings[0], levels=5)
        tnk = oracle_tools.tank_sequences(problem.tanks[0], levels=5)
        ev = oracle_tools.ev_sequences(problem.evs[0], levels=5)
        for seqs in (bld, tnk, ev):
            assert 0 < seqs.shape[0] < 60000
        bld = oracle_tools.pareto_min(bld)
        tnk = oracle_tools.pareto_min(tnk)
        ev = oracle_tools.pareto_min(ev)

        peak_disc = oracle_tools.min_peak([bld, tnk, ev], problem.base_total())

        # every ladder schedule is LP-feasible, so the LP can only do better
        assert peak_lp <= peak_disc + 1e-6
        # and the ladder can be off by at most one level spacing per device
        spacing = 6.0 / 4 / 2.5 + 1.0 / 4 + 2.0 / 4
        assert peak_disc - peak_lp <= spacing + 1e-9

    def test_lp_schedule_respects_all_device_limits(self):
        problem = three_device_problem()
        peak_lp, schedules, _, _, _ = solve_min_peak(problem)

        blk = problem.buildings[0]
        q = schedules["building"][:, 0] * blk.cop_central  # thermal again
        assert np.all(q >= -1e-9)
        assert np.all(q <= blk.cap_central + 1e-9)
        t = blk.t0
        for k in range(K8):
            t = blk.a * t + (1 - blk.a) * (
                blk.theta[k] + blk.r * (q[k] + blk.gains[k]))
            assert blk.band_lo[k] - 1e-7 <= t <= blk.band_hi[k] + 1e-7

        ev = problem.evs[0]
        p = schedules["ev"][:, 0]
        assert np.all(p[~ev.plugged] <= 1e-9)
        e = ev.e0
        for k in range(K8):
            e = ev.a * e + ev.gain * (ev.eta * p[k] - ev.w2[k])
            assert e >= ev.energy_floor[k] - 1e-7
            assert e <= ev.cap + 1e-7

        total = (problem.base_total() + schedules["building"].sum(axis=1)
                 + schedules["tank"].sum(axis=1) + schedules["ev"].sum(axis=1))
        assert total.max() == pytest.approx(peak_lp, abs=1e-7)

    def test_tighter_bands_cannot_lower_the_peak(self):
        loose = three_device_problem()
        tight = three_device_problem()
        tight.buildings[0].band_lo += 0.25
        tight.buildings[0].band_hi -= 0.25
        peak_loose, *_ = solve_min_peak(loose)
        peak_tight, *_ = solve_min_peak(tight)
        assert peak_tight >= peak_loose - 1e-9


class TestEvOnly:
    def test_flat_schedule_is_optimal(self):
        """Always-plugged EV with one terminal floor: charging spreads flat."""
        rate = 1e-4
        a = math.exp(-rate)
        gain = (1.0 - a) / rate
        floor = np.zeros(K8)
        floor[-1] = 8.0
        ev = EvBlock(a=a, gain=gain, eta=0.9, cap=10.0, charger=2.0, e0=2.0,
                     w2=np.zeros(K8), plugged=np.ones(K8, dtype=bool),
                     energy_floor=floor)
        problem = CoordinationProblem(
            dt=1.0, steps=K8, scored_from=0,
            base_misc=np.zeros(K8), base_hvac=np.zeros(K8),
            base_water=np.zeros(K8), base_ev=np.zeros(K8), evs=[ev])
        peak, schedules, residual, _, _ = solve_min_peak(problem)
        assert residual < 1e-8

        # terminal energy: E_7 = a^8 e0 + gain*eta*sum_j a^j p_{7-j};
        # the min-max schedule is constant, pinned by the weighted sum
        weights = a ** np.arange(K8)
        want = (8.0 - a ** K8 * 2.0) / (gain * 0.9 * weights.sum())
        assert peak == pytest.approx(want, rel=1e-7)
        np.testing.assert_allclose(schedules["ev"][:, 0], want, atol=1e-6)

    def test_unplugged_steps_draw_nothing(self):
        rate = 1e-4
        a = math.exp(-rate)
        gain = (1.0 - a) / rate
        plugged = np.array([1, 0, 1, 0, 1, 1, 1, 1], dtype=bool)
        floor = np.zeros(K8)
        floor[-1] = 6.0
        ev = EvBlock(a=a, gain=gain, eta=0.9, cap=10.0, charger=2.0, e0=2.0,
                     w2=np.zeros(K8), plugged=plugged, energy_floor=floor)
        problem = CoordinationProblem(
            dt=1.0, steps=K8, scored_from=0,
            base_misc=np.zeros(K8), base_hvac=np.zeros(K8),
            base_water=np.zeros(K8), base_ev=np.zeros(K8), evs=[ev])
        _, schedules, _, _, _ = solve_min_peak(problem)
        assert np.all(schedules["ev"][~plugged, 0] <= 1e-9)


class TestZeroWidthBand:
    def test_pinned_trajectory_reproduces_uncoordinated_dispatch(self):
        """Collapsing the comfort band onto the tracking trajectory leaves
        the LP exactly one schedule: the thermostat's own."""
        blk = small_building(band_halfwidth=2.0)
        # uncoordinated dispatch: track 20 C, saturating at the carrier cap
        q_unc = np.zeros(K8)
        t_unc = np.zeros(K8)
        t = blk.t0
        for k in range(K8):
            need = ((20.0 - blk.a * t) / (1 - blk.a) - blk.theta[k]) / blk.r \
                - blk.gains[k]
            q_unc[k] = min(max(need, 0.0), blk.cap_central[k])
            t = blk.a * t + (1 - blk.a) * (
                blk.theta[k] + blk.r * (q_unc[k] + blk.gains[k]))
            t_unc[k] = t

        blk.band_lo = t_unc.copy()
        blk.band_hi = t_unc.copy()
        problem = CoordinationProblem(
            dt=1.0, steps=K8, scored_from=0,
            base_misc=np.zeros(K8), base_hvac=np.zeros(K8),
            base_water=np.zeros(K8), base_ev=np.zeros(K8), buildings=[blk])
        peak, schedules, residual, _, _ = solve_min_peak(problem)
        assert residual < 1e-7
        np.testing.assert_allclose(schedules["building"][:, 0],
                                   q_unc / blk.cop_central, atol=1e-6)
        assert peak == pytest.approx(np.max(q_unc / blk.cop_central), abs=1e-6)


@pytest.fixture(scope="module")
def result(cold_county, cold_weather):
    fleet = synthesize_fleet(cold_county, "all-electric", seed=3,
                             sample_size=20)
    heat_week, _ = select_peak_weeks(cold_weather)
    return coordinate_fleet(fleet, heat_week, want_lp_text=True)


class TestFleetCoordination:
    def test_never_worse_than_uncoordinated(self, result):
        opt = result.profile.scored_total().max()
        unc = result.uncoordinated_profile.scored_total().max()
        assert opt <= unc + 1e-6
        assert opt < 0.95 * unc  # the fixture has real room to shave

    def test_solution_quality(self, result):
        assert result.status == "optimal"
        assert result.residual_max < 1e-6
        assert result.relaxed_homes >= 0

    def test_peak_matches_profile(self, result):
        assert result.profile.scored_total().max() == pytest.approx(
            result.peak_kw, rel=1e-9, abs=1e-6)

    def test_profile_categories_sum(self, result):
        p = result.profile
        np.testing.assert_allclose(
            p.total_kw, p.misc_kw + p.water_kw + p.ev_kw + p.hvac_kw,
            rtol=0, atol=1e-6)

    def test_misc_load_is_untouched(self, result):
        np.testing.assert_allclose(result.profile.misc_kw,
                                   result.uncoordinated_profile.misc_kw,
                                   rtol=0, atol=1e-9)

    def test_lp_text_dump(self, result):
        text = result.lp_text
        assert text is not None
        assert text.splitlines()[0] == "Minimize"
        assert "obj: 1 P" in text
        assert "Subject To" in text
        assert "Bounds" in text
        assert text.rstrip().endswith("End")

    def test_ev_energy_is_shifted_not_dropped(self, result):
        """Departure and terminal floors stop the LP from buying peak relief
        by leaving batteries empty."""
        dt = result.profile.step_hours
        opt_kwh = result.profile.ev_kw.sum() * dt
        unc_kwh = result.uncoordinated_profile.ev_kw.sum() * dt
        assert opt_kwh >= 0.9 * unc_kwh


class TestProblemFromFleet:
    def test_bau_homes_stay_in_base(self, cold_county, cold_weather):
        fleet = synthesize_fleet(cold_county, "bau", seed=3, sample_size=15)
        heat_week, _ = select_peak_weeks(cold_weather)
        problem, profile, relaxed = fleet_to_problem(fleet, heat_week)
        assert not problem.buildings and not problem.tanks and not problem.evs
        np.testing.assert_allclose(
            problem.base_total() * fleet.scale_factor, profile.total_kw,
            rtol=1e-9, atol=1e-6)

    def test_electrified_homes_become_blocks(self, cold_county, cold_weather):
        fleet = synthesize_fleet(cold_county, "all-electric", seed=3,
                                 sample_size=15)
        heat_week, _ = select_peak_weeks(cold_weather)
        problem, _, _ = fleet_to_problem(fleet, heat_week)
        assert len(problem.buildings) == 15
        assert len(problem.tanks) == sum(
            h.water_heater is not None for h in fleet.households)
        assert len(problem.evs) == sum(
            len(h.vehicles) for h in fleet.households)
        assert all(b.mode == "heat" for b in problem.buildings)

    def test_bands_admit_uncoordinated_trajectory(self, cold_county,
                                                  cold_weather):
        """Widened bands are the feasibility guarantee; verify directly."""
        from gridimpact.engine import simulate_week

        fleet = synthesize_fleet(cold_county, "all-electric", seed=3,
                                 sample_size=15)
        heat_week, _ = select_peak_weeks(cold_weather)
        problem, _, _ = fleet_to_problem(fleet, heat_week)

        fleet2 = synthesize_fleet(cold_county, "all-electric", seed=3,
                                  sample_size=15)
        _, arr, trace = simulate_week(fleet2, heat_week, keep_trace=True)
        for i, blk in enumerate(problem.buildings):
            t = trace.indoor_temp[:, i]
            assert np.all(t >= blk.band_lo - 1e-12)
            assert np.all(t <= blk.band_hi + 1e-12)
