"""Fleet coordination: minimize the aggregate peak over a window by LP.

Decision variables are every coordinated device's per-step power (heat pump
thermal output split central/mini/backup, tank compressor and element power,
EV charge power) plus device states and one scalar P bounding the scored
aggregate. Dynamics are equality rows (the same exact exponential updates
the simulator uses, with COP linearized at the exogenous outdoor
temperature), comfort is expressed as bounds on the state variables, and the
objective is P alone.

Comfort bands start from the nominal windows (heating [setpoint-1,
setpoint+2], cooling [setpoint-2, setpoint+1], tank [setpoint-5, setpoint])
and are widened per step just enough to admit the uncoordinated trajectory,
which keeps the LP feasible through design-condition saturation and
guarantees the optimized peak never exceeds the uncoordinated one. Widened
homes are reported. EV charging must meet each departure's driving energy
(capped by what uncoordinated charging achieved) and end the window no
emptier than the uncoordinated battery, so peak relief cannot be bought by
draining cars.
"""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .engine import (AggregateProfile, FleetArrays, SimulationTrace,
                     WeekWindow, simulate_week)
from .fleet import ConfigError, Fleet

log = logging.getLogger(__name__)

BAND_BELOW_HEAT = 1.0
BAND_ABOVE_HEAT = 2.0
BAND_BELOW_COOL = 2.0
BAND_ABOVE_COOL = 1.0
TANK_BAND_BELOW = 5.0
_WIDEN_EPS = 1e-6


@dataclass
class BuildingBlock:
    """One building's dynamics and limits over the window."""

    a: float
    r: float
    t0: float
    theta: np.ndarray
    gains: np.ndarray
    band_lo: np.ndarray
    band_hi: np.ndarray
    mode: str  # "heat" | "cool"
    cap_central: np.ndarray
    cop_central: np.ndarray
    cap_mini: np.ndarray
    cop_mini: np.ndarray
    backup_kw: float
    cap_cool: np.ndarray
    cop_cool: np.ndarray


@dataclass
class TankBlock:
    a: float
    r: float
    t0: float
    ambient: float
    cop: float
    hp_kw: float
    res_kw: float
    draws: np.ndarray
    band_lo: np.ndarray
    band_hi: np.ndarray


@dataclass
class EvBlock:
    a: float
    gain: float  # (1-a)/r, or dt in the small-rate limit
    eta: float
    cap: float
    charger: float
    e0: float
    w2: np.ndarray
    plugged: np.ndarray
    energy_floor: np.ndarray  # per-step lower bound on stored energy


@dataclass
class CoordinationProblem:
    """LP-ready description of one fleet window."""

    dt: float
    steps: int
    scored_from: int
    base_misc: np.ndarray
    base_hvac: np.ndarray
    base_water: np.ndarray
    base_ev: np.ndarray
    buildings: list = field(default_factory=list)
    tanks: list = field(default_factory=list)
    evs: list = field(default_factory=list)

    def base_total(self) -> np.ndarray:
        return self.base_misc + self.base_hvac + self.base_water + self.base_ev


@dataclass
class CoordinationResult:
    peak_kw: float
    status: str
    residual_max: float
    profile: AggregateProfile
    uncoordinated_profile: AggregateProfile
    relaxed_homes: int
    building_elec: np.ndarray  # [K, B] per coordinated building
    tank_elec: np.ndarray
    ev_elec: np.ndarray
    lp_text: Optional[str] = None


class _Builder:
    """Incremental sparse LP: variables with bounds, equality and <= rows."""

    def __init__(self) -> None:
        self.names: list[str] = []
        self.lb: list[float] = []
        self.ub: list[float] = []
        self.eq_rows: list[list[tuple[int, float]]] = []
        self.eq_rhs: list[float] = []
        self.ub_rows: list[list[tuple[int, float]]] = []
        self.ub_rhs: list[float] = []

    def var(self, name: str, lo: float, hi: float) -> int:
        self.names.append(name)
        self.lb.append(lo)
        self.ub.append(hi)
        return len(self.names) - 1

    def block(self, prefix: str, lo: np.ndarray, hi: np.ndarray) -> int:
        start = len(self.names)
        self.names.extend(f"{prefix}_{k}" for k in range(lo.size))
        self.lb.extend(lo.tolist())
        self.ub.extend(hi.tolist())
        return start

    def eq(self, coeffs: list[tuple[int, float]], rhs: float) -> None:
        self.eq_rows.append(coeffs)
        self.eq_rhs.append(rhs)

    def le(self, coeffs: list[tuple[int, float]], rhs: float) -> None:
        self.ub_rows.append(coeffs)
        self.ub_rhs.append(rhs)

    def matrices(self):
        n = len(self.names)

        def build(rows):
            data, ri, ci = [], [], []
            for i, row in enumerate(rows):
                for j, v in row:
                    ri.append(i)
                    ci.append(j)
                    data.append(v)
            return sp.csr_matrix((data, (ri, ci)), shape=(len(rows), n))

        return (build(self.eq_rows), np.array(self.eq_rhs),
                build(self.ub_rows), np.array(self.ub_rhs),
                np.array(self.lb), np.array(self.ub))


def _nominal_bands(mode: str, hsp: np.ndarray, csp: float, steps: int):
    if mode == "heat":
        return hsp - BAND_BELOW_HEAT, hsp + BAND_ABOVE_HEAT
    return (np.full(steps, csp - BAND_BELOW_COOL),
            np.full(steps, csp + BAND_ABOVE_COOL))


def fleet_to_problem(
    fleet: Fleet, window: WeekWindow,
) -> tuple[CoordinationProblem, AggregateProfile, int]:
    """Build the LP description from a fleet, window and its uncoordinated run.

    Devices of electrified homes are coordinated; everything else (misc load
    and BAU-home equipment) enters as a fixed base profile. Returns the
    problem, the uncoordinated profile, and the count of homes whose band
    had to be widened beyond its nominal window.
    """
    profile, arr, trace = simulate_week(fleet, window, keep_trace=True)
    K = arr.steps
    mode = "heat" if window.label == "heat" else "cool"
    elec = np.array([h.electrified for h in fleet.households], dtype=bool)

    base_misc = arr.misc.sum(axis=1)
    base_hvac = trace.hvac_elec[:, ~elec].sum(axis=1)
    tank_is_base = ~elec[arr.tank_home]
    base_water = trace.tank_elec[:, tank_is_base].sum(axis=1) \
        if arr.tank_home.size else np.zeros(K)
    ev_is_base = ~elec[arr.ev_home] if arr.ev_home.size else np.zeros(0, bool)
    base_ev = trace.ev_elec[:, ev_is_base].sum(axis=1) \
        if arr.ev_home.size else np.zeros(K)

    problem = CoordinationProblem(
        dt=arr.dt, steps=K, scored_from=window.warmup_steps,
        base_misc=base_misc, base_hvac=base_hvac,
        base_water=base_water, base_ev=base_ev,
    )

    relaxed = 0
    for i in np.flatnonzero(elec):
        unc_t = trace.indoor_temp[:, i]
        lo, hi = _nominal_bands(mode, arr.hsp[:, i], float(arr.csp[i]), K)
        if np.any(unc_t < lo - 1e-9) or np.any(unc_t > hi + 1e-9):
            relaxed += 1
        problem.buildings.append(BuildingBlock(
            a=float(arr.a1[i]), r=float(arr.r1[i]),
            t0=float(arr.hsp[0, i]),
            theta=arr.theta, gains=arr.w1[:, i].copy(),
            band_lo=np.minimum(lo, unc_t - _WIDEN_EPS),
            band_hi=np.maximum(hi, unc_t + _WIDEN_EPS),
            mode=mode,
            cap_central=arr.cap_central[:, i].copy(),
            cop_central=arr.cop_central[:, i].copy(),
            cap_mini=arr.cap_mini[:, i].copy(),
            cop_mini=arr.cop_mini[:, i].copy(),
            backup_kw=float(arr.backup_kw[i]),
            cap_cool=arr.cap_cool[:, i].copy(),
            cop_cool=arr.cop_cool[:, i].copy(),
        ))

    for j, home in enumerate(arr.tank_home):
        if not elec[home]:
            continue
        unc_t = trace.tank_temp[:, j]
        sp_c = float(arr.tank_sp[j])
        lo = np.minimum(np.full(K, sp_c - TANK_BAND_BELOW), unc_t - _WIDEN_EPS)
        hi = np.maximum(np.full(K, sp_c), unc_t + _WIDEN_EPS)
        problem.tanks.append(TankBlock(
            a=float(arr.a3[j]), r=float(arr.r3[j]), t0=sp_c,
            ambient=float(arr.tank_ambient[j]), cop=float(arr.tank_cop[j]),
            hp_kw=float(arr.tank_hp_kw[j]), res_kw=float(arr.tank_res_kw[j]),
            draws=arr.w3[:, j].copy(), band_lo=lo, band_hi=hi,
        ))

    dt = arr.dt
    for v, home in enumerate(arr.ev_home):
        if not elec[home]:
            continue
        rate = float(arr.ev_rate[v])
        if rate < 1e-6:
            a, gain = 1.0, dt
        else:
            a = float(np.exp(-rate * dt))
            gain = (1.0 - a) / rate
        unc_e = trace.ev_energy[:, v]
        plugged = arr.plugged[:, v]
        w2 = arr.w2[:, v]
        floor = np.zeros(K)
        # departure steps: last plugged step before an away stretch
        dep = np.flatnonzero(plugged[:-1] & ~plugged[1:])
        for d in dep:
            nxt = np.flatnonzero(plugged[d + 1:])
            end = d + 1 + (int(nxt[0]) if nxt.size else K - 1 - d)
            need = float(w2[d + 1:end + 1].sum()) * gain
            floor[d] = min(need, max(unc_e[d] - _WIDEN_EPS, 0.0))
        floor[K - 1] = max(floor[K - 1], unc_e[K - 1] - _WIDEN_EPS)
        problem.evs.append(EvBlock(
            a=a, gain=gain, eta=float(arr.ev_eta[v]),
            cap=float(arr.ev_cap[v]), charger=float(arr.ev_charger[v]),
            e0=float(arr.ev_cap[v]), w2=w2.copy(), plugged=plugged.copy(),
            energy_floor=floor,
        ))

    return problem, profile, relaxed


def _assemble(problem: CoordinationProblem, with_slack: bool) -> tuple[_Builder, dict]:
    b = _Builder()
    K = problem.steps
    p_idx = b.var("P", 0.0, np.inf)
    # peak rows collect (var, 1/cop) pairs per scored step
    peak: list[list[tuple[int, float]]] = [[] for _ in range(K)]
    info: dict = {"p": p_idx, "buildings": [], "tanks": [], "evs": [],
                  "slack": []}

    big = 1e4

    def state_block(prefix, lo, hi):
        if not with_slack:
            return b.block(prefix, lo, hi), None, None
        t = b.block(prefix, np.full(K, -np.inf), np.full(K, np.inf))
        s_lo = b.var(f"{prefix}_slo", 0.0, np.inf)
        s_hi = b.var(f"{prefix}_shi", 0.0, np.inf)
        info["slack"].extend([s_lo, s_hi])
        for k in range(K):
            b.le([(t + k, -1.0), (s_lo, -1.0)], -float(lo[k]))
            b.le([(t + k, 1.0), (s_hi, -1.0)], float(hi[k]))
        return t, s_lo, s_hi

    for n, blk in enumerate(problem.buildings):
        g = (1.0 - blk.a) * blk.r
        if blk.mode == "heat":
            qc = b.block(f"b{n}_qc", np.zeros(K), blk.cap_central)
            qm = b.block(f"b{n}_qm", np.zeros(K), blk.cap_mini)
            qr = b.block(f"b{n}_qr", np.zeros(K), np.full(K, blk.backup_kw))
            t, *_ = state_block(f"b{n}_T", blk.band_lo, blk.band_hi)
            for k in range(K):
                row = [(t + k, 1.0), (qc + k, -g), (qm + k, -g), (qr + k, -g)]
                rhs = (1.0 - blk.a) * (blk.theta[k] + blk.r * blk.gains[k])
                if k == 0:
                    rhs += blk.a * blk.t0
                else:
                    row.append((t + k - 1, -blk.a))
                b.eq(row, rhs)
                peak[k].extend([(qc + k, 1.0 / blk.cop_central[k]),
                                (qm + k, 1.0 / blk.cop_mini[k]),
                                (qr + k, 1.0)])
            info["buildings"].append({"qc": qc, "qm": qm, "qr": qr, "t": t})
        else:
            qx = b.block(f"b{n}_qx", np.zeros(K), blk.cap_cool)
            t, *_ = state_block(f"b{n}_T", blk.band_lo, blk.band_hi)
            for k in range(K):
                row = [(t + k, 1.0), (qx + k, g)]
                rhs = (1.0 - blk.a) * (blk.theta[k] + blk.r * blk.gains[k])
                if k == 0:
                    rhs += blk.a * blk.t0
                else:
                    row.append((t + k - 1, -blk.a))
                b.eq(row, rhs)
                peak[k].append((qx + k, 1.0 / blk.cop_cool[k]))
            info["buildings"].append({"qx": qx, "t": t})

    for n, tb in enumerate(problem.tanks):
        g = (1.0 - tb.a) * tb.r
        ph = b.block(f"w{n}_ph", np.zeros(K), np.full(K, tb.hp_kw))
        pr = b.block(f"w{n}_pr", np.zeros(K), np.full(K, tb.res_kw))
        t, *_ = state_block(f"w{n}_T", tb.band_lo, tb.band_hi)
        for k in range(K):
            row = [(t + k, 1.0), (ph + k, -g * tb.cop), (pr + k, -g)]
            rhs = (1.0 - tb.a) * (tb.ambient + tb.r * (-tb.draws[k]))
            if k == 0:
                rhs += tb.a * tb.t0
            else:
                row.append((t + k - 1, -tb.a))
            b.eq(row, rhs)
            peak[k].extend([(ph + k, 1.0), (pr + k, 1.0)])
        info["tanks"].append({"ph": ph, "pr": pr, "t": t})

    for n, ev in enumerate(problem.evs):
        p2 = b.block(f"v{n}_p", np.zeros(K),
                     np.where(ev.plugged, ev.charger, 0.0))
        e = b.block(f"v{n}_E", ev.energy_floor, np.full(K, ev.cap))
        for k in range(K):
            row = [(e + k, 1.0), (p2 + k, -ev.gain * ev.eta)]
            rhs = -ev.gain * ev.w2[k]
            if k == 0:
                rhs += ev.a * ev.e0
            else:
                row.append((e + k - 1, -ev.a))
            b.eq(row, rhs)
            peak[k].append((p2 + k, 1.0))
        info["evs"].append({"p": p2, "e": e})

    base = problem.base_total()
    for k in range(problem.scored_from, K):
        b.le(peak[k] + [(p_idx, -1.0)], -float(base[k]))

    return b, info


def _lp_text(b: _Builder, c: np.ndarray) -> str:
    """CPLEX LP interchange text of the assembled problem."""
    lines = ["Minimize", " obj: " + " + ".join(
        f"{c[j]:.12g} {b.names[j]}" for j in np.flatnonzero(c))]
    lines.append("Subject To")
    for i, (row, rhs) in enumerate(zip(b.eq_rows, b.eq_rhs)):
        terms = " ".join(f"{'+' if v >= 0 else '-'} {abs(v):.12g} {b.names[j]}"
                         for j, v in row)
        lines.append(f" e{i}: {terms} = {rhs:.12g}")
    for i, (row, rhs) in enumerate(zip(b.ub_rows, b.ub_rhs)):
        terms = " ".join(f"{'+' if v >= 0 else '-'} {abs(v):.12g} {b.names[j]}"
                         for j, v in row)
        lines.append(f" u{i}: {terms} <= {rhs:.12g}")
    lines.append("Bounds")
    for j, name in enumerate(b.names):
        lo, hi = b.lb[j], b.ub[j]
        hi_s = "+inf" if np.isinf(hi) else f"{hi:.12g}"
        lo_s = "-inf" if np.isinf(lo) else f"{lo:.12g}"
        lines.append(f" {lo_s} <= {name} <= {hi_s}")
    lines.append("End")
    return "\n".join(lines)


def solve_min_peak(
    problem: CoordinationProblem,
    want_lp_text: bool = False,
) -> tuple[float, dict, float, str, Optional[str]]:
    """Solve the min-peak LP; returns (P, schedules, residual, status, lp text).

    schedules holds per-device electric series [K] under keys "building",
    "tank", "ev" (2-d arrays, device-major columns). Falls back to a
    slack-penalized solve if the bounded problem reports infeasible, which
    the band widening normally rules out.
    """
    for with_slack in (False, True):
        b, info = _assemble(problem, with_slack)
        eq_a, eq_b, ub_a, ub_b, lb, ub = b.matrices()
        c = np.zeros(len(b.names))
        c[info["p"]] = 1.0
        for s in info["slack"]:
            c[s] = 1e4
        res = linprog(
            c, A_ub=ub_a, b_ub=ub_b, A_eq=eq_a, b_eq=eq_b,
            bounds=np.column_stack([lb, ub]), method="highs",
            options={"primal_feasibility_tolerance": 1e-9,
                     "dual_feasibility_tolerance": 1e-9},
        )
        if res.status == 0:
            break
        if not with_slack:
            log.warning("bounded coordination LP infeasible (%s); retrying "
                        "with slack penalties", res.message.strip())
    if res.status != 0:
        raise RuntimeError(f"coordination LP failed: {res.message}")

    x = res.x
    K = problem.steps
    residual = float(np.max(np.abs(eq_a @ x - eq_b))) if eq_b.size else 0.0
    if ub_b.size:
        residual = max(residual, float(np.max(ub_a @ x - ub_b)))
    residual = max(residual, float(np.max(np.maximum(lb - x, 0.0))),
                   float(np.max(np.maximum(x - ub, 0.0))))

    b_elec = np.zeros((K, len(problem.buildings)))
    for n, (blk, idx) in enumerate(zip(problem.buildings, info["buildings"])):
        ks = np.arange(K)
        if blk.mode == "heat":
            b_elec[:, n] = (x[idx["qc"] + ks] / blk.cop_central
                            + x[idx["qm"] + ks] / blk.cop_mini
                            + x[idx["qr"] + ks])
        else:
            b_elec[:, n] = x[idx["qx"] + ks] / blk.cop_cool
    t_elec = np.zeros((K, len(problem.tanks)))
    for n, idx in enumerate(info["tanks"]):
        ks = np.arange(K)
        t_elec[:, n] = x[idx["ph"] + ks] + x[idx["pr"] + ks]
    e_elec = np.zeros((K, len(problem.evs)))
    for n, idx in enumerate(info["evs"]):
        e_elec[:, n] = x[idx["p"] + np.arange(K)]

    schedules = {"building": b_elec, "tank": t_elec, "ev": e_elec}
    text = _lp_text(b, c) if want_lp_text else None
    return float(x[info["p"]]), schedules, residual, "optimal", text


def coordinate_fleet(
    fleet: Fleet,
    window: WeekWindow,
    want_lp_text: bool = False,
) -> CoordinationResult:
    """Optimize one fleet window; returns profiles and solve diagnostics."""
    problem, unc_profile, relaxed = fleet_to_problem(fleet, window)
    if relaxed:
        log.info("%s/%s: comfort band widened for %d homes (uncoordinated "
                 "trajectory leaves the nominal band)",
                 fleet.county.county_id, window.label, relaxed)
    peak, schedules, residual, status, text = solve_min_peak(
        problem, want_lp_text)

    s = fleet.scale_factor
    misc = problem.base_misc * s
    hvac = (problem.base_hvac + schedules["building"].sum(axis=1)) * s
    water = (problem.base_water + schedules["tank"].sum(axis=1)) * s
    evs = (problem.base_ev + schedules["ev"].sum(axis=1)) * s
    profile = AggregateProfile(
        timestamps=unc_profile.timestamps,
        step_hours=unc_profile.step_hours,
        misc_kw=misc, water_kw=water, ev_kw=evs, hvac_kw=hvac,
        total_kw=misc + water + evs + hvac,
        warmup_steps=unc_profile.warmup_steps,
        label=unc_profile.label,
        diagnostics={"relaxed_homes": relaxed, "lp_residual": residual},
    )
    return CoordinationResult(
        peak_kw=peak * s,
        status=status,
        residual_max=residual,
        profile=profile,
        uncoordinated_profile=unc_profile,
        relaxed_homes=relaxed,
        building_elec=schedules["building"],
        tank_elec=schedules["tank"],
        ev_elec=schedules["ev"],
        lp_text=text,
    )
