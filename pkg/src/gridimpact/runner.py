"""Run orchestration: county jobs in, CSV reports and a manifest out.

Counties are independent, so they run in a process pool when more than one
worker is requested. Each output file has a single writer and rows are
sorted by county id, which together with fixed float formatting makes
repeat runs byte-identical.
"""

from __future__ import annotations

import logging
import os
import traceback
from concurrent.futures import ProcessPoolExecutor
from concurrent.futures.process import BrokenProcessPool
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import dataio
from .config import RunConfig
from .costs import CostEstimate, PriceModel, aggregate_cost, cost_distribution
from .dsm import CountyEvaluation, county_requirement
from .engine import GridCapacityEstimate
from .fleet import ConfigError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass
class CountyOutcome:
    county_id: str
    ok: bool
    evaluation: Optional[CountyEvaluation] = None
    sweep: list = field(default_factory=list)  # (rate, CountyEvaluation)
    error: str = ""


@dataclass
class RunReport:
    config: RunConfig
    outcomes: list
    aggregate: Optional[CostEstimate]
    out_dir: str
    files: dict


def _county_job(args: tuple) -> CountyOutcome:
    """One county, executed possibly in a worker process."""
    path, cfg = args
    county_id = os.path.splitext(os.path.basename(path))[0]
    try:
        county = dataio.load_county(path)
        county_id = county.county_id
        weather = dataio.load_weather(county.weather_file, cfg.dt_hours)
        common = dict(
            scenario=cfg.scenario,
            dsm=cfg.dsm,
            night_setback=cfg.night_setback,
            sizing_rule=cfg.sizing_rule,
            hp_profile_setting=cfg.hp_profile,
            sample_size=cfg.sample_size,
            headroom_bau=cfg.headroom_bau,
            headroom_future=cfg.headroom_future,
            price_model=cfg.price,
        )
        if cfg.adoption_sweep is not None:
            sweep = []
            for rate in cfg.adoption_sweep:
                ev = county_requirement(county, weather, cfg.seed,
                                        adoption=rate, **common)
                sweep.append((rate, ev))
            return CountyOutcome(county_id, True, sweep[-1][1], sweep)
        ev = county_requirement(county, weather, cfg.seed,
                                adoption=cfg.adoption, **common)
        return CountyOutcome(county_id, True, ev)
    except Exception as exc:  # noqa: BLE001 - isolate county failures
        log.error("county %s failed: %s", county_id, exc)
        return CountyOutcome(county_id, False,
                             error=f"{exc}\n{traceback.format_exc()}")


def _execute(cfg: RunConfig) -> list:
    jobs = cfg.jobs or os.cpu_count() or 1
    work = [(path, cfg) for path in cfg.counties]
    if jobs == 1 or len(work) == 1:
        outcomes = [_county_job(w) for w in work]
    else:
        outcomes = []
        with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
            futures = [(pool.submit(_county_job, w), w[0]) for w in work]
            for fut, path in futures:
                try:
                    outcomes.append(fut.result())
                except BrokenProcessPool:
                    # the worker was killed (usually the OOM killer on a big
                    # coordination LP); report it like any county failure
                    county_id = os.path.splitext(os.path.basename(path))[0]
                    outcomes.append(CountyOutcome(
                        county_id, False,
                        error="county worker process died unexpectedly "
                              "(likely out of memory); retry with --jobs 1 "
                              "or a smaller sample_size"))
    return sorted(outcomes, key=lambda o: o.county_id)


def _f(x: float) -> str:
    return f"{x:.6f}"


def _cap_fields(prefix: str, est: Optional[GridCapacityEstimate]) -> dict:
    if est is None:
        return {f"{prefix}_peak99_kw": "", f"{prefix}_headroom": "",
                f"{prefix}_capacity_kw": ""}
    return {
        f"{prefix}_peak99_kw": _f(est.peak99_kw),
        f"{prefix}_headroom": _f(est.headroom),
        f"{prefix}_capacity_kw": _f(est.capacity_kw),
    }


REINFORCEMENT_FIELDS = (
    "county_id", "scenario", "households", "dsm", "night_setback",
    "bau_peak99_kw", "bau_headroom", "bau_capacity_kw",
    "future_peak99_kw", "future_headroom", "future_capacity_kw",
    "gap_kw", "gap_per_household_kw", "relaxed_homes", "status",
)

COST_FIELDS = ("county_id", "gap_kw", "cost_mean", "cost_std",
               "cost_lo95", "cost_hi95", "cost_per_household")

SWEEP_FIELDS = ("county_id", "adoption", "gap_kw", "cost_mean",
                "cost_lo95", "cost_hi95")


def _reinforcement_rows(cfg: RunConfig, outcomes: Sequence[CountyOutcome],
                        households: dict):
    for out in outcomes:
        if not out.ok:
            yield {"county_id": out.county_id, "scenario": cfg.scenario,
                   "households": "", "dsm": "+".join(cfg.dsm),
                   "night_setback": int(cfg.night_setback),
                   "bau_peak99_kw": "", "bau_headroom": "",
                   "bau_capacity_kw": "", "future_peak99_kw": "",
                   "future_headroom": "", "future_capacity_kw": "",
                   "gap_kw": "", "gap_per_household_kw": "",
                   "relaxed_homes": "", "status": "error"}
            continue
        ev = out.evaluation
        req = ev.requirement
        row = {"county_id": ev.county_id, "scenario": ev.scenario,
               "households": households.get(ev.county_id, ""),
               "dsm": "+".join(ev.dsm),
               "night_setback": int(cfg.night_setback),
               "gap_kw": _f(req.gap_kw) if req else "",
               "gap_per_household_kw":
                   _f(req.gap_per_household_kw) if req else "",
               "relaxed_homes": ev.relaxed_homes, "status": "ok"}
        row.update(_cap_fields("bau", ev.bau_estimate))
        row.update(_cap_fields("future", ev.future_estimate))
        yield row


def _cost_rows(outcomes, households, pm: PriceModel):
    ests = []
    rows = []
    total_households = 0
    for out in outcomes:
        if not out.ok or out.evaluation.cost is None:
            continue
        c = out.evaluation.cost
        ests.append(c)
        n = households.get(out.county_id, 0)
        total_households += n
        rows.append({
            "county_id": out.county_id, "gap_kw": _f(c.gap_kw),
            "cost_mean": _f(c.mean), "cost_std": _f(c.std),
            "cost_lo95": _f(c.lo95), "cost_hi95": _f(c.hi95),
            "cost_per_household": _f(c.mean / n) if n else "",
        })
    if ests:
        agg = aggregate_cost(ests, pm)
        rows.append({
            "county_id": "AGGREGATE", "gap_kw": _f(agg.gap_kw),
            "cost_mean": _f(agg.mean), "cost_std": _f(agg.std),
            "cost_lo95": _f(agg.lo95), "cost_hi95": _f(agg.hi95),
            "cost_per_household":
                _f(agg.mean / total_households) if total_households else "",
        })
        return rows, agg
    return rows, None


def run(cfg: RunConfig) -> RunReport:
    """Execute every county and write the report bundle under out_dir."""
    os.makedirs(cfg.out_dir, exist_ok=True)
    profiles_dir = os.path.join(cfg.out_dir, "profiles")
    os.makedirs(profiles_dir, exist_ok=True)

    outcomes = _execute(cfg)
    households = {}
    for path in cfg.counties:
        try:
            county = dataio.load_county(path)
            households[county.county_id] = county.true_household_count
        except Exception:  # noqa: BLE001 - metadata only; job reported it
            pass

    files = {}

    def record(path: str) -> None:
        rel = os.path.relpath(path, cfg.out_dir)
        files[rel] = dataio.file_sha256(path)

    reinf_path = os.path.join(cfg.out_dir, "reinforcement.csv")
    dataio.write_csv(reinf_path, REINFORCEMENT_FIELDS,
                     _reinforcement_rows(cfg, outcomes, households))
    record(reinf_path)

    cost_rows, aggregate = _cost_rows(outcomes, households, cfg.price)
    costs_path = os.path.join(cfg.out_dir, "costs.csv")
    dataio.write_csv(costs_path, COST_FIELDS, cost_rows)
    record(costs_path)

    for out in outcomes:
        if not out.ok:
            continue
        ev = out.evaluation
        for kind, profs in (("bau", ev.bau_profiles),
                            ("future", ev.future_profiles)):
            for label in sorted(profs):
                name = f"{ev.county_id}_{kind}_{label}.csv"
                ppath = os.path.join(profiles_dir, name)
                dataio.write_profile_csv(ppath, profs[label])
                record(ppath)

    if cfg.adoption_sweep is not None:
        rows = []
        for out in outcomes:
            if not out.ok:
                continue
            for rate, ev in out.sweep:
                c = ev.cost
                rows.append({
                    "county_id": out.county_id, "adoption": _f(rate),
                    "gap_kw": _f(ev.requirement.gap_kw)
                        if ev.requirement else "",
                    "cost_mean": _f(c.mean) if c else "",
                    "cost_lo95": _f(c.lo95) if c else "",
                    "cost_hi95": _f(c.hi95) if c else "",
                })
        sweep_path = os.path.join(cfg.out_dir, "adoption_sweep.csv")
        dataio.write_csv(sweep_path, SWEEP_FIELDS, rows)
        record(sweep_path)

    manifest = {
        "schema_version": SCHEMA_VERSION,
        "software_version": _version(),
        "seed": cfg.seed,
        "dt_hours": cfg.dt_hours,
        "scenario": cfg.scenario,
        "dsm": list(cfg.dsm),
        "sizing_rule": cfg.sizing_rule.value,
        "night_setback": cfg.night_setback,
        "hp_profile": cfg.hp_profile,
        "adoption": cfg.adoption,
        "adoption_sweep": list(cfg.adoption_sweep)
            if cfg.adoption_sweep else None,
        "headroom_bau": cfg.headroom_bau,
        "headroom_future": cfg.headroom_future,
        "sample_size": cfg.sample_size,
        "price": {
            "capital_per_kw": cfg.price.capital_per_kw,
            "recurring_per_kw_year": cfg.price.recurring_per_kw_year,
            "escalation_rate": cfg.price.escalation_rate,
            "discount_rate": cfg.price.discount_rate,
            "build_years": cfg.price.build_years,
            "sigma_frac": cfg.price.sigma_frac,
        },
        "inputs": {os.path.basename(p): dataio.file_sha256(p)
                   for p in sorted(cfg.counties) if os.path.exists(p)},
        "counties": {
            o.county_id: ("ok" if o.ok else "error") for o in outcomes},
        "outputs": files,
    }
    manifest_path = os.path.join(cfg.out_dir, "manifest.json")
    dataio.write_manifest(manifest_path, manifest)

    return RunReport(cfg, outcomes, aggregate, cfg.out_dir, files)


def _version() -> str:
    from . import __version__
    return __version__


def headroom_sweep(
    evaluations: Sequence[CountyEvaluation],
    bau_grid: Sequence[float],
    future_grid: Sequence[float],
    price_model: PriceModel,
) -> np.ndarray:
    """Aggregate mean cost over a grid of headroom assumptions.

    Reuses the stored peak99 values, so the expensive simulations run once;
    each cell just rescales capacities and re-prices the gaps. Returns a
    [len(bau_grid), len(future_grid)] matrix.
    """
    for g in (bau_grid, future_grid):
        for h in g:
            if not 0.0 <= h <= 1.0:
                raise ConfigError(f"headroom grid value {h} outside [0, 1]")
    evs = [e for e in evaluations
           if e.bau_estimate is not None and e.future_estimate is not None]
    if not evs:
        raise ConfigError("headroom sweep needs evaluations with both "
                          "scenario estimates")
    bau_peaks = np.array([e.bau_estimate.peak99_kw for e in evs])
    fut_peaks = np.array([e.future_estimate.peak99_kw for e in evs])
    out = np.empty((len(bau_grid), len(future_grid)))
    for i, hb in enumerate(bau_grid):
        for j, hf in enumerate(future_grid):
            gaps = np.maximum(0.0, fut_peaks * (1.0 + hf)
                              - bau_peaks * (1.0 + hb))
            ests = [cost_distribution(float(g), price_model) for g in gaps]
            out[i, j] = aggregate_cost(ests, price_model).mean
    return out
