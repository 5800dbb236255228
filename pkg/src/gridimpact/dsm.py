"""Demand-side strategies and county-level scenario evaluation.

Three levers act on the future (electrified) fleet: envelope upgrades raise
every home's thermal resistance by a quarter, a ground-source swap replaces
the air-source performance curves with flat ones at 1.5x the rated COP, and
fleet coordination schedules the electrified devices against the aggregate
peak. county_requirement runs the full pipeline for one county (both peak
weeks, both scenarios, any strategy subset) and is the single path the CLI,
the sweeps, and the strategy report all share.
"""

from __future__ import annotations

import dataclasses
import itertools
import logging
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from . import sizing
from .coordinate import coordinate_fleet
from .costs import CostEstimate, PriceModel, cost_distribution
from .devices import HeatPumpUnit, WeatherSeries
from .engine import (AggregateProfile, GridCapacityEstimate,
                     ReinforcementRequirement, WeekWindow, capacity_estimate,
                     draw_bau_headroom, reinforcement_requirement,
                     select_peak_weeks, simulate_week)
from .fleet import (ConfigError, CountySpec, Fleet, apply_adoption_rate,
                    apply_night_setback, synthesize_fleet)

log = logging.getLogger(__name__)

STRATEGIES = ("envelope", "gshp", "coordinate")
DEFAULT_FUTURE_HEADROOM = 0.2


def apply_envelope_upgrade(fleet: Fleet, factor: float = 1.25) -> Fleet:
    """Raise every home's thermal resistance; equipment stays as sized."""
    if factor < 1.0:
        raise ConfigError(f"envelope upgrade factor must be >= 1, got {factor}")
    households = []
    for home in fleet.households:
        env = dataclasses.replace(
            home.envelope, resistance=home.envelope.resistance * factor,
            heat_setpoints=None, cool_setpoints=None, gains=None)
        households.append(dataclasses.replace(home, envelope=env))
    return dataclasses.replace(fleet, households=households)


def apply_gshp(fleet: Fleet) -> Fleet:
    """Swap every installed heat pump to its ground-source equivalent."""
    households = []
    for home in fleet.households:
        if isinstance(home.hvac, HeatPumpUnit):
            households.append(dataclasses.replace(
                home, hvac=sizing.apply_gshp_to_unit(home.hvac)))
        else:
            households.append(dataclasses.replace(home))
    return dataclasses.replace(fleet, households=households)


@dataclass
class CountyEvaluation:
    """Everything one county run produces before report writing."""

    county_id: str
    scenario: str
    bau_profiles: dict
    future_profiles: dict
    bau_estimate: Optional[GridCapacityEstimate]
    future_estimate: Optional[GridCapacityEstimate]
    requirement: Optional[ReinforcementRequirement]
    cost: Optional[CostEstimate]
    headroom_bau: float
    headroom_future: float
    dsm: tuple
    relaxed_homes: int
    diagnostics: dict


def county_requirement(
    county: CountySpec,
    weather: WeatherSeries,
    seed: int,
    scenario: str = "both",
    dsm: Sequence[str] = (),
    adoption: Optional[float] = None,
    night_setback: bool = False,
    sizing_rule: sizing.SizingRule = sizing.SizingRule.MAX_OF_BOTH,
    hp_profile_setting: str = "cchp",
    sample_size: Optional[int] = None,
    headroom_bau: Optional[float] = None,
    headroom_future: float = DEFAULT_FUTURE_HEADROOM,
    price_model: Optional[PriceModel] = None,
) -> CountyEvaluation:
    """Evaluate one county: peak weeks, scenario capacities, gap and cost.

    The future fleet is fully electrified, or a BAU fleet with the given
    adoption fraction electrified. DSM strategies and the setback sensitivity
    act on the future fleet only.
    """
    dsm = tuple(dsm)
    for s in dsm:
        if s not in STRATEGIES:
            raise ConfigError(f"dsm: unknown strategy {s!r}")
    if scenario not in ("bau", "all-electric", "both"):
        raise ConfigError(f"scenario: unknown value {scenario!r}")
    if dsm and scenario == "bau":
        raise ConfigError("dsm: strategies act on the electrified scenario; "
                          "scenario 'bau' has nothing to coordinate")

    windows = select_peak_weeks(weather)
    synth = dict(sizing_rule=sizing_rule, hp_profile_setting=hp_profile_setting,
                 sample_size=sample_size)

    bau_profiles: dict = {}
    future_profiles: dict = {}
    relaxed = 0
    diagnostics: dict = {}

    bau_estimate = None
    if scenario in ("bau", "both"):
        bau = synthesize_fleet(county, "bau", seed, **synth)
        for w in windows:
            bau_profiles[w.label] = simulate_week(bau, w)
        h_bau = headroom_bau if headroom_bau is not None \
            else draw_bau_headroom(county)
        bau_estimate = capacity_estimate(list(bau_profiles.values()), h_bau)
    else:
        h_bau = headroom_bau if headroom_bau is not None \
            else draw_bau_headroom(county)

    future_estimate = None
    if scenario in ("all-electric", "both"):
        if adoption is not None:
            base = synthesize_fleet(county, "bau", seed, **synth)
            future = apply_adoption_rate(base, adoption, seed)
        else:
            future = synthesize_fleet(county, "all-electric", seed, **synth)
        if "envelope" in dsm:
            future = apply_envelope_upgrade(future)
        if "gshp" in dsm:
            future = apply_gshp(future)
        if night_setback:
            future = apply_night_setback(future, seed)
        for w in windows:
            if "coordinate" in dsm:
                result = coordinate_fleet(future, w)
                future_profiles[w.label] = result.profile
                relaxed += result.relaxed_homes
                diagnostics[f"lp_residual_{w.label}"] = result.residual_max
            else:
                future_profiles[w.label] = simulate_week(future, w)
        future_estimate = capacity_estimate(
            list(future_profiles.values()), headroom_future)

    requirement = None
    cost = None
    if bau_estimate is not None and future_estimate is not None:
        requirement = reinforcement_requirement(county, bau_estimate,
                                                future_estimate)
        if price_model is not None:
            cost = cost_distribution(requirement.gap_kw, price_model)

    return CountyEvaluation(
        county_id=county.county_id,
        scenario=scenario,
        bau_profiles=bau_profiles,
        future_profiles=future_profiles,
        bau_estimate=bau_estimate,
        future_estimate=future_estimate,
        requirement=requirement,
        cost=cost,
        headroom_bau=h_bau,
        headroom_future=headroom_future,
        dsm=dsm,
        relaxed_homes=relaxed,
        diagnostics=diagnostics,
    )


def dsm_cost_reduction_report(
    county: CountySpec,
    weather: WeatherSeries,
    price_model: PriceModel,
    seed: int,
    strategies: Sequence[str] = STRATEGIES,
    **options,
) -> list[dict]:
    """Reinforcement cost for every subset of the given strategies.

    Rows carry the gap, the mean cost, and the percent reduction against the
    no-strategy baseline; subsets are ordered by size then name so output is
    stable.
    """
    subsets: list[tuple[str, ...]] = []
    for n in range(len(strategies) + 1):
        subsets.extend(itertools.combinations(sorted(strategies), n))

    rows = []
    base_cost = None
    for subset in subsets:
        ev = county_requirement(county, weather, seed, scenario="both",
                                dsm=subset, price_model=price_model, **options)
        mean = ev.cost.mean if ev.cost is not None else 0.0
        if subset == ():
            base_cost = mean
        reduction = 0.0 if not base_cost \
            else 100.0 * (base_cost - mean) / base_cost
        rows.append({
            "strategies": "+".join(subset) if subset else "none",
            "gap_kw": ev.requirement.gap_kw,
            "cost_mean": mean,
            "cost_lo95": ev.cost.lo95 if ev.cost else 0.0,
            "cost_hi95": ev.cost.hi95 if ev.cost else 0.0,
            "reduction_pct": reduction,
        })
    return rows
