"""Run configuration: YAML file merged with command-line overrides."""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence, Tuple

import yaml

from .costs import PriceModel
from .dsm import STRATEGIES
from .fleet import ConfigError
from .sizing import SizingRule

SCENARIOS = ("bau", "all-electric", "both")
HP_PROFILE_SETTINGS = ("today", "cchp")


# Default prices land on an effective one-shot 960 $/kW under matched
# escalation and discounting: 830 + 10 * (25 + 1) / 2.
DEFAULT_PRICE = PriceModel(
    capital_per_kw=830.0, recurring_per_kw_year=10.0,
    escalation_rate=0.025, discount_rate=0.025, build_years=25,
    sigma_frac=0.2)


@dataclass(frozen=True)
class RunConfig:
    counties: Tuple[str, ...]
    price: PriceModel = DEFAULT_PRICE
    dt_hours: float = 0.25
    seed: int = 0
    scenario: str = "both"
    dsm: Tuple[str, ...] = ()
    sizing_rule: SizingRule = SizingRule.MAX_OF_BOTH
    night_setback: bool = False
    hp_profile: str = "cchp"
    adoption: Optional[float] = None
    adoption_sweep: Optional[Tuple[float, ...]] = None
    headroom_bau: Optional[float] = None
    headroom_future: float = 0.2
    sample_size: Optional[int] = None
    out_dir: str = "out"
    jobs: int = 0  # 0 means one worker per available core

    def __post_init__(self):
        if not self.counties:
            raise ConfigError("no counties given")
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}")
        if self.hp_profile not in HP_PROFILE_SETTINGS:
            raise ConfigError(f"unknown hp profile {self.hp_profile!r}")
        for s in self.dsm:
            if s not in STRATEGIES:
                raise ConfigError(
                    f"unknown dsm strategy {s!r} (choose from {STRATEGIES})")
        if self.dsm and self.scenario == "bau":
            raise ConfigError("dsm strategies only apply to the "
                              "all-electric scenario")
        if self.adoption is not None and self.adoption_sweep is not None:
            raise ConfigError("give either a single adoption rate or a "
                              "sweep, not both")
        if self.adoption is not None and not 0.0 <= self.adoption <= 1.0:
            raise ConfigError("adoption rate must lie in [0, 1]")
        if self.adoption_sweep is not None:
            for a in self.adoption_sweep:
                if not 0.0 <= a <= 1.0:
                    raise ConfigError("sweep rates must lie in [0, 1]")
        if self.dt_hours <= 0:
            raise ConfigError("dt must be positive")
        if self.jobs < 0:
            raise ConfigError("jobs cannot be negative")
        if self.headroom_bau is not None and self.headroom_bau < 0:
            raise ConfigError("headroom must be nonnegative")
        if self.headroom_future < 0:
            raise ConfigError("headroom must be nonnegative")


def parse_sweep(text: str) -> Tuple[float, ...]:
    """Parse "A:B:STEP" into an inclusive grid of adoption rates."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"sweep must be A:B:STEP, got {text!r}")
    try:
        a, b, step = (float(p) for p in parts)
    except ValueError:
        raise ConfigError(f"sweep values must be numbers, got {text!r}")
    if step <= 0 or b < a:
        raise ConfigError("sweep needs B >= A and STEP > 0")
    n = int(round((b - a) / step))
    grid = [a + k * step for k in range(n + 1)]
    if grid[-1] < b - 1e-9:
        grid.append(b)
    grid[-1] = min(grid[-1], b)
    return tuple(round(g, 10) for g in grid)


def _price_from_mapping(raw: dict) -> PriceModel:
    allowed = {"capital_per_kw", "recurring_per_kw_year", "escalation_rate",
               "discount_rate", "build_years", "sigma_frac"}
    bad = set(raw) - allowed
    if bad:
        raise ConfigError(f"unknown price fields {sorted(bad)}")
    return PriceModel(**{k: (int(v) if k == "build_years" else float(v))
                         for k, v in raw.items()})


def load_run_config(path: str) -> RunConfig:
    """Read a run config YAML; county paths resolve relative to the file."""
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}")
    except yaml.YAMLError as exc:
        raise ConfigError(f"config {path} is not valid YAML: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a mapping")

    base = os.path.dirname(os.path.abspath(path))
    counties = raw.pop("counties", None)
    if not isinstance(counties, list) or not counties:
        raise ConfigError("config needs a nonempty counties list")
    paths = tuple(
        c if os.path.isabs(c) else os.path.join(base, c) for c in counties)

    kwargs = {"counties": paths}
    if "price" in raw:
        price = raw.pop("price")
        if not isinstance(price, dict):
            raise ConfigError("price must be a mapping")
        kwargs["price"] = _price_from_mapping(price)
    if "sizing_rule" in raw:
        kwargs["sizing_rule"] = SizingRule(raw.pop("sizing_rule"))
    if "dsm" in raw:
        dsm = raw.pop("dsm")
        if not isinstance(dsm, list):
            raise ConfigError("dsm must be a list of strategy names")
        kwargs["dsm"] = tuple(dsm)
    if "adoption_sweep" in raw:
        sweep = raw.pop("adoption_sweep")
        if isinstance(sweep, str):
            kwargs["adoption_sweep"] = parse_sweep(sweep)
        elif isinstance(sweep, list):
            kwargs["adoption_sweep"] = tuple(float(a) for a in sweep)
        else:
            raise ConfigError("adoption_sweep must be A:B:STEP or a list")

    simple = {
        "dt_hours": float, "seed": int, "scenario": str,
        "night_setback": bool, "hp_profile": str, "adoption": float,
        "headroom_bau": float, "headroom_future": float,
        "sample_size": int, "out_dir": str, "jobs": int,
    }
    for key, cast in simple.items():
        if key in raw:
            val = raw.pop(key)
            kwargs[key] = None if val is None else cast(val)
    if raw:
        raise ConfigError(f"unknown config fields {sorted(raw)}")
    return RunConfig(**kwargs)


def merge_cli(cfg: RunConfig, args) -> RunConfig:
    """Apply parsed argparse overrides on top of a config."""
    updates = {}
    if getattr(args, "scenario", None) is not None:
        updates["scenario"] = args.scenario
    if getattr(args, "dsm", None):
        updates["dsm"] = tuple(args.dsm)
    if getattr(args, "sizing", None) is not None:
        updates["sizing_rule"] = SizingRule(args.sizing)
    if getattr(args, "night_setback", False):
        updates["night_setback"] = True
    if getattr(args, "hp_profile", None) is not None:
        updates["hp_profile"] = args.hp_profile
    if getattr(args, "adoption", None) is not None:
        updates["adoption"] = args.adoption
        updates["adoption_sweep"] = None
    if getattr(args, "adoption_sweep", None) is not None:
        updates["adoption_sweep"] = parse_sweep(args.adoption_sweep)
        updates["adoption"] = None
    if getattr(args, "headroom_bau", None) is not None:
        updates["headroom_bau"] = args.headroom_bau
    if getattr(args, "headroom_future", None) is not None:
        updates["headroom_future"] = args.headroom_future
    if getattr(args, "seed", None) is not None:
        updates["seed"] = args.seed
    if getattr(args, "dt", None) is not None:
        updates["dt_hours"] = args.dt
    if getattr(args, "sample_size", None) is not None:
        updates["sample_size"] = args.sample_size
    if getattr(args, "out", None) is not None:
        updates["out_dir"] = args.out
    if getattr(args, "jobs", None) is not None:
        updates["jobs"] = args.jobs
    return replace(cfg, **updates) if updates else cfg
