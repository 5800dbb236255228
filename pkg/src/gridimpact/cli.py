"""Command-line entry point.

Exit codes: 0 on success, 1 when every county failed, 2 on a configuration
or input problem.
"""

from __future__ import annotations

import argparse
import logging
import sys

from .config import (HP_PROFILE_SETTINGS, SCENARIOS, load_run_config,
                     merge_cli)
from .dsm import STRATEGIES
from .fleet import ConfigError
from .runner import run
from .sizing import SizingRule


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="gridimpact",
        description="Estimate grid reinforcement needs for residential "
                    "electrification, county by county.")
    ap.add_argument("--config", required=True, metavar="PATH",
                    help="run configuration YAML")
    ap.add_argument("--scenario", choices=SCENARIOS,
                    help="which scenarios to evaluate (default from config)")
    ap.add_argument("--dsm", action="append", choices=STRATEGIES,
                    metavar="STRATEGY",
                    help="demand strategy for the electrified fleet; repeat "
                         f"for several (choices: {', '.join(STRATEGIES)})")
    ap.add_argument("--sizing", choices=[r.value for r in SizingRule],
                    help="equipment sizing rule")
    ap.add_argument("--night-setback", action="store_true", default=False,
                    help="apply overnight heating setbacks to the "
                         "electrified fleet")
    ap.add_argument("--hp-profile", choices=HP_PROFILE_SETTINGS,
                    help="heat pump performance family")
    ap.add_argument("--adoption", type=float, metavar="F",
                    help="electrify a fraction F of homes instead of all")
    ap.add_argument("--adoption-sweep", metavar="A:B:STEP",
                    help="evaluate a grid of adoption fractions")
    ap.add_argument("--headroom-bau", type=float, metavar="F",
                    help="override the drawn business-as-usual headroom")
    ap.add_argument("--headroom-future", type=float, metavar="F",
                    help="target headroom for the electrified scenario")
    ap.add_argument("--seed", type=int, metavar="N")
    ap.add_argument("--dt", type=float, metavar="HOURS",
                    help="simulation step; must match the weather step")
    ap.add_argument("--out", metavar="DIR", help="output directory")
    ap.add_argument("--jobs", type=int, metavar="N",
                    help="county worker processes (default: all cores)")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = merge_cli(load_run_config(args.config), args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        report = run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    ok = [o for o in report.outcomes if o.ok]
    failed = [o for o in report.outcomes if not o.ok]
    for o in failed:
        first = o.error.strip().splitlines()[0] if o.error else "unknown"
        print(f"county {o.county_id} failed: {first}", file=sys.stderr)
    for o in ok:
        req = o.evaluation.requirement
        if req is not None:
            print(f"{o.county_id}: gap {req.gap_kw:.1f} kW "
                  f"({req.gap_per_household_kw:.3f} kW/household)")
        else:
            est = (o.evaluation.future_estimate
                   or o.evaluation.bau_estimate)
            print(f"{o.county_id}: peak99 {est.peak99_kw:.1f} kW, "
                  f"capacity {est.capacity_kw:.1f} kW")
    if report.aggregate is not None:
        a = report.aggregate
        print(f"aggregate: gap {a.gap_kw:.1f} kW, cost mean ${a.mean:,.0f} "
              f"(95% CI ${a.lo95:,.0f} to ${a.hi95:,.0f})")
    print(f"report written to {report.out_dir}")
    if not ok:
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
