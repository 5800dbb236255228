"""County-scale residential electrification impact model.

Simulates fleets of homes (thermal envelope, heat pump or legacy HVAC,
water heater, electric vehicles) over annual peak weeks, estimates the grid
capacity each scenario needs, prices the reinforcement gap, and evaluates
demand-side strategies including LP-coordinated device scheduling.
"""

__version__ = "0.1.0"

from .costs import (CostEstimate, PriceModel, Z95, aggregate_cost,
                    cost_distribution, discount_rate_sweep, npv_cost)
from .coordinate import CoordinationResult, coordinate_fleet, solve_min_peak
from .devices import (BuildingEnvelope, EvBattery, HeatPumpUnit,
                      PerformanceCurve, WaterHeaterTank, WeatherSeries,
                      cooling_electric_power, decay_factor,
                      hvac_electric_power, ideal_tank_power,
                      ideal_thermal_power, step_building, step_ev,
                      step_water_heater, tank_electric_power)
from .dsm import (STRATEGIES, CountyEvaluation, county_requirement,
                  dsm_cost_reduction_report)
from .engine import (AggregateProfile, GridCapacityEstimate, PeakSample,
                     ReinforcementRequirement, WeekWindow, capacity_estimate,
                     monte_carlo_peaks, peak99, percentile_nearest_rank,
                     reinforcement_requirement, select_peak_weeks,
                     simulate_week)
from .fleet import (ConfigError, CountySpec, Fleet, Household,
                    apply_adoption_rate, apply_night_setback,
                    synthesize_fleet)
from .config import RunConfig, load_run_config, parse_sweep
from .dataio import load_county, load_weather
from .runner import RunReport, headroom_sweep, run
from .sizing import (HP_PROFILES, DesignLoads, SizingRule, design_loads,
                     size_equipment)

__all__ = [
    "AggregateProfile", "BuildingEnvelope", "ConfigError",
    "CoordinationResult", "CostEstimate", "CountyEvaluation", "CountySpec",
    "DesignLoads", "EvBattery", "Fleet", "GridCapacityEstimate",
    "HP_PROFILES", "HeatPumpUnit", "Household", "PeakSample",
    "PerformanceCurve", "PriceModel", "ReinforcementRequirement",
    "RunConfig", "RunReport", "STRATEGIES", "SizingRule", "WaterHeaterTank",
    "WeatherSeries", "WeekWindow", "Z95", "aggregate_cost",
    "apply_adoption_rate", "apply_night_setback", "capacity_estimate",
    "cooling_electric_power", "coordinate_fleet", "cost_distribution",
    "county_requirement", "decay_factor", "design_loads",
    "discount_rate_sweep", "dsm_cost_reduction_report", "headroom_sweep",
    "hvac_electric_power", "ideal_tank_power", "ideal_thermal_power",
    "load_county", "load_run_config", "load_weather", "monte_carlo_peaks",
    "npv_cost", "parse_sweep", "peak99", "percentile_nearest_rank",
    "reinforcement_requirement", "run", "select_peak_weeks", "simulate_week",
    "size_equipment", "solve_min_peak", "step_building", "step_ev",
    "step_water_heater", "synthesize_fleet", "tank_electric_power",
]
