"""Heat pump selection for a home given its design-condition loads.

Loads come from steady conduction at the county design temperatures (99%
heating, 1% cooling); the cooling side adds a per-home internal-gain
allowance taken from the daily peak of the miscellaneous load. A central
unit is picked by converting the governing load to a nameplate through the
normalized capacity fraction at the design temperature, capped at five tons
(17.6 kW). Whatever heating load the capped unit cannot cover at design
conditions goes first to a mini-split from the standard tier ladder, then to
electric resistance backup rounded up to whole kilowatts.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .devices import HeatPumpUnit, PerformanceCurve

CENTRAL_CAP_KW = 17.6
CENTRAL_FLOOR_KW = 3.5
MINISPLIT_TIERS_KW = (3.5, 7.05, 10.6)
GSHP_COP_GAIN = 1.5
_RATING_POINT_C = 8.3


class SizingRule(enum.Enum):
    MAX_OF_BOTH = "max-of-both"
    COOLING_ONLY = "cooling-only"


@dataclass(frozen=True)
class HpProfile:
    """Normalized performance shape shared by every unit of one family.

    Capacity fractions are relative to the cooling nameplate; multiplying by
    a nameplate yields the absolute curves of a concrete unit.
    """

    name: str
    heat_capacity_frac: PerformanceCurve
    heat_cop: PerformanceCurve
    cool_capacity_frac: PerformanceCurve
    cool_cop: PerformanceCurve


def _curve(nodes) -> PerformanceCurve:
    return PerformanceCurve.from_nodes(nodes)


# Air-source performance shapes. "today" tracks common installed ducted
# units; "cchp" is a cold-climate unit holding full capacity down to -15 C.
HP_PROFILES = {
    "today": HpProfile(
        name="today",
        heat_capacity_frac=_curve(
            [(-30, 0.25), (-25, 0.30), (-15, 0.45), (-8.3, 0.60),
             (0, 0.78), (8.3, 1.00), (16, 1.10)]
        ),
        heat_cop=_curve(
            [(-30, 1.25), (-25, 1.40), (-15, 1.90), (-8.3, 2.30),
             (0, 2.90), (8.3, 3.60), (16, 4.20)]
        ),
        cool_capacity_frac=_curve(
            [(20, 1.10), (27, 1.05), (35, 1.00), (40, 0.94), (46, 0.87)]
        ),
        cool_cop=_curve(
            [(20, 5.0), (27, 4.3), (35, 3.6), (40, 3.1), (46, 2.6)]
        ),
    ),
    "cchp": HpProfile(
        name="cchp",
        heat_capacity_frac=_curve(
            [(-30, 0.75), (-26, 0.85), (-15, 1.00), (-8.3, 1.00),
             (8.3, 1.00), (16, 1.05)]
        ),
        heat_cop=_curve(
            [(-30, 1.60), (-26, 1.80), (-15, 2.40), (-8.3, 2.90),
             (0, 3.40), (8.3, 4.30), (16, 5.00)]
        ),
        cool_capacity_frac=_curve(
            [(20, 1.10), (27, 1.05), (35, 1.00), (40, 0.94), (46, 0.87)]
        ),
        cool_cop=_curve(
            [(20, 5.0), (27, 4.3), (35, 3.6), (40, 3.1), (46, 2.6)]
        ),
    ),
}

# Existing central air conditioners in the stock run a little worse than a
# new heat pump in cooling mode.
BAU_AC_COP = _curve([(20, 4.4), (27, 3.8), (35, 3.2), (40, 2.8), (46, 2.3)])


@dataclass(frozen=True)
class DesignLoads:
    """Steady thermal loads at the county design temperatures, kW."""

    heating_kw: float
    cooling_kw: float
    design_temp_heat_c: float
    design_temp_cool_c: float


def design_loads(
    resistance_c_per_kw: float,
    heat_setpoint_c: float,
    cool_setpoint_c: float,
    design_temp_heat_c: float,
    design_temp_cool_c: float,
    gain_allowance_kw: float = 0.0,
) -> DesignLoads:
    """Conduction loads at design conditions; never negative.

    The gain allowance (daily peak of the home's miscellaneous load, treated
    as internal heat) loads the cooling side only.
    """
    if resistance_c_per_kw <= 0.0:
        raise ValueError(f"thermal resistance must be positive, got {resistance_c_per_kw}")
    heating = max(0.0, (heat_setpoint_c - design_temp_heat_c) / resistance_c_per_kw)
    cooling = max(
        0.0,
        (design_temp_cool_c - cool_setpoint_c) / resistance_c_per_kw
        + max(0.0, gain_allowance_kw),
    )
    return DesignLoads(heating, cooling, design_temp_heat_c, design_temp_cool_c)


def _unit_from_nameplate(nameplate_kw: float, profile: HpProfile,
                         backup_kw: float = 0.0,
                         minisplit: HeatPumpUnit | None = None) -> HeatPumpUnit:
    return HeatPumpUnit(
        capacity_curve=profile.heat_capacity_frac.scaled(nameplate_kw),
        cop_curve=profile.heat_cop,
        nameplate_cooling_kw=nameplate_kw,
        backup_resistance_kw=backup_kw,
        cooling_capacity_curve=profile.cool_capacity_frac.scaled(nameplate_kw),
        cooling_cop_curve=profile.cool_cop,
        minisplit=minisplit,
    )


def size_equipment(
    loads: DesignLoads,
    rule: SizingRule = SizingRule.MAX_OF_BOTH,
    profile: HpProfile | str = "cchp",
) -> HeatPumpUnit:
    """Pick central unit, optional mini-split, and resistance backup.

    Cooling-only sizing ignores the heating load when picking the central
    nameplate, leaving more of the design heating day to resistance backup.
    """
    if isinstance(profile, str):
        profile = HP_PROFILES[profile]
    frac_h = float(profile.heat_capacity_frac(loads.design_temp_heat_c))
    frac_c = float(profile.cool_capacity_frac(loads.design_temp_cool_c))

    plate_for_cool = loads.cooling_kw / frac_c if loads.cooling_kw > 0 else 0.0
    plate_for_heat = loads.heating_kw / frac_h if loads.heating_kw > 0 else 0.0
    if rule is SizingRule.COOLING_ONLY:
        governing = plate_for_cool
    else:
        governing = max(plate_for_heat, plate_for_cool)
    nameplate = min(max(governing, CENTRAL_FLOOR_KW), CENTRAL_CAP_KW)

    residual_heat = loads.heating_kw - nameplate * frac_h
    residual_cool = loads.cooling_kw - nameplate * frac_c

    minisplit = None
    if rule is SizingRule.MAX_OF_BOTH:
        mini_need = max(residual_heat / frac_h if residual_heat > 1e-9 else 0.0,
                        residual_cool / frac_c if residual_cool > 1e-9 else 0.0)
    else:
        mini_need = residual_cool / frac_c if residual_cool > 1e-9 else 0.0
    if mini_need > 1e-9:
        for tier in MINISPLIT_TIERS_KW:
            if tier >= mini_need - 1e-12:
                break
        else:
            tier = MINISPLIT_TIERS_KW[-1]
        minisplit = _unit_from_nameplate(tier, profile)
        residual_heat -= tier * frac_h

    backup = math.ceil(residual_heat - 1e-9) if residual_heat > 1e-9 else 0
    return _unit_from_nameplate(nameplate, profile, backup_kw=float(backup),
                                minisplit=minisplit)


def combined_heat_capacity(unit: HeatPumpUnit, theta_c: float) -> float:
    """Deliverable heat at theta including mini-split and backup."""
    cap = float(unit.capacity_curve(theta_c)) + unit.backup_resistance_kw
    if unit.minisplit is not None:
        cap += float(unit.minisplit.capacity_curve(theta_c))
    return cap


def apply_gshp_to_unit(unit: HeatPumpUnit) -> HeatPumpUnit:
    """Ground-source swap: flat capacity at nameplate, flat COP 1.5x rated.

    The rating point is the 8.3 C air-source figure; ground loops see a
    near-constant source so both curves collapse to constants. Backup stays
    (it is already installed) but the flat capacity rarely leaves it work.
    """
    const_t = unit.capacity_curve.temps_c[:1]
    heat_cop = float(unit.cop_curve(_RATING_POINT_C)) * GSHP_COP_GAIN
    new = HeatPumpUnit(
        capacity_curve=PerformanceCurve(const_t, [unit.nameplate_cooling_kw]),
        cop_curve=PerformanceCurve(const_t, [heat_cop]),
        nameplate_cooling_kw=unit.nameplate_cooling_kw,
        backup_resistance_kw=unit.backup_resistance_kw,
        cooling_capacity_curve=PerformanceCurve(const_t, [unit.nameplate_cooling_kw]),
        cooling_cop_curve=PerformanceCurve(
            const_t,
            [float(unit.cooling_cop_curve(35.0)) * GSHP_COP_GAIN
             if unit.cooling_cop_curve is not None else heat_cop],
        ),
        minisplit=apply_gshp_to_unit(unit.minisplit) if unit.minisplit else None,
    )
    return new
