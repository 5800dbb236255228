"""Reinforcement cost: net present value of a linear multi-year build-out.

A capacity gap G is built in equal annual tranches over n years. Each tranche
pays a capital price when built; every kW already standing pays a recurring
price each year. Prices escalate at rate i and cash flows discount at rate
r, so with the ratio phi = (1+i)/(1+r) the mean cost is

    G/n * (capital * sum_k phi^k  +  recurring * sum_k k*phi^k),  k = 1..n

which collapses to G*capital + G*recurring*(n+1)/2 when i equals r. Price
uncertainty is a pair of independent Gaussians, one per price, each with a
standard deviation of sigma_frac times its mean; the cost is linear in the
prices, so its distribution is Gaussian with an exact 95% interval.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Iterable, Sequence

Z95 = 1.96


@dataclass(frozen=True)
class PriceModel:
    capital_per_kw: float
    recurring_per_kw_year: float
    escalation_rate: float
    discount_rate: float
    build_years: int
    sigma_frac: float = 0.2

    def __post_init__(self) -> None:
        if self.build_years < 1:
            raise ValueError(f"build_years must be >= 1, got {self.build_years}")
        if self.capital_per_kw < 0 or self.recurring_per_kw_year < 0:
            raise ValueError("prices cannot be negative")
        if self.discount_rate <= -1.0:
            raise ValueError("discount rate must exceed -100%")
        if not 0.0 <= self.sigma_frac < 1.0:
            raise ValueError(f"sigma_frac must lie in [0, 1), got {self.sigma_frac}")


@dataclass(frozen=True)
class CostEstimate:
    """Gaussian cost summary; coefficients retained so estimates add exactly.

    capital_coeff and recurring_coeff are the dollars per unit price, i.e.
    cost = capital_coeff * capital + recurring_coeff * recurring for any
    price draw. Summing coefficients across counties models one shared
    nationwide price draw rather than independent county draws.
    """

    gap_kw: float
    mean: float
    std: float
    lo95: float
    hi95: float
    capital_coeff: float
    recurring_coeff: float


def _discount_sums(pm: PriceModel) -> tuple[float, float]:
    phi = (1.0 + pm.escalation_rate) / (1.0 + pm.discount_rate)
    plain = math.fsum(phi ** k for k in range(1, pm.build_years + 1))
    ramped = math.fsum(k * phi ** k for k in range(1, pm.build_years + 1))
    return plain, ramped


def npv_cost(gap_kw: float, pm: PriceModel) -> float:
    """Mean-price net present value of reinforcing gap_kw."""
    if gap_kw < 0.0:
        raise ValueError(f"capacity gap cannot be negative, got {gap_kw}")
    plain, ramped = _discount_sums(pm)
    return gap_kw / pm.build_years * (
        pm.capital_per_kw * plain + pm.recurring_per_kw_year * ramped)


def cost_distribution(gap_kw: float, pm: PriceModel) -> CostEstimate:
    """Gaussian cost with exact 95% interval from the price uncertainty."""
    if gap_kw < 0.0:
        raise ValueError(f"capacity gap cannot be negative, got {gap_kw}")
    plain, ramped = _discount_sums(pm)
    cap_coeff = gap_kw / pm.build_years * plain
    rec_coeff = gap_kw / pm.build_years * ramped
    mean = cap_coeff * pm.capital_per_kw + rec_coeff * pm.recurring_per_kw_year
    std = math.hypot(cap_coeff * pm.sigma_frac * pm.capital_per_kw,
                     rec_coeff * pm.sigma_frac * pm.recurring_per_kw_year)
    return CostEstimate(
        gap_kw=gap_kw, mean=mean, std=std,
        lo95=mean - Z95 * std, hi95=mean + Z95 * std,
        capital_coeff=cap_coeff, recurring_coeff=rec_coeff,
    )


def aggregate_cost(estimates: Iterable[CostEstimate], pm: PriceModel) -> CostEstimate:
    """Combine county estimates under one shared price draw.

    Coefficients add; the total stays Gaussian with sigma_frac times the
    mean structure preserved, which is wider than a root-sum-square of
    independent county draws would be.
    """
    ests = list(estimates)
    gap = math.fsum(e.gap_kw for e in ests)
    cap_coeff = math.fsum(e.capital_coeff for e in ests)
    rec_coeff = math.fsum(e.recurring_coeff for e in ests)
    mean = cap_coeff * pm.capital_per_kw + rec_coeff * pm.recurring_per_kw_year
    std = math.hypot(cap_coeff * pm.sigma_frac * pm.capital_per_kw,
                     rec_coeff * pm.sigma_frac * pm.recurring_per_kw_year)
    return CostEstimate(gap, mean, std, mean - Z95 * std, mean + Z95 * std,
                        cap_coeff, rec_coeff)


def discount_rate_sweep(
    gap_kw: float, pm: PriceModel, rates: Sequence[float],
) -> list[tuple[float, CostEstimate]]:
    """Cost at each discount rate; higher rates always cost less."""
    return [(r, cost_distribution(gap_kw, replace(pm, discount_rate=r)))
            for r in rates]
