"""NPV cost model: closed forms, Gaussian intervals, aggregation."""

import math

import numpy as np
import pytest

from gridimpact.config import DEFAULT_PRICE
from gridimpact.costs import (
    Z95,
    CostEstimate,
    PriceModel,
    aggregate_cost,
    cost_distribution,
    discount_rate_sweep,
    npv_cost,
)


def pm(capital=830.0, recurring=10.0, i=0.025, r=0.025, n=25, sigma=0.2):
    return PriceModel(capital, recurring, i, r, n, sigma)


class TestNpvClosedForms:
    @pytest.mark.parametrize("n", [1, 5, 25])
    @pytest.mark.parametrize("rate", [0.0, 0.025, 0.08])
    def test_identity_rate_collapses(self, n, rate):
        model = pm(i=rate, r=rate, n=n)
        for gap in (1.0, 17.3, 40000.0):
            want = model.capital_per_kw * gap \
                + model.recurring_per_kw_year * gap * (n + 1) / 2.0
            assert npv_cost(gap, model) == pytest.approx(want, rel=1e-9)

    def test_single_year(self):
        model = pm(capital=100.0, recurring=7.0, i=0.02, r=0.09, n=1)
        want = (100.0 + 7.0) * 5.0 * 1.02 / 1.09
        assert npv_cost(5.0, model) == pytest.approx(want, rel=1e-12)

    def test_general_rates_match_direct_sum(self):
        model = pm(capital=120.0, recurring=9.0, i=0.02, r=0.07, n=7)
        phi = 1.02 / 1.07
        gap = 11.0
        want = gap / 7 * math.fsum(
            120.0 * phi ** k + 9.0 * k * phi ** k for k in range(1, 8))
        assert npv_cost(gap, model) == pytest.approx(want, rel=1e-12)

    def test_linearity_in_gap(self):
        model = pm(i=0.02, r=0.06, n=12)
        assert npv_cost(0.0, model) == 0.0
        assert npv_cost(8.0, model) == pytest.approx(2 * npv_cost(4.0, model),
                                                     rel=1e-12)
        assert npv_cost(3.0, model) + npv_cost(5.0, model) == pytest.approx(
            npv_cost(8.0, model), rel=1e-12)

    def test_homogeneity_in_prices(self):
        a = pm(capital=200.0, recurring=12.0, i=0.02, r=0.05, n=9)
        b = pm(capital=400.0, recurring=24.0, i=0.02, r=0.05, n=9)
        assert npv_cost(6.0, b) == pytest.approx(2 * npv_cost(6.0, a), rel=1e-12)

    def test_negative_gap_rejected(self):
        with pytest.raises(ValueError, match="negative"):
            npv_cost(-1.0, pm())

    def test_bad_price_models_rejected(self):
        with pytest.raises(ValueError):
            pm(n=0)
        with pytest.raises(ValueError):
            pm(capital=-5.0)
        with pytest.raises(ValueError):
            pm(sigma=1.0)
        with pytest.raises(ValueError):
            pm(r=-1.5)


class TestCostDistribution:
    def test_mean_matches_npv(self):
        model = pm(i=0.03, r=0.08, n=14)
        est = cost_distribution(123.0, model)
        assert est.mean == pytest.approx(npv_cost(123.0, model), rel=1e-12)

    def test_sigma_zero_collapses(self):
        est = cost_distribution(40.0, pm(sigma=0.0))
        assert est.std == 0.0
        assert est.lo95 == est.mean == est.hi95

    def test_interval_brackets_mean_symmetrically(self):
        est = cost_distribution(50.0, pm(i=0.01, r=0.06, n=18))
        assert est.lo95 + est.hi95 == pytest.approx(2 * est.mean, rel=1e-12)
        assert est.hi95 - est.lo95 == pytest.approx(2 * Z95 * est.std, rel=1e-12)
        assert est.std >= 0

    def test_std_from_independent_price_draws(self):
        model = pm(capital=300.0, recurring=20.0, i=0.02, r=0.02, n=4, sigma=0.15)
        est = cost_distribution(10.0, model)
        # i = r: capital coefficient is G, recurring coefficient G*(n+1)/2
        cap_c, rec_c = 10.0, 10.0 * 2.5
        want = math.hypot(cap_c * 0.15 * 300.0, rec_c * 0.15 * 20.0)
        assert est.capital_coeff == pytest.approx(cap_c, rel=1e-12)
        assert est.recurring_coeff == pytest.approx(rec_c, rel=1e-12)
        assert est.std == pytest.approx(want, rel=1e-12)

    def test_scales_linearly_with_gap(self):
        model = pm(i=0.01, r=0.04, n=10)
        one = cost_distribution(1.0, model)
        big = cost_distribution(250.0, model)
        assert big.mean == pytest.approx(250 * one.mean, rel=1e-12)
        assert big.std == pytest.approx(250 * one.std, rel=1e-12)

    def test_effective_unit_price_interval(self):
        """A 960 $/kW effective mean with a 20% sigma must land on the
        published-style interval of roughly 587 to 1331 per kW."""
        model = PriceModel(960.0, 0.0, 0.025, 0.025, 25, 0.2)
        est = cost_distribution(1.0, model)
        assert est.mean == pytest.approx(960.0, rel=1e-9)
        assert est.std == pytest.approx(192.0, rel=1e-9)
        assert abs(est.lo95 - 587.0) / 587.0 < 0.01
        assert abs(est.hi95 - 1331.0) / 1331.0 < 0.01

    def test_default_pair_calibrated_to_960(self):
        assert npv_cost(1.0, DEFAULT_PRICE) == pytest.approx(960.0, rel=1e-9)


class TestDiscountSweep:
    def test_strictly_decreasing(self):
        rates = [0.0, 0.01, 0.025, 0.05, 0.08, 0.12]
        curve = discount_rate_sweep(500.0, pm(i=0.025), rates)
        means = [est.mean for _, est in curve]
        assert all(a > b for a, b in zip(means, means[1:]))

    def test_identity_point_on_curve(self):
        curve = discount_rate_sweep(500.0, pm(i=0.025), [0.025])
        want = 830.0 * 500.0 + 10.0 * 500.0 * 13.0
        assert curve[0][1].mean == pytest.approx(want, rel=1e-9)

    def test_large_rate_still_positive(self):
        curve = discount_rate_sweep(500.0, pm(i=0.025), [5.0])
        assert curve[0][1].mean > 0

    def test_rates_echoed(self):
        rates = [0.01, 0.03]
        curve = discount_rate_sweep(10.0, pm(), rates)
        assert [r for r, _ in curve] == rates


class TestAggregation:
    def test_coefficients_and_means_add(self):
        model = pm(i=0.02, r=0.05, n=11)
        a = cost_distribution(100.0, model)
        b = cost_distribution(250.0, model)
        agg = aggregate_cost([a, b], model)
        assert agg.gap_kw == pytest.approx(350.0)
        assert agg.mean == pytest.approx(a.mean + b.mean, rel=1e-12)
        assert agg.capital_coeff == pytest.approx(
            a.capital_coeff + b.capital_coeff, rel=1e-12)
        assert agg.recurring_coeff == pytest.approx(
            a.recurring_coeff + b.recurring_coeff, rel=1e-12)

    def test_single_estimate_is_identity(self):
        model = pm(i=0.02, r=0.05, n=11)
        a = cost_distribution(77.0, model)
        agg = aggregate_cost([a], model)
        assert agg == CostEstimate(a.gap_kw, agg.mean, agg.std, agg.lo95,
                                   agg.hi95, a.capital_coeff, a.recurring_coeff)
        assert agg.mean == pytest.approx(a.mean, rel=1e-12)
        assert agg.std == pytest.approx(a.std, rel=1e-12)

    def test_shared_draw_is_wider_than_independent(self):
        model = pm(i=0.0, r=0.03, n=20)
        parts = [cost_distribution(g, model) for g in (50.0, 120.0, 300.0)]
        agg = aggregate_cost(parts, model)
        rss = math.sqrt(sum(p.std ** 2 for p in parts))
        assert agg.std >= rss - 1e-9

    def test_matches_any_common_price_draw(self, rng):
        """Cost is linear in prices, so for any single draw the aggregate
        evaluated from summed coefficients equals the sum of county costs."""
        model = pm(i=0.02, r=0.06, n=13)
        parts = [cost_distribution(g, model) for g in (10.0, 44.0, 91.0)]
        agg = aggregate_cost(parts, model)
        for _ in range(25):
            cap = model.capital_per_kw * (1 + 0.2 * rng.standard_normal())
            rec = model.recurring_per_kw_year * (1 + 0.2 * rng.standard_normal())
            county_sum = sum(p.capital_coeff * cap + p.recurring_coeff * rec
                             for p in parts)
            agg_cost = agg.capital_coeff * cap + agg.recurring_coeff * rec
            assert agg_cost == pytest.approx(county_sum, rel=1e-12)

    def test_empty_aggregate_is_zero(self):
        agg = aggregate_cost([], pm())
        assert agg.gap_kw == 0.0 and agg.mean == 0.0 and agg.std == 0.0
