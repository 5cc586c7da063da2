import csv
import io
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from catalytic import core, montecarlo as mc
from catalytic.core import ModelParams
from catalytic.errors import ParameterError
from catalytic.montecarlo import CostDistribution, SimConfig


def test_catalytic_estimate_within_three_se(baseline):
    m, se = mc.estimate_catalytic_mc(SimConfig(baseline, iterations=400_000, seed=1))
    assert abs(m - core.catalytic_value(baseline)) < 3 * se


def test_catalytic_estimate_needs_enough_draws(baseline):
    with pytest.raises(ParameterError):
        mc.estimate_catalytic_mc(SimConfig(baseline, iterations=999))


def test_zero_volatility_estimate_is_exact():
    assert mc.estimate_catalytic_mc(SimConfig(ModelParams(sigma_eps=0.0), iterations=10_000)) == (0.0, 0.0)


@pytest.mark.parametrize("sigma", [1.0, 5.0, 10.0, 20.0])
def test_switching_rate_near_closed_form(baseline, sigma):
    r = mc.simulate_point(SimConfig(baseline, iterations=200_000, seed=3), sigma)
    p = core.switch_probability(baseline.gap, sigma, baseline.sigma_theta)
    assert abs(r.switching_rate - p) < 4 * math.sqrt(p * (1 - p) / r.iterations) + 1e-12


def test_fixed_cost_exploration_is_all_or_nothing(baseline):
    reports = mc.run_sweep(SimConfig(baseline, iterations=5_000, seed=0), [1, 5, 10, 15, 20])
    rates = [r.exploration_rate for r in reports]
    assert set(rates) <= {0.0, 1.0}
    assert rates == sorted(rates)
    assert rates[-1] == 1.0


def test_report_reaccounts_draw_by_draw(baseline):
    # second pass over the raw draws must reproduce the aggregated report
    cfg = SimConfig(baseline, iterations=mc.BLOCK_SIZE + 123, seed=9, cost_distribution=CostDistribution.exponential(2.0))
    r = mc.simulate_point(cfg, 10.0, 2)
    draws = [mc._draw_block(cfg, 10.0, 2, b, n) for b, n in enumerate(mc._block_sizes(cfg.iterations))]
    explore = np.concatenate([d["explore"] for d in draws])
    switch = np.concatenate([d["switch"] for d in draws])
    realized = np.concatenate([d["realized_gain"][d["explore"]] for d in draws])
    cat = np.concatenate([d["catalytic_gain"] for d in draws])
    assert r.exploration_rate == explore.mean()
    assert r.switching_rate == switch.mean()
    assert r.joint_switch_rate == (explore & switch).mean()
    assert r.mean_realized_ov == pytest.approx(realized.mean(), rel=1e-13)
    assert r.catalytic_estimate == pytest.approx(cat.mean(), rel=1e-12)
    assert r.standard_errors["catalytic_estimate"] == pytest.approx(cat.std(ddof=1) / math.sqrt(cat.size), rel=1e-9)


def test_exponential_costs_track_cdf(baseline):
    law = CostDistribution.exponential(2.0)
    r = mc.simulate_point(SimConfig(baseline, iterations=200_000, seed=4, cost_distribution=law), 10.0)
    p = law.cdf(baseline.delta * core.total_option_value(baseline))
    assert abs(r.exploration_rate - p) < 4 * math.sqrt(p * (1 - p) / r.iterations)


def test_catalytic_exploration_value_lowers_rate(baseline):
    law = CostDistribution.exponential(2.0)
    a = mc.simulate_point(SimConfig(baseline, iterations=50_000, seed=4, cost_distribution=law), 10.0)
    b = mc.simulate_point(SimConfig(baseline, iterations=50_000, seed=4, cost_distribution=law, exploration_value="catalytic"), 10.0)
    assert b.exploration_rate <= a.exploration_rate


def test_same_seed_same_report(baseline):
    cfg = SimConfig(baseline, iterations=100_000, seed=42)
    assert mc.simulate_point(cfg, 10.0) == mc.simulate_point(cfg, 10.0)


def test_worker_count_does_not_change_output(baseline):
    law = CostDistribution.lognormal(0.0, 1.0)
    a = SimConfig(baseline, iterations=300_000, seed=42, workers=1, cost_distribution=law)
    b = SimConfig(baseline, iterations=300_000, seed=42, workers=4, cost_distribution=law)
    grid = [1, 5, 10]
    assert mc.reports_to_csv(mc.run_sweep(a, grid), baseline) == mc.reports_to_csv(mc.run_sweep(b, grid), baseline)


def test_grid_points_use_distinct_streams(baseline):
    cfg = SimConfig(baseline, iterations=1_000, seed=42)
    a = mc._draw_block(cfg, 10.0, 0, 0, 10)["theta"]
    b = mc._draw_block(cfg, 10.0, 1, 0, 10)["theta"]
    assert not np.array_equal(a, b)


def test_csv_header_is_frozen(baseline):
    text = mc.reports_to_csv(mc.run_sweep(SimConfig(baseline, iterations=1_000), [5.0]), baseline)
    rows = list(csv.DictReader(io.StringIO(text)))
    assert tuple(rows[0].keys()) == mc.CSV_COLUMNS
    assert float(rows[0]["sigma_eps"]) == 5.0


def test_json_mirror_has_schema(baseline):
    cfg = SimConfig(baseline, iterations=1_000, cost_distribution=CostDistribution.exponential(2.0))
    doc = json.loads(mc.reports_to_json(mc.run_sweep(cfg, [5.0, 10.0]), baseline, cfg))
    assert doc["schema_version"] == mc.SCHEMA_VERSION
    assert doc["config"]["cost_distribution"] == {"kind": "exponential", "mean": 2.0}
    assert len(doc["rows"]) == 2


@given(st.floats(0.05, 0.95), st.floats(0.1, 5.0))
def test_cost_ppf_inverts_cdf(q, mean):
    for law in (CostDistribution.exponential(mean), CostDistribution.lognormal(math.log(mean), 0.7)):
        assert law.cdf(law.ppf(q)) == pytest.approx(q, abs=1e-12)


def test_cost_distribution_validation():
    with pytest.raises(ParameterError):
        CostDistribution.exponential(0.0)
    with pytest.raises(ParameterError):
        CostDistribution("uniform")
    with pytest.raises(ParameterError):
        CostDistribution.fixed(1.0).ppf(0.5)


@pytest.mark.parametrize("kw", [{"iterations": 0}, {"workers": 0}, {"seed": -1}, {"exploration_value": "other"}])
def test_sim_config_validation(kw):
    with pytest.raises(ParameterError):
        SimConfig(**kw)


def test_negative_grid_value_rejected(baseline):
    with pytest.raises(ParameterError):
        mc.simulate_point(SimConfig(baseline, iterations=100), -1.0)


def test_deadweight_share_matches_hand_tally(baseline):
    cfg = SimConfig(baseline, iterations=20_000, seed=1, cost_distribution=CostDistribution.exponential(2.0))
    r = mc.simulate_point(cfg, 10.0)
    E = 1.0
    expected = r.exploration_rate * 0.9 * E / (baseline.mu0 + r.exploration_rate * 0.9 * r.mean_realized_ov)
    assert mc.deadweight_share(r, baseline, E) == pytest.approx(expected, rel=1e-14)


def test_deadweight_share_rises_with_volatility_under_wide_cost_spread(baseline):
    cfg = SimConfig(baseline, iterations=100_000, seed=2, cost_distribution=CostDistribution.exponential(10.0))
    rows = mc.welfare_sweep(cfg, 1.0, [5.0, 10.0, 15.0, 20.0])
    shares = [r.deadweight_share for r in rows]
    assert shares == sorted(shares)
    assert all(r.suggested_tax == pytest.approx(0.9) for r in rows)


def test_deadweight_share_falls_once_everyone_explores(baseline):
    # with a point-mass cost the rate saturates at 1 and the growing realized
    # option value in the denominator pulls the share back down
    rows = mc.welfare_sweep(SimConfig(baseline, iterations=20_000, seed=2), 1.0, [5.0, 10.0, 20.0])
    shares = [r.deadweight_share for r in rows]
    assert shares[0] == 0.0
    assert shares[1] > shares[2] > 0.0


def test_zero_externality_gives_zero_share(baseline):
    rows = mc.welfare_sweep(SimConfig(baseline, iterations=5_000), 0.0, [10.0])
    assert rows[0].deadweight_share == 0.0
