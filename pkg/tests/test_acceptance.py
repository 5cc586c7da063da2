"""Acceptance suite: one check per criterion, each printing a PASS/FAIL line.

Run directly (``python tests/test_acceptance.py``) for the plain report, or
through pytest, where the same lines appear in the terminal summary.
"""

import math
import sys
import time

import numpy as np
import pytest

from catalytic import bandit as bd
from catalytic import cli, collective as co, core, dynamics as dy, estimation as est
from catalytic import info_design as inf, montecarlo as mc, signaling as sg, welfare as wf
from catalytic.core import CaraParams, ModelParams
from catalytic.montecarlo import CostDistribution, SimConfig

RESULTS = []
BASE = ModelParams()
GRID = (1.0, 5.0, 10.0, 15.0, 20.0)


def check(cid, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {cid}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# 1 -------------------------------------------------------------------------


def test_1a_monte_carlo_agrees_with_closed_form():
    t0 = time.perf_counter()
    worst = 0.0
    for s in GRID:
        m, se = mc.estimate_catalytic_mc(SimConfig(BASE.with_(sigma_eps=s), iterations=10_000_000, seed=2024, workers=4))
        z = abs(m - core.catalytic_closed_form(5.0, s)) / se
        worst = max(worst, z)
    elapsed = time.perf_counter() - t0
    check("1a", worst < 3.0, f"10^7-draw MC within {worst:.2f} SE of the closed form (need < 3)")
    check("1c", elapsed < 30.0, f"MC runtime {elapsed:.1f}s (need < 30s)")


def test_1b_closed_form_table():
    stated = (0.0000, 0.4166, 1.9780, 3.8418, 5.7269)
    got = [core.catalytic_closed_form(5.0, s) for s in GRID]
    bad = [(s, round(g, 5), v) for s, g, v in zip(GRID, got, stated) if abs(g - v) > 5e-5]
    check("1b", not bad, f"closed form vs stated values to 4 dp; mismatches {bad}")


# 2 -------------------------------------------------------------------------


def test_2a_switching_column():
    table = (0.001, 0.161, 0.312, 0.371, 0.402)
    reports = mc.run_sweep(SimConfig(BASE, iterations=10_000, seed=42), GRID)
    dev = max(abs(r.switching_rate - t) for r, t in zip(reports, table))
    check("2a", dev <= 0.015, f"max switching-rate deviation {dev:.4f} (need <= 0.015)")


def test_2b_substitute_checks():
    reports = mc.run_sweep(SimConfig(BASE, iterations=10_000, seed=42), np.linspace(1, 40, 40))
    rates = [r.exploration_rate for r in reports]
    vals = [core.catalytic_closed_form(5.0, s) for s in np.linspace(0.1, 100, 400)]
    ok = set(rates) <= {0.0, 1.0} and rates == sorted(rates) and rates[-1] == 1.0 and vals == sorted(vals)
    check("2b", ok, "exploration rate 0/1, monotone and saturating; closed-form value monotone")


# 3 -------------------------------------------------------------------------


def test_3a_gradients():
    worst = 0.0
    for s in np.linspace(1.0, 40.0, 20):
        p = BASE.with_(sigma_eps=float(s))
        h = 1e-5 * s
        fd_s = (core.catalytic_closed_form(5, s + h) - core.catalytic_closed_form(5, s - h)) / (2 * h)
        fd_d = (core.catalytic_closed_form(5 + 1e-5, s) - core.catalytic_closed_form(5 - 1e-5, s)) / 2e-5
        worst = max(worst, abs(core.catalytic_derivative_sigma(p) / fd_s - 1), abs(core.catalytic_derivative_delta(p) / fd_d - 1))
    check("3a", worst < 1e-6, f"analytic vs central differences, max relative error {worst:.2e}")


def test_3b_slope_bound():
    peak = max(core.catalytic_derivative_sigma(BASE.with_(sigma_eps=float(s))) for s in np.geomspace(0.01, 1e6, 2000))
    check("3b", peak <= core.INV_SQRT_2PI, f"max slope {peak:.6f} <= {core.INV_SQRT_2PI:.6f}")


def test_3c_asymptotic_ratio():
    ratio = core.catalytic_closed_form(5.0, 500.0) / 500.0
    rel = abs(ratio / 0.39894 - 1)
    check("3c", rel < 0.01, f"value/sigma at sigma/gap=100 is {ratio:.5f}, {100 * rel:.2f}% from 0.39894 (need < 1%)")


# 4 -------------------------------------------------------------------------


def test_4_decoupling():
    probs = [core.switch_probability(5.0, s, 1.0) for s in np.geomspace(1e-3, 1e12, 500)]
    at = core.switch_probability(5.0, 1e4, 1.0)
    check("4", max(probs) < 0.5 and at > 0.45, f"max switch prob {max(probs):.9f} < 0.5; at 1e4 {at:.5f} > 0.45")


# 5 -------------------------------------------------------------------------


def test_5a_collapse():
    env = sg.BinarySignalEnv()
    bar = sg.collapse_threshold(env)
    eqs = [(s, sg.solve_binary_equilibrium(env.with_sigma(s))) for s in np.linspace(2.0, 15.0, 131)]
    flips = [(a, b) for a, b in zip(eqs, eqs[1:]) if a[1].regime != b[1].regime]
    ok = (
        abs(bar - 1.66028) < 5e-6
        and len(flips) == 1
        and flips[0][0][1].regime == "separating"
        and flips[0][1][1].regime == "pooling"
        and flips[0][0][1].effort_high > 0
        and all(e.effort_high == 0 for _, e in eqs if e.regime == "pooling")
        and flips[0][0][1].v_isq < flips[0][0][1].threshold_visq <= flips[0][1][1].v_isq + 1e-3
    )
    check("5a", ok, f"threshold {bar:.5f}; one separating->pooling flip near sigma {flips[0][1][0]:.1f}, effort to 0")


def test_5b_low_type_indifference():
    env = sg.BinarySignalEnv()
    worst = 0.0
    for s in np.linspace(2.0, 8.9, 40):
        e = env.with_sigma(float(s))
        eq = sg.solve_binary_equilibrium(e)
        if eq.regime == "separating":
            gain = e.reward * sg.selection_probability(e.params, e.theta_low)
            worst = max(worst, abs(gain - e.psi(eq.effort_high, e.theta_low)))
    check("5b", worst < 1e-10, f"low-type incentive slack {worst:.1e}")


# 6 -------------------------------------------------------------------------


def test_6_continuous_cutoff():
    env = sg.ContinuousSignalEnv()
    cut = sg.continuous_cutoff(env, xtol=1e-8).cutoff_type
    check("6a", abs(cut - 1.56) < 5e-3, f"cutoff {cut:.5f} ~ 1.56")
    cuts = [sg.continuous_cutoff(env.with_sigma(s), xtol=1e-8).cutoff_type for s in (8.0, 10.0, 12.0)]
    check("6b", cuts[0] > cuts[1] > cuts[2], f"cutoffs at sigma 8/10/12: {[round(c, 4) for c in cuts]}")


# 7 -------------------------------------------------------------------------

WIDE = ModelParams(sigma_eps=20.0, sigma_theta=3.0, cost=0.0)
COSTS = inf.InfoCosts(0.5, 0.5)


def test_7_asymmetric_attention():
    choices = [inf.optimize_precision(WIDE.with_(mu1=10.0 - g), COSTS) for g in (1.0, 5.0, 10.0, 50.0)]
    ratios = [c.tau_xi / c.tau_eta for c in choices]
    check("7a", ratios == sorted(ratios), f"tau_xi/tau_eta along gap 1,5,10,50: {[f'{r:.4g}' for r in ratios]}")
    last = choices[-1]
    check("7b", last.corner_xi and not last.corner_eta, f"gap 50: tau_xi={last.tau_xi:.3g} (sentinel), tau_eta={last.tau_eta:.4f}")
    worst = 0.0
    for c, g in zip(choices, (1.0, 5.0, 10.0, 50.0)):
        best, *_ = inf.grid_search(WIDE.with_(mu1=10.0 - g), COSTS, 1e-2, 1e4, 200)
        worst = max(worst, best - c.net_value)
    check("7c", worst <= 1e-9, f"optimizer minus 200x200 grid best, worst shortfall {worst:.1e}")


# 8 -------------------------------------------------------------------------


def test_8_policy_exactness():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(8)))
    worst = 0.0
    for _ in range(100):
        mu0 = rng.uniform(0, 20)
        p = ModelParams(mu0, mu0 - rng.uniform(0.1, 15), rng.uniform(0.5, 30), rng.uniform(0.1, 10), rng.uniform(0, 3), rng.uniform(0.5, 1))
        env = wf.ExternalityEnv(rng.uniform(0, 3), rng.uniform(0, 3))
        b = wf.optimal_policy(p, env)
        worst = max(worst, abs(wf.private_cost_threshold(p, b) - wf.social_cost_threshold(p, env)))
    check("8", worst < 1e-12, f"private vs social thresholds under the bundle, max gap {worst:.1e}")


# 9 -------------------------------------------------------------------------


def test_9_dynamics():
    traj = dy.stopping_trajectory(dy.StoppingState(10.0, 10.0), BASE)
    err = max(abs(s - 10.0 / math.sqrt(t + 1)) for t, s in enumerate(traj.path))
    check("9a", err < 1e-12, f"stopping path vs 10/sqrt(t+1), max error {err:.1e}; stop round {traj.stop_round}")
    check("9b", abs(traj.sigma_bar - 2.78514) < 5e-6, f"stopping bar {traj.sigma_bar:.6f}")
    env = dy.DynamicEnv(base=BASE)
    hj = dy.hjb_threshold(env).sigma_bar
    h0 = dy.hjb_threshold(env, gap=0.0).sigma_bar
    check("9c", abs(hj - 7.08) < 5e-3 and h0 == math.sqrt(2 * math.pi), f"HJB threshold {hj:.5f}; gap 0 gives {h0!r}")


# 10 ------------------------------------------------------------------------


def test_10_bandit():
    arms = [bd.BanditArm(0.2, catalytic_info=2.0), bd.BanditArm(0.0, posterior_sd=2.0), bd.BanditArm(-0.5, catalytic_info=5.0)]
    log = bd.simulate_bandit(arms, 0.0, 0.9, 25, seed=10)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(10)))
    cur, picks = list(arms), []
    for _ in range(25):
        k = int(np.argmax([bd.standard_gittins_index(a, 0.9) for a in cur]))
        cur[k] = cur[k].updated(float(cur[k].mean_reward + cur[k].reward_noise * rng.standard_normal()))
        picks.append(k)
    check("10a", log.choices == picks, "beta=0 play identical to standard-index play on a shared seed")
    safe = bd.BanditArm(0.0, posterior_sd=0.0)
    inferior = bd.BanditArm(-1.0, posterior_mean=-1.0, posterior_sd=0.5, catalytic_info=0.8)
    beta_star = (bd.standard_gittins_index(safe, 0.9) - bd.standard_gittins_index(inferior, 0.9)) / 0.8
    betas = np.linspace(0, 2 * beta_star, 201)
    first = [bd.simulate_bandit([safe, inferior], b, 0.9, 1, seed=0).choices[0] for b in betas]
    flip = betas[first.index(1)]
    step = betas[1] - betas[0]
    check("10b", abs(flip - beta_star) <= step, f"flip at beta {flip:.4f}, predicted {beta_star:.4f} (step {step:.4f})")


# 11 ------------------------------------------------------------------------


def test_11_network():
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(11)))
    t0 = time.perf_counter()
    ok = True
    multi = 0
    for _ in range(50):
        w = rng.random((10, 10)) * (rng.random((10, 10)) < 0.4)
        np.fill_diagonal(w, 0.0)
        g = co.NetworkGame(w, rng.normal(-1.0, 1.0, 10), float(rng.uniform(0.5, 2.0)))
        eq = co.network_equilibria(g)
        nash = np.array(co.enumerate_nash(g))
        ok &= tuple(nash.min(axis=0)) == eq.least and tuple(nash.max(axis=0)) == eq.greatest
        multi += eq.multiple
    elapsed = time.perf_counter() - t0
    check("11", ok and elapsed < 10, f"50 games, extremes match enumeration ({multi} with multiplicity), {elapsed:.1f}s")


# 12 ------------------------------------------------------------------------

CASCADE_TYPES = (3.0, 14.0)
CASCADE_COSTS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0)


def _classical_onset(signals, threshold, prior=0.5, q=0.7):
    odds0, lr, d = prior / (1 - prior), q / (1 - q), 0
    for i, s in enumerate(signals):
        post = lambda k: odds0 * lr**k / (1 + odds0 * lr**k)
        if (post(d + 1) >= threshold) == (post(d - 1) >= threshold):
            return i + 1
        d += 1 if s else -1
    return None


def test_12a_classical_reduction():
    ok = True
    for c in (1.5, 2.0, 2.5):
        env = co.CascadeEnv(0.5, 0.7, CASCADE_TYPES, ModelParams(sigma_eps=0.0, cost=c))
        for seed in range(20):
            log = co.run_cascade(env, "low", 30, seed)
            ok &= log.onset == _classical_onset(co.draw_signals(env, "low", 30, seed), c / (0.9 * 4.0))
    check("12a", ok, "zero catalytic value: onset equals a hand-rolled classical cascade on 60 shared seeds")


def _onset_sweep(attr):
    bad = []
    for c in CASCADE_COSTS:
        for tt in ("low", "high"):
            for seed in range(40):
                seq = []
                for s in np.linspace(0, 12, 25):
                    env = co.CascadeEnv(0.5, 0.7, CASCADE_TYPES, ModelParams(sigma_eps=float(s), cost=c))
                    o = getattr(co.run_cascade(env, tt, 40, seed), attr)
                    seq.append(math.inf if o is None else o)
                if any(b > a for a, b in zip(seq, seq[1:])):
                    bad.append((c, tt, seed))
    return bad


def test_12b_onset_monotone():
    bad = _onset_sweep("onset")
    detail = f"first-herd onset non-increasing in sigma on {len(CASCADE_COSTS) * 80} runs; violations {len(bad)}"
    check("12b", not bad, detail + (f", e.g. cost/type/seed {bad[0]}" if bad else ""))


def test_12c_exploration_onset_monotone():
    bad = _onset_sweep("explore_onset")
    check("12c", not bad, f"exploration-herd onset non-increasing in sigma on {len(CASCADE_COSTS) * 80} runs; violations {len(bad)}")


# 13 ------------------------------------------------------------------------


def test_13_round_trip():
    law = CostDistribution.exponential(2.0)
    rep = mc.simulate_point(SimConfig(BASE, iterations=1_000_000, seed=13, cost_distribution=law, exploration_value="catalytic"), 10.0)
    r = est.invert_moments(est.Moments(rep.exploration_rate, rep.switching_rate), law, 0.9)
    es, ed, ev = abs(r.sigma_eps_hat / 10 - 1), abs(r.delta_hat / 5 - 1), abs(r.v_isq_hat / 1.978 - 1)
    check("13", es <= 0.02 and ed <= 0.02 and ev <= 0.03,
          f"sigma {r.sigma_eps_hat:.4f} ({100 * es:.2f}%), gap {r.delta_hat:.4f} ({100 * ed:.2f}%), value {r.v_isq_hat:.4f} ({100 * ev:.2f}%)")


# 14 ------------------------------------------------------------------------


def test_14a_cara_level():
    v = core.cara_catalytic_value(BASE, CaraParams(0.01))
    check("14a", abs(v - 2.2078) <= 1e-3 and v > 1.97796, f"CARA value at gamma 0.01 is {v:.6f}")


def test_14b_cara_limit():
    v = core.cara_catalytic_value(BASE, CaraParams(1e-4))
    gap = abs(v - core.catalytic_value(BASE))
    check("14b", gap <= 1e-3, f"gamma 1e-4 gives {v:.6f}, {gap:.2e} from the risk-neutral value (need <= 1e-3)")


# 15 ------------------------------------------------------------------------


def test_15a_heavy_tail_exceeds_normal():
    t5 = core.heavy_tail_catalytic_value(BASE, 5.0)
    n = core.catalytic_value(BASE)
    check("15a", t5 > n, f"scaled-t(5) value {t5:.5f} vs normal {n:.5f}")


def test_15b_heavy_tail_limit():
    t = core.heavy_tail_catalytic_value(BASE, 1e4)
    check("15b", abs(t - core.catalytic_value(BASE)) <= 1e-3, f"dof 1e4 gives {t:.6f}")


# 16 ------------------------------------------------------------------------

SEEDED = [
    ["sweep", "--iters", "140000", "--cost-dist", "lognormal", "--format", "csv"],
    ["sweep", "--iters", "140000", "--cost-dist", "exponential"],
    ["policy", "--set", "policy.welfare_grid=[5,10,20]", "--set", "costs.kind=exponential", "--iters", "140000"],
    ["dynamics", "bandit", "--set", "dynamics.horizon=10", "--format", "csv"],
    ["network", "--format", "csv"],
    ["cascade"],
    ["estimate", "--p-explore", "0.59", "--p-switch", "0.31", "--cost-dist", "exponential", "--bootstrap", "100"],
    ["info", "--sigma-eps", "20", "--sigma-theta", "3"],
]


def test_16_determinism(tmp_path):
    ok = True
    for k, argv in enumerate(SEEDED):
        outs = []
        for run, workers in enumerate((1, 4, 4)):
            path = tmp_path / f"{k}_{run}.out"
            extra = ["--workers", str(workers)] if argv[0] in ("sweep", "policy") else []
            assert cli.main(argv + extra + ["--seed", "16", "--output", str(path)]) == 0
            outs.append(path.read_bytes())
        ok &= outs[0] == outs[1] == outs[2]
    check("16", ok, f"{len(SEEDED)} seeded commands byte-identical across two runs and workers 1/4")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
