"""Command-line entry point.

Configuration is layered: built-in defaults, then a YAML file (``--config``),
then ``--set dotted.key=value`` overrides, then dedicated flags. Unknown keys
are rejected with the list of valid ones.

Exit codes: 0 success, 2 bad input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict

import numpy as np
import yaml

from . import bandit, collective, core, dynamics, estimation, info_design, montecarlo, signaling, welfare
from .errors import CatalyticError, NumericalError

SCHEMA_VERSION = montecarlo.SCHEMA_VERSION
SEED_ENV = "CATALYTIC_SEED"

DEFAULTS = {
    "model": {"mu0": 10.0, "mu1": 5.0, "sigma_eps": 10.0, "sigma_theta": 1.0, "cost": 1.0, "delta": 0.9},
    "costs": {"kind": "fixed", "mean": 2.0, "mu": 0.0, "sigma": 1.0},
    "sim": {
        "iterations": 10_000,
        "seed": 0,
        "workers": 0,
        "grid": [1.0, 5.0, 10.0, 15.0, 20.0],
        "exploration_value": "total",
    },
    "value": {"gamma": None, "dof": None},
    "signal": {
        "theta_low": 3.0,
        "theta_high": 7.0,
        "prior_high": 0.5,
        "reward": 10.0,
        "cost_shape": "linear",
        "reward_on_choice": True,
        "lower": 0.0,
        "upper": 9.0,
        "sweep_grid": [2.0, 4.0, 6.0, 7.0, 8.0, 8.5, 9.0, 10.0, 12.0, 15.0],
    },
    "info": {
        "kappa_eta": 0.5,
        "kappa_xi": 0.5,
        "externality": 0.0,
        "cost_density_mass": 0.0,
        "budget": None,
        "restarts": 5,
    },
    "policy": {"inspection_cost": 1.0, "spillover": 0.0, "explorer_mass": 0.5, "welfare_grid": None},
    "dynamics": {
        "arrival_rate": 1.0,
        "discount_rate": 0.05,
        "gap": None,
        "sigma0": 10.0,
        "signal_noise": 10.0,
        "beta": 1.0,
        "discount": 0.9,
        "horizon": 30,
        "arms": [
            {"mean_reward": 0.0, "posterior_mean": 0.0, "posterior_sd": 0.0, "reward_noise": 1.0},
            {"mean_reward": -1.0, "posterior_mean": -1.0, "posterior_sd": 1.0, "reward_noise": 1.0, "benchmark_noise": 2.0},
        ],
        "status_quo_sigma": 10.0,
    },
    "network": {"n_agents": 10, "density": 0.5, "spillover_gain": 1.0, "private_mean": -1.0, "private_sd": 1.0, "weights": None},
    "cascade": {
        "prior_high": 0.5,
        "signal_accuracy": 0.7,
        "theta_low": 3.0,
        "theta_high": 7.0,
        "n_agents": 20,
        "true_type": "low",
        "externality": 0.0,
    },
    "estimate": {
        "p_explore": None,
        "p_switch": None,
        "sigma_theta_known": 1.0,
        "switch_variant": "combined",
        "value_variant": "catalytic",
        "input": None,
        "bootstrap": 0,
        "n_obs": 10_000,
    },
    "output": {"path": None, "format": "json"},
}


class ConfigError(CatalyticError, ValueError):
    pass


def valid_keys(tree=DEFAULTS, prefix=""):
    out = []
    for k, v in tree.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.extend(valid_keys(v, key + "."))
        else:
            out.append(key)
    return sorted(out)


def _set(cfg: dict, dotted: str, value):
    parts = dotted.split(".")
    node = cfg
    for part in parts[:-1]:
        if part not in node or not isinstance(node[part], dict):
            raise ConfigError(f"unknown config key {dotted!r}; valid keys: {', '.join(valid_keys())}")
        node = node[part]
    if parts[-1] not in node or isinstance(node[parts[-1]], dict):
        raise ConfigError(f"unknown config key {dotted!r}; valid keys: {', '.join(valid_keys())}")
    node[parts[-1]] = value


def _merge(cfg: dict, overlay: dict, prefix=""):
    if not isinstance(overlay, dict):
        raise ConfigError("config file must hold a mapping")
    for k, v in overlay.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict) and isinstance(cfg.get(k), dict):
            _merge(cfg[k], v, key + ".")
        else:
            if k not in cfg or isinstance(cfg[k], dict):
                raise ConfigError(f"unknown config key {key!r}; valid keys: {', '.join(valid_keys())}")
            cfg[k] = v


def build_config(args) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    env_seed = os.environ.get(SEED_ENV)
    if env_seed is not None:
        try:
            cfg["sim"]["seed"] = int(env_seed)
        except ValueError:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {env_seed!r}")
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = yaml.safe_load(fh) or {}
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        except yaml.YAMLError as exc:
            raise ConfigError(f"config file is not valid YAML: {exc}")
        _merge(cfg, loaded)
    for item in getattr(args, "set", None) or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        _set(cfg, key.strip(), yaml.safe_load(raw))
    for dest, key in FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            _set(cfg, key, value)
    return cfg


# flag destination -> dotted config key
FLAG_KEYS = {
    "mu0": "model.mu0",
    "mu1": "model.mu1",
    "sigma_eps": "model.sigma_eps",
    "sigma_theta": "model.sigma_theta",
    "cost": "model.cost",
    "delta": "model.delta",
    "seed": "sim.seed",
    "iters": "sim.iterations",
    "workers": "sim.workers",
    "grid": "sim.grid",
    "cost_dist": "costs.kind",
    "cost_mean": "costs.mean",
    "gamma": "value.gamma",
    "dof": "value.dof",
    "delta_gap": "dynamics.gap",
    "kappa_eta": "info.kappa_eta",
    "kappa_xi": "info.kappa_xi",
    "externality": "info.externality",
    "p_explore": "estimate.p_explore",
    "p_switch": "estimate.p_switch",
    "input": "estimate.input",
    "bootstrap": "estimate.bootstrap",
    "output": "output.path",
    "format": "output.format",
}


def _grid(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be comma-separated numbers, got {text!r}")


# ---------------------------------------------------------------------------
# builders


def _num(cfg, section, key, kind=float):
    v = cfg[section][key]
    try:
        return kind(v)
    except (TypeError, ValueError):
        raise ConfigError(f"{section}.{key} must be {kind.__name__}, got {v!r}")


def model_params(cfg) -> core.ModelParams:
    return core.ModelParams(**{k: _num(cfg, "model", k) for k in DEFAULTS["model"]})


def cost_law(cfg) -> montecarlo.CostDistribution:
    c = cfg["costs"]
    kind = c["kind"]
    if kind == "fixed":
        return montecarlo.CostDistribution.fixed(_num(cfg, "model", "cost"))
    if kind == "exponential":
        return montecarlo.CostDistribution.exponential(_num(cfg, "costs", "mean"))
    if kind == "lognormal":
        return montecarlo.CostDistribution.lognormal(_num(cfg, "costs", "mu"), _num(cfg, "costs", "sigma"))
    raise ConfigError(f"costs.kind must be fixed, exponential or lognormal, got {kind!r}")


def sim_config(cfg) -> montecarlo.SimConfig:
    workers = _num(cfg, "sim", "workers", int) or montecarlo.default_workers()
    return montecarlo.SimConfig(
        params=model_params(cfg),
        iterations=_num(cfg, "sim", "iterations", int),
        seed=_num(cfg, "sim", "seed", int),
        cost_distribution=cost_law(cfg),
        workers=workers,
        exploration_value=cfg["sim"]["exploration_value"],
    )


def binary_env(cfg) -> signaling.BinarySignalEnv:
    s = cfg["signal"]
    return signaling.BinarySignalEnv(
        base=model_params(cfg),
        theta_low=_num(cfg, "signal", "theta_low"),
        theta_high=_num(cfg, "signal", "theta_high"),
        prior_high=_num(cfg, "signal", "prior_high"),
        reward=_num(cfg, "signal", "reward"),
        cost_shape=signaling.SignalingCost.parse(str(s["cost_shape"])),
        reward_on_choice=bool(s["reward_on_choice"]),
    )


# ---------------------------------------------------------------------------
# output


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, (np.floating,)):
        x = float(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def _json_text(payload: dict) -> str:
    doc = {"schema_version": SCHEMA_VERSION}
    doc.update(payload)
    return json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n"


def _csv_text(rows: list[dict], columns=None) -> str:
    buf = io.StringIO()
    cols = list(columns or (rows[0].keys() if rows else []))
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    for r in rows:
        w.writerow({k: (repr(float(v)) if isinstance(v, float) else v) for k, v in _clean(r).items()})
    return buf.getvalue()


def emit(cfg, payload: dict, rows: list[dict] | None = None, columns=None, csv_text: str | None = None):
    fmt = cfg["output"]["format"]
    if fmt not in ("json", "csv"):
        raise ConfigError(f"output.format must be json or csv, got {fmt!r}")
    if fmt == "csv":
        if csv_text is None:
            if rows is None:
                rows = [payload]
            csv_text = _csv_text(rows, columns)
        text = csv_text
    else:
        text = _json_text(payload)
    path = cfg["output"]["path"]
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# commands


def cmd_value(args, cfg):
    p = model_params(cfg)
    b = core.decompose_option_value(p)
    out = {"params": asdict(p), "breakdown": asdict(b)}
    if p.sigma_eps > 0:
        out["derivative_sigma"] = core.catalytic_derivative_sigma(p)
        out["derivative_gap"] = core.catalytic_derivative_delta(p)
        out["asymptote"] = core.catalytic_asymptote(p)
        out["expected_match_given_stay"] = core.expected_match_given_stay(p)
        if cfg["value"]["gamma"] is not None:
            out["cara_value"] = core.cara_catalytic_value(p, core.CaraParams(_num(cfg, "value", "gamma")))
        if cfg["value"]["dof"] is not None:
            out["heavy_tail_value"] = core.heavy_tail_catalytic_value(p, _num(cfg, "value", "dof"))
    flat = {**asdict(b)}
    emit(cfg, out, rows=[flat])


def cmd_sweep(args, cfg):
    sc = sim_config(cfg)
    grid = [float(x) for x in cfg["sim"]["grid"]]
    reports = montecarlo.run_sweep(sc, grid)
    if cfg["output"]["format"] == "csv":
        emit(cfg, {}, csv_text=montecarlo.reports_to_csv(reports, sc.params))
    else:
        doc = json.loads(montecarlo.reports_to_json(reports, sc.params, sc))
        doc.pop("schema_version", None)
        emit(cfg, doc)


def cmd_signal(args, cfg):
    env = binary_env(cfg)
    if args.sweep_visq:
        rows = []
        for s in cfg["signal"]["sweep_grid"]:
            e = env.with_sigma(float(s))
            eq = signaling.solve_binary_equilibrium(e)
            rows.append(
                {
                    "sigma_eps": float(s),
                    "v_isq": eq.v_isq,
                    "threshold_visq": eq.threshold_visq,
                    "regime": eq.regime,
                    "effort_high": eq.effort_high,
                    "high_type_explored": eq.high_type_explored,
                }
            )
        emit(cfg, {"rows": rows}, rows=rows)
        return
    if args.continuous:
        s = cfg["signal"]
        cenv = signaling.ContinuousSignalEnv(
            base=model_params(cfg).with_(mu1=0.5 * (float(s["lower"]) + float(s["upper"]))),
            lower=float(s["lower"]),
            upper=float(s["upper"]),
            reward=float(s["reward"]),
            cost_shape=signaling.SignalingCost.parse(str(s["cost_shape"])),
        )
        eq = signaling.continuous_cutoff(cenv)
        emit(cfg, {"equilibrium": asdict(eq)}, rows=[asdict(eq)])
        return
    eq = signaling.solve_binary_equilibrium(env)
    acc = signaling.disruption_accounts(env)
    emit(cfg, {"equilibrium": asdict(eq), "disruption": acc}, rows=[{**asdict(eq), **acc}])


def cmd_info(args, cfg):
    p = model_params(cfg)
    ic = cfg["info"]
    costs = info_design.InfoCosts(_num(cfg, "info", "kappa_eta"), _num(cfg, "info", "kappa_xi"))
    seed = _num(cfg, "sim", "seed", int)
    choice = info_design.optimize_precision(p, costs, restarts=int(ic["restarts"]), seed=seed)
    out = {"choice": asdict(choice)}
    if args.probe:
        budget = None if ic["budget"] is None else float(ic["budget"])
        out["statics"] = asdict(info_design.complementarity_probe(p, costs, budget=budget, seed=seed))
    if float(ic["cost_density_mass"]) > 0 and not choice.corner_eta:
        v = info_design.it_paradox_check(p, costs, float(ic["externality"]), float(ic["cost_density_mass"]), seed=seed)
        out["paradox"] = asdict(v)
    emit(cfg, out, rows=[asdict(choice)])


def cmd_policy(args, cfg):
    p = model_params(cfg)
    pc = cfg["policy"]
    env = welfare.ExternalityEnv(float(pc["inspection_cost"]), float(pc["spillover"]))
    bundle = welfare.optimal_policy(p, env)
    interval = welfare.overexploration_interval(p, env)
    out = {
        "private_net_value": welfare.private_net_value(p),
        "social_net_value": welfare.social_net_value(p, env),
        "policy": asdict(bundle),
        "taxed_private_net_value": welfare.taxed_private_net_value(p, bundle),
        "overexploration_interval": None if interval is None else list(interval),
    }
    try:
        out["disclosure_tradeoff"] = welfare.disclosure_tradeoff(binary_env(cfg), env, float(pc["explorer_mass"]))
    except CatalyticError as exc:
        out["disclosure_tradeoff"] = None
        out["disclosure_note"] = str(exc)
    rows = None
    if pc["welfare_grid"]:
        table = montecarlo.welfare_sweep(sim_config(cfg), env.inspection_cost, [float(x) for x in pc["welfare_grid"]])
        rows = [asdict(r) for r in table]
        out["welfare_sweep"] = rows
    emit(cfg, out, rows=rows or [{**asdict(bundle), "social_net_value": out["social_net_value"]}])


def cmd_dynamics(args, cfg):
    p = model_params(cfg)
    d = cfg["dynamics"]
    gap = None if d["gap"] is None else float(d["gap"])
    env = dynamics.DynamicEnv(float(d["arrival_rate"]), float(d["discount_rate"]), p)
    if args.action == "threshold":
        t = dynamics.hjb_threshold(env, gap=gap)
        out = {"sigma_bar": t.sigma_bar, "approximation": t.approximation, "relative_gap": t.relative_gap}
        emit(cfg, out, rows=[out])
    elif args.action == "value":
        v = dynamics.hjb_value(env, p.sigma_eps, gap=gap)
        out = {"sigma_eps": p.sigma_eps, "value": v}
        emit(cfg, out, rows=[out])
    elif args.action == "stop":
        traj = dynamics.stopping_trajectory(dynamics.StoppingState(float(d["sigma0"]), float(d["signal_noise"])), p)
        rows = [{"round": t, "sigma": s} for t, s in enumerate(traj.path)]
        emit(cfg, {"sigma_bar": traj.sigma_bar, "stop_round": traj.stop_round, "path": list(traj.path)}, rows=rows)
    else:
        arms = [bandit.BanditArm(**a) for a in d["arms"]]
        sq = bandit.StatusQuo(float(d["status_quo_sigma"]), gap if gap is not None else p.gap)
        log = bandit.simulate_bandit(
            arms, float(d["beta"]), float(d["discount"]), int(d["horizon"]), _num(cfg, "sim", "seed", int), status_quo=sq
        )
        rows = []
        for r in log.rows():
            row = {"round": r["round"], "choice": r["choice"], "reward": r["reward"], "status_quo_sigma": r["status_quo_sigma"]}
            for i, (ix, cat) in enumerate(zip(r["indices"], r["catalytic"])):
                row[f"index_{i}"] = ix
                row[f"catalytic_{i}"] = cat
            rows.append(row)
        emit(cfg, {"rounds": rows}, rows=rows)


def random_network(cfg) -> collective.NetworkGame:
    n = cfg["network"]
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(_num(cfg, "sim", "seed", int))))
    if n["weights"] is not None:
        w = np.asarray(n["weights"], dtype=float)
        size = w.shape[0]
    else:
        size = int(n["n_agents"])
        w = rng.random((size, size)) * (rng.random((size, size)) < float(n["density"]))
        np.fill_diagonal(w, 0.0)
    private = float(n["private_mean"]) + float(n["private_sd"]) * rng.standard_normal(size)
    return collective.NetworkGame(w, private, float(n["spillover_gain"]))


def cmd_network(args, cfg):
    g = random_network(cfg)
    eq = collective.network_equilibria(g)
    out = {
        "least": list(eq.least),
        "greatest": list(eq.greatest),
        "multiple": eq.multiple,
        "rounds": list(eq.rounds),
        "private_net": g.private_net.tolist(),
    }
    rows = [{"agent": i, "least": a, "greatest": b} for i, (a, b) in enumerate(zip(eq.least, eq.greatest))]
    emit(cfg, out, rows=rows)


def cmd_cascade(args, cfg):
    c = cfg["cascade"]
    env = collective.CascadeEnv(
        float(c["prior_high"]), float(c["signal_accuracy"]), (float(c["theta_low"]), float(c["theta_high"])), model_params(cfg)
    )
    log = collective.run_cascade(env, str(c["true_type"]), int(c["n_agents"]), _num(cfg, "sim", "seed", int),
                                 externality=float(c["externality"]))
    rows = [
        {
            "agent": i + 1,
            "signal": log.signals[i],
            "public_belief": log.public_belief[i],
            "posterior": log.posterior[i],
            "action": log.actions[i],
            "in_cascade": log.in_cascade[i],
            "private_loss": log.private_loss[i],
            "externality": log.externality[i],
        }
        for i in range(len(log.actions))
    ]
    emit(cfg, {"onset": log.onset, "total_loss": log.total_loss, "agents": rows}, rows=rows)


def _read_moments(path: str, sigma_theta: float) -> estimation.Moments:
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json"):
        data = json.loads(text)
    else:
        rows = list(csv.DictReader(io.StringIO(text)))
        if not rows:
            raise ConfigError("moment file has no rows")
        data = rows[0]
    try:
        return estimation.Moments(
            float(data["p_explore"]), float(data["p_switch"]), float(data.get("sigma_theta_known", sigma_theta))
        )
    except KeyError as exc:
        raise ConfigError(f"moment file lacks column {exc}")


def cmd_estimate(args, cfg):
    e = cfg["estimate"]
    if e["input"]:
        m = _read_moments(str(e["input"]), float(e["sigma_theta_known"]))
    else:
        if e["p_explore"] is None or e["p_switch"] is None:
            raise ConfigError("estimate needs --p-explore and --p-switch or --input")
        m = estimation.Moments(float(e["p_explore"]), float(e["p_switch"]), float(e["sigma_theta_known"]))
    law = cost_law(cfg)
    p = model_params(cfg)
    kw = {"switch_variant": e["switch_variant"], "value_variant": e["value_variant"]}
    r = estimation.invert_moments(m, law, p.delta, **kw)
    out = {"moments": asdict(m), "result": asdict(r)}
    if int(e["bootstrap"]) > 0:
        samples = estimation.resample_moments(m, int(e["n_obs"]), int(e["bootstrap"]), _num(cfg, "sim", "seed", int))
        out["bootstrap"] = asdict(estimation.bootstrap_se(samples, law, p.delta, **kw))
    emit(cfg, out, rows=[{"sigma_eps_hat": r.sigma_eps_hat, "delta_hat": r.delta_hat, "v_isq_hat": r.v_isq_hat}])


# ---------------------------------------------------------------------------
# parser


def _common(sp, model=True):
    sp.add_argument("--config", help="YAML config file")
    sp.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a dotted config key")
    sp.add_argument("--output", help="write to this file instead of stdout")
    sp.add_argument("--format", choices=("json", "csv"))
    sp.add_argument("--seed", type=int)
    if model:
        sp.add_argument("--mu0", type=float)
        sp.add_argument("--mu1", type=float)
        sp.add_argument("--sigma-eps", type=float)
        sp.add_argument("--sigma-theta", type=float)
        sp.add_argument("--cost", type=float)
        sp.add_argument("--delta", type=float, help="discount factor")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="catalytic", description="Catalytic exploration toolkit")
    sub = ap.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("value", help="option-value breakdown")
    _common(sp)
    sp.add_argument("--gamma", type=float, help="CARA risk aversion")
    sp.add_argument("--dof", type=float, help="Student-t degrees of freedom")
    sp.set_defaults(func=cmd_value)

    sp = sub.add_parser("sweep", help="Monte Carlo sweep over status-quo volatility")
    _common(sp)
    sp.add_argument("--grid", type=_grid)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--workers", type=int)
    sp.add_argument("--cost-dist", choices=("fixed", "exponential", "lognormal"))
    sp.add_argument("--cost-mean", type=float)
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("signal", help="signaling equilibrium")
    _common(sp)
    sp.add_argument("--sweep-visq", action="store_true", help="emit regime and effort along a volatility grid")
    sp.add_argument("--continuous", action="store_true", help="continuum-of-types cutoff")
    sp.set_defaults(func=cmd_signal)

    sp = sub.add_parser("info", help="optimal signal precision")
    _common(sp)
    sp.add_argument("--kappa-eta", type=float)
    sp.add_argument("--kappa-xi", type=float)
    sp.add_argument("--externality", type=float)
    sp.add_argument("--probe", action="store_true", help="comparative statics")
    sp.set_defaults(func=cmd_info)

    sp = sub.add_parser("policy", help="externality-adjusted policy")
    _common(sp)
    sp.add_argument("--iters", type=int)
    sp.add_argument("--workers", type=int)
    sp.set_defaults(func=cmd_policy)

    sp = sub.add_parser("dynamics", help="stationary policy, stopping rule and bandit play")
    _common(sp)
    sp.add_argument("action", choices=("threshold", "value", "stop", "bandit"))
    sp.add_argument("--delta-gap", type=float, help="quality gap override (may be 0)")
    sp.set_defaults(func=cmd_dynamics)

    sp = sub.add_parser("network", help="extremal equilibria of the exploration network game")
    _common(sp)
    sp.set_defaults(func=cmd_network)

    sp = sub.add_parser("cascade", help="sequential herding simulation")
    _common(sp)
    sp.set_defaults(func=cmd_cascade)

    sp = sub.add_parser("estimate", help="invert exploration and switching rates")
    _common(sp)
    sp.add_argument("--p-explore", type=float)
    sp.add_argument("--p-switch", type=float)
    sp.add_argument("--input", help="CSV or JSON file with p_explore and p_switch")
    sp.add_argument("--bootstrap", type=int, help="number of parametric resamples")
    sp.add_argument("--cost-dist", choices=("fixed", "exponential", "lognormal"))
    sp.add_argument("--cost-mean", type=float)
    sp.set_defaults(func=cmd_estimate)
    return ap


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
        args.func(args, cfg)
    except NumericalError as exc:
        detail = json.dumps(_clean(exc.diagnostics), sort_keys=True) if exc.diagnostics else ""
        print(f"error: numerical failure: {exc} {detail}".rstrip(), file=sys.stderr)
        return 3
    except (CatalyticError, ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
