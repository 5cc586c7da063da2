"""Seeded Monte Carlo engine for the two-stage exploration decision.

Every grid point is simulated in fixed-size blocks. Block ``b`` of grid point
``g`` draws from its own Philox stream keyed by ``(seed, g, b)``, and block
summaries are merged in block order, so the report depends only on the seed
and the configuration, never on how many workers ran the blocks.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import core
from .core import ModelParams
from .errors import ParameterError

SCHEMA_VERSION = "1.0"
BLOCK_SIZE = 1 << 16

CSV_COLUMNS = (
    "sigma_eps",
    "exploration_rate",
    "switching_rate",
    "v_isq_closed_form",
    "v_isq_mc",
    "se_exploration_rate",
    "se_switching_rate",
    "se_v_isq_mc",
    "mean_realized_ov",
    "se_mean_realized_ov",
    "ov_closed_form",
    "v_ic_closed_form",
    "cost_threshold",
    "switch_prob_closed_form",
)


@dataclass(frozen=True)
class CostDistribution:
    """Exploration-cost law: ``fixed(c)``, ``exponential(mean)`` or ``lognormal(mu, sigma)``."""

    kind: str = "fixed"
    a: float = 1.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("fixed", "exponential", "lognormal"):
            raise ParameterError(f"unknown cost distribution {self.kind!r}")
        if not math.isfinite(self.a) or not math.isfinite(self.b):
            raise ParameterError("cost distribution parameters must be finite")
        if self.kind == "fixed" and self.a < 0:
            raise ParameterError(f"fixed cost must be >= 0, got {self.a}")
        if self.kind == "exponential" and self.a <= 0:
            raise ParameterError(f"exponential mean must be > 0, got {self.a}")
        if self.kind == "lognormal" and self.b <= 0:
            raise ParameterError(f"lognormal sigma must be > 0, got {self.b}")

    @classmethod
    def fixed(cls, c: float) -> "CostDistribution":
        return cls("fixed", float(c))

    @classmethod
    def exponential(cls, mean: float) -> "CostDistribution":
        return cls("exponential", float(mean))

    @classmethod
    def lognormal(cls, mu: float, sigma: float) -> "CostDistribution":
        return cls("lognormal", float(mu), float(sigma))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        if self.kind == "fixed":
            return np.full(n, self.a)
        if self.kind == "exponential":
            return rng.exponential(self.a, n)
        return rng.lognormal(self.a, self.b, n)

    def cdf(self, x: float) -> float:
        if self.kind == "fixed":
            return 1.0 if x >= self.a else 0.0
        if self.kind == "exponential":
            return float(stats.expon.cdf(x, scale=self.a))
        return float(stats.lognorm.cdf(x, self.b, scale=math.exp(self.a)))

    def ppf(self, q: float) -> float:
        if self.kind == "fixed":
            raise ParameterError("a point-mass cost law has no usable inverse CDF")
        if self.kind == "exponential":
            return float(stats.expon.ppf(q, scale=self.a))
        return float(stats.lognorm.ppf(q, self.b, scale=math.exp(self.a)))

    def describe(self) -> dict:
        if self.kind == "fixed":
            return {"kind": "fixed", "c": self.a}
        if self.kind == "exponential":
            return {"kind": "exponential", "mean": self.a}
        return {"kind": "lognormal", "mu": self.a, "sigma": self.b}


@dataclass(frozen=True)
class SimConfig:
    params: ModelParams = field(default_factory=ModelParams)
    iterations: int = 10_000
    seed: int = 0
    cost_distribution: CostDistribution | None = None
    workers: int = 1
    # which option value enters the exploration rule: "total" or "catalytic"
    exploration_value: str = "total"

    def __post_init__(self):
        if int(self.iterations) < 1:
            raise ParameterError(f"iterations must be >= 1, got {self.iterations}")
        if not 0 <= int(self.seed) < 2**64:
            raise ParameterError("seed must be a 64-bit unsigned integer")
        if int(self.workers) < 1:
            raise ParameterError(f"workers must be >= 1, got {self.workers}")
        if self.exploration_value not in ("total", "catalytic"):
            raise ParameterError("exploration_value must be 'total' or 'catalytic'")

    @property
    def costs(self) -> CostDistribution:
        if self.cost_distribution is None:
            return CostDistribution.fixed(self.params.cost)
        return self.cost_distribution


@dataclass(frozen=True)
class SimulationReport:
    sigma_eps: float
    exploration_rate: float
    switching_rate: float
    joint_switch_rate: float
    mean_realized_ov: float
    catalytic_estimate: float
    v_isq_closed_form: float
    ov_closed_form: float
    standard_errors: dict
    seed: int
    iterations: int

    def to_row(self, p: ModelParams) -> dict:
        q = p.with_(sigma_eps=self.sigma_eps)
        b = core.decompose_option_value(q)
        return {
            "sigma_eps": self.sigma_eps,
            "exploration_rate": self.exploration_rate,
            "switching_rate": self.switching_rate,
            "v_isq_closed_form": b.v_isq,
            "v_isq_mc": self.catalytic_estimate,
            "se_exploration_rate": self.standard_errors["exploration_rate"],
            "se_switching_rate": self.standard_errors["switching_rate"],
            "se_v_isq_mc": self.standard_errors["catalytic_estimate"],
            "mean_realized_ov": self.mean_realized_ov,
            "se_mean_realized_ov": self.standard_errors["mean_realized_ov"],
            "ov_closed_form": b.total,
            "v_ic_closed_form": b.v_ic,
            "cost_threshold": p.cost / p.delta,
            "switch_prob_closed_form": b.switch_prob,
        }


# ---------------------------------------------------------------------------
# block machinery


def _block_rng(seed: int, grid_index: int, block: int) -> np.random.Generator:
    ss = np.random.SeedSequence(int(seed), spawn_key=(int(grid_index), int(block)))
    return np.random.Generator(np.random.Philox(ss))


def _block_sizes(iterations: int) -> list[int]:
    full, rest = divmod(int(iterations), BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _draw_block(config: SimConfig, sigma_eps: float, grid_index: int, block: int, n: int) -> dict:
    """Per-draw arrays for one block; exposed so tests can re-account draw by draw."""
    p = config.params
    rng = _block_rng(config.seed, grid_index, block)
    eps = sigma_eps * rng.standard_normal(n)
    theta = p.mu1 + p.sigma_theta * rng.standard_normal(n)
    cost = config.costs.sample(rng, n)
    q = p.with_(sigma_eps=sigma_eps)
    value = core.total_option_value(q) if config.exploration_value == "total" else core.catalytic_value(q)
    explore = p.delta * value >= cost
    switch = theta > p.mu0 + eps
    return {
        "eps": eps,
        "theta": theta,
        "cost": cost,
        "explore": explore,
        "switch": switch,
        "realized_gain": np.maximum(eps, theta - p.mu0),
        "catalytic_gain": np.maximum(eps, -p.gap),
    }


@dataclass
class _Moments:
    n: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def of(cls, x: np.ndarray) -> "_Moments":
        if x.size == 0:
            return cls()
        m = float(x.mean())
        return cls(int(x.size), m, float(((x - m) ** 2).sum()))

    def merge(self, other: "_Moments") -> "_Moments":
        # Chan et al. pairwise update, applied in a fixed order
        if other.n == 0:
            return self
        if self.n == 0:
            return other
        n = self.n + other.n
        d = other.mean - self.mean
        return _Moments(n, self.mean + d * other.n / n, self.m2 + other.m2 + d * d * self.n * other.n / n)

    def se(self) -> float:
        if self.n < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.n - 1) / self.n)


def _summarise_block(args) -> dict:
    config, sigma_eps, grid_index, block, n = args
    d = _draw_block(config, sigma_eps, grid_index, block, n)
    return {
        "n": n,
        "explore": int(d["explore"].sum()),
        "switch": int(d["switch"].sum()),
        "joint": int((d["explore"] & d["switch"]).sum()),
        "catalytic": _Moments.of(d["catalytic_gain"]),
        "realized": _Moments.of(d["realized_gain"][d["explore"]]),
    }


def _binomial_se(k: int, n: int) -> float:
    p = k / n
    return math.sqrt(p * (1.0 - p) / n)


def _map(fn, jobs, workers):
    if workers <= 1 or len(jobs) <= 1:
        return [fn(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def simulate_point(config: SimConfig, sigma_eps: float, grid_index: int = 0) -> SimulationReport:
    if sigma_eps < 0 or not math.isfinite(sigma_eps):
        raise ParameterError(f"grid values must be finite and >= 0, got {sigma_eps}")
    jobs = [(config, float(sigma_eps), grid_index, b, n) for b, n in enumerate(_block_sizes(config.iterations))]
    parts = _map(_summarise_block, jobs, config.workers)
    n = explore = switch = joint = 0
    cat, real = _Moments(), _Moments()
    for part in parts:
        n += part["n"]
        explore += part["explore"]
        switch += part["switch"]
        joint += part["joint"]
        cat = cat.merge(part["catalytic"])
        real = real.merge(part["realized"])
    q = config.params.with_(sigma_eps=float(sigma_eps))
    return SimulationReport(
        sigma_eps=float(sigma_eps),
        exploration_rate=explore / n,
        # theta and eps are independent of the cost draw, so the switching rate
        # conditional on exploring is estimated from every draw
        switching_rate=switch / n,
        joint_switch_rate=joint / n,
        mean_realized_ov=real.mean if real.n else 0.0,
        catalytic_estimate=cat.mean,
        v_isq_closed_form=core.catalytic_value(q),
        ov_closed_form=core.total_option_value(q),
        standard_errors={
            "exploration_rate": _binomial_se(explore, n),
            "switching_rate": _binomial_se(switch, n),
            "joint_switch_rate": _binomial_se(joint, n),
            "mean_realized_ov": real.se(),
            "catalytic_estimate": cat.se(),
        },
        seed=int(config.seed),
        iterations=n,
    )


def run_sweep(config: SimConfig, sigma_grid) -> list[SimulationReport]:
    """Simulate every grid point; grid index ``g`` owns substreams ``(seed, g, *)``."""
    return [simulate_point(config, s, g) for g, s in enumerate(sigma_grid)]


def _catalytic_block(args) -> _Moments:
    seed, sigma, gap, block, n = args
    rng = _block_rng(seed, 0, block)
    return _Moments.of(np.maximum(sigma * rng.standard_normal(n), -gap))


def estimate_catalytic_mc(config: SimConfig) -> tuple[float, float]:
    """Sample mean of ``max(mu0 + eps, mu1) - mu0`` and its standard error."""
    if config.iterations < 10_000:
        raise ParameterError(f"need at least 10^4 iterations, got {config.iterations}")
    p = config.params
    if p.sigma_eps == 0:
        return 0.0, 0.0
    jobs = [(config.seed, p.sigma_eps, p.gap, b, n) for b, n in enumerate(_block_sizes(config.iterations))]
    total = _Moments()
    for part in _map(_catalytic_block, jobs, config.workers):
        total = total.merge(part)
    return total.mean, total.se()


@dataclass(frozen=True)
class WelfareRow:
    sigma_eps: float
    deadweight_share: float
    suggested_tax: float
    exploration_rate: float
    mean_realized_ov: float


def deadweight_share(report: SimulationReport, p: ModelParams, externality: float) -> float:
    # baseline surplus per agent is the status-quo payoff mu0
    lost = report.exploration_rate * p.delta * externality
    gained = report.exploration_rate * p.delta * report.mean_realized_ov
    return lost / (gained + p.mu0)


def welfare_sweep(config: SimConfig, externality: float, sigma_grid) -> list[WelfareRow]:
    from .welfare import ExternalityEnv, optimal_policy

    if externality < 0:
        raise ParameterError(f"externality must be >= 0, got {externality}")
    env = ExternalityEnv(inspection_cost=externality, spillover=0.0)
    rows = []
    for report in run_sweep(config, sigma_grid):
        q = config.params.with_(sigma_eps=report.sigma_eps)
        rows.append(
            WelfareRow(
                sigma_eps=report.sigma_eps,
                deadweight_share=deadweight_share(report, config.params, externality),
                suggested_tax=optimal_policy(q, env).exploration_tax,
                exploration_rate=report.exploration_rate,
                mean_realized_ov=report.mean_realized_ov,
            )
        )
    return rows


# ---------------------------------------------------------------------------
# serialisation


def reports_to_csv(reports, p: ModelParams) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow({k: repr(float(v)) for k, v in r.to_row(p).items()})
    return buf.getvalue()


def reports_to_json(reports, p: ModelParams, config: SimConfig | None = None) -> str:
    doc = {"schema_version": SCHEMA_VERSION, "rows": []}
    if config is not None:
        doc["config"] = {
            "params": asdict(config.params),
            "iterations": int(config.iterations),
            "seed": int(config.seed),
            "cost_distribution": config.costs.describe(),
            "exploration_value": config.exploration_value,
        }
    for r in reports:
        row = r.to_row(p)
        row["joint_switch_rate"] = r.joint_switch_rate
        doc["rows"].append(row)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def default_workers() -> int:
    return max(1, os.cpu_count() or 1)
