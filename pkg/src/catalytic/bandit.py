"""Gaussian bandit whose arms also act as benchmarks for the status quo.

The standard index is computed by the calibration method: the arm is played
against a retirement option paying ``lam`` per period, and ``lam`` is bisected
until the decision maker is indifferent at the current state. Posterior
variance after ``k`` more pulls is deterministic, so the state space is the
posterior mean on a grid times the pull count. Expectations of the piecewise
linear value function are taken exactly against the normal predictive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np
from scipy import special

from . import core
from .errors import NumericalError, ParameterError

MEAN_NODES = 201
HORIZON_TOL = 1e-8
GRID_HALF_WIDTH = 5.0  # in prior standard deviations of the posterior mean


@dataclass(frozen=True)
class BanditArm:
    mean_reward: float  # true mean, used only when simulating
    reward_noise: float = 1.0
    catalytic_info: float = 0.0
    pull_count: int = 0
    posterior_mean: float = 0.0
    posterior_sd: float = 1.0
    # noise of the status-quo signal produced by a pull; None means no benchmark content
    benchmark_noise: float | None = None

    def __post_init__(self):
        if self.reward_noise < 0:
            raise ParameterError("reward_noise must be >= 0")
        if self.catalytic_info < 0:
            raise ParameterError("catalytic_info must be >= 0")
        if self.posterior_sd < 0:
            raise ParameterError("posterior_sd must be >= 0")
        if self.benchmark_noise is not None and not self.benchmark_noise > 0:
            raise ParameterError("benchmark_noise must be > 0")

    def updated(self, reward: float) -> "BanditArm":
        v = self.posterior_sd**2
        if self.reward_noise == 0:
            return replace(self, pull_count=self.pull_count + 1, posterior_mean=reward, posterior_sd=0.0)
        n2 = self.reward_noise**2
        post_v = v * n2 / (v + n2)
        post_m = (self.posterior_mean * n2 + reward * v) / (v + n2)
        return replace(self, pull_count=self.pull_count + 1, posterior_mean=post_m, posterior_sd=math.sqrt(post_v))


def _horizon(discount: float) -> int:
    return int(math.ceil(math.log(HORIZON_TOL) / math.log(discount)))


def _kink_matrix(grid: np.ndarray, s: float) -> np.ndarray:
    """``E[(m_i + s Z - x_j)^+]`` for grid means ``m_i`` and interior knots ``x_j``."""
    d = grid[:, None] - grid[None, 1:-1]
    z = d / s
    return d * special.ndtr(z) + s * np.exp(-0.5 * z * z) * core.INV_SQRT_2PI


def _expect_piecewise(W: np.ndarray, grid: np.ndarray, G: np.ndarray) -> np.ndarray:
    """Exact expectation of the linear interpolant of ``W`` (linearly extrapolated
    past both ends) at ``m_i + s Z``, given the kink matrix ``G`` for ``s``."""
    slopes = np.diff(W) / np.diff(grid)
    b = slopes[0]
    a = W[0] - b * grid[0]
    c = np.diff(slopes)
    return a + b * grid + G @ c


@lru_cache(maxsize=4096)
def _centered_index(var: float, noise: float, discount: float, nodes: int, tol: float) -> float:
    """Standard index minus the posterior mean (translation invariance)."""
    if var == 0:
        return 0.0
    T = _horizon(discount)
    sd0 = math.sqrt(var)
    grid = np.linspace(-GRID_HALF_WIDTH * sd0, GRID_HALF_WIDTH * sd0, nodes)
    # spread of the one-step predictive change in the posterior mean at each depth
    steps = []
    v = var
    for _ in range(T):
        v_next = 0.0 if noise == 0 else v * noise**2 / (v + noise**2)
        steps.append(math.sqrt(max(v - v_next, 0.0)))
        v = v_next
    kinks = [_kink_matrix(grid, s) if s > 1e-12 * sd0 else None for s in steps]
    scale = 1.0 / (1.0 - discount)
    center = nodes // 2

    def values(lam):
        retire = lam * scale
        W = np.maximum(retire, grid * scale)
        cont = W
        for k in range(T - 1, -1, -1):
            G = kinks[k]
            cont = grid + discount * (W if G is None else _expect_piecewise(W, grid, G))
            W = np.maximum(retire, cont)
        return W, cont

    lo, hi = 0.0, 8.0 * sd0 + 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        _, cont = values(mid)
        if cont[center] > mid * scale:
            lo = mid
        else:
            hi = mid
    W, _ = values(0.5 * (lo + hi))
    if np.any(np.diff(W) < -1e-9):
        raise NumericalError(
            "value function not monotone in the posterior mean; refine the grid",
            variance=var,
            noise=noise,
            discount=discount,
        )
    return 0.5 * (lo + hi)


def standard_gittins_index(
    arm: BanditArm,
    discount: float,
    *,
    nodes: int = MEAN_NODES,
    tol: float = 1e-9,
) -> float:
    if not 0 < discount < 1:
        raise ParameterError(f"discount must lie in (0, 1), got {discount}")
    var, noise = float(arm.posterior_sd**2), float(arm.reward_noise)
    if noise == 0:
        return arm.posterior_mean + _centered_index(var, 0.0, float(discount), nodes, tol)
    # the centred index scales with the observation noise
    return arm.posterior_mean + noise * _centered_index(var / noise**2, 1.0, float(discount), nodes, tol / noise)


def modified_gittins_index(arm: BanditArm, beta: float, discount: float, **kw) -> float:
    """Standard index plus ``beta`` times the arm's catalytic information."""
    if beta < 0:
        raise ParameterError(f"beta must be >= 0, got {beta}")
    return standard_gittins_index(arm, discount, **kw) + beta * arm.catalytic_info


@dataclass(frozen=True)
class StatusQuo:
    """Unknown status-quo match with current volatility ``sigma`` and gap ``gap``."""

    sigma: float
    gap: float


@dataclass
class PlayLog:
    choices: list = field(default_factory=list)
    rewards: list = field(default_factory=list)
    indices: list = field(default_factory=list)
    catalytic: list = field(default_factory=list)
    status_quo_sigma: list = field(default_factory=list)

    def rows(self):
        for t, (c, r, idx, cat, s) in enumerate(
            zip(self.choices, self.rewards, self.indices, self.catalytic, self.status_quo_sigma)
        ):
            yield {"round": t, "choice": c, "reward": r, "indices": list(idx), "catalytic": list(cat), "status_quo_sigma": s}


def catalytic_increment(status: StatusQuo, noise: float) -> float:
    """Drop in the catalytic value from one benchmark observation with noise ``noise``."""
    s = status.sigma
    s_next = s * noise / math.hypot(s, noise)
    return core.catalytic_closed_form(status.gap, s) - core.catalytic_closed_form(status.gap, s_next)


def simulate_bandit(
    arms,
    beta: float,
    discount: float,
    horizon: int,
    seed: int,
    *,
    status_quo: StatusQuo | None = None,
) -> PlayLog:
    """Greedy play on the modified index with Bayesian updates.

    Arms with ``benchmark_noise`` refresh their catalytic information from the
    shared status-quo volatility each round; other arms keep their fixed value.
    """
    if horizon < 1:
        raise ParameterError("horizon must be >= 1")
    arms = list(arms)
    if not arms:
        raise ParameterError("need at least one arm")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    log = PlayLog()
    for _ in range(horizon):
        if status_quo is not None:
            arms = [
                replace(a, catalytic_info=catalytic_increment(status_quo, a.benchmark_noise))
                if a.benchmark_noise is not None
                else a
                for a in arms
            ]
        idx = [modified_gittins_index(a, beta, discount) for a in arms]
        choice = int(np.argmax(idx))
        a = arms[choice]
        reward = float(a.mean_reward + a.reward_noise * rng.standard_normal())
        log.choices.append(choice)
        log.rewards.append(reward)
        log.indices.append(tuple(idx))
        log.catalytic.append(tuple(x.catalytic_info for x in arms))
        log.status_quo_sigma.append(None if status_quo is None else status_quo.sigma)
        arms[choice] = a.updated(reward)
        if status_quo is not None and a.benchmark_noise is not None:
            s = status_quo.sigma
            status_quo = StatusQuo(s * a.benchmark_noise / math.hypot(s, a.benchmark_noise), status_quo.gap)
    return log
