"""Many decision makers: attention across dimensions, exploration on a
network with benchmark spillovers, and sequential herding."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import ModelParams
from .errors import DomainError, ParameterError
from .signaling import type_option_value


# ---------------------------------------------------------------------------
# attention


@dataclass(frozen=True)
class AttentionProblem:
    budget: float
    dims: tuple  # (prior_var, noise_var) pairs

    def __post_init__(self):
        if not self.budget > 0:
            raise ParameterError(f"budget must be > 0, got {self.budget}")
        if not self.dims:
            raise ParameterError("need at least one dimension")
        for pv, nv in self.dims:
            if pv < 0:
                raise ParameterError("prior variances must be >= 0")
            if not nv > 0:
                raise ParameterError("noise variances must be > 0")


def allocate_attention(prob: AttentionProblem) -> list[float]:
    """Split the budget in proportion to each dimension's signal-to-noise ratio."""
    snr = np.array([pv / nv for pv, nv in prob.dims], dtype=float)
    total = snr.sum()
    if total <= 0:
        raise DomainError("every dimension has zero signal-to-noise; allocation undefined")
    return list(prob.budget * snr / total)


# ---------------------------------------------------------------------------
# network game


@dataclass(frozen=True)
class NetworkGame:
    weights: np.ndarray  # weights[j, i]: link strength from j to i
    private_net: np.ndarray
    spillover_gain: float

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        v = np.asarray(self.private_net, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ParameterError("weights must be a square matrix")
        if v.shape != (w.shape[0],):
            raise ParameterError("private_net must have one entry per agent")
        if np.any(w < 0) or np.any(w > 1):
            raise ParameterError("weights must lie in [0, 1]")
        if np.any(np.diag(w) != 0):
            raise ParameterError("weights must have a zero diagonal")
        if not self.spillover_gain > 0:
            raise ParameterError("spillover_gain must be > 0")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "private_net", v)

    @property
    def n_agents(self) -> int:
        return self.private_net.size

    def marginal(self, profile: np.ndarray) -> np.ndarray:
        """``Pi_i(1, a_-i) - Pi_i(0, a_-i)`` for every agent."""
        a = np.asarray(profile, dtype=float)
        return self.private_net + self.spillover_gain * (self.weights.T @ a)

    def payoff(self, i: int, profile) -> float:
        a = np.asarray(profile, dtype=float)
        return float(a[i] * self.marginal(a)[i])


@dataclass(frozen=True)
class NetworkEquilibria:
    least: tuple
    greatest: tuple
    multiple: bool
    rounds: tuple


def is_nash(g: NetworkGame, profile) -> bool:
    a = np.asarray(profile, dtype=int)
    m = g.marginal(a)
    return bool(np.all(np.where(a == 1, m >= 0, m <= 0)))


def _iterate(g: NetworkGame, start: np.ndarray, explore_on_tie: bool) -> tuple[np.ndarray, int]:
    a = start.copy()
    for r in range(g.n_agents + 2):
        m = g.marginal(a)
        nxt = (m >= 0 if explore_on_tie else m > 0).astype(int)
        if np.array_equal(nxt, a):
            return a, r
        a = nxt
    raise DomainError("best-response iteration failed to settle")


def network_equilibria(g: NetworkGame) -> NetworkEquilibria:
    """Extremal equilibria by simultaneous best response from the bottom and the top."""
    n = g.n_agents
    lo, r_lo = _iterate(g, np.zeros(n, dtype=int), False)
    hi, r_hi = _iterate(g, np.ones(n, dtype=int), True)
    for prof in (lo, hi):
        if not is_nash(g, prof):
            raise DomainError("best-response limit failed the deviation check")
    return NetworkEquilibria(tuple(int(x) for x in lo), tuple(int(x) for x in hi), not np.array_equal(lo, hi), (r_lo, r_hi))


def enumerate_nash(g: NetworkGame) -> list[tuple]:
    """Every pure equilibrium, by brute force over all ``2**n`` profiles."""
    out = []
    for bits in itertools.product((0, 1), repeat=g.n_agents):
        if is_nash(g, bits):
            out.append(bits)
    return out


# ---------------------------------------------------------------------------
# cascades


@dataclass(frozen=True)
class CascadeEnv:
    prior_high: float = 0.5
    signal_accuracy: float = 0.7
    type_values: tuple = (3.0, 7.0)
    base: ModelParams = field(default_factory=ModelParams)

    def __post_init__(self):
        if not 0 < self.prior_high < 1:
            raise ParameterError("prior_high must lie in (0, 1)")
        if not 0.5 < self.signal_accuracy < 1:
            raise ParameterError("signal_accuracy must lie in (0.5, 1)")
        lo, hi = self.type_values
        if not lo < hi:
            raise ParameterError("type_values must be (low, high) with low < high")
        self.params

    @property
    def params(self) -> ModelParams:
        lo, hi = self.type_values
        return self.base.with_(mu1=self.prior_high * hi + (1 - self.prior_high) * lo)

    def explore_value(self, belief_high: float) -> float:
        """``delta * (E_mu[V_ic] + V_isq) - c``; linear in the belief."""
        p = self.params
        lo, hi = self.type_values
        ov = belief_high * type_option_value(p, hi) + (1 - belief_high) * type_option_value(p, lo)
        return p.delta * ov - p.cost


@dataclass
class CascadeLog:
    true_type: str
    signals: list = field(default_factory=list)
    public_belief: list = field(default_factory=list)
    posterior: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    in_cascade: list = field(default_factory=list)
    onset: int | None = None  # 1-based index of the first herding agent
    private_loss: list = field(default_factory=list)
    externality: list = field(default_factory=list)

    @property
    def explore_onset(self) -> int | None:
        """1-based index of the first agent herding into exploration."""
        for i, (herd, a) in enumerate(zip(self.in_cascade, self.actions)):
            if herd and a:
                return i + 1
        return None

    @property
    def total_loss(self) -> float:
        return float(sum(self.private_loss) + sum(self.externality))


def draw_signals(env: CascadeEnv, true_type: str, n_agents: int, seed: int) -> list[int]:
    """Private signals (1 = high), correct with probability ``signal_accuracy``."""
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    u = rng.random(n_agents)
    correct = u < env.signal_accuracy
    truth = 1 if true_type == "high" else 0
    return [int(truth if c else 1 - truth) for c in correct]


def _posterior(public: float, signal: int, q: float) -> float:
    like_h = q if signal == 1 else 1 - q
    like_l = 1 - q if signal == 1 else q
    return public * like_h / (public * like_h + (1 - public) * like_l)


def run_cascade(
    env: CascadeEnv,
    true_type: str,
    n_agents: int,
    seed: int,
    *,
    externality: float = 0.0,
) -> CascadeLog:
    """Sequential exploration with action observation.

    An agent herds when her action is the same under either signal; her action
    then carries no information and the public belief stops moving.
    """
    if true_type not in ("high", "low"):
        raise ParameterError("true_type must be 'high' or 'low'")
    if n_agents < 1:
        raise ParameterError("n_agents must be >= 1")
    p = env.params
    q = env.signal_accuracy
    lo, hi = env.type_values
    log = CascadeLog(true_type)
    public = env.prior_high
    for i, s in enumerate(draw_signals(env, true_type, n_agents, seed)):
        act = {sig: env.explore_value(_posterior(public, sig, q)) >= 0 for sig in (0, 1)}
        post = _posterior(public, s, q)
        a = act[s]
        herd = act[0] == act[1]
        log.signals.append(s)
        log.public_belief.append(public)
        log.posterior.append(post)
        log.actions.append(int(a))
        log.in_cascade.append(herd)
        if herd and log.onset is None:
            log.onset = i + 1
        if herd and a:
            ov_i = post * type_option_value(p, hi) + (1 - post) * type_option_value(p, lo)
            log.private_loss.append((p.cost - p.delta * ov_i) if true_type == "low" else 0.0)
            log.externality.append(p.delta * externality)
        else:
            log.private_loss.append(0.0)
            log.externality.append(0.0)
        if not herd:
            # the action reveals the signal
            public = _posterior(public, s, q)
    return log
