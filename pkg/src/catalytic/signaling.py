"""Sender-receiver game in which a challenger may signal its quality before
the decision maker decides whether to inspect it.

Types are deterministic once inspected, so the value of inspecting type
``theta`` is ``E[max(mu0 + eps, theta)] - mu0``. Its split around the
pooled-mean benchmark gives the conditional switching value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import optimize

from . import core
from .core import ModelParams
from .errors import AlwaysExploreEnvironment, ParameterError


@dataclass(frozen=True)
class SignalingCost:
    """Power cost ``psi(e, theta) = scale * e**power / theta``.

    Identifiers: ``"linear"`` (power 1), ``"quadratic"`` (power 2) or
    ``"power:<a>"``. Marginal cost falls in ``theta`` for positive types, which
    is the single-crossing condition.
    """

    power: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if not (self.power > 0 and math.isfinite(self.power)):
            raise ParameterError(f"cost power must be > 0, got {self.power}")
        if not (self.scale > 0 and math.isfinite(self.scale)):
            raise ParameterError(f"cost scale must be > 0, got {self.scale}")

    @classmethod
    def parse(cls, ident: str, scale: float = 1.0) -> "SignalingCost":
        if ident == "linear":
            return cls(1.0, scale)
        if ident == "quadratic":
            return cls(2.0, scale)
        if ident.startswith("power:"):
            try:
                return cls(float(ident.split(":", 1)[1]), scale)
            except ValueError:
                pass
        raise ParameterError(f"unknown cost shape {ident!r}; use linear, quadratic or power:<a>")

    def __call__(self, e: float, theta: float) -> float:
        if theta <= 0:
            raise ParameterError(f"signaling cost needs a positive type, got {theta}")
        if e < 0:
            raise ParameterError(f"effort must be >= 0, got {e}")
        return self.scale * e**self.power / theta

    def inverse(self, level: float, theta: float) -> float:
        """Effort ``e`` with ``psi(e, theta) = level``."""
        if level <= 0:
            return 0.0
        return (level * theta / self.scale) ** (1.0 / self.power)


@dataclass(frozen=True)
class BinarySignalEnv:
    base: ModelParams = field(default_factory=ModelParams)
    theta_low: float = 3.0
    theta_high: float = 7.0
    prior_high: float = 0.5
    reward: float = 10.0
    cost_shape: SignalingCost = field(default_factory=SignalingCost)
    # True: reward paid when the challenger is chosen (W * P_s); False: paid on inspection
    reward_on_choice: bool = True

    def __post_init__(self):
        if not self.theta_low < self.theta_high:
            raise ParameterError("theta_low must be below theta_high")
        if not 0.0 < self.prior_high < 1.0:
            raise ParameterError(f"prior_high must lie in (0, 1), got {self.prior_high}")
        if not (self.reward > 0 and math.isfinite(self.reward)):
            raise ParameterError(f"reward must be > 0, got {self.reward}")
        if self.theta_low <= 0:
            raise ParameterError("types must be positive for the signaling cost family")
        self.params  # validates the pooled-mean ordering

    @property
    def mu1(self) -> float:
        return self.prior_high * self.theta_high + (1.0 - self.prior_high) * self.theta_low

    @property
    def params(self) -> ModelParams:
        return self.base.with_(mu1=self.mu1)

    def psi(self, e: float, theta: float) -> float:
        return self.cost_shape(e, theta)

    def with_sigma(self, sigma_eps: float) -> "BinarySignalEnv":
        from dataclasses import replace

        return replace(self, base=self.base.with_(sigma_eps=sigma_eps))


@dataclass(frozen=True)
class SignalingEquilibrium:
    regime: str  # "separating" | "pooling" | "partial" | "rejection"
    effort_high: float
    threshold_visq: float
    cutoff_type: float | None
    welfare_delta: float | None
    v_isq: float
    high_type_explored: bool = True


# ---------------------------------------------------------------------------


def type_option_value(p: ModelParams, theta: float) -> float:
    """``E[max(mu0 + eps, theta)] - mu0`` for a known challenger type."""
    return core.benchmark_gain(p.mu0 - theta, p.sigma_eps)


def selection_probability(p: ModelParams, theta: float) -> float:
    """``P(theta > mu0 + eps)``."""
    if p.sigma_eps == 0:
        return 1.0 if theta > p.mu0 else 0.0
    return core.norm_cdf((theta - p.mu0) / p.sigma_eps)


def _conditional_switching(p: ModelParams, theta: float) -> float:
    return type_option_value(p, theta) - core.catalytic_value(p)


def conditional_switching_value(env: BinarySignalEnv, theta: float) -> float:
    """Switching value of a known type around the pooled-mean benchmark; negative below it."""
    return _conditional_switching(env.params, theta)


def collapse_threshold(env: BinarySignalEnv) -> float:
    p = env.params
    return p.cost / p.delta - conditional_switching_value(env, env.theta_low)


def separating_effort(env: BinarySignalEnv) -> float:
    """High-type effort at which the low type is just indifferent to mimicking."""
    p = env.params
    gain = env.reward * (selection_probability(p, env.theta_low) if env.reward_on_choice else 1.0)
    return env.cost_shape.inverse(gain, env.theta_low)


def _check_maintained(env: BinarySignalEnv):
    p = env.params
    v_ic_low = conditional_switching_value(env, env.theta_low)
    if p.delta * v_ic_low >= p.cost:
        raise AlwaysExploreEnvironment(
            f"always-explore environment: delta * V_ic(theta_low) = {p.delta * v_ic_low:.6g} >= c = {p.cost:.6g}"
        )


def disruption_accounts(env: BinarySignalEnv) -> dict:
    """Pooling-minus-separating payoff changes, by party.

    The high type saves its signaling cost and is inspected either way; the
    low type moves from rejection to inspection.
    """
    p = env.params
    e_high = separating_effort(env)
    saved = env.psi(e_high, env.theta_high)
    ov_low = type_option_value(p, env.theta_low)
    reward_low = env.reward * (selection_probability(p, env.theta_low) if env.reward_on_choice else 1.0)
    return {
        "effort_high": e_high,
        "signaling_savings": env.prior_high * saved,
        "low_type_net_value": (1.0 - env.prior_high) * (p.delta * ov_low - p.cost),
        "high_type_change": saved,
        "low_type_change": reward_low,
        "welfare_delta": env.prior_high * saved + (1.0 - env.prior_high) * (p.delta * ov_low - p.cost),
    }


def welfare_of_disruption(env: BinarySignalEnv) -> float:
    return disruption_accounts(env)["welfare_delta"]


def solve_binary_equilibrium(env: BinarySignalEnv) -> SignalingEquilibrium:
    _check_maintained(env)
    p = env.params
    v_isq = core.catalytic_value(p)
    bar = collapse_threshold(env)
    explored_high = p.delta * type_option_value(p, env.theta_high) >= p.cost
    welfare = welfare_of_disruption(env)
    if v_isq >= bar:
        # knife edge resolved toward pooling
        return SignalingEquilibrium("pooling", 0.0, bar, None, welfare, v_isq, True)
    return SignalingEquilibrium("separating", separating_effort(env), bar, None, welfare, v_isq, explored_high)


# ---------------------------------------------------------------------------
# continuum of types


@dataclass(frozen=True)
class ContinuousSignalEnv:
    """Types on ``[lower, upper]``; ``type_mean`` defaults to the uniform mean."""

    base: ModelParams = field(default_factory=lambda: ModelParams(mu1=4.5))
    lower: float = 0.0
    upper: float = 9.0
    type_mean: float | None = None
    reward: float = 10.0
    cost_shape: SignalingCost = field(default_factory=SignalingCost)

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ParameterError("type support must have lower < upper")
        m = self.mean
        if not self.lower <= m <= self.upper:
            raise ParameterError("type mean must lie inside the support")
        self.params

    @property
    def mean(self) -> float:
        return 0.5 * (self.lower + self.upper) if self.type_mean is None else float(self.type_mean)

    @property
    def params(self) -> ModelParams:
        return self.base.with_(mu1=self.mean)

    def with_sigma(self, sigma_eps: float) -> "ContinuousSignalEnv":
        from dataclasses import replace

        return replace(self, base=self.base.with_(sigma_eps=sigma_eps))

    def effort_at(self, theta: float, cutoff: float) -> float:
        """Separating-region effort: deters the cutoff type from mimicking ``theta``.

        Zero below the cutoff. A modelling convention, not an equilibrium ODE.
        """
        if theta < cutoff:
            return 0.0
        p = self.params
        return self.cost_shape.inverse(self.reward * selection_probability(p, theta), cutoff)


def continuous_cutoff(env: ContinuousSignalEnv, *, xtol: float = 1e-12) -> SignalingEquilibrium:
    p = env.params
    v_isq = core.catalytic_value(p)
    target = p.cost / p.delta

    def excess(theta):
        return type_option_value(p, theta) - target

    # the cutoff equation has a root on the whole line when target > 0, since
    # the inspection value runs from 0 to infinity; corners are classified after
    if target <= 0:
        return SignalingEquilibrium("pooling", 0.0, target - _conditional_switching(p, env.lower), None, None, v_isq)
    width = env.upper - env.lower
    lo, hi = env.lower, env.upper
    while excess(lo) >= 0:
        lo -= width
    while excess(hi) < 0:
        hi += width
    cut = optimize.bisect(excess, lo, hi, xtol=xtol)
    bar = target - _conditional_switching(p, cut)
    if cut <= env.lower:
        return SignalingEquilibrium("pooling", 0.0, bar, cut, None, v_isq)
    if cut > env.upper:
        return SignalingEquilibrium("rejection", 0.0, bar, cut, None, v_isq, False)
    return SignalingEquilibrium("partial", env.effort_at(env.upper, cut), bar, cut, None, v_isq)
