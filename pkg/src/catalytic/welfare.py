"""Planner accounting: externality-adjusted exploration value, Pigouvian
instruments and the disclosure tradeoff."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core
from .core import ModelParams
from .errors import DomainError, ParameterError


@dataclass(frozen=True)
class ExternalityEnv:
    inspection_cost: float = 0.0  # burden borne by the inspected party
    spillover: float = 0.0  # positive information spillover

    def __post_init__(self):
        for name in ("inspection_cost", "spillover"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0:
                raise ParameterError(f"{name} must be finite and >= 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class PolicyBundle:
    exploration_tax: float
    matching_subsidy: float
    net_stance: str  # "tax" | "subsidy" | "neutral"


def private_net_value(p: ModelParams) -> float:
    return p.delta * core.total_option_value(p) - p.cost


def social_net_value(p: ModelParams, env: ExternalityEnv) -> float:
    return private_net_value(p) - p.delta * (env.inspection_cost - env.spillover)


def optimal_policy(p: ModelParams, env: ExternalityEnv) -> PolicyBundle:
    """Exploration tax ``delta*E`` and a subsidy ``S/P_s`` paid when the challenger is chosen."""
    ps = core.switch_probability(p.gap, p.sigma_eps, p.sigma_theta)
    if env.spillover > 0 and ps <= 0:
        raise DomainError("matching subsidy is undefined when the switch probability is zero")
    tax = p.delta * env.inspection_cost
    subsidy = env.spillover / ps if env.spillover > 0 else 0.0
    if env.inspection_cost > env.spillover:
        stance = "tax"
    elif env.spillover > env.inspection_cost:
        stance = "subsidy"
    else:
        stance = "neutral"
    return PolicyBundle(tax, subsidy, stance)


def taxed_private_net_value(p: ModelParams, bundle: PolicyBundle) -> float:
    """Private value of exploring once the bundle is in force.

    The subsidy is collected only on a switch, so its expected discounted
    receipt is ``delta * P_s * subsidy``.
    """
    ps = core.switch_probability(p.gap, p.sigma_eps, p.sigma_theta)
    return private_net_value(p) - bundle.exploration_tax + p.delta * ps * bundle.matching_subsidy


def private_cost_threshold(p: ModelParams, bundle: PolicyBundle | None = None) -> float:
    """Largest cost at which the private agent still explores."""
    q = p.with_(cost=0.0)
    if bundle is None:
        return private_net_value(q)
    return taxed_private_net_value(q, bundle)


def social_cost_threshold(p: ModelParams, env: ExternalityEnv) -> float:
    return social_net_value(p.with_(cost=0.0), env)


def overexploration_interval(p: ModelParams, env: ExternalityEnv) -> tuple[float, float] | None:
    """Range of discounted option value ``delta*OV`` where the agent explores
    but the planner would not: ``[c, c + delta*(E - S))``. ``None`` if empty."""
    hi = p.cost + p.delta * (env.inspection_cost - env.spillover)
    if hi <= p.cost:
        return None
    return (p.cost, hi)


def locate_overexploration(p: ModelParams, env: ExternalityEnv, sigma_grid) -> np.ndarray:
    """Boolean mask over ``sigma_grid``: private net value >= 0 > social net value."""
    out = []
    for s in sigma_grid:
        q = p.with_(sigma_eps=float(s))
        out.append(private_net_value(q) >= 0 > social_net_value(q, env))
    return np.asarray(out, dtype=bool)


def disclosure_tradeoff(env_signal, env_ext: ExternalityEnv, catalytic_explorer_mass: float) -> float:
    """Net welfare effect of removing status-quo uncertainty.

    Removing the uncertainty saves ``mass * (c + delta*E)`` of purely catalytic
    exploration but restores separating signaling, costing the high type
    ``p * psi(e_H*, theta_H)``. The separating effort is evaluated at the
    environment's own volatility.
    """
    from .signaling import separating_effort

    if not 0.0 <= catalytic_explorer_mass <= 1.0:
        raise ParameterError("catalytic_explorer_mass must be a probability")
    b = env_signal.params
    direct = catalytic_explorer_mass * (b.cost + b.delta * env_ext.inspection_cost)
    e_high = separating_effort(env_signal)
    signal = -env_signal.prior_high * env_signal.psi(e_high, env_signal.theta_high)
    return direct + signal
