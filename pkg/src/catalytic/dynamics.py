"""Stationary exploration policy under Poisson challenger arrivals, and the
stopping rule for repeated catalytic exploration with precision decay."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import core
from .core import ModelParams
from .errors import ParameterError


@dataclass(frozen=True)
class DynamicEnv:
    arrival_rate: float = 1.0
    discount_rate: float = 0.05
    base: ModelParams = field(default_factory=ModelParams)

    def __post_init__(self):
        for name in ("arrival_rate", "discount_rate"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {v}")


@dataclass(frozen=True)
class HjbThreshold:
    sigma_bar: float
    approximation: float  # high-uncertainty shortcut c * sqrt(2*pi)
    relative_gap: float


def hjb_value(env: DynamicEnv, sigma: float, *, gap: float | None = None) -> float:
    """Value of the stationary policy at status-quo volatility ``sigma``.

    Inside the exploration region the closed form is
    ``mu0/r + lambda/(r + lambda) * (V_isq(sigma) - c)``; outside it is ``mu0/r``.
    """
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    b = env.base
    gap = b.gap if gap is None else gap
    r, lam = env.discount_rate, env.arrival_rate
    v = core.catalytic_closed_form(gap, sigma)
    if v >= b.cost:
        return b.mu0 / r + lam / (r + lam) * (v - b.cost)
    return b.mu0 / r


def hjb_threshold(env: DynamicEnv, *, gap: float | None = None, xtol: float = 1e-12) -> HjbThreshold:
    """Volatility at which the catalytic value first covers the cost."""
    b = env.base
    gap = b.gap if gap is None else gap
    sigma_bar = core.catalytic_threshold_sigma(gap, b.cost, xtol=xtol)
    approx = b.cost * core.SQRT_2PI
    return HjbThreshold(sigma_bar, approx, abs(approx - sigma_bar) / sigma_bar)


def stopping_threshold(cost: float, delta: float) -> float:
    """Stop once volatility falls below ``c * sqrt(2*pi) / delta``."""
    if cost <= 0:
        raise ParameterError(f"cost must be > 0 for the stopping rule, got {cost}")
    if not 0 < delta <= 1:
        raise ParameterError(f"delta must lie in (0, 1], got {delta}")
    return cost * core.SQRT_2PI / delta


@dataclass(frozen=True)
class StoppingState:
    current_sigma: float
    signal_noise: float
    rounds_elapsed: int = 0

    def __post_init__(self):
        if self.current_sigma < 0:
            raise ParameterError("current_sigma must be >= 0")
        if not self.signal_noise > 0:
            raise ParameterError("signal_noise must be > 0")

    def step(self) -> "StoppingState":
        s, t = self.current_sigma, self.signal_noise
        return StoppingState(s * t / math.hypot(s, t), t, self.rounds_elapsed + 1)


@dataclass(frozen=True)
class StoppingTrajectory:
    sigma_bar: float
    stop_round: int
    path: tuple


def decayed_sigma(sigma0: float, noise: float, t: int) -> float:
    """Closed form of the precision recursion after ``t`` observations."""
    return sigma0 * noise / math.sqrt(noise * noise + t * sigma0 * sigma0)


def stopping_trajectory(state: StoppingState, p: ModelParams, *, max_rounds: int = 1_000_000) -> StoppingTrajectory:
    """Iterate the precision recursion until volatility drops below the stopping bar.

    The path lists volatilities from the initial state through the stopping round.
    """
    bar = stopping_threshold(p.cost, p.delta)
    path = [state.current_sigma]
    s = state
    while s.current_sigma >= bar:
        if s.rounds_elapsed - state.rounds_elapsed >= max_rounds:
            raise ParameterError(f"no stop within {max_rounds} rounds")
        s = s.step()
        path.append(s.current_sigma)
    return StoppingTrajectory(bar, s.rounds_elapsed - state.rounds_elapsed, tuple(path))
