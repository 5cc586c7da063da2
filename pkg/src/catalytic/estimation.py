"""Method-of-moments recovery of status-quo volatility and the quality gap from
exploration and switching rates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize, special

from . import core
from .errors import InfeasibleMoments, ParameterError
from .montecarlo import CostDistribution

SWITCH_VARIANTS = ("combined", "status_quo_only")
VALUE_VARIANTS = ("catalytic", "total")


@dataclass(frozen=True)
class Moments:
    p_explore: float
    p_switch: float
    sigma_theta_known: float = 1.0

    def __post_init__(self):
        for name in ("p_explore", "p_switch"):
            v = getattr(self, name)
            if not 0.0 < v < 1.0:
                raise InfeasibleMoments(f"{name} must lie strictly inside (0, 1), got {v}", name)
        if self.sigma_theta_known < 0:
            raise ParameterError("sigma_theta_known must be >= 0")


@dataclass(frozen=True)
class EstimationResult:
    sigma_eps_hat: float
    delta_hat: float
    v_isq_hat: float
    convergence: dict = field(default_factory=dict)


def _gap_of(k: float, sigma: float, sigma_theta: float, variant: str) -> float:
    if variant == "combined":
        return k * math.hypot(sigma, sigma_theta)
    return k * sigma


def model_moments(sigma: float, gap: float, sigma_theta: float, costs: CostDistribution, delta: float,
                  *, switch_variant: str = "combined", value_variant: str = "catalytic") -> tuple[float, float]:
    """Exploration and switching probabilities implied by ``(sigma, gap)``."""
    if value_variant == "catalytic":
        v = core.catalytic_closed_form(gap, sigma)
    else:
        v = core.expected_max_normals(0.0, sigma, -gap, sigma_theta)
    s = math.hypot(sigma, sigma_theta) if switch_variant == "combined" else sigma
    return costs.cdf(delta * v), core.norm_cdf(-gap / s)


def invert_moments(
    m: Moments,
    cost_dist: CostDistribution,
    delta: float,
    *,
    switch_variant: str = "combined",
    value_variant: str = "catalytic",
    xtol: float = 1e-14,
) -> EstimationResult:
    """Solve the two moment equations.

    The switching moment pins the standardised gap ``k = -Phi^{-1}(p_switch)``
    in closed form; the exploration moment then gives a one-dimensional root in
    ``sigma_eps`` with the gap tied to ``k``.
    """
    if switch_variant not in SWITCH_VARIANTS:
        raise ParameterError(f"switch_variant must be one of {SWITCH_VARIANTS}")
    if value_variant not in VALUE_VARIANTS:
        raise ParameterError(f"value_variant must be one of {VALUE_VARIANTS}")
    if not 0 < delta <= 1:
        raise ParameterError(f"delta must lie in (0, 1], got {delta}")
    if cost_dist.kind == "fixed":
        raise ParameterError("a point-mass cost law cannot be inverted; use exponential or lognormal")
    st = m.sigma_theta_known
    k = -float(special.ndtri(m.p_switch))
    if m.p_switch == 0.5:
        k = 0.0
    if k < 0:
        raise InfeasibleMoments("switch rate above one half implies a superior challenger", "p_switch")
    target = cost_dist.ppf(m.p_explore) / delta

    def value(sigma):
        gap = _gap_of(k, sigma, st, switch_variant)
        if value_variant == "catalytic":
            return core.catalytic_closed_form(gap, sigma)
        return core.expected_max_normals(0.0, sigma, -gap, st)

    def resid(sigma):
        return value(sigma) - target

    # With the total option value and a gap tied to sigma the moment can dip
    # before rising, so scan for every sign change; the root on the final
    # rising branch is reported and any others are listed as alternatives.
    scale = max(target, st, 1.0)
    grid = np.concatenate([[0.0], np.geomspace(1e-6 * scale, 1e6 * scale, 1201)])
    signs = np.sign([resid(x) for x in grid])
    changes = [i for i in range(len(grid) - 1) if signs[i] >= 0 > signs[i + 1] or signs[i] < 0 <= signs[i + 1]]
    if not changes:
        if signs[0] >= 0:
            raise InfeasibleMoments("exploration rate is too low to be matched by any volatility", "p_explore")
        raise InfeasibleMoments("exploration moment has no root in the volatility bracket", "p_explore")
    roots = []
    for i in changes:
        r, info = optimize.brentq(resid, grid[i], grid[i + 1], xtol=xtol, rtol=4 * np.finfo(float).eps, full_output=True)
        roots.append((r, info, (float(grid[i]), float(grid[i + 1]))))
    sigma, info, bracket = roots[-1]
    gap = _gap_of(k, sigma, st, switch_variant)
    pe, ps = model_moments(sigma, gap, st, cost_dist, delta, switch_variant=switch_variant, value_variant=value_variant)
    return EstimationResult(
        sigma_eps_hat=sigma,
        delta_hat=gap,
        v_isq_hat=core.catalytic_closed_form(gap, sigma),
        convergence={
            "standardised_gap": k,
            "bracket": list(bracket),
            "alternative_roots": [r[0] for r in roots[:-1]],
            "root_iterations": info.iterations,
            "converged": bool(info.converged),
            "residual_explore": pe - m.p_explore,
            "residual_switch": ps - m.p_switch,
            "switch_variant": switch_variant,
            "value_variant": value_variant,
        },
    )


def resample_moments(m: Moments, n_obs: int, n_resamples: int, seed: int) -> list[Moments | None]:
    """Parametric bootstrap draws of the two rates.

    Exploration is binomial over ``n_obs`` agents; switching is binomial over the
    drawn explorers. Draws that leave a rate on the boundary are returned as None.
    """
    if n_obs < 1:
        raise ParameterError("n_obs must be >= 1")
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed))))
    out = []
    for _ in range(n_resamples):
        n_exp = int(rng.binomial(n_obs, m.p_explore))
        n_sw = int(rng.binomial(n_exp, m.p_switch)) if n_exp else 0
        pe = n_exp / n_obs
        ps = n_sw / n_exp if n_exp else 0.0
        if 0 < pe < 1 and 0 < ps < 1:
            out.append(Moments(pe, ps, m.sigma_theta_known))
        else:
            out.append(None)
    return out


@dataclass(frozen=True)
class BootstrapSE:
    sigma_eps: float
    delta: float
    v_isq: float
    n_resamples: int
    infeasible_share: float
    flagged: bool


def bootstrap_se(samples, cost_dist: CostDistribution, delta: float, **kw) -> BootstrapSE:
    """Percentile standard errors, half the 16-84 range, over resampled moments."""
    samples = list(samples)
    if len(samples) < 100:
        raise ParameterError(f"need at least 100 resamples, got {len(samples)}")
    est = []
    bad = 0
    for s in samples:
        if s is None:
            bad += 1
            continue
        try:
            r = invert_moments(s, cost_dist, delta, **kw)
        except InfeasibleMoments:
            bad += 1
            continue
        est.append((r.sigma_eps_hat, r.delta_hat, r.v_isq_hat))
    share = bad / len(samples)
    if not est:
        return BootstrapSE(math.nan, math.nan, math.nan, len(samples), share, True)
    arr = np.array(est)
    q16, q84 = np.percentile(arr, [16, 84], axis=0)
    half = (q84 - q16) / 2.0
    return BootstrapSE(float(half[0]), float(half[1]), float(half[2]), len(samples), share, share > 0.10)
