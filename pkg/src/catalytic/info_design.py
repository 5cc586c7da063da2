"""Costly information acquisition before the exploration decision.

The decision maker buys Gaussian signals ``eps + eta`` and ``theta + xi`` with
noise scales ``tau_eta`` and ``tau_xi`` at cost ``kappa/tau**2`` each, then acts
on posterior means. Posterior means are normal with variances
``rho**2 = sigma**4 / (sigma**2 + tau**2)``, so the value of the experiment is
the expected maximum of two independent normals.

Noise at or beyond :data:`NO_LEARNING` is treated as an uninformative signal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from . import core
from .core import ModelParams
from .errors import DomainError, ParameterError

NO_LEARNING = 1e9
MIN_NOISE = 1e-6
_LOG_BOX = (math.log(MIN_NOISE), math.log(NO_LEARNING))


@dataclass(frozen=True)
class InfoCosts:
    kappa_eta: float = 0.5
    kappa_xi: float = 0.5

    def __post_init__(self):
        for name in ("kappa_eta", "kappa_xi"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v > 0):
                raise ParameterError(f"{name} must be finite and > 0, got {v}")
            object.__setattr__(self, name, v)


@dataclass(frozen=True)
class PrecisionChoice:
    tau_eta: float
    tau_xi: float
    posterior_vol_eps: float
    posterior_vol_theta: float
    net_value: float
    converged: bool = True
    foc_residuals: tuple = (0.0, 0.0)
    corner_eta: bool = False
    corner_xi: bool = False


def posterior_variance(sigma: float, tau: float) -> float:
    """Variance of the posterior mean, zero at or beyond the no-learning sentinel."""
    if tau <= 0:
        raise ParameterError(f"noise scale must be > 0, got {tau}")
    if tau >= NO_LEARNING or sigma == 0:
        return 0.0
    s2 = sigma * sigma
    return s2 * s2 / (s2 + tau * tau)


def residual_variance(sigma: float, tau: float) -> float:
    if tau >= NO_LEARNING:
        return sigma * sigma
    s2 = sigma * sigma
    return s2 * tau * tau / (s2 + tau * tau)


def _ov_from_variances(p: ModelParams, v_eps: float, v_theta: float) -> float:
    return core.expected_max_normals(p.mu0, math.sqrt(v_eps), p.mu1, math.sqrt(v_theta)) - p.mu0


def posterior_option_value(p: ModelParams, tau_eta: float, tau_xi: float) -> float:
    return _ov_from_variances(
        p, posterior_variance(p.sigma_eps, tau_eta), posterior_variance(p.sigma_theta, tau_xi)
    )


def objective(p: ModelParams, costs: InfoCosts, tau_eta: float, tau_xi: float) -> float:
    """``delta * OV - c - kappa_eta/tau_eta^2 - kappa_xi/tau_xi^2``."""
    return (
        p.delta * posterior_option_value(p, tau_eta, tau_xi)
        - p.cost
        - costs.kappa_eta / tau_eta**2
        - costs.kappa_xi / tau_xi**2
    )


def _dvar_dtau(sigma: float, tau: float) -> float:
    if tau >= NO_LEARNING:
        return 0.0
    s2 = sigma * sigma
    return -2.0 * s2 * s2 * tau / (s2 + tau * tau) ** 2


def gradient_log(p: ModelParams, costs: InfoCosts, tau_eta: float, tau_xi: float) -> np.ndarray:
    """Gradient of :func:`objective` in ``(log tau_eta, log tau_xi)``."""
    v = posterior_variance(p.sigma_eps, tau_eta) + posterior_variance(p.sigma_theta, tau_xi)
    if v > 0:
        s = math.sqrt(v)
        dov_dv = core.norm_pdf(p.gap / s) / (2.0 * s)
    else:
        dov_dv = 0.0  # the value has a kink at zero belief volatility
    g_eta = p.delta * dov_dv * _dvar_dtau(p.sigma_eps, tau_eta) + 2.0 * costs.kappa_eta / tau_eta**3
    g_xi = p.delta * dov_dv * _dvar_dtau(p.sigma_theta, tau_xi) + 2.0 * costs.kappa_xi / tau_xi**3
    return np.array([g_eta * tau_eta, g_xi * tau_xi])


def _clip(x):
    return np.clip(np.asarray(x, dtype=float), _LOG_BOX[0], _LOG_BOX[1])


def _neg(x, p, costs):
    x = _clip(x)
    return -objective(p, costs, math.exp(x[0]), math.exp(x[1]))


def _neg_grad(x, p, costs):
    x = _clip(x)
    return -gradient_log(p, costs, math.exp(x[0]), math.exp(x[1]))


def optimize_precision(
    p: ModelParams,
    costs: InfoCosts,
    *,
    restarts: int = 5,
    seed: int = 0,
    maxiter: int = 4000,
) -> PrecisionChoice:
    """Maximise the net value of information over log-noise coordinates.

    Simplex searches from seeded random starts, plus explicit corner starts,
    each polished by a bounded quasi-Newton step with the analytic gradient.
    The best candidate wins; ties go to the lexicographically smaller pair.
    """
    rng = np.random.default_rng(seed)
    lo, hi = _LOG_BOX
    starts = [np.array([0.0, 0.0]), np.array([0.0, hi]), np.array([hi, 0.0])]
    starts += [rng.uniform(math.log(1e-2), math.log(1e4), size=2) for _ in range(restarts)]
    bounds = [(lo, hi), (lo, hi)]
    candidates = []
    all_ok = True
    for x0 in starts:
        nm = optimize.minimize(
            _neg, x0, args=(p, costs), method="Nelder-Mead",
            options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": maxiter},
        )
        pol = optimize.minimize(
            _neg, _clip(nm.x), args=(p, costs), jac=_neg_grad, method="L-BFGS-B", bounds=bounds,
            options={"ftol": 1e-15, "gtol": 1e-12, "maxiter": maxiter},
        )
        best = pol if pol.fun <= nm.fun else nm
        all_ok = all_ok and (pol.success or nm.success)
        candidates.append((float(best.fun), tuple(_clip(best.x))))
    # the pure no-learning corner on either axis
    for corner in ((hi, hi),):
        candidates.append((_neg(np.array(corner), p, costs), corner))
    candidates.sort(key=lambda t: (round(t[0], 13), t[1]))
    fun, x = candidates[0]
    x = list(x)
    # the objective is flat far out in noise; snap to the sentinel when that is no worse
    for i in (0, 1):
        trial = list(x)
        trial[i] = hi
        f = _neg(np.array(trial), p, costs)
        if f <= fun + 1e-13:
            fun, x = f, trial
    return _package(p, costs, np.array(x), all_ok)


def _package(p, costs, x, converged) -> PrecisionChoice:
    te, tx = math.exp(x[0]), math.exp(x[1])
    hi = _LOG_BOX[1]
    corner_eta = x[0] >= hi - 1e-9
    corner_xi = x[1] >= hi - 1e-9
    if corner_eta:
        te = NO_LEARNING
    if corner_xi:
        tx = NO_LEARNING
    g = gradient_log(p, costs, te, tx)
    # a corner is optimal when the objective still rises toward it
    res = (0.0 if corner_eta and g[0] >= 0 else float(g[0]), 0.0 if corner_xi and g[1] >= 0 else float(g[1]))
    return PrecisionChoice(
        tau_eta=te,
        tau_xi=tx,
        posterior_vol_eps=math.sqrt(posterior_variance(p.sigma_eps, te)),
        posterior_vol_theta=math.sqrt(posterior_variance(p.sigma_theta, tx)),
        net_value=objective(p, costs, te, tx),
        converged=bool(converged and max(abs(res[0]), abs(res[1])) < 1e-6),
        foc_residuals=res,
        corner_eta=bool(corner_eta),
        corner_xi=bool(corner_xi),
    )


def grid_search(p: ModelParams, costs: InfoCosts, lo: float, hi: float, n: int = 200):
    """Exhaustive log-grid search; returns ``(best objective, tau_eta, tau_xi, log step)``."""
    grid = np.exp(np.linspace(math.log(lo), math.log(hi), n))
    best = (-math.inf, None, None)
    for te in grid:
        for tx in grid:
            val = objective(p, costs, float(te), float(tx))
            if val > best[0]:
                best = (val, float(te), float(tx))
    return best + ((math.log(hi) - math.log(lo)) / (n - 1),)


# ---------------------------------------------------------------------------
# comparative statics


@dataclass(frozen=True)
class Statics:
    sigma_pair: tuple
    tau_eta_pair: tuple
    complement: bool | None  # tau_eta falls as sigma_eps rises; None at corners
    unconstrained_dtau_dkappa_xi: float | None
    xi_at_corner: bool
    budget: float | None
    constrained_dtau_dkappa_xi: float | None
    budget_share_eta: float | None


def budget_allocation(p: ModelParams, costs: InfoCosts, budget: float) -> tuple[float, float, float]:
    """Best split of a binding spending budget ``kappa_eta/tau_eta^2 + kappa_xi/tau_xi^2 = budget``.

    Returns ``(share on eta, tau_eta, tau_xi)``.
    """
    if budget <= 0:
        raise ParameterError(f"budget must be > 0, got {budget}")

    def taus(b):
        te = math.sqrt(costs.kappa_eta / (b * budget)) if b > 0 else NO_LEARNING
        tx = math.sqrt(costs.kappa_xi / ((1.0 - b) * budget)) if b < 1 else NO_LEARNING
        return min(te, NO_LEARNING), min(tx, NO_LEARNING)

    def neg(b):
        return -posterior_option_value(p, *taus(b))

    res = optimize.minimize_scalar(neg, bounds=(0.0, 1.0), method="bounded", options={"xatol": 1e-12})
    b = float(res.x)
    for edge in (0.0, 1.0):
        if neg(edge) < neg(b):
            b = edge
    return (b,) + taus(b)


def complementarity_probe(
    p: ModelParams,
    costs: InfoCosts,
    *,
    sigma_pair: tuple = (1.0, 2.0),
    budget: float | None = None,
    rel_step: float = 1e-3,
    seed: int = 0,
) -> Statics:
    lo_s, hi_s = sigma_pair
    a = optimize_precision(p.with_(sigma_eps=lo_s), costs, seed=seed)
    b = optimize_precision(p.with_(sigma_eps=hi_s), costs, seed=seed)
    complement = None if (a.corner_eta or b.corner_eta) else b.tau_eta < a.tau_eta

    base = optimize_precision(p, costs, seed=seed)
    h = rel_step * costs.kappa_xi
    up = optimize_precision(p, InfoCosts(costs.kappa_eta, costs.kappa_xi + h), seed=seed)
    dn = optimize_precision(p, InfoCosts(costs.kappa_eta, costs.kappa_xi - h), seed=seed)
    unconstrained = None if base.corner_eta else (up.tau_eta - dn.tau_eta) / (2 * h)

    constrained = share = None
    if budget is not None:
        share = budget_allocation(p, costs, budget)[0]
        up_b = budget_allocation(p, InfoCosts(costs.kappa_eta, costs.kappa_xi + h), budget)
        dn_b = budget_allocation(p, InfoCosts(costs.kappa_eta, costs.kappa_xi - h), budget)
        if all(0.0 < s < 1.0 for s in (share, up_b[0], dn_b[0])):
            constrained = (up_b[1] - dn_b[1]) / (2 * h)
    return Statics(
        sigma_pair=(lo_s, hi_s),
        tau_eta_pair=(a.tau_eta, b.tau_eta),
        complement=complement,
        unconstrained_dtau_dkappa_xi=unconstrained,
        xi_at_corner=base.corner_xi,
        budget=budget,
        constrained_dtau_dkappa_xi=constrained,
        budget_share_eta=share,
    )


@dataclass(frozen=True)
class ParadoxVerdict:
    paradox: bool
    externality_side: float  # delta * E * |d pi / d kappa_eta|
    private_side: float  # 1 / tau_eta*^2
    dpi_dkappa: float
    tau_eta: float


def exploration_slope(p: ModelParams, costs: InfoCosts, cost_density_mass: float, rel_step: float = 1e-3, seed: int = 0) -> float:
    """``d pi / d kappa_eta`` with ``pi`` the cost CDF at ``delta * OV*``; the
    CDF slope at the margin is ``cost_density_mass``."""
    h = rel_step * costs.kappa_eta

    def ov_star(k):
        c = optimize_precision(p, InfoCosts(k, costs.kappa_xi), seed=seed)
        return posterior_option_value(p, c.tau_eta, c.tau_xi)

    return cost_density_mass * p.delta * (ov_star(costs.kappa_eta + h) - ov_star(costs.kappa_eta - h)) / (2 * h)


def paradox_verdict(slope: float, tau_eta: float, delta: float, externality: float) -> ParadoxVerdict:
    ext = delta * externality * abs(slope)
    priv = 1.0 / tau_eta**2
    return ParadoxVerdict(ext > priv, ext, priv, slope, tau_eta)


def it_paradox_check(
    p: ModelParams,
    costs: InfoCosts,
    externality: float,
    cost_density_mass: float,
    *,
    rel_step: float = 1e-3,
    seed: int = 0,
) -> ParadoxVerdict:
    if externality < 0:
        raise ParameterError(f"externality must be >= 0, got {externality}")
    if cost_density_mass < 0:
        raise ParameterError(f"cost_density_mass must be >= 0, got {cost_density_mass}")
    choice = optimize_precision(p, costs, seed=seed)
    if choice.corner_eta:
        raise DomainError("no status-quo learning at the optimum; the cost slope is undefined")
    slope = exploration_slope(p, costs, cost_density_mass, rel_step, seed)
    return paradox_verdict(slope, choice.tau_eta, p.delta, externality)
