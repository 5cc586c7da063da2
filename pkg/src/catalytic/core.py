"""Closed-form option values for the two-stage exploration problem.

The decision maker holds a status quo worth ``mu0 + eps`` with
``eps ~ N(0, sigma_eps**2)`` and may pay ``cost`` to inspect a challenger worth
``theta ~ N(mu1, sigma_theta**2)``. Inspection reveals both ``eps`` and
``theta``. The total option value splits into

* the catalytic value ``E[max(mu0 + eps, mu1)] - mu0`` (resolving the status
  quo against a deterministic benchmark), and
* the switching value ``E[max(mu0 + eps, theta)] - E[max(mu0 + eps, mu1)]``.

Scalar helpers take the quality gap ``gap = mu0 - mu1`` directly so that the
``gap = 0`` limit, which :class:`ModelParams` rejects, stays reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy import integrate, special, stats

from .errors import DomainError, NumericalError, ParameterError, QuadratureError

SQRT_2PI = math.sqrt(2.0 * math.pi)
INV_SQRT_2PI = 1.0 / SQRT_2PI


def norm_cdf(x: float) -> float:
    # ndtr goes through erfc, so the lower tail keeps full relative accuracy
    return float(special.ndtr(x))


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) * INV_SQRT_2PI


def _finite(name, value):
    if not math.isfinite(value):
        raise ParameterError(f"{name} must be finite, got {value!r}")


@dataclass(frozen=True)
class ModelParams:
    """Primitives of the baseline model.

    Defaults are the calibration used for the simulation tables
    (``mu0=10, mu1=5, c=1, delta=0.9, sigma_theta=1``).
    """

    mu0: float = 10.0
    mu1: float = 5.0
    sigma_eps: float = 10.0
    sigma_theta: float = 1.0
    cost: float = 1.0
    delta: float = 0.9

    def __post_init__(self):
        for name in ("mu0", "mu1", "sigma_eps", "sigma_theta", "cost", "delta"):
            value = float(getattr(self, name))
            _finite(name, value)
            object.__setattr__(self, name, value)
        if not self.mu1 < self.mu0:
            raise ParameterError(
                f"challenger must be inferior in expectation: mu1={self.mu1} >= mu0={self.mu0}"
            )
        if self.sigma_eps < 0:
            raise ParameterError(f"sigma_eps must be >= 0, got {self.sigma_eps}")
        if self.sigma_theta < 0:
            raise ParameterError(f"sigma_theta must be >= 0, got {self.sigma_theta}")
        if self.cost < 0:
            raise ParameterError(f"cost must be >= 0, got {self.cost}")
        if not 0.0 < self.delta <= 1.0:
            raise ParameterError(f"delta must lie in (0, 1], got {self.delta}")

    @property
    def gap(self) -> float:
        """Quality gap ``mu0 - mu1`` (strictly positive)."""
        return self.mu0 - self.mu1

    def with_(self, **changes) -> "ModelParams":
        return replace(self, **changes)


@dataclass(frozen=True)
class OptionValueBreakdown:
    v_isq: float
    v_ic: float
    total: float
    switch_prob: float


@dataclass(frozen=True)
class CaraParams:
    gamma: float

    def __post_init__(self):
        gamma = float(self.gamma)
        if not (math.isfinite(gamma) and gamma > 0):
            raise ParameterError(f"gamma must be finite and > 0, got {self.gamma!r}")
        object.__setattr__(self, "gamma", gamma)


# ---------------------------------------------------------------------------
# scalar building blocks


def benchmark_gain(gap: float, sigma: float) -> float:
    """``E[max(eps, -gap)]`` for ``eps ~ N(0, sigma**2)``.

    This is the value of comparing a noisy status quo against a fixed
    alternative lying ``gap`` below its mean. ``gap`` may be negative.
    """
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return max(-gap, 0.0)
    z = gap / sigma
    return -gap * norm_cdf(-z) + sigma * norm_pdf(z)


def catalytic_closed_form(gap: float, sigma: float) -> float:
    """Catalytic value ``-gap*Phi(-gap/sigma) + sigma*phi(gap/sigma)``; 0 at ``sigma = 0``."""
    if gap < 0:
        raise ParameterError(f"gap must be >= 0, got {gap}")
    return max(benchmark_gain(gap, sigma), 0.0)


def expected_max_normals(m1: float, s1: float, m2: float, s2: float) -> float:
    """``E[max(X, Y)]`` for independent ``X ~ N(m1, s1^2)``, ``Y ~ N(m2, s2^2)``."""
    s = math.hypot(s1, s2)
    if s == 0:
        return max(m1, m2)
    d = (m1 - m2) / s
    return m1 * norm_cdf(d) + m2 * norm_cdf(-d) + s * norm_pdf(d)


def switch_probability(gap: float, sigma_eps: float, sigma_theta: float) -> float:
    """``P(theta > mu0 + eps) = Phi(-gap / sqrt(sigma_eps^2 + sigma_theta^2))``."""
    s = math.hypot(sigma_eps, sigma_theta)
    if s == 0:
        return 1.0 if gap < 0 else 0.0
    return norm_cdf(-gap / s)


def catalytic_threshold_sigma(gap: float, cost: float, *, upper: float = 1e12, xtol: float = 1e-12) -> float:
    """Status-quo uncertainty at which the catalytic value first equals ``cost``.

    ``gap = 0`` has the exact answer ``cost * sqrt(2*pi)``.
    """
    from scipy.optimize import brentq

    from .errors import ThresholdNotFound

    if cost <= 0:
        raise ParameterError(f"cost must be > 0, got {cost}")
    if gap < 0:
        raise ParameterError(f"gap must be >= 0, got {gap}")
    if gap == 0:
        return cost * SQRT_2PI
    hi = max(cost * SQRT_2PI, gap, 1.0)
    while catalytic_closed_form(gap, hi) < cost:
        hi *= 2.0
        if hi > upper:
            raise ThresholdNotFound(
                "catalytic value never reaches the cost inside the search bracket",
                cost=cost,
                gap=gap,
                upper=upper,
            )
    return brentq(lambda s: catalytic_closed_form(gap, s) - cost, 0.0, hi, xtol=xtol, rtol=4 * np.finfo(float).eps)


# ---------------------------------------------------------------------------
# model-level operations


def catalytic_value(p: ModelParams) -> float:
    return catalytic_closed_form(p.gap, p.sigma_eps)


def total_option_value(p: ModelParams) -> float:
    """``E[max(mu0 + eps, theta)] - mu0`` via the independent-normals max identity."""
    if p.sigma_eps == 0:
        return catalytic_closed_form(p.gap, p.sigma_theta)
    if p.sigma_theta == 0:
        return catalytic_value(p)
    return expected_max_normals(p.mu0, p.sigma_eps, p.mu1, p.sigma_theta) - p.mu0


def _switching_by_quadrature(p: ModelParams, tol: float, max_order: int) -> float:
    # Integrate over the narrower of the two normals; the inner closed form is
    # then smooth on the scale of the wider one and Gauss-Hermite converges fast.
    if p.sigma_theta <= p.sigma_eps:
        outer_mean, outer_sd, inner_mean, inner_sd = p.mu1, p.sigma_theta, p.mu0, p.sigma_eps
    else:
        outer_mean, outer_sd, inner_mean, inner_sd = p.mu0, p.sigma_eps, p.mu1, p.sigma_theta

    def inner(a):
        # E[max(a, Y)] for Y ~ N(inner_mean, inner_sd^2)
        z = (inner_mean - a) / inner_sd
        return a + (inner_mean - a) * special.ndtr(z) + inner_sd * np.exp(-0.5 * z * z) * INV_SQRT_2PI

    previous = None
    order = 20
    while order <= max_order:
        x, w = np.polynomial.hermite_e.hermegauss(order)
        estimate = float(np.dot(w, inner(outer_mean + outer_sd * x)) / SQRT_2PI)
        if previous is not None and abs(estimate - previous) <= tol * max(1.0, abs(estimate)):
            return estimate - (p.mu0 + catalytic_value(p))
        previous = estimate
        order *= 2
    raise QuadratureError(
        "Gauss-Hermite switching value did not settle",
        last_estimate=previous,
        max_order=max_order,
        tol=tol,
    )


def switching_value(p: ModelParams, *, method: str = "identity", tol: float = 1e-10, max_order: int = 160) -> float:
    """Switching value of the challenger.

    ``method="identity"`` uses the closed max identity, ``"quadrature"`` nests
    the one-dimensional closed form inside Gauss-Hermite quadrature.
    """
    if p.sigma_theta == 0:
        return 0.0
    if p.sigma_eps == 0:
        return catalytic_closed_form(p.gap, p.sigma_theta)
    if method == "identity":
        return max(total_option_value(p) - catalytic_value(p), 0.0)
    if method == "quadrature":
        return max(_switching_by_quadrature(p, tol, max_order), 0.0)
    raise ParameterError(f"unknown method {method!r}; expected 'identity' or 'quadrature'")


def decompose_option_value(p: ModelParams) -> OptionValueBreakdown:
    v_isq = catalytic_value(p)
    v_ic = switching_value(p)
    return OptionValueBreakdown(
        v_isq=v_isq,
        v_ic=v_ic,
        total=v_isq + v_ic,
        switch_prob=switch_probability(p.gap, p.sigma_eps, p.sigma_theta),
    )


def _require_uncertainty(p: ModelParams, what: str):
    if p.sigma_eps <= 0:
        raise DomainError(f"{what} is undefined at sigma_eps = 0")


def catalytic_derivative_sigma(p: ModelParams) -> float:
    """Marginal catalytic value of status-quo uncertainty, ``phi(gap/sigma)``."""
    _require_uncertainty(p, "d V_isq / d sigma_eps")
    return norm_pdf(p.gap / p.sigma_eps)


def catalytic_derivative_delta(p: ModelParams) -> float:
    """Sensitivity to the quality gap, ``-Phi(-gap/sigma)``."""
    _require_uncertainty(p, "d V_isq / d gap")
    return -norm_cdf(-p.gap / p.sigma_eps)


def catalytic_cross_partial_mu1(p: ModelParams) -> float:
    """``d^2 V_isq / (d sigma_eps d mu1) = gap / sigma^2 * phi(gap/sigma)``."""
    _require_uncertainty(p, "cross partial")
    s = p.sigma_eps
    return p.gap / (s * s) * norm_pdf(p.gap / s)


def catalytic_asymptote_gap(gap: float, sigma: float) -> float:
    if sigma <= 0:
        raise DomainError("asymptotic expansion needs sigma_eps > 0")
    return sigma * INV_SQRT_2PI - 0.5 * gap


def catalytic_asymptote(p: ModelParams) -> float:
    """Two-term large-uncertainty expansion ``sigma/sqrt(2*pi) - gap/2``."""
    return catalytic_asymptote_gap(p.gap, p.sigma_eps)


def cara_catalytic_value(p: ModelParams, r: CaraParams, *, max_risk_exponent: float = 1e6) -> float:
    """Catalytic value for a CARA decision maker, as a certainty-equivalent gain.

    Certainty equivalents are taken in log space, ``CE = -log(-E[u]) / gamma``,
    so small ``gamma`` does not cancel catastrophically.
    """
    _require_uncertainty(p, "CARA catalytic value")
    g, s, gap = r.gamma, p.sigma_eps, p.gap
    if g * s * s > max_risk_exponent:
        raise NumericalError(
            "gamma * sigma_eps^2 exceeds the configured overflow bound",
            gamma=g,
            sigma_eps=s,
            bound=max_risk_exponent,
        )
    ce_no = p.mu0 - 0.5 * g * s * s
    # log(-E[U_exp]) = logsumexp of the "switch" and "stay" regions
    log_switch = -g * p.mu1 + special.log_ndtr(-gap / s)
    log_stay = -g * p.mu0 + 0.5 * g * g * s * s + special.log_ndtr((gap - g * s * s) / s)
    ce_yes = -float(special.logsumexp([log_switch, log_stay])) / g
    return ce_yes - ce_no


def heavy_tail_catalytic_value(
    p: ModelParams,
    dof: float,
    *,
    span: float = 40.0,
    abs_tol: float = 1e-8,
) -> float:
    """Catalytic value when eps is Student-t with ``dof`` degrees of freedom,
    rescaled to variance ``sigma_eps**2``.

    Uses ``E[max(eps, -gap)] = E[(-gap - eps)^+]``. The integral is taken by
    adaptive quadrature over ``[-span*scale, -gap]``; the left tail beyond that
    is added in closed form from the t partial-moment identity.
    """
    _require_uncertainty(p, "heavy-tailed catalytic value")
    if not dof > 2:
        raise ParameterError(f"dof must exceed 2 for finite variance, got {dof}")
    gap = p.gap
    scale = p.sigma_eps * math.sqrt((dof - 2.0) / dof)
    dist = stats.t(dof, scale=scale)
    lower = -span * scale
    if lower >= -gap:
        body, err = 0.0, 0.0
        lower = -gap
    else:
        body, err = integrate.quad(
            lambda x: (-gap - x) * dist.pdf(x),
            lower,
            -gap,
            epsabs=abs_tol,
            epsrel=1e-12,
            limit=500,
        )
    if err > abs_tol:
        raise QuadratureError("heavy-tail quadrature missed tolerance", achieved_error=err, tol=abs_tol)
    # closed tail: int_{-inf}^{L} x f(x) dx = -scale * (dof + l^2)/(dof - 1) * f_std(l), l = L/scale
    l = lower / scale
    tail_mass = float(stats.t.cdf(l, dof))
    tail_first_moment = -scale * (dof + l * l) / (dof - 1.0) * float(stats.t.pdf(l, dof))
    tail = -gap * tail_mass - tail_first_moment
    return body + tail


def multidim_catalytic_value(per_dim_sigma: float, n: int, gap: float) -> float:
    """Catalytic value with ``n`` independent additive attributes of equal volatility."""
    if n < 1:
        raise ParameterError(f"n must be >= 1, got {n}")
    if per_dim_sigma < 0:
        raise ParameterError(f"per_dim_sigma must be >= 0, got {per_dim_sigma}")
    return catalytic_closed_form(gap, per_dim_sigma * math.sqrt(n))


def multidim_marginal_value(per_dim_sigma: float, n: float, gap: float) -> float:
    """Derivative of :func:`multidim_catalytic_value` in a continuous ``n``."""
    total = per_dim_sigma * math.sqrt(n)
    if total == 0:
        return 0.0
    return norm_pdf(gap / total) * per_dim_sigma / (2.0 * math.sqrt(n))


def expected_match_given_stay(p: ModelParams) -> float:
    """``E[eps | eps >= -gap]``: the inverse Mills ratio scaled by volatility."""
    _require_uncertainty(p, "validation effect")
    z = p.gap / p.sigma_eps
    # phi(z) / Phi(z) through the log-CDF to survive large z
    return p.sigma_eps * math.exp(-0.5 * z * z - math.log(SQRT_2PI) - float(special.log_ndtr(z)))
