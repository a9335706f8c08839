"""Standard normal functions and the Black-Scholes call/put with closed-form Greeks."""

from __future__ import annotations

import math
from dataclasses import dataclass

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


class DegenerateInputError(ValueError):
    """Raised when d1/d2 are undefined (zero strike or zero volatility)."""


def norm_cdf(z: float) -> float:
    """Standard normal distribution function.

    Evaluated through ``erfc`` so both tails keep full relative accuracy;
    ``1 - erf`` style formulas lose everything past |z| ~ 8.
    """
    return 0.5 * math.erfc(-z / SQRT2)


def norm_pdf(z: float) -> float:
    return INV_SQRT_2PI * math.exp(-0.5 * z * z)


@dataclass(frozen=True)
class BsInputs:
    """Inputs of a European call on ``x`` struck at ``K`` expiring in ``tau`` years."""

    x: float
    K: float
    tau: float
    sigma: float
    r: float

    def __post_init__(self) -> None:
        for name in ("x", "K", "tau", "sigma", "r"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
        if self.x <= 0:
            raise ValueError(f"x must be > 0, got {self.x!r}")
        if self.K < 0:
            raise ValueError(f"K must be >= 0, got {self.K!r}")
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau!r}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma!r}")

    @property
    def discounted_strike(self) -> float:
        return self.K * math.exp(-self.r * self.tau)


@dataclass(frozen=True)
class BsGreeks:
    delta: float
    theta: float
    vega: float
    rho: float
    dC_dK: float


def d1_d2(inputs: BsInputs) -> tuple[float, float]:
    if inputs.K == 0 or inputs.sigma == 0:
        raise DegenerateInputError("d1/d2 undefined for K == 0 or sigma == 0")
    vol = inputs.sigma * math.sqrt(inputs.tau)
    d1 = (math.log(inputs.x / inputs.K) + (inputs.r + 0.5 * inputs.sigma**2) * inputs.tau) / vol
    return d1, d1 - vol


def d1_d2_limit(inputs: BsInputs) -> tuple[float, float]:
    """Like :func:`d1_d2` but returns the +/-inf limits in the degenerate cases.

    With ``K == 0`` both arguments are ``+inf``.  With ``sigma == 0`` the sign
    of the log-forward-moneyness decides; at-the-money forward maps to 0.
    """
    if inputs.K == 0:
        return math.inf, math.inf
    if inputs.sigma == 0:
        m = math.log(inputs.x / inputs.K) + inputs.r * inputs.tau
        d = math.copysign(math.inf, m) if m != 0 else 0.0
        return d, d
    return d1_d2(inputs)


def bs_call(inputs: BsInputs) -> float:
    x = inputs.x
    if inputs.K == 0:
        return x
    pv_strike = inputs.discounted_strike
    lower = max(x - pv_strike, 0.0)
    if inputs.sigma == 0:
        return lower
    d1, d2 = d1_d2(inputs)
    price = x * norm_cdf(d1) - pv_strike * norm_cdf(d2)
    # rounding can push a few ulps past the no-arbitrage bounds
    return min(max(price, lower), x)


def bs_put(inputs: BsInputs) -> float:
    if inputs.K == 0:
        return 0.0
    x = inputs.x
    pv_strike = inputs.discounted_strike
    lower = max(pv_strike - x, 0.0)
    if inputs.sigma == 0:
        return lower
    d1, d2 = d1_d2(inputs)
    price = pv_strike * norm_cdf(-d2) - x * norm_cdf(-d1)
    return min(max(price, lower), pv_strike)


def bs_greeks(inputs: BsInputs) -> BsGreeks:
    """Closed-form sensitivities of :func:`bs_call`.

    ``theta`` is the derivative with respect to time-to-maturity (positive
    for r >= 0), not the calendar-time convention used on trading desks.
    """
    d1, d2 = d1_d2(inputs)
    x, K, tau, sigma, r = inputs.x, inputs.K, inputs.tau, inputs.sigma, inputs.r
    sqrt_tau = math.sqrt(tau)
    disc = math.exp(-r * tau)
    pdf1 = norm_pdf(d1)
    n2 = norm_cdf(d2)
    return BsGreeks(
        delta=norm_cdf(d1),
        theta=x * sigma / (2.0 * sqrt_tau) * pdf1 + K * r * disc * n2,
        vega=x * sqrt_tau * pdf1,
        rho=tau * K * disc * n2,
        dC_dK=-disc * n2,
    )
