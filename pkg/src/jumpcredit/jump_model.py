"""Merton jump-diffusion call as a Poisson-weighted Black-Scholes series.

Equity is the call on firm value struck at the debt's face value; the bond
is whatever is left of the firm, ``B = V - C``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

from .math_core import BsInputs, bs_call, d1_d2_limit

MAX_EXP_ARG = math.log(1.7976931348623157e308)
# beyond this exp(-lambda' tau) underflows and the weight recurrence breaks
MAX_POISSON_MEAN = 700.0


class TruncationCapError(RuntimeError):
    """Adaptive truncation needs more terms than the policy allows."""


@dataclass(frozen=True)
class MarketScenario:
    """Firm value ``V``, face value ``D``, maturity ``tau``, asset vol, short rate."""

    V: float
    D: float
    tau: float
    sigma: float
    r: float

    def __post_init__(self) -> None:
        for name in ("V", "D", "tau", "sigma", "r"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite number, got {value!r}")
        if self.V <= 0:
            raise ValueError(f"V must be > 0, got {self.V!r}")
        if self.D < 0:
            raise ValueError(f"D must be >= 0, got {self.D!r}")
        if self.tau <= 0:
            raise ValueError(f"tau must be > 0, got {self.tau!r}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma!r}")


@dataclass(frozen=True)
class JumpParams:
    """Poisson intensity and the normal law of ``ln(1 + Y)``.

    ``lam`` is the jump intensity (``lambda`` is reserved in Python).
    """

    lam: float
    mu: float
    delta: float

    def __post_init__(self) -> None:
        for name in ("lam", "mu", "delta"):
            value = getattr(self, name)
            if not isinstance(value, (int, float)) or not math.isfinite(value):
                raise ValueError(f"{name} must be a finite number, got {value!r}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam!r}")
        if self.delta < 0:
            raise ValueError(f"delta must be >= 0, got {self.delta!r}")
        if self.gamma > MAX_EXP_ARG:
            raise OverflowError(
                f"mu + delta^2/2 = {self.gamma!r} overflows exp(); mean jump size is not representable"
            )

    @classmethod
    def from_k(cls, lam: float, k: float, delta: float) -> "JumpParams":
        """Build from the mean jump size ``k`` with ``delta`` fixed (``mu`` is implied)."""
        if not k > -1:
            raise ValueError(f"k must be > -1, got {k!r}")
        return cls(lam=lam, mu=math.log1p(k) - 0.5 * delta * delta, delta=delta)

    @property
    def gamma(self) -> float:
        return self.mu + 0.5 * self.delta * self.delta

    @property
    def k(self) -> float:
        return math.expm1(self.gamma)

    @property
    def lambda_prime(self) -> float:
        return self.lam * math.exp(self.gamma)


def derive_jump_params(lam: float, mu: float, delta: float) -> JumpParams:
    return JumpParams(lam=lam, mu=mu, delta=delta)


@dataclass(frozen=True)
class TruncationPolicy:
    """How many series terms to keep: a fixed count or a Poisson tail-mass bound."""

    mode: Literal["fixed", "adaptive"] = "fixed"
    n_terms: int | None = 50
    epsilon: float | None = None
    n_max: int = 1000

    def __post_init__(self) -> None:
        if self.n_max < 0:
            raise ValueError(f"n_max must be >= 0, got {self.n_max!r}")
        if self.mode == "fixed":
            if self.n_terms is None or self.n_terms < 0 or int(self.n_terms) != self.n_terms:
                raise ValueError(f"fixed truncation needs an integer N >= 0, got {self.n_terms!r}")
            if self.n_terms > self.n_max:
                raise ValueError(f"N = {self.n_terms} exceeds n_max = {self.n_max}")
        elif self.mode == "adaptive":
            if self.epsilon is None or not 0 < self.epsilon < 1:
                raise ValueError(f"adaptive truncation needs epsilon in (0, 1), got {self.epsilon!r}")
        else:
            raise ValueError(f"unknown truncation mode {self.mode!r}")

    @classmethod
    def fixed(cls, n: int, n_max: int = 1000) -> "TruncationPolicy":
        return cls(mode="fixed", n_terms=n, epsilon=None, n_max=n_max)

    @classmethod
    def adaptive(cls, epsilon: float, n_max: int = 1000) -> "TruncationPolicy":
        return cls(mode="adaptive", n_terms=None, epsilon=epsilon, n_max=n_max)


DEFAULT_TRUNCATION = TruncationPolicy.fixed(50)


def poisson_weights(mean: float, n: int) -> list[float]:
    """``P(N = j)`` for ``j = 0..n`` by the ratio recurrence (no factorials)."""
    if mean < 0:
        raise ValueError(f"Poisson mean must be >= 0, got {mean!r}")
    if mean > MAX_POISSON_MEAN:
        raise OverflowError(f"Poisson mean {mean!r} too large for the weight recurrence")
    w = math.exp(-mean)
    weights = [w]
    for j in range(1, n + 1):
        w = w * mean / j
        weights.append(w)
    return weights


def choose_truncation(policy: TruncationPolicy, lambda_prime: float, tau: float) -> int:
    if policy.mode == "fixed":
        return int(policy.n_terms)
    mean = lambda_prime * tau
    if mean > MAX_POISSON_MEAN:
        raise OverflowError(f"Poisson mean {mean!r} too large for the weight recurrence")
    target = 1.0 - policy.epsilon
    w = math.exp(-mean)
    partial = [w]
    n = 0
    while math.fsum(partial) < target:
        n += 1
        if n > policy.n_max:
            raise TruncationCapError(
                f"tail mass below {policy.epsilon:g} needs more than n_max = {policy.n_max} terms "
                f"(lambda' tau = {mean:g})"
            )
        w = w * mean / n
        partial.append(w)
    return n


@dataclass(frozen=True)
class TermDiagnostics:
    n: int
    weight: float
    sigma_n: float
    r_n: float
    d1n: float
    d2n: float
    term_price: float


@dataclass(frozen=True)
class PriceBreakdown:
    call_price: float
    bond_price: float
    equity_price: float
    terms: list[TermDiagnostics] = field(repr=False)
    truncation_used: int
    tail_mass: float


def term_inputs(s: MarketScenario, j: JumpParams, n: int) -> BsInputs:
    """Black-Scholes inputs of the ``n``-jump term: shifted rate and widened vol."""
    sigma_n = math.sqrt(s.sigma**2 + n * j.delta**2 / s.tau)
    r_n = s.r + n * j.gamma / s.tau - j.lam * j.k
    return BsInputs(x=s.V, K=s.D, tau=s.tau, sigma=sigma_n, r=r_n)


def series_term(s: MarketScenario, j: JumpParams, n: int, weight: float) -> TermDiagnostics:
    inputs = term_inputs(s, j, n)
    d1n, d2n = d1_d2_limit(inputs)
    return TermDiagnostics(
        n=n,
        weight=weight,
        sigma_n=inputs.sigma,
        r_n=inputs.r,
        d1n=d1n,
        d2n=d2n,
        term_price=bs_call(inputs),
    )


def merton_call(
    s: MarketScenario,
    j: JumpParams,
    t: TruncationPolicy = DEFAULT_TRUNCATION,
) -> PriceBreakdown:
    n_terms = choose_truncation(t, j.lambda_prime, s.tau)
    weights = poisson_weights(j.lambda_prime * s.tau, n_terms)
    terms = [series_term(s, j, n, w) for n, w in enumerate(weights)]
    call = math.fsum(term.weight * term.term_price for term in terms)
    tail = max(1.0 - math.fsum(weights), 0.0)
    return PriceBreakdown(
        call_price=call,
        bond_price=s.V - call,
        equity_price=call,
        terms=terms,
        truncation_used=n_terms,
        tail_mass=tail,
    )


def bond_price(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return merton_call(s, j, t).bond_price


def equity_price(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return merton_call(s, j, t).equity_price
