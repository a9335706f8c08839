"""Closed-form first-order sensitivities of the bond price ``B = V - C^J``.

Every partial is a Poisson-weighted series over the same terms the pricer
uses.  Parameters are independent coordinates: ``dB_dk`` moves ``k`` with
``delta`` fixed (so ``mu`` absorbs the change) and ``dB_ddelta`` moves
``delta`` with ``k`` fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .jump_model import (
    DEFAULT_TRUNCATION,
    JumpParams,
    MarketScenario,
    PriceBreakdown,
    TermDiagnostics,
    TruncationPolicy,
    merton_call,
    series_term,
)
from .math_core import norm_cdf, norm_pdf

PARAMETERS = ("V", "D", "sigma", "r", "tau", "delta", "lambda", "k")
FIELD_FOR = {p: f"dB_d{p}" for p in PARAMETERS}


def _check(s: MarketScenario) -> None:
    if s.D <= 0:
        raise ValueError(f"sensitivities need D > 0, got D = {s.D!r}")
    if s.sigma <= 0:
        raise ValueError(f"sensitivities need sigma > 0, got sigma = {s.sigma!r}")


def _breakdown(s, j, t) -> PriceBreakdown:
    _check(s)
    return merton_call(s, j, t)


def discount_bound(s: MarketScenario, j: JumpParams) -> float:
    """``exp(-(r - lambda k) tau)``, the upper end of the proven ``dB/dD`` interval."""
    return math.exp(-(s.r - j.lam * j.k) * s.tau)


def _pv_strike_n(s: MarketScenario, term: TermDiagnostics) -> float:
    return s.D * math.exp(-term.r_n * s.tau)


# series kernels shared by the public functions and full_report


def _dB_dV(s, j, pb: PriceBreakdown) -> float:
    # 1 - sum w N(d1) written so the tail mass enters without cancellation
    return math.fsum([pb.tail_mass] + [tm.weight * norm_cdf(-tm.d1n) for tm in pb.terms])


def _shared_d2_series(s, j, pb: PriceBreakdown) -> float:
    return math.fsum(tm.weight * math.exp(-tm.n * j.gamma) * norm_cdf(tm.d2n) for tm in pb.terms)


def _dB_dD(s, j, pb) -> float:
    return discount_bound(s, j) * _shared_d2_series(s, j, pb)


def _dB_dsigma(s, j, pb) -> float:
    total = math.fsum(tm.weight * norm_pdf(tm.d1n) * (s.sigma / tm.sigma_n) for tm in pb.terms)
    return -s.V * math.sqrt(s.tau) * total


def _tau_parts(s, j, pb) -> tuple[float, float, float]:
    """``(S1, S2, cut)``: weight part, term part, and the truncation correction.

    ``S1 + S2`` is the derivative of the untruncated series cut after ``N``
    terms; adding ``cut = -lambda' w_N C_{N+1}`` makes the sum the exact
    derivative of the ``N``-term price that :func:`merton_call` returns.
    """
    lp = j.lambda_prime
    terms = pb.terms
    nxt = series_term(s, j, pb.truncation_used + 1, 0.0)
    prices = [tm.term_price for tm in terms] + [nxt.term_price]
    s1 = lp * math.fsum(tm.weight * (prices[i + 1] - prices[i]) for i, tm in enumerate(terms))
    drift = s.r - j.lam * j.k
    sqrt_tau = math.sqrt(s.tau)
    s2 = math.fsum(
        tm.weight
        * (
            s.V * norm_pdf(tm.d1n) * s.sigma**2 / (2.0 * sqrt_tau * tm.sigma_n)
            + _pv_strike_n(s, tm) * norm_cdf(tm.d2n) * drift
        )
        for tm in terms
    )
    cut = -lp * terms[-1].weight * nxt.term_price
    return s1, s2, cut


def _dB_ddelta(s, j, pb) -> float:
    if j.delta == 0:
        return 0.0
    total = math.fsum(tm.weight * norm_pdf(tm.d1n) * tm.n / tm.sigma_n for tm in pb.terms)
    return -(s.V * j.delta / math.sqrt(s.tau)) * total


def _dB_dlambda(s, j, pb) -> tuple[float, str]:
    """Returns the partial and which form produced it (``series`` or ``limit``)."""
    tau, k, lam = s.tau, j.k, j.lam
    if lam > 0:
        dC = math.fsum(
            tm.weight * (tm.term_price * (tm.n / lam - tau) - k * tau * s.V * norm_cdf(tm.d1n))
            for tm in pb.terms
        )
        return -dC, "series"
    # lambda -> 0+: w_n n / lambda -> (1 + k) tau w_{n-1}, only n <= 1 survive
    c0 = pb.terms[0]
    c1 = series_term(s, j, 1, 0.0)
    dC = (1.0 + k) * tau * (c1.term_price - c0.term_price) - k * tau * _pv_strike_n(s, c0) * norm_cdf(c0.d2n)
    return -dC, "limit"


def _dB_dk(s, j, pb) -> float:
    lpt = j.lambda_prime * s.tau
    one_k = 1.0 + j.k
    total = math.fsum(tm.weight * (tm.n - lpt) / one_k * norm_cdf(tm.d1n) for tm in pb.terms)
    return -s.V * total


# public single-partial entry points


def dB_dV(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return _dB_dV(s, j, _breakdown(s, j, t))


def dB_dD(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return _dB_dD(s, j, _breakdown(s, j, t))


def dB_dsigma(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return _dB_dsigma(s, j, _breakdown(s, j, t))


def dB_dr(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return -s.tau * s.D * _dB_dD(s, j, _breakdown(s, j, t))


def dB_dtau(
    s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION
) -> tuple[float, float, float]:
    """Returns ``(dB/dtau, S1, S2)``.

    ``S1`` collects the change of the Poisson weights and is positive because
    the terms grow with ``n``; ``S2`` collects the change of each
    Black-Scholes term and is positive whenever ``r - lambda k >= 0``.  The
    returned derivative also carries the (tail-sized) truncation correction.
    """
    s1, s2, cut = _tau_parts(s, j, _breakdown(s, j, t))
    return -(s1 + s2 + cut), s1, s2


def dB_ddelta(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return _dB_ddelta(s, j, _breakdown(s, j, t))


def dB_dlambda(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return _dB_dlambda(s, j, _breakdown(s, j, t))[0]


def dB_dk(s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION) -> float:
    return _dB_dk(s, j, _breakdown(s, j, t))


@dataclass(frozen=True)
class SensitivityReport:
    dB_dV: float
    dB_dD: float
    dB_dsigma: float
    dB_dr: float
    dB_dtau: float
    dB_ddelta: float
    dB_dlambda: float
    dB_dk: float
    bounds: dict[str, tuple[float, float] | None]
    condition_r_minus_lambda_k: float
    tau_monotonicity_guaranteed: bool
    S1: float = 0.0
    S2: float = 0.0
    tau_truncation_term: float = 0.0
    lambda_method: str = "series"
    breakdown: PriceBreakdown | None = field(default=None, repr=False, compare=False)

    def partial(self, parameter: str) -> float:
        return getattr(self, FIELD_FOR[parameter])

    def as_dict(self) -> dict[str, float]:
        return {FIELD_FOR[p]: self.partial(p) for p in PARAMETERS}

    def equity(self) -> dict[str, float]:
        """Partials of the equity value ``S = V - B``."""
        out = {f"dS_d{p}": -self.partial(p) for p in PARAMETERS}
        out["dS_dV"] = 1.0 - self.dB_dV
        return out

    def bound_violations(self) -> list[str]:
        bad = []
        for name, interval in self.bounds.items():
            if interval is None:
                continue
            lo, hi = interval
            if not lo < getattr(self, name) < hi:
                bad.append(name)
        return bad


def full_report(
    s: MarketScenario, j: JumpParams, t: TruncationPolicy = DEFAULT_TRUNCATION
) -> SensitivityReport:
    pb = _breakdown(s, j, t)
    dD = _dB_dD(s, j, pb)
    s1, s2, cut = _tau_parts(s, j, pb)
    dlam, how = _dB_dlambda(s, j, pb)
    cap = discount_bound(s, j)
    condition = s.r - j.lam * j.k
    bounds: dict[str, tuple[float, float] | None] = {f: None for f in FIELD_FOR.values()}
    bounds["dB_dV"] = (0.0, 1.0)
    bounds["dB_dD"] = (0.0, cap)
    bounds["dB_dr"] = (-s.tau * s.D * cap, 0.0)
    return SensitivityReport(
        dB_dV=_dB_dV(s, j, pb),
        dB_dD=dD,
        dB_dsigma=_dB_dsigma(s, j, pb),
        dB_dr=-s.tau * s.D * dD,
        dB_dtau=-(s1 + s2 + cut),
        dB_ddelta=_dB_ddelta(s, j, pb),
        dB_dlambda=dlam,
        dB_dk=_dB_dk(s, j, pb),
        bounds=bounds,
        condition_r_minus_lambda_k=condition,
        tau_monotonicity_guaranteed=condition >= 0,
        S1=s1,
        S2=s2,
        tau_truncation_term=cut,
        lambda_method=how,
        breakdown=pb,
    )
