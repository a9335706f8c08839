"""Structural credit pricing with a log-normal jump-diffusion firm value.

Equity is a Merton jump-diffusion call on firm value struck at the face
value of zero-coupon debt; the bond is ``V - equity``.
"""

from .jump_model import (
    DEFAULT_TRUNCATION,
    JumpParams,
    MarketScenario,
    PriceBreakdown,
    TermDiagnostics,
    TruncationCapError,
    TruncationPolicy,
    bond_price,
    choose_truncation,
    derive_jump_params,
    merton_call,
)
from .math_core import BsGreeks, BsInputs, bs_call, bs_greeks, bs_put, d1_d2, norm_cdf, norm_pdf
from .sensitivities import SensitivityReport, full_report

__all__ = [
    "BsGreeks", "BsInputs", "DEFAULT_TRUNCATION", "JumpParams", "MarketScenario", "PriceBreakdown",
    "SensitivityReport", "TermDiagnostics", "TruncationCapError", "TruncationPolicy", "bond_price",
    "bs_call", "bs_greeks", "bs_put", "choose_truncation", "d1_d2", "derive_jump_params",
    "full_report", "merton_call", "norm_cdf", "norm_pdf",
]
