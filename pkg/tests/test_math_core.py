import math
import random

import mpmath as mp
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import mp_oracle
from jumpcredit.math_core import (
    BsInputs,
    DegenerateInputError,
    bs_call,
    bs_greeks,
    bs_put,
    d1_d2,
    norm_cdf,
    norm_pdf,
)

EX = BsInputs(x=100.0, K=110.0, tau=2.0, sigma=0.2, r=0.05)
# mpmath at 50 digits
BS_CALL_EX = 11.455455871603173897
BS_PUT_EX = 10.987571855558726945
D1_EX, D2_EX = 0.15800237455184709485, -0.12484033792277193061

valid_inputs = st.builds(
    BsInputs,
    x=st.floats(1.0, 500.0),
    K=st.floats(1.0, 500.0),
    tau=st.floats(0.05, 10.0),
    sigma=st.floats(0.02, 1.5),
    r=st.floats(-0.05, 0.2),
)


def test_norm_cdf_points():
    assert norm_cdf(0.0) == 0.5
    assert abs(norm_cdf(8.0) - 1.0) <= 1e-15
    assert abs(norm_cdf(1.0) - 0.84134474606854294859) <= 1e-15


@pytest.mark.parametrize("z", [-37.5, -20.0, -8.0, -3.3, -1.0, -0.25, 0.0, 0.5, 1.7, 4.0, 8.0, 12.0])
def test_norm_cdf_matches_high_precision(z):
    assert abs(norm_cdf(z) - float(mp_oracle.ncdf(z))) <= 1e-15


@given(st.floats(-30, 30), st.floats(-30, 30))
def test_norm_cdf_monotone(a, b):
    lo, hi = sorted((a, b))
    assert norm_cdf(lo) <= norm_cdf(hi)


def test_norm_pdf():
    assert norm_pdf(0.0) == pytest.approx(0.3989422804014327, rel=1e-15)
    assert norm_pdf(1.0) == norm_pdf(-1.0)
    assert norm_pdf(2.0) == pytest.approx(0.053990966513188051951, rel=1e-14)


def test_d1_d2_examples():
    d1, d2 = d1_d2(BsInputs(100.0, 100.0, 1.0, 0.2, 0.02))
    assert d1 == pytest.approx(0.2, abs=1e-15)
    assert d2 == pytest.approx(0.0, abs=1e-15)
    d1, d2 = d1_d2(EX)
    assert d1 == pytest.approx(D1_EX, rel=1e-14)
    assert d2 == pytest.approx(D2_EX, rel=1e-13)


@given(valid_inputs)
def test_d1_minus_d2(inp):
    d1, d2 = d1_d2(inp)
    assert d1 - d2 == pytest.approx(inp.sigma * math.sqrt(inp.tau), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("bad", [dict(K=0.0), dict(sigma=0.0)])
def test_d1_d2_degenerate(bad):
    kw = dict(x=100.0, K=110.0, tau=2.0, sigma=0.2, r=0.05) | bad
    with pytest.raises(DegenerateInputError):
        d1_d2(BsInputs(**kw))


@pytest.mark.parametrize(
    "kw",
    [dict(x=0.0), dict(x=-1.0), dict(K=-1.0), dict(tau=0.0), dict(sigma=-0.1), dict(r=math.nan)],
)
def test_input_validation(kw):
    base = dict(x=100.0, K=110.0, tau=2.0, sigma=0.2, r=0.05)
    with pytest.raises(ValueError):
        BsInputs(**(base | kw))


def test_bs_call_examples():
    assert bs_call(BsInputs(123.0, 0.0, 1.0, 0.3, 0.01)) == 123.0
    assert bs_call(BsInputs(100.0, 110.0, 2.0, 0.0, 0.05)) == pytest.approx(0.46788401604444750445, rel=1e-13)
    assert bs_call(EX) == pytest.approx(BS_CALL_EX, rel=1e-14)


def test_bs_put_examples():
    assert bs_put(BsInputs(100.0, 0.0, 1.0, 0.3, 0.01)) == 0.0
    assert bs_put(EX) == pytest.approx(BS_PUT_EX, rel=1e-13)


@given(valid_inputs)
def test_put_call_parity(inp):
    lhs = bs_call(inp) - bs_put(inp)
    rhs = inp.x - inp.K * math.exp(-inp.r * inp.tau)
    assert abs(lhs - rhs) <= 1e-12 * max(inp.x, inp.K)


@given(valid_inputs)
def test_call_bounds(inp):
    c = bs_call(inp)
    assert max(inp.x - inp.K * math.exp(-inp.r * inp.tau), 0.0) <= c <= inp.x


@given(valid_inputs)
def test_greeks_sign_pattern(inp):
    g = bs_greeks(inp)
    assert 0.0 <= g.delta <= 1.0
    assert g.vega >= 0.0
    assert g.rho >= 0.0
    assert g.dC_dK <= 0.0
    if inp.r >= 0:
        assert g.theta >= 0.0


def test_greeks_sign_pattern_strict_at_example():
    g = bs_greeks(EX)
    assert 0 < g.delta < 1 and g.theta > 0 and g.vega > 0 and g.rho > 0 and g.dC_dK < 0


def _central(f, inp, field):
    value = getattr(inp, field)
    h = 6.055454452393343e-06 * max(1.0, abs(value))
    up = bs_call(BsInputs(**(vars(inp) | {field: value + h})))
    dn = bs_call(BsInputs(**(vars(inp) | {field: value - h})))
    return (up - dn) / (2 * h)


GREEK_FIELD = {"delta": "x", "theta": "tau", "vega": "sigma", "rho": "r", "dC_dK": "K"}


@pytest.mark.parametrize("greek", list(GREEK_FIELD))
def test_greeks_match_finite_differences_at_example(greek):
    analytic = getattr(bs_greeks(EX), greek)
    assert analytic == pytest.approx(_central(bs_call, EX, GREEK_FIELD[greek]), rel=1e-6)


def test_greeks_match_finite_differences_on_random_grid():
    rng = random.Random(7)
    worst = 0.0
    for _ in range(100):
        inp = BsInputs(
            x=rng.uniform(50, 150), K=rng.uniform(50, 150), tau=rng.uniform(0.25, 5),
            sigma=rng.uniform(0.1, 0.6), r=rng.uniform(0.0, 0.1),
        )
        g = bs_greeks(inp)
        for greek, field in GREEK_FIELD.items():
            a = getattr(g, greek)
            worst = max(worst, abs(a - _central(bs_call, inp, field)) / abs(a))
    assert worst <= 1e-6


def test_greeks_against_mpmath_derivatives():
    f = lambda x, K, tau, sigma, r: mp_oracle.bs_call(x, K, tau, sigma, r)  # noqa: E731
    args = (100, 110, 2, mp.mpf("0.2"), mp.mpf("0.05"))
    g = bs_greeks(EX)
    for i, greek in enumerate(["delta", "dC_dK", "theta", "vega", "rho"]):
        order = [0] * 5
        order[i] = 1
        exact = float(mp.diff(f, args, tuple(order)))
        assert getattr(g, greek) == pytest.approx(exact, rel=1e-12)


def test_deep_in_the_money_delta():
    assert abs(bs_greeks(BsInputs(1e6, 1.0, 1.0, 0.2, 0.05)).delta - 1.0) <= 1e-6


@pytest.mark.parametrize("field,direction", [("x", 1), ("sigma", 1), ("tau", 1), ("r", 1), ("K", -1)])
def test_call_monotone_on_grid(field, direction):
    grid = [0.5 + 0.05 * i for i in range(60)]
    base = vars(EX)
    scale = {"x": 100.0, "K": 110.0, "sigma": 0.2, "tau": 2.0, "r": 0.05}[field]
    prices = [bs_call(BsInputs(**(base | {field: scale * g}))) for g in grid]
    steps = [b - a for a, b in zip(prices, prices[1:])]
    assert all(direction * s >= 0 for s in steps)
