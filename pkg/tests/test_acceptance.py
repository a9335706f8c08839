"""Acceptance criteria, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line; run with ``pytest -s``
to see them.  Grids and seeds are fixed here so every run sees the same
points.
"""

import io
import math
import random
import time

import pytest

from jumpcredit.cli import main
from jumpcredit.jump_model import (
    JumpParams,
    MarketScenario,
    TruncationPolicy,
    merton_call,
    term_inputs,
)
from jumpcredit.math_core import bs_call, bs_put, BsInputs
from jumpcredit.oracles import FdSpec, McSpec, fd_partial, mc_prices
from jumpcredit.scenario import EXPECTED_TREND, classify_trend, figure_preset, run_sweep
from jumpcredit.sensitivities import PARAMETERS, FIELD_FOR, discount_bound, full_report

ADAPTIVE = TruncationPolicy.adaptive(1e-13)
GRID_SEED = 2024
GRID_SIZE = 256
MC_SEED_BASE = 12345


def report(number, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")


def random_grid(seed=GRID_SEED, size=GRID_SIZE, max_mean=5.0):
    """Random scenarios over the figure-caption ranges with lambda' tau <= max_mean."""
    rng = random.Random(seed)
    points = []
    while len(points) < size:
        s = MarketScenario(
            V=rng.uniform(80, 120), D=rng.uniform(80, 120), tau=rng.uniform(0.1, 5),
            sigma=rng.uniform(0.05, 0.5), r=rng.uniform(0.01, 0.1),
        )
        j = JumpParams(lam=rng.uniform(0.01, 0.2), mu=rng.uniform(-0.2, 0.2), delta=rng.uniform(0.01, 1))
        if j.lambda_prime * s.tau <= max_mean:
            points.append((s, j))
    return points


@pytest.fixture(scope="module")
def grid():
    return random_grid()


@pytest.fixture(scope="module")
def grid_reports(grid):
    return [full_report(s, j, ADAPTIVE) for s, j in grid]


def test_criterion_1_no_jump_collapse():
    rng = random.Random(1)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(100):
        s = MarketScenario(
            V=rng.uniform(1, 200), D=rng.uniform(1, 200), tau=rng.uniform(0.05, 10),
            sigma=rng.uniform(0.01, 1.0), r=rng.uniform(-0.02, 0.15),
        )
        j = JumpParams(lam=0.0, mu=rng.uniform(-1, 1), delta=rng.uniform(0, 1))
        series = merton_call(s, j).call_price
        ref = bs_call(BsInputs(s.V, s.D, s.tau, s.sigma, s.r))
        worst = max(worst, abs(series - ref) / max(abs(ref), 1e-300))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-12 and elapsed < 1.0
    report(1, ok, f"lambda=0 collapse worst rel {worst:.2e} (tol 1e-12), {elapsed:.3f}s (< 1s)")
    assert ok


def mc_scenarios():
    rng = random.Random(99)
    out = [figure_preset(1).point(100.0)[:2]]
    while len(out) < 20:
        s = MarketScenario(
            V=rng.uniform(80, 120), D=rng.uniform(80, 120), tau=rng.uniform(0.1, 5),
            sigma=rng.uniform(0.05, 0.5), r=rng.uniform(0.01, 0.1),
        )
        j = JumpParams(lam=rng.uniform(0.0, 1.0), mu=rng.uniform(-0.5, 0.3), delta=rng.uniform(0.01, 1))
        if j.lambda_prime * s.tau <= 5:
            out.append((s, j))
    return out


@pytest.mark.slow
def test_criterion_2_monte_carlo_concordance():
    t0 = time.perf_counter()
    worst_z = 0.0
    misses = 0
    for i, (s, j) in enumerate(mc_scenarios()):
        series = merton_call(s, j, ADAPTIVE).call_price
        est = mc_prices(s, j, McSpec(paths=1_000_000, seed=MC_SEED_BASE + i))["call"]
        z = abs(series - est.price) / est.std_err
        worst_z = max(worst_z, z)
        misses += z > 3
    elapsed = time.perf_counter() - t0
    ok = misses == 0 and elapsed < 60
    report(2, ok, f"MC concordance 20 scenarios, worst |z| {worst_z:.2f} (tol 3), {elapsed:.1f}s (< 60s)")
    assert ok


def test_criterion_3_finite_difference_concordance(grid, grid_reports):
    t0 = time.perf_counter()
    worst = {p: 0.0 for p in PARAMETERS}
    failures = []
    for (s, j), rep in zip(grid, grid_reports):
        for p in PARAMETERS:
            tol = 1e-4 if p in ("lambda", "k") else 1e-6
            fd = fd_partial(s, j, ADAPTIVE, FdSpec(p))
            an = rep.partial(p)
            rel = abs(an - fd) / max(abs(an), 1e-300)
            worst[p] = max(worst[p], rel)
            if rel > tol:
                failures.append((p, s, j, an, fd))
    elapsed = time.perf_counter() - t0
    ok = not failures and elapsed < 30
    detail = ", ".join(f"{p} {w:.1e}" for p, w in worst.items())
    report(3, ok, f"FD concordance on {len(grid)} points, worst rel: {detail}; {elapsed:.1f}s (< 30s)")
    assert ok, failures[:3]


def test_criterion_4_proven_bounds(grid, grid_reports):
    violations = []
    for (s, j), rep in zip(grid, grid_reports):
        cap = discount_bound(s, j)
        checks = {
            "dB_dV": 0 < rep.dB_dV < 1,
            "dB_dD": 0 < rep.dB_dD < cap,
            "dB_dr": -s.tau * s.D * cap < rep.dB_dr < 0,
        }
        violations += [(name, s, j) for name, good in checks.items() if not good]
    ok = not violations
    report(4, ok, f"bounds on dB_dV, dB_dD, dB_dr over {len(grid)} points: {len(violations)} violations")
    assert ok, violations[:3]


def test_criterion_5_conditional_tau_monotonicity(grid, grid_reports):
    sub = [rep for rep in grid_reports if rep.condition_r_minus_lambda_k >= 0]
    bad = sum(rep.dB_dtau >= 0 for rep in sub)
    curve = [row.bond_price for row in run_sweep(figure_preset(7)).rows]
    fig7_trend = classify_trend(curve)["trend"]
    ok = bad == 0 and len(sub) > 0 and fig7_trend != "decreasing"
    report(5, ok, f"dB_dtau < 0 on {len(sub)} points with r - lambda k >= 0: {bad} violations; "
                  f"preset 7 trend {fig7_trend!r} (must not be 'decreasing')")
    assert ok


EXPECTED = {n: EXPECTED_TREND[n] for n in (1, 2, 3, 4, 5, 6, 8)}


@pytest.mark.parametrize("n", sorted(EXPECTED))
def test_criterion_6_figure_trends(n):
    t0 = time.perf_counter()
    curve = [row.bond_price for row in run_sweep(figure_preset(n)).rows]
    elapsed = time.perf_counter() - t0
    trend = classify_trend(curve)["trend"]
    ok = trend == EXPECTED[n] and elapsed < 1.0
    report(6, ok, f"preset {n} trend {trend!r} (want {EXPECTED[n]!r}), {elapsed:.3f}s (< 1s)")
    assert ok


def test_criterion_7_identities(grid, grid_reports):
    worst_sum = worst_parity = 0.0
    exact_rho = True
    for (s, j), rep in zip(grid, grid_reports):
        pb = rep.breakdown
        worst_sum = max(worst_sum, abs(pb.bond_price + pb.equity_price - s.V) / s.V)
        exact_rho &= rep.dB_dr == -s.tau * s.D * rep.dB_dD
        for tm in pb.terms[:10]:
            inputs = term_inputs(s, j, tm.n)
            lhs = bs_call(inputs) - bs_put(inputs)
            rhs = s.V - inputs.discounted_strike
            worst_parity = max(worst_parity, abs(lhs - rhs) / max(s.V, abs(rhs)))
    ok = worst_sum <= 4 * 2.2e-16 and exact_rho and worst_parity <= 1e-12
    report(7, ok, f"B+S=V worst rel {worst_sum:.1e}; dB_dr == -tau D dB_dD exact: {exact_rho}; "
                  f"per-term parity worst rel {worst_parity:.1e} (tol 1e-12)")
    assert ok


def _run(argv):
    buf = io.StringIO()
    return main(argv, out=buf), buf.getvalue()


def test_criterion_8_determinism(tmp_path):
    outputs = []
    for rep in range(2):
        v = tmp_path / f"validate{rep}.csv"
        w = tmp_path / f"sweep{rep}.csv"
        _run(["validate", "--mc-paths", "200000", "--seed", "42", "--out", str(v)])
        _run(["figure", "5", "--sensitivities", "--out", str(w)])
        outputs.append((v.read_bytes(), w.read_bytes()))
    ok = outputs[0] == outputs[1] and all(outputs[0])
    report(8, ok, "validate and sweep CSV byte-identical across repeated runs")
    assert ok
