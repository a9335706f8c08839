"""Independent checks on the series: finite differences and Monte Carlo."""

from __future__ import annotations

import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Literal

import numpy as np

from .jump_model import (
    DEFAULT_TRUNCATION,
    JumpParams,
    MarketScenario,
    TruncationPolicy,
    bond_price,
    choose_truncation,
)
from .sensitivities import PARAMETERS

DEFAULT_REL_STEP = sys.float_info.epsilon ** (1.0 / 3.0)


class InvalidBumpError(ValueError):
    """A central bump would leave the parameter domain."""


@dataclass(frozen=True)
class FdSpec:
    parameter: str
    step: float = DEFAULT_REL_STEP
    scheme: Literal["central", "forward"] = "central"

    def __post_init__(self) -> None:
        if self.parameter not in PARAMETERS:
            raise ValueError(f"unknown parameter {self.parameter!r}; expected one of {PARAMETERS}")
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step!r}")
        if self.scheme not in ("central", "forward"):
            raise ValueError(f"unknown scheme {self.scheme!r}")


def parameter_value(s: MarketScenario, j: JumpParams, parameter: str) -> float:
    if parameter in ("V", "D", "sigma", "r", "tau"):
        return getattr(s, parameter)
    return {"delta": j.delta, "lambda": j.lam, "k": j.k}[parameter]


def with_parameter(
    s: MarketScenario, j: JumpParams, parameter: str, value: float
) -> tuple[MarketScenario, JumpParams]:
    """Return inputs with one coordinate moved, holding the other seven fixed.

    ``delta`` moves at fixed ``k`` and ``k`` moves at fixed ``delta``; in both
    cases ``mu`` is re-derived.
    """
    if parameter in ("V", "D", "sigma", "r", "tau"):
        return replace(s, **{parameter: value}), j
    if parameter == "lambda":
        return s, replace(j, lam=value)
    if parameter == "delta":
        return s, JumpParams.from_k(j.lam, j.k, value)
    if parameter == "k":
        return s, JumpParams.from_k(j.lam, value, j.delta)
    raise ValueError(f"unknown parameter {parameter!r}")


def _lower_limit(parameter: str) -> float | None:
    return {"V": 0.0, "tau": 0.0, "D": 0.0, "sigma": 0.0, "delta": 0.0, "lambda": 0.0, "k": -1.0}.get(
        parameter
    )


def fd_partial(
    s: MarketScenario,
    j: JumpParams,
    t: TruncationPolicy = DEFAULT_TRUNCATION,
    spec: FdSpec | None = None,
    *,
    parameter: str | None = None,
) -> float:
    """Finite-difference derivative of the bond price in one parameter.

    The truncation is resolved once (the largest N any of the evaluated
    points would need) and frozen, so an adaptive policy cannot change the
    number of terms between the two evaluations.
    """
    if spec is None:
        if parameter is None:
            raise TypeError("pass an FdSpec or a parameter name")
        spec = FdSpec(parameter)
    p = spec.parameter
    theta = parameter_value(s, j, p)
    h = spec.step * max(1.0, abs(theta))
    lo = _lower_limit(p)
    if spec.scheme == "forward":
        points = [theta, theta + h]
    else:
        if lo is not None and theta - h <= lo:
            raise InvalidBumpError(f"central bump of {p} = {theta!r} by {h:g} leaves the domain")
        points = [theta - h, theta + h]
    bumped = [with_parameter(s, j, p, v) for v in points]
    n = max(choose_truncation(t, jj.lambda_prime, ss.tau) for ss, jj in [(s, j), *bumped])
    frozen = TruncationPolicy.fixed(n, n_max=max(n, t.n_max))
    lo_price, hi_price = (bond_price(ss, jj, frozen) for ss, jj in bumped)
    return (hi_price - lo_price) / (points[1] - points[0])


@dataclass(frozen=True)
class McSpec:
    paths: int = 1_000_000
    seed: int = 20240607
    batch: int = 100_000
    antithetic: bool = True
    workers: int = 1

    def __post_init__(self) -> None:
        if self.paths < 1:
            raise ValueError(f"paths must be >= 1, got {self.paths!r}")
        if self.batch < 1:
            raise ValueError(f"batch must be >= 1, got {self.batch!r}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in 64 bits, got {self.seed!r}")
        if self.antithetic and (self.paths % 2 or self.batch % 2):
            raise ValueError("antithetic sampling needs even paths and batch sizes")
        if self.workers < 1:
            raise ValueError(f"workers must be >= 1, got {self.workers!r}")


def _batch_sizes(spec: McSpec) -> list[int]:
    full, rest = divmod(spec.paths, spec.batch)
    return [spec.batch] * full + ([rest] if rest else [])


def _batch_rng(spec: McSpec, index: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=spec.seed, spawn_key=(index,))
    return np.random.Generator(np.random.Philox(seq))


def _terminal_batch(s: MarketScenario, j: JumpParams, spec: McSpec, index: int, size: int) -> np.ndarray:
    """Terminal firm values of one batch under the compensated risk-neutral law.

    With antithetics the first half uses ``Z`` and the second half ``-Z``
    with the same jump draws, so row ``i`` pairs with row ``i + size/2``.
    """
    rng = _batch_rng(spec, index)
    m = size // 2 if spec.antithetic else size
    z = rng.standard_normal(m)
    counts = rng.poisson(j.lam * s.tau, m) if j.lam > 0 else np.zeros(m, dtype=np.int64)
    g = rng.standard_normal(m)
    # sum of `counts` iid N(mu, delta^2) log-jumps, sampled in one draw
    jumps = j.mu * counts + j.delta * np.sqrt(counts) * g
    drift = (s.r - j.lam * j.k - 0.5 * s.sigma**2) * s.tau
    vol = s.sigma * math.sqrt(s.tau)
    if spec.antithetic:
        z = np.concatenate([z, -z])
        jumps = np.concatenate([jumps, jumps])
    return s.V * np.exp(drift + vol * z + jumps)


def simulate_terminal_values(s: MarketScenario, j: JumpParams, spec: McSpec = McSpec()) -> np.ndarray:
    return np.concatenate(
        [_terminal_batch(s, j, spec, i, size) for i, size in enumerate(_batch_sizes(spec))]
    )


@dataclass(frozen=True)
class McEstimate:
    price: float
    std_err: float
    samples: int


def _pair_means(values: np.ndarray, antithetic: bool) -> np.ndarray:
    if not antithetic:
        return values
    half = values.size // 2
    return 0.5 * (values[:half] + values[half:])


def _reference_path(s: MarketScenario, j: JumpParams) -> float:
    # the path with Z = 0 and no jumps, evaluated through the same array
    # expression as the simulation so constant payoffs come out exact
    drift = np.full(2, (s.r - j.lam * j.k - 0.5 * s.sigma**2) * s.tau)
    return float((s.V * np.exp(drift + 0.0 * np.zeros(2) + np.zeros(2)))[0])


def mc_prices(s: MarketScenario, j: JumpParams, spec: McSpec = McSpec()) -> dict[str, McEstimate]:
    """Discounted call and bond estimates from a single set of paths."""
    disc = math.exp(-s.r * s.tau)
    ref = _reference_path(s, j)
    shifts = {"call": max(ref - s.D, 0.0), "bond": min(s.D, ref)}
    sizes = _batch_sizes(spec)

    def run(index: int):
        vt = _terminal_batch(s, j, spec, index, sizes[index])
        out = {}
        for name, payoff in (("call", np.maximum(vt - s.D, 0.0)), ("bond", np.minimum(s.D, vt))):
            u = _pair_means(payoff, spec.antithetic) - shifts[name]
            out[name] = (float(u.sum()), float(np.dot(u, u)), u.size)
        return out

    if spec.workers > 1:
        with ThreadPoolExecutor(max_workers=spec.workers) as pool:
            parts = list(pool.map(run, range(len(sizes))))
    else:
        parts = [run(i) for i in range(len(sizes))]

    result = {}
    for name in ("call", "bond"):
        total = math.fsum(p[name][0] for p in parts)
        total_sq = math.fsum(p[name][1] for p in parts)
        count = sum(p[name][2] for p in parts)
        mean_u = total / count
        var = max(total_sq / count - mean_u * mean_u, 0.0) * count / max(count - 1, 1)
        result[name] = McEstimate(
            price=disc * (shifts[name] + mean_u),
            std_err=disc * math.sqrt(var / count),
            samples=spec.paths,
        )
    return result


def mc_call_price(s: MarketScenario, j: JumpParams, spec: McSpec = McSpec()) -> tuple[float, float]:
    est = mc_prices(s, j, spec)["call"]
    return est.price, est.std_err


def mc_bond_price(s: MarketScenario, j: JumpParams, spec: McSpec = McSpec()) -> tuple[float, float]:
    est = mc_prices(s, j, spec)["bond"]
    return est.price, est.std_err
