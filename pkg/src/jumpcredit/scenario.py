"""Scenario files, figure presets and parameter sweeps with CSV output."""

from __future__ import annotations

import csv
import io
import math
import os
import tempfile
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .jump_model import (
    DEFAULT_TRUNCATION,
    JumpParams,
    MarketScenario,
    TruncationPolicy,
    merton_call,
)
from .sensitivities import FIELD_FOR, PARAMETERS, SensitivityReport, full_report

SWEEP_PARAMETERS = ("V", "D", "sigma", "r", "tau", "delta", "lambda", "mu_for_k")
MAX_ROWS = 1_000_000
BASE_COLUMNS = ["param", "bond_price", "equity_price", "call_price", "tail_mass"]
SENSITIVITY_COLUMNS = [FIELD_FOR[p] for p in PARAMETERS]


@dataclass(frozen=True)
class Inputs:
    """A fully specified pricing point: market block, jump block, truncation."""

    scenario: MarketScenario
    jumps: JumpParams
    truncation: TruncationPolicy = DEFAULT_TRUNCATION


BASE_SCENARIO = MarketScenario(V=100.0, D=110.0, tau=2.0, sigma=0.2, r=0.05)
BASE_JUMPS = JumpParams(lam=0.1, mu=-0.2, delta=0.6)


def grid_count(start: float, stop: float, step: float) -> int:
    # small slack so 0.1..5 step 0.1 keeps its last point
    return int(math.floor((stop - start) / step + 1e-9)) + 1


def grid_values(start: float, stop: float, step: float) -> list[float]:
    return [float(f"{start + i * step:.12g}") for i in range(grid_count(start, stop, step))]


@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    start: float
    stop: float
    step: float
    scenario: MarketScenario = BASE_SCENARIO
    jumps: JumpParams = BASE_JUMPS
    truncation: TruncationPolicy = DEFAULT_TRUNCATION
    emit_sensitivities: bool = False

    def __post_init__(self) -> None:
        if self.parameter not in SWEEP_PARAMETERS:
            raise ValueError(f"param must be one of {', '.join(SWEEP_PARAMETERS)}; got {self.parameter!r}")
        for name in ("start", "stop", "step"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if not self.step > 0:
            raise ValueError(f"step must be > 0, got {self.step!r}")
        if not self.start < self.stop:
            raise ValueError(f"from must be < to, got from={self.start!r} to={self.stop!r}")
        if grid_count(self.start, self.stop, self.step) > MAX_ROWS:
            raise ValueError(f"sweep would produce more than {MAX_ROWS} rows")

    def values(self) -> list[float]:
        return grid_values(self.start, self.stop, self.step)

    def point(self, value: float) -> tuple[MarketScenario, JumpParams]:
        """Inputs at one grid value; raises ``ValueError`` naming the field if invalid."""
        p = self.parameter
        if p in ("V", "D", "sigma", "r", "tau"):
            return replace(self.scenario, **{p: value}), self.jumps
        if p == "lambda":
            return self.scenario, replace(self.jumps, lam=value)
        if p == "delta":
            return self.scenario, replace(self.jumps, delta=value)
        return self.scenario, replace(self.jumps, mu=value)

    def columns(self) -> list[str]:
        cols = list(BASE_COLUMNS)
        if self.parameter == "mu_for_k":
            cols.insert(1, "k")
        if self.emit_sensitivities:
            cols += SENSITIVITY_COLUMNS
        return cols


@dataclass(frozen=True)
class SweepRow:
    param_value: float
    bond_price: float
    equity_price: float
    call_price: float
    tail_mass: float
    k: float | None = None
    sensitivities: SensitivityReport | None = None


@dataclass
class SweepResult:
    spec: SweepSpec
    rows: list[SweepRow] = field(default_factory=list)

    def bond_prices(self) -> list[float]:
        return [row.bond_price for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\r\n")
        cols = self.spec.columns()
        writer.writerow(cols)
        for row in self.rows:
            values = {
                "param": row.param_value,
                "k": row.k,
                "bond_price": row.bond_price,
                "equity_price": row.equity_price,
                "call_price": row.call_price,
                "tail_mass": row.tail_mass,
            }
            if row.sensitivities is not None:
                values.update(row.sensitivities.as_dict())
            writer.writerow([repr(float(values[c])) for c in cols])
        return buf.getvalue()


def sweep_row(spec: SweepSpec, value: float) -> SweepRow:
    s, j = spec.point(value)
    pb = merton_call(s, j, spec.truncation)
    return SweepRow(
        param_value=value,
        bond_price=pb.bond_price,
        equity_price=pb.equity_price,
        call_price=pb.call_price,
        tail_mass=pb.tail_mass,
        k=j.k if spec.parameter == "mu_for_k" else None,
        sensitivities=full_report(s, j, spec.truncation) if spec.emit_sensitivities else None,
    )


def run_sweep(spec: SweepSpec) -> SweepResult:
    return SweepResult(spec=spec, rows=[sweep_row(spec, v) for v in spec.values()])


def write_atomic(path: str | os.PathLike, text: str) -> None:
    """Write via a temp file in the target directory, then rename over ``path``."""
    target = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{target.name}.", dir=target.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def classify_trend(values: list[float]) -> dict[str, object]:
    """Label a curve increasing/decreasing/constant/mixed from adjacent steps.

    A step counts as a move only if it exceeds ``1e-12 * max(1, |B|)``.
    """
    ups = downs = flats = 0
    for a, b in zip(values, values[1:]):
        tol = 1e-12 * max(1.0, abs(a), abs(b))
        if b - a > tol:
            ups += 1
        elif a - b > tol:
            downs += 1
        else:
            flats += 1
    if ups and not downs and not flats:
        label = "increasing"
    elif downs and not ups and not flats:
        label = "decreasing"
    elif not ups and not downs:
        label = "constant"
    else:
        net = values[-1] - values[0] if values else 0.0
        label = "mixed/increasing" if net > 0 else "mixed/decreasing" if net < 0 else "mixed"
    return {"trend": label, "up_steps": ups, "down_steps": downs, "flat_steps": flats}


# figure presets; numbering follows the artifact's contract, preset 9 adds
# the intensity sweep so every proposition has a curve

_PRESETS: dict[int, dict] = {
    1: dict(parameter="V", start=80.0, stop=120.0, step=2.0),
    2: dict(parameter="D", start=80.0, stop=120.0, step=2.0),
    3: dict(parameter="sigma", start=0.05, stop=0.5, step=0.01),
    4: dict(parameter="r", start=0.01, stop=0.1, step=0.002),
    5: dict(parameter="tau", start=0.1, stop=5.0, step=0.1),
    6: dict(parameter="delta", start=0.01, stop=1.0, step=0.02),
    7: dict(
        parameter="tau",
        start=0.1,
        stop=5.0,
        step=0.1,
        scenario=replace(BASE_SCENARIO, V=12.0, D=10.0),
        jumps=JumpParams(lam=0.1, mu=0.8, delta=3.0),
    ),
    8: dict(parameter="mu_for_k", start=-0.1, stop=0.2, step=0.01),
    9: dict(parameter="lambda", start=0.01, stop=0.2, step=0.01),
}
PRESET_NUMBERS = tuple(sorted(_PRESETS))
EXPECTED_TREND = {1: "increasing", 2: "increasing", 3: "decreasing", 4: "decreasing",
                  5: "decreasing", 6: "decreasing", 8: "decreasing", 9: "decreasing"}


def figure_preset(n: int) -> SweepSpec:
    if n not in _PRESETS:
        raise ValueError(f"figure preset must be one of {PRESET_NUMBERS}, got {n!r}")
    return SweepSpec(**_PRESETS[n])


# flat key = value scenario files

_SCENARIO_KEYS = {"V": "V", "D": "D", "tau": "tau", "sigma": "sigma", "r": "r"}
_JUMP_KEYS = {"lambda": "lam", "mu": "mu", "delta": "delta"}
_BOOL = {"true": True, "false": False, "1": True, "0": False, "yes": True, "no": False}


def parse_kv(text: str) -> dict[str, str]:
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in out:
            raise ValueError(f"line {lineno}: duplicate key {key!r}")
        out[key] = value
    return out


def _float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ValueError(f"{key}: not a number: {value!r}") from None


def truncation_from(values: dict[str, str], default: TruncationPolicy = DEFAULT_TRUNCATION) -> TruncationPolicy:
    if "nterms" in values and "tail_eps" in values:
        raise ValueError("nterms and tail_eps are mutually exclusive")
    if "tail_eps" in values:
        return TruncationPolicy.adaptive(_float("tail_eps", values["tail_eps"]))
    if "nterms" in values:
        try:
            return TruncationPolicy.fixed(int(values["nterms"]))
        except ValueError as exc:
            raise ValueError(f"nterms: {exc}") from None
    return default


def inputs_from(values: dict[str, str], base: Inputs | None = None) -> Inputs:
    """Overlay ``values`` on ``base`` (the figure-caption base point by default)."""
    base = base or Inputs(BASE_SCENARIO, BASE_JUMPS)
    s_kw = {f.name: getattr(base.scenario, f.name) for f in fields(MarketScenario)}
    j_kw = {f.name: getattr(base.jumps, f.name) for f in fields(JumpParams)}
    for key, attr in _SCENARIO_KEYS.items():
        if key in values:
            s_kw[attr] = _float(key, values[key])
    for key, attr in _JUMP_KEYS.items():
        if key in values:
            j_kw[attr] = _float(key, values[key])
    try:
        scenario = MarketScenario(**s_kw)
    except ValueError as exc:
        raise ValueError(f"scenario: {exc}") from None
    try:
        jumps = JumpParams(**j_kw)
    except (ValueError, OverflowError) as exc:
        raise ValueError(f"jumps: {exc}") from None
    return Inputs(scenario, jumps, truncation_from(values, base.truncation))


def sweep_from(values: dict[str, str], base: SweepSpec | None = None) -> SweepSpec:
    base_inputs = Inputs(base.scenario, base.jumps, base.truncation) if base else None
    inputs = inputs_from(values, base_inputs)
    kw = dict(
        parameter=values.get("param", base.parameter if base else None),
        start=_float("from", values["from"]) if "from" in values else (base.start if base else None),
        stop=_float("to", values["to"]) if "to" in values else (base.stop if base else None),
        step=_float("step", values["step"]) if "step" in values else (base.step if base else None),
    )
    for key, value in kw.items():
        if value is None:
            name = {"parameter": "param", "start": "from", "stop": "to"}.get(key, key)
            raise ValueError(f"{name}: required for a sweep")
    emit = base.emit_sensitivities if base else False
    if "sensitivities" in values:
        flag = values["sensitivities"].lower()
        if flag not in _BOOL:
            raise ValueError(f"sensitivities: expected true/false, got {values['sensitivities']!r}")
        emit = _BOOL[flag]
    return SweepSpec(
        scenario=inputs.scenario,
        jumps=inputs.jumps,
        truncation=inputs.truncation,
        emit_sensitivities=emit,
        **kw,
    )


def format_inputs(inputs: Inputs) -> list[str]:
    s, j, t = inputs.scenario, inputs.jumps, inputs.truncation
    lines = [f"{key} = {getattr(s, key)!r}" for key in _SCENARIO_KEYS]
    lines += [f"{key} = {getattr(j, attr)!r}" for key, attr in _JUMP_KEYS.items()]
    if t.mode == "fixed":
        lines.append(f"nterms = {t.n_terms}")
    else:
        lines.append(f"tail_eps = {t.epsilon!r}")
    return lines


def dump_sweep(spec: SweepSpec) -> str:
    lines = format_inputs(Inputs(spec.scenario, spec.jumps, spec.truncation))
    lines += [
        f"param = {spec.parameter}",
        f"from = {spec.start!r}",
        f"to = {spec.stop!r}",
        f"step = {spec.step!r}",
        f"sensitivities = {'true' if spec.emit_sensitivities else 'false'}",
    ]
    return "\n".join(lines) + "\n"


def load_sweep(text: str) -> SweepSpec:
    return sweep_from(parse_kv(text))
