"""Command-line front end: ``price``, ``sweep``, ``figure <n>``, ``validate``.

Exit codes: 0 ok, 1 a validation threshold was exceeded, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import sys
from pathlib import Path

from .jump_model import TruncationCapError, merton_call
from .math_core import BsInputs, bs_call
from .oracles import FdSpec, McSpec, fd_partial, mc_prices, parameter_value
from .scenario import (
    PRESET_NUMBERS,
    Inputs,
    classify_trend,
    figure_preset,
    format_inputs,
    inputs_from,
    parse_kv,
    run_sweep,
    sweep_from,
    write_atomic,
)
from .sensitivities import FIELD_FOR, PARAMETERS, full_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
FD_THRESHOLD = {p: 1e-6 for p in PARAMETERS} | {"lambda": 1e-4, "k": 1e-4}
# finite differences cannot resolve changes below ~ eps * V / h
FD_NOISE_FACTOR = 64 * sys.float_info.epsilon
MC_SIGMAS = 3.0

_FLAG_KEYS = {
    "V": "V", "D": "D", "tau": "tau", "sigma": "sigma", "r": "r",
    "lam": "lambda", "mu": "mu", "delta": "delta",
    "nterms": "nterms", "tail_eps": "tail_eps",
    "param": "param", "start": "from", "stop": "to", "step": "step",
}


class UsageError(Exception):
    pass


def _add_inputs(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("scenario")
    g.add_argument("--scenario", metavar="FILE", help="key = value scenario file; flags override it")
    for flag in ("V", "D", "tau", "sigma", "r", "mu", "delta"):
        g.add_argument(f"--{flag}", type=str)
    g.add_argument("--lambda", dest="lam", type=str)
    t = g.add_mutually_exclusive_group()
    t.add_argument("--nterms", type=str, metavar="N", help="fixed number of series terms (default 50)")
    t.add_argument("--tail-eps", dest="tail_eps", type=str, metavar="EPS", help="adaptive truncation tail mass")


def _add_sweep(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("sweep")
    g.add_argument("--param", type=str)
    g.add_argument("--from", dest="start", type=str)
    g.add_argument("--to", dest="stop", type=str)
    g.add_argument("--step", type=str)
    g.add_argument("--out", type=str, help="CSV path (default: stdout)")
    g.add_argument("--sensitivities", action="store_true", help="append the eight partials to each row")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jumpcredit", description="Bond and equity pricing under a Merton jump-diffusion firm value."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("price", help="price one scenario and print all sensitivities")
    _add_inputs(p)

    p = sub.add_parser("sweep", help="sweep one parameter and write CSV")
    _add_inputs(p)
    _add_sweep(p)

    p = sub.add_parser("figure", help="run a figure preset sweep")
    p.add_argument("n", type=int, help=f"preset number {PRESET_NUMBERS[0]}..{PRESET_NUMBERS[-1]}")
    _add_inputs(p)
    _add_sweep(p)

    p = sub.add_parser("validate", help="finite-difference and Monte Carlo cross-checks")
    _add_inputs(p)
    p.add_argument("--mc-paths", dest="mc_paths", type=int, default=1_000_000, help="0 disables the MC check")
    p.add_argument("--seed", type=int, default=McSpec.seed)
    p.add_argument("--out", type=str, help="also write the check table as CSV")
    return parser


def _values(args: argparse.Namespace) -> dict[str, str]:
    values: dict[str, str] = {}
    if getattr(args, "scenario", None):
        try:
            values.update(parse_kv(Path(args.scenario).read_text(encoding="utf-8")))
        except OSError as exc:
            raise ValueError(f"scenario: cannot read {args.scenario}: {exc.strerror}") from None
    flags = {}
    for attr, key in _FLAG_KEYS.items():
        value = getattr(args, attr, None)
        if value is not None:
            flags[key] = value
    if "nterms" in flags:
        values.pop("tail_eps", None)
    if "tail_eps" in flags:
        values.pop("nterms", None)
    values.update(flags)
    if getattr(args, "sensitivities", False):
        values["sensitivities"] = "true"
    return values


def _fmt(x: float) -> str:
    return repr(float(x))


def cmd_price(args, out) -> int:
    inputs = inputs_from(_values(args))
    s, j, t = inputs.scenario, inputs.jumps, inputs.truncation
    pb = merton_call(s, j, t)
    for line in format_inputs(inputs):
        print(line, file=out)
    print(f"k = {_fmt(j.k)}", file=out)
    print(f"gamma = {_fmt(j.gamma)}", file=out)
    print(f"lambda_prime = {_fmt(j.lambda_prime)}", file=out)
    print(f"call_price = {_fmt(pb.call_price)}", file=out)
    print(f"equity_price = {_fmt(pb.equity_price)}", file=out)
    print(f"bond_price = {_fmt(pb.bond_price)}", file=out)
    print(f"truncation_used = {pb.truncation_used}", file=out)
    print(f"tail_mass = {_fmt(pb.tail_mass)}", file=out)
    cond = s.r - j.lam * j.k
    print(f"r_minus_lambda_k = {_fmt(cond)}", file=out)
    print(f"tau_monotonicity_guaranteed = {'true' if cond >= 0 else 'false'}", file=out)
    if s.D <= 0 or s.sigma <= 0:
        print("sensitivities = unavailable (need D > 0 and sigma > 0)", file=out)
        return EXIT_OK
    rep = full_report(s, j, t)
    for name, value in rep.as_dict().items():
        bound = rep.bounds[name]
        suffix = f"  in ({_fmt(bound[0])}, {_fmt(bound[1])})" if bound else ""
        print(f"{name} = {_fmt(value)}{suffix}", file=out)
    print(f"S1 = {_fmt(rep.S1)}", file=out)
    print(f"S2 = {_fmt(rep.S2)}", file=out)
    print(f"dB_dlambda_method = {rep.lambda_method}", file=out)
    violations = rep.bound_violations()
    print(f"bound_violations = {','.join(violations) if violations else 'none'}", file=out)
    return EXIT_OK


def _emit_sweep(spec, args, out) -> int:
    result = run_sweep(spec)
    text = result.to_csv()
    if args.out:
        write_atomic(args.out, text)
    else:
        out.write(text)
    summary = classify_trend(result.bond_prices())
    # keep stdout pure CSV when no --out is given
    target = out if args.out else sys.stderr
    print(
        f"bond_price trend over {spec.parameter}: {summary['trend']} "
        f"(up {summary['up_steps']}, down {summary['down_steps']}, flat {summary['flat_steps']}); "
        f"rows = {len(result.rows)}; max tail_mass = {_fmt(max(r.tail_mass for r in result.rows))}",
        file=target,
    )
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    return _emit_sweep(sweep_from(_values(args)), args, out)


def cmd_figure(args, out) -> int:
    if args.n not in PRESET_NUMBERS:
        raise UsageError(f"figure preset must be one of {', '.join(map(str, PRESET_NUMBERS))}")
    return _emit_sweep(sweep_from(_values(args), base=figure_preset(args.n)), args, out)


def fd_checks(inputs: Inputs) -> list[dict]:
    """FD-vs-analytic rows for all eight partials at one point."""
    s, j, t = inputs.scenario, inputs.jumps, inputs.truncation
    rep = full_report(s, j, t)
    rows = []
    for p in PARAMETERS:
        scheme = "forward" if (p == "lambda" and j.lam == 0) else "central"
        spec = FdSpec(p, scheme=scheme)
        fd = fd_partial(s, j, t, spec)
        analytic = rep.partial(p)
        h = spec.step * max(1.0, abs(parameter_value(s, j, p)))
        noise = FD_NOISE_FACTOR * max(s.V, abs(rep.breakdown.call_price)) / h
        err = abs(analytic - fd)
        rel = err / abs(analytic) if analytic != 0 else (0.0 if err == 0 else math.inf)
        thr = FD_THRESHOLD[p]
        if rel <= thr:
            status = "pass"
        elif err <= noise:
            status = "pass (below FD resolution)"
        else:
            status = "FAIL"
        rows.append(dict(check=FIELD_FOR[p], analytic=analytic, reference=fd, rel_err=rel,
                         threshold=thr, status=status))
    return rows


def mc_checks(inputs: Inputs, spec: McSpec) -> list[dict]:
    s, j, t = inputs.scenario, inputs.jumps, inputs.truncation
    pb = merton_call(s, j, t)
    est = mc_prices(s, j, spec)
    rows = []
    for name, series in (("call_price", pb.call_price), ("bond_price", pb.bond_price)):
        e = est[name.split("_")[0]]
        diff = abs(series - e.price)
        z = diff / e.std_err if e.std_err > 0 else (0.0 if diff <= 1e-12 * max(1.0, series) else math.inf)
        rows.append(dict(check=f"mc_{name}", analytic=series, reference=e.price, rel_err=z,
                         threshold=MC_SIGMAS, status="pass" if z <= MC_SIGMAS else "FAIL"))
    return rows


def cmd_validate(args, out) -> int:
    inputs = inputs_from(_values(args))
    s, j, t = inputs.scenario, inputs.jumps, inputs.truncation
    if s.D <= 0 or s.sigma <= 0:
        raise ValueError("validate needs D > 0 and sigma > 0")
    rows = fd_checks(inputs)
    if j.lam == 0:
        series = merton_call(s, j, t).call_price
        bs = bs_call(BsInputs(s.V, s.D, s.tau, s.sigma, s.r))
        rel = abs(series - bs) / bs if bs else abs(series - bs)
        rows.append(dict(check="series_vs_black_scholes", analytic=series, reference=bs, rel_err=rel,
                         threshold=1e-12, status="pass" if rel <= 1e-12 else "FAIL"))
    if args.mc_paths:
        paths = args.mc_paths + (args.mc_paths % 2)
        rows += mc_checks(inputs, McSpec(paths=paths, seed=args.seed, batch=min(100_000, paths)))

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    cols = ["check", "analytic", "reference", "rel_err", "threshold", "status"]
    writer.writerow(cols)
    for row in rows:
        writer.writerow([row[c] if isinstance(row[c], str) else _fmt(row[c]) for c in cols])
    if args.out:
        write_atomic(args.out, buf.getvalue())

    print(f"{'check':<26}{'analytic':>24}{'reference':>24}{'error':>12}{'limit':>9}  status", file=out)
    for row in rows:
        print(
            f"{row['check']:<26}{row['analytic']:>24.15g}{row['reference']:>24.15g}"
            f"{row['rel_err']:>12.3g}{row['threshold']:>9.0e}  {row['status']}",
            file=out,
        )
    fd_rel = [r["rel_err"] for r in rows if r["check"].startswith("dB_")]
    print(f"max FD relative error = {max(fd_rel):.3g}", file=out)
    if args.mc_paths:
        print("(MC rows report |series - MC| in standard errors)", file=out)
    failed = [r["check"] for r in rows if r["status"] == "FAIL"]
    print(f"result = {'FAIL: ' + ', '.join(failed) if failed else 'PASS'}", file=out)
    return EXIT_FAIL if failed else EXIT_OK


COMMANDS = {"price": cmd_price, "sweep": cmd_sweep, "figure": cmd_figure, "validate": cmd_validate}


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OverflowError, TruncationCapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
