"""Write every preset sweep to CSV and print the trend of each bond curve.

    python scripts/reproduce_figures.py --out-dir figures
"""

import argparse
import dataclasses
import pathlib

from jumpcredit.scenario import EXPECTED_TREND, PRESET_NUMBERS, classify_trend, figure_preset, run_sweep, write_atomic


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default="figures")
    ap.add_argument("--sensitivities", action="store_true")
    args = ap.parse_args()
    out = pathlib.Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for n in PRESET_NUMBERS:
        spec = figure_preset(n)
        if args.sensitivities:
            spec = dataclasses.replace(spec, emit_sensitivities=True)
        result = run_sweep(spec)
        path = out / f"preset_{n}.csv"
        write_atomic(path, result.to_csv())
        t = classify_trend([row.bond_price for row in result.rows])
        print(f"preset {n}: {spec.parameter:8s} trend {t['trend']:18s} "
              f"(expected {EXPECTED_TREND.get(n, '-')}) -> {path}")


if __name__ == "__main__":
    main()
