"""Bond price along the preset 7 maturity sweep under fixed and adaptive truncation.

With large jumps the Poisson mean ``lambda' tau`` reaches about 100 at the
long end, so 50 terms leave most of the probability mass unsummed.
"""

import dataclasses

from jumpcredit import TruncationPolicy
from jumpcredit.scenario import classify_trend, figure_preset, run_sweep


def main() -> None:
    base = figure_preset(7)
    policies = {"fixed N=50": base.truncation, "adaptive eps=1e-13": TruncationPolicy.adaptive(1e-13)}
    results = {name: run_sweep(dataclasses.replace(base, truncation=t)) for name, t in policies.items()}
    print(f"{'tau':>5} " + " ".join(f"{name + ' B':>22} {'tail':>9}" for name in policies))
    rows = zip(*(r.rows for r in results.values()))
    for group in rows:
        cells = " ".join(f"{row.bond_price:22.12g} {row.tail_mass:9.2e}" for row in group)
        print(f"{group[0].param_value:5.2f} {cells}")
    for name, r in results.items():
        t = classify_trend([row.bond_price for row in r.rows])
        print(f"{name}: {t}")


if __name__ == "__main__":
    main()
