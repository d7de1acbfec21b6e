"""Sweep epsilon: certified theta, delta, normalised constant and color counts.

    python3 scripts/epsilon_sweep.py --epsilons 1/8,1/12,1/16,1/24 --count 60 --csv sweep.csv
"""

import argparse
import csv
import sys
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

from lacuna.sequences import split_count
from lacuna.survivor import pipeline


@dataclass
class SweepConfig:
    epsilons: list = field(default_factory=lambda: [Fraction(1, d) for d in (5, 8, 12, 16, 24, 32)])
    count: int = 60


def sweep(cfg: SweepConfig):
    rows = []
    for eps in cfg.epsilons:
        t0 = time.perf_counter()
        cert, summary, state = pipeline(eps, cfg.count)
        worst = max(r.window_ratio for r in state.history) / Fraction(summary["delta"])
        rows.append({
            "epsilon": summary["epsilon"],
            "M": summary["M"],
            "h": summary["h"],
            "delta": summary["delta"],
            "theta": str(cert.theta),
            "value": float(cert.value),
            "value_over_delta": float(cert.value / Fraction(summary["delta"])),
            "normalized_constant": summary["normalized_constant"],
            "worst_ratio_over_delta": float(worst),
            "colors": summary["colors"],
            "warmup_colors": 4 ** split_count(eps),
            "runs": len(state.survivor),
            "seconds": round(time.perf_counter() - t0, 3),
        })
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--epsilons", type=lambda t: [Fraction(x) for x in t.split(",")])
    ap.add_argument("--count", type=int, default=60)
    ap.add_argument("--csv", help="also write the rows here")
    a = ap.parse_args()
    cfg = SweepConfig(count=a.count) if a.epsilons is None else SweepConfig(a.epsilons, a.count)
    print(f"# {asdict(cfg)}", file=sys.stderr)
    rows = sweep(cfg)
    w = csv.DictWriter(sys.stdout, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    if a.csv:
        with open(a.csv, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)


if __name__ == "__main__":
    main()
