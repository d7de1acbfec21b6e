"""Table of gamma brackets against DP densities for interval and random spectra."""

import argparse
import random
from dataclasses import dataclass

from lacuna.vdc import delta_dp, fejer_value, gamma_lp


@dataclass
class TableConfig:
    max_m: int = 8
    grid: int = 1024
    period: int = 120
    random_cases: int = 10
    max_h: int = 12
    seed: int = 0


def spectra(cfg: TableConfig):
    for m in range(1, cfg.max_m + 1):
        yield f"1..{m}", list(range(1, m + 1))
    rng = random.Random(cfg.seed)
    for _ in range(cfg.random_cases):
        H = sorted(rng.sample(range(1, cfg.max_h + 1), rng.randint(1, 5)))
        yield ",".join(map(str, H)), H


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--grid", type=int, default=1024)
    ap.add_argument("--period", type=int, default=120)
    ap.add_argument("--seed", type=int, default=0)
    a = ap.parse_args()
    cfg = TableConfig(grid=a.grid, period=a.period, seed=a.seed)
    print(f"{'H':>16} {'gamma_lo':>9} {'gamma_hi':>9} {'fejer':>7} {'density':>8}  ok")
    for name, H in spectra(cfg):
        s = gamma_lp(H, cfg.grid)
        d = delta_dp(H, cfg.period).density
        fej = f"{float(fejer_value(len(H))):.4f}" if H == list(range(1, len(H) + 1)) else "-"
        ok = float(d) <= s.gamma_upper + 1e-6
        print(f"{name:>16} {s.gamma_lower:9.5f} {s.gamma_upper:9.5f} {fej:>7} {float(d):8.5f}  {ok}")


if __name__ == "__main__":
    main()
