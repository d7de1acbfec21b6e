"""Colors used by the rotation coloring vs the 4^K quarter coloring, both verified."""

import argparse
from dataclasses import dataclass
from fractions import Fraction

from lacuna.coloring import DistanceGraphWindow, color_from_theta, verify_proper, warmup_coloring
from lacuna.sequences import generate_geometric
from lacuna.survivor import pipeline


@dataclass
class CompareConfig:
    count: int = 40
    window: int = 20000


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--epsilons", default="1/5,1/8,1/16")
    ap.add_argument("--count", type=int, default=40)
    ap.add_argument("--window", type=int, default=20000)
    a = ap.parse_args()
    cfg = CompareConfig(a.count, a.window)
    win = (-cfg.window, cfg.window)
    print("epsilon,rotation_colors,rotation_proper,quarter_colors,quarter_used,quarter_proper")
    for text in a.epsilons.split(","):
        eps = Fraction(text)
        seq = generate_geometric(eps, cfg.count)
        graph = DistanceGraphWindow.of(seq.terms, win)
        cert, summary, _ = pipeline(eps, cfg.count)
        rot = color_from_theta(cert.theta, Fraction(summary["delta"]), win)
        quarter = warmup_coloring(seq, win)
        print(f"{text},{rot.k},{verify_proper(rot, graph) is None},"
              f"{quarter.k},{quarter.used()},{verify_proper(quarter, graph) is None}")


if __name__ == "__main__":
    main()
