"""Peak working-state size of the streaming evaluator as trees grow.

For each family the input size doubles; the script prints the peak state
in bits next to log2(n)^2, then fits the peak against log2(n) and against
log2(n)^2 by least squares.
"""
from __future__ import annotations

import argparse
import math
import random
from dataclasses import dataclass

import numpy as np

from strahler.core import strahler_lowspace, strahler_naive
from strahler.trees import complete_tree, left_caterpillar, parse_term, random_tree


@dataclass
class Config:
    seed: int = 0
    min_exp: int = 4
    max_exp: int = 14
    samples: int = 5


def family_trees(name: str, leaves: int, rng: random.Random):
    if name == "random":
        return random_tree(leaves, rng)
    if name == "complete":
        return complete_tree(int(math.log2(leaves)))
    if name == "left caterpillar":
        return left_caterpillar(leaves)
    return parse_term("ba" * (leaves - 1) + "a")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--max-exp", type=int, default=Config.max_exp)
    ap.add_argument("--samples", type=int, default=Config.samples)
    args = ap.parse_args()
    cfg = Config(seed=args.seed, max_exp=args.max_exp, samples=args.samples)
    rng = random.Random(cfg.seed)
    for name in ("random", "complete", "left caterpillar", "right caterpillar"):
        xs, ys = [], []
        print(f"== {name}")
        for e in range(cfg.min_exp, cfg.max_exp + 1):
            reps = cfg.samples if name == "random" else 1
            peak = 0
            for _ in range(reps):
                t = family_trees(name, 2**e, rng)
                r = strahler_lowspace(t)
                assert r.value == strahler_naive(t)
                peak = max(peak, r.peak_state_bits)
            n = 2 ** (e + 1) - 1
            xs.append(math.log2(n) ** 2)
            ys.append(peak)
            print(f"  n={n:7d} peak_bits={peak:5d} log2(n)^2={xs[-1]:7.1f} ratio={peak / xs[-1]:.3f}")
        logs = np.sqrt(xs)
        for label, x in (("log2(n)", logs), ("log2(n)^2", xs)):
            (a, b), res = np.polyfit(x, ys, 1, full=True)[:2]
            resid = float(res[0]) if len(res) else 0.0
            print(f"  fit: bits ~ {a:.3f} * {label} + {b:.1f} (residual {resid:.1f})")


if __name__ == "__main__":
    main()
