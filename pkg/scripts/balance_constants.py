"""Measure the depth and size constants of the balancing pipeline and the
circuit builder.

Prints, per tree family, the worst ratio of TSLP depth to log2(n+1), of
TSLP size to n, and of circuit depth to TSLP depth.
"""
from __future__ import annotations

import argparse
import math
import random
import time
from dataclasses import dataclass

from strahler.balance import DEPTH_CONSTANT, SIZE_CONSTANT, balance
from strahler.circuit import DEPTH_RATIO, build_circuits, gate_depths
from strahler.core import log_bound
from strahler.trees import complete_tree, left_caterpillar, parse_term, random_tree


@dataclass
class Config:
    seed: int = 0
    random_trees: int = 300
    max_leaves: int = 4096
    circuit_trees: int = 100
    circuit_max_leaves: int = 40


def zigzag(internal: int):
    word, closers = [], 0
    for i in range(internal):
        if i % 2:
            word.append("ba")  # leaf on the left, continue right
        else:
            word.append("b")
            closers += 1
    word.append("a")
    word.append("a" * closers)
    return parse_term("".join(word))


def families(cfg: Config, rng: random.Random):
    yield "random", [random_tree(rng.randint(1, cfg.max_leaves), rng) for _ in range(cfg.random_trees)]
    yield "left caterpillar", [left_caterpillar(2**e) for e in range(1, 14)]
    yield "right caterpillar", [parse_term("ba" * 2**e + "a") for e in range(1, 14)]
    yield "complete", [complete_tree(d) for d in range(0, 13)]
    yield "zigzag", [zigzag(2**e) for e in range(1, 13)]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=Config.seed)
    ap.add_argument("--random-trees", type=int, default=Config.random_trees)
    args = ap.parse_args()
    cfg = Config(seed=args.seed, random_trees=args.random_trees)
    rng = random.Random(cfg.seed)
    print(f"documented: depth <= {DEPTH_CONSTANT} log2(n+1), size <= {SIZE_CONSTANT} n")
    for name, ts in families(cfg, rng):
        t0 = time.time()
        depth = max(balance(t).depth / math.log2(len(t) + 1) for t in ts)
        size = max(balance(t).size / len(t) for t in ts)
        print(f"{name:18s} trees={len(ts):4d} max_nodes={max(map(len, ts)):6d} "
              f"depth_ratio={depth:.3f} size_ratio={size:.3f} ({time.time() - t0:.1f}s)")
    worst = 0.0
    for _ in range(cfg.circuit_trees):
        t = random_tree(rng.randint(2, cfg.circuit_max_leaves), rng)
        g = balance(t)
        circuits = build_circuits(g, range(log_bound(t) + 1))
        depths = gate_depths(circuits[-1])
        worst = max(worst, max(depths[c.output] for c in circuits) / g.depth)
    print(f"circuit depth / TSLP depth: worst {worst:.3f} (documented {DEPTH_RATIO})")


if __name__ == "__main__":
    main()
