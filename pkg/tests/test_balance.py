import math
import random

from hypothesis import given

from strahler import core, trees, tslp
from strahler.balance import DEPTH_CONSTANT, SIZE_CONSTANT, balance, depth_bound
from strategies import binary_trees


@given(binary_trees(300))
def test_balance_preserves_the_tree(t):
    g = balance(t)
    assert tslp.tslp_val(g) == t
    assert tslp.tslp_strahler(g) == core.strahler_naive(t)
    assert g.depth <= depth_bound(len(t))
    assert g.size <= SIZE_CONSTANT * len(t)


def test_single_leaf():
    g = balance(trees.parse_term("a"))
    assert tslp.format_tslp(g) == "start S\nS = a\n"


def test_caterpillar_depth_is_logarithmic():
    depths = []
    for exp in range(4, 14):
        t = trees.left_caterpillar(2 ** exp)
        g = balance(t)
        assert tslp.tslp_val(g) == t
        depths.append(g.depth)
    # doubling the caterpillar adds a bounded number of levels
    assert max(b - a for a, b in zip(depths, depths[1:])) <= 3


def test_depth_ratio_on_random_trees_below_constant():
    rng = random.Random(0)
    worst = 0.0
    for _ in range(100):
        t = trees.random_tree(rng.randint(2, 3000), rng)
        worst = max(worst, balance(t).depth / math.log2(len(t) + 1))
    assert worst <= DEPTH_CONSTANT


def test_output_is_deterministic():
    t = trees.random_tree(200, random.Random(1))
    assert tslp.format_tslp(balance(t)) == tslp.format_tslp(balance(t))
