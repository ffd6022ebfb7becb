import itertools
import math
import random

import pytest
from hypothesis import given, strategies as st

from strahler import core, trees
from strahler.errors import MalformedEncoding
from strategies import binary_trees, terms


def reference_strahler(word: str) -> int:
    """Recursive evaluation straight from the definition."""
    def go(i):
        if word[i] == "a":
            return 0, i + 1
        x, j = go(i + 1)
        y, k = go(j)
        return (x + 1 if x == y else max(x, y)), k
    return go(0)[0]


def test_operation():
    assert core.s(0, 0) == 1 and core.s(2, 2) == 3
    assert core.s(3, 1) == 3 and core.s(1, 4) == 4


def test_known_values():
    assert core.strahler_naive(trees.parse_term("a")) == 0
    assert core.strahler_naive(trees.complete_tree(5)) == 5
    assert core.strahler_naive(trees.left_caterpillar(50)) == 1


@given(terms())
def test_naive_matches_recursive_definition(word):
    assert core.strahler_naive(trees.parse_term(word)) == reference_strahler(word)


@given(binary_trees(60))
def test_embedding_oracle(t):
    value = core.strahler_naive(t)
    for k in range(value + 2):
        assert core.embed_oracle(t, k) == (k <= value)
    image = core.find_embedding(t, value)
    assert core.check_embedding(t, value, image)
    assert core.find_embedding(t, value + 1) is None


def test_embedding_check_rejects_bad_witness():
    t = trees.parse_term("bbaabaa")
    good = core.find_embedding(t, 2)
    assert core.check_embedding(t, 2, good)
    bad = dict(good, **{"0": good["1"]})
    assert not core.check_embedding(t, 2, bad)


@given(binary_trees(200))
def test_log_bound(t):
    assert core.strahler_naive(t) <= core.log_bound(t) == int(math.log2(t.leaf_count))


def test_delta_rejects_malformed():
    for word in ("1", "102#", "x#", "0"):  # last: zero marker with nothing larger after it
        with pytest.raises(MalformedEncoding):
            core.decode_deltas(word)


def test_delta_all_short_sequences():
    for n in range(1, 6):
        for seq in itertools.product(range(4), repeat=n):
            enc = core.encode_deltas(seq)
            assert core.decode_deltas(enc.word).values == tuple(core.zero_dominated(seq))
            assert core.fold_right(core.zero_dominated(seq)) == core.fold_right(seq)


@given(st.lists(st.integers(0, 20), min_size=1, max_size=40))
def test_zeroing_dominated_keeps_the_fold(seq):
    z = core.zero_dominated(seq)
    assert core.fold_right(z) == core.fold_right(seq)
    nonzero = [x for x, d in zip(seq, core.dominated_mask(seq)) if not d]
    assert nonzero == sorted(nonzero, reverse=True)


@given(binary_trees(80))
def test_lowspace_traversal(t):
    result = core.strahler_lowspace(t, trace=True)
    assert result.value == core.strahler_naive(t)
    for stack, sizes in result.snapshots:
        undominated = [x for x, d in zip(stack, core.dominated_mask(stack)) if not d]
        # undominated entries never increase towards the top
        assert all(a >= b for a, b in zip(undominated, undominated[1:]))
        assert len(core.encode_deltas(stack).word) == len(stack) + max(stack)
        # each finished subtree is at least as large as everything above it,
        # so the stack holds at most log2(n) + 1 entries
        for i in range(len(sizes) - 1):
            assert sizes[i] >= sum(sizes[i + 1:])
        assert len(stack) <= math.log2(len(t)) + 1


def test_lowspace_state_grows_logarithmically():
    rng = random.Random(1)
    ratios = []
    for exp in range(6, 13):
        n = 2 ** exp
        peak = max(core.strahler_lowspace(trees.random_tree(n, rng)).peak_state_bits for _ in range(3))
        ratios.append(peak / math.log2(2 * n - 1))
    # bits per log2(n) stays bounded as n doubles
    assert max(ratios) < 12
    assert ratios[-1] <= ratios[0] * 1.5


def test_lowspace_accepts_words():
    assert core.strahler_lowspace("bbaabaa").value == 2
    value, bits = core.strahler_lowspace("a")
    assert value == 0 and bits > 0
