"""Hypothesis strategies for trees and related objects."""
from hypothesis import strategies as st

from strahler import trees


@st.composite
def terms(draw, max_leaves: int = 40) -> str:
    """Preorder words of random binary trees, built by random splitting."""
    leaves = draw(st.integers(min_value=1, max_value=max_leaves))
    out = []
    stack = [leaves]
    while stack:
        n = stack.pop()
        if n == 1:
            out.append("a")
            continue
        k = draw(st.integers(min_value=1, max_value=n - 1))
        out.append("b")
        stack += [n - k, k]
    return "".join(out)


def binary_trees(max_leaves: int = 40):
    return terms(max_leaves).map(trees.parse_term)
