"""The [l,h] functions computed by binary contexts in the Strahler algebra.

``[l,h](x)`` is ``h`` below ``l``, ``h+1`` on ``l..h`` and ``x`` above ``h``.
Every context computes such a function and the family is closed under
composition, which is what makes succinct evaluation possible.
"""
from __future__ import annotations

from dataclasses import dataclass

from .core import s
from .trees import LEAF, BinaryContext


@dataclass(frozen=True, order=True)
class LhFunction:
    ell: int
    h: int

    def __post_init__(self):
        if not 0 <= self.ell <= self.h:
            raise ValueError(f"need 0 <= ell <= h, got [{self.ell},{self.h}]")

    def __call__(self, x: int) -> int:
        return apply_lh(self, x)

    def __str__(self) -> str:
        return f"[{self.ell},{self.h}]"


def apply_lh(f: LhFunction, x: int) -> int:
    if x < f.ell:
        return f.h
    if x <= f.h:
        return f.h + 1
    return x


def compose_lh(g: LhFunction, f: LhFunction) -> LhFunction:
    """``g`` after ``f``."""
    m, i = g.ell, g.h
    ell, h = f.ell, f.h
    if h + 2 <= m:
        return LhFunction(m, i)
    if h + 1 == m:
        return LhFunction(ell, i)
    if m <= h <= i:
        return LhFunction(0, i)
    assert i < h, (g, f)
    return LhFunction(ell, h)


def lh_from_sibling(m: int) -> LhFunction:
    """The function x -> s(x, m) of a node whose other child has value m."""
    return LhFunction(m, m)


def context_lh(ctx: BinaryContext) -> LhFunction:
    """Fold the spine of ``ctx`` from the hole upwards.

    The one-node context ``x`` computes the identity, which is not an
    [l,h] function, so it is rejected.
    """
    spine = ctx.spine()
    if not spine:
        raise ValueError("the trivial context x computes the identity")
    left, right = ctx.left, ctx.right
    # Strahler values of the off-spine subtrees; the hole counts as a leaf
    val = [0] * len(left)
    for v in range(len(left) - 1, -1, -1):
        if left[v] != LEAF:
            val[v] = s(val[left[v]], val[right[v]])
    on_path = set(spine) | {ctx.hole}
    f = None
    for v in reversed(spine):
        sibling = right[v] if left[v] in on_path else left[v]
        step = lh_from_sibling(val[sibling])
        f = step if f is None else compose_lh(step, f)
    return f
