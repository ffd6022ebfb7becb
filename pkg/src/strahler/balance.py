"""Turn an explicit tree into a TSLP of logarithmic depth.

The tree is cut into heavy paths (always continue into the larger child).
Each node on a path contributes the context b(x, W) or b(W, x), where W is
the program for its light subtree.  The contexts along a path are then
composed as a weight-balanced binary tree: the element containing the
weight midpoint becomes the middle, and the parts before and after it are
balanced recursively.  One leaf variable is shared by every leaf.

Measured constants (see scripts/balance_constants.py) for the depth
bound ``depth <= DEPTH_CONSTANT * log2(n + 1)`` and the size bound
``size <= SIZE_CONSTANT * n``.
"""
from __future__ import annotations

import math
from itertools import accumulate

from .trees import LEAF, BinaryTree
from .tslp import Apply, Compose, HoleLeft, HoleRight, Leaf, Rule, Tslp

DEPTH_CONSTANT = 3.5
SIZE_CONSTANT = 3.0
LEAF_VAR = "L"


def balance(t: BinaryTree) -> Tslp:
    if t.left[0] == LEAF:
        return Tslp("S", {"S": Leaf()})
    builder = _Builder(t)
    top = builder.path_program(0)
    rules = builder.rules
    # rename the root variable to S
    rules["S"] = rules.pop(top)
    return Tslp("S", rules)


class _Builder:
    def __init__(self, t: BinaryTree):
        self.t = t
        self.sizes = t.subtree_sizes()
        self.rules: dict[str, Rule] = {LEAF_VAR: Leaf()}
        self.counter = 0

    def fresh(self, prefix: str) -> str:
        self.counter += 1
        return f"{prefix}{self.counter}"

    def heavy_path(self, v: int) -> list[int]:
        t, sizes = self.t, self.sizes
        path = [v]
        while t.left[v] != LEAF:
            l, r = t.left[v], t.right[v]
            v = l if sizes[l] >= sizes[r] else r
            path.append(v)
        return path

    def path_program(self, v: int) -> str:
        """Tree variable for the subtree at ``v``."""
        if self.t.left[v] == LEAF:
            return LEAF_VAR
        # explicit work list over heavy paths, light subtrees before their path
        order: list[int] = []
        pending = [v]
        while pending:
            u = pending.pop()
            order.append(u)
            for w in self.heavy_path(u)[:-1]:
                light = self._light(w)
                if self.t.left[light] != LEAF:
                    pending.append(light)
        var_of: dict[int, str] = {}
        for u in reversed(order):
            var_of[u] = self._one_path(u, var_of)
        return var_of[v]

    def _light(self, w: int) -> int:
        t, sizes = self.t, self.sizes
        l, r = t.left[w], t.right[w]
        return r if sizes[l] >= sizes[r] else l

    def _one_path(self, u: int, var_of: dict[int, str]) -> str:
        t = self.t
        steps: list[str] = []
        weights: list[int] = []
        for w in self.heavy_path(u)[:-1]:
            light = self._light(w)
            arg = var_of.get(light, LEAF_VAR)
            name = self.fresh("C")
            self.rules[name] = HoleLeft(arg) if light == t.right[w] else HoleRight(arg)
            steps.append(name)
            weights.append(self.sizes[light] + 1)
        ctx = self._compose(steps, list(accumulate(weights, initial=0)), 0, len(steps))
        name = self.fresh("T")
        self.rules[name] = Apply(ctx, LEAF_VAR)
        return name

    def _compose(self, steps: list[str], prefix: list[int], lo: int, hi: int) -> str:
        if hi - lo == 1:
            return steps[lo]
        half = (prefix[lo] + prefix[hi]) / 2
        # first element whose weight interval reaches across the midpoint
        mid = lo
        while prefix[mid + 1] < half:
            mid += 1
        middle = steps[mid]
        left = self._compose(steps, prefix, lo, mid) if mid > lo else None
        right = self._compose(steps, prefix, mid + 1, hi) if mid + 1 < hi else None
        if left is None and right is None:
            return middle
        if left is None:
            return self._join(middle, right)
        if right is None:
            return self._join(left, middle)
        # the heavier side sits one level higher
        if prefix[mid] - prefix[lo] >= prefix[hi] - prefix[mid + 1]:
            return self._join(left, self._join(middle, right))
        return self._join(self._join(left, middle), right)

    def _join(self, outer: str, inner: str) -> str:
        name = self.fresh("K")
        self.rules[name] = Compose(outer, inner)
        return name


def depth_bound(n: int) -> float:
    return DEPTH_CONSTANT * math.log2(n + 1)
