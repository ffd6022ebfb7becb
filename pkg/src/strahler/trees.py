"""Binary trees, binary contexts and their text formats.

Trees are index arenas in canonical preorder numbering: the root is node 0
and the left child of an internal node ``i`` is ``i + 1``.  Two trees are
structurally equal iff their arenas are equal, so the dataclass ``__eq__``
is shape equality.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping, Sequence

from .errors import MalformedTerm, NotATree

LEAF = -1


def _parse_arena(text: str, allow_hole: bool):
    n = len(text)
    left = [LEAF] * n
    right = [LEAF] * n
    pending: list[int] = []
    need = 1
    hole = -1
    for i, c in enumerate(text):
        if need == 0:
            raise MalformedTerm("trailing input after complete term", i)
        if i > 0:
            if text[i - 1] == "b":
                left[i - 1] = i
                pending.append(i - 1)
            else:
                right[pending.pop()] = i
        if c == "b":
            need += 1
        elif c == "a":
            need -= 1
        elif c == "x" and allow_hole:
            if hole >= 0:
                raise MalformedTerm("second hole", i)
            hole = i
            need -= 1
        else:
            raise MalformedTerm(f"unexpected symbol {c!r}", i)
    if need > 0:
        raise MalformedTerm("incomplete term", n)
    if allow_hole and hole < 0:
        raise MalformedTerm("context without hole", n)
    return tuple(left), tuple(right), hole


def _preorder(left: Sequence[int], right: Sequence[int], root: int) -> Iterator[int]:
    stack = [root]
    while stack:
        v = stack.pop()
        yield v
        if left[v] != LEAF:
            stack.append(right[v])
            stack.append(left[v])


@dataclass(frozen=True)
class BinaryTree:
    """Rooted binary tree, every node with 0 or 2 children.

    ``left[i] == right[i] == -1`` marks a leaf.  Use :func:`parse_term` or
    :meth:`from_children` rather than building arenas by hand.
    """

    left: tuple[int, ...]
    right: tuple[int, ...]

    root = 0

    @classmethod
    def from_children(cls, children: Sequence[tuple[int, int] | None], root: int):
        """Canonicalize an arbitrary arena (``None`` = leaf) into preorder."""
        lt = [LEAF if c is None else c[0] for c in children]
        rt = [LEAF if c is None else c[1] for c in children]
        order = list(_preorder(lt, rt, root))
        index = {v: i for i, v in enumerate(order)}
        left = tuple(LEAF if lt[v] == LEAF else index[lt[v]] for v in order)
        right = tuple(LEAF if rt[v] == LEAF else index[rt[v]] for v in order)
        return cls(left, right)

    def __len__(self) -> int:
        return len(self.left)

    @property
    def size(self) -> int:
        return len(self.left)

    def is_leaf(self, v: int) -> bool:
        return self.left[v] == LEAF

    def children(self, v: int) -> tuple[int, int] | None:
        if self.left[v] == LEAF:
            return None
        return self.left[v], self.right[v]

    @property
    def leaf_count(self) -> int:
        return sum(1 for c in self.left if c == LEAF)

    def subtree_sizes(self) -> list[int]:
        sizes = [1] * len(self.left)
        for v in range(len(self.left) - 1, -1, -1):
            if self.left[v] != LEAF:
                sizes[v] = 1 + sizes[self.left[v]] + sizes[self.right[v]]
        return sizes

    def parents(self) -> list[int]:
        par = [-1] * len(self.left)
        for v, (l, r) in enumerate(zip(self.left, self.right)):
            if l != LEAF:
                par[l] = v
                par[r] = v
        return par

    def subtree(self, v: int) -> "BinaryTree":
        return BinaryTree.from_children(
            [None if l == LEAF else (l, r) for l, r in zip(self.left, self.right)], v
        )

    def __str__(self) -> str:
        return to_term(self)


@dataclass(frozen=True)
class BinaryContext:
    """A binary tree with exactly one leaf (``hole``) labelled x."""

    left: tuple[int, ...]
    right: tuple[int, ...]
    hole: int = field(default=0)

    root = 0

    def __len__(self) -> int:
        return len(self.left)

    def spine(self) -> list[int]:
        """Nodes on the path from the root down to (excluding) the hole."""
        par = [-1] * len(self.left)
        for v, l in enumerate(self.left):
            if l != LEAF:
                par[l] = v
                par[self.right[v]] = v
        path = []
        v = par[self.hole]
        while v != -1:
            path.append(v)
            v = par[v]
        return path[::-1]

    def __str__(self) -> str:
        return to_term(self)


def parse_term(text: str) -> BinaryTree:
    """Parse a preorder word over {a, b}; accepts exactly Bin (S -> a | bSS)."""
    left, right, _ = _parse_arena(text, allow_hole=False)
    return BinaryTree(left, right)


def parse_context(text: str) -> BinaryContext:
    """Parse a preorder word over {a, b, x} containing exactly one x."""
    left, right, hole = _parse_arena(text, allow_hole=True)
    return BinaryContext(left, right, hole)


def to_term(t: BinaryTree | BinaryContext) -> str:
    hole = getattr(t, "hole", -1)
    out = []
    for v in _preorder(t.left, t.right, 0):
        if v == hole:
            out.append("x")
        else:
            out.append("a" if t.left[v] == LEAF else "b")
    return "".join(out)


def substitute(ctx: BinaryContext, arg: BinaryTree | BinaryContext):
    """``ctx[x/arg]``: a tree if ``arg`` is a tree, a context if it is one."""
    word = to_term(ctx).replace("x", to_term(arg))
    if isinstance(arg, BinaryContext):
        return parse_context(word)
    return parse_term(word)


# --- adjacency (pointer) representation -------------------------------------


@dataclass(frozen=True)
class AdjacencyTree:
    root: str
    children: Mapping[str, tuple[str, ...]]


def parse_node_lines(text: str, kind: str = "adjacency") -> tuple[str, dict[str, tuple[str, ...]]]:
    """Shared reader for adjacency and Dag files.

    Line 1 is ``root <id>``; then ``<id> -> <id> <id>`` or ``<id> -> .``.
    Lines starting with ``#`` and blank lines are ignored.
    """
    from .errors import MalformedInput

    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedInput(f"empty {kind} file")
    head = lines[0].split()
    if len(head) != 2 or head[0] != "root":
        raise MalformedInput(f"{kind} file must start with 'root <id>'")
    root = head[1]
    children: dict[str, tuple[str, ...]] = {}
    for number, line in enumerate(lines[1:], start=2):
        parts = line.split()
        if len(parts) < 3 or parts[1] != "->":
            raise MalformedInput(f"line {number}: expected '<id> -> ...'")
        node, rest = parts[0], parts[2:]
        if node in children:
            raise MalformedInput(f"line {number}: node {node!r} declared twice")
        if rest == ["."]:
            children[node] = ()
        elif len(rest) == 2:
            children[node] = (rest[0], rest[1])
        else:
            raise MalformedInput(f"line {number}: a node has 0 or 2 children")
    if root not in children:
        raise MalformedInput(f"root {root!r} is not declared")
    for node, kids in children.items():
        for k in kids:
            if k not in children:
                raise MalformedInput(f"node {node!r} refers to undeclared {k!r}")
    return root, children


def format_node_lines(root: str, children: Mapping[str, tuple[str, ...]]) -> str:
    lines = [f"root {root}"]
    for node, kids in children.items():
        lines.append(f"{node} -> {' '.join(kids) if kids else '.'}")
    return "\n".join(lines) + "\n"


def parse_adjacency(text: str) -> AdjacencyTree:
    root, children = parse_node_lines(text)
    return AdjacencyTree(root, children)


def format_adjacency(g: AdjacencyTree) -> str:
    return format_node_lines(g.root, g.children)


def from_adjacency(g: AdjacencyTree) -> BinaryTree:
    ids = list(g.children)
    index = {name: i for i, name in enumerate(ids)}
    if g.root not in index:
        raise NotATree(f"root {g.root!r} has no entry")
    parent_count = [0] * len(ids)
    arena: list[tuple[int, int] | None] = []
    for name in ids:
        kids = g.children[name]
        if not kids:
            arena.append(None)
            continue
        if len(kids) != 2:
            raise NotATree(f"node {name!r} has {len(kids)} children")
        for k in kids:
            if k not in index:
                raise NotATree(f"node {name!r} refers to unknown {k!r}")
            parent_count[index[k]] += 1
        arena.append((index[kids[0]], index[kids[1]]))
    for name, count in zip(ids, parent_count):
        if count > 1:
            raise NotATree(f"node {name!r} has {count} parents")
    if parent_count[index[g.root]]:
        raise NotATree("the root has a parent (cycle)")
    seen = 0
    stack = [index[g.root]]
    while stack:
        v = stack.pop()
        seen += 1
        if arena[v] is not None:
            stack.extend(arena[v])
    if seen != len(ids):
        raise NotATree(f"{len(ids) - seen} node(s) unreachable from the root")
    return BinaryTree.from_children(arena, index[g.root])


def to_adjacency(t: BinaryTree) -> AdjacencyTree:
    children = {
        f"n{v}": (() if t.left[v] == LEAF else (f"n{t.left[v]}", f"n{t.right[v]}"))
        for v in range(len(t))
    }
    return AdjacencyTree("n0", children)


# --- generators ---------------------------------------------------------------


def leaf() -> BinaryTree:
    return parse_term("a")


def complete_tree(depth: int) -> BinaryTree:
    word = "a"
    for _ in range(depth):
        word = "b" + word + word
    return parse_term(word)


def left_caterpillar(internal: int) -> BinaryTree:
    """b(b(...b(a,a)...,a),a) with ``internal`` internal nodes."""
    return parse_term("b" * internal + "a" * (internal + 1))


def random_tree(leaves: int, rng: random.Random) -> BinaryTree:
    """Uniformly random binary tree with ``leaves`` leaves (Remy's algorithm)."""
    if leaves < 1:
        raise ValueError("a tree has at least one leaf")
    left = [LEAF]
    right = [LEAF]
    parent = [-1]
    root = 0
    for _ in range(leaves - 1):
        x = rng.randrange(len(left))
        y = len(left)
        z = y + 1
        left += [LEAF, LEAF]
        right += [LEAF, LEAF]
        parent += [parent[x], y]
        p = parent[x]
        if p == -1:
            root = y
        elif left[p] == x:
            left[p] = y
        else:
            right[p] = y
        if rng.random() < 0.5:
            left[y], right[y] = x, z
        else:
            left[y], right[y] = z, x
        parent[x] = y
    arena = [None if l == LEAF else (l, r) for l, r in zip(left, right)]
    return BinaryTree.from_children(arena, root)


@lru_cache(maxsize=None)
def terms_with_leaves(leaves: int) -> tuple[str, ...]:
    """Every member of Bin with exactly ``leaves`` leaves."""
    if leaves == 1:
        return ("a",)
    out = []
    for k in range(1, leaves):
        for lt in terms_with_leaves(k):
            for rt in terms_with_leaves(leaves - k):
                out.append("b" + lt + rt)
    return tuple(out)


def all_terms(max_length: int) -> Iterator[str]:
    """Every member of Bin of length at most ``max_length``."""
    leaves = 1
    while 2 * leaves - 1 <= max_length:
        yield from terms_with_leaves(leaves)
        leaves += 1


def mirror_canonical(t: BinaryTree) -> str:
    """Term of a fixed representative of ``t`` under swapping children anywhere."""
    canon: list[str] = [""] * len(t)
    for v in range(len(t) - 1, -1, -1):
        if t.left[v] == LEAF:
            canon[v] = "a"
        else:
            x, y = canon[t.left[v]], canon[t.right[v]]
            if (len(x), x) > (len(y), y):
                x, y = y, x
            canon[v] = "b" + x + y
            canon[t.left[v]] = canon[t.right[v]] = ""
    return canon[0]
