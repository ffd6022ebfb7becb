"""Strahler numbers of explicit binary trees.

Three independent evaluators live here: the bottom-up recursion, an
embedding search for complete binary trees, and a heavy-child-first
traversal whose only working state is a delta-encoded stack.
"""
from __future__ import annotations

import math
from itertools import product
from dataclasses import dataclass, field

from .errors import MalformedEncoding
from .trees import LEAF, BinaryTree, parse_term


def s(x: int, y: int) -> int:
    """The Strahler operation: x+1 on a tie, otherwise the maximum."""
    return x + 1 if x == y else (x if x > y else y)


def strahler_naive(t: BinaryTree) -> int:
    """Bottom-up evaluation; preorder indices let us sweep right to left."""
    left, right = t.left, t.right
    val = [0] * len(left)
    for v in range(len(left) - 1, -1, -1):
        l = left[v]
        if l != LEAF:
            val[v] = s(val[l], val[right[v]])
    return val[0]


def log_bound(t: BinaryTree) -> int:
    """floor(log2 leaves), the largest Strahler number a tree of this size allows."""
    return t.leaf_count.bit_length() - 1


# --- embedding oracle -------------------------------------------------------


def _embedding_tables(t: BinaryTree, k: int) -> list[list[bool]]:
    """tables[j][v]: a complete tree of depth j embeds into the subtree at v.

    A depth-j complete tree embeds below v iff some node u under v (or v
    itself) is internal and depth j-1 embeds below both of u's children.
    """
    n = len(t)
    tables = [[True] * n]
    for j in range(1, k + 1):
        prev = tables[-1]
        cur = [False] * n
        for v in range(n - 1, -1, -1):
            l = t.left[v]
            if l != LEAF:
                r = t.right[v]
                cur[v] = (prev[l] and prev[r]) or cur[l] or cur[r]
        tables.append(cur)
        if not cur[0]:
            break
    return tables


def embed_oracle(t: BinaryTree, k: int) -> bool:
    """Does the complete binary tree of depth ``k`` embed topologically into ``t``?"""
    if k < 0:
        raise ValueError("k must be non-negative")
    if k > log_bound(t):
        return False
    tables = _embedding_tables(t, k)
    return len(tables) > k and tables[k][0]


def find_embedding(t: BinaryTree, k: int) -> dict[str, int] | None:
    """A witness map from complete-tree addresses ("", "0", "01", ...) to nodes of ``t``."""
    if not embed_oracle(t, k):
        return None
    tables = _embedding_tables(t, k)
    image: dict[str, int] = {}
    work = [("", 0, k)]
    while work:
        addr, v, j = work.pop()
        if j == 0:
            image[addr] = v
            continue
        # walk down until a node whose two children both host depth j-1
        while not (t.left[v] != LEAF and tables[j - 1][t.left[v]] and tables[j - 1][t.right[v]]):
            v = t.left[v] if tables[j][t.left[v]] else t.right[v]
        image[addr] = v
        work.append((addr + "0", t.left[v], j - 1))
        work.append((addr + "1", t.right[v], j - 1))
    return image


def check_embedding(t: BinaryTree, k: int, image: dict[str, int]) -> bool:
    """Verify that ``image`` maps the depth-k complete tree into ``t`` with
    left/right children landing in the left/right subtrees of their parent's image."""
    sizes = t.subtree_sizes()

    def below(u: int, v: int) -> bool:
        return v <= u < v + sizes[v]

    expected = {"".join(bits) for depth in range(k + 1) for bits in product("01", repeat=depth)}
    if set(image) != expected:
        return False
    for addr, v in image.items():
        if len(addr) == k:
            continue
        if t.left[v] == LEAF:
            return False
        if not below(image[addr + "0"], t.left[v]) or not below(image[addr + "1"], t.right[v]):
            return False
    return True


# --- delta encoding ----------------------------------------------------------


@dataclass(frozen=True)
class DeltaEncodedStack:
    word: str
    values: tuple[int, ...]


def dominated_mask(seq) -> list[bool]:
    mask = [False] * len(seq)
    best = -1
    for i in range(len(seq) - 1, -1, -1):
        mask[i] = seq[i] < best
        best = max(best, seq[i])
    return mask


def zero_dominated(seq) -> list[int]:
    return [0 if d else x for x, d in zip(seq, dominated_mask(seq))]


def encode_deltas(seq) -> DeltaEncodedStack:
    """Dominated positions become "0"; the remaining, non-increasing values
    become unary gaps ``1^d#`` to the next undominated value (or to zero)."""
    mask = dominated_mask(seq)
    undominated = [i for i, d in enumerate(mask) if not d]
    nxt = {i: (seq[j] if j is not None else 0)
           for i, j in zip(undominated, undominated[1:] + [None])}
    parts = []
    for i, x in enumerate(seq):
        parts.append("0" if mask[i] else "1" * (x - nxt[i]) + "#")
    return DeltaEncodedStack("".join(parts), tuple(zero_dominated(seq)))


def decode_deltas(word: str) -> DeltaEncodedStack:
    """Inverse of :func:`encode_deltas`, up to the zeroing of dominated entries."""
    tokens: list[int | None] = []  # None = dominated
    run = 0
    for pos, c in enumerate(word):
        if c == "1":
            run += 1
        elif c == "#":
            tokens.append(run)
            run = 0
        elif c == "0":
            if run:
                raise MalformedEncoding(f"'0' inside a unary run at position {pos}")
            tokens.append(None)
        else:
            raise MalformedEncoding(f"unexpected symbol {c!r} at position {pos}")
    if run:
        raise MalformedEncoding("unterminated unary run")
    values = [0] * len(tokens)
    acc = 0
    for i in range(len(tokens) - 1, -1, -1):
        if tokens[i] is not None:
            acc += tokens[i]
            values[i] = acc
    # a dominated marker needs a strictly larger later value; zeroed values round-trip
    if encode_deltas(values).word != word:
        raise MalformedEncoding("word is not the encoding of any sequence")
    return DeltaEncodedStack(word, tuple(values))


def fold_right(seq) -> int:
    """Combine stack values the way the traversal eventually does, top first."""
    if not seq:
        return 0
    acc = seq[-1]
    for x in reversed(seq[:-1]):
        acc = s(x, acc)
    return acc


# --- heavy-first low-space traversal ----------------------------------------


@dataclass
class LowspaceResult:
    value: int
    peak_state_bits: int
    snapshots: list[tuple[tuple[int, ...], tuple[int, ...]]] = field(default_factory=list)

    def __iter__(self):
        return iter((self.value, self.peak_state_bits))


STATE_OVERHEAD_BITS = 2


def strahler_lowspace(term: str | BinaryTree, trace: bool = False) -> LowspaceResult:
    """Strahler number by a depth-first walk that always enters the larger
    subtree first (left on ties).

    Besides the current position and a direction flag, the walk keeps only
    the list of Strahler numbers of finished subtrees, with dominated entries
    zeroed, measured through its delta encoding.  With ``trace`` every
    stack state is recorded together with the sizes of the finished subtrees.
    """
    t = parse_term(term) if isinstance(term, str) else term
    n = len(t)
    left, right = t.left, t.right
    sizes = t.subtree_sizes()
    parent = t.parents()
    position_bits = max(1, math.ceil(math.log2(n + 1)))

    def heavy(v: int) -> int:
        return left[v] if sizes[left[v]] >= sizes[right[v]] else right[v]

    stack: list[int] = []
    stack_sizes: list[int] = []
    snapshots = []
    peak = 0

    def push(x: int, size: int) -> None:
        nonlocal peak
        for i in range(len(stack) - 1, -1, -1):
            if stack[i] >= x:
                break
            stack[i] = 0
        stack.append(x)
        stack_sizes.append(size)
        # the encoding spends one symbol per entry plus the unary gaps, which sum to the maximum
        bits = position_bits + 1 + 2 * (len(stack) + max(stack)) + STATE_OVERHEAD_BITS
        peak = max(peak, bits)
        if trace:
            snapshots.append((tuple(stack), tuple(stack_sizes)))

    v = 0
    going_down = True
    while True:
        if going_down:
            if left[v] == LEAF:
                push(0, 1)
                going_down = False
            else:
                v = heavy(v)
                continue
        # moving up out of v
        p = parent[v]
        if p == -1:
            break
        if v == heavy(p):
            v = right[p] if v == left[p] else left[p]
            going_down = True
            continue
        b = stack.pop()
        a = stack.pop()
        stack_sizes.pop()
        stack_sizes.pop()
        push(s(a, b), sizes[p])
        v = p
    return LowspaceResult(stack[0], max(peak, position_bits + 1 + STATE_OVERHEAD_BITS), snapshots)
