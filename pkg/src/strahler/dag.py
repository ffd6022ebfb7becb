"""Rooted binary DAGs: unfolding, Strahler evaluation, and a bounded-stack
search that settles [st >= k] by guessing statements about children.

A :class:`Dag` is kept normalized: only nodes reachable from the root,
numbered so that every child has a larger index than its parents (root 0).
"""
from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple

from .core import s
from .errors import BudgetExceeded, MalformedInput
from .trees import LEAF, BinaryTree, format_node_lines, parse_node_lines, parse_term

DEFAULT_BUDGET = 1 << 22


@dataclass(frozen=True)
class Dag:
    left: tuple[int, ...]
    right: tuple[int, ...]
    names: tuple[str, ...]

    root = 0

    def __len__(self) -> int:
        return len(self.left)

    def is_leaf(self, v: int) -> bool:
        return self.left[v] == LEAF

    def internal_nodes(self) -> list[int]:
        return [v for v in range(len(self.left)) if self.left[v] != LEAF]

    @classmethod
    def from_children(cls, children: dict, root) -> "Dag":
        """Normalize an arbitrary child map ``name -> () | (l, r)``.

        Unreachable nodes are dropped; a cycle raises :class:`MalformedInput`.
        """
        for name, kids in children.items():
            if len(kids) not in (0, 2):
                raise MalformedInput(f"node {name!r} must have 0 or 2 children")
            for k in kids:
                if k not in children:
                    raise MalformedInput(f"node {name!r} refers to undeclared {k!r}")
        if root not in children:
            raise MalformedInput(f"root {root!r} is not declared")
        # iterative DFS, postorder; grey nodes on the stack detect cycles
        state: dict = {}
        post: list = []
        stack = [(root, 0)]
        while stack:
            v, i = stack.pop()
            if i == 0:
                if state.get(v) == 2:
                    continue
                state[v] = 1
            kids = children[v]
            if i < len(kids):
                stack.append((v, i + 1))
                k = kids[i]
                st = state.get(k)
                if st == 1:
                    raise MalformedInput(f"cycle through node {k!r}")
                if st is None:
                    stack.append((k, 0))
            else:
                state[v] = 2
                post.append(v)
        order = post[::-1]
        index = {v: i for i, v in enumerate(order)}
        left = tuple(index[children[v][0]] if children[v] else LEAF for v in order)
        right = tuple(index[children[v][1]] if children[v] else LEAF for v in order)
        return cls(left, right, tuple(str(v) for v in order))

    def to_children(self) -> dict[str, tuple[str, ...]]:
        return {
            self.names[v]: (() if self.left[v] == LEAF
                            else (self.names[self.left[v]], self.names[self.right[v]]))
            for v in range(len(self))
        }

    def reachable_from(self, v: int) -> set[int]:
        seen = {v}
        stack = [v]
        while stack:
            u = stack.pop()
            if self.left[u] != LEAF:
                for c in (self.left[u], self.right[u]):
                    if c not in seen:
                        seen.add(c)
                        stack.append(c)
        return seen


def parse_dag(text: str) -> Dag:
    root, children = parse_node_lines(text, kind="dag")
    return Dag.from_children(children, root)


def format_dag(d: Dag) -> str:
    return format_node_lines(d.names[0], d.to_children())


def dag_from_tree(t: BinaryTree) -> Dag:
    """The tree itself, viewed as an unshared DAG."""
    return Dag(t.left, t.right, tuple(f"n{v}" for v in range(len(t))))


def hash_cons(t: BinaryTree) -> Dag:
    """Minimal DAG of ``t``: equal subtrees become one node."""
    ids = [0] * len(t)
    table: dict[tuple[int, int], int] = {(LEAF, LEAF): 0}
    for v in range(len(t) - 1, -1, -1):
        key = (LEAF, LEAF) if t.left[v] == LEAF else (ids[t.left[v]], ids[t.right[v]])
        if key not in table:
            table[key] = len(table)
        ids[v] = table[key]
    children = {f"d{i}": (() if key == (LEAF, LEAF) else (f"d{key[0]}", f"d{key[1]}"))
                for key, i in table.items()}
    return Dag.from_children(children, f"d{ids[0]}")


def unfolded_sizes(d: Dag) -> list[int]:
    size = [1] * len(d)
    for v in range(len(d) - 1, -1, -1):
        if d.left[v] != LEAF:
            size[v] = 1 + size[d.left[v]] + size[d.right[v]]
    return size


def unfold(d: Dag, node_budget: int = DEFAULT_BUDGET) -> BinaryTree:
    """The tree obtained by copying shared nodes."""
    total = unfolded_sizes(d)[0]
    if total > node_budget:
        raise BudgetExceeded(f"unfolding has {total} nodes, budget is {node_budget}")
    word = []
    stack = [0]
    while stack:
        v = stack.pop()
        if d.left[v] == LEAF:
            word.append("a")
        else:
            word.append("b")
            stack.append(d.right[v])
            stack.append(d.left[v])
    return parse_term("".join(word))


def dag_strahler(d: Dag) -> int:
    val = dag_values(d)
    return val[0]


def dag_values(d: Dag) -> list[int]:
    val = [0] * len(d)
    for v in range(len(d) - 1, -1, -1):
        if d.left[v] != LEAF:
            val[v] = s(val[d.left[v]], val[d.right[v]])
    return val


# --- generators -------------------------------------------------------------


def random_dag(internal: int, rng: random.Random) -> Dag:
    """Each new internal node picks two earlier nodes; the last one is the root."""
    children: dict[str, tuple[str, ...]] = {"v0": ()}
    leaves = 1 + rng.randrange(3)
    for i in range(1, leaves):
        children[f"v{i}"] = ()
    names = list(children)
    for i in range(internal):
        a, b = rng.choice(names), rng.choice(names)
        if rng.random() < 0.5 and len(names) > 1:
            b = names[-1]
        name = f"v{len(names)}"
        children[name] = (a, b)
        names.append(name)
    return Dag.from_children(children, names[-1])


def minimal_dags(max_nodes: int) -> Iterator[Dag]:
    """Every minimal (fully shared) DAG with at most ``max_nodes`` nodes, once.

    Node 0 is the unique leaf; node i > 0 gets a pair of earlier nodes, with
    keys (max child, left, right) strictly increasing along the list, and the
    last node is the root.  Numbering a DAG by repeatedly taking the
    smallest-keyed node whose children are numbered gives such a list, and
    every such list arises that way, so each DAG appears exactly once.
    """
    for pairs in _key_sequences(max_nodes):
        children = {"v0": ()}
        for i, (l, r) in enumerate(pairs, start=1):
            children[f"v{i}"] = (f"v{l}", f"v{r}")
        yield Dag.from_children(children, f"v{len(pairs)}")


def _key_sequences(max_nodes: int, labels: list | None = None, combine=None) -> Iterator[list[tuple[int, int]]]:
    """Strictly increasing key sequences whose last node reaches all others.

    When ``labels`` and ``combine`` are given, ``labels[i]`` is kept equal to
    ``combine(labels[l], labels[r])`` for every listed node i = (l, r).
    The yielded list is shared; copy it to keep it.
    """
    pairs: list[tuple[int, int]] = []
    refs = [0]

    def extend(count: int, last_key, orphans: int):
        if orphans == 1:
            yield pairs
        if count == max_nodes:
            return
        remaining = max_nodes - count
        for hi in range(count):
            for lo in range(hi + 1):
                for l, r in (((lo, hi), (hi, lo)) if lo != hi else ((hi, hi),)):
                    key = (hi, l, r)
                    if last_key is not None and key <= last_key:
                        continue
                    adopted = (refs[l] == 0) + (refs[r] == 0 and r != l)
                    o = orphans - adopted + 1
                    if o - (remaining - 1) > 1:
                        continue
                    refs[l] += 1
                    refs[r] += 1
                    refs.append(0)
                    pairs.append((l, r))
                    if labels is not None:
                        labels.append(combine(labels[l], labels[r]))
                    yield from extend(count + 1, key, o)
                    if labels is not None:
                        labels.pop()
                    pairs.pop()
                    refs.pop()
                    refs[l] -= 1
                    refs[r] -= 1

    yield from extend(1, None, 1)


# --- bounded-stack statement search -----------------------------------------

AT_LEAST, EQUALS = 0, 1
LEFT, RIGHT = 0, 1


class Statement(NamedTuple):
    """[st(node) >= m] or [st(node) = m]."""

    kind: int
    node: int
    m: int

    def __str__(self) -> str:
        return f"[st_{self.node} {'>=' if self.kind == AT_LEAST else '='} {self.m}]"


def classify_statement(kind: int, m: int, leaf: bool) -> bool | None:
    """True / False for statements decidable on sight, None otherwise."""
    if kind == AT_LEAST:
        if m == 0 or (m == 1 and not leaf):
            return True
        return False if leaf else None
    if leaf:
        return m == 0
    return False if m == 0 else None


def branch_patterns(kind: int, m: int) -> list[tuple[tuple[int, int, int], tuple[int, int, int]]]:
    """Mutually exclusive (new active, pushed) pairs, as (child side, kind, m).

    For s(st1, st2) >= m: both >= m-1, or one side >= m with the other
    pinned to a value below m-1.  For = m: both = m-1, or one side = m
    with the other pinned below m.
    """
    pinned_below = m - 1 if kind == AT_LEAST else m
    out = [((LEFT, kind, m - 1), (RIGHT, kind, m - 1))]
    out += [((RIGHT, EQUALS, i), (LEFT, kind, m)) for i in range(pinned_below)]
    out += [((LEFT, EQUALS, i), (RIGHT, kind, m)) for i in range(pinned_below)]
    return out


def classify(d: Dag, x: Statement) -> bool | None:
    return classify_statement(x.kind, x.m, d.left[x.node] == LEAF)


def branches(d: Dag, x: Statement) -> list[tuple[Statement, Statement]]:
    kids = (d.left[x.node], d.right[x.node])
    return [(Statement(ak, kids[aside], am), Statement(pk, kids[pside], pm))
            for (aside, ak, am), (pside, pk, pm) in branch_patterns(x.kind, x.m)]


class Summary(NamedTuple):
    """What the runs started from one statement look like, stack below ignored.

    ``count``: accepting runs that discharge it; ``valid``: every local
    stack (pushed statements plus active) is non-increasing, uses no value
    three times and stays at or below the statement's value; ``dup``: the
    most copies of the statement's own value in one local stack.
    """

    count: int
    valid: bool
    dup: int


def _slot(kind: int, m: int) -> int:
    return 2 * m + kind


def leaf_row(k: int) -> tuple[Summary, ...]:
    row = []
    for m in range(k + 1):
        for kind in (AT_LEAST, EQUALS):
            row.append(Summary(1 if classify_statement(kind, m, True) else 0, True, 1))
    return tuple(row)


def internal_row(left_row, right_row, k: int) -> tuple[Summary, ...]:
    """Summaries for every statement about a node from those of its children.

    A run from X either stays at X, or follows branch (a, p): p sits on the
    stack while a is discharged, then p becomes active once a succeeds.
    """
    rows = (left_row, right_row)
    out = []
    for m in range(k + 1):
        for kind in (AT_LEAST, EQUALS):
            verdict = classify_statement(kind, m, False)
            if verdict is not None:
                out.append(Summary(1 if verdict else 0, True, 1))
                continue
            count, valid, dup = 0, True, 1
            for (aside, ak, am), (pside, pk, pm) in branch_patterns(kind, m):
                a = rows[aside][_slot(ak, am)]
                p = rows[pside][_slot(pk, pm)]
                count += a.count * p.count
                # local stacks [p] + l for l from a's runs
                own = 1 + (a.dup if am == pm else 0)
                valid = valid and a.valid and am <= pm <= m and own <= 2
                dup = max(dup, (pm == m) + (a.dup if am == m else 0))
                # after a succeeds, p runs on its own
                if a.count:
                    valid = valid and p.valid and pm <= m
                    dup = max(dup, p.dup if pm == m else 0)
            out.append(Summary(count, valid, dup))
    return tuple(out)


@dataclass
class SearchTrace:
    accepting_paths: int
    invariant_holds: bool
    snapshots: list[tuple[Statement, ...]] | None = None

    @property
    def configurations(self) -> int:
        return len(self.snapshots or ())


def stack_invariant(snapshot: tuple[Statement, ...]) -> bool:
    """Values non-increasing towards the active statement, none used thrice."""
    nums = [x.m for x in snapshot]
    if any(a < b for a, b in zip(nums, nums[1:])):
        return False
    return all(c <= 2 for c in Counter(nums).values())


def statement_rows(d: Dag, k: int) -> list[tuple[Summary, ...]]:
    rows: list = [None] * len(d)
    leaf = leaf_row(k)
    for v in range(len(d) - 1, -1, -1):
        if d.left[v] == LEAF:
            rows[v] = leaf
        else:
            rows[v] = internal_row(rows[d.left[v]], rows[d.right[v]], k)
    return rows


def dag_statement_search(d: Dag, k: int, snapshots: bool = True) -> tuple[bool, SearchTrace]:
    """Decide st >= k by exploring every run of the guessing procedure.

    A configuration is an active statement plus a stack of pending ones.
    Statements true on sight pop the stack (empty stack: accept), false
    ones reject, the rest split into their exclusive branches.  Runs from
    a statement do not look at the stack below it, so the work is shared
    per statement.  With ``snapshots`` every distinct configuration is
    also visited explicitly and recorded in the trace.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    root = statement_rows(d, k)[0][_slot(AT_LEAST, k)]
    trace = SearchTrace(root.count, root.valid)
    if snapshots:
        count, seen = _explore(d, k)
        if count != root.count:
            raise AssertionError("explicit and shared run counts differ")
        trace.snapshots = seen
    return root.count > 0, trace


def _explore(d: Dag, k: int):
    start = (Statement(AT_LEAST, 0, k), ())
    memo: dict = {}
    snapshots: list[tuple[Statement, ...]] = []
    succ_cache: dict = {}

    def successors(config):
        active, stack = config
        verdict = classify(d, active)
        if verdict is True:
            return [(stack[-1], stack[:-1])] if stack else 1
        if verdict is False:
            return 0
        return [(a, stack + (p,)) for a, p in branches(d, active)]

    work = [start]
    while work:
        config = work[-1]
        if config in memo:
            work.pop()
            continue
        succ = succ_cache.get(config)
        if succ is None:
            succ = successors(config)
            succ_cache[config] = succ
            snapshots.append(config[1] + (config[0],))
        if isinstance(succ, int):
            memo[config] = succ
            work.pop()
            continue
        pending = [c for c in succ if c not in memo]
        if pending:
            work.extend(pending)
            continue
        memo[config] = sum(memo[c] for c in succ)
        del succ_cache[config]
        work.pop()
    return memo[start], snapshots


def sweep_minimal_dags(max_nodes: int, k: int) -> Iterator[tuple[int, tuple[Summary, ...]]]:
    """(Strahler number, root statement summaries) for every minimal DAG
    with at most ``max_nodes`` nodes, in the order of :func:`minimal_dags`.

    A node's summaries and Strahler number depend only on its children's,
    and only a few hundred distinct rows occur, so rows are interned and
    combined through a cache keyed by the children's row ids.
    """
    interned: dict[tuple, int] = {}
    table: list[tuple[int, tuple[Summary, ...]]] = []

    def intern(entry) -> int:
        i = interned.get(entry)
        if i is None:
            i = interned[entry] = len(table)
            table.append(entry)
        return i

    combine: dict[tuple[int, int], int] = {}

    def combined(a: int, b: int) -> int:
        i = combine.get((a, b))
        if i is None:
            (va, ra), (vb, rb) = table[a], table[b]
            i = combine[(a, b)] = intern((s(va, vb), internal_row(ra, rb, k)))
        return i

    ids = [intern((0, leaf_row(k)))]
    for pairs in _key_sequences(max_nodes, ids, combined):
        yield table[ids[-1]]
