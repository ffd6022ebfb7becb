"""Chomsky-normal-form grammars without terminals and their Strahler numbers.

A production is ``A -> eps`` or ``A -> B C``.  A derivation tree is a
binary tree whose internal nodes use binary productions and whose leaves
use epsilon productions; every node is labelled by its nonterminal.  A
derivation tree is acyclic when no nonterminal repeats on a root-to-leaf
path (leaves included).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable

from .core import s
from .errors import LimitExceeded, MalformedInput, NoneExists, NoTree, Unproductive
from .trees import BinaryTree, parse_term

INFINITY = math.inf
EPS: tuple = ()
ACYCLIC_LIMIT = 128  # nonterminals; the memo is keyed by bitsets over N


@dataclass(frozen=True)
class CnfGrammar:
    start: str
    productions: tuple[tuple[str, tuple[str, ...]], ...]
    nonterminals: frozenset[str] = field(default=frozenset())

    def __post_init__(self):
        names = set(self.nonterminals) | {self.start}
        for head, body in self.productions:
            if len(body) not in (0, 2):
                raise MalformedInput(f"production {head} -> {' '.join(body)} is not in CNF")
            names.add(head)
            names.update(body)
        object.__setattr__(self, "nonterminals", frozenset(names))
        object.__setattr__(self, "productions", tuple(dict.fromkeys(self.productions)))

    def bodies(self) -> dict[str, list[tuple[str, ...]]]:
        out: dict[str, list[tuple[str, ...]]] = {a: [] for a in sorted(self.nonterminals)}
        for head, body in self.productions:
            out[head].append(body)
        return out

    def restrict(self, keep: set[str]) -> "CnfGrammar":
        prods = tuple((a, b) for a, b in self.productions if a in keep and all(x in keep for x in b))
        return CnfGrammar(self.start, prods, frozenset(keep | {self.start}))


def grammar(start: str, rules: dict[str, Iterable[Iterable[str]]]) -> CnfGrammar:
    """Build from ``{head: [body, ...]}`` with bodies as sequences (empty for eps)."""
    prods = tuple((a, tuple(b)) for a, bodies in rules.items() for b in bodies)
    return CnfGrammar(start, prods, frozenset(rules))


_NAME = r"[^\s]+"


def parse_grammar(text: str) -> CnfGrammar:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise MalformedInput("empty grammar file")
    m = re.fullmatch(rf"start\s+({_NAME})", lines[0])
    if not m:
        raise MalformedInput("first line must be 'start <S>'")
    start = m.group(1)
    prods = []
    for ln in lines[1:]:
        m = re.fullmatch(rf"({_NAME})\s*->\s*(.*)", ln)
        if not m:
            raise MalformedInput(f"bad production line {ln!r}")
        body = m.group(2).split()
        if body == ["eps"]:
            body = []
        elif len(body) != 2 or "eps" in body:
            raise MalformedInput(f"bad production body in {ln!r}")
        prods.append((m.group(1), tuple(body)))
    return CnfGrammar(start, tuple(prods))


def format_grammar(g: CnfGrammar) -> str:
    lines = [f"start {g.start}"]
    for head, body in g.productions:
        lines.append(f"{head} -> {' '.join(body) if body else 'eps'}")
    return "\n".join(lines) + "\n"


# --- productivity -----------------------------------------------------------


def _productive_order(g: CnfGrammar) -> dict[str, tuple[str, ...]]:
    """Nonterminal -> the production that first witnessed its productivity."""
    witness: dict[str, tuple[str, ...]] = {}
    changed = True
    while changed:
        changed = False
        for head, body in g.productions:
            if head not in witness and all(x in witness for x in body):
                witness[head] = body
                changed = True
    return witness


def productive_set(g: CnfGrammar) -> set[str]:
    return set(_productive_order(g))


def reachable(g: CnfGrammar, roots: Iterable[str]) -> set[str]:
    bodies = g.bodies()
    seen = set(roots)
    stack = list(seen)
    while stack:
        a = stack.pop()
        for body in bodies.get(a, ()):
            for x in body:
                if x not in seen:
                    seen.add(x)
                    stack.append(x)
    return seen


PCertificate = dict  # nonterminal -> chosen production body


def derive_p_certificate(g: CnfGrammar, required: Iterable[str] | None = None) -> PCertificate:
    """Certificate over all productive nonterminals; ``required`` (default:
    everything reachable from the start) must all be productive."""
    witness = _productive_order(g)
    need = set(required) if required is not None else reachable(g, [g.start])
    missing = sorted(need - set(witness))
    if missing:
        raise NoneExists(f"unproductive nonterminals: {' '.join(missing)}")
    return dict(witness)


def verify_p_certificate(g: CnfGrammar, f: PCertificate) -> bool:
    allowed = {(a, b) for a, b in g.productions}
    for a, body in f.items():
        if (a, tuple(body)) not in allowed:
            return False
        if any(x not in f for x in body):
            return False
    # the witness graph must be acyclic
    state: dict[str, int] = {}
    for root in f:
        if root in state:
            continue
        stack = [(root, iter(f[root]))]
        state[root] = 1
        while stack:
            a, it = stack[-1]
            nxt = next(it, None)
            if nxt is None:
                state[a] = 2
                stack.pop()
            elif state.get(nxt) == 1:
                return False
            elif nxt not in state:
                state[nxt] = 1
                stack.append((nxt, iter(f[nxt])))
    return True


# --- unrestricted maximum ---------------------------------------------------


def _productive_part(g: CnfGrammar) -> CnfGrammar:
    prod = productive_set(g)
    if g.start not in prod:
        raise Unproductive(f"start symbol {g.start} derives no tree")
    return g.restrict(prod)


def strahler_fixpoint(g: CnfGrammar) -> dict[str, int]:
    """Least fixpoint of st_A >= s(st_B, st_C), values capped at |N|+1."""
    cap = len(g.nonterminals) + 1
    st = {a: 0 for a in g.nonterminals}
    binary = [(a, b) for a, b in g.productions if b]
    changed = True
    while changed:
        changed = False
        for a, (b, c) in binary:
            v = min(cap, s(st[b], st[c]))
            if v > st[a]:
                st[a] = v
                changed = True
    return st


def max_strahler(g: CnfGrammar) -> int | float:
    """Supremum of st over derivation trees from the start; INFINITY if unbounded."""
    h = _productive_part(g)
    value = strahler_fixpoint(h)[h.start]
    return INFINITY if value > len(h.nonterminals) else value


def _reach_closure(nodes: Iterable[str], edges: dict[str, set[str]]) -> dict[str, set[str]]:
    out = {}
    for a in nodes:
        seen = {a}
        stack = [a]
        while stack:
            x = stack.pop()
            for y in edges.get(x, ()):
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        out[a] = seen
    return out


def self_doubling(g: CnfGrammar) -> set[str]:
    """Nonterminals A with A =>* AA (every terminal word is empty here, so
    nullable is the same as productive)."""
    nullable = productive_set(g)
    edges: dict[str, set[str]] = {}
    for a, body in g.productions:
        if body:
            b, c = body
            if c in nullable:
                edges.setdefault(a, set()).add(b)
            if b in nullable:
                edges.setdefault(a, set()).add(c)
    reach1 = _reach_closure(g.nonterminals, edges)
    out = set()
    binary = [(a, b) for a, b in g.productions if b]
    for a in g.nonterminals:
        for d, (e, f) in binary:
            if d in reach1[a] and a in reach1[e] and a in reach1[f]:
                out.add(a)
                break
    return out


def brute_force_max_strahler(g: CnfGrammar, depth_cap: int) -> int:
    """Largest st over derivation trees of height <= depth_cap (exact on that set)."""
    h = _productive_part(g)
    values: dict[str, set[int]] = {a: set() for a in h.nonterminals}
    for _ in range(depth_cap + 1):
        new = {a: set() for a in h.nonterminals}
        for a, body in h.productions:
            if not body:
                new[a].add(0)
            else:
                b, c = body
                for x in values[b]:
                    for y in values[c]:
                        new[a].add(s(x, y))
        values = new
    if not values[h.start]:
        raise LimitExceeded(f"no derivation tree of height <= {depth_cap}")
    return max(values[h.start])


# --- acyclic derivation trees -----------------------------------------------


class _Indexed:
    """Bitset view of a grammar for the acyclic searches."""

    def __init__(self, g: CnfGrammar, limit: int):
        if len(g.nonterminals) > limit:
            raise LimitExceeded(f"{len(g.nonterminals)} nonterminals exceed the limit {limit}")
        names = sorted(g.nonterminals)
        self.index = {a: i for i, a in enumerate(names)}
        self.eps = [False] * len(names)
        self.pairs: list[list[tuple[int, int]]] = [[] for _ in names]
        for a, body in g.productions:
            i = self.index[a]
            if body:
                self.pairs[i].append((self.index[body[0]], self.index[body[1]]))
            else:
                self.eps[i] = True
        # reflexive-transitive reachability as bitsets, iterated to a fixpoint
        succ = [0] * len(names)
        for i, pairs in enumerate(self.pairs):
            for b, c in pairs:
                succ[i] |= 1 << b | 1 << c
        reach = [1 << i | succ[i] for i in range(len(names))]
        changed = True
        while changed:
            changed = False
            for i in range(len(names)):
                acc, rest = reach[i], succ[i]
                while rest:
                    low = rest & -rest
                    acc |= reach[low.bit_length() - 1]
                    rest ^= low
                if acc != reach[i]:
                    reach[i] = acc
                    changed = True
        self.reach = reach
        self.start = self.index[g.start]


def acyclic_table(g: CnfGrammar, limit: int = ACYCLIC_LIMIT):
    """The memoized m(A, U): best st of an acyclic A-tree avoiding U below
    its root, or None.  U is a bitset and always contains A."""
    ix = _Indexed(g, limit)
    memo: dict[tuple[int, int], int | None] = {}
    eps, pairs, reach = ix.eps, ix.pairs, ix.reach

    def best_from(a: int, used: int) -> int | None:
        used &= reach[a]
        key = (a, used)
        if key in memo:
            return memo[key]
        value = 0 if eps[a] else None
        for b, c in pairs[a]:
            if used >> b & 1 or used >> c & 1:
                continue
            x = best_from(b, used | 1 << b)
            if x is None:
                continue
            y = best_from(c, used | 1 << c)
            if y is None:
                continue
            v = x + 1 if x == y else max(x, y)
            if value is None or v > value:
                value = v
        memo[key] = value
        return value

    return ix, best_from


def acyclic_max_strahler(g: CnfGrammar, limit: int = ACYCLIC_LIMIT) -> int:
    ix, best = acyclic_table(g, limit)
    value = best(ix.start, 1 << ix.start)
    if value is None:
        raise NoTree(f"no acyclic derivation tree for {g.start}")
    return value


def acyclic_at_least(g: CnfGrammar, k: int, limit: int = ACYCLIC_LIMIT) -> bool:
    """Decide whether some acyclic tree has st >= k, by the goal triples
    (A, U, i): find an acyclic A-tree with st >= i avoiding U below A."""
    ix = _Indexed(g, limit)

    @lru_cache(maxsize=None)
    def goal(a: int, used: int, i: int) -> bool:
        if i == 0 and ix.eps[a]:
            return True
        for b, c in ix.pairs[a]:
            if used >> b & 1 or used >> c & 1:
                continue
            ub, uc = used | 1 << b, used | 1 << c
            if i == 0:
                if sub(b, ub, 0) and sub(c, uc, 0):
                    return True
                continue
            if sub(b, ub, i) and sub(c, uc, 0):
                return True
            if sub(c, uc, i) and sub(b, ub, 0):
                return True
            if sub(b, ub, i - 1) and sub(c, uc, i - 1):
                return True
        return False

    def sub(a: int, used: int, i: int) -> bool:
        return goal(a, used & ix.reach[a], i)

    return sub(ix.start, 1 << ix.start, k)


@dataclass(frozen=True)
class DerivationTree:
    """Shape plus the nonterminal at each preorder node."""

    shape: BinaryTree
    labels: tuple[str, ...]


def enumerate_acyclic_trees(g: CnfGrammar, max_count: int = 10000) -> list[DerivationTree]:
    bodies = g.bodies()

    def trees(a: str, used: frozenset) -> list[tuple[str, tuple[str, ...]]]:
        out = []
        for body in bodies.get(a, ()):
            if not body:
                out.append(("a", (a,)))
                continue
            b, c = body
            if b in used or c in used:
                continue
            left = trees(b, used | {b})
            if not left:
                continue
            right = trees(c, used | {c})
            for lw, ll in left:
                for rw, rl in right:
                    out.append(("b" + lw + rw, (a,) + ll + rl))
                    if len(out) > max_count:
                        raise LimitExceeded(f"more than {max_count} acyclic trees")
        return out

    found = trees(g.start, frozenset([g.start]))
    return [DerivationTree(parse_term(w), labels) for w, labels in found]


def bracket(a: str, b: str) -> str:
    """Canonical name of the helper nonterminal with the single production -> a b."""
    return f"[{a},{b}]"
