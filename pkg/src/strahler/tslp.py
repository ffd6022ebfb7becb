"""Tree straight-line programs.

Tree variables derive trees, context variables derive contexts with one
hole.  Rules take one of six shapes::

    A = a          A = b(B,C)      A = D(C)         (tree variables)
    E = b(x,B)     E = b(B,x)      E = D(C(x))      (context variables)

Strahler numbers are computed without expanding anything: a tree
variable gets its Strahler number, a context variable the [l,h] function
of its value.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from .context import LhFunction, apply_lh, compose_lh, lh_from_sibling
from .core import s
from .dag import DEFAULT_BUDGET
from .errors import BudgetExceeded, MalformedInput
from .trees import BinaryContext, BinaryTree, parse_context, parse_term


@dataclass(frozen=True)
class Leaf:
    def __str__(self) -> str:
        return "a"


@dataclass(frozen=True)
class Node:
    left: str
    right: str

    def __str__(self) -> str:
        return f"b({self.left},{self.right})"


@dataclass(frozen=True)
class Apply:
    ctx: str
    arg: str

    def __str__(self) -> str:
        return f"{self.ctx}({self.arg})"


@dataclass(frozen=True)
class HoleLeft:
    """b(x, B)"""

    arg: str

    def __str__(self) -> str:
        return f"b(x,{self.arg})"


@dataclass(frozen=True)
class HoleRight:
    """b(B, x)"""

    arg: str

    def __str__(self) -> str:
        return f"b({self.arg},x)"


@dataclass(frozen=True)
class Compose:
    outer: str
    inner: str

    def __str__(self) -> str:
        return f"{self.outer}({self.inner}(x))"


Rule = Union[Leaf, Node, Apply, HoleLeft, HoleRight, Compose]
TREE_RULES = (Leaf, Node, Apply)
RESERVED = {"a", "b", "x"}


def references(rule: Rule) -> tuple[str, ...]:
    if isinstance(rule, Leaf):
        return ()
    if isinstance(rule, Node):
        return (rule.left, rule.right)
    if isinstance(rule, Apply):
        return (rule.ctx, rule.arg)
    if isinstance(rule, Compose):
        return (rule.outer, rule.inner)
    return (rule.arg,)


@dataclass
class Tslp:
    """Validated program: ``rules`` is ordered so that every variable comes
    after the variables its rule mentions, and holds only variables
    reachable from ``start``."""

    start: str
    rules: dict[str, Rule]
    _depth: dict[str, int] = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        self.rules = _validate(self.start, self.rules)

    def is_tree_var(self, name: str) -> bool:
        return isinstance(self.rules[name], TREE_RULES)

    @property
    def tree_vars(self) -> list[str]:
        return [a for a in self.rules if self.is_tree_var(a)]

    @property
    def context_vars(self) -> list[str]:
        return [a for a in self.rules if not self.is_tree_var(a)]

    def heights(self) -> dict[str, int]:
        if not self._depth:
            for name, rule in self.rules.items():
                refs = references(rule)
                self._depth[name] = 1 + max(self._depth[r] for r in refs) if refs else 0
        return self._depth

    @property
    def depth(self) -> int:
        return self.heights()[self.start]

    @property
    def size(self) -> int:
        """Nodes plus edges of the rule DAG."""
        return sum(1 + len(references(r)) for r in self.rules.values())

    def __str__(self) -> str:
        return format_tslp(self)


def _validate(start: str, rules: dict[str, Rule]) -> dict[str, Rule]:
    if start not in rules:
        raise MalformedInput(f"start variable {start!r} has no rule")
    for name, rule in rules.items():
        if name in RESERVED:
            raise MalformedInput(f"{name!r} is reserved")
        for ref in references(rule):
            if ref not in rules:
                raise MalformedInput(f"rule {name} mentions undefined {ref!r}")

    def is_tree(a):
        return isinstance(rules[a], TREE_RULES)

    for name, rule in rules.items():
        if isinstance(rule, Node):
            wanted = [(rule.left, True), (rule.right, True)]
        elif isinstance(rule, Apply):
            wanted = [(rule.ctx, False), (rule.arg, True)]
        elif isinstance(rule, Compose):
            wanted = [(rule.outer, False), (rule.inner, False)]
        elif isinstance(rule, (HoleLeft, HoleRight)):
            wanted = [(rule.arg, True)]
        else:
            wanted = []
        for ref, tree in wanted:
            if is_tree(ref) != tree:
                kind = "tree" if tree else "context"
                raise MalformedInput(f"rule {name} needs a {kind} variable, {ref} is not one")
    if not is_tree(start):
        raise MalformedInput("the start variable must derive a tree")
    # reachable variables in dependency order; detect cycles
    order: list[str] = []
    state: dict[str, int] = {}
    stack = [(start, 0)]
    while stack:
        v, i = stack.pop()
        if i == 0:
            if state.get(v) == 2:
                continue
            state[v] = 1
        refs = references(rules[v])
        if i < len(refs):
            stack.append((v, i + 1))
            r = refs[i]
            if state.get(r) == 1:
                raise MalformedInput(f"cyclic rules through {r!r}")
            if r not in state:
                stack.append((r, 0))
        else:
            state[v] = 2
            order.append(v)
    return {v: rules[v] for v in order}


# --- text format ---------------------------------------------------------------

_NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_SHAPES = [
    (re.compile(rf"^({_NAME})\s*=\s*a$"), lambda m: Leaf()),
    (re.compile(rf"^({_NAME})\s*=\s*b\(\s*x\s*,\s*({_NAME})\s*\)$"), lambda m: HoleLeft(m[2])),
    (re.compile(rf"^({_NAME})\s*=\s*b\(\s*({_NAME})\s*,\s*x\s*\)$"), lambda m: HoleRight(m[2])),
    (re.compile(rf"^({_NAME})\s*=\s*b\(\s*({_NAME})\s*,\s*({_NAME})\s*\)$"), lambda m: Node(m[2], m[3])),
    (re.compile(rf"^({_NAME})\s*=\s*({_NAME})\(\s*({_NAME})\s*\(\s*x\s*\)\s*\)$"),
     lambda m: Compose(m[2], m[3])),
    (re.compile(rf"^({_NAME})\s*=\s*({_NAME})\(\s*({_NAME})\s*\)$"), lambda m: Apply(m[2], m[3])),
]


def parse_tslp(text: str) -> Tslp:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not re.fullmatch(rf"start\s+{_NAME}", lines[0]):
        raise MalformedInput("tslp file must start with 'start <A>'")
    start = lines[0].split()[1]
    rules: dict[str, Rule] = {}
    for number, line in enumerate(lines[1:], start=2):
        for pattern, build in _SHAPES:
            m = pattern.match(line)
            if m:
                if m[1] in rules:
                    raise MalformedInput(f"line {number}: second rule for {m[1]}")
                rules[m[1]] = build(m)
                break
        else:
            raise MalformedInput(f"line {number}: not a rule: {line!r}")
    return Tslp(start, rules)


def format_tslp(g: Tslp) -> str:
    lines = [f"start {g.start}"]
    for name in reversed(list(g.rules)):
        lines.append(f"{name} = {g.rules[name]}")
    return "\n".join(lines) + "\n"


# --- expansion ---------------------------------------------------------------


def value_sizes(g: Tslp) -> dict[str, int]:
    """Node counts of the values; a context's hole is not counted."""
    size: dict[str, int] = {}
    for name, r in g.rules.items():
        if isinstance(r, Leaf):
            size[name] = 1
        elif isinstance(r, Node):
            size[name] = 1 + size[r.left] + size[r.right]
        elif isinstance(r, Apply):
            size[name] = size[r.ctx] + size[r.arg]
        elif isinstance(r, Compose):
            size[name] = size[r.outer] + size[r.inner]
        else:
            size[name] = 1 + size[r.arg]
    return size


def leaf_count(g: Tslp) -> int:
    """Leaves of val(g), by one pass over the rules."""
    leaves: dict[str, int] = {}
    for name, r in g.rules.items():
        if isinstance(r, Leaf):
            leaves[name] = 1
        elif isinstance(r, HoleLeft) or isinstance(r, HoleRight):
            leaves[name] = leaves[r.arg]
        else:
            a, b = references(r)
            leaves[name] = leaves[a] + leaves[b]
    return leaves[g.start]


def _words(g: Tslp, node_budget: int, target: str) -> dict:
    total = value_sizes(g)[target]
    if total > node_budget:
        raise BudgetExceeded(f"value has {total} nodes, budget is {node_budget}")
    word: dict = {}
    for name, r in g.rules.items():
        if isinstance(r, Leaf):
            word[name] = "a"
        elif isinstance(r, Node):
            word[name] = "b" + word[r.left] + word[r.right]
        elif isinstance(r, Apply):
            pre, post = word[r.ctx]
            word[name] = pre + word[r.arg] + post
        elif isinstance(r, HoleLeft):
            word[name] = ("b", word[r.arg])
        elif isinstance(r, HoleRight):
            word[name] = ("b" + word[r.arg], "")
        else:
            p1, s1 = word[r.outer]
            p2, s2 = word[r.inner]
            word[name] = (p1 + p2, s2 + s1)
        if name == target:
            break
    return word


def tslp_val(g: Tslp, node_budget: int = DEFAULT_BUDGET) -> BinaryTree:
    return parse_term(_words(g, node_budget, g.start)[g.start])


def variable_value(g: Tslp, name: str, node_budget: int = DEFAULT_BUDGET) -> BinaryTree | BinaryContext:
    w = _words(g, node_budget, name)[name]
    if isinstance(w, str):
        return parse_term(w)
    return parse_context(w[0] + "x" + w[1])


# --- Strahler evaluation -------------------------------------------------------


def tslp_tables(g: Tslp) -> tuple[dict[str, int], dict[str, LhFunction]]:
    """Strahler numbers of tree variables and [l,h] functions of context variables."""
    st: dict[str, int] = {}
    lh: dict[str, LhFunction] = {}
    for name, r in g.rules.items():
        if isinstance(r, Leaf):
            st[name] = 0
        elif isinstance(r, Node):
            st[name] = s(st[r.left], st[r.right])
        elif isinstance(r, Apply):
            st[name] = apply_lh(lh[r.ctx], st[r.arg])
        elif isinstance(r, Compose):
            lh[name] = compose_lh(lh[r.outer], lh[r.inner])
        else:
            lh[name] = lh_from_sibling(st[r.arg])
    return st, lh


def tslp_strahler(g: Tslp) -> int:
    return tslp_tables(g)[0][g.start]


def normalize_holes(g: Tslp) -> Tslp:
    """Copy of ``g`` with every b(x,B) turned into b(B,x).

    Mirroring a node never changes a Strahler number.
    """
    rules = {a: (HoleRight(r.arg) if isinstance(r, HoleLeft) else r) for a, r in g.rules.items()}
    return Tslp(g.start, rules)


def caterpillar_parts(g: Tslp, ctx: str) -> list[str]:
    """Tree variables hanging off the spine of ``ctx``, top to bottom.

    These are the leaves, in path order, of the rule DAG of ``ctx``
    restricted to context variables.  Exponentially long in general.
    """
    out: list[str] = []
    stack = [ctx]
    while stack:
        r = g.rules[stack.pop()]
        if isinstance(r, Compose):
            stack.append(r.inner)
            stack.append(r.outer)
        else:
            out.append(r.arg)
    return out


def tslp_at_least_via_paths(g: Tslp, k: int) -> bool:
    """Decide st >= k on the spines of context variables, without [l,h] tables.

    After normalization, a context variable derives b(t1, b(t2, ... b(tj, x))).
    Because s(y, z) >= m iff max(y, z) >= m or both are >= m-1, the value
    at the bottom of a spine needs to reach only a threshold: for each
    context C and each m <= k we keep the least x with C[x] >= m.  The
    threshold of b(B, x) is 0, m-1 or m depending on B; thresholds compose
    along the rule DAG (outer first), and A = C(B) has st >= m iff B meets
    C's threshold.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    h = normalize_holes(g)
    at_least: dict[str, list[bool]] = {}
    need: dict[str, list[int]] = {}
    levels = range(k + 1)
    for name, r in h.rules.items():
        if isinstance(r, Leaf):
            at_least[name] = [m == 0 for m in levels]
        elif isinstance(r, Node):
            lt, rt = at_least[r.left], at_least[r.right]
            at_least[name] = [m == 0 or lt[m] or rt[m] or (lt[m - 1] and rt[m - 1]) for m in levels]
        elif isinstance(r, HoleRight):
            side = at_least[r.arg]
            need[name] = [0 if side[m] else (m - 1 if side[m - 1] else m) for m in levels]
        elif isinstance(r, Compose):
            outer, inner = need[r.outer], need[r.inner]
            need[name] = [inner[outer[m]] for m in levels]
        else:  # Apply
            arg = at_least[r.arg]
            at_least[name] = [arg[need[r.ctx][m]] for m in levels]
    return at_least[h.start][k]


def two_case_path_rule(g: Tslp, k: int) -> bool:
    """The two-case path criterion taken literally, for comparison only.

    st(C(B)) >= m is declared iff some spine part (or B) has st >= m, or two
    of them have st >= m-1.  This is wrong for m >= 2: the parts 1, 0, 0
    fold to s(1, s(0, 0)) = 2.  Expands caterpillars, so small inputs only.
    """
    h = normalize_holes(g)
    st, _ = tslp_tables(h)

    def decide(a: str, m: int) -> bool:
        r = h.rules[a]
        if m == 0:
            return True
        if isinstance(r, Leaf):
            return False
        if isinstance(r, Node):
            return decide(r.left, m) or decide(r.right, m) or (decide(r.left, m - 1) and decide(r.right, m - 1))
        parts = caterpillar_parts(h, r.ctx) + [r.arg]
        if any(decide(p, m) for p in parts):
            return True
        return sum(1 for p in parts if decide(p, m - 1)) >= 2

    return decide(h.start, k)


# --- small builders used by tests and gadgets ---------------------------------


def example_tslp() -> Tslp:
    """The six-rule program whose value is bbbaabbaaabbaabbaaa."""
    return parse_tslp("start S\nS = b(A,A)\nA = b(B,C)\nC = E(B)\nB = E(D)\nE = b(x,D)\nD = a\n")


def caterpillar_tslp(squarings: int) -> Tslp:
    """b^m a^(m+1) with m = 2^squarings, by repeatedly squaring b(x,a)."""
    rules: dict[str, Rule] = {"L": Leaf(), "C0": HoleLeft("L")}
    for i in range(1, squarings + 1):
        rules[f"C{i}"] = Compose(f"C{i - 1}", f"C{i - 1}")
    rules["S"] = Apply(f"C{squarings}", "L")
    return Tslp("S", rules)


def random_tslp(rng, variables: int, max_nodes: int = 4096) -> Tslp:
    """Random program built bottom-up; values are kept below ``max_nodes``."""
    rules: dict[str, Rule] = {"L0": Leaf()}
    size = {"L0": 1}
    trees = ["L0"]
    contexts: list[str] = []
    for i in range(variables):
        for _ in range(20):
            shape = rng.choice(["node", "apply", "hole", "hole", "compose", "leaf"])
            if shape == "leaf":
                name, rule, n = f"L{i + 1}", Leaf(), 1
            elif shape == "node":
                b, c = rng.choice(trees), rng.choice(trees)
                name, rule, n = f"T{i}", Node(b, c), 1 + size[b] + size[c]
            elif shape == "hole":
                b = rng.choice(trees)
                rule = HoleLeft(b) if rng.random() < 0.5 else HoleRight(b)
                name, n = f"C{i}", 1 + size[b]
            elif not contexts:
                continue
            elif shape == "apply":
                d, c = rng.choice(contexts), rng.choice(trees)
                name, rule, n = f"T{i}", Apply(d, c), size[d] + size[c]
            else:
                d, c = rng.choice(contexts), rng.choice(contexts)
                name, rule, n = f"C{i}", Compose(d, c), size[d] + size[c]
            if n <= max_nodes:
                break
        else:
            continue
        rules[name] = rule
        size[name] = n
        (trees if isinstance(rule, TREE_RULES) else contexts).append(name)
    # root: combine the two most recent tree values, or apply the last context
    if contexts and rng.random() < 0.5:
        d = contexts[-1]
        c = min(trees, key=lambda a: size[a]) if size[d] + size[trees[-1]] > max_nodes else trees[-1]
        rules["S"] = Apply(d, c)
    else:
        b = trees[-1]
        c = trees[-2] if len(trees) > 1 and size[trees[-2]] + size[b] < max_nodes else "L0"
        rules["S"] = Node(b, c) if size[b] + size[c] < max_nodes else Node("L0", "L0")
    return Tslp("S", rules)


def dag_as_tslp(d) -> Tslp:
    """A DAG read as a program with tree variables only (one per node)."""
    rules: dict[str, Rule] = {}
    for v in range(len(d) - 1, -1, -1):
        rules[f"N{v}"] = Leaf() if d.is_leaf(v) else Node(f"N{d.left[v]}", f"N{d.right[v]}")
    return Tslp(f"N{d.root}", rules)
