"""Generators of instances with a known Strahler value.

Each generator returns the constructed object along with the value it is
built to have, so tests can compare the prediction against evaluation.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import NamedTuple, Sequence, Union

from .dag import DEFAULT_BUDGET, Dag, unfold
from .errors import InvalidNodes, MalformedInput, MalformedInstance, MalformedQbf, NotLayered
from .grammars import CnfGrammar, PCertificate, bracket
from .trees import AdjacencyTree, BinaryTree, format_node_lines, parse_node_lines, parse_term
from .tslp import Apply, Compose, HoleLeft, Leaf, Node, Tslp

# --- Boolean formulas -------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Lit:
    var: int
    negated: bool = False


@dataclass(frozen=True)
class Gate:
    op: str  # "and" | "or"
    left: "Formula"
    right: "Formula"


Formula = Union[Const, Lit, Gate]

_SEXP = re.compile(r"\(|\)|[^\s()]+")


def parse_formula(text: str) -> Formula:
    """``(and f g)``, ``(or f g)``, ``0``, ``1``, ``x<i>``, ``(not x<i>)``."""
    tokens = _SEXP.findall(text)
    pos = 0

    def atom(tok: str) -> Formula:
        if tok in ("0", "1"):
            return Const(int(tok))
        m = re.fullmatch(r"x([1-9][0-9]*)", tok)
        if m:
            return Lit(int(m.group(1)))
        raise MalformedInput(f"unexpected token {tok!r}")

    def expect(tok: str) -> None:
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != tok:
            raise MalformedInput(f"expected {tok!r} at token {pos}")
        pos += 1

    def read() -> Formula:
        nonlocal pos
        if pos >= len(tokens):
            raise MalformedInput("incomplete formula")
        tok = tokens[pos]
        pos += 1
        if tok != "(":
            return atom(tok)
        if pos >= len(tokens):
            raise MalformedInput("incomplete formula")
        op = tokens[pos]
        pos += 1
        if op == "not":
            inner = read()
            if not isinstance(inner, Lit) or inner.negated:
                raise MalformedInput("'not' applies to a variable only")
            expect(")")
            return Lit(inner.var, True)
        if op not in ("and", "or"):
            raise MalformedInput(f"unknown connective {op!r}")
        left = read()
        right = read()
        expect(")")
        return Gate(op, left, right)

    f = read()
    if pos != len(tokens):
        raise MalformedInput(f"trailing input at token {pos}")
    return f


def format_formula(f: Formula) -> str:
    if isinstance(f, Const):
        return str(f.value)
    if isinstance(f, Lit):
        return f"(not x{f.var})" if f.negated else f"x{f.var}"
    return f"({f.op} {format_formula(f.left)} {format_formula(f.right)})"


def formula_depth(f: Formula) -> int:
    if isinstance(f, Gate):
        return 1 + max(formula_depth(f.left), formula_depth(f.right))
    return 0


def is_uniform(f: Formula) -> bool:
    def walk(g: Formula) -> int | None:
        if not isinstance(g, Gate):
            return 0
        a, b = walk(g.left), walk(g.right)
        return a + 1 if a is not None and a == b else None

    return walk(f) is not None


def evaluate_formula(f: Formula, assignment: dict[int, bool] | None = None) -> bool:
    if isinstance(f, Const):
        return bool(f.value)
    if isinstance(f, Lit):
        return assignment[f.var] != f.negated
    a = evaluate_formula(f.left, assignment)
    b = evaluate_formula(f.right, assignment)
    return (a and b) if f.op == "and" else (a or b)


def pad_uniform(f: Formula) -> Formula:
    """Deepen shallow leaves z to (z or z) until all leaves sit at the same depth."""
    d = formula_depth(f)

    def pad(g: Formula, level: int) -> Formula:
        if isinstance(g, Gate):
            return Gate(g.op, pad(g.left, level + 1), pad(g.right, level + 1))
        for _ in range(d - level):
            g = Gate("or", g, g)
        return g

    return pad(f, 0)


def random_formula(rng: random.Random, depth: int, variables: int = 0) -> Formula:
    """Uniform-depth formula; leaves are constants, or literals over x1..x<variables>."""
    if depth == 0:
        if variables:
            return Lit(rng.randint(1, variables), rng.random() < 0.5)
        return Const(rng.randint(0, 1))
    return Gate(rng.choice(("and", "or")), random_formula(rng, depth - 1, variables),
                random_formula(rng, depth - 1, variables))


class GadgetTree(NamedTuple):
    tree: BinaryTree
    dag: Dag
    predicted: int


def _gadget_children(op: str, x: str, y: str, fresh) -> tuple[str, dict[str, tuple[str, str]]]:
    """Nodes realizing f_and(x, y) = s(s(x,x), s(y,y)) or
    f_or(x, y) = s(s(s(x,x),y), s(x,s(y,y))) over shared x and y."""
    xx, yy = fresh(), fresh()
    nodes = {xx: (x, x), yy: (y, y)}
    if op == "and":
        top = fresh()
        nodes[top] = (xx, yy)
        return top, nodes
    left, right, top = fresh(), fresh(), fresh()
    nodes[left] = (xx, y)
    nodes[right] = (x, yy)
    nodes[top] = (left, right)
    return top, nodes


def _gadget_word(op: str, x: str, y: str) -> str:
    if op == "and":
        return "bb" + x + x + "b" + y + y
    return "bbb" + x + x + y + "b" + x + "b" + y + y


def formula_to_tree(f: Formula) -> GadgetTree:
    """Expanded tree and shared DAG whose Strahler number is 2d+1 if f is true and 2d if false."""
    if not is_uniform(f):
        raise MalformedInstance("formula leaves must all have the same depth")
    d = formula_depth(f)
    counter = itertools.count()

    def fresh() -> str:
        return f"n{next(counter)}"

    children: dict[str, tuple[str, ...]] = {"zero": (), "z1": (), "z2": (), "one": ("z1", "z2")}
    memo_word: dict[Formula, str] = {}
    memo_name: dict[Formula, str] = {}

    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        g, ready = stack.pop()
        if g in memo_name:
            continue
        if isinstance(g, Lit):
            raise MalformedInstance("formula gadgets take constant leaves only")
        if isinstance(g, Const):
            memo_word[g] = "baa" if g.value else "a"
            memo_name[g] = "one" if g.value else "zero"
            continue
        if not ready:
            stack.append((g, True))
            stack.append((g.right, False))
            stack.append((g.left, False))
            continue
        memo_word[g] = _gadget_word(g.op, memo_word[g.left], memo_word[g.right])
        top, nodes = _gadget_children(g.op, memo_name[g.left], memo_name[g.right], fresh)
        children.update(nodes)
        memo_name[g] = top
    value = evaluate_formula(f)
    return GadgetTree(parse_term(memo_word[f]), Dag.from_children(children, memo_name[f]),
                      2 * d + 1 if value else 2 * d)


@dataclass(frozen=True)
class LayeredCircuit:
    """Monotone circuit: inputs name -> 0/1, gates name -> (op, a, b)."""

    inputs: dict
    gates: dict
    output: str


def parse_layered_circuit(text: str) -> LayeredCircuit:
    """Lines ``input <name> 0|1``, ``<name> = and|or <a> <b>``, ``output <name>``."""
    inputs: dict[str, int] = {}
    gates: dict[str, tuple[str, str, str]] = {}
    output = None
    for raw in text.splitlines():
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        if parts[0] == "input" and len(parts) == 3 and parts[2] in ("0", "1"):
            inputs[parts[1]] = int(parts[2])
        elif parts[0] == "output" and len(parts) == 2:
            output = parts[1]
        elif len(parts) == 5 and parts[1] == "=" and parts[2] in ("and", "or"):
            gates[parts[0]] = (parts[2], parts[3], parts[4])
        else:
            raise MalformedInput(f"bad circuit line {ln!r}")
    if output is None:
        raise MalformedInput("missing 'output' line")
    for name, (_, a, b) in gates.items():
        for x in (a, b):
            if x not in gates and x not in inputs:
                raise MalformedInput(f"gate {name} reads undeclared {x!r}")
    if output not in gates and output not in inputs:
        raise MalformedInput(f"undeclared output {output!r}")
    return LayeredCircuit(inputs, gates, output)


def format_layered_circuit(c: LayeredCircuit) -> str:
    lines = [f"input {k} {v}" for k, v in c.inputs.items()]
    lines += [f"{k} = {op} {a} {b}" for k, (op, a, b) in c.gates.items()]
    lines.append(f"output {c.output}")
    return "\n".join(lines) + "\n"


def _circuit_levels(c: LayeredCircuit) -> dict[str, int]:
    level: dict[str, int] = {}
    stack = [(c.output, False)]
    active: set[str] = set()
    while stack:
        v, ready = stack.pop()
        if v in level:
            continue
        if v in c.inputs:
            level[v] = 0
            continue
        _, a, b = c.gates[v]
        if not ready:
            if v in active:
                raise MalformedInput(f"cycle through gate {v}")
            active.add(v)
            stack.append((v, True))
            stack += [(a, False), (b, False)]
            continue
        if level[a] != level[b]:
            raise NotLayered(f"gate {v} combines levels {level[a]} and {level[b]}")
        level[v] = level[a] + 1
        active.discard(v)
    return level


def evaluate_circuit(c: LayeredCircuit) -> bool:
    value: dict[str, bool] = {k: bool(v) for k, v in c.inputs.items()}
    for v in sorted(_circuit_levels(c).items(), key=lambda kv: kv[1]):
        name = v[0]
        if name in c.gates:
            op, a, b = c.gates[name]
            value[name] = (value[a] and value[b]) if op == "and" else (value[a] or value[b])
    return value[c.output]


def layered_circuit_to_dag(c: LayeredCircuit) -> tuple[Dag, int]:
    level = _circuit_levels(c)
    d = level[c.output]
    counter = itertools.count()

    def fresh() -> str:
        return f"n{next(counter)}"

    children: dict[str, tuple[str, ...]] = {"zero": (), "z1": (), "z2": (), "one": ("z1", "z2")}
    node: dict[str, str] = {}
    for name, _ in sorted(level.items(), key=lambda kv: kv[1]):
        if name in c.inputs:
            node[name] = "one" if c.inputs[name] else "zero"
            continue
        op, a, b = c.gates[name]
        top, nodes = _gadget_children(op, node[a], node[b], fresh)
        children.update(nodes)
        node[name] = top
    return Dag.from_children(children, node[c.output]), (2 * d + 1 if evaluate_circuit(c) else 2 * d)


def random_layered_circuit(rng: random.Random, depth: int, width: int) -> LayeredCircuit:
    inputs = {f"i{j}": rng.randint(0, 1) for j in range(width)}
    previous = list(inputs)
    gates: dict[str, tuple[str, str, str]] = {}
    for level in range(1, depth + 1):
        count = 1 if level == depth else width
        current = []
        for j in range(count):
            name = f"g{level}_{j}"
            gates[name] = (rng.choice(("and", "or")), rng.choice(previous), rng.choice(previous))
            current.append(name)
        previous = current
    return LayeredCircuit(inputs, gates, previous[0] if depth else "i0")


# --- majority ---------------------------------------------------------------

T2 = "bbaabaa"
T3 = "b" + T2 + T2


def _block_word(v: str) -> str:
    blocks = v.split("1")
    out = []
    for j, zeros in enumerate(blocks):
        k = len(zeros) // 2
        out.append("b" * (k + (1 if j else 0)) + "a" * k)
    return "".join(out)


def majority_tree(w: str) -> tuple[str, int]:
    """Term with Strahler number 3 if at least half the bits of w are 0, else 4."""
    if not w or set(w) - {"0", "1"}:
        raise MalformedInput("expected a nonempty bit string")
    v = "".join(c + c for c in w)
    complement = v.translate(str.maketrans("01", "10"))
    n = len(v) // 2
    term = _block_word(v) + "b" + T2 + _block_word(complement) + T2 + "a" * (n - 1) + T3 + "a" * n
    return term, 3 if v.count("0") >= n else 4


# --- line graphs ------------------------------------------------------------


def linegraph_tree(order: Sequence[str], u: str, v: str) -> tuple[AdjacencyTree, int]:
    """Tree over the path given by ``order`` with st 3 if u comes before v, else 2."""
    order = list(order)
    if len(set(order)) != len(order):
        raise MalformedInput("node order repeats a node")
    if u not in order or v not in order:
        raise InvalidNodes("u and v must both occur in the order")
    if u == v:
        raise InvalidNodes("u and v must differ")
    if order[-1] in (u, v):
        sink = "w"
        while sink in order:
            sink += "'"
        order.append(sink)
    children: dict[str, tuple[str, ...]] = {}
    counter = itertools.count()

    def leaf() -> str:
        name = f"_l{next(counter)}"
        children[name] = ()
        return name

    def hang(term: str) -> str:
        t = parse_term(term)
        names = [f"_t{next(counter)}" for _ in range(len(t))]
        for i, name in enumerate(names):
            children[name] = () if t.left[i] < 0 else (names[t.left[i]], names[t.right[i]])
        return names[0]

    for i, x in enumerate(order[:-1]):
        nxt = order[i + 1]
        if x == u:
            children[x] = (nxt, hang("bbaabaa"))
        elif x == v:
            children[x] = (nxt, hang("baa"))
        else:
            children[x] = (nxt, leaf())
    children[order[-1]] = (leaf(), leaf())
    return AdjacencyTree(order[0], children), (3 if order.index(u) < order.index(v) else 2)


def parse_linegraph(text: str) -> tuple[list[str], str, str]:
    """Lines ``order <ids...>``, ``u <id>``, ``v <id>``."""
    fields: dict[str, list[str]] = {}
    for raw in text.splitlines():
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        key, *rest = ln.split()
        fields[key] = rest
    try:
        return fields["order"], fields["u"][0], fields["v"][0]
    except (KeyError, IndexError):
        raise MalformedInput("line graph file needs 'order', 'u' and 'v' lines") from None


# --- DAG reachability -------------------------------------------------------


@dataclass(frozen=True)
class ReachInstance:
    """A DAG with out-degrees 0 or 2 (nodes need not be reachable from the source)."""

    children: dict
    source: str
    target: str

    def __post_init__(self):
        for v, kids in self.children.items():
            if len(kids) not in (0, 2) or any(k not in self.children for k in kids):
                raise MalformedInstance(f"node {v!r} needs 0 or 2 declared children")
        if self.source not in self.children or self.target not in self.children:
            raise InvalidNodes("source and target must be declared nodes")
        if not self.children[self.source]:
            raise MalformedInstance("the source must have two children")
        if self.children[self.target]:
            raise MalformedInstance("the target must be a leaf")
        indegree = {v: 0 for v in self.children}
        for kids in self.children.values():
            for k in kids:
                indegree[k] += 1
        ready = [v for v, d in indegree.items() if d == 0]
        seen = 0
        while ready:
            seen += 1
            for k in self.children[ready.pop()]:
                indegree[k] -= 1
                if indegree[k] == 0:
                    ready.append(k)
        if seen != len(self.children):
            raise MalformedInstance("the graph has a cycle")

    def reachable(self) -> bool:
        seen = {self.source}
        stack = [self.source]
        while stack:
            for k in self.children[stack.pop()]:
                if k not in seen:
                    seen.add(k)
                    stack.append(k)
        return self.target in seen


def _reach_names(inst: ReachInstance) -> dict[str, str]:
    return {v: f"V{i}" for i, v in enumerate(inst.children)}


def dag_reach_tslp(inst: ReachInstance) -> tuple[Tslp, int]:
    """TSLP of a caterpillar whose Strahler number is 2 iff the target is reachable, else 1."""
    name = _reach_names(inst)
    rules: dict = {"S": Apply(name[inst.source], "B"), "A": Leaf(), "B": Node("A", "A")}
    for v, kids in inst.children.items():
        if kids:
            rules[name[v]] = Compose(name[kids[0]], name[kids[1]])
        else:
            rules[name[v]] = HoleLeft("B" if v == inst.target else "A")
    return Tslp("S", rules), (2 if inst.reachable() else 1)


def dag_reach_grammar(inst: ReachInstance) -> tuple[CnfGrammar, PCertificate, int]:
    """Grammar whose max Strahler number is 2 iff the target is reachable (else at most 1)."""
    name = _reach_names(inst)
    prods = [("A", ()), ("B", ("A", "A"))]
    cert: PCertificate = {"A": (), "B": ("A", "A")}
    for v, kids in inst.children.items():
        if kids:
            first = (name[kids[0]], "A")
            prods += [(name[v], first), (name[v], (name[kids[1]], "A"))]
            cert[name[v]] = first
        elif v == inst.target:
            prods.append((name[v], ("B", "B")))
            cert[name[v]] = ("B", "B")
        else:
            prods.append((name[v], ()))
            cert[name[v]] = ()
    g = CnfGrammar(name[inst.source], tuple(prods))
    return g, cert, (2 if inst.reachable() else 1)


def parse_reach_instance(text: str) -> ReachInstance:
    """DAG node lines (``root`` names the source) plus a ``target <id>`` line."""
    target = None
    kept = []
    for raw in text.splitlines():
        parts = raw.split()
        if parts and parts[0] == "target":
            if len(parts) != 2:
                raise MalformedInput("expected 'target <id>'")
            target = parts[1]
        else:
            kept.append(raw)
    if target is None:
        raise MalformedInput("missing 'target' line")
    root, children = parse_node_lines("\n".join(kept), "dag")
    return ReachInstance(children, root, target)


def format_reach_instance(inst: ReachInstance) -> str:
    return format_node_lines(inst.source, inst.children) + f"target {inst.target}\n"


def random_reach_instance(rng: random.Random, nodes: int) -> ReachInstance:
    """Random DAG over ``nodes`` nodes, about a third of them leaves."""
    leaves = max(2, nodes // 3)
    children: dict[str, tuple[str, ...]] = {f"l{i}": () for i in range(leaves)}
    names = list(children)
    for i in range(max(1, nodes - leaves)):
        name = f"u{i}"
        children[name] = (rng.choice(names), rng.choice(names))
        names.append(name)
    internal = [v for v in names if children[v]]
    return ReachInstance(children, rng.choice(internal[len(internal) // 2:]), rng.choice(names[:leaves]))


# --- exact 3-hitting set ----------------------------------------------------


class X3hsGadget(NamedTuple):
    grammar: CnfGrammar
    predicted: bool


def exact_hitting_set(n: int, family: Sequence[Sequence[int]]) -> frozenset[int] | None:
    if n > 20:
        raise MalformedInstance("subset brute force is limited to 20 elements")
    sets = [frozenset(c) for c in family]
    for mask in range(1 << n):
        chosen = frozenset(i + 1 for i in range(n) if mask >> i & 1)
        if all(len(chosen & c) == 1 for c in sets):
            return chosen
    return None


def _bracket_rules(prods: list, a: str, b: str) -> str:
    name = bracket(a, b)
    prods.append((name, (a, b)))
    return name


def x3hs_grammar(n: int, family: Sequence[Sequence[int]]) -> X3hsGadget:
    """Grammar with an acyclic derivation tree of st >= 2 iff some subset
    of 1..n meets every member of ``family`` in exactly one element."""
    if n < 1:
        raise MalformedInstance("the ground set must be nonempty")
    for c in family:
        if len(set(c)) != 3 or len(c) != 3 or not all(1 <= x <= n for x in c):
            raise MalformedInstance(f"bad member {sorted(c)}: need 3 distinct elements of 1..{n}")
    m = len(family)
    prods: list[tuple[str, tuple[str, ...]]] = [("E", ())]
    for k in range(1, n + 1):
        prods += [(f"A{k}", (f"I{k}", "E")), (f"A{k}", (f"O{k}", "E"))]
        nxt = f"A{k + 1}" if k < n else "B1"
        for x in (f"I{k}", f"O{k}"):
            prods += [(x, (nxt, "E")), (x, ())]
    for j, c in enumerate(family, start=1):
        for a, b, cc in itertools.permutations(sorted(c)):
            inner = _bracket_rules(prods, f"I{b}", f"I{cc}")
            outer = _bracket_rules(prods, f"O{a}", inner)
            prods.append((f"B{j}", (f"B{j + 1}", outer)))
    if m:
        prods.append((f"B{m + 1}", ("E", "E")))
    else:
        # nothing to hit: the empty selection works, so B1 must reach st 2 by itself
        ee = _bracket_rules(prods, "E", "E")
        prods.append(("B1", (ee, ee)))
    g = CnfGrammar("A1", tuple(prods))
    return X3hsGadget(g, exact_hitting_set(n, family) is not None)


def parse_x3hs(text: str) -> tuple[int, list[tuple[int, int, int]]]:
    """``n <int>`` followed by ``set a b c`` lines."""
    n = None
    family = []
    for raw in text.splitlines():
        ln = raw.strip()
        if not ln or ln.startswith("#"):
            continue
        parts = ln.split()
        try:
            if parts[0] == "n" and len(parts) == 2:
                n = int(parts[1])
            elif parts[0] == "set":
                family.append(tuple(int(x) for x in parts[1:]))
            else:
                raise MalformedInstance(f"bad line {ln!r}")
        except ValueError:
            raise MalformedInstance(f"bad number in {ln!r}") from None
    if n is None:
        raise MalformedInstance("missing 'n <int>' line")
    return n, family


# --- QBF --------------------------------------------------------------------


@dataclass(frozen=True)
class Qbf:
    prefix: tuple[tuple[str, int], ...]  # ("E" | "A", variable index), outermost first
    matrix: Formula

    def __post_init__(self):
        variables = [v for _, v in self.prefix]
        if variables != list(range(1, len(variables) + 1)):
            raise MalformedQbf("the prefix must bind x1..xn in order, each once")
        if any(q not in ("E", "A") for q, _ in self.prefix):
            raise MalformedQbf("quantifiers are E or A")

        def check(f: Formula) -> None:
            if isinstance(f, Const):
                raise MalformedQbf("the matrix takes literals only")
            if isinstance(f, Lit):
                if not 1 <= f.var <= len(variables):
                    raise MalformedQbf(f"x{f.var} is not bound")
                return
            check(f.left)
            check(f.right)

        check(self.matrix)


def parse_qbf(text: str) -> Qbf:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.strip().startswith("#")]
    if len(lines) != 2:
        raise MalformedQbf("expected a prefix line and a matrix line")
    words = lines[0].split()
    if len(words) % 2:
        raise MalformedQbf("prefix is a sequence of '<E|A> x<i>' pairs")
    prefix = []
    for q, x in zip(words[::2], words[1::2]):
        m = re.fullmatch(r"x([1-9][0-9]*)", x)
        if q not in ("E", "A") or not m:
            raise MalformedQbf(f"bad quantifier {q} {x}")
        prefix.append((q, int(m.group(1))))
    try:
        matrix = parse_formula(lines[1])
    except MalformedInput as e:
        raise MalformedQbf(str(e)) from None
    return Qbf(tuple(prefix), matrix)


def format_qbf(psi: Qbf) -> str:
    return " ".join(f"{q} x{v}" for q, v in psi.prefix) + "\n" + format_formula(psi.matrix) + "\n"


def evaluate_qbf(psi: Qbf) -> bool:
    def go(i: int, assignment: dict[int, bool]) -> bool:
        if i == len(psi.prefix):
            return evaluate_formula(psi.matrix, assignment)
        q, v = psi.prefix[i]
        results = (go(i + 1, {**assignment, v: b}) for b in (False, True))
        return any(results) if q == "E" else all(results)

    return go(0, {})


def random_qbf(rng: random.Random, variables: int, height: int) -> Qbf:
    prefix = tuple((rng.choice("EA"), i) for i in range(1, variables + 1))
    return Qbf(prefix, random_formula(rng, height, variables))


class QbfGadget(NamedTuple):
    grammar: CnfGrammar
    k: int
    big: Dag  # shared form of t_big
    predicted: bool

    def t_big(self, node_budget: int = DEFAULT_BUDGET) -> BinaryTree:
        return unfold(self.big, node_budget)


def qbf_grammar(psi: Qbf) -> QbfGadget:
    """Grammar with an acyclic derivation tree of st >= 2h+2n+2 iff psi is true."""
    matrix = pad_uniform(psi.matrix)
    n = len(psi.prefix)
    h = formula_depth(matrix)
    prods: list[tuple[str, tuple[str, ...]]] = [("E", ())]

    def br(a: str, b: str) -> str:
        return _bracket_rules(prods, a, b)

    def and_body(x: str, y: str) -> tuple[str, str]:
        return br(x, x), br(y, y)

    def or_body(x: str, y: str) -> tuple[str, str]:
        return br(br(x, x), y), br(x, br(y, y))

    for i, (q, _) in enumerate(psi.prefix, start=1):
        f, t = f"F{i}", f"T{i}"
        prods.append((f"A{i}", and_body(f, t) if q == "A" else or_body(f, t)))
        for x in (f, t):
            prods += [(x, (f"A{i + 1}", "E")), (x, ())]
    ee = br("E", "E")
    two = br(ee, ee)

    # matrix nodes: the root is A_{n+1}, the others P<address> over {0, 1}
    nodes: list[tuple[str, str, Formula]] = [(f"A{n + 1}", "", matrix)]
    j = 0
    while j < len(nodes):
        name, address, f = nodes[j]
        j += 1
        if isinstance(f, Gate):
            lname, rname = f"P{address}0", f"P{address}1"
            nodes += [(lname, address + "0", f.left), (rname, address + "1", f.right)]
            prods.append((name, and_body(lname, rname) if f.op == "and" else or_body(lname, rname)))
        else:
            i = f.var
            strong, weak = (f"F{i}", f"T{i}") if not f.negated else (f"T{i}", f"F{i}")
            prods += [(name, (two, strong)), (name, (ee, weak))]
    g = CnfGrammar("A1", tuple(prods))
    return QbfGadget(g, 2 * h + 2 * n + 2, _big_dag(psi, matrix), evaluate_qbf(psi))


def _big_dag(psi: Qbf, matrix: Formula) -> Dag:
    """The acyclic derivation tree expanding every quantifier-produced T_i/F_i,
    as a DAG: its size is exponential in n, the shared form is not."""
    n = len(psi.prefix)
    children: dict[str, tuple[str, ...]] = {"a": ()}
    consed: dict[tuple[str, str], str] = {}

    def pair(x: str, y: str) -> str:
        name = consed.get((x, y))
        if name is None:
            name = consed[(x, y)] = f"u{len(consed)}"
            children[name] = (x, y)
        return name

    def and_node(x: str, y: str) -> str:
        return pair(pair(x, x), pair(y, y))

    def or_node(x: str, y: str) -> str:
        return pair(pair(pair(x, x), y), pair(x, pair(y, y)))

    ee = pair("a", "a")
    two = pair(ee, ee)

    def formula_node(f: Formula, assignment: dict[int, bool]) -> str:
        if isinstance(f, Lit):
            true = assignment[f.var] != f.negated
            # the path already holds T_i or F_i; the other alternative is forced
            return pair(two, "a") if true else pair(ee, "a")
        a, b = formula_node(f.left, assignment), formula_node(f.right, assignment)
        return and_node(a, b) if f.op == "and" else or_node(a, b)

    def level(i: int, assignment: dict[int, bool]) -> str:
        if i > n:
            return formula_node(matrix, assignment)
        q, v = psi.prefix[i - 1]
        f = pair(level(i + 1, {**assignment, v: False}), "a")
        t = pair(level(i + 1, {**assignment, v: True}), "a")
        return and_node(f, t) if q == "A" else or_node(f, t)

    return Dag.from_children(children, level(1, {}))
