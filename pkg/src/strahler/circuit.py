"""Boolean circuits of comparison gates deciding st(val(G)) >= k.

Every TSLP variable contributes numeric quantities: ``A_st`` for a tree
variable, ``A_l`` and ``A_h`` for a context variable with function
[A_l, A_h].  A comparison gate ``CMP(X, Y, i)`` is true iff
``v(X) <= v(Y) + i``.  Each variable's value is piecewise: under mutually
exclusive conditions (comparisons of variables one rule level down) it
equals another variable plus a constant.  A comparison gate is therefore
an OR, over pairs of pieces of X and Y, of the AND of both conditions and
one comparison of the pieces.  Comparison gates are never folded into
constants (except for identical operands and clamped offsets): the
program is fixed, so folding would collapse the whole circuit.

All values lie in 0..L with L = floor(log2 leaves), so offsets outside
[-L, L] decide the comparison outright.  Thresholds use a leaf variable Z
(value 0): ``st >= k`` is the gate ``CMP(Z, S_st, -k)``.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import ThresholdTooLarge
from .tslp import Apply, Compose, HoleLeft, HoleRight, Leaf, Node, Tslp, leaf_count, tslp_tables

# measured on random balanced programs, see scripts/balance_constants.py
DEPTH_RATIO = 8.0  # circuit depth per unit of rule-DAG depth


class GateVar(NamedTuple):
    name: str
    kind: str  # "st", "l" or "h"

    def __str__(self) -> str:
        return f"{self.name}_{self.kind}"


class Comparison(NamedTuple):
    x: GateVar
    y: GateVar
    offset: int

    def __str__(self) -> str:
        return f"CMP({self.x},{self.y},{self.offset})"


class Gate(NamedTuple):
    kind: str  # TRUE FALSE AND OR NOT CMP
    inputs: tuple[int, ...] = ()
    cmp: Comparison | None = None


@dataclass
class BoolCircuit:
    gates: list[Gate]
    output: int
    zero: GateVar
    bound: int
    clamped: list[tuple[Comparison, bool]] = field(default_factory=list)

    def comparison_gates(self) -> list[int]:
        return [i for i, gate in enumerate(self.gates) if gate.kind == "CMP"]


Term = tuple  # (GateVar | None, constant)
Piece = tuple  # (condition gate ids, Term)


class _Builder:
    def __init__(self, g: Tslp):
        self.g = g
        self.gates: list[Gate] = []
        self.hashed: dict[Gate, int] = {}
        self.cmp_memo: dict[Comparison, int] = {}
        self.clamped: list[tuple[Comparison, bool]] = []
        leaves = [a for a, r in g.rules.items() if isinstance(r, Leaf)]
        self.zero = GateVar(leaves[0], "st")
        self.bound = leaf_count(g).bit_length() - 1
        self.true = self.add(Gate("TRUE"))
        self.false = self.add(Gate("FALSE"))

    def add(self, gate: Gate) -> int:
        i = self.hashed.get(gate)
        if i is None:
            i = self.hashed[gate] = len(self.gates)
            self.gates.append(gate)
        return i

    def var(self, name: str, kind: str) -> GateVar:
        if isinstance(self.g.rules[name], Leaf):
            return self.zero
        return GateVar(name, kind)

    def both(self, a: int, b: int) -> int:
        if a == self.false or b == self.false:
            return self.false
        if a == self.true:
            return b
        if b == self.true or a == b:
            return a
        return self.add(Gate("AND", (min(a, b), max(a, b))))

    def either(self, a: int, b: int) -> int:
        if a == self.true or b == self.true:
            return self.true
        if a == self.false:
            return b
        if b == self.false or a == b:
            return a
        return self.add(Gate("OR", (min(a, b), max(a, b))))

    def balanced(self, items: list[int], op) -> int:
        while len(items) > 1:
            items = [op(items[j], items[j + 1]) if j + 1 < len(items) else items[j]
                     for j in range(0, len(items), 2)]
        return items[0]

    def pieces(self, x: GateVar) -> list[Piece]:
        """Exclusive, exhaustive cases for v(x) in terms of lower variables."""
        if x == self.zero:
            return [((), (None, 0))]
        r = self.g.rules[x.name]
        cmp, var = self.cmp, self.var
        if isinstance(r, Node):
            b, c = var(r.left, "st"), var(r.right, "st")
            return [((cmp(b, c, -1),), (c, 0)),
                    ((cmp(c, b, -1),), (b, 0)),
                    ((cmp(b, c, 0), cmp(c, b, 0)), (b, 1))]
        if isinstance(r, Apply):
            lo, hi, c = var(r.ctx, "l"), var(r.ctx, "h"), var(r.arg, "st")
            return [((cmp(c, lo, -1),), (hi, 0)),
                    ((cmp(lo, c, 0), cmp(c, hi, 0)), (hi, 1)),
                    ((cmp(hi, c, -1),), (c, 0))]
        if isinstance(r, (HoleLeft, HoleRight)):
            return [((), (var(r.arg, "st"), 0))]
        assert isinstance(r, Compose)
        # outer [m, i] after inner [l, h]
        m, i = var(r.outer, "l"), var(r.outer, "h")
        lo, h = var(r.inner, "l"), var(r.inner, "h")
        if x.kind == "h":
            return [((cmp(h, i, 0),), (i, 0)),
                    ((cmp(i, h, -1),), (h, 0))]
        return [((cmp(h, m, -2),), (m, 0)),
                ((cmp(h, m, -1), cmp(m, h, 1)), (lo, 0)),
                ((cmp(m, h, 0), cmp(h, i, 0)), (None, 0)),
                ((cmp(i, h, -1),), (lo, 0))]

    def cmp(self, x: GateVar | None, y: GateVar | None, offset: int) -> int:
        x = x or self.zero
        y = y or self.zero
        if x == y:
            return self.true if offset >= 0 else self.false
        key = Comparison(x, y, offset)
        if offset > self.bound or offset < -self.bound:
            value = offset > 0
            self.clamped.append((key, value))
            return self.true if value else self.false
        known = self.cmp_memo.get(key)
        if known is not None:
            return known
        options = []
        for cx, (vx, ax) in self.pieces(x):
            for cy, (vy, ay) in self.pieces(y):
                inner = self.cmp(vx, vy, offset + ay - ax)
                options.append(self.balanced(list(cx) + list(cy) + [inner], self.both))
        body = self.balanced(options, self.either)
        gate = len(self.gates)
        self.gates.append(Gate("CMP", (body,), key))
        self.cmp_memo[key] = gate
        return gate


def build_circuits(g: Tslp, thresholds) -> list[BoolCircuit]:
    """Circuits for several thresholds sharing one gate list and gate memo."""
    builder = _Builder(g)
    thresholds = list(thresholds)
    for k in thresholds:
        if k > builder.bound:
            raise ThresholdTooLarge(f"k = {k} exceeds floor(log2 n) = {builder.bound}")
        if k < 0:
            raise ValueError("k must be non-negative")
    top = builder.var(g.start, "st")
    outputs = []
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 20 * g.depth + 1000))
    try:
        for k in thresholds:
            out = builder.cmp(builder.zero, top, -k)
            if builder.gates[out].kind != "CMP":
                # decided without expansion (single-leaf value); keep an output comparison
                body, out = out, len(builder.gates)
                builder.gates.append(Gate("CMP", (body,), Comparison(builder.zero, top, -k)))
            outputs.append(out)
    finally:
        sys.setrecursionlimit(old)
    return [BoolCircuit(builder.gates, out, builder.zero, builder.bound, builder.clamped)
            for out in outputs]


def build_circuit(g: Tslp, k: int) -> BoolCircuit:
    """The comparison-gate circuit whose output is true iff st(val(g)) >= k."""
    return build_circuits(g, [k])[0]


def evaluate_all(c: BoolCircuit) -> list[bool]:
    values: list[bool] = []
    for gate in c.gates:
        if gate.kind == "TRUE":
            values.append(True)
        elif gate.kind == "FALSE":
            values.append(False)
        elif gate.kind == "AND":
            values.append(values[gate.inputs[0]] and values[gate.inputs[1]])
        elif gate.kind == "OR":
            values.append(values[gate.inputs[0]] or values[gate.inputs[1]])
        elif gate.kind == "NOT":
            values.append(not values[gate.inputs[0]])
        else:
            values.append(values[gate.inputs[0]])
    return values


def eval_circuit(c: BoolCircuit) -> bool:
    return evaluate_all(c)[c.output]


def variable_values(g: Tslp) -> dict[GateVar, int]:
    st, lh = tslp_tables(g)
    values = {GateVar(a, "st"): v for a, v in st.items()}
    for a, f in lh.items():
        values[GateVar(a, "l")] = f.ell
        values[GateVar(a, "h")] = f.h
    return values


def gate_semantics(g: Tslp, cmp: Comparison, values: dict[GateVar, int] | None = None) -> bool:
    """What a comparison gate should compute, read off the Strahler tables."""
    if values is None:
        values = variable_values(g)
    return values[cmp.x] <= values[cmp.y] + cmp.offset


def gate_depths(c: BoolCircuit) -> list[int]:
    depth = [0] * len(c.gates)
    for i, gate in enumerate(c.gates):
        if gate.inputs:
            depth[i] = 1 + max(depth[j] for j in gate.inputs)
    return depth


def circuit_depth(c: BoolCircuit) -> int:
    return gate_depths(c)[c.output]


def format_circuit(c: BoolCircuit) -> str:
    """Gates reachable from the output, renumbered densely in build order."""
    live = set()
    stack = [c.output]
    while stack:
        i = stack.pop()
        if i in live:
            continue
        live.add(i)
        stack.extend(c.gates[i].inputs)
    order = sorted(live)
    name = {old: new for new, old in enumerate(order)}
    lines = []
    for old in order:
        gate = c.gates[old]
        kind = str(gate.cmp) if gate.kind == "CMP" else gate.kind
        operands = " ".join(f"g{name[j]}" for j in gate.inputs)
        lines.append(f"g{name[old]}: {kind}" + (f" {operands}" if operands else ""))
    lines.append(f"output g{name[c.output]}")
    return "\n".join(lines) + "\n"
