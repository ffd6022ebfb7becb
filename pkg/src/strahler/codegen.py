"""Register-optimal straight-line code for expression trees (Ershov order).

Register model: operands are only read from registers, ``load`` writes one
register, a binary operation may overwrite one of its operand registers,
and nothing is ever spilled.  A leaf therefore needs one register and an
expression of Strahler number ``st`` needs ``st + 1``.
"""
from __future__ import annotations

import operator
import re
from dataclasses import dataclass
from typing import Callable, Mapping, Union

from .core import s
from .errors import MalformedInput
from .trees import LEAF, BinaryTree, parse_term


@dataclass(frozen=True)
class ExprTree:
    """Shape plus one label per preorder node (operator or operand name)."""

    shape: BinaryTree
    labels: tuple[str, ...]

    def __str__(self) -> str:
        return format_expr(self)


_TOKEN = re.compile(r"\(|\)|[^\s()]+")
OPERATORS: dict[str, Callable[[int, int], int]] = {"+": operator.add, "*": operator.mul}


def parse_expr(text: str) -> ExprTree:
    """Read ``(op e e)`` / ``name`` s-expressions with ``+`` and ``*``."""
    tokens = _TOKEN.findall(text)
    if not tokens:
        raise MalformedInput("empty expression")
    word: list[str] = []
    labels: list[str] = []
    arity: list[int] = []  # children seen per open internal node
    i = 0
    done = False
    while i < len(tokens):
        tok = tokens[i]
        if done:
            raise MalformedInput(f"trailing token {tok!r}")
        if tok == "(":
            if i + 1 >= len(tokens) or tokens[i + 1] not in OPERATORS:
                raise MalformedInput(f"expected an operator after '(' (token {i})")
            word.append("b")
            labels.append(tokens[i + 1])
            arity.append(0)
            i += 2
            continue
        if tok == ")":
            if not arity or arity[-1] != 2:
                raise MalformedInput(f"operators are binary (token {i})")
            arity.pop()
        else:
            if tok in OPERATORS:
                raise MalformedInput(f"operator {tok!r} used as operand")
            word.append("a")
            labels.append(tok)
        if arity:
            arity[-1] += 1
            if arity[-1] > 2:
                raise MalformedInput(f"operators are binary (token {i})")
        else:
            done = True
        i += 1
    if arity:
        raise MalformedInput("unbalanced parentheses")
    return ExprTree(parse_term("".join(word)), tuple(labels))


def format_expr(e: ExprTree) -> str:
    t = e.shape
    out: list[str] = []
    stack: list[Union[int, str]] = [0]
    while stack:
        item = stack.pop()
        if isinstance(item, str):
            out.append(item)
            continue
        if t.left[item] == LEAF:
            out.append(e.labels[item])
        else:
            out.append(f"({e.labels[item]} ")
            stack += [")", t.right[item], " ", t.left[item]]
    return "".join(out)


def expr_from_shape(shape: BinaryTree, op: str = "+") -> ExprTree:
    labels = []
    count = 0
    for v in range(len(shape)):
        if shape.left[v] == LEAF:
            count += 1
            labels.append(f"x{count}")
        else:
            labels.append(op)
    return ExprTree(shape, tuple(labels))


def eval_expr(e: ExprTree, env: Mapping[str, int]) -> int:
    t = e.shape
    val = [0] * len(t)
    for v in range(len(t) - 1, -1, -1):
        if t.left[v] == LEAF:
            val[v] = env[e.labels[v]]
        else:
            val[v] = OPERATORS[e.labels[v]](val[t.left[v]], val[t.right[v]])
    return val[0]


# --- programs ---------------------------------------------------------------


@dataclass(frozen=True)
class Load:
    dest: int
    operand: str

    def __str__(self) -> str:
        return f"r{self.dest} := load {self.operand}"


@dataclass(frozen=True)
class Op:
    dest: int
    op: str
    lhs: int
    rhs: int

    def __str__(self) -> str:
        return f"r{self.dest} := r{self.lhs} {self.op} r{self.rhs}"


@dataclass(frozen=True)
class StraightLineProgram:
    statements: tuple[Load | Op, ...]
    result: int
    registers: int
    strahler: int

    def __str__(self) -> str:
        lines = [str(x) for x in self.statements]
        lines.append(f"result r{self.result}")
        lines.append(f"registers = {self.registers} (ershov), strahler = {self.strahler}")
        return "\n".join(lines)


def strahler_table(t: BinaryTree) -> list[int]:
    val = [0] * len(t)
    for v in range(len(t) - 1, -1, -1):
        if t.left[v] != LEAF:
            val[v] = s(val[t.left[v]], val[t.right[v]])
    return val


def codegen(e: ExprTree) -> StraightLineProgram:
    """Evaluate the child with larger Strahler number first (left on ties)
    into the base register, the other one into the registers above it."""
    t = e.shape
    st = strahler_table(t)
    statements: list[Load | Op] = []
    work: list[tuple[int, int, bool]] = [(0, 0, False)]
    while work:
        v, base, expanded = work.pop()
        if t.left[v] == LEAF:
            statements.append(Load(base, e.labels[v]))
            continue
        l, r = t.left[v], t.right[v]
        left_first = st[l] >= st[r]
        if expanded:
            if left_first:
                statements.append(Op(base, e.labels[v], base, base + 1))
            else:
                statements.append(Op(base, e.labels[v], base + 1, base))
            continue
        first, second = (l, r) if left_first else (r, l)
        work.append((v, base, True))
        work.append((second, base + 1, False))
        work.append((first, base, False))
    used = 1 + max(max(x.dest, getattr(x, "lhs", 0), getattr(x, "rhs", 0)) for x in statements)
    return StraightLineProgram(tuple(statements), 0, used, st[0])


def run_program(prog: StraightLineProgram, env: Mapping[str, int]) -> int:
    """Interpret on a machine with exactly ``prog.registers`` registers."""
    regs: list[int | None] = [None] * prog.registers
    for stmt in prog.statements:
        if isinstance(stmt, Load):
            regs[stmt.dest] = env[stmt.operand]
        else:
            a, b = regs[stmt.lhs], regs[stmt.rhs]
            if a is None or b is None:
                raise RuntimeError(f"read of an undefined register in {stmt}")
            regs[stmt.dest] = OPERATORS[stmt.op](a, b)
    out = regs[prog.result]
    if out is None:
        raise RuntimeError("result register never written")
    return out


def fits_in_registers(shape: BinaryTree, registers: int) -> bool:
    """Exhaustive search for an evaluation order using at most ``registers``.

    A state is the set of computed nodes; a computed value stays live until
    its parent is computed.  Loads need a free register, an operation reuses
    one of its operands.  Available operations are applied eagerly: doing
    one earlier only lowers the live count at every later moment.
    """
    left, right = shape.left, shape.right
    parent = shape.parents()
    leaves = [v for v in range(len(shape)) if left[v] == LEAF]
    failed: set[int] = set()
    # explicit DFS: frames of (done, live, next leaf index to try)
    stack = [(0, 0, 0)]
    while stack:
        done, live, start = stack.pop()
        if done & 1:
            return True
        if live + 1 > registers:
            failed.add(done)
            continue
        for j in range(start, len(leaves)):
            leaf = leaves[j]
            if (done >> leaf) & 1:
                continue
            nd, nl, v = done | (1 << leaf), live + 1, leaf
            while True:
                p = parent[v]
                if p == -1:
                    break
                sib = right[p] if left[p] == v else left[p]
                if not (nd >> sib) & 1:
                    break
                nd |= 1 << p
                nl -= 1
                v = p
            if nd in failed:
                continue
            stack.append((done, live, j + 1))
            stack.append((nd, nl, 0))
            break
        else:
            failed.add(done)
    return False


def min_registers_bruteforce(shape: BinaryTree) -> int:
    """Smallest register count for which :func:`fits_in_registers` succeeds."""
    registers = 1
    while not fits_in_registers(shape, registers):
        registers += 1
    return registers
