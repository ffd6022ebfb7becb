"""Command-line front end.

Exit codes: 0 on success, 1 for malformed input or an invalid request,
2 when a size, budget or search limit is exceeded.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .balance import balance as balance_tree
from . import circuit, codegen, core, dag, gadgets, grammars, trees, tslp
from .errors import LimitExceeded, StrahlerError

ALGOS = ("naive", "lowspace", "balanced", "paths", "circuit")
THRESHOLD_ALGOS = ("paths", "circuit")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as e:
        raise UsageError(f"cannot read {path}: {e.strerror}") from None


def _bool(value: bool) -> str:
    return "true" if value else "false"


def _load(kind: str, text: str):
    if kind == "term":
        return trees.parse_term(text.strip())
    if kind == "adj":
        return trees.from_adjacency(trees.parse_adjacency(text))
    if kind == "dag":
        return dag.parse_dag(text)
    return tslp.parse_tslp(text)


def _as_tree(obj) -> trees.BinaryTree:
    if isinstance(obj, trees.BinaryTree):
        return obj
    if isinstance(obj, dag.Dag):
        return dag.unfold(obj)
    return tslp.tslp_val(obj)


def _as_program(obj) -> tslp.Tslp:
    if isinstance(obj, trees.BinaryTree):
        return balance_tree(obj)
    if isinstance(obj, dag.Dag):
        return tslp.dag_as_tslp(obj)
    return obj


def _threshold(obj, algo: str, k: int) -> bool:
    if algo == "paths":
        if isinstance(obj, dag.Dag):
            return dag.dag_statement_search(obj, k, snapshots=False)[0]
        return tslp.tslp_at_least_via_paths(_as_program(obj), k)
    program = _as_program(obj)
    if k > tslp.leaf_count(program).bit_length() - 1:
        return False  # st never exceeds floor(log2 leaves)
    return circuit.eval_circuit(circuit.build_circuit(program, k))


def _value(obj, algo: str) -> int:
    if algo == "naive":
        return core.strahler_naive(_as_tree(obj))
    if algo == "lowspace":
        return core.strahler_lowspace(_as_tree(obj)).value
    # balanced: evaluate compressed inputs directly, balance plain trees first
    if isinstance(obj, dag.Dag):
        return dag.dag_strahler(obj)
    return tslp.tslp_strahler(_as_program(obj))


def cmd_strahler(args, out) -> None:
    obj = _load(args.kind, _read(args.file))
    if args.algo in THRESHOLD_ALGOS:
        if args.k is None:
            raise UsageError(f"--algo {args.algo} needs --k")
        out.write(f"st >= {args.k}: {_bool(_threshold(obj, args.algo, args.k))}\n")
    elif args.k is not None:
        out.write(f"st >= {args.k}: {_bool(_value(obj, args.algo) >= args.k)}\n")
    else:
        out.write(f"st = {_value(obj, args.algo)}\n")


def cmd_balance(args, out) -> None:
    t = trees.parse_term(_read(args.file).strip())
    g = balance_tree(t)
    out.write(tslp.format_tslp(g))
    out.write(f"# depth {g.depth} size {g.size}\n")


def cmd_codegen(args, out) -> None:
    prog = codegen.codegen(codegen.parse_expr(_read(args.file)))
    out.write(str(prog) + "\n")


def cmd_grammar(args, out) -> None:
    g = grammars.parse_grammar(_read(args.file))
    try:
        if args.analysis == "max-st":
            value = grammars.max_strahler(g)
            out.write("st = infinity\n" if value == grammars.INFINITY else f"st = {value}\n")
        elif args.k is not None:
            out.write(f"st >= {args.k}: {_bool(grammars.acyclic_at_least(g, args.k))}\n")
        else:
            out.write(f"st = {grammars.acyclic_max_strahler(g)}\n")
    except (grammars.Unproductive, grammars.NoTree) as e:
        raise UsageError(str(e)) from None


def cmd_gadget(args, out) -> None:
    kind, source = args.kind, args.input
    if kind == "majority":
        term, predicted = gadgets.majority_tree(source)
        out.write(term + "\n")
    elif kind == "formula":
        result = gadgets.formula_to_tree(gadgets.parse_formula(_read(source)))
        out.write(trees.to_term(result.tree) + "\n")
        predicted = result.predicted
    elif kind == "circuit":
        d, predicted = gadgets.layered_circuit_to_dag(gadgets.parse_layered_circuit(_read(source)))
        out.write(dag.format_dag(d))
    elif kind == "qbf":
        result = gadgets.qbf_grammar(gadgets.parse_qbf(_read(source)))
        out.write(grammars.format_grammar(result.grammar))
        out.write(f"# k {result.k}\n")
        predicted = result.k if result.predicted else result.k - 1
    elif kind == "x3hs":
        n, family = gadgets.parse_x3hs(_read(source))
        result = gadgets.x3hs_grammar(n, family)
        out.write(grammars.format_grammar(result.grammar))
        predicted = _bool(result.predicted)
    elif kind == "linegraph":
        order, u, v = gadgets.parse_linegraph(_read(source))
        tree, predicted = gadgets.linegraph_tree(order, u, v)
        out.write(trees.format_adjacency(tree))
    else:
        inst = gadgets.parse_reach_instance(_read(source))
        if args.grammar:
            g, _, predicted = gadgets.dag_reach_grammar(inst)
            out.write(grammars.format_grammar(g))
        else:
            g, predicted = gadgets.dag_reach_tslp(inst)
            out.write(tslp.format_tslp(g))
    out.write(f"# predicted {predicted}\n")


def cmd_circuit(args, out) -> None:
    g = tslp.parse_tslp(_read(args.file))
    try:
        c = circuit.build_circuit(g, args.k)
    except (circuit.ThresholdTooLarge, ValueError) as e:
        raise UsageError(str(e)) from None
    out.write(circuit.format_circuit(c))


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="strahler", description="Strahler numbers of trees, DAGs, TSLPs and grammars.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    q = sub.add_parser("strahler", help="Strahler number of a tree in some representation")
    q.add_argument("kind", choices=("term", "adj", "dag", "tslp"))
    q.add_argument("file")
    q.add_argument("--algo", choices=ALGOS, default="balanced")
    q.add_argument("--k", type=int)
    q.set_defaults(run=cmd_strahler)

    q = sub.add_parser("balance", help="log-depth TSLP of a term")
    q.add_argument("file")
    q.set_defaults(run=cmd_balance)

    q = sub.add_parser("codegen", help="register-optimal code for an expression")
    q.add_argument("file")
    q.set_defaults(run=cmd_codegen)

    q = sub.add_parser("grammar", help="Strahler analyses of CNF grammars")
    q.add_argument("analysis", choices=("max-st", "acyclic-st"))
    q.add_argument("file")
    q.add_argument("--k", type=int)
    q.set_defaults(run=cmd_grammar)

    q = sub.add_parser("gadget", help="instances with predicted Strahler values")
    q.add_argument("kind", choices=("majority", "formula", "circuit", "qbf", "x3hs", "linegraph", "dagreach"))
    q.add_argument("input", help="bit string for majority, otherwise a file")
    q.add_argument("--grammar", action="store_true", help="dagreach: emit the grammar instead of the TSLP")
    q.set_defaults(run=cmd_gadget)

    q = sub.add_parser("circuit", help="comparison-gate circuits")
    q.add_argument("action", choices=("build",))
    q.add_argument("file")
    q.add_argument("k", type=int)
    q.set_defaults(run=cmd_circuit)
    return p


def run(argv: list[str], out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
        args.run(args, out)
    except LimitExceeded as e:
        err.write(f"error: {e}\n")
        return 2
    except (UsageError, StrahlerError) as e:
        err.write(f"error: {e}\n")
        return 1
    return 0


def main() -> None:
    sys.exit(run(sys.argv[1:]))
