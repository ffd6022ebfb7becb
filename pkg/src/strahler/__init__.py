"""Strahler numbers of binary trees given as terms, adjacency lists, DAGs,
tree straight-line programs and CNF grammars."""
from .core import embed_oracle, log_bound, s, strahler_lowspace, strahler_naive
from .trees import BinaryTree, parse_term, to_term
from .dag import Dag, dag_strahler, parse_dag
from .tslp import Tslp, parse_tslp, tslp_strahler
from .balance import balance
from .circuit import build_circuit, eval_circuit
from .grammars import CnfGrammar, acyclic_max_strahler, max_strahler, parse_grammar

__all__ = [
    "BinaryTree", "CnfGrammar", "Dag", "Tslp", "acyclic_max_strahler", "balance",
    "build_circuit", "dag_strahler", "embed_oracle", "eval_circuit", "log_bound",
    "max_strahler", "parse_dag", "parse_grammar", "parse_term", "parse_tslp", "s",
    "strahler_lowspace", "strahler_naive", "to_term", "tslp_strahler",
]
