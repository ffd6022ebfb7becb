import random
from collections import Counter

import pytest
from hypothesis import given

from strahler import core, dag, trees
from strahler.errors import BudgetExceeded, MalformedInput
from strategies import binary_trees


def test_parse_and_format():
    text = "root r\nr -> s s\ns -> t t\nt -> .\n"
    d = dag.parse_dag(text)
    assert len(d) == 3
    assert dag.format_dag(d) == text
    assert trees.to_term(dag.unfold(d)) == "bbaabaa"
    assert dag.dag_strahler(d) == 2


@pytest.mark.parametrize("text", [
    "root r\nr -> s t\ns -> r t\nt -> .\n",  # cycle
    "root r\nr -> s\ns -> .\n",
    "root q\nr -> .\n",
])
def test_parse_errors(text):
    with pytest.raises(MalformedInput):
        dag.parse_dag(text)


def test_unreachable_nodes_dropped():
    d = dag.parse_dag("root r\nr -> t t\nz -> t t\nt -> .\n")
    assert len(d) == 2


def test_exponential_unfolding():
    children = {"v0": ()}
    for i in range(1, 40):
        children[f"v{i}"] = (f"v{i - 1}", f"v{i - 1}")
    d = dag.Dag.from_children(children, "v39")
    assert dag.dag_strahler(d) == 39
    assert dag.unfolded_sizes(d)[0] == 2 ** 40 - 1
    with pytest.raises(BudgetExceeded):
        dag.unfold(d)


@given(binary_trees(80))
def test_hash_cons(t):
    d = dag.hash_cons(t)
    assert dag.unfold(d) == t
    assert dag.dag_strahler(d) == core.strahler_naive(t)
    # a minimal DAG has no two nodes with the same children
    kids = [(d.left[v], d.right[v]) for v in range(len(d))]
    assert len(set(kids)) == len(kids)
    assert dag.unfold(dag.dag_from_tree(t)) == t


def test_random_dags():
    rng = random.Random(2)
    for _ in range(200):
        d = dag.random_dag(rng.randint(0, 12), rng)
        assert dag.dag_strahler(d) == core.strahler_naive(dag.unfold(d))


def test_minimal_dag_enumeration_is_complete_and_unique():
    # each DAG is listed once, and every small hash-consed tree shows up
    seen = Counter()
    for d in dag.minimal_dags(5):
        seen[trees.to_term(dag.unfold(d))] += 1
    assert all(c == 1 for c in seen.values())
    expected = {trees.to_term(dag.unfold(dag.hash_cons(trees.parse_term(w))))
                for n in range(1, 11) for w in trees.terms_with_leaves(n)
                if len(dag.hash_cons(trees.parse_term(w))) <= 5}
    assert expected <= set(seen)
    assert [sum(1 for d in dag.minimal_dags(n) if len(d) == n) for n in range(1, 7)] == [1, 1, 3, 15, 111, 1119]


def test_statement_basics():
    leaf = True
    assert dag.classify_statement(dag.AT_LEAST, 0, leaf) is True
    assert dag.classify_statement(dag.AT_LEAST, 1, leaf) is False
    assert dag.classify_statement(dag.AT_LEAST, 1, not leaf) is True
    assert dag.classify_statement(dag.EQUALS, 0, leaf) is True
    assert dag.classify_statement(dag.EQUALS, 0, not leaf) is False
    assert dag.classify_statement(dag.EQUALS, 2, not leaf) is None


def test_branch_patterns_are_exclusive_and_exhaustive():
    # every pair of child values satisfies exactly one branch of a true statement
    for m in range(1, 5):
        for kind in (dag.AT_LEAST, dag.EQUALS):
            for x in range(6):
                for y in range(6):
                    v = core.s(x, y)
                    holds = v >= m if kind == dag.AT_LEAST else v == m
                    matches = 0
                    for (aside, ak, am), (pside, pk, pm) in dag.branch_patterns(kind, m):
                        vals = {dag.LEFT: x, dag.RIGHT: y}

                        def sat(side, k, mm):
                            return vals[side] >= mm if k == dag.AT_LEAST else vals[side] == mm

                        matches += sat(aside, ak, am) and sat(pside, pk, pm)
                    assert matches == (1 if holds else 0), (kind, m, x, y)


def test_statement_search_on_random_dags():
    rng = random.Random(11)
    for _ in range(150):
        d = dag.random_dag(rng.randint(0, 10), rng)
        value = dag.dag_strahler(d)
        for k in range(value + 2):
            accepted, trace = dag.dag_statement_search(d, k)
            assert accepted == (value >= k)
            assert trace.accepting_paths == (1 if value >= k else 0)
            assert all(dag.stack_invariant(x) for x in trace.snapshots)
            assert trace.configurations == len(set(trace.snapshots))


def test_stack_invariant_rejects():
    st = dag.Statement
    assert dag.stack_invariant((st(0, 1, 3), st(0, 2, 3), st(0, 3, 1)))
    assert not dag.stack_invariant((st(0, 1, 1), st(0, 2, 3)))
    assert not dag.stack_invariant((st(0, 1, 2), st(1, 2, 2), st(0, 3, 2)))


def test_search_rejects_negative_threshold():
    with pytest.raises(ValueError):
        dag.dag_statement_search(dag.parse_dag("root r\nr -> .\n"), -1)
