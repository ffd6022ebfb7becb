import itertools
import random

import pytest

from strahler import core, dag, gadgets, grammars, trees, tslp
from strahler.errors import InvalidNodes, MalformedInput, MalformedInstance, MalformedQbf, NotLayered
from strahler.gadgets import Const, Gate, Lit


def st_of_term(word: str) -> int:
    return core.strahler_naive(trees.parse_term(word))


# --- formulas ---------------------------------------------------------------


def test_formula_round_trip():
    text = "(and (or x1 (not x2)) (or 1 0))"
    f = gadgets.parse_formula(text)
    assert gadgets.format_formula(f) == text
    assert gadgets.formula_depth(f) == 2 and gadgets.is_uniform(f)
    assert gadgets.evaluate_formula(f, {1: False, 2: False})
    assert not gadgets.evaluate_formula(f, {1: False, 2: True})


@pytest.mark.parametrize("text", ["", "(and 1)", "(xor 1 0)", "(not 1)", "(not (not x1))", "1 0", "x0", "(and 1 0"])
def test_formula_parse_errors(text):
    with pytest.raises(MalformedInput):
        gadgets.parse_formula(text)


def test_gadget_operations_simulate_connectives():
    # f_and(x, y) = s(s(x,x), s(y,y)) and f_or(x, y) = s(s(s(x,x),y), s(x,s(y,y)))
    s = core.s
    for d in range(5):
        lo, hi = 2 * d, 2 * d + 1
        for x, y in itertools.product((lo, hi), repeat=2):
            f_and = s(s(x, x), s(y, y))
            f_or = s(s(s(x, x), y), s(x, s(y, y)))
            assert f_and == (2 * d + 3 if (x, y) == (hi, hi) else 2 * d + 2)
            assert f_or == (2 * d + 3 if hi in (x, y) else 2 * d + 2)


def test_connective_tables_for_every_offset():
    s = core.s
    for a in range(13):
        for x, y in itertools.product((a, a + 1), repeat=2):
            f_and = s(s(x, x), s(y, y))
            f_or = s(s(s(x, x), y), s(x, s(y, y)))
            assert f_and == (a + 3 if x == y == a + 1 else a + 2)
            assert f_or == (a + 2 if x == y == a else a + 3)


def test_constant_and_small_formulas():
    assert gadgets.formula_to_tree(Const(1)).predicted == 1
    assert core.strahler_naive(gadgets.formula_to_tree(Const(0)).tree) == 0
    for op, a, b in itertools.product(("and", "or"), (0, 1), (0, 1)):
        result = gadgets.formula_to_tree(Gate(op, Const(a), Const(b)))
        truth = (a and b) if op == "and" else (a or b)
        assert result.predicted == (3 if truth else 2)
        assert core.strahler_naive(result.tree) == result.predicted
        assert dag.unfold(result.dag) == result.tree


def test_formula_gadget_rejects():
    with pytest.raises(MalformedInstance):
        gadgets.formula_to_tree(Gate("and", Const(1), Gate("or", Const(0), Const(1))))
    with pytest.raises(MalformedInstance):
        gadgets.formula_to_tree(Lit(1))


def test_pad_uniform_keeps_value():
    rng = random.Random(0)
    for _ in range(100):
        f = Gate("and", gadgets.random_formula(rng, rng.randint(0, 3), 3), gadgets.random_formula(rng, 0, 3))
        g = gadgets.pad_uniform(f)
        assert gadgets.is_uniform(g) and gadgets.formula_depth(g) == gadgets.formula_depth(f)
        for bits in itertools.product((False, True), repeat=3):
            env = dict(enumerate(bits, start=1))
            assert gadgets.evaluate_formula(g, env) == gadgets.evaluate_formula(f, env)


# --- layered circuits ---------------------------------------------------------

CIRCUIT = "input p 1\ninput q 0\ng1 = and p q\ng2 = or p q\ng3 = or g1 g2\noutput g3\n"


def test_layered_circuit_parse_and_evaluate():
    c = gadgets.parse_layered_circuit(CIRCUIT)
    assert gadgets.format_layered_circuit(c) == CIRCUIT
    assert gadgets.evaluate_circuit(c)
    d, predicted = gadgets.layered_circuit_to_dag(c)
    assert predicted == 5 == dag.dag_strahler(d)


@pytest.mark.parametrize("text,error", [
    ("input p 1\ng = and p r\noutput g\n", MalformedInput),
    ("input p 1\ninput q 0\ng = and p q\nh = or g p\noutput h\n", NotLayered),
    ("input p 2\noutput p\n", MalformedInput),
    ("input p 1\n", MalformedInput),
    ("g = and h h\nh = or g g\noutput g\n", MalformedInput),
])
def test_layered_circuit_errors(text, error):
    with pytest.raises(error):
        c = gadgets.parse_layered_circuit(text)
        gadgets.layered_circuit_to_dag(c)


# --- majority -----------------------------------------------------------------


def test_majority_examples():
    assert gadgets.majority_tree("0")[1] == 3
    assert gadgets.majority_tree("1")[1] == 4
    assert gadgets.majority_tree("01")[1] == 3
    assert gadgets.majority_tree("011")[1] == 4
    for w in ("0", "1", "0011", "111"):
        term, predicted = gadgets.majority_tree(w)
        assert st_of_term(term) == predicted


@pytest.mark.parametrize("w", ["", "012", "ab"])
def test_majority_rejects(w):
    with pytest.raises(MalformedInput):
        gadgets.majority_tree(w)


def test_majority_random_long_words():
    rng = random.Random(1)
    for _ in range(50):
        w = "".join(rng.choice("01") for _ in range(rng.randint(8, 40)))
        term, predicted = gadgets.majority_tree(w)
        assert st_of_term(term) == predicted == (3 if w.count("0") * 2 >= len(w) else 4)


# --- line graphs ----------------------------------------------------------------


def test_linegraph_examples():
    for order, u, v, expected in [(["p", "q", "r"], "p", "q", 3), (["p", "q", "r"], "q", "p", 2),
                                  (["p", "q"], "p", "q", 3), (["p", "q"], "q", "p", 2)]:
        tree, predicted = gadgets.linegraph_tree(order, u, v)
        assert predicted == expected
        assert core.strahler_naive(trees.from_adjacency(tree)) == expected


@pytest.mark.parametrize("order,u,v", [(["p", "q"], "p", "z"), (["p", "q"], "p", "p")])
def test_linegraph_rejects(order, u, v):
    with pytest.raises(InvalidNodes):
        gadgets.linegraph_tree(order, u, v)


def test_linegraph_parse():
    assert gadgets.parse_linegraph("order a b c\nu b\nv a\n") == (["a", "b", "c"], "b", "a")
    with pytest.raises(MalformedInput):
        gadgets.parse_linegraph("order a b\nu a\n")


# --- DAG reachability --------------------------------------------------------------

REACH = "root s\ns -> a b\na -> t c\nb -> c c\nc -> .\nt -> .\ntarget t\n"


def test_reach_instance_round_trip():
    inst = gadgets.parse_reach_instance(REACH)
    assert inst.reachable()
    assert gadgets.parse_reach_instance(gadgets.format_reach_instance(inst)) == inst
    g, predicted = gadgets.dag_reach_tslp(inst)
    assert predicted == 2 == tslp.tslp_strahler(g)
    unreachable = gadgets.parse_reach_instance(REACH.replace("a -> t c", "a -> c c"))
    assert not unreachable.reachable()
    g, predicted = gadgets.dag_reach_tslp(unreachable)
    assert predicted == 1 == tslp.tslp_strahler(g)
    cnf, cert, predicted = gadgets.dag_reach_grammar(unreachable)
    assert grammars.max_strahler(cnf) <= 1 and predicted == 1


@pytest.mark.parametrize("text", [
    "root s\ns -> t t\nt -> .\n",                       # no target line
    "root s\ns -> t t\nt -> .\ntarget s\n",             # target not a leaf
    "root s\ns -> .\ntarget s\n",                       # source without children
    "root s\ns -> t t\nt -> .\ntarget z\n",             # undeclared target
])
def test_reach_instance_errors(text):
    with pytest.raises(MalformedInput):
        gadgets.parse_reach_instance(text)


def test_reach_instance_rejects_cycles():
    with pytest.raises(MalformedInstance):
        gadgets.ReachInstance({"s": ("a", "t"), "a": ("s", "t"), "t": ()}, "s", "t")


# --- exact hitting set ------------------------------------------------------------------


def test_exact_hitting_set_solver():
    assert gadgets.exact_hitting_set(3, [(1, 2, 3)]) in ({1}, {2}, {3})
    family = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
    assert gadgets.exact_hitting_set(4, family) is None
    assert gadgets.exact_hitting_set(4, []) == frozenset()


def test_x3hs_examples():
    pos = gadgets.x3hs_grammar(3, [(1, 2, 3)])
    assert pos.predicted and grammars.acyclic_max_strahler(pos.grammar) == 2
    family = [(1, 2, 3), (1, 2, 4), (1, 3, 4), (2, 3, 4)]
    neg = gadgets.x3hs_grammar(4, family)
    assert not neg.predicted and grammars.acyclic_max_strahler(neg.grammar) == 1
    empty = gadgets.x3hs_grammar(2, [])
    assert empty.predicted and grammars.acyclic_max_strahler(empty.grammar) == 2


@pytest.mark.parametrize("n,family", [(0, []), (3, [(1, 2, 2)]), (3, [(1, 2, 4)]), (3, [(1, 2)])])
def test_x3hs_rejects(n, family):
    with pytest.raises(MalformedInstance):
        gadgets.x3hs_grammar(n, family)


def test_x3hs_parse():
    assert gadgets.parse_x3hs("n 4\nset 1 2 3\nset 2 3 4\n") == (4, [(1, 2, 3), (2, 3, 4)])
    for text in ("set 1 2 3\n", "n x\n", "n 3\nfoo 1\n"):
        with pytest.raises(MalformedInstance):
            gadgets.parse_x3hs(text)


# --- QBF ---------------------------------------------------------------------------------


def test_qbf_examples():
    exists = gadgets.parse_qbf("E x1\nx1\n")
    result = gadgets.qbf_grammar(exists)
    assert result.k == 4 and result.predicted
    assert grammars.acyclic_max_strahler(result.grammar) == 4
    forall = gadgets.parse_qbf("A x1\nx1\n")
    result = gadgets.qbf_grammar(forall)
    assert not result.predicted
    assert grammars.acyclic_max_strahler(result.grammar) == 3 == core.strahler_naive(result.t_big())


def test_qbf_evaluation():
    assert gadgets.evaluate_qbf(gadgets.parse_qbf("A x1 E x2\n(or (and x1 x2) (and (not x1) (not x2)))\n"))
    assert not gadgets.evaluate_qbf(gadgets.parse_qbf("E x1 A x2\n(or (and x1 x2) (and (not x1) (not x2)))\n"))


def test_qbf_format_round_trip():
    rng = random.Random(2)
    for _ in range(30):
        psi = gadgets.random_qbf(rng, rng.randint(1, 4), rng.randint(0, 3))
        assert gadgets.parse_qbf(gadgets.format_qbf(psi)) == psi


@pytest.mark.parametrize("text", ["E x1\n", "E x2\nx2\n", "E x1 A x1\nx1\n", "Q x1\nx1\n",
                                  "E x1\n(and x1 1)\n", "E x1\nx2\n", "E x1\n(and x1\n"])
def test_qbf_rejects(text):
    with pytest.raises(MalformedQbf):
        gadgets.parse_qbf(text)


def test_qbf_big_tree_shared_form():
    psi = gadgets.parse_qbf("A x1 E x2\n(and x1 (not x2))\n")
    result = gadgets.qbf_grammar(psi)
    big = result.t_big()
    assert dag.hash_cons(big) == dag.hash_cons(dag.unfold(result.big))
    assert core.strahler_naive(big) == grammars.acyclic_max_strahler(result.grammar)
