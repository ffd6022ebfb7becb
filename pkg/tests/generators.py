"""Random instance generators shared by the test modules."""
import random

from strahler.grammars import CnfGrammar


def random_grammar(rng: random.Random, max_nonterminals: int = 6) -> CnfGrammar:
    names = [f"N{i}" for i in range(rng.randint(1, max_nonterminals))]
    prods = []
    eps_rate = rng.choice((0.2, 0.4, 0.6))
    for a in names:
        if rng.random() < eps_rate:
            prods.append((a, ()))
        for _ in range(rng.randint(0, 3)):
            prods.append((a, (rng.choice(names), rng.choice(names))))
    return CnfGrammar(names[0], tuple(prods), frozenset(names))
