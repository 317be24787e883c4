"""Seeded random instances shared by the test modules."""

import random

from cyclicsplit import digraph as dg
from cyclicsplit.whitehead import AutSequence, TypeI, TypeII
from cyclicsplit.words import Alphabet, inverse, is_cyclically_reduced, is_proper_power, multiply

LETTERS = "abcdef"


def alphabet(rank):
    return Alphabet(tuple(LETTERS[:rank]))


def signed(rank):
    return [s for i in range(1, rank + 1) for s in (i, -i)]


def reduced_word(rng, letters, length):
    w = ()
    while len(w) < length:
        x = rng.choice(letters)
        if not w or w[-1] != -x:
            w = w + (x,)
    return w


def root_word(rng, letters, lo, hi):
    """Cyclically reduced, not a proper power."""
    while True:
        w = reduced_word(rng, letters, rng.randint(lo, hi))
        if is_cyclically_reduced(w) and is_proper_power(w) is None:
            return w


def core_graph(rng, rank, max_edges, max_vertices=None):
    """A random connected, folded, cyclically reduced graph."""
    X = alphabet(rank)
    while True:
        gens = [reduced_word(rng, signed(rank), rng.randint(1, 6)) for _ in range(rng.randint(1, 3))]
        s = dg.stallings_graph(gens, X, based=False)
        if not 1 <= s.num_edges <= max_edges:
            continue
        if max_vertices is not None and s.num_vertices > max_vertices:
            continue
        return s


def type2(rng, rank):
    m = rng.choice(signed(rank))
    cut = {m} | {x for x in signed(rank) if abs(x) != abs(m) and rng.random() < 0.5}
    return TypeII(frozenset(cut), m, rank)


def type1(rng, rank):
    perm = list(range(1, rank + 1))
    rng.shuffle(perm)
    return TypeI(tuple(p if rng.random() < 0.5 else -p for p in perm))


def sequence(rng, rank, lo, hi):
    steps = [type2(rng, rank) if rng.random() < 0.8 else type1(rng, rank)
             for _ in range(rng.randint(lo, hi))]
    return AutSequence(tuple(steps))


def product_subgroup(rng, gens, count=(1, 3), length=(1, 4)):
    """Random nontrivial products of ``gens`` and their inverses."""
    out = []
    while not out:
        for _ in range(rng.randint(*count)):
            w = ()
            for _ in range(rng.randint(*length)):
                g = rng.choice(gens)
                w = multiply(w, g if rng.random() < 0.5 else inverse(g))
            if w:
                out.append(w)
    return out


def conjugated(rng, gens, rank, max_len=2):
    c = reduced_word(rng, signed(rank), rng.randint(0, max_len))
    return [multiply(inverse(c), g, c) for g in gens]


def make_rng(seed):
    return random.Random(seed)


__all__ = [
    "alphabet", "signed", "reduced_word", "root_word", "core_graph", "type2", "type1",
    "sequence", "product_subgroup", "conjugated", "make_rng",
]
