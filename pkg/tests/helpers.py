"""Shared randomness and independent oracles for the test suite.

The oracles here deliberately avoid the library's decision routines: the
primitive-word oracle is a breadth-first closure, subgroup membership is
checked against naive product enumeration, and the letter action is checked
against refolding images of generators.
"""

import itertools
import random

from fgorbits.words import Word, multiply, invert, reduce
from fgorbits.stallings import fold_generators, subgroup_generators
from fgorbits.endo2 import PHI, PSI, SIGMA, apply_endo, compose, inner
from fgorbits.dynamics import sigma_apply_direct


def random_reduced_word(rng: random.Random, max_len: int, rank: int = 2) -> Word:
    length = rng.randint(1, max_len)
    letters = []
    choices = [x for l in range(1, rank + 1) for x in (l, -l)]
    while len(letters) < length:
        x = rng.choice(choices)
        if letters and letters[-1] == -x:
            continue
        letters.append(x)
    return Word(tuple(letters), rank)


def random_subgroup_gens(rng: random.Random, max_gens: int = 4, max_len: int = 8):
    return [random_reduced_word(rng, max_len) for _ in range(rng.randint(1, max_gens))]


def random_automorphism(rng: random.Random, length: int):
    """Product of random letters from the generating families and inners."""
    pool = list(SIGMA.values()) + list(PSI)
    out = rng.choice(pool)
    for _ in range(length - 1):
        out = compose(out, rng.choice(pool))
    return out


def positive_primitive_closure(max_len: int) -> set:
    """Breadth-first closure of {a} under the elementary positive family,
    plus the word b.  The independent oracle for positive primitivity."""
    out = {(1,)}
    frontier = [Word((1,), 2)]
    while frontier:
        u = frontier.pop()
        for phi in PHI:
            v = apply_endo(phi, u)
            if len(v) <= max_len and v.letters not in out:
                out.add(v.letters)
                frontier.append(v)
    out.add((2,))
    return out


def all_positive_words(max_len: int):
    for length in range(1, max_len + 1):
        for tup in itertools.product((1, 2), repeat=length):
            yield Word(tup, 2)


def naive_members(gens, depth: int = 3) -> set:
    """All reduced products of at most `depth` generators or inverses."""
    basis = [g.letters for g in gens] + [invert(g).letters for g in gens]
    out = {()}
    frontier = [Word((), 2)]
    for _ in range(depth):
        nxt = []
        for u in frontier:
            for b in basis:
                v = multiply(u, Word(b, 2))
                if v.letters not in out:
                    out.add(v.letters)
                    nxt.append(v)
        frontier = nxt
    return out


def refold_image(aut, letter: str):
    """Oracle for the direct letter action: refold the generator images."""
    e = SIGMA[letter]
    return fold_generators(
        [apply_endo(e, g) for g in subgroup_generators(aut)], rank=2
    )


def subgroup_orbit_automata(aut, depth: int):
    """All distinct automata reachable by letter words of length <= depth,
    with a shortest reaching word for each (deduplicated breadth-first)."""
    out = {aut: ""}
    frontier = [aut]
    for _ in range(depth):
        nxt = []
        for cur in frontier:
            for g in ("S", "I", "X"):
                img = sigma_apply_direct(cur, g)
                if img not in out:
                    out[img] = out[cur] + g
                    nxt.append(img)
        frontier = nxt
    return out
