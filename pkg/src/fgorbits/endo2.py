"""Endomorphisms of the rank-2 free group as first-class values.

An endomorphism is the pair of images of the generators a and b.  The module
provides composition (convention: ``compose(f, g)`` acts as f after g),
inversion via a normal-form factorization, the standard generating families
of the automorphism group, primitive-word testing with explicit witnesses,
and a context-sensitive grammar generating the closure of a positive word
under a finite set of positive endomorphisms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional, Sequence

from .errors import InvalidInputError
from .words import (
    Word,
    conjugate,
    cyclic_core,
    cyclic_shifts,
    identity,
    invert,
    multiply,
    reduce,
    word,
)

__all__ = [
    "Endo2",
    "endo",
    "apply_endo",
    "compose",
    "compose_all",
    "endo_power",
    "identity_endo",
    "inner",
    "delta_endo",
    "is_automorphism",
    "invert_automorphism",
    "image_subgroup",
    "PHI_A_BA",
    "PHI_BINV_AINV",
    "PHI_B_A",
    "PHI_A_AB",
    "PHI_AB_B",
    "PHI_BA_B",
    "PHI_A_BINV",
    "PHI_AINV_B",
    "PHI_AINV_BINV",
    "SIGMA",
    "SIGMA0",
    "PHI",
    "PSI",
    "PositivePrimitive",
    "PrimitiveWitness",
    "AutFactorization",
    "is_positive_primitive",
    "is_primitive",
    "factorize_automorphism",
    "Grammar",
    "Rule",
    "emit_closure_grammar",
    "bounded_language",
    "grammar_to_text",
]


@dataclass(frozen=True)
class Endo2:
    """Endomorphism of the rank-2 free group, given by reduced images of a, b."""

    image_a: Word
    image_b: Word

    def __post_init__(self):
        if self.image_a.rank != 2 or self.image_b.rank != 2:
            raise InvalidInputError("endomorphism images must have rank 2")

    def __call__(self, u: Word) -> Word:
        return apply_endo(self, u)

    def __str__(self) -> str:
        return f"{self.image_a} ; {self.image_b}"

    def is_positive(self) -> bool:
        return self.image_a.is_positive() and self.image_b.is_positive()


def endo(text: str) -> Endo2:
    """Parse the ``x ; y`` endomorphism format (a maps to x, b to y)."""
    parts = text.split(";")
    if len(parts) != 2:
        raise InvalidInputError(f"endomorphism must be 'x ; y', got {text!r}")
    return Endo2(word(parts[0]), word(parts[1]))


def apply_endo(e: Endo2, u: Word) -> Word:
    """Image of a word: substitute generator images and reduce."""
    out: list[int] = []
    images = (e.image_a.letters, e.image_b.letters)
    for x in u.letters:
        img = images[abs(x) - 1]
        if x < 0:
            img = tuple(-y for y in reversed(img))
        for y in img:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return Word(tuple(out), 2)


def compose(f: Endo2, g: Endo2) -> Endo2:
    """Composition acting as f after g: compose(f, g)(x) = f(g(x))."""
    return Endo2(apply_endo(f, g.image_a), apply_endo(f, g.image_b))


def compose_all(factors: Sequence[Endo2]) -> Endo2:
    """Product of a factor sequence, leftmost factor outermost."""
    out = _IDENTITY
    for f in factors:
        out = compose(out, f)
    return out


def identity_endo() -> Endo2:
    return _IDENTITY


def inner(w: Word) -> Endo2:
    """The inner automorphism u -> w^-1 u w."""
    return Endo2(conjugate(word("a"), w), conjugate(word("b"), w))


def delta_endo(m: int, n: int, eps: int) -> Endo2:
    """a -> a, b -> a^m b^eps a^n."""
    if eps not in (1, -1):
        raise InvalidInputError("eps must be +1 or -1")
    letters = ([1] * m if m >= 0 else [-1] * (-m)) + [2 * eps] + ([1] * n if n >= 0 else [-1] * (-n))
    return Endo2(word("a"), reduce(letters, 2))


_IDENTITY = Endo2(word("a"), word("b"))

PHI_A_BA = Endo2(word("a"), word("ba"))
PHI_BINV_AINV = Endo2(word("B"), word("A"))
PHI_B_A = Endo2(word("b"), word("a"))
PHI_AB_B = Endo2(word("ab"), word("b"))
PHI_A_AB = Endo2(word("a"), word("ab"))
PHI_BA_B = Endo2(word("ba"), word("b"))
PHI_A_BINV = Endo2(word("a"), word("B"))
PHI_AINV_B = Endo2(word("A"), word("b"))
PHI_AINV_BINV = Endo2(word("A"), word("B"))

#: The three-letter generating set of the dynamics, with its fixed encoding.
SIGMA: dict[str, Endo2] = {"S": PHI_A_BA, "I": PHI_BINV_AINV, "X": PHI_B_A}
SIGMA0: dict[str, Endo2] = {"S": PHI_A_BA, "I": PHI_BINV_AINV}

#: Elementary positive automorphisms generating the positive primitives from a.
PHI: tuple[Endo2, ...] = (PHI_A_BA, PHI_AB_B, PHI_A_AB, PHI_BA_B)

#: All eight automorphisms mapping letters to letters.
PSI: tuple[Endo2, ...] = tuple(
    Endo2(Word((sa * (2 if swap else 1),), 2), Word((sb * (1 if swap else 2),), 2))
    for swap in (False, True)
    for sa in (1, -1)
    for sb in (1, -1)
)

_PHI_INVERSES = {
    PHI_A_BA: Endo2(word("a"), word("bA")),
    PHI_AB_B: Endo2(word("aB"), word("b")),
    PHI_A_AB: Endo2(word("a"), word("Ab")),
    PHI_BA_B: Endo2(word("Ba"), word("b")),
}


def _psi_inverse(psi: Endo2) -> Endo2:
    for cand in PSI:
        if compose(psi, cand) == _IDENTITY:
            return cand
    raise InvalidInputError(f"{psi} is not a letter automorphism")


def endo_power(e: Endo2, k: int) -> Endo2:
    if k >= 0:
        out = _IDENTITY
        for _ in range(k):
            out = compose(out, e)
        return out
    return endo_power(invert_automorphism(e), -k)


def is_automorphism(e: Endo2) -> bool:
    """True iff the generator images form a basis (fold to the bouquet)."""
    from .stallings import fold_generators

    return fold_generators([e.image_a, e.image_b]).is_bouquet()


def image_subgroup(e: Endo2, aut) -> "StallingsAutomaton":
    """Automaton of the image subgroup e(H)."""
    from .stallings import fold_generators, subgroup_generators

    return fold_generators(
        [apply_endo(e, g) for g in subgroup_generators(aut)], rank=2
    )


# -- primitive words ------------------------------------------------------


@dataclass(frozen=True)
class PositivePrimitive:
    """Witness that a positive word is primitive.

    ``factors`` multiply out (leftmost outermost) to an automorphism sending
    a to the word; ``is_b`` flags the single exception, the word b itself.
    """

    factors: tuple[Endo2, ...]
    is_b: bool = False

    def automorphism(self) -> Endo2:
        out = _IDENTITY
        for f in self.factors:
            out = compose(out, f)
        return out


def _peel(u: tuple[int, ...], big: int, small: int, after: bool) -> Optional[tuple[int, ...]]:
    """Undo one elementary expansion: drop one `big` adjacent to each `small`.

    With after=True each small must be immediately followed by big, and that
    big is dropped; with after=False each small must be immediately preceded.
    """
    out = []
    i = 0
    n = len(u)
    if after:
        while i < n:
            out.append(u[i])
            if u[i] == small:
                if i + 1 >= n or u[i + 1] != big:
                    return None
                i += 2
            else:
                i += 1
        return tuple(out)
    prev_big = False
    for i, x in enumerate(u):
        if x == small:
            if not prev_big:
                return None
            out.pop()
            out.append(x)
        else:
            out.append(x)
        prev_big = x == big
    return tuple(out)


def _cyclic_block_pattern_ok(letters: tuple[int, ...]) -> bool:
    """Necessary shape for primitivity of a positive word with both letters:
    one letter has all cyclic block exponents 1, the other's lie in {n, n+1}.
    """
    blocks: list[tuple[int, int]] = []  # (letter, run length), cyclically
    for x in letters:
        if blocks and blocks[-1][0] == x:
            blocks[-1] = (x, blocks[-1][1] + 1)
        else:
            blocks.append((x, 1))
    if len(blocks) > 1 and blocks[0][0] == blocks[-1][0]:
        blocks[0] = (blocks[0][0], blocks[0][1] + blocks[-1][1])
        blocks.pop()
    a_runs = [c for l, c in blocks if l == 1]
    b_runs = [c for l, c in blocks if l == 2]
    for ones, other in ((a_runs, b_runs), (b_runs, a_runs)):
        if all(c == 1 for c in ones) and other and max(other) - min(other) <= 1:
            return True
    return False


@lru_cache(maxsize=None)
def _positive_primitive_letters(u: tuple[int, ...]) -> Optional[tuple[Endo2, ...]]:
    if u == (1,):
        return ()
    p = sum(1 for x in u if x == 1)
    q = len(u) - p
    if p == 0 or q == 0:
        return None
    if p == q:
        if u == (1, 2):
            return (PHI_AB_B,)
        if u == (2, 1):
            return (PHI_BA_B,)
        return None
    if math.gcd(p, q) != 1 or not _cyclic_block_pattern_ok(u):
        return None
    if p > q:
        candidates = ((PHI_A_BA, _peel(u, 1, 2, after=True)), (PHI_A_AB, _peel(u, 1, 2, after=False)))
    else:
        candidates = ((PHI_AB_B, _peel(u, 2, 1, after=True)), (PHI_BA_B, _peel(u, 2, 1, after=False)))
    for phi, v in candidates:
        if v is None:
            continue
        rest = _positive_primitive_letters(v)
        if rest is not None:
            return (phi,) + rest
    return None


def is_positive_primitive(u: Word) -> Optional[PositivePrimitive]:
    """Exact membership of a positive word among the positive primitives.

    Returns the factor sequence reproducing u from a, the special marker for
    the word b, or None.  Decision by exponent-contraction descent; a
    breadth-first closure over the elementary family serves as the test
    oracle, not this routine.
    """
    if not u.letters:
        raise InvalidInputError("positive word must be nonempty")
    if not u.is_positive() or u.rank != 2:
        raise InvalidInputError("input must be a positive rank-2 word")
    if u.letters == (2,):
        return PositivePrimitive((), is_b=True)
    factors = _positive_primitive_letters(u.letters)
    if factors is None:
        return None
    return PositivePrimitive(factors)


@dataclass(frozen=True)
class PrimitiveWitness:
    """Primitive word u written as an inner twist of a letter image:
    conjugator w, letter automorphism psi and positive factors with
    (inner(w) . psi . product(factors))(a) = u.
    """

    conjugator: Word
    psi: Endo2
    factors: tuple[Endo2, ...]

    def automorphism(self) -> Endo2:
        out = compose(inner(self.conjugator), self.psi)
        for f in self.factors:
            out = compose(out, f)
        return out


def is_primitive(u: Word) -> Optional[PrimitiveWitness]:
    """Primitivity of an arbitrary rank-2 word, with a reassembled witness."""
    if u.rank != 2:
        raise InvalidInputError("primitivity test requires rank 2")
    if not u.letters:
        return None
    core, conj = cyclic_core(u)
    for psi in PSI:
        psi_inv = _psi_inverse(psi)
        q = apply_endo(psi_inv, core)
        if not q.is_positive():
            continue
        prefix: list[int] = []
        for shift in cyclic_shifts(q):
            res = is_positive_primitive(shift)
            if res is not None:
                # shift = rotation of q by |prefix| letters: q = x . y, shift = y . x
                x = Word(tuple(prefix), 2)
                w = multiply(invert(apply_endo(psi, x)), conj)
                if res.is_b:
                    psi_out = compose(psi, PHI_B_A)
                    factors = ()
                else:
                    psi_out = psi
                    factors = res.factors
                witness = PrimitiveWitness(w, psi_out, factors)
                return witness
            prefix.append(shift.letters[0])
    return None


# -- factorization of automorphisms ---------------------------------------


@dataclass(frozen=True)
class AutFactorization:
    """Normal form of an automorphism: inner part, letter part, positive
    elementary word, and the residual a-fixing parameters (m, n, eps) for
    b -> a^m b^eps a^n."""

    w: Word
    psi: Endo2
    phi_word: tuple[Endo2, ...]
    delta_params: tuple[int, int, int]

    def recompose(self) -> Endo2:
        out = compose(inner(self.w), self.psi)
        for f in self.phi_word:
            out = compose(out, f)
        m, n, eps = self.delta_params
        return compose(out, delta_endo(m, n, eps))


def _split_delta_image(img_b: Word) -> tuple[int, int, int]:
    """Read a^m b^eps a^n off the image of b, validating the shape."""
    letters = img_b.letters
    b_positions = [i for i, x in enumerate(letters) if abs(x) == 2]
    if len(b_positions) != 1:
        raise InvalidInputError("residual image of b is not of the form a^m b a^n")
    i = b_positions[0]
    eps = 1 if letters[i] > 0 else -1
    head, tail = letters[:i], letters[i + 1:]
    if any(abs(x) != 1 for x in head + tail):
        raise InvalidInputError("residual image of b is not of the form a^m b a^n")
    m = sum(1 if x > 0 else -1 for x in head)
    n = sum(1 if x > 0 else -1 for x in tail)
    return m, n, eps


def factorize_automorphism(e: Endo2) -> AutFactorization:
    """Factor an automorphism as inner x letter x positive-elementary x residual."""
    if not is_automorphism(e):
        raise InvalidInputError(f"{e} is not an automorphism")
    witness = is_primitive(e.image_a)
    assert witness is not None  # the a-image of an automorphism is primitive
    sigma_inv = compose_all(
        [_PHI_INVERSES[f] for f in reversed(witness.factors)]
        + [_psi_inverse(witness.psi), inner(invert(witness.conjugator))]
    )
    residual = compose(sigma_inv, e)
    if residual.image_a != word("a"):
        raise AssertionError("factorization residual does not fix a")
    m, n, eps = _split_delta_image(residual.image_b)
    return AutFactorization(witness.conjugator, witness.psi, witness.factors, (m, n, eps))


def invert_automorphism(e: Endo2) -> Endo2:
    """Inverse automorphism, from the normal-form factorization."""
    f = factorize_automorphism(e)
    m, n, eps = f.delta_params
    # (a^-m b a^-n)^eps is the b-image of the residual's inverse
    core = reduce([-1] * m if m >= 0 else [1] * (-m), 2)
    mid = multiply(multiply(core, word("b")), reduce([-1] * n if n >= 0 else [1] * (-n), 2))
    delta_inv = Endo2(word("a"), mid if eps == 1 else invert(mid))
    out = delta_inv
    for phi in reversed(f.phi_word):
        out = compose(out, _PHI_INVERSES[phi])
    out = compose(out, _psi_inverse(f.psi))
    out = compose(out, inner(invert(f.w)))
    return out


# -- closure grammar -------------------------------------------------------

#: Boundary terminal of the closure grammar; kept outside the word alphabet.
GRAMMAR_MARK = "#"


@dataclass(frozen=True)
class Rule:
    lhs: tuple[str, ...]
    rhs: tuple[str, ...]

    def __str__(self) -> str:
        return f"{' '.join(self.lhs)} -> {' '.join(self.rhs)}"


@dataclass(frozen=True)
class Grammar:
    """Context-sensitive-shaped grammar: non-contracting rules, each with a
    nonterminal on the left."""

    nonterminals: frozenset[str]
    terminals: frozenset[str]
    start: str
    rules: tuple[Rule, ...]

    def __post_init__(self):
        for r in self.rules:
            if len(r.lhs) > len(r.rhs):
                raise InvalidInputError(f"contracting rule {r}")
            if not any(s in self.nonterminals for s in r.lhs):
                raise InvalidInputError(f"terminal-only left side in {r}")


def emit_closure_grammar(endos: Sequence[Endo2], u: Word) -> Grammar:
    """Grammar whose language is mark . C*(u) . mark^2, where C*(u) is the
    closure of the positive word u under the given positive endomorphisms.

    Each endomorphism must send both letters to nonempty positive words.
    """
    for e in endos:
        if not e.is_positive() or not e.image_a or not e.image_b:
            raise InvalidInputError(f"{e} is not a positive 1-free endomorphism")
    if not u.is_positive() or not u.letters:
        raise InvalidInputError("u must be a nonempty positive word")

    alphabet = ("a", "b")
    mark = GRAMMAR_MARK
    f_names = {e: f"F{i}" for i, e in enumerate(endos)}
    u_syms = tuple(str(Word((x,), 2)) for x in u.letters)

    rules: list[Rule] = []
    for e in endos:
        rules.append(Rule(("S",), (mark, f_names[e]) + u_syms + ("R",)))
    rules.append(Rule(("S",), (mark,) + u_syms + (mark, mark)))
    for e in endos:
        for li, sym in enumerate(alphabet, start=1):
            img = tuple(str(Word((x,), 2)) for x in apply_endo(e, Word((li,), 2)).letters)
            rules.append(Rule((f_names[e], sym), img + (f_names[e],)))
        rules.append(Rule((f_names[e], "R"), ("T", "R")))
        rules.append(Rule((f_names[e], "R"), (mark, mark)))
    for sym in alphabet:
        rules.append(Rule((sym, "T"), ("T", sym)))
    for e in endos:
        rules.append(Rule((mark, "T"), (mark, f_names[e])))

    nonterminals = frozenset({"S", "R", "T"} | set(f_names.values()))
    terminals = frozenset(alphabet) | {mark}
    return Grammar(nonterminals, terminals, "S", tuple(rules))


def bounded_language(g: Grammar, max_len: int) -> set[str]:
    """All terminal words of length at most max_len derivable from the start
    symbol.  Terminates because no rule shortens a sentential form."""
    if max_len < 1:
        return set()
    start = (g.start,)
    seen = {start}
    frontier = [start]
    out: set[str] = set()
    while frontier:
        form = frontier.pop()
        if all(s in g.terminals for s in form):
            out.add("".join(form))
            continue
        for rule in g.rules:
            k = len(rule.lhs)
            for i in range(len(form) - k + 1):
                if form[i:i + k] == rule.lhs:
                    new = form[:i] + rule.rhs + form[i + k:]
                    if len(new) <= max_len and new not in seen:
                        seen.add(new)
                        frontier.append(new)
    return out


def grammar_to_text(g: Grammar) -> str:
    """One rule per line, nonterminals bracketed."""

    def fmt(sym: str) -> str:
        return f"[{sym}]" if sym in g.nonterminals else sym

    lines = []
    for r in g.rules:
        lines.append(f"{' '.join(fmt(s) for s in r.lhs)} -> {' '.join(fmt(s) for s in r.rhs)}")
    return "\n".join(lines) + "\n"
