"""Reduced words over a symmetrized alphabet: elements of a free group.

A letter is a nonzero integer: ``+k`` is the k-th generator (1-based) and
``-k`` is its formal inverse.  A :class:`Word` is a reduced sequence of
letters together with the rank of its alphabet.  Text form uses lowercase
``a, b, c, ...`` for generators and uppercase ``A, B, C, ...`` for their
inverses; the empty word prints as ``1``.

All operations return reduced words; words are immutable values.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import InvalidInputError

__all__ = [
    "Word",
    "make_letter",
    "letter_generator",
    "letter_sign",
    "reduce",
    "word",
    "identity",
    "multiply",
    "invert",
    "conjugate",
    "cyclic_core",
    "cyclic_shifts",
    "exponent_sums",
    "is_positive",
]


def make_letter(generator: int, sign: int) -> int:
    """Encode a (0-based generator index, sign) pair as a signed letter."""
    if generator < 0 or sign not in (1, -1):
        raise InvalidInputError(f"bad letter ({generator}, {sign})")
    return sign * (generator + 1)


def letter_generator(letter: int) -> int:
    """0-based generator index of a signed letter."""
    return abs(letter) - 1


def letter_sign(letter: int) -> int:
    return 1 if letter > 0 else -1


@dataclass(frozen=True)
class Word:
    """A reduced word; ``letters`` holds signed 1-based generator numbers."""

    letters: tuple[int, ...]
    rank: int = 2

    def __post_init__(self):
        if self.rank < 1:
            raise InvalidInputError(f"rank must be >= 1, got {self.rank}")
        prev = 0
        for x in self.letters:
            if x == 0 or abs(x) > self.rank:
                raise InvalidInputError(f"letter {x} outside alphabet of rank {self.rank}")
            if x == -prev:
                raise InvalidInputError("word is not reduced")
            prev = x

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __mul__(self, other: "Word") -> "Word":
        return multiply(self, other)

    def inverse(self) -> "Word":
        return invert(self)

    def is_positive(self) -> bool:
        return all(x > 0 for x in self.letters)

    def is_cyclically_reduced(self) -> bool:
        return len(self.letters) < 2 or self.letters[0] != -self.letters[-1]

    def __str__(self) -> str:
        if not self.letters:
            return "1"
        if self.rank > 26:
            raise InvalidInputError("text form supports rank <= 26 only")
        out = []
        for x in self.letters:
            c = string.ascii_lowercase[abs(x) - 1]
            out.append(c if x > 0 else c.upper())
        return "".join(out)

    @classmethod
    def parse(cls, text: str, rank: int = 2) -> "Word":
        return word(text, rank)


def identity(rank: int = 2) -> Word:
    return Word((), rank)


def reduce(raw: Iterable[int], rank: int) -> Word:
    """Reduce a letter sequence by cancelling adjacent inverse pairs."""
    stack: list[int] = []
    for x in raw:
        if x == 0 or abs(x) > rank:
            raise InvalidInputError(f"letter {x} outside alphabet of rank {rank}")
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(tuple(stack), rank)


def word(text: str, rank: int = 2) -> Word:
    """Parse compact text form, e.g. ``abA`` = a b a^-1; ``1`` or empty = identity."""
    text = text.strip()
    if text in ("", "1"):
        return identity(rank)
    if rank > 26:
        raise InvalidInputError("text form supports rank <= 26 only")
    letters = []
    for ch in text:
        if ch in string.ascii_lowercase:
            v = ord(ch) - ord("a") + 1
        elif ch in string.ascii_uppercase:
            v = -(ord(ch) - ord("A") + 1)
        else:
            raise InvalidInputError(f"bad character {ch!r} in word {text!r}")
        if abs(v) > rank:
            raise InvalidInputError(f"letter {ch!r} outside alphabet of rank {rank}")
        letters.append(v)
    return reduce(letters, rank)


def multiply(u: Word, v: Word) -> Word:
    """Reduced product u.v; ranks must agree."""
    if u.rank != v.rank:
        raise InvalidInputError(f"rank mismatch: {u.rank} vs {v.rank}")
    return reduce(u.letters + v.letters, u.rank)


def invert(u: Word) -> Word:
    return Word(tuple(-x for x in reversed(u.letters)), u.rank)


def conjugate(u: Word, w: Word) -> Word:
    """The word w^-1 u w, reduced."""
    return multiply(invert(w), multiply(u, w))


def cyclic_core(u: Word) -> tuple[Word, Word]:
    """Split u as v^-1 . core . v with core cyclically reduced and v shortest.

    Returns ``(core, v)``.
    """
    letters = list(u.letters)
    peeled: list[int] = []
    while len(letters) >= 2 and letters[0] == -letters[-1]:
        peeled.append(letters.pop())
        letters.pop(0)
    core = Word(tuple(letters), u.rank)
    conj = Word(tuple(reversed(peeled)), u.rank)
    return core, conj


def cyclic_shifts(u: Word) -> Iterator[Word]:
    """All cyclic rotations of a cyclically reduced word (u itself first)."""
    if not u.is_cyclically_reduced():
        raise InvalidInputError("cyclic shifts require a cyclically reduced word")
    n = len(u.letters)
    if n == 0:
        yield u
        return
    for i in range(n):
        yield Word(u.letters[i:] + u.letters[:i], u.rank)


def exponent_sums(u: Word) -> tuple[int, ...]:
    """Abelianized exponent vector, one entry per generator."""
    sums = [0] * u.rank
    for x in u.letters:
        sums[abs(x) - 1] += 1 if x > 0 else -1
    return tuple(sums)


def is_positive(u: Word) -> bool:
    return u.is_positive()


def parse_words(texts: Sequence[str], rank: int = 2) -> list[Word]:
    return [word(t, rank) for t in texts]
