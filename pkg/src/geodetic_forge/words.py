"""Letters of the subdivided alphabets, words over them, and letter orders.

A letter is written ``x_i`` (a base letter, one per generator) or ``x_i_j``
(the j-th sub-edge letter of generator ``x_i`` after subdivision), with
``x`` one of ``a`` (involutions), ``b`` and ``c`` (paired inverses).
Letters of a composed free-product system carry a factor tag: ``f2.b_1_3``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Hashable, Iterable, Mapping, Sequence

from .errors import ParseError

KLASSES = ("a", "b", "c")

# Words are plain tuples of letters; the empty tuple is the empty word.
Word = tuple

EMPTY_TOKEN = "_"

_TOKEN = re.compile(r"^(?:f(\d+)\.)?([abc])_(\d+)(?:_(\d+))?$")


@dataclass(frozen=True)
class Letter:
    klass: str
    i: int
    j: int | None = None
    factor: int | None = None

    def __post_init__(self):
        if self.klass not in KLASSES:
            raise ValueError(f"letter class must be one of {KLASSES}, got {self.klass!r}")
        if self.i < 1 or (self.j is not None and self.j < 1):
            raise ValueError(f"letter indices are 1-based: {self!r}")
        # letters are hashed constantly while rewriting
        object.__setattr__(self, "_hash", hash((self.klass, self.i, self.j, self.factor)))

    def __hash__(self) -> int:
        return self._hash

    @property
    def is_base(self) -> bool:
        return self.j is None

    def sort_key(self) -> tuple:
        return (
            self.factor or 0,
            KLASSES.index(self.klass),
            self.i,
            0 if self.j is None else self.j,
        )

    def with_factor(self, factor: int | None) -> Letter:
        return Letter(self.klass, self.i, self.j, factor)

    def __str__(self) -> str:
        body = f"{self.klass}_{self.i}" if self.j is None else f"{self.klass}_{self.i}_{self.j}"
        return body if self.factor is None else f"f{self.factor}.{body}"

    def __repr__(self) -> str:
        return f"Letter({str(self)!r})"

    @classmethod
    def parse(cls, token: str) -> Letter:
        m = _TOKEN.match(token.strip())
        if not m:
            raise ParseError(f"cannot parse letter token {token!r}")
        factor, klass, i, j = m.groups()
        return cls(
            klass,
            int(i),
            None if j is None else int(j),
            None if factor is None else int(factor),
        )


def parse_word(text: str | Sequence[str]) -> Word:
    """Parse space-separated letter tokens; ``_`` (or nothing) is the empty word."""
    tokens = text.split() if isinstance(text, str) else list(text)
    if tokens == [EMPTY_TOKEN]:
        return ()
    return tuple(Letter.parse(t) for t in tokens)


def format_word(word: Iterable[Hashable]) -> str:
    word = tuple(word)
    if not word:
        return EMPTY_TOKEN
    return " ".join(str(x) for x in word)


def word_inverse(word: Sequence[Hashable], inverse: Mapping) -> Word:
    """Reverse the word and invert each letter."""
    return tuple(inverse[x] for x in reversed(word))


def letter_sort_key(x: Hashable):
    if isinstance(x, Letter):
        return (0, x.sort_key())
    return (1, str(x))


@dataclass(frozen=True)
class LetterOrder:
    """A total order on a finite alphabet, stored as a rank per letter."""

    rank: Mapping[Hashable, int]

    def __post_init__(self):
        if sorted(self.rank.values()) != list(range(len(self.rank))):
            raise ValueError("letter ranks must be a bijection onto 0..len-1")

    @classmethod
    def from_sequence(cls, letters: Iterable[Hashable]) -> LetterOrder:
        letters = list(letters)
        if len(set(letters)) != len(letters):
            raise ValueError("letter order lists a letter twice")
        return cls({x: r for r, x in enumerate(letters)})

    @classmethod
    def canonical(cls, alphabet: Iterable[Hashable]) -> LetterOrder:
        """Class a < b < c, then generator index, then sub-edge index."""
        return cls.from_sequence(sorted(set(alphabet), key=letter_sort_key))

    def letters(self) -> list:
        return sorted(self.rank, key=self.rank.__getitem__)

    def reversed(self) -> LetterOrder:
        return LetterOrder.from_sequence(reversed(self.letters()))

    def word_key(self, word: Sequence[Hashable]) -> tuple:
        """Sort key realising shortlex: length first, then letterwise rank."""
        return (len(word), tuple(self.rank[x] for x in word))

    def min_letter(self, letters: Iterable[Hashable]):
        return min(letters, key=self.rank.__getitem__)
