"""Words in a free group.

A signed letter is a nonzero ``int``: ``+i`` is the ``i``-th generator
(1-based) and ``-i`` its formal inverse.  A word is a tuple of signed
letters.  The :class:`Alphabet` converts between this representation and
the text syntax in which a lowercase symbol is a generator and the
matching uppercase symbol its inverse (``"a b A B"`` is the commutator).
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Tuple

from .errors import InvalidAutomorphism, InvalidLetter, PreconditionViolation

Word = Tuple[int, ...]

_SEPARATORS = re.compile(r"[,\n;]")


@dataclass(frozen=True)
class Alphabet:
    """An ordered set of at least two single-character generator names."""

    letters: Tuple[str, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        object.__setattr__(self, "letters", letters)
        if len(letters) < 2:
            raise ValueError("an alphabet needs at least two letters")
        if len(set(letters)) != len(letters):
            raise ValueError(f"duplicate letters in {letters}")
        for s in letters:
            if len(s) != 1 or not s.isalpha() or not s.islower():
                raise ValueError(f"letters must be single lowercase symbols, got {s!r}")

    @classmethod
    def from_string(cls, text: str) -> "Alphabet":
        """``"a,b,c"`` or ``"abc"``."""
        parts = [p for p in re.split(r"[,\s]+", text.strip()) if p]
        if len(parts) == 1:
            parts = list(parts[0])
        return cls(tuple(parts))

    @property
    def rank(self) -> int:
        return len(self.letters)

    def __len__(self):
        return len(self.letters)

    def positive(self) -> Tuple[int, ...]:
        return tuple(range(1, self.rank + 1))

    def signed(self) -> Tuple[int, ...]:
        """X^± in the fixed order x1, x1^-1, x2, x2^-1, ..."""
        return tuple(s for i in self.positive() for s in (i, -i))

    def symbol(self, letter: int) -> str:
        self.check_letter(letter)
        s = self.letters[abs(letter) - 1]
        return s if letter > 0 else s.upper()

    def letter(self, symbol: str) -> int:
        if symbol in self.letters:
            return self.letters.index(symbol) + 1
        if symbol.islower() or symbol.lower() not in self.letters:
            raise InvalidLetter(symbol)
        return -(self.letters.index(symbol.lower()) + 1)

    def check_letter(self, letter: int) -> None:
        if not isinstance(letter, int) or letter == 0 or abs(letter) > self.rank:
            raise InvalidLetter(letter)

    def check_word(self, w: Iterable[int]) -> None:
        for x in w:
            self.check_letter(x)

    def parse(self, text: str) -> Word:
        """Parse one word; whitespace between symbols is optional."""
        out = []
        for pos, ch in enumerate(text):
            if ch.isspace():
                continue
            try:
                out.append(self.letter(ch))
            except InvalidLetter:
                raise InvalidLetter(ch, pos) from None
        return tuple(out)

    def parse_words(self, text: str, drop_identity: bool = True) -> list:
        """Parse comma/newline separated words, freely reducing each one.

        Identity words are dropped with a warning unless ``drop_identity``
        is false.  Duplicates are kept.
        """
        words = []
        offset = 0
        for chunk in _SEPARATORS.split(text):
            if chunk.strip():
                try:
                    w = free_reduce(self.parse(chunk))
                except InvalidLetter as exc:
                    raise InvalidLetter(exc.symbol, offset + exc.position) from None
                if w or not drop_identity:
                    words.append(w)
                else:
                    warnings.warn(f"dropping identity generator {chunk.strip()!r}")
            offset += len(chunk) + 1
        return words

    def format(self, w: Sequence[int]) -> str:
        return " ".join(self.symbol(x) for x in w)


def inverse(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def free_reduce(w: Iterable[int], alphabet: Optional[Alphabet] = None) -> Word:
    out = []
    for x in w:
        if alphabet is not None:
            alphabet.check_letter(x)
        elif x == 0:
            raise InvalidLetter(x)
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def multiply(*words: Sequence[int]) -> Word:
    return free_reduce(x for w in words for x in w)


def is_reduced(w: Sequence[int]) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def is_cyclically_reduced(w: Sequence[int]) -> bool:
    return is_reduced(w) and (len(w) < 2 or w[0] != -w[-1])


def cyclic_reduce(w: Sequence[int]) -> Tuple[Word, Word]:
    """Return ``(core, conjugator)`` with ``w = conjugator . core . conjugator^-1``."""
    w = free_reduce(w)
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return w[i:j + 1], w[:i]


def is_proper_power(w: Sequence[int]) -> Optional[Tuple[Word, int]]:
    """Return ``(root, k)`` with ``w == root**k`` and ``k >= 2`` maximal, else ``None``.

    A cyclically reduced word is a proper power exactly when its letter
    sequence is periodic with a period properly dividing its length.
    """
    w = tuple(w)
    if not w or not is_cyclically_reduced(w):
        raise PreconditionViolation("is_proper_power needs a nonempty cyclically reduced word")
    n = len(w)
    for p in range(1, n // 2 + 1):
        if n % p == 0 and w[p:] == w[:-p]:
            return w[:p], n // p
    return None


def power(w: Sequence[int], k: int) -> Word:
    if k < 0:
        return power(inverse(w), -k)
    return free_reduce(tuple(w) * k)


def conjugate(w: Sequence[int], c: Sequence[int]) -> Word:
    """``c^-1 w c`` (the exponent notation ``w^c``)."""
    return multiply(inverse(c), w, c)


def apply_aut_to_word(phi, w: Sequence[int]) -> Word:
    """Image of ``w`` under a Whitehead automorphism (or a sequence of them).

    ``phi`` needs an ``image(letter)`` method returning the image word of a
    signed letter, and an optional ``rank`` attribute checked against the
    letters of ``w``.
    """
    steps = getattr(phi, "steps", None)
    if steps is not None:
        for step in steps:
            w = apply_aut_to_word(step, w)
        return tuple(w)
    rank = getattr(phi, "rank", None)
    if rank is not None and any(abs(x) > rank for x in w):
        raise InvalidAutomorphism("word uses letters outside the automorphism's alphabet")
    return free_reduce(y for x in w for y in phi.image(x))
