"""Braid words and the word-level moves used to compare closures.

Letters are signed Artin generators: ``i`` is the positive half-twist of
strands ``(i, i+1)`` and ``-i`` its inverse, 1-based.  Nothing here
normalizes words; every move is explicit.
"""
from __future__ import annotations

import re
from dataclasses import dataclass


class BraidParseError(ValueError):
    """Raised for text that does not follow ``<n>: <l1> <l2> ...``."""


class BraidValidationError(ValueError):
    """Raised when a letter is zero or out of range for the strand count."""

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        letters = tuple(int(x) for x in self.letters)
        object.__setattr__(self, "letters", letters)
        if self.strands < 1:
            raise BraidValidationError(f"strand count must be >= 1, got {self.strands}")
        for idx, letter in enumerate(letters):
            if letter == 0 or abs(letter) >= self.strands:
                raise BraidValidationError(
                    f"letter {letter} at index {idx} is outside +-[1, {self.strands - 1}]",
                    index=idx,
                )

    def __len__(self):
        return len(self.letters)

    def __str__(self):
        return serialize(self)

    @property
    def n_positive(self) -> int:
        return sum(1 for x in self.letters if x > 0)

    @property
    def n_negative(self) -> int:
        return sum(1 for x in self.letters if x < 0)

    def inverse(self) -> "BraidWord":
        return BraidWord(self.strands, tuple(-x for x in reversed(self.letters)))

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        if not isinstance(other, BraidWord):
            return NotImplemented
        if other.strands != self.strands:
            raise BraidValidationError(
                f"cannot multiply braids on {self.strands} and {other.strands} strands"
            )
        return BraidWord(self.strands, self.letters + other.letters)


_HEADER = re.compile(r"^\s*([+-]?\d+)\s*:(.*)$", re.S)


def parse_braid(text: str) -> BraidWord:
    """Parse ``"n: l1 l2 ..."`` (whitespace or comma separated)."""
    m = _HEADER.match(text)
    if m is None:
        raise BraidParseError(f"expected '<strands>: <letters>', got {text!r}")
    strands = int(m.group(1))
    tokens = [tok for tok in re.split(r"[\s,]+", m.group(2).strip()) if tok]
    letters = []
    for pos, tok in enumerate(tokens):
        try:
            letters.append(int(tok))
        except ValueError:
            raise BraidParseError(f"token {tok!r} at index {pos} is not an integer") from None
    return BraidWord(strands, tuple(letters))


def serialize(w: BraidWord) -> str:
    body = " ".join(str(x) for x in w.letters)
    return f"{w.strands}: {body}" if body else f"{w.strands}:"


def writhe(w: BraidWord) -> int:
    return sum(1 if x > 0 else -1 for x in w.letters)


def conjugate(w: BraidWord, g: BraidWord) -> BraidWord:
    """The word ``g * w * g^-1`` (no free reduction)."""
    if g.strands != w.strands:
        raise BraidValidationError(
            f"conjugator has {g.strands} strands, braid has {w.strands}"
        )
    return g * w * g.inverse()


def stabilize(w: BraidWord, sign: int) -> BraidWord:
    """Markov stabilization: add a strand and append ``sign * n``."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign}")
    n = w.strands
    return BraidWord(n + 1, w.letters + (sign * n,))


def annular_compose(outer: BraidWord, inner: BraidWord) -> BraidWord:
    """Place ``inner`` on new strands ``n+1..n+n'``, nested inside ``outer``."""
    n = outer.strands
    shifted = tuple(x + n if x > 0 else x - n for x in inner.letters)
    return BraidWord(n + inner.strands, outer.letters + shifted)

