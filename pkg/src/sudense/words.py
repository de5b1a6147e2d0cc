"""Reduced words in a free group of finite rank.

A word is stored as a tuple of nonzero signed generator indices: ``3`` is
``x3`` and ``-3`` is ``x3^-1``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


class WordError(ValueError):
    pass


class ParseError(WordError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line else ""
        super().__init__(where + msg)


def _free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    stack: list[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return tuple(stack)


@dataclass(frozen=True)
class Word:
    rank: int
    syllables: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 1:
            raise WordError(f"rank must be >= 1, got {self.rank}")
        for x in self.syllables:
            if x == 0 or abs(x) > self.rank:
                raise WordError(f"generator index {abs(x)} out of range 1..{self.rank}")
        red = _free_reduce(self.syllables)
        if red != self.syllables:
            object.__setattr__(self, "syllables", red)

    @property
    def letters(self) -> list[tuple[int, int]]:
        """(generator index, sign) pairs."""
        return [(abs(x), 1 if x > 0 else -1) for x in self.syllables]

    def __len__(self) -> int:
        return len(self.syllables)

    def __iter__(self):
        return iter(self.syllables)

    def __mul__(self, other: Word) -> Word:
        return multiply(self, other)

    def __invert__(self) -> Word:
        return invert(self)

    def __pow__(self, k: int) -> Word:
        base = self if k >= 0 else invert(self)
        return Word(self.rank, base.syllables * abs(k))

    def __str__(self) -> str:
        return format_word(self)

    def exponent_sum(self) -> tuple[int, ...]:
        """Image in the abelianization Z^d."""
        v = [0] * self.rank
        for x in self.syllables:
            v[abs(x) - 1] += 1 if x > 0 else -1
        return tuple(v)


def reduce(rank: int, raw: Sequence[tuple[int, int]] | Sequence[int]) -> Word:
    """Freely reduce a sequence of letters (either signed ints or (index, sign) pairs)."""
    letters = []
    for item in raw:
        if isinstance(item, tuple):
            i, s = item
            if s not in (1, -1):
                raise WordError(f"sign must be +1 or -1, got {s}")
            letters.append(i * s)
        else:
            letters.append(item)
    return Word(rank, tuple(letters))


def generator(i: int, rank: int) -> Word:
    return Word(rank, (i,))


def identity(rank: int) -> Word:
    return Word(rank, ())


def _check_rank(u: Word, v: Word) -> None:
    if u.rank != v.rank:
        raise WordError(f"rank mismatch: {u.rank} vs {v.rank}")


def multiply(u: Word, v: Word) -> Word:
    _check_rank(u, v)
    return Word(u.rank, u.syllables + v.syllables)


def invert(u: Word) -> Word:
    return Word(u.rank, tuple(-x for x in reversed(u.syllables)))


def commutator(u: Word, v: Word) -> Word:
    """[u, v] = u v u^-1 v^-1."""
    _check_rank(u, v)
    return Word(u.rank, u.syllables + v.syllables + invert(u).syllables + invert(v).syllables)


def tau(t: int, w: Word) -> Word:
    """Apply the automorphism swapping x_t and x_d (identity when t == d)."""
    d = w.rank
    if not 1 <= t <= d:
        raise WordError(f"tau index {t} out of range 1..{d}")
    if t == d:
        return w

    def swap(x: int) -> int:
        i = abs(x)
        j = d if i == t else t if i == d else i
        return j if x > 0 else -j

    return Word(d, tuple(swap(x) for x in w.syllables))


def cyclic_combine(c: int, gens: Sequence[int]) -> list[int]:
    """Exponents r_1..r_{m-1} such that g_m + sum r_i g_i generates Z/cZ.

    Follows the inductive construction: strip the subgroup <g_1>, solve the
    problem in the quotient, then lift by searching the coset of <g_1>.
    """
    if c < 1:
        raise WordError("modulus must be positive")
    gens = [g % c for g in gens]
    if not gens:
        raise WordError("need at least one generator")
    g_all = c
    for g in gens:
        g_all = gcd(g_all, g)
    if g_all != 1:
        raise WordError(f"residues {gens} do not generate Z/{c}Z")
    return _combine(c, gens)


def _combine(c: int, gens: list[int]) -> list[int]:
    if len(gens) == 1:
        return []
    # The quotient of Z/cZ by <g_1> is Z/kZ with k = gcd(c, g_1).
    k = gcd(c, gens[0])
    rest = _combine(k, gens[1:]) if k > 1 else [0] * (len(gens) - 2)
    base = (gens[-1] + sum(r * g for r, g in zip(rest, gens[1:-1]))) % c
    for r1 in range(c):
        if gcd((base + r1 * gens[0]) % c, c) == 1:
            return [r1] + rest
    raise AssertionError("no lift found")  # excluded by Gaschuetz


def primitive_lift(images: Sequence[int], c: int) -> Word:
    """Primitive word x_d * prod x_i^{r_i} whose image generates Z/cZ.

    ``images[i]`` is the image of x_{i+1} in Z/cZ.
    """
    d = len(images)
    if d == 0:
        raise WordError("rank must be >= 1")
    r = cyclic_combine(c, images)
    letters: list[int] = [d]
    for i, ri in enumerate(r, start=1):
        letters.extend([i if ri > 0 else -i] * abs(ri))
    return Word(d, tuple(letters))


def evaluate_abelian(w: Word, images: Sequence[int], c: int) -> int:
    return sum(k * g for k, g in zip(w.exponent_sum(), images)) % c


def shorten_generators(words: Sequence[Word]) -> tuple[Word, ...]:
    """A generating set of the same subgroup with no length-reducing Nielsen move left.

    Repeatedly replaces w_i by w_j^{+-1} w_i or w_i w_j^{+-1} when that is
    shorter, and drops words that become trivial or repeat another word up
    to inversion. Total length strictly drops, so this terminates.
    """
    ws = [w for w in words if len(w)]
    changed = True
    while changed:
        changed = False
        for i in range(len(ws)):
            for j in range(len(ws)):
                if i == j or not len(ws[i]) or not len(ws[j]):
                    continue
                u, v = ws[i], ws[j]
                for cand in (multiply(v, u), multiply(invert(v), u), multiply(u, v), multiply(u, invert(v))):
                    if len(cand) < len(ws[i]):
                        ws[i] = cand
                        changed = True
        kept: list[Word] = []
        for w in ws:
            if len(w) and w not in kept and invert(w) not in kept:
                kept.append(w)
        changed = changed or len(kept) != len(ws)
        ws = kept
    return tuple(ws)


# ---------------------------------------------------------------- text syntax

_TOKEN = re.compile(r"\s*(?:x(\d+)(?:\^(-?\d+))?|([a-zA-Z]))")


def parse_word(text: str, rank: int, line: int = 0) -> Word:
    """Parse ``x1 x2^-1 x3`` tokens and/or compact letters ``abA``; ``1`` is the identity."""
    letters: list[int] = []
    pos = 0
    text = text.rstrip()
    if text.strip() == "1":
        return Word(rank, ())
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            while text[pos].isspace():
                pos += 1
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if m.group(1) is not None:
            i = int(m.group(1))
            e = int(m.group(2)) if m.group(2) is not None else 1
        else:
            ch = m.group(3)
            i = ord(ch.lower()) - ord("a") + 1
            e = 1 if ch.islower() else -1
        if not 1 <= i <= rank:
            col = m.start(1) - 1 if m.group(1) is not None else m.start(3)
            raise ParseError(f"generator x{i} outside rank {rank}", line, col + 1)
        letters.extend([i if e > 0 else -i] * abs(e))
        pos = m.end()
    return Word(rank, tuple(letters))


def format_word(w: Word) -> str:
    if not w.syllables:
        return "1"
    return " ".join(f"x{x}" if x > 0 else f"x{-x}^-1" for x in w.syllables)


@dataclass(frozen=True)
class SubgroupBasis:
    rank: int
    words: tuple[Word, ...]

    def __post_init__(self):
        if not self.words:
            raise WordError("a subgroup basis needs at least one word")
        for w in self.words:
            if w.rank != self.rank:
                raise WordError("word rank differs from basis rank")
            if len(w) == 0:
                raise WordError("empty words are not allowed in a basis")

    @property
    def e(self) -> int:
        return len(self.words)

    def tau(self, t: int) -> SubgroupBasis:
        return SubgroupBasis(self.rank, tuple(tau(t, w) for w in self.words))

    @classmethod
    def full(cls, rank: int) -> SubgroupBasis:
        return cls(rank, tuple(generator(i, rank) for i in range(1, rank + 1)))

    @classmethod
    def from_strings(cls, rank: int, words: Iterable[str]) -> SubgroupBasis:
        return cls(rank, tuple(parse_word(s, rank) for s in words))


def parse_basis(text: str) -> SubgroupBasis:
    """Parse a word file: ``rank d`` header then one word per line; ``#`` comments."""
    rank = None
    words: list[Word] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if rank is None:
            m = re.fullmatch(r"\s*rank\s+(\d+)\s*", line)
            if m is None:
                raise ParseError("expected 'rank d' header", lineno, 1)
            rank = int(m.group(1))
            if rank < 1:
                raise ParseError("rank must be >= 1", lineno, 1)
            continue
        w = parse_word(line, rank, lineno)
        if len(w) == 0:
            raise ParseError("word reduces to the identity", lineno, 1)
        words.append(w)
    if rank is None:
        raise ParseError("missing 'rank d' header")
    if not words:
        raise ParseError("no words given")
    return SubgroupBasis(rank, tuple(words))


def format_basis(basis: SubgroupBasis) -> str:
    return "\n".join([f"rank {basis.rank}"] + [format_word(w) for w in basis.words]) + "\n"
