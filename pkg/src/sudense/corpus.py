"""Seeded test corpora of subgroup bases."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass
from typing import Sequence

from .words import SubgroupBasis, Word, format_word, parse_word

MAX_LEN = 6
FAMILIES = ("random", "abdense", "preimage")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    family: str
    basis: SubgroupBasis

    def to_json(self) -> dict:
        return {"name": self.name, "family": self.family, "rank": self.basis.rank,
                "words": [format_word(w) for w in self.basis.words]}

    @classmethod
    def from_json(cls, obj: dict) -> CorpusEntry:
        d = int(obj["rank"])
        words = tuple(parse_word(s, d) for s in obj["words"])
        return cls(obj["name"], obj.get("family", "random"), SubgroupBasis(d, words))


def random_word(rng: random.Random, d: int, max_len: int = MAX_LEN) -> Word:
    letters = [i for i in range(-d, d + 1) if i]
    while True:
        w = Word(d, tuple(rng.choice(letters) for _ in range(rng.randint(1, max_len))))
        if len(w):
            return w


def random_basis(rng: random.Random, d: int, e: int, max_len: int = MAX_LEN) -> SubgroupBasis:
    return SubgroupBasis(d, tuple(random_word(rng, d, max_len) for _ in range(e)))


def schreier_basis(d: int, perms: Sequence[Sequence[int]]) -> list[Word]:
    """Free generators of the stabilizer of point 0 under x_i -> perms[i-1].

    The action is on the right: point c moves to perms[i-1][c] under x_i.
    Uses a breadth-first Schreier transversal, so words stay short.
    """
    n = len(perms[0])
    inv = [[0] * n for _ in perms]
    for i, pm in enumerate(perms):
        for c, img in enumerate(pm):
            inv[i][img] = c
    rep: dict[int, tuple[int, ...]] = {0: ()}
    tree: set = set()
    queue = [0]
    for c in queue:
        for i in range(d):
            for sign, table in ((1, perms[i]), (-1, inv[i])):
                nxt = table[c]
                if nxt not in rep:
                    rep[nxt] = rep[c] + (sign * (i + 1),)
                    tree.add((c, sign * (i + 1)))
                    tree.add((nxt, -sign * (i + 1)))
                    queue.append(nxt)
    if len(rep) != n:
        raise ValueError("the action is not transitive")
    out = []
    for c in range(n):
        for i in range(d):
            if (c, i + 1) in tree:
                continue
            nxt = perms[i][c]
            raw = rep[c] + (i + 1,) + tuple(-x for x in reversed(rep[nxt]))
            w = Word(d, raw)
            if len(w):
                out.append(w)
    return out


def _s3_coset_actions() -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Pairs of permutations of 3 points generating S3 (x1, x2 images)."""
    perms = list(itertools.permutations(range(3)))
    pairs = []
    for a, b in itertools.product(perms, repeat=2):
        seen = {tuple(range(3))}
        frontier = [tuple(range(3))]
        while frontier:
            nxt = []
            for g in frontier:
                for h in (a, b):
                    gh = tuple(h[g[k]] for k in range(3))
                    if gh not in seen:
                        seen.add(gh)
                        nxt.append(gh)
            frontier = nxt
        if len(seen) == 6:
            pairs.append((a, b))
    return pairs


def preimage_bases(max_len: int = MAX_LEN, max_e: int = 4) -> list[SubgroupBasis]:
    """Point stabilizers of S3 acting on 3 points, pulled back to F_2.

    Each is an index-3 subgroup that is Ab-dense but misses the quotient
    Z/3 x| Z/2, so it is not Su-dense.
    """
    out = []
    for a, b in _s3_coset_actions():
        words = schreier_basis(2, [a, b])
        if len(words) <= max_e and all(len(w) <= max_len for w in words):
            out.append(SubgroupBasis(2, tuple(words)))
    return out


def generate_corpus(count: int = 200, seed: int = 0) -> list[CorpusEntry]:
    """A reproducible mix of random, Ab-dense and non-dense-by-construction bases.

    Ranks are 2 or 3, basis sizes 2 to 4, and words have length at most 6.
    """
    from .decider import ab_dense

    rng = random.Random(seed)
    pre = preimage_bases()
    out: list[CorpusEntry] = []
    n_pre = min(len(pre), max(1, count // 12))
    for k in rng.sample(range(len(pre)), n_pre):
        out.append(CorpusEntry("", "preimage", pre[k]))
    while len(out) < count:
        d = rng.choice((2, 3))
        if rng.random() < 0.3:
            e = rng.randint(2, 4)
            out.append(CorpusEntry("", "random", random_basis(rng, d, e)))
            continue
        e = rng.randint(d, 4)
        while True:
            b = random_basis(rng, d, e)
            if ab_dense(b)[0]:
                break
        out.append(CorpusEntry("", "abdense", b))
    rng.shuffle(out)
    return [CorpusEntry(f"c{k:04d}", e.family, e.basis) for k, e in enumerate(out)]


def dump_corpus(entries: Sequence[CorpusEntry]) -> str:
    return json.dumps({"schema": 1, "entries": [e.to_json() for e in entries]}, indent=1)


def load_corpus(text: str) -> list[CorpusEntry]:
    obj = json.loads(text)
    if obj.get("schema") != 1:
        raise ValueError("unsupported corpus schema")
    return [CorpusEntry.from_json(e) for e in obj["entries"]]
