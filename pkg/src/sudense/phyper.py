"""Finite p-hypersolvable groups V_n x|_alpha C and the Q_p oracle.

Elements are pairs (v, a) with v in (Z/pZ)^n and a in Z/mZ, multiplied as
(v, a)(w, b) = (v + alpha^a w, a + b).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

import numpy as np

from .words import SubgroupBasis


class GroupMismatch(ValueError):
    pass


def mult_order(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ValueError("0 has no multiplicative order")
    k, x = 1, a
    while x != 1:
        x = x * a % p
        k += 1
    return k


def elements_of_order(m: int, p: int) -> list[int]:
    return [a for a in range(1, p) if mult_order(a, p) == m]


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out


def rank_mod_p(rows: Iterable[Sequence[int]], p: int) -> int:
    mat = [[x % p for x in r] for r in rows]
    rank, col = 0, 0
    ncols = len(mat[0]) if mat else 0
    while rank < len(mat) and col < ncols:
        piv = next((r for r in range(rank, len(mat)) if mat[r][col]), None)
        if piv is None:
            col += 1
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][col], -1, p)
        mat[rank] = [x * inv % p for x in mat[rank]]
        for r in range(len(mat)):
            if r != rank and mat[r][col]:
                f = mat[r][col]
                mat[r] = [(x - f * y) % p for x, y in zip(mat[r], mat[rank])]
        rank += 1
        col += 1
    return rank


def span_complement_vector(rows: Sequence[Sequence[int]], n: int, p: int) -> tuple[int, ...] | None:
    """A unit vector outside the span of rows, or None if they span (Z/pZ)^n."""
    base = rank_mod_p(rows, p) if rows else 0
    for i in range(n):
        e = tuple(1 if j == i else 0 for j in range(n))
        if rank_mod_p(list(rows) + [e], p) > base:
            return e
    return None


@dataclass(frozen=True)
class PHyperElement:
    v: tuple[int, ...]
    a: int


@dataclass(frozen=True)
class PHyperGroup:
    p: int
    n: int
    alpha: int
    m: int
    faithful: bool = field(default=True, compare=False)

    def __post_init__(self):
        from .modular import is_prime

        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.n < 1 or self.m < 1:
            raise ValueError("need n >= 1 and m >= 1")
        if not 1 <= self.alpha <= self.p - 1:
            raise ValueError("alpha must lie in 1..p-1")
        if pow(self.alpha, self.m, self.p) != 1:
            raise ValueError("alpha^m must be 1 mod p")
        if self.faithful and mult_order(self.alpha, self.p) != self.m:
            raise ValueError(f"alpha = {self.alpha} does not have order {self.m} mod {self.p}")

    @property
    def order(self) -> int:
        return self.p ** self.n * self.m

    # -- elements
    def identity(self) -> PHyperElement:
        return PHyperElement((0,) * self.n, 0)

    def element(self, v: Sequence[int], a: int) -> PHyperElement:
        if len(v) != self.n:
            raise GroupMismatch("vector has wrong dimension")
        return PHyperElement(tuple(x % self.p for x in v), a % self.m)

    def elements(self):
        for v in itertools.product(range(self.p), repeat=self.n):
            for a in range(self.m):
                yield PHyperElement(v, a)

    def contains(self, g: PHyperElement) -> bool:
        return (len(g.v) == self.n and all(0 <= x < self.p for x in g.v)
                and 0 <= g.a < self.m)

    def _check(self, *gs: PHyperElement) -> None:
        for g in gs:
            if not self.contains(g):
                raise GroupMismatch(f"{g} is not an element of {self}")

    @cached_property
    def _powers(self) -> tuple[int, ...]:
        return tuple(pow(self.alpha, k, self.p) for k in range(self.m))

    def _apow(self, a: int) -> int:
        return self._powers[a % self.m]

    # -- arithmetic
    def mul(self, g: PHyperElement, h: PHyperElement) -> PHyperElement:
        self._check(g, h)
        s = self._apow(g.a)
        return PHyperElement(tuple((x + s * y) % self.p for x, y in zip(g.v, h.v)), (g.a + h.a) % self.m)

    def inv(self, g: PHyperElement) -> PHyperElement:
        """(-alpha^{-c} v) x^{-c}."""
        self._check(g)
        s = self._apow(-g.a)
        return PHyperElement(tuple(-s * x % self.p for x in g.v), -g.a % self.m)

    def comm(self, g: PHyperElement, h: PHyperElement) -> PHyperElement:
        """[g, h] = (1 - alpha^{c2}) v + (alpha^{c1} - 1) w, an element of V_n."""
        self._check(g, h)
        s1, s2 = self._apow(g.a), self._apow(h.a)
        return PHyperElement(tuple(((1 - s2) * x + (s1 - 1) * y) % self.p for x, y in zip(g.v, h.v)), 0)

    def ord(self, g: PHyperElement) -> int:
        self._check(g)
        if g.a == 0:
            return 1 if not any(g.v) else self.p
        if not self.faithful:
            return brute_order(self, g)
        return self.m // gcd(self.m, g.a)

    def conj_vec(self, g: PHyperElement, u: Sequence[int]) -> tuple[int, ...]:
        """g u g^-1 = alpha^{c} u for u in V_n."""
        s = self._apow(g.a)
        return tuple(s * x % self.p for x in u)

    def conj_into_complement(self, g: PHyperElement) -> PHyperElement:
        """An h with h g h^-1 = x^{c} (requires c != 0)."""
        if g.a == 0:
            raise ValueError("g lies in V_n")
        s = self._apow(g.a)
        inv = pow((s - 1) % self.p, -1, self.p)
        return PHyperElement(tuple(x * inv % self.p for x in g.v), 0)

    def power(self, g: PHyperElement, k: int) -> PHyperElement:
        out = self.identity()
        base = g if k >= 0 else self.inv(g)
        for _ in range(abs(k)):
            out = self.mul(out, base)
        return out

    # -- integer codes (for tables and closures)
    def encode(self, g: PHyperElement) -> int:
        code = 0
        for x in g.v:
            code = code * self.p + x
        return code * self.m + g.a

    def decode(self, code: int) -> PHyperElement:
        a = code % self.m
        code //= self.m
        v = []
        for _ in range(self.n):
            v.append(code % self.p)
            code //= self.p
        return PHyperElement(tuple(reversed(v)), a)

    @cached_property
    def table(self) -> list[list[int]]:
        els = list(self.elements())
        assert [self.encode(g) for g in els] == list(range(len(els)))
        return [[self.encode(self.mul(g, h)) for h in els] for g in els]

    def closure(self, gens: Iterable[PHyperElement]) -> set[int]:
        """Codes of the subgroup generated by gens (BFS on right multiplication)."""
        gens = list(gens)
        if self.order <= 256 or "table" in self.__dict__:
            return _closure_codes(self.table, [0], sorted({self.encode(g) for g in gens}))
        seen = {0}
        frontier = [self.identity()]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.mul(x, g)
                    c = self.encode(y)
                    if c not in seen:
                        seen.add(c)
                        nxt.append(y)
            frontier = nxt
        return seen

    def generates(self, gens: Sequence[PHyperElement]) -> bool:
        """Structural test, valid for any finite generating candidate set.

        The a-parts must generate Z/mZ and the pairwise commutators must span
        V_n: [G, G] = V_n and every subspace of V_n is normal, so the normal
        closure of the generator commutators is just their span.
        """
        if self.m == 1:
            return bool(gens) and rank_mod_p([g.v for g in gens], self.p) == self.n
        if self.alpha == 1:
            raise ValueError("structural test needs a nontrivial action")
        g_all = self.m
        for g in gens:
            g_all = gcd(g_all, g.a)
        if g_all != 1:
            return False
        comms = [self.comm(g, h).v for g, h in itertools.combinations(gens, 2)]
        return bool(comms) and rank_mod_p(comms, self.p) == self.n

    def excluded_element(self, gens: Sequence[PHyperElement]) -> PHyperElement | None:
        """Some element outside <gens>, or None if gens generate G."""
        if self.order <= 20000:
            sub = self.closure(gens)
            if len(sub) == self.order:
                return None
            return self.decode(min(set(range(self.order)) - sub))
        g_all = self.m
        for g in gens:
            g_all = gcd(g_all, g.a)
        if g_all != 1:
            return PHyperElement((0,) * self.n, 1)
        if self.m == 1:
            vec = span_complement_vector([g.v for g in gens], self.n, self.p)
        else:
            comms = [self.comm(g, h).v for g, h in itertools.combinations(gens, 2)]
            vec = span_complement_vector(comms, self.n, self.p)
        return None if vec is None else PHyperElement(vec, 0)


def is_generating(G: PHyperGroup, Z: Sequence[PHyperElement]) -> bool:
    """Generation criterion for d = n + 1 elements of a nonabelian V_{d-1} x| C."""
    if G.m == 1:
        raise ValueError("criterion needs a nontrivial C; use a span test instead")
    if len(Z) != G.n + 1:
        raise ValueError(f"need exactly {G.n + 1} elements")
    G._check(*Z)
    c = G.m
    orders = [c // gcd(c, g.a) for g in Z if g.a != 0]
    if lcm(*orders) != c:
        return False
    p, pw = G.p, G._powers
    # [g, h] = (1 - alpha^{c_h}) v_g + (alpha^{c_g} - 1) v_h
    comms = [[((1 - pw[h.a]) * x + (pw[g.a] - 1) * y) % p for x, y in zip(g.v, h.v)]
             for g, h in itertools.combinations(Z, 2)]
    return rank_mod_p(comms, p) == G.n


def min_generators(G: PHyperGroup) -> int:
    return G.n if G.m == 1 else G.n + 1


# ---------------------------------------------------------------- brute force

def brute_order(G: PHyperGroup, g: PHyperElement) -> int:
    k, x = 1, g
    e = G.identity()
    while x != e:
        x = G.mul(x, g)
        k += 1
    return k


def brute_inverse(G: PHyperGroup, g: PHyperElement) -> PHyperElement:
    e = G.identity()
    return next(h for h in G.elements() if G.mul(g, h) == e)


def brute_min_generators(G: PHyperGroup) -> int:
    """Smallest k such that some k elements generate G, by exhausting subgroup levels."""
    T = G.table
    order = G.order
    if order == 1:
        return 0
    level: dict[frozenset, tuple[int, ...]] = {frozenset([0]): ()}
    k = 0
    while True:
        k += 1
        nxt: dict[frozenset, tuple[int, ...]] = {}
        for K, gens in level.items():
            done = set(K)
            for g in range(order):
                if g in done:
                    continue
                done.update(T[h][g] for h in K)  # right coset Kg gives the same subgroup
                new = gens + (g,)
                L = _closure_codes(T, K, new)
                if len(L) == order:
                    return k
                fl = frozenset(L)
                if fl not in nxt:
                    nxt[fl] = new
        level = nxt


def _closure_codes(T: list[list[int]], start: Iterable[int], gens: Sequence[int]) -> set[int]:
    seen = set(start)
    frontier = list(seen)
    while frontier:
        nxt = []
        for x in frontier:
            row = T[x]
            for g in gens:
                y = row[g]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def groups_up_to(max_order: int, all_alphas: bool = False) -> list[PHyperGroup]:
    """Every p-hypersolvable group V_n x| C with |G| <= max_order (one alpha per C unless all_alphas)."""
    from .modular import is_prime

    out = []
    for p in range(2, max_order + 1):
        if not is_prime(p):
            continue
        n = 1
        while p ** n <= max_order:
            for m in range(1, p):
                if (p - 1) % m or p ** n * m > max_order:
                    continue
                alphas = elements_of_order(m, p)
                for alpha in (alphas if all_alphas else alphas[:1]):
                    out.append(PHyperGroup(p, n, alpha, m))
            n += 1
    return out


# ---------------------------------------------------------------- Q_p oracle

def _semidirect_tables(p: int, alpha: int, m: int):
    """Multiplication and inverse tables of Z/pZ x|_alpha Z/mZ; code = v*m + a."""
    size = p * m
    codes = np.arange(size)
    v, a = codes // m, codes % m
    apow = np.array([pow(alpha, k, p) for k in range(m)], dtype=np.int64)
    tv = (v[:, None] + apow[a][:, None] * v[None, :]) % p
    ta = (a[:, None] + a[None, :]) % m
    table = (tv * m + ta).astype(np.int32)
    inv = np.array([int(np.nonzero(table[g] == 0)[0][0]) for g in range(size)], dtype=np.int32)
    return table, inv


def _whole_group_mask(imgs: list[np.ndarray], table, inv, p: int, m: int) -> np.ndarray:
    """Vectorized test that the listed elements generate Z/pZ x| Z/mZ.

    For m = 1 it suffices that some element is nonzero. For m > 1, a subgroup
    K maps onto C exactly when the a-parts generate Z/mZ; then K meets V in 0
    or V, and meets it in V exactly when K is nonabelian, i.e. when two of the
    generators fail to commute.
    """
    if m == 1:
        return np.any(np.stack(imgs) != 0, axis=0)
    g_all = np.full(imgs[0].shape, m, dtype=np.int64)
    for x in imgs:
        g_all = np.gcd(g_all, x % m)
    onto_c = g_all == 1
    noncomm = np.zeros(imgs[0].shape, dtype=bool)
    for x, y in itertools.combinations(imgs, 2):
        c = table[table[x, y], table[inv[x], inv[y]]]
        noncomm |= c != 0
    return onto_c & noncomm


def _word_images(basis: SubgroupBasis, gens: np.ndarray, table, inv) -> list[np.ndarray]:
    out = []
    for w in basis.words:
        img = np.zeros(gens.shape[0], dtype=np.int32)
        for x in w.syllables:
            g = gens[:, abs(x) - 1]
            img = table[img, g if x > 0 else inv[g]]
        out.append(img)
    return out


def _assignments(size: int, d: int, chunk: int):
    total = size ** d
    for start in range(0, total, chunk):
        idx = np.arange(start, min(total, start + chunk), dtype=np.int64)
        cols = []
        for _ in range(d):
            cols.append(idx % size)
            idx = idx // size
        yield np.stack(cols[::-1], axis=1).astype(np.int32)


def qp_counterexample(basis: SubgroupBasis, p: int, all_alphas: bool = False,
                      chunk: int = 1 << 20) -> tuple[int, int, tuple[int, ...]] | None:
    """A surjection F -> Z/pZ x|_alpha Z/mZ with proper image of H, as (alpha, m, generator codes)."""
    from .modular import is_prime

    if p < 3 or not is_prime(p):
        raise ValueError("the oracle is defined for odd primes")
    d = basis.rank
    for m in range(1, p):
        if (p - 1) % m:
            continue
        alphas = elements_of_order(m, p)
        for alpha in (alphas if all_alphas else alphas[:1]):
            table, inv = _semidirect_tables(p, alpha, m)
            for gens in _assignments(p * m, d, chunk):
                cols = [gens[:, i] for i in range(d)]
                surj = _whole_group_mask(cols, table, inv, p, m)
                if not surj.any():
                    continue
                imgs = _word_images(basis, gens, table, inv)
                bad = surj & ~_whole_group_mask(imgs, table, inv, p, m)
                hit = np.nonzero(bad)[0]
                if hit.size:
                    return alpha, m, tuple(int(x) for x in gens[hit[0]])
    return None


def qp_oracle(basis: SubgroupBasis, p: int, all_alphas: bool = False) -> bool:
    """Does H satisfy Q_p(H, F)?  Exhaustive over all maps onto Z/pZ x| C."""
    return qp_counterexample(basis, p, all_alphas) is None


def qp_oracle_closure(basis: SubgroupBasis, p: int) -> bool:
    """Reference version of qp_oracle using explicit subgroup closures (slow)."""
    d = basis.rank
    for m in range(1, p):
        if (p - 1) % m:
            continue
        G = PHyperGroup(p, 1, elements_of_order(m, p)[0], m)
        T = G.table
        inv = [next(h for h in range(G.order) if T[g][h] == 0) for g in range(G.order)]
        for gens in itertools.product(range(G.order), repeat=d):
            if len(_closure_codes(T, [0], gens)) != G.order:
                continue
            imgs = []
            for w in basis.words:
                x = 0
                for s in w.syllables:
                    g = gens[abs(s) - 1]
                    x = T[x][g if s > 0 else inv[g]]
                imgs.append(x)
            if len(_closure_codes(T, [0], imgs)) != G.order:
                return False
    return True
