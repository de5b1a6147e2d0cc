"""Finite-field side: Q-tuples, the maps phi_{p,Q} / Phi_{p,Q}, factoring, and root search mod p."""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass

import numpy as np

from .laurent import LaurentPoly
from .magnus import MagnusElement, PolySystem


class BudgetExceeded(RuntimeError):
    pass


# ---------------------------------------------------------------- primality

_SMALL_PRIMES = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47]
# First 13 prime bases are deterministic below this bound (Sorenson & Webster).
_MR_DET_BOUND = 3317044064679887385961981


def _strong_probable_prime(n: int, a: int) -> bool:
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x in (1, n - 1):
        return True
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return True
    return False


def _jacobi(a: int, n: int) -> int:
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def _strong_lucas(n: int) -> bool:
    """Strong Lucas probable-prime test with Selfridge parameters."""
    r = math.isqrt(n)
    if r * r == n:
        return False
    D = 5
    while True:
        j = _jacobi(D, n)
        if j == -1:
            break
        if j == 0 and abs(D) != n:
            return False
        D = -D - 2 if D > 0 else -D + 2
    P, Q = 1, (1 - D) // 4
    d, s = n + 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    inv2 = pow(2, -1, n)
    U, V, Qk = 0, 2, 1  # U_0, V_0, Q^0
    # binary ladder from the top bit of d
    for bit in bin(d)[2:]:
        U, V = U * V % n, (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if bit == "1":
            U, V = (P * U + V) * inv2 % n, (D * U + P * V) * inv2 % n
            Qk = Qk * Q % n
    if U == 0 or V == 0:
        return True
    for _ in range(s - 1):
        V = (V * V - 2 * Qk) % n
        Qk = Qk * Qk % n
        if V == 0:
            return True
    return False


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for q in _SMALL_PRIMES:
        if n % q == 0:
            return n == q
    if n < _MR_DET_BOUND:
        return all(_strong_probable_prime(n, a) for a in _SMALL_PRIMES[:13])
    return _strong_probable_prime(n, 2) and _strong_lucas(n)


def odd_primes(start: int = 3):
    p = max(3, start)
    if p % 2 == 0:
        p += 1
    while True:
        if is_prime(p):
            yield p
        p += 2


# ---------------------------------------------------------------- factoring

def _pollard_brent(n: int, rng: random.Random, deadline: float | None) -> int:
    if n % 2 == 0:
        return 2
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g, r, q = 1, 1, 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                if deadline is not None and time.monotonic() > deadline:
                    raise BudgetExceeded(f"factorization of {n} exceeded its time budget")
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(a: int, timeout: float | None = None, trial_bound: int = 10000) -> list[int]:
    """Prime factors of |a| with multiplicity, ascending."""
    n = abs(a)
    if n < 2:
        raise ValueError("factorize needs |a| >= 2")
    deadline = None if timeout is None else time.monotonic() + timeout
    out: list[int] = []
    q = 2
    while q <= trial_bound and q * q <= n:
        while n % q == 0:
            out.append(q)
            n //= q
        q += 1 if q == 2 else 2
    rng = random.Random(n)
    stack = [n] if n > 1 else []
    while stack:
        x = stack.pop()
        if is_prime(x):
            out.append(x)
            continue
        f = _pollard_brent(x, rng, deadline)
        stack += [f, x // f]
    return sorted(out)


def prime_divisors(a: int, timeout: float | None = None) -> list[int]:
    return sorted(set(factorize(a, timeout))) if abs(a) >= 2 else []


# ---------------------------------------------------------------- Q-tuples

@dataclass(frozen=True)
class QTuple:
    p: int
    c: tuple[int, ...]
    alpha: int
    u: tuple[int, ...]
    m: int

    def __post_init__(self):
        p = self.p
        if p < 3 or not is_prime(p):
            raise ValueError(f"p = {p} must be an odd prime")
        if len(self.u) != len(self.c) - 1:
            raise ValueError("u must have length d - 1")
        if not all(0 <= ci <= p - 2 for ci in self.c):
            raise ValueError("c entries must lie in 0..p-2")
        if not all(0 <= uj <= p - 1 for uj in self.u):
            raise ValueError("u entries must lie in 0..p-1")
        if not (2 <= self.alpha <= p - 1 and 2 <= self.m <= p - 1):
            raise ValueError("alpha and m must lie in 2..p-1")
        if pow(self.alpha, self.m, p) != 1:
            raise ValueError("alpha^m must be 1 mod p")

    @property
    def d(self) -> int:
        return len(self.c)


def phi_pq(poly: LaurentPoly, Q: QTuple) -> int:
    """alpha_i -> alpha^{c_i}, beta_j -> u_j, reduced mod p."""
    if poly.uses_gamma():
        raise ValueError("phi_{p,Q} is not defined on gamma indeterminates")
    p = Q.p
    avals = [pow(Q.alpha, ci, p) for ci in Q.c]
    return poly.eval_mod_p(p, avals, Q.u)


def phi_group(x: MagnusElement, Q: QTuple):
    """Image of x in V_{d-1} x|_alpha Z/mZ."""
    from .phyper import PHyperElement, PHyperGroup

    G = PHyperGroup(Q.p, Q.d - 1, Q.alpha, Q.m, faithful=False)
    v = tuple(phi_pq(q, Q) for q in x.poly)
    a = sum(ci * ki for ci, ki in zip(Q.c, x.abel)) % Q.m
    return G, PHyperElement(v, a)


# ---------------------------------------------------------------- root search

@dataclass(frozen=True)
class RootAssignment:
    p: int
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    gamma: tuple[int, int, int]

    def __post_init__(self):
        if any(a % self.p == 0 for a in self.alpha):
            raise ValueError("alpha values must be nonzero mod p")

    def to_json(self) -> dict:
        return {"p": self.p, "alpha": list(self.alpha), "beta": list(self.beta), "gamma": list(self.gamma)}


def check_root(system: PolySystem, root: RootAssignment) -> bool:
    """Evaluate every polynomial of the system at the root (independent of the search)."""
    return all(q.eval_mod_p(root.p, root.alpha, root.beta, root.gamma) == 0 for q in system.polys)


class _GridPoly:
    """A polynomial in alpha/beta prepared for vectorized evaluation mod p."""

    def __init__(self, poly: LaurentPoly, p: int):
        d = poly.d
        nfree = 2 * d - 1
        self.terms = []
        for m, c in poly.terms.items():
            if any(m[nfree:]):
                raise ValueError("gamma exponents are not allowed here")
            self.terms.append((c % p, [(i, e) for i, e in enumerate(m[:nfree]) if e]))
        self.maxdeg = max((e for _, f in self.terms for _, e in f), default=0)

    def evaluate(self, coords: list, powtab: np.ndarray, p: int, size: int) -> np.ndarray:
        acc = np.zeros(size, dtype=np.int64)
        for c, factors in self.terms:
            if not c:
                continue
            t = np.full(size, c, dtype=np.int64)
            for i, e in factors:
                t = t * powtab[coords[i], e] % p
            acc += t
            acc %= p
        return acc


def _grid_chunks(p: int, d: int, chunk: int):
    """Yield coordinate arrays for the lexicographic grid (alpha in 1..p-1, beta in 0..p-1)."""
    ranges = [np.arange(1, p)] * d + [np.arange(p)] * (d - 1)
    sizes = [len(r) for r in ranges]
    k = 0
    while k < len(sizes) and math.prod(sizes[k:]) > chunk:
        k += 1
    tail = ranges[k:]
    tail_size = math.prod(sizes[k:])
    if tail:
        grids = np.meshgrid(*tail, indexing="ij")
        tail_cols = [g.reshape(-1) for g in grids]
    else:
        tail_cols = []
    for prefix in itertools.product(*ranges[:k]):
        cols = [np.full(tail_size, int(v), dtype=np.int64) for v in prefix] + tail_cols
        yield cols, tail_size


def search_space_size(d: int, p: int) -> int:
    return (p - 1) ** d * p ** (d - 1)


def root_search(system: PolySystem, p: int, max_points: int | None = None,
                chunk: int = 1 << 18) -> RootAssignment | None:
    """First common root mod p in lexicographic (alpha, beta) order, or None.

    gamma_2 and gamma_3 are forced by alpha; gamma_1 is forced by the scaled
    det(Y0); so only alpha and beta are enumerated.
    """
    if p == 2:
        raise ValueError("p = 2 is never searched")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    d = system.d
    total = search_space_size(d, p)
    if max_points is not None and total > max_points:
        raise BudgetExceeded(f"root search mod {p} needs {total} points (> {max_points})")
    A = _GridPoly(system.scaled_y0(), p)
    minors = [_GridPoly(q, p) for q in system.minor_polys()]
    maxdeg = max([A.maxdeg] + [g.maxdeg for g in minors] + [1])
    powtab = np.ones((p, maxdeg + 1), dtype=np.int64)
    base = np.arange(p, dtype=np.int64)
    for e in range(1, maxdeg + 1):
        powtab[:, e] = powtab[:, e - 1] * base % p
    for cols, size in _grid_chunks(p, d, chunk):
        g2 = (sum(cols[:d]) - d) % p
        keep = np.nonzero(g2)[0]
        if keep.size == 0:
            continue
        cols = [c[keep] for c in cols]
        aval = A.evaluate(cols, powtab, p, keep.size)
        keep = np.nonzero(aval)[0]
        cols = [c[keep] for c in cols]
        aval = aval[keep]
        for g in minors:
            if keep.size == 0:
                break
            v = g.evaluate(cols, powtab, p, len(cols[0]))
            keep = np.nonzero(v == 0)[0]
            cols = [c[keep] for c in cols]
            aval = aval[keep]
        if len(cols[0]):
            pt = [int(c[0]) for c in cols]
            alpha, beta = tuple(pt[:d]), tuple(pt[d:])
            g2v = (sum(alpha) - d) % p
            return RootAssignment(p, alpha, beta,
                                  (pow(int(aval[0]), -1, p), g2v, pow(g2v, -1, p)))
    return None
