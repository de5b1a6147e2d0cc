"""The embedding xi : F -> T^{d-1} x| Z^d and the polynomial systems built from it."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Sequence

from .laurent import LaurentPoly, RankMismatch, exact_divide
from .words import SubgroupBasis, Word, commutator, tau

GAMMA1, GAMMA2, GAMMA3, MINOR = "gamma1", "gamma2", "gamma3", "minor"


@dataclass(frozen=True)
class MagnusElement:
    poly: tuple[LaurentPoly, ...]
    abel: tuple[int, ...]

    @property
    def d(self) -> int:
        return len(self.abel)

    @classmethod
    def identity(cls, d: int) -> MagnusElement:
        return cls(tuple(LaurentPoly.zero(d) for _ in range(d - 1)), (0,) * d)

    def __mul__(self, other: MagnusElement) -> MagnusElement:
        return magnus_mul(self, other)

    def inverse(self) -> MagnusElement:
        neg = tuple(-k for k in self.abel)
        return MagnusElement(tuple(-q.shift(neg) for q in self.poly), neg)


def xi_generator(i: int, sign: int, d: int) -> MagnusElement:
    if d < 2:
        raise ValueError("the embedding needs rank d >= 2")
    if not 1 <= i <= d:
        raise ValueError(f"generator index {i} out of range")
    unit = [0] * d
    unit[i - 1] = 1
    if i < d:
        poly = [LaurentPoly.zero(d) for _ in range(d - 1)]
        poly[i - 1] = LaurentPoly.const(1, d)
    else:
        poly = [LaurentPoly.beta(j, d) for j in range(1, d)]
    x = MagnusElement(tuple(poly), tuple(unit))
    return x if sign > 0 else x.inverse()


def magnus_mul(x: MagnusElement, y: MagnusElement) -> MagnusElement:
    """(P, k)(P', k') = (P + alpha^k P', k + k')."""
    if x.d != y.d:
        raise RankMismatch(f"rank mismatch: {x.d} vs {y.d}")
    poly = tuple(p + q.shift(x.abel) for p, q in zip(x.poly, y.poly))
    return MagnusElement(poly, tuple(a + b for a, b in zip(x.abel, y.abel)))


def xi_eval(w: Word) -> MagnusElement:
    d = w.rank
    gens = {(i, s): xi_generator(i, s, d) for i in range(1, d + 1) for s in (1, -1)}
    acc = MagnusElement.identity(d)
    for x in w.syllables:
        acc = magnus_mul(acc, gens[(abs(x), 1 if x > 0 else -1)])
    return acc


@dataclass(frozen=True)
class CommutatorMatrix:
    d: int
    rows: tuple[tuple[LaurentPoly, ...], ...]
    provenance: tuple[tuple[int, int], ...]

    def __len__(self) -> int:
        return len(self.rows)

    def to_text(self) -> str:
        return "\n".join(f"({r},{s}): [" + ", ".join(q.to_text() for q in row) + "]"
                         for (r, s), row in zip(self.provenance, self.rows))


def commutator_matrix(basis: SubgroupBasis, t: int | None = None) -> CommutatorMatrix:
    """Rows xi_1([tau_t(w_r), tau_t(w_s)]) for r < s (1-based provenance)."""
    d = basis.rank
    if d < 2:
        raise ValueError("the embedding needs rank d >= 2")
    if basis.e < 2:
        raise ValueError("need at least two words to form commutators")
    words = basis.words if t is None else tuple(tau(t, w) for w in basis.words)
    rows, prov = [], []
    for r, s in combinations(range(len(words)), 2):
        rows.append(xi_eval(commutator(words[r], words[s])).poly)
        prov.append((r + 1, s + 1))
    return CommutatorMatrix(d, tuple(rows), tuple(prov))


def full_group_matrix(d: int) -> CommutatorMatrix:
    return commutator_matrix(SubgroupBasis.full(d))


def dedupe_rows(M: CommutatorMatrix) -> CommutatorMatrix:
    """Drop zero rows and rows equal to another row up to sign."""
    seen: set = set()
    rows, prov = [], []
    for row, pv in zip(M.rows, M.provenance):
        if all(q.is_zero() for q in row):
            continue
        neg = tuple(-q for q in row)
        if row in seen or neg in seen:
            continue
        seen.add(row)
        rows.append(row)
        prov.append(pv)
    return CommutatorMatrix(M.d, tuple(rows), tuple(prov))


def bareiss_det(mat: Sequence[Sequence[LaurentPoly]], d: int) -> LaurentPoly:
    """Fraction-free determinant with exact division in the Laurent ring."""
    n = len(mat)
    if n == 0:
        return LaurentPoly.const(1, d)
    a = [list(row) for row in mat]
    sign = 1
    prev = LaurentPoly.const(1, d)
    for k in range(n - 1):
        if a[k][k].is_zero():
            for r in range(k + 1, n):
                if not a[r][k].is_zero():
                    a[k], a[r] = a[r], a[k]
                    sign = -sign
                    break
            else:
                return LaurentPoly.zero(d)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num if k == 0 else exact_divide(num, prev)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign > 0 else -det


@dataclass(frozen=True)
class Minor:
    rows: tuple[tuple[int, int], ...]
    det: LaurentPoly


def minors(M: CommutatorMatrix) -> list[Minor]:
    """All (d-1)x(d-1) minors, row subsets in lexicographic order."""
    k = M.d - 1
    if len(M.rows) < k:
        return []
    out = []
    for idx in combinations(range(len(M.rows)), k):
        det = bareiss_det([M.rows[i] for i in idx], M.d)
        out.append(Minor(tuple(M.provenance[i] for i in idx), det))
    return out


@dataclass
class PolySystem:
    d: int
    polys: list[LaurentPoly]
    tags: list[str]
    N: int = 0
    meta: dict = field(default_factory=dict)

    def of_tag(self, tag: str) -> list[LaurentPoly]:
        return [q for q, t in zip(self.polys, self.tags) if t == tag]

    def scaled_y0(self) -> LaurentPoly:
        """The polynomial A with gamma1 * A - 1 in the system."""
        (g1,) = self.of_tag(GAMMA1)
        d = self.d
        slot = 2 * d - 1
        out = {}
        for m, c in g1.terms.items():
            if m[slot] == 1:
                mm = list(m)
                mm[slot] = 0
                out[tuple(mm)] = c
        return LaurentPoly(d, out)

    def minor_polys(self) -> list[LaurentPoly]:
        return self.of_tag(MINOR)

    def to_json(self) -> dict:
        out = {"schema": 1, "rank": self.d, "N": self.N}
        if self.meta:
            out["meta"] = dict(self.meta)
        out["polys"] = [{"tag": t, "poly": q.to_text()} for q, t in zip(self.polys, self.tags)]
        return out

    @classmethod
    def from_json(cls, obj: dict) -> PolySystem:
        from .laurent import parse_poly

        d = int(obj["rank"])
        polys = [parse_poly(e["poly"], d) for e in obj["polys"]]
        tags = [e["tag"] for e in obj["polys"]]
        return cls(d, polys, tags, int(obj.get("N", 0)), dict(obj.get("meta", {})))


def clearing_exponent(y0: LaurentPoly, minor_dets: Sequence[LaurentPoly]) -> int:
    """Smallest N >= 1 making alpha^N * y0 and alpha^{N(d-1)} * det polynomial."""
    d = y0.d
    N = 1
    for e in y0.min_alpha_exponent():
        N = max(N, -e)
    for det in minor_dets:
        for e in det.min_alpha_exponent():
            if e < 0:
                N = max(N, -(e // (d - 1)))  # ceil(-e / (d-1))
    return N


def build_system(y0: LaurentPoly, minor_dets: Sequence[LaurentPoly], dedupe: bool = True) -> PolySystem:
    if y0.is_zero():
        raise ValueError("Y0 must be a nonzero minor")
    d = y0.d
    N = clearing_exponent(y0, minor_dets)
    unit = [N] * d
    g1, g2, g3 = (LaurentPoly.gamma(k, d) for k in (1, 2, 3))
    alpha_sum = sum((LaurentPoly.alpha(i, d) for i in range(1, d + 1)), LaurentPoly.zero(d))
    polys = [g1 * y0.shift(unit) - 1, alpha_sum - d - g2, g2 * g3 - 1]
    tags = [GAMMA1, GAMMA2, GAMMA3]
    seen: set = set()
    for det in minor_dets:
        if det.is_zero():
            continue
        q = det.shift([N * (d - 1)] * d)
        if dedupe:
            if q in seen or -q in seen:
                continue
            seen.add(q)
        polys.append(q)
        tags.append(MINOR)
    assert all(q.is_polynomial() for q in polys)
    return PolySystem(d, polys, tags, N)


def _strip_monomial(terms: dict, slots: int) -> dict:
    low = [min(m[i] for m in terms) for i in range(slots)]
    return {tuple(x - y for x, y in zip(m, low)): c for m, c in terms.items()}


def compact_polys(system: PolySystem) -> tuple[list[dict], int]:
    """An equivalent system in 2d variables (alpha, beta, g) for the Groebner stage.

    gamma_2 is eliminated through its linear equation, and gamma_1, gamma_3
    merge into one inverse g of alpha_1...alpha_d * A' * (sum alpha - d),
    where A' is the scaled det(Y0) with its alpha-monomial factor removed.
    Since the alpha's are units at every root, the same monomial factors
    are divided out of the minor polynomials. Common roots over any field correspond bijectively, so the set
    of primes with a root mod p is unchanged. Returns (polys, nvars) with
    polys as exponent-tuple -> integer maps.
    """
    d = system.d
    nfree = 2 * d - 1
    n = nfree + 1
    A = _strip_monomial(system.scaled_y0().terms, nfree)
    sigma = {tuple(1 if j == i else 0 for j in range(nfree)): 1 for i in range(d)}
    sigma[(0,) * nfree] = -d
    units = tuple(1 if i < d else 0 for i in range(nfree))
    head: dict = {}
    for m1, c1 in A.items():
        for m2, c2 in sigma.items():
            m = tuple(a + b + u for a, b, u in zip(m1[:nfree], m2, units)) + (1,)
            head[m] = head.get(m, 0) + c1 * c2
    head = {m: c for m, c in head.items() if c}
    head[(0,) * n] = -1
    out = [head]
    for q in system.minor_polys():
        s = _strip_monomial(q.terms, nfree)
        out.append({m[:nfree] + (0,): c for m, c in s.items()})
    return out, n
