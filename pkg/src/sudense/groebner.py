"""Buchberger's algorithm over Q with Nullstellensatz certificates.

Polynomials are sparse maps from exponent tuples (all entries >= 0) to
rational coefficients. Instead of carrying full cofactor vectors through
every reduction, each basis element remembers how it was produced (an input
or an S-polynomial, minus recorded quotients); cofactors are expanded on
demand, and only along the derivation of the element that is needed.
"""

from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field
from math import gcd
from typing import Iterable, Mapping, Sequence

try:
    from gmpy2 import mpq as _Q
except ImportError:  # pragma: no cover
    from fractions import Fraction as _Q

Mono = tuple[int, ...]
Poly = dict  # Mono -> rational


class GroebnerBudgetExceeded(RuntimeError):
    pass


class CertificateError(AssertionError):
    pass


# ---------------------------------------------------------------- orders

def _grevlex_key(m: Mono) -> tuple:
    return (-sum(m),) + m[::-1]


def _lex_key(m: Mono) -> tuple:
    return tuple(-e for e in m)


ORDERS = {"grevlex": _grevlex_key, "lex": _lex_key}


def order_key(order: str):
    """Key such that ascending sort lists monomials from largest to smallest."""
    try:
        return ORDERS[order]
    except KeyError:
        raise ValueError(f"unknown monomial order {order!r}") from None


# ---------------------------------------------------------------- polynomials

@dataclass(frozen=True)
class RatPoly:
    nvars: int
    terms: Mapping[Mono, object]

    @classmethod
    def from_terms(cls, nvars: int, terms: Mapping[Mono, object]) -> RatPoly:
        clean = {}
        for m, c in terms.items():
            m = tuple(m)
            if len(m) != nvars or any(e < 0 for e in m):
                raise ValueError(f"bad monomial {m}")
            c = _Q(c)
            if c:
                clean[m] = clean.get(m, _Q(0)) + c
                if not clean[m]:
                    del clean[m]
        return cls(nvars, clean)

    @classmethod
    def from_laurent(cls, p) -> RatPoly:
        from .laurent import nvars

        if not p.is_polynomial():
            raise ValueError("negative alpha exponents cannot enter the Groebner stage")
        return cls.from_terms(nvars(p.d), p.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def is_one(self) -> bool:
        return len(self.terms) == 1 and self.terms.get((0,) * self.nvars) == 1

    def leading_monomial(self, order: str = "grevlex") -> Mono:
        return min(self.terms, key=order_key(order))

    def sorted_terms(self, order: str = "grevlex") -> list:
        key = order_key(order)
        return sorted(self.terms.items(), key=lambda mc: key(mc[0]))

    def __eq__(self, other) -> bool:
        return isinstance(other, RatPoly) and self.nvars == other.nvars and dict(self.terms) == dict(other.terms)

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self.terms.items())))

    def to_text(self, names: Sequence[str] | None = None, order: str = "grevlex") -> str:
        names = names or [f"x{i + 1}" for i in range(self.nvars)]
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms(order):
            fac = "*".join(n + (f"^{e}" if e > 1 else "") for n, e in zip(names, m) if e)
            cs = str(c)
            if fac:
                body = fac if c == 1 else ("-" + fac if c == -1 else f"{cs}*{fac}")
            else:
                body = cs
            out.append(body)
        return " + ".join(out).replace("+ -", "- ")


_FIELD = 24  # bits per exponent when packing monomials into one int


def _pack(m: Mono) -> int:
    v = 0
    for e in m:
        v = (v << _FIELD) | e
    return v


def _unpack(v: int, n: int) -> Mono:
    mask = (1 << _FIELD) - 1
    out = [0] * n
    for k in range(n - 1, -1, -1):
        out[k] = v & mask
        v >>= _FIELD
    return tuple(out)


def _packed(p: Poly) -> dict:
    return {_pack(m): c for m, c in p.items()}


def _unpacked(p: dict, n: int) -> Poly:
    return {_unpack(k, n): c for k, c in p.items()}


def _pmul(a: dict, b: dict) -> dict:
    """Product of two polynomials with packed monomial keys."""
    acc: dict = {}
    get = acc.get
    items = list(b.items())
    for k1, c1 in a.items():
        for k2, c2 in items:
            k = k1 + k2
            v = get(k)
            acc[k] = c1 * c2 if v is None else v + c1 * c2
    return {k: v for k, v in acc.items() if v}


def poly_mul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return {}
    n = len(next(iter(a)))
    return _unpacked(_pmul(_packed(a), _packed(b)), n)


def poly_add_into(acc: Poly, b: Poly, scale=1) -> None:
    for m, c in b.items():
        v = acc.get(m)
        v = c * scale if v is None else v + c * scale
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


def _divides(a: Mono, b: Mono) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a: Mono, b: Mono) -> Mono:
    return tuple(x if x > y else y for x, y in zip(a, b))


def _coprime(a: Mono, b: Mono) -> bool:
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


# ---------------------------------------------------------------- Buchberger

@dataclass
class _Elem:
    terms: Poly
    lm: Mono
    origin: tuple  # ("input", i, quot, lc) or ("spoly", i, j, quot, lc)


@dataclass
class _Run:
    nvars: int
    order: str
    elems: list = field(default_factory=list)
    unit_index: int | None = None
    steps: int = 0
    deadline: float | None = None

    def check_clock(self) -> None:
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise GroebnerBudgetExceeded("Groebner computation exceeded its time budget")


def _normal_form(p: Poly, run: _Run, reducers: list[int], key) -> tuple[Poly, list]:
    """Full reduction of p; returns (remainder, quotient records (elem, shift, coef))."""
    p = dict(p)
    heap = [(key(m), m) for m in p]
    heapq.heapify(heap)
    rem: Poly = {}
    quot = []
    elems = run.elems
    ticks = 0
    while heap:
        ticks += 1
        if not ticks & 0x3F:
            run.check_clock()
        _, m = heapq.heappop(heap)
        c = p.pop(m, None)
        if c is None:
            continue
        for gi in reducers:
            g = elems[gi]
            if _divides(g.lm, m):
                break
        else:
            rem[m] = c
            continue
        glm = g.lm
        shift = tuple(x - y for x, y in zip(m, glm))
        quot.append((gi, shift, c))
        for gm, gc in g.terms.items():
            if gm == glm:
                continue
            t = tuple(x + y for x, y in zip(gm, shift))
            v = p.get(t)
            if v is None:
                p[t] = -c * gc
                heapq.heappush(heap, (key(t), t))
            else:
                v -= c * gc
                if v:
                    p[t] = v
                else:
                    del p[t]
    return rem, quot


def _monic(p: Poly, key) -> tuple[Poly, Mono, object]:
    lm = min(p, key=key)
    lc = p[lm]
    if lc != 1:
        inv = 1 / lc
        p = {m: c * inv for m, c in p.items()}
    return p, lm, lc


class _Buchberger:
    def __init__(self, polys: Sequence[Poly], nvars: int, order: str, max_steps: int | None,
                 stop_on_unit: bool, max_seconds: float | None = None):
        self.key = order_key(order)
        self.run = _Run(nvars, order)
        if max_seconds is not None:
            self.run.deadline = time.monotonic() + max_seconds
        self.max_steps = max_steps
        self.stop_on_unit = stop_on_unit
        self.active: list[int] = []      # indices of elements used for new pairs
        self.reducers: list[int] = []    # all nonzero elements, by insertion
        self.pairs: list = []            # heap of (key(lcm), i, j, lcm)
        self.inputs = [dict(p) for p in polys]

    def _add(self, terms: Poly, origin: tuple) -> int:
        terms, lm, lc = _monic(terms, self.key)
        run = self.run
        idx = len(run.elems)
        run.elems.append(_Elem(terms, lm, origin + (lc,)))
        self.reducers.append(idx)
        if not any(lm):
            run.unit_index = idx
        self._update(idx)
        return idx

    def _update(self, h: int) -> None:
        """Gebauer-Moeller pair update."""
        elems = self.run.elems
        lh = elems[h].lm
        cand = [(g, _lcm(lh, elems[g].lm)) for g in self.active]
        keep = []
        for n, (g, l) in enumerate(cand):
            if _coprime(lh, elems[g].lm):
                keep.append((g, l, True))
                continue
            dominated = False
            for n2, (g2, l2) in enumerate(cand):
                if n2 != n and _divides(l2, l) and (l2 != l or n2 < n):
                    dominated = True
                    break
            if not dominated:
                keep.append((g, l, False))
        new_pairs = [(g, l) for g, l, cop in keep if not cop]
        filtered = []
        for item in self.pairs:
            _, i, j, l = item
            if _divides(lh, l) and _lcm(elems[i].lm, lh) != l and _lcm(elems[j].lm, lh) != l:
                continue
            filtered.append(item)
        for g, l in new_pairs:
            filtered.append((self.key(l), g, h, l))
        heapq.heapify(filtered)
        self.pairs = filtered
        self.active = [g for g in self.active if not _divides(lh, elems[g].lm)] + [h]

    def run_all(self) -> _Run:
        run = self.run
        for i, f in enumerate(self.inputs):
            if not f:
                continue
            rem, quot = _normal_form(f, run, self.reducers, self.key)
            if rem:
                self._add(rem, ("input", i, quot))
                if self.stop_on_unit and run.unit_index is not None:
                    return run
        while self.pairs:
            _, i, j, l = heapq.heappop(self.pairs)
            run.steps += 1
            if self.max_steps is not None and run.steps > self.max_steps:
                raise GroebnerBudgetExceeded(f"exceeded {self.max_steps} S-pair reductions")
            run.check_clock()
            gi, gj = run.elems[i], run.elems[j]
            si = tuple(x - y for x, y in zip(l, gi.lm))
            sj = tuple(x - y for x, y in zip(l, gj.lm))
            s: Poly = {}
            for m, c in gi.terms.items():
                if m != gi.lm:
                    s[tuple(x + y for x, y in zip(m, si))] = c
            for m, c in gj.terms.items():
                if m != gj.lm:
                    t = tuple(x + y for x, y in zip(m, sj))
                    v = s.get(t, 0) - c
                    if v:
                        s[t] = v
                    else:
                        s.pop(t, None)
            if not s:
                continue
            rem, quot = _normal_form(s, run, self.reducers, self.key)
            if rem:
                self._add(rem, ("spoly", i, j, si, sj, quot))
                if self.stop_on_unit and run.unit_index is not None:
                    return run
        return run


class ModP:
    """Element of Z/pZ for a prime p; only what Buchberger needs."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def __bool__(self) -> bool:
        return self.v != 0

    def __eq__(self, other) -> bool:
        if isinstance(other, ModP):
            return self.v == other.v
        return self.v == other % self.p

    def __hash__(self) -> int:
        return hash(self.v)

    def __add__(self, o):
        return ModP(self.v + (o.v if isinstance(o, ModP) else o), self.p)

    __radd__ = __add__

    def __sub__(self, o):
        return ModP(self.v - (o.v if isinstance(o, ModP) else o), self.p)

    def __rsub__(self, o):
        return ModP(o - self.v, self.p)

    def __mul__(self, o):
        return ModP(self.v * (o.v if isinstance(o, ModP) else o), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return ModP(-self.v, self.p)

    def __rtruediv__(self, o):
        return ModP(o * pow(self.v, -1, self.p), self.p)

    def __repr__(self) -> str:
        return f"{self.v} mod {self.p}"


def _as_dicts(J: Iterable, p: int | None = None) -> tuple[list[Poly], int]:
    polys, n = [], None
    for f in J:
        if not isinstance(f, RatPoly):
            f = RatPoly.from_laurent(f)
        if n is None:
            n = f.nvars
        elif f.nvars != n:
            raise ValueError("polynomials live in different rings")
        if p is None:
            polys.append({m: _Q(c) for m, c in f.terms.items()})
        else:
            polys.append({m: ModP(int(c), p) for m, c in f.terms.items() if int(c) % p})
    if n is None:
        raise ValueError("empty polynomial list")
    return polys, n


@dataclass(frozen=True)
class GroebnerBasis:
    generators: tuple[RatPoly, ...]
    order: str

    def is_unit(self) -> bool:
        return len(self.generators) == 1 and self.generators[0].is_one()

    def reduce(self, f: RatPoly) -> RatPoly:
        key = order_key(self.order)
        run = _Run(f.nvars, self.order)
        for g in self.generators:
            run.elems.append(_Elem(dict(g.terms), min(g.terms, key=key), ()))
        rem, _ = _normal_form({m: _Q(c) for m, c in f.terms.items()}, run,
                              list(range(len(run.elems))), key)
        return RatPoly(f.nvars, rem)


def groebner_reduce(J: Iterable, order: str = "grevlex", max_steps: int | None = None,
                 max_seconds: float | None = None) -> GroebnerBasis:
    """Reduced Groebner basis of the ideal generated by J."""
    polys, n = _as_dicts(J)
    if not any(polys):
        raise ValueError("all input polynomials are zero")
    key = order_key(order)
    run = _Buchberger(polys, n, order, max_steps, stop_on_unit=True, max_seconds=max_seconds).run_all()
    if run.unit_index is not None:
        return GroebnerBasis((RatPoly(n, {(0,) * n: _Q(1)}),), order)
    # minimalize, then inter-reduce
    elems = [e for e in run.elems]
    lead = []
    for i, e in enumerate(elems):
        if any(_divides(o.lm, e.lm) and (o.lm != e.lm or j < i)
               for j, o in enumerate(elems) if j != i):
            continue
        lead.append(e)
    basis = []
    tmp = _Run(n, order, elems=lead)
    for i, e in enumerate(lead):
        others = [j for j in range(len(lead)) if j != i]
        tail = {m: c for m, c in e.terms.items() if m != e.lm}
        rem, _ = _normal_form(tail, tmp, others, key)
        rem[e.lm] = _Q(1)
        basis.append(RatPoly(n, rem))
    basis.sort(key=lambda g: key(g.leading_monomial(order)))
    return GroebnerBasis(tuple(basis), order)


def variety_empty(J: Iterable, order: str = "grevlex", max_steps: int | None = None,
                 max_seconds: float | None = None) -> bool:
    """True iff the reduced Groebner basis of <J> is {1}, i.e. J has no common complex zero."""
    polys, n = _as_dicts(J)
    run = _Buchberger(polys, n, order, max_steps, stop_on_unit=True, max_seconds=max_seconds).run_all()
    return run.unit_index is not None


def unit_ideal_mod_p(J: Iterable, p: int, order: str = "grevlex", max_steps: int | None = None,
                 max_seconds: float | None = None) -> bool:
    """True iff 1 lies in the ideal generated by the integer polynomials J over Z/pZ.

    Then J has no common zero over any extension of Z/pZ, in particular no
    common root modulo p.
    """
    J = list(J)
    for f in J:
        terms = f.terms
        if any(_Q(c).denominator != 1 for c in terms.values()):
            raise ValueError("coefficients must be integers")
    polys, n = _as_dicts(J, p)
    run = _Buchberger(polys, n, order, max_steps, stop_on_unit=True, max_seconds=max_seconds).run_all()
    return run.unit_index is not None


# ---------------------------------------------------------------- certificates

@dataclass(frozen=True)
class NullCertificate:
    """sum_i source[i] * cofactors[i] == a, all integral."""
    a: int
    cofactors: tuple[RatPoly, ...]
    source: tuple[RatPoly, ...]

    def verify(self) -> bool:
        acc: dict = {}
        for f, l in zip(self.source, self.cofactors):
            poly_add_into(acc, _pmul(_packed(f.terms), _packed(l.terms)))
        return acc == ({0: self.a} if self.a else {})


def _expand_cofactors(run: _Run, inputs: list[Poly], target: int) -> list[Poly]:
    # works on packed monomials throughout; unpacks once at the end
    m = len(inputs)
    memo: dict[int, list[dict]] = {}

    def mono_times(shift: Mono, vec: list[dict]) -> list[dict]:
        s = _pack(shift)
        if not s:
            return [dict(q) for q in vec]
        return [{k + s: c for k, c in q.items()} for q in vec]

    # iterative post-order over the derivation DAG
    stack = [target]
    while stack:
        run.check_clock()
        k = stack[-1]
        if k in memo:
            stack.pop()
            continue
        origin = run.elems[k].origin
        deps = [gi for gi, _, _ in origin[-2]]
        if origin[0] == "spoly":
            deps += [origin[1], origin[2]]
        missing = [g for g in deps if g not in memo]
        if missing:
            stack.extend(missing)
            continue
        stack.pop()
        if origin[0] == "input":
            _, i, quot, lc = origin
            vec: list[Poly] = [{} for _ in range(m)]
            vec[i] = {0: _Q(1)}
        else:
            _, i, j, si, sj, quot, lc = origin
            vec = mono_times(si, memo[i])
            for acc, q in zip(vec, mono_times(sj, memo[j])):
                poly_add_into(acc, q, -1)
        grouped: dict[int, Poly] = {}
        for gi, shift, c in quot:
            grouped.setdefault(gi, {})
            poly_add_into(grouped[gi], {_pack(shift): c})
        for gi, Qpoly in grouped.items():
            for acc, q in zip(vec, memo[gi]):
                if q:
                    poly_add_into(acc, _pmul(Qpoly, q), -1)
        if lc != 1:
            inv = 1 / lc
            vec = [{mm: c * inv for mm, c in q.items()} for q in vec]
        memo[k] = vec
    return [_unpacked(q, run.nvars) for q in memo[target]]


def null_certificate(J: Iterable, order: str = "grevlex", max_steps: int | None = None,
                 max_seconds: float | None = None) -> NullCertificate:
    """Integer a >= 1 and integral cofactors l_i with sum f_i l_i = a.

    Raises ValueError when the variety of J is nonempty.
    """
    J = list(J)
    polys, n = _as_dicts(J)
    source = tuple(RatPoly(n, dict(p)) for p in polys)
    run = _Buchberger(polys, n, order, max_steps, stop_on_unit=True, max_seconds=max_seconds).run_all()
    if run.unit_index is None:
        raise ValueError("the system has a common complex zero; no certificate exists")
    cof = _expand_cofactors(run, polys, run.unit_index)
    # Clear denominators, then divide out the content of the identity.
    den = 1
    for q in cof:
        for c in q.values():
            dq = int(_Q(c).denominator)
            den = den * dq // gcd(den, dq)
    ints = [{m: int(c * den) for m, c in q.items()} for q in cof]
    g = den
    for q in ints:
        for c in q.values():
            g = gcd(g, c)
    a = den // g
    cert = NullCertificate(a, tuple(RatPoly(n, {m: c // g for m, c in q.items()}) for q in ints), source)
    if not cert.verify():
        raise CertificateError("certificate identity failed to verify")
    return cert
