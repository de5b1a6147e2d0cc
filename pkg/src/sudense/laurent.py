"""Sparse Laurent polynomials over Z in alpha_1^{+-1}..alpha_d^{+-1}, beta_1..beta_{d-1}, gamma_1..gamma_3.

Every polynomial carries the rank ``d``; exponent tuples have ``2d + 2``
slots laid out as ``(alpha_1..alpha_d, beta_1..beta_{d-1}, gamma_1..gamma_3)``.
Only the alpha slots may be negative.
"""

from __future__ import annotations

import re
from typing import Iterable, Mapping, Sequence

Monomial = tuple[int, ...]


class RankMismatch(ValueError):
    pass


def nvars(d: int) -> int:
    return 2 * d + 2


def grevlex_key(m: Monomial) -> tuple:
    return (sum(m), tuple(-e for e in reversed(m)))


class LaurentPoly:
    __slots__ = ("d", "terms", "_hash")

    def __init__(self, d: int, terms: Mapping[Monomial, int] | None = None, *, _trusted: bool = False):
        self.d = d
        if _trusted:
            self.terms = terms
        else:
            n = nvars(d)
            clean: dict[Monomial, int] = {}
            for m, c in (terms or {}).items():
                m = tuple(m)
                if len(m) != n:
                    raise ValueError(f"monomial {m} has wrong length for rank {d}")
                if any(e < 0 for e in m[d:]):
                    raise ValueError("beta/gamma exponents must be nonnegative")
                c = int(c)
                if c:
                    clean[m] = clean.get(m, 0) + c
                    if not clean[m]:
                        del clean[m]
            self.terms = clean
        self._hash = None

    # -- constructors
    @classmethod
    def zero(cls, d: int) -> LaurentPoly:
        return cls(d, {}, _trusted=True)

    @classmethod
    def const(cls, c: int, d: int) -> LaurentPoly:
        return cls(d, {(0,) * nvars(d): c} if c else {}, _trusted=True)

    @classmethod
    def monomial(cls, d: int, alpha: Sequence[int] = (), beta: Sequence[int] = (),
                 gamma: Sequence[int] = (), coef: int = 1) -> LaurentPoly:
        a = list(alpha) + [0] * (d - len(alpha))
        b = list(beta) + [0] * (d - 1 - len(beta))
        g = list(gamma) + [0] * (3 - len(gamma))
        return cls(d, {tuple(a + b + g): coef})

    @classmethod
    def alpha(cls, i: int, d: int, exp: int = 1) -> LaurentPoly:
        m = [0] * nvars(d)
        m[i - 1] = exp
        return cls(d, {tuple(m): 1}, _trusted=True)

    @classmethod
    def beta(cls, j: int, d: int) -> LaurentPoly:
        m = [0] * nvars(d)
        m[d + j - 1] = 1
        return cls(d, {tuple(m): 1}, _trusted=True)

    @classmethod
    def gamma(cls, k: int, d: int) -> LaurentPoly:
        m = [0] * nvars(d)
        m[2 * d - 2 + k] = 1
        return cls(d, {tuple(m): 1}, _trusted=True)

    # -- basic protocol
    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = LaurentPoly.const(other, self.d)
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.d == other.d and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.d, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def __repr__(self) -> str:
        return f"LaurentPoly({self.to_text()!r}, d={self.d})"

    def _coerce(self, other) -> LaurentPoly:
        if isinstance(other, int):
            return LaurentPoly.const(other, self.d)
        if not isinstance(other, LaurentPoly):
            raise TypeError(f"cannot combine LaurentPoly with {type(other).__name__}")
        if other.d != self.d:
            raise RankMismatch(f"rank mismatch: {self.d} vs {other.d}")
        return other

    # -- ring operations
    def __add__(self, other) -> LaurentPoly:
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return LaurentPoly(self.d, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self) -> LaurentPoly:
        return LaurentPoly(self.d, {m: -c for m, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other) -> LaurentPoly:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> LaurentPoly:
        return self._coerce(other) - self

    def __mul__(self, other) -> LaurentPoly:
        if isinstance(other, int):
            if not other:
                return LaurentPoly.zero(self.d)
            return LaurentPoly(self.d, {m: c * other for m, c in self.terms.items()}, _trusted=True)
        other = self._coerce(other)
        out: dict[Monomial, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m, 0) + c1 * c2
                if s:
                    out[m] = s
                else:
                    del out[m]
        return LaurentPoly(self.d, out, _trusted=True)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> LaurentPoly:
        if k < 0:
            if len(self.terms) == 1:
                (m, c), = self.terms.items()
                if c in (1, -1) and not any(m[self.d:]):
                    return LaurentPoly(self.d, {tuple(-e for e in m): c ** k}, _trusted=True)
            raise ValueError("only alpha monomial units can be inverted")
        out = LaurentPoly.const(1, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def shift(self, alpha_exps: Sequence[int]) -> LaurentPoly:
        """Multiply by the alpha monomial prod alpha_i^{k_i}."""
        if not any(alpha_exps):
            return self
        d = self.d
        pad = tuple(alpha_exps) + (0,) * (d + 2)
        return LaurentPoly(d, {tuple(a + b for a, b in zip(m, pad)): c
                               for m, c in self.terms.items()}, _trusted=True)

    # -- queries
    def min_alpha_exponent(self) -> tuple[int, ...]:
        if not self.terms:
            return (0,) * self.d
        return tuple(min(m[i] for m in self.terms) for i in range(self.d))

    def is_polynomial(self) -> bool:
        return all(e >= 0 for m in self.terms for e in m[: self.d])

    def uses_gamma(self) -> bool:
        return any(any(m[2 * self.d - 1:]) for m in self.terms)

    def sorted_terms(self) -> list[tuple[Monomial, int]]:
        """Terms in descending graded-reverse-lexicographic order."""
        return sorted(self.terms.items(), key=lambda mc: grevlex_key(mc[0]), reverse=True)

    def coefficient_sum(self) -> int:
        return sum(self.terms.values())

    # -- evaluation
    def eval_mod_p(self, p: int, alpha: Sequence[int], beta: Sequence[int] = (),
                   gamma: Sequence[int] = ()) -> int:
        """Image under the ring map alpha_i -> alpha[i], beta_j -> beta[j], gamma_k -> gamma[k] into Z/pZ."""
        from .modular import is_prime

        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        d = self.d
        if len(alpha) != d or len(beta) > d - 1 or len(gamma) > 3:
            raise ValueError("assignment has wrong shape")
        vals = list(alpha) + list(beta) + [0] * (d - 1 - len(beta)) + list(gamma) + [0] * (3 - len(gamma))
        vals = [v % p for v in vals]
        inv: dict[int, int] = {}
        total = 0
        for m, c in self.terms.items():
            t = c % p
            for idx, e in enumerate(m):
                if e == 0:
                    continue
                v = vals[idx]
                if e < 0:
                    if v == 0:
                        raise ZeroDivisionError(f"alpha_{idx + 1} = 0 mod {p} with negative exponent")
                    if idx not in inv:
                        inv[idx] = pow(v, -1, p)
                    t = t * pow(inv[idx], -e, p) % p
                else:
                    t = t * pow(v, e, p) % p
                if not t:
                    break
            total += t
        return total % p

    # -- text format
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m, c in self.sorted_terms():
            factors = [_var_name(self.d, i) + (f"^{e}" if e != 1 else "")
                       for i, e in enumerate(m) if e]
            sign = "-" if c < 0 else "+"
            body = " * ".join(([str(abs(c))] if abs(c) != 1 or not factors else []) + factors)
            parts.append((sign, body))
        out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            out += f" {sign} {body}"
        return out

    __str__ = to_text


def _var_name(d: int, idx: int) -> str:
    if idx < d:
        return f"a{idx + 1}"
    if idx < 2 * d - 1:
        return f"b{idx - d + 1}"
    return f"g{idx - 2 * d + 2}"


_TERM_SPLIT = re.compile(r"(?<!\^)\s*([+-])\s*")
_FACTOR = re.compile(r"([abg])(\d+)(?:\^(-?\d+))?$")


def parse_poly(text: str, d: int) -> LaurentPoly:
    """Parse the textual form produced by :meth:`LaurentPoly.to_text`."""
    s = text.strip()
    if not s:
        raise ValueError("empty polynomial")
    if s[0] not in "+-":
        s = "+" + s
    pieces = _TERM_SPLIT.split(s)[1:]
    terms: dict[Monomial, int] = {}
    n = nvars(d)
    for sign, body in zip(pieces[::2], pieces[1::2]):
        coef = -1 if sign == "-" else 1
        exps = [0] * n
        for tok in re.split(r"\s*\*\s*|\s+", body.strip()):
            if not tok:
                continue
            if tok.isdigit():
                coef *= int(tok)
                continue
            m = _FACTOR.match(tok)
            if m is None:
                raise ValueError(f"bad factor {tok!r} in {text!r}")
            kind, k, e = m.group(1), int(m.group(2)), int(m.group(3) or 1)
            if kind == "a" and 1 <= k <= d:
                idx = k - 1
            elif kind == "b" and 1 <= k <= d - 1:
                idx = d + k - 1
            elif kind == "g" and 1 <= k <= 3:
                idx = 2 * d - 2 + k
            else:
                raise ValueError(f"variable {tok!r} outside rank {d}")
            exps[idx] += e
        key = tuple(exps)
        terms[key] = terms.get(key, 0) + coef
    return LaurentPoly(d, terms)


def exact_divide(num: LaurentPoly, den: LaurentPoly) -> LaurentPoly:
    """Quotient num/den in the Laurent ring; raises ArithmeticError if inexact."""
    if den.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if num.is_zero():
        return LaurentPoly.zero(num.d)
    d = num.d
    # Strip the alpha-monomial content of both (a unit), divide as ordinary
    # polynomials, shift back. Lowest alpha-degrees add under multiplication,
    # so an exact Laurent quotient is then an ordinary polynomial.
    sn = [-e for e in num.min_alpha_exponent()]
    sd = [-e for e in den.min_alpha_exponent()]
    a = num.shift(sn)
    b = den.shift(sd)
    lead_m, lead_c = b.sorted_terms()[0]
    rem = dict(a.terms)
    quot: dict[Monomial, int] = {}
    while rem:
        m = max(rem, key=grevlex_key)
        c = rem[m]
        diff = tuple(x - y for x, y in zip(m, lead_m))
        if any(e < 0 for e in diff) or c % lead_c:
            raise ArithmeticError("inexact division")
        q = c // lead_c
        quot[diff] = q
        for bm, bc in b.terms.items():
            t = tuple(x + y for x, y in zip(bm, diff))
            v = rem.get(t, 0) - q * bc
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    shift_back = [y - x for x, y in zip(sn, sd)]
    return LaurentPoly(d, quot).shift(shift_back)


def sum_polys(polys: Iterable[LaurentPoly], d: int) -> LaurentPoly:
    out: dict[Monomial, int] = {}
    for p in polys:
        for m, c in p.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
    return LaurentPoly(d, out, _trusted=True)
