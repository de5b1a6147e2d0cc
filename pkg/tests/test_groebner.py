import itertools
import random

import pytest
import sympy
from hypothesis import assume, given
from hypothesis import strategies as st

from sudense.groebner import (GroebnerBudgetExceeded, NullCertificate, RatPoly, groebner_reduce,
                              null_certificate, unit_ideal_mod_p, variety_empty)
from sudense.modular import is_prime

LIMIT = dict(max_seconds=5.0)


def P(n, terms):
    return RatPoly.from_terms(n, terms)


def x_minus(c):
    return P(1, {(1,): 1, (0,): -c})


@st.composite
def ideals(draw, max_vars=3, max_deg=3, max_polys=3, max_terms=3):
    n = draw(st.integers(1, max_vars))
    out = []
    for _ in range(draw(st.integers(1, max_polys))):
        terms = {}
        for _ in range(draw(st.integers(1, max_terms))):
            m = draw(st.lists(st.integers(0, max_deg), min_size=n, max_size=n))
            while sum(m) > max_deg:
                m[m.index(max(m))] -= 1
            terms[tuple(m)] = draw(st.integers(-3, 3))
        out.append(P(n, terms))
    assume(any(not f.is_zero() for f in out))
    return out


def _gb(J, order="grevlex"):
    try:
        return groebner_reduce(J, order, **LIMIT)
    except GroebnerBudgetExceeded:
        assume(False)


def _to_sympy(J):
    n = J[0].nvars
    xs = sympy.symbols(f"x1:{n + 1}")
    exprs = [sum(sympy.Rational(int(c.numerator), int(c.denominator)) * sympy.prod(
        [x ** e for x, e in zip(xs, m)]) for m, c in f.terms.items()) for f in J]
    return exprs, xs


def _fraction(c):
    from fractions import Fraction
    c = sympy.Rational(c)
    return Fraction(int(c.p), int(c.q))


# ---------------------------------------------------------------- examples

def test_reduce_examples():
    x1 = x_minus(1)
    assert groebner_reduce([x1, P(1, {(2,): 1, (0,): -1})]).generators == (x1,)
    assert groebner_reduce([P(1, {(1,): 1}), x1]).is_unit()
    xy = P(2, {(1, 1): 1, (0, 0): -1})
    assert groebner_reduce([xy, P(2, {(1, 0): 1})]).is_unit()


def test_variety_examples():
    assert variety_empty([P(1, {(1,): 1}), x_minus(1)])
    assert not variety_empty([x_minus(1)])
    assert not variety_empty([P(1, {(2,): 1, (0,): 1})])


def test_certificate_examples():
    c = null_certificate([P(1, {(1,): 1}), x_minus(1)])
    assert c.a == 1 and [dict(q.terms) for q in c.cofactors] == [{(0,): 1}, {(0,): -1}]
    c = null_certificate([x_minus(2), x_minus(5)])
    assert c.a == 3 and [dict(q.terms) for q in c.cofactors] == [{(0,): 1}, {(0,): -1}]
    c = null_certificate([P(1, {(1,): 2, (0,): -1}), P(1, {(1,): 1})])
    assert c.a == 1 and [dict(q.terms) for q in c.cofactors] == [{(0,): -1}, {(0,): 2}]


def test_certificate_requires_empty_variety():
    with pytest.raises(ValueError):
        null_certificate([x_minus(1)])


def test_tampered_certificate_fails():
    c = null_certificate([x_minus(2), x_minus(5)])
    bad = NullCertificate(c.a, (c.cofactors[0], P(1, {(0,): -2})), c.source)
    assert not bad.verify()
    assert not NullCertificate(c.a + 1, c.cofactors, c.source).verify()


def test_budget_exhaustion_raises():
    J = [P(2, {(2, 1): 1, (0, 0): -1}), P(2, {(1, 2): 1, (1, 0): -1})]
    with pytest.raises(GroebnerBudgetExceeded):
        groebner_reduce(J, max_steps=1)
    with pytest.raises(GroebnerBudgetExceeded):
        null_certificate(J, max_steps=1)
    assert groebner_reduce(J).generators


def test_unknown_order():
    with pytest.raises(ValueError):
        groebner_reduce([x_minus(1)], order="deglex")


# ---------------------------------------------------------------- properties

@given(ideals())
def test_inputs_reduce_to_zero(J):
    G = _gb(J)
    for f in J:
        assert G.reduce(f).is_zero()


@given(ideals())
def test_basis_is_reduced_and_idempotent(J):
    G = _gb(J)
    gens = G.generators
    for g in gens:
        assert g.terms[g.leading_monomial()] == 1
    for i, g in enumerate(gens):
        for j, h in enumerate(gens):
            if i == j:
                continue
            lm = h.leading_monomial()
            for m in g.terms:
                assert not all(a >= b for a, b in zip(m, lm))
    assert _gb(list(gens)).generators == gens


@given(ideals())
def test_emptiness_agrees_between_orders(J):
    assert _gb(J, "grevlex").is_unit() == _gb(J, "lex").is_unit()


@given(ideals(max_vars=3, max_deg=2))
def test_matches_sympy(J):
    G = _gb(J)
    exprs, xs = _to_sympy(J)
    ref = sympy.groebner(exprs, *xs, order="grevlex", domain="QQ")
    ours = {frozenset((m, _fraction(c)) for m, c in g.terms.items()) for g in G.generators}
    theirs = {frozenset((m, _fraction(c)) for m, c in sympy.Poly(g, *xs).terms())
              for g in ref.exprs}
    assert ours == theirs


@given(ideals())
def test_certificates_verify(J):
    G = _gb(J)
    if not G.is_unit():
        return
    cert = null_certificate(J, **LIMIT)
    assert cert.a >= 1
    assert cert.verify()
    for q in cert.cofactors:
        assert all(c.denominator == 1 for c in q.terms.values())


def _has_root_mod_p(J, p):
    n = J[0].nvars
    for pt in itertools.product(range(p), repeat=n):
        if all(sum(int(c) * _mono(pt, m, p) for m, c in f.terms.items()) % p == 0 for f in J):
            return True
    return False


def _mono(pt, m, p):
    out = 1
    for x, e in zip(pt, m):
        out = out * pow(x, e, p)
    return out


def test_empty_variety_bounds_primes():
    # Roots mod p of an integral system with empty complex variety occur only for p | a.
    rng = random.Random(2024)
    primes = [p for p in range(2, 51) if is_prime(p)]
    empties = 0
    for _ in range(150):
        n = rng.randint(1, 2)
        J = []
        for _ in range(rng.randint(2, 3)):
            terms = {}
            for _ in range(rng.randint(1, 3)):
                m = [rng.randint(0, 3) for _ in range(n)]
                while sum(m) > 3:
                    m[m.index(max(m))] -= 1
                terms[tuple(m)] = rng.randint(-4, 4)
            J.append(P(n, terms))
        if all(f.is_zero() for f in J) or not variety_empty(J):
            continue
        empties += 1
        a = null_certificate(J).a
        for p in primes:
            if a % p:
                assert not _has_root_mod_p(J, p)
    assert empties >= 20


@given(ideals(max_vars=2, max_deg=2), st.sampled_from([2, 3, 5, 7]))
def test_unit_ideal_mod_p_matches_sympy(J, p):
    J = [P(f.nvars, {m: int(c) for m, c in f.terms.items()}) for f in J]
    assume(any(any(int(c) % p for c in f.terms.values()) for f in J))
    try:
        ours = unit_ideal_mod_p(J, p, **LIMIT)
    except GroebnerBudgetExceeded:
        assume(False)
    exprs, xs = _to_sympy(J)
    ref = sympy.groebner(exprs, *xs, order="grevlex", modulus=p)
    assert ours == (list(ref.exprs) == [1])
    if ours:
        assert not _has_root_mod_p(J, p)


def test_text_output():
    f = P(2, {(1, 0): 1, (0, 2): -2, (0, 0): 3})
    assert f.to_text() == "-2*x2^2 + x1 + 3"
    assert f.to_text(["a", "b"]) == "-2*b^2 + a + 3"
