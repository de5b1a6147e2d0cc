import random

import pytest

from sudense.corpus import (CorpusEntry, dump_corpus, generate_corpus, load_corpus,
                            preimage_bases, random_basis, schreier_basis)
from sudense.decider import ab_dense
from sudense.phyper import qp_oracle
from sudense.words import SubgroupBasis, Word


def act(perms, w, point=0):
    for x in w.syllables:
        pm = perms[abs(x) - 1]
        point = pm[point] if x > 0 else pm.index(point)
    return point


def test_schreier_generators_fix_the_base_point():
    perms = [(1, 2, 0), (1, 0, 2)]
    gens = schreier_basis(2, perms)
    # index 3 in F_2: a free basis has 1 + 3 * (2 - 1) = 4 elements
    assert len(gens) == 4
    assert all(act(perms, w) == 0 for w in gens)


def test_schreier_rejects_intransitive_action():
    with pytest.raises(ValueError):
        schreier_basis(2, [(0, 1, 2), (0, 2, 1)])


def test_preimage_bases_are_ab_dense_and_fail_q3():
    bases = preimage_bases()
    assert bases
    for b in bases:
        assert ab_dense(b)[0]
        assert not qp_oracle(b, 3)


def test_corpus_is_deterministic_and_well_formed():
    a, b = generate_corpus(40, seed=5), generate_corpus(40, seed=5)
    assert a == b
    assert a != generate_corpus(40, seed=6)
    assert [e.name for e in a] == [f"c{k:04d}" for k in range(40)]
    for e in a:
        assert e.family in ("random", "abdense", "preimage")
        assert e.basis.rank in (2, 3) and 2 <= e.basis.e <= 4
        assert all(1 <= len(w) <= 6 for w in e.basis.words)
        if e.family == "abdense":
            assert ab_dense(e.basis)[0]


def test_dump_and_load_round_trip():
    entries = generate_corpus(15, seed=2)
    assert load_corpus(dump_corpus(entries)) == entries


def test_load_rejects_unknown_schema():
    with pytest.raises(ValueError):
        load_corpus('{"schema": 2, "entries": []}')


def test_entry_json():
    e = CorpusEntry("n", "random", SubgroupBasis(2, (Word(2, (1, -2)),)))
    assert e.to_json() == {"name": "n", "family": "random", "rank": 2, "words": ["x1 x2^-1"]}
    assert CorpusEntry.from_json(e.to_json()) == e


def test_random_basis_nonempty_words():
    rng = random.Random(0)
    for _ in range(200):
        b = random_basis(rng, 3, 4)
        assert b.e == 4 and all(len(w) for w in b.words)
