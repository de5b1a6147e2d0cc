"""Deciding Su-denseness of a finitely generated subgroup of a free group.

The pipeline: an abelianization gate (Smith normal form), the rank-one
shortcut, then one branch per pair (t, Y0). A branch builds the polynomial
system for tau_t(H), asks the Groebner engine which primes could carry a
common root at all, and searches for a root modulo each of them.
A root becomes a surjection onto V_{d-1} x| C that misses tau_t(H); the
witness is checked again with plain group arithmetic.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Sequence

from .groebner import GroebnerBudgetExceeded, RatPoly, null_certificate, unit_ideal_mod_p
from .magnus import build_system, commutator_matrix, compact_polys, dedupe_rows, full_group_matrix, minors
from .modular import (BudgetExceeded, RootAssignment, factorize, is_prime, odd_primes, root_search,
                      search_space_size)
from .phyper import PHyperElement, PHyperGroup, is_generating, lcm, mult_order
from .words import SubgroupBasis, Word, format_word, shorten_generators

SCHEMA = 1
JOBS_ENV = "SUDENSE_JOBS"


class Kind(str, Enum):
    DENSE = "Dense"
    NOT_DENSE = "NotDense"
    NOT_AB_DENSE = "NotAbDense"
    UNDECIDED = "UndecidedAtBudget"


@dataclass(frozen=True)
class Budget:
    groebner_steps: int | None = 200_000
    groebner_seconds: float | None = 20.0
    # primes searched in every branch before the Groebner stage
    prescan_bound: int = 7
    # first Groebner attempt; on a miss, primes whose search space is below
    # quick_scan_points are tried before the full attempt
    quick_seconds: float = 2.0
    quick_scan_points: int = 2_500_000
    factor_timeout: float | None = 30.0
    # largest prime tried when the complex variety is nonempty
    scan_cap: int = 101
    root_points: int | None = 50_000_000

    def __post_init__(self):
        for name in ("groebner_steps", "groebner_seconds", "factor_timeout", "root_points",
                     "quick_seconds", "quick_scan_points"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")
        if self.scan_cap < 3 or self.prescan_bound < 2:
            raise ValueError("prime bounds too small")


# ---------------------------------------------------------------- Ab gate

@dataclass(frozen=True)
class AbWitness:
    """A surjection chi: F -> Z/qZ (x_i -> images[i]) killing every basis word."""
    q: int
    images: tuple[int, ...]

    def to_json(self) -> dict:
        return {"q": self.q, "images": list(self.images)}


def exponent_matrix(basis: SubgroupBasis) -> list[list[int]]:
    return [list(w.exponent_sum()) for w in basis.words]


def _smallest_prime_factor(n: int) -> int:
    return factorize(n)[0]


def ab_dense(basis: SubgroupBasis) -> tuple[bool, AbWitness | None]:
    """Is the image of H in Z^d all of Z^d? On failure, a cyclic quotient missing H."""
    from sympy import Matrix
    from sympy.matrices.normalforms import smith_normal_decomp

    d = basis.rank
    A = Matrix(exponent_matrix(basis))
    D, _, V = smith_normal_decomp(A)  # D = U A V
    diag = [int(D[k, k]) if k < min(D.shape) else 0 for k in range(d)]
    for k, dk in enumerate(diag):
        if abs(dk) == 1:
            continue
        q = 2 if dk == 0 else _smallest_prime_factor(dk)
        images = tuple(int(V[i, k]) % q for i in range(d))
        return False, AbWitness(q, images)
    return True, None


def verify_ab_witness(basis: SubgroupBasis, w: AbWitness) -> bool:
    if w.q < 2 or len(w.images) != basis.rank or not any(x % w.q for x in w.images):
        return False
    return all(sum(c * x for c, x in zip(word.exponent_sum(), w.images)) % w.q == 0
               for word in basis.words)


# ---------------------------------------------------------------- witnesses

@dataclass(frozen=True)
class WitnessData:
    t: int
    y0: int
    y0_rows: tuple[tuple[int, int], ...]
    p: int
    root: RootAssignment
    alpha: int
    m: int
    c: tuple[int, ...]
    u: tuple[int, ...]
    psi_images: tuple[PHyperElement, ...]
    excluded: PHyperElement

    @property
    def group(self) -> PHyperGroup:
        return PHyperGroup(self.p, len(self.u), self.alpha, self.m)

    def to_json(self) -> dict:
        return {
            "t": self.t,
            "Y0": self.y0,
            "Y0_rows": [list(r) for r in self.y0_rows],
            "p": self.p,
            "alpha": self.alpha,
            "m": self.m,
            "c": list(self.c),
            "u": list(self.u),
            "psi_images": [_el_json(g) for g in self.psi_images],
            "proper_excluded_element": _el_json(self.excluded),
            "root": self.root.to_json(),
        }

    @classmethod
    def from_json(cls, obj: dict) -> WitnessData:
        r = obj["root"]
        root = RootAssignment(int(r["p"]), tuple(r["alpha"]), tuple(r["beta"]), tuple(r["gamma"]))
        return cls(int(obj["t"]), int(obj["Y0"]), tuple(tuple(x) for x in obj["Y0_rows"]),
                   int(obj["p"]), root, int(obj["alpha"]), int(obj["m"]), tuple(obj["c"]),
                   tuple(obj["u"]), tuple(_el_from_json(g) for g in obj["psi_images"]),
                   _el_from_json(obj["proper_excluded_element"]))


def _el_json(g: PHyperElement) -> dict:
    return {"v": list(g.v), "a": g.a}


def _el_from_json(obj: dict) -> PHyperElement:
    return PHyperElement(tuple(obj["v"]), int(obj["a"]))


def _discrete_log(x: int, base: int, m: int, p: int) -> int:
    acc = 1
    for k in range(m):
        if acc == x % p:
            return k
        acc = acc * base % p
    raise ValueError(f"{x} is not a power of {base} mod {p}")


def psi_from_root(root: RootAssignment) -> tuple[PHyperGroup, tuple[int, ...], tuple[PHyperElement, ...]]:
    """G = V_{d-1} x|_alpha C with C = <a_1..a_d>, and the images psi(x_i)."""
    p = root.p
    a = [x % p for x in root.alpha]
    d = len(a)
    m = lcm(*(mult_order(x, p) for x in a))
    if m < 2:
        raise ValueError("the alpha values generate the trivial group")
    alpha = next(x for x in range(2, p) if mult_order(x, p) == m)
    c = tuple(_discrete_log(x, alpha, m, p) for x in a)
    G = PHyperGroup(p, d - 1, alpha, m)
    imgs = [G.element(tuple(1 if j == i else 0 for j in range(d - 1)), c[i]) for i in range(d - 1)]
    imgs.append(G.element(tuple(root.beta), c[d - 1]))
    return G, c, tuple(imgs)


def image_of_word(G: PHyperGroup, imgs: Sequence[PHyperElement], w: Word) -> PHyperElement:
    invs = [G.inv(g) for g in imgs]
    out = G.identity()
    for x in w.syllables:
        out = G.mul(out, imgs[x - 1] if x > 0 else invs[-x - 1])
    return out


def build_witness(basis: SubgroupBasis, t: int, y0: int, y0_rows, root: RootAssignment) -> WitnessData:
    G, c, imgs = psi_from_root(root)
    hs = [image_of_word(G, imgs, w) for w in basis.tau(t).words]
    ex = G.excluded_element(hs)
    if ex is None:
        raise AssertionError("image of tau_t(H) is the whole group")
    return WitnessData(t, y0, tuple(tuple(r) for r in y0_rows), root.p, root, G.alpha, G.m, c,
                       tuple(root.beta), imgs, ex)


def check_witness(basis: SubgroupBasis, w: WitnessData) -> list[str]:
    """Names of failed checks (empty when the witness is sound)."""
    problems = []
    d = basis.rank
    if not 1 <= w.t <= d:
        return ["t out of range"]
    if len(w.root.alpha) != d or len(w.root.beta) != d - 1:
        return ["root has the wrong shape"]
    if not is_prime(w.p) or w.p == 2 or w.root.p != w.p:
        return ["p is not an odd prime"]
    try:
        G, c, imgs = psi_from_root(w.root)
    except ValueError as exc:
        return [f"group reconstruction: {exc}"]
    if (G.alpha, G.m, c, imgs) != (w.alpha, w.m, tuple(w.c), tuple(w.psi_images)):
        problems.append("recorded group data disagrees with the root")
    if not is_generating(G, imgs):
        problems.append("psi is not surjective")
    hs = [image_of_word(G, imgs, word) for word in basis.tau(w.t).words]
    ex = w.excluded
    if not G.contains(ex):
        problems.append("excluded element is not in G")
    elif G.order <= 200_000:
        if G.encode(ex) in G.closure(hs):
            problems.append("excluded element lies in psi(tau_t(H))")
    elif G.generates(hs):
        problems.append("psi(tau_t(H)) is all of G")
    return problems


def verify_witness(basis: SubgroupBasis, w: WitnessData) -> bool:
    return not check_witness(basis, w)


# ---------------------------------------------------------------- branches

@dataclass
class BranchRecord:
    t: int
    y0: int
    y0_rows: list
    groebner: str = "skipped"  # empty | nonempty | budget | skipped
    a: int | None = None
    primes_tested: list = field(default_factory=list)
    excluded_mod_p: list = field(default_factory=list)
    root: dict | None = None
    pending: bool = False
    budget_hit: str | None = None

    def to_json(self) -> dict:
        out = asdict(self)
        out["a"] = None if self.a is None else str(self.a)
        return out


def nonzero_full_minors(d: int) -> list:
    return [mi for mi in minors(full_group_matrix(d)) if not mi.det.is_zero()]


def _run_branch(basis: SubgroupBasis, t: int, y0_index: int, budget: Budget):
    """One (t, Y0) branch; returns (record, root or None)."""
    d = basis.rank
    y0 = nonzero_full_minors(d)[y0_index]
    rec = BranchRecord(t, y0_index, [list(r) for r in y0.rows])
    mh = minors(dedupe_rows(commutator_matrix(basis, t)))
    system = build_system(y0.det, [mi.det for mi in mh])

    def search(p: int):
        rec.primes_tested.append(p)
        try:
            return root_search(system, p, max_points=budget.root_points)
        except BudgetExceeded:
            rec.primes_tested.pop()
            rec.budget_hit = f"root search mod {p}"
            raise

    # Primes are always tried in ascending order, and every prime of S(J)
    # divides a, so trying cheap primes before or between the Groebner
    # attempts never changes which root is found first.
    tested_upto = 2
    for p in odd_primes(3):
        if p > budget.prescan_bound:
            break
        tested_upto = p
        try:
            root = search(p)
        except BudgetExceeded:
            return rec, None
        if root is not None:
            rec.root = root.to_json()
            return rec, root

    raw, nv = compact_polys(system)
    ideal = [RatPoly(nv, q) for q in raw]
    full = dict(max_steps=budget.groebner_steps, max_seconds=budget.groebner_seconds)
    quick = dict(max_steps=budget.groebner_steps, max_seconds=budget.quick_seconds)
    if budget.groebner_seconds is not None:
        quick["max_seconds"] = min(budget.quick_seconds, budget.groebner_seconds)
    filtered = True
    try:
        try:
            cert = null_certificate(ideal, **quick)
        except GroebnerBudgetExceeded:
            # hard ideal: scan primes with a small search space, then retry
            rec.groebner = "budget"
            for p in odd_primes(tested_upto + 1):
                if p > budget.scan_cap or search_space_size(d, p) > budget.quick_scan_points:
                    break
                tested_upto = p
                try:
                    root = search(p)
                except BudgetExceeded:
                    return rec, None
                if root is not None:
                    rec.root = root.to_json()
                    return rec, root
            cert = null_certificate(ideal, **full)
    except GroebnerBudgetExceeded:
        # no bound on the primes; a root below the cap still decides
        rec.groebner = "budget"
        candidates = odd_primes(tested_upto + 1)
        filtered = False
    except ValueError:
        rec.groebner = "nonempty"
        candidates = odd_primes(tested_upto + 1)
    else:
        rec.groebner = "empty"
        rec.a = cert.a
        try:
            primes = sorted(set(factorize(cert.a, timeout=budget.factor_timeout))) if cert.a > 1 else []
        except BudgetExceeded:
            rec.budget_hit = "factorization"
            return rec, None
        candidates = iter([p for p in primes if p > tested_upto])
    for p in candidates:
        if rec.groebner != "empty" and p > budget.scan_cap:
            rec.budget_hit = "groebner" if rec.groebner == "budget" else "prime scan"
            break
        if filtered:
            try:
                if unit_ideal_mod_p(ideal, p, **quick):
                    rec.excluded_mod_p.append(p)
                    continue
            except GroebnerBudgetExceeded:
                pass
        try:
            root = search(p)
        except BudgetExceeded:
            break
        if root is not None:
            rec.root = root.to_json()
            return rec, root
    rec.pending = rec.groebner == "nonempty"
    return rec, None


def _branch_job(args):
    return _run_branch(*args)


# ---------------------------------------------------------------- verdict

@dataclass
class Verdict:
    kind: Kind
    witness: WitnessData | None = None
    ab_witness: AbWitness | None = None
    witness_pending: bool = False
    trail: list = field(default_factory=list)
    # the shortened generating set the branches actually used
    working: tuple[Word, ...] = ()

    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "verdict": self.kind.value,
            "witness": None if self.witness is None else self.witness.to_json(),
            "ab_witness": None if self.ab_witness is None else self.ab_witness.to_json(),
            "witness_pending": self.witness_pending,
            "working_words": [format_word(w) for w in self.working],
            "trail": [r.to_json() for r in self.trail],
        }


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def decide(basis: SubgroupBasis, budget: Budget | None = None, jobs: int | None = None) -> Verdict:
    budget = budget or Budget()
    jobs = default_jobs() if jobs is None else max(1, jobs)
    ok, abw = ab_dense(basis)
    if not ok:
        return Verdict(Kind.NOT_AB_DENSE, ab_witness=abw)
    d = basis.rank
    if d == 1:
        return Verdict(Kind.DENSE)
    assert basis.e >= d, "an Ab-dense basis has at least d words"
    # Same subgroup, shorter words: lower degrees and fewer minors downstream.
    work = SubgroupBasis(d, shorten_generators(basis.words))
    n_y0 = len(nonzero_full_minors(d))
    tasks = [(work, t, k, budget) for t in range(1, d + 1) for k in range(n_y0)]

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(_branch_job, tasks)
            results = list(results)
    else:
        results = (_branch_job(task) for task in tasks)

    trail = []
    for (rec, root), (_, t, k, _) in zip(results, tasks):
        trail.append(rec)
        if root is not None:
            w = build_witness(work, t, k, rec.y0_rows, root)
            return Verdict(Kind.NOT_DENSE, witness=w, trail=trail, working=work.words)
    if any(r.pending for r in trail):
        return Verdict(Kind.NOT_DENSE, witness_pending=True, trail=trail, working=work.words)
    if any(r.budget_hit for r in trail):
        return Verdict(Kind.UNDECIDED, trail=trail, working=work.words)
    return Verdict(Kind.DENSE, trail=trail, working=work.words)
