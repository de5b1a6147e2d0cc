"""Command-line front end: `sudense <subcommand> ...`.

Exit status: 0 Dense (or success), 1 NotDense / NotAbDense (or a failed
check), 2 undecided at budget, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from .corpus import dump_corpus, generate_corpus, load_corpus
from .decider import (Budget, Kind, Verdict, WitnessData, ab_dense, check_witness, decide,
                      default_jobs, nonzero_full_minors, verify_ab_witness)
from .groebner import GroebnerBudgetExceeded, RatPoly, null_certificate
from .magnus import (PolySystem, build_system, commutator_matrix, compact_polys, dedupe_rows,
                     minors, xi_eval)
from .modular import BudgetExceeded, check_root, is_prime, odd_primes, root_search
from .phyper import qp_counterexample
from .words import ParseError, SubgroupBasis, WordError, parse_basis, parse_word

EXIT_DENSE, EXIT_NOT_DENSE, EXIT_UNDECIDED, EXIT_USAGE = 0, 1, 2, 64

VERDICT_EXIT = {
    Kind.DENSE: EXIT_DENSE,
    Kind.NOT_DENSE: EXIT_NOT_DENSE,
    Kind.NOT_AB_DENSE: EXIT_NOT_DENSE,
    Kind.UNDECIDED: EXIT_UNDECIDED,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _read_basis(path: str) -> SubgroupBasis:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise UsageError(str(exc)) from None
    try:
        return parse_basis(text)
    except ParseError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _read_json(path: str) -> dict:
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
        return json.loads(text)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"{path}: {exc}") from None


def _emit(obj, as_json: bool, text: str) -> None:
    if as_json:
        print(json.dumps(obj, indent=2))
    else:
        print(text)


def _budget(args) -> Budget:
    try:
        return Budget(groebner_steps=args.groebner_steps, groebner_seconds=args.groebner_seconds,
                      factor_timeout=args.factor_timeout, scan_cap=args.scan_cap,
                      root_points=args.root_points)
    except ValueError as exc:
        raise UsageError(f"bad budget: {exc}") from None


def _odd_primes_upto(pmax: int) -> list[int]:
    if pmax < 3:
        raise UsageError("--pmax must be at least 3")
    out = []
    for p in odd_primes(3):
        if p > pmax:
            return out
        out.append(p)


# ---------------------------------------------------------------- subcommands

def _verdict_text(v: Verdict) -> str:
    lines = [f"verdict: {v.kind.value}"]
    if v.ab_witness:
        lines.append(f"abelian quotient Z/{v.ab_witness.q}, x_i -> {list(v.ab_witness.images)}")
    if v.witness:
        w = v.witness
        lines.append(f"witness: t={w.t} Y0={w.y0} p={w.p} alpha={w.alpha} m={w.m} "
                     f"c={list(w.c)} u={list(w.u)}")
        lines.append(f"excluded element: v={list(w.excluded.v)} a={w.excluded.a}")
    if v.witness_pending:
        lines.append("witness: pending (root hunt capped)")
    for r in v.trail:
        lines.append(f"  t={r.t} Y0={r.y0} groebner={r.groebner} a={r.a} "
                     f"primes={r.primes_tested} root={'yes' if r.root else 'no'}"
                     + (f" budget={r.budget_hit}" if r.budget_hit else ""))
    return "\n".join(lines)


def cmd_decide(args) -> int:
    basis = _read_basis(args.input)
    v = decide(basis, _budget(args), jobs=args.jobs)
    _emit(v.to_json(), args.json, _verdict_text(v))
    return VERDICT_EXIT[v.kind]


def cmd_abdense(args) -> int:
    basis = _read_basis(args.input)
    ok, w = ab_dense(basis)
    obj = {"schema": 1, "ab_dense": ok, "witness": None if w is None else w.to_json()}
    text = "Ab-dense" if ok else f"not Ab-dense: Z/{w.q}, x_i -> {list(w.images)}"
    _emit(obj, args.json, text)
    return EXIT_DENSE if ok else EXIT_NOT_DENSE


def cmd_oracle(args) -> int:
    basis = _read_basis(args.input)
    rows = []
    for p in _odd_primes_upto(args.pmax):
        ce = qp_counterexample(basis, p, all_alphas=args.all_alphas)
        rows.append({"p": p, "Qp": ce is None,
                     "counterexample": None if ce is None else {"alpha": ce[0], "m": ce[1]}})
    text = "\n".join(f"p={r['p']:>3}  Q_p {'holds' if r['Qp'] else 'fails'}"
                     + ("" if r["Qp"] else f"  (alpha={r['counterexample']['alpha']}, "
                                           f"m={r['counterexample']['m']})")
                     for r in rows)
    _emit({"schema": 1, "primes": rows}, args.json, text)
    return EXIT_DENSE if all(r["Qp"] for r in rows) else EXIT_NOT_DENSE


def cmd_xi(args) -> int:
    if args.word is not None:
        if args.rank is None:
            raise UsageError("--word needs --rank")
        try:
            w = parse_word(args.word, args.rank)
        except WordError as exc:
            raise UsageError(str(exc)) from None
        x = xi_eval(w)
        obj = {"schema": 1, "poly": [q.to_text() for q in x.poly], "abel": list(x.abel)}
        _emit(obj, args.json, f"xi_1 = {obj['poly']}\nxi_2 = {obj['abel']}")
        return 0
    if args.input is None:
        raise UsageError("give a basis file or --word")
    basis = _read_basis(args.input)
    if not 1 <= args.t <= basis.rank:
        raise UsageError(f"t must lie in 1..{basis.rank}")
    M = dedupe_rows(commutator_matrix(basis, args.t))
    if args.system is not None:
        y0s = nonzero_full_minors(basis.rank)
        if not 0 <= args.system < len(y0s):
            raise UsageError(f"Y0 index must lie in 0..{len(y0s) - 1}")
        S = build_system(y0s[args.system].det, [mi.det for mi in minors(M)])
        S.meta = {"t": args.t, "Y0": args.system}
        print(json.dumps(S.to_json(), indent=2))
        return 0
    obj = {"schema": 1, "t": args.t,
           "rows": [{"pair": list(pv), "entries": [q.to_text() for q in row]}
                    for pv, row in zip(M.provenance, M.rows)]}
    _emit(obj, args.json, M.to_text())
    return 0


def _load_system(path: str) -> PolySystem:
    try:
        return PolySystem.from_json(_read_json(path))
    except (KeyError, ValueError) as exc:
        raise UsageError(f"{path}: not a polynomial system ({exc})") from None


def cmd_gb(args) -> int:
    S = _load_system(args.input)
    if args.compact:
        raw, nv = compact_polys(S)
        ideal = [RatPoly(nv, q) for q in raw]
    else:
        ideal = [RatPoly.from_laurent(q) for q in S.polys]
    try:
        cert = null_certificate(ideal, order=args.order, max_steps=args.groebner_steps,
                                max_seconds=args.groebner_seconds)
    except GroebnerBudgetExceeded as exc:
        _emit({"schema": 1, "variety_empty": None, "budget": str(exc)}, args.json, f"undecided: {exc}")
        return EXIT_UNDECIDED
    except ValueError:
        _emit({"schema": 1, "variety_empty": False}, args.json, "variety nonempty")
        return EXIT_NOT_DENSE
    _emit({"schema": 1, "variety_empty": True, "a": str(cert.a), "verified": cert.verify()},
          args.json, f"variety empty; certificate integer a = {cert.a}")
    return EXIT_DENSE


def cmd_roots(args) -> int:
    S = _load_system(args.input)
    if args.p == 2 or not is_prime(args.p):
        raise UsageError("p must be an odd prime")
    try:
        root = root_search(S, args.p, max_points=args.root_points)
    except BudgetExceeded as exc:
        _emit({"schema": 1, "root": None, "budget": str(exc)}, args.json, f"undecided: {exc}")
        return EXIT_UNDECIDED
    if root is None:
        _emit({"schema": 1, "root": None}, args.json, f"no common root mod {args.p}")
        return EXIT_DENSE
    assert check_root(S, root)
    _emit({"schema": 1, "root": root.to_json()}, args.json,
          f"root mod {args.p}: alpha={list(root.alpha)} beta={list(root.beta)} gamma={list(root.gamma)}")
    return EXIT_NOT_DENSE


def cmd_verify(args) -> int:
    basis = _read_basis(args.input)
    obj = _read_json(args.verdict)
    kind = obj.get("verdict")
    problems: list[str] = []
    if kind == Kind.NOT_DENSE.value:
        if obj.get("witness") is None:
            problems.append("no witness recorded")
        else:
            try:
                w = WitnessData.from_json(obj["witness"])
            except (KeyError, TypeError, ValueError) as exc:
                raise UsageError(f"malformed witness: {exc}") from None
            problems += check_witness(basis, w)
    elif kind == Kind.NOT_AB_DENSE.value:
        from .decider import AbWitness

        aw = obj.get("ab_witness") or {}
        if not verify_ab_witness(basis, AbWitness(int(aw.get("q", 0)), tuple(aw.get("images", ())))):
            problems.append("abelian witness fails")
    else:
        problems.append(f"verdict {kind!r} carries no witness")
    _emit({"schema": 1, "ok": not problems, "problems": problems}, args.json,
          "witness verified" if not problems else "witness rejected: " + "; ".join(problems))
    return 0 if not problems else 1


def agreement(v: Verdict, oracle: dict[int, bool]) -> str | None:
    """Why a verdict contradicts the Q_p table, or None."""
    if v.kind == Kind.DENSE and not all(oracle.values()):
        return "Dense but Q_p fails for p in " + str([p for p, ok in oracle.items() if not ok])
    if v.kind == Kind.NOT_DENSE and v.witness is not None:
        p = v.witness.p
        if p in oracle and oracle[p]:
            return f"NotDense at p={p} but Q_p holds"
    return None


def cmd_corpus(args) -> int:
    from .phyper import qp_oracle

    if args.input:
        try:
            entries = load_corpus(Path(args.input).read_text())
        except (OSError, ValueError, KeyError, WordError) as exc:
            raise UsageError(f"{args.input}: {exc}") from None
    else:
        entries = generate_corpus(args.count, args.seed)
    if args.write:
        Path(args.write).write_text(dump_corpus(entries))
    primes = _odd_primes_upto(args.pmax)
    budget = _budget(args)
    bad = 0
    counts: dict[str, int] = {}
    t0 = time.monotonic()
    for e in entries:
        v = decide(e.basis, budget, jobs=args.jobs)
        oracle = {p: qp_oracle(e.basis, p) for p in primes}
        why = agreement(v, oracle)
        if v.witness is not None and check_witness(e.basis, v.witness):
            why = "witness fails verification"
        counts[v.kind.value] = counts.get(v.kind.value, 0) + 1
        bad += why is not None
        rec = {"name": e.name, "verdict": v.kind.value,
               "p": v.witness.p if v.witness else None,
               "oracle": {str(p): ok for p, ok in oracle.items()}, "disagreement": why}
        if args.json:
            print(json.dumps(rec), flush=True)
        elif why or args.verbose:
            print(f"{e.name} {v.kind.value} {rec['p']} {why or ''}", flush=True)
    summary = {"entries": len(entries), "verdicts": counts, "disagreements": bad,
               "seconds": round(time.monotonic() - t0, 2)}
    print(json.dumps(summary) if args.json else
          f"{len(entries)} entries, {bad} disagreements, verdicts {counts}, "
          f"{summary['seconds']} s")
    return 1 if bad else 0


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="sudense", description="Decide Su-denseness of subgroups of free groups.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, budgets=False):
        p.add_argument("--json", action="store_true", help="machine-readable output")
        if budgets:
            p.add_argument("--groebner-steps", type=_positive_int, default=200_000)
            p.add_argument("--groebner-seconds", type=_positive_float, default=20.0)
            p.add_argument("--factor-timeout", type=_positive_float, default=30.0)
            p.add_argument("--scan-cap", type=_positive_int, default=101,
                           help="largest prime tried when the complex variety is nonempty")
            p.add_argument("--root-points", type=_positive_int, default=50_000_000,
                           help="largest search space for one root search")
            p.add_argument("--jobs", type=_positive_int, default=default_jobs(),
                           help="worker processes (default from SUDENSE_JOBS)")

    p = sub.add_parser("decide", help="decide Su-denseness of a basis file")
    p.add_argument("input")
    common(p, budgets=True)
    p.set_defaults(func=cmd_decide)

    p = sub.add_parser("abdense", help="Smith normal form gate")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_abdense)

    p = sub.add_parser("oracle", help="Q_p table by exhaustive enumeration")
    p.add_argument("input")
    p.add_argument("--pmax", type=_positive_int, default=7)
    p.add_argument("--all-alphas", action="store_true", help="enumerate every alpha, not one per m")
    common(p)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("xi", help="the embedding, commutator matrices and systems")
    p.add_argument("input", nargs="?")
    p.add_argument("--word")
    p.add_argument("--rank", type=_positive_int)
    p.add_argument("--t", type=_positive_int, default=1)
    p.add_argument("--system", type=int, metavar="Y0", help="emit the system for this Y0 index")
    common(p)
    p.set_defaults(func=cmd_xi)

    p = sub.add_parser("gb", help="Groebner emptiness test and certificate for a system file")
    p.add_argument("input")
    p.add_argument("--order", choices=("grevlex", "lex"), default="grevlex")
    p.add_argument("--compact", action="store_true", help="use the reduced 2d-variable form")
    p.add_argument("--groebner-steps", type=_positive_int, default=200_000)
    p.add_argument("--groebner-seconds", type=_positive_float, default=60.0)
    common(p)
    p.set_defaults(func=cmd_gb)

    p = sub.add_parser("roots", help="common root search modulo p for a system file")
    p.add_argument("input")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--root-points", type=_positive_int, default=None)
    common(p)
    p.set_defaults(func=cmd_roots)

    p = sub.add_parser("verify", help="re-check the witness in a verdict file")
    p.add_argument("input", help="basis file")
    p.add_argument("verdict", help="JSON written by `decide --json`")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("corpus", help="run decide and the oracle over a corpus")
    p.add_argument("--input", help="corpus JSON (default: generate one)")
    p.add_argument("--count", type=_positive_int, default=200)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--pmax", type=_positive_int, default=11)
    p.add_argument("--write", help="save the generated corpus here")
    p.add_argument("--verbose", action="store_true")
    common(p, budgets=True)
    p.set_defaults(func=cmd_corpus)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, WordError) as exc:
        print(f"sudense: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
