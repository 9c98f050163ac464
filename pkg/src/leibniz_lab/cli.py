"""Command-line front end: ``leibniz-lab <command> [flags]``.

Reports go to stdout as JSON.  Exit status is 0 on success, 1 when a
verification fails and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from typing import Optional, Sequence

from .algebra import (
    Subspace,
    algebra_from_json,
    default_workers,
    dumps_algebra,
    fingerprint,
    leibniz_check,
    squares_ideal,
    squares_span,
)
from .degenerations import (
    Arbitrary,
    Identity,
    Psi2Sequence,
    Psi3Polynomial,
    PsiAction,
    build_psi2_algebra,
    build_psi3_algebra,
    module_axiom_check,
)
from .exact import format_scalar, parse_scalar
from .fock import Polynomial, build_generalized_hfl, build_hfl, materialize
from .heisenberg import detect_heisenberg
from .minrep import (
    NotInFamily,
    ParamFamilyM1,
    UnlistedCase,
    build_min_rep,
    classify_list,
    lambda_rigidity,
    normalize_m1,
    read_params,
)
from .template import (
    M1_FREE,
    general_template,
    hfl_degree_report,
    hfl_row_report,
    hfl_template,
    m1_agreement_report,
    m1_template,
    solve_template,
    template_from_json,
)

DEFAULT_SEED = 20240101
_MONO = re.compile(r"^x\d+(\^\d+)?(\*x\d+(\^\d+)?)*$")


class UsageError(Exception):
    pass


def label_degree(label: str) -> Optional[int]:
    """Total degree of a monomial label such as ``x1^2*x3``; None for other labels."""
    if label == "1":
        return 0
    if not _MONO.match(label):
        return None
    deg = 0
    for factor in label.split("*"):
        _, _, e = factor.partition("^")
        deg += int(e) if e else 1
    return deg


def _read_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _load_algebra(path: Optional[str]):
    if not path:
        raise UsageError("--in FILE is required")
    try:
        return algebra_from_json(_read_json(path))
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"{path} is not an algebra file: {exc}") from exc


def _write_algebra(A, path: Optional[str]):
    text = dumps_algebra(A)
    if path:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _workers(args) -> int:
    return args.workers if args.workers else default_workers()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify(args):
    A = _load_algebra(args.input)
    labels = None
    policy = "full" if not A.out_of_window else "in-window(flagged products)"
    if args.window is not None:
        labels = [b for b in A.basis if (label_degree(b) or 0) <= args.window]
        policy = f"in-window(deg<={args.window})"
    rep = leibniz_check(A, labels=labels, workers=_workers(args), max_failures=args.max_failures)
    doc = {
        "command": "verify",
        "algebra": A.name,
        "dim": A.dim,
        "result": "pass" if rep.ok else "fail",
        "summary": rep.summary(),
        "checked": rep.checked,
        "skipped": rep.skipped,
        "policy": policy,
        "failures": [
            {"triple": [a, b, c], "residual": {k: format_scalar(v) for k, v in r.items()}}
            for a, b, c, r in rep.failures
        ],
    }
    return doc, rep.ok, rep.summary()


def cmd_solve(args):
    if args.input:
        T = template_from_json(_read_json(args.input))
        F = solve_template(T, samples=args.samples, seed=args.seed)
        doc = {"command": "solve", "template": T.name}
        doc.update(_family_doc(F, samples=args.samples))
        return doc, True, f"{len(F.free)} free parameters, rank {F.rank}"
    preset = args.preset
    if preset == "m1":
        T = m1_template()
        F = solve_template(T, prefer_free=M1_FREE, samples=args.samples, seed=args.seed)
        doc = {"command": "solve", "template": T.name}
        doc.update(_family_doc(F, samples=args.samples))
        doc["agreement"] = m1_agreement_report(F)
        ok = doc["agreement"]["printed_family_in_solution_set"] and len(F.free) == len(M1_FREE)
        return doc, ok, f"{len(F.free)} free parameters"
    if preset == "hfl":
        k = args.n or 1
        d = args.deg if args.deg is not None else 6
        T = hfl_template(k, d)
        F = solve_template(T, samples=args.samples, seed=args.seed)
        doc = {"command": "solve", "template": T.name}
        doc.update(_family_doc(F, brief=True, samples=args.samples))
        doc["rows"] = hfl_row_report(k, d, T)
        doc["degree_report"] = hfl_degree_report(k, d, samples=1)
        ok = not F.free and doc["degree_report"]["degree_independent"]
        return doc, ok, f"{len(F.forced_zero())} of {len(T.unknowns)} unknowns forced to 0"
    if preset == "general":
        m = args.m or 2
        T = general_template(m)
        F = solve_template(T, samples=args.samples, seed=args.seed)
        doc = {"command": "solve", "template": T.name}
        doc.update(_family_doc(F, brief=True, samples=args.samples))
        return doc, True, f"{len(F.free)} free parameters, rank {F.rank}"
    raise UsageError("solve needs --in TEMPLATE.json or --preset {m1,hfl,general}")


def _family_doc(F, brief: bool = False, samples: int = 0) -> dict:
    doc = {
        "unknowns": len(F.template.unknowns),
        "free_parameters": list(F.free),
        "rank": F.rank,
        "forced_zero": len(F.forced_zero()),
        "raw_equations": F.stats.raw_equations,
        "equations": F.stats.equations,
        "triples": F.stats.triples,
        "skipped": F.stats.skipped,
        # solve_template raises if any sampled member fails the identity
        "sampled_members_pass": samples,
    }
    if not brief:
        doc["assignments"] = {u: a.to_json() for u, a in F.assignments.items()}
    return doc


def _emit_graded(G, d, args, what):
    A = materialize(G, d)
    text = _write_algebra(A, args.out)
    if args.out:
        doc = {"command": what, "algebra": A.name, "dim": A.dim, "out": args.out,
               "out_of_window": len(A.out_of_window)}
        return doc, True, f"wrote {A.name} ({A.dim}-dim) to {args.out}"
    return json.loads(text), True, f"{A.name} ({A.dim}-dim)"


def cmd_fock(args):
    if args.n is None or args.deg is None:
        raise UsageError("fock needs --n and --deg")
    try:
        G = build_hfl(args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return _emit_graded(G, args.deg, args, "fock")


def cmd_gen_fock(args):
    if not args.ks or args.deg is None:
        raise UsageError("gen-fock needs --ks and --deg")
    try:
        ks = [int(k) for k in args.ks.split(",")]
        G = build_generalized_hfl(ks)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return _emit_graded(G, args.deg, args, "gen-fock")


def parse_omega(doc) -> PsiAction:
    """``{"variant": "psi2", "c": [...]}``, ``{"variant": "psi3", "c_poly": [[e, c], ...]}``,
    ``{"variant": "psi1"}`` (identity) or ``{"variant": "psiN", "table": {"i": [[e, c], ...]}}``."""
    if not isinstance(doc, dict) or "variant" not in doc:
        raise UsageError("Omega data must be a JSON object with a 'variant' key")
    variant = doc["variant"]
    which = {"psi1": 1, "psi2": 2, "psi3": 3}.get(variant)
    if which is None:
        raise UsageError(f"unknown variant {variant!r}")

    def poly(pairs):
        terms = {}
        for e, c in pairs:
            terms[(int(e),)] = terms.get((int(e),), 0) + parse_scalar(c)
        return Polynomial(1, terms)

    if "table" in doc:
        table = {int(i): poly(v) for i, v in doc["table"].items()}
        base = None
        if which == 2 and "c" in doc:
            base = Psi2Sequence([parse_scalar(c) for c in doc["c"]])
        elif which == 3 and "c_poly" in doc:
            base = Psi3Polynomial(poly(doc["c_poly"]))
        elif which == 1 or doc.get("identity_base"):
            base = Identity()
        return PsiAction(which, Arbitrary(table, base))
    if which == 1:
        return PsiAction(1, Identity())
    if which == 2:
        return PsiAction(2, Psi2Sequence([parse_scalar(c) for c in doc.get("c", [])]))
    return PsiAction(3, Psi3Polynomial(poly(doc.get("c_poly", []))))


def cmd_psi(args):
    if not args.omega:
        raise UsageError("psi needs --omega JSON (inline or a file path)")
    text = args.omega
    try:
        doc = json.loads(text)
    except json.JSONDecodeError:
        doc = _read_json(text)
    act = parse_omega(doc)
    dmax = args.deg if args.deg is not None else 12
    rep = module_axiom_check(act, dmax, max_failures=args.max_failures)
    out = {
        "command": "psi",
        "variant": doc["variant"],
        "degree": dmax,
        "result": "pass" if rep.ok else "fail",
        "checked": rep.checked,
        "failures": [
            {"monomial": f"x^{i}", "pair": list(pair), "residual": repr(r)} for i, pair, r in rep.failures
        ],
    }
    if args.out and rep.ok and act.which in (2, 3):
        G = build_psi2_algebra(act.omega, dmax) if act.which == 2 else build_psi3_algebra(act.omega, dmax)
        _write_algebra(materialize(G, dmax), args.out)
        out["out"] = args.out
    summary = f"{out['result']}, {rep.checked} (monomial, pair) checks"
    return out, rep.ok, summary


def cmd_min_rep(args):
    if args.m is None:
        raise UsageError("min-rep needs --m")
    if args.m < 1:
        raise UsageError("--m must be >= 1")
    M = build_min_rep(args.m)
    bad = M.matrix_law_failures()
    ok = not bad and M.action_matches_matrices()
    if args.emit == "algebra":
        A = M.algebra()
        text = _write_algebra(A, args.out)
        doc = json.loads(text) if not args.out else {"command": "min-rep", "algebra": A.name, "out": args.out}
    else:
        doc = {
            "command": "min-rep",
            "m": args.m,
            "module_basis": list(M.module_basis),
            "matrices": {
                g: [[format_scalar(M.matrices[g][i, j]) for j in range(M.matrices[g].cols)]
                    for i in range(M.matrices[g].rows)]
                for g in M.generators
            },
            "matrix_law_failures": [list(p) for p in bad],
        }
    return doc, ok, f"matrix law {'holds' if ok else 'fails'} for m={args.m}"


def cmd_classify(args):
    if args.list:
        entries = []
        for e in classify_list():
            d = {"index": e.index, "name": e.name, "case": e.case,
                 "params": [p if isinstance(p, str) else format_scalar(p) for p in e.params]}
            if e.has_lambda:
                ok, combo = lambda_rigidity(e)
                d["lambda_rigid"] = ok
                d["lambda_invariant"] = combo
            entries.append(d)
        return {"command": "classify", "count": len(entries), "entries": entries}, True, f"{len(entries)} entries"
    if args.params is None and args.input is None:
        raise UsageError("classify needs --params CSV, --in FILE or --list")
    try:
        if args.params is not None:
            p = ParamFamilyM1.parse(args.params)
        else:
            p = read_params(_load_algebra(args.input))
    except NotInFamily as exc:
        return {"command": "classify", "result": "not-in-family", "reason": str(exc)}, False, str(exc)
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"bad --params: {exc}") from exc
    try:
        nf = normalize_m1(p)
    except UnlistedCase as exc:
        doc = {"command": "classify", "input": [format_scalar(v) for v in p], "result": "unlisted",
               "reason": str(exc)}
        return doc, False, f"unlisted: {exc}"
    doc = {"command": "classify", "input": [format_scalar(v) for v in p], "result": "listed"}
    doc.update(nf.as_dict())
    doc["matrix"] = [[format_scalar(nf.matrix[i, j]) for j in range(nf.matrix.cols)] for i in range(nf.matrix.rows)]
    return doc, True, nf.name


def cmd_invariants(args):
    A = _load_algebra(args.input)
    if A.out_of_window:
        raise UsageError("invariants need a complete product table; this file is truncated")
    fp = fingerprint(A)
    doc = {"command": "invariants", "algebra": A.name}
    doc.update(fp.as_dict())
    doc["squares_span_basis"] = [{k: format_scalar(v) for k, v in vec.items()} for vec in squares_span(A).basis()]
    J = squares_ideal(A)
    doc["squares_ideal_basis"] = [{k: format_scalar(v) for k, v in vec.items()} for vec in J.basis()]
    try:
        read_params(A)
    except NotInFamily:
        pass
    else:
        # the classification always quotients by the fixed module span(e1, e2, e3)
        module = Subspace(A.basis, [{"e1": 1}, {"e2": 1}, {"e3": 1}])
        doc["module_dim"] = module.dim
        doc["squares_ideal_is_module"] = J == module
    return doc, True, ", ".join(f"{k}={v}" for k, v in fp.as_dict().items())


def cmd_detect(args):
    A = _load_algebra(args.input)
    det = detect_heisenberg(A)
    if not det:
        return {"command": "detect", "algebra": A.name, "result": "reject", "reason": det.reason}, False, det.reason
    M = det.matrix
    doc = {
        "command": "detect",
        "algebra": A.name,
        "result": "heisenberg",
        "k": det.k,
        "dim": 2 * det.k + 1,
        "labels": det.labels,
        "matrix": [[format_scalar(M[i, j]) for j in range(M.cols)] for i in range(M.rows)],
    }
    return doc, True, f"H{2 * det.k + 1}"


COMMANDS = {
    "verify": cmd_verify,
    "solve": cmd_solve,
    "fock": cmd_fock,
    "gen-fock": cmd_gen_fock,
    "psi": cmd_psi,
    "min-rep": cmd_min_rep,
    "classify": cmd_classify,
    "invariants": cmd_invariants,
    "detect": cmd_detect,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--workers", type=int, default=0, help="default: LEIBNIZ_LAB_THREADS or all cores")

    p = _Parser(prog="leibniz-lab", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="check the Leibniz identity on an algebra file")
    v.add_argument("--in", dest="input")
    v.add_argument("--window", type=int)
    v.add_argument("--max-failures", type=int, default=20)

    s = sub.add_parser("solve", parents=[common], help="solve a template for its Leibniz family")
    s.add_argument("--in", dest="input")
    s.add_argument("--preset", choices=("m1", "hfl", "general"))
    s.add_argument("--n", type=int, help="number of oscillator pairs for --preset hfl")
    s.add_argument("--m", type=int)
    s.add_argument("--deg", type=int)
    s.add_argument("--samples", type=int, default=10)

    f = sub.add_parser("fock", parents=[common], help="emit a truncated Heisenberg-Fock algebra")
    f.add_argument("--n", type=int)
    f.add_argument("--deg", type=int)
    f.add_argument("--out")

    g = sub.add_parser("gen-fock", parents=[common], help="emit a truncated generalized Heisenberg-Fock algebra")
    g.add_argument("--ks", help="comma separated block sizes, e.g. 1,2")
    g.add_argument("--deg", type=int)
    g.add_argument("--out")

    ps = sub.add_parser("psi", parents=[common], help="check a deformed Fock action")
    ps.add_argument("--omega")
    ps.add_argument("--deg", type=int)
    ps.add_argument("--out")
    ps.add_argument("--max-failures", type=int, default=20)

    m = sub.add_parser("min-rep", parents=[common], help="minimal faithful representation of H_{2m+1}")
    m.add_argument("--m", type=int)
    m.add_argument("--emit", choices=("algebra", "matrices"), default="matrices")
    m.add_argument("--out")

    c = sub.add_parser("classify", parents=[common], help="normal form of a six-dimensional family member")
    c.add_argument("--params")
    c.add_argument("--in", dest="input")
    c.add_argument("--list", action="store_true")

    i = sub.add_parser("invariants", parents=[common], help="isomorphism invariants of an algebra file")
    i.add_argument("--in", dest="input")

    d = sub.add_parser("detect", parents=[common], help="recognize a Heisenberg algebra")
    d.add_argument("--in", dest="input")
    return p


def run(argv: Optional[Sequence[str]] = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
        if not args.command:
            raise UsageError("a command is required: " + ", ".join(COMMANDS))
        random.seed(args.seed)
        doc, ok, summary = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"leibniz-lab: error: {exc}", file=stderr)
        return 2
    json.dump(doc, stdout, indent=2, ensure_ascii=False)
    stdout.write("\n")
    if args.verbose:
        print(f"{args.command}: {summary}", file=stderr)
    return 0 if ok else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
