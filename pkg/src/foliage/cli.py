"""Command-line entry points.

Exit codes: 0 when everything converged and passed, 1 on an identity failure,
non-convergence, truncation or consistency error, 2 on a usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from .assembly import TruncationError, assemble, export_operator, laplacian, parse_component
from .cohomology import CapabilityError, InconsistencyError, NonConvergenceError, betti_table
from .config import DEFAULTS, Thresholds
from .harness import run_identities, select_identities
from .lefschetz import lefschetz_rank, sl2_check
from .models import BUILTIN_MODELS, FoliationModel, ModelError, deform_leafwise, parse_deformation, resolve_model
from .operators import OperatorKind
from .report import build_report, write_report

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2
LAPLACIAN_KINDS = {"Delta_B", "Box_B", "Boxbar_B", "Delta_dc", "Delta_ddbar"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _model(spec: str) -> FoliationModel:
    try:
        return resolve_model(spec)
    except ModelError as exc:
        raise UsageError(str(exc)) from exc


def _emit(doc: dict, out: str | None, summary: list[str]) -> None:
    text = write_report(doc, out)
    if out == "-":
        sys.stdout.write(text)
    else:
        print("\n".join(summary))
        if out:
            print(f"report written to {out}")


# -- subcommands --------------------------------------------------------------


def cmd_cohomology(model: FoliationModel, args) -> int:
    th = Thresholds(kernel_tol=args.tol)
    rep = betti_table(model, args.K, args.tol, strict=False)
    failed = [c["name"] for c in rep.checks if not c["pass"]]
    ok = rep.converged and not failed
    notes = [] if rep.converged else ["some dimensions changed between K and K+2; increase K"]
    notes += [f"failed check: {name}" for name in failed]
    doc = build_report("cohomology", model, args.K, rep, ok, thresholds=th, notes=notes)
    n = model.n
    summary = [
        f"model {model.name}  K={args.K}  tol={args.tol:g}  converged={rep.converged}",
        "h_B        " + " ".join(map(str, rep.betti)),
        "Dolbeault  " + "  ".join(f"h^{r}{s}={rep.dolbeault[r][s]}" for r in range(n + 1) for s in range(n + 1)),
        "Bott-Chern " + "  ".join(f"h^{r}{r}={d}" for r, d in enumerate(rep.bott_chern)),
        "flags      " + "  ".join(f"{k}={v}" for k, v in sorted(rep.flags.items())),
    ]
    _emit(doc, args.out, summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_identities(model: FoliationModel, args) -> int:
    try:
        select_identities(args.suite)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = run_identities(model, args.suite, args.K, args.seed, args.trials)
    doc = build_report("identities", model, args.K, res.to_dict(), res.all_pass)
    summary = [f"model {model.name}  K={args.K}  seed={args.seed}  trials={args.trials}"]
    for e in res.entries:
        if e.applicable:
            state = "pass" if e.passed else "FAIL"
            summary.append(f"{e.id:>4} {state:5} {e.residual:.3e}  [{e.level}] {e.title}")
        else:
            summary.append(f"{e.id:>4} skip            [{e.level}] {e.skip_reason}")
    _emit(doc, args.out, summary)
    return EXIT_OK if res.all_pass else EXIT_FAIL


def cmd_lefschetz(model: FoliationModel, args) -> int:
    if not model.hermitian:
        raise CapabilityError("the Lefschetz operators need a transverse Hermitian structure")
    n = model.n
    sl2 = sl2_check(model, max(model.bandwidth, 0))
    forms = {}
    for r in range(n + 1):
        lr = lefschetz_rank(model, r, n - r, on="forms")
        forms[f"L^{n - r}: {r}->{2 * n - r}"] = {"rank": lr.rank, "domain": lr.domain_dim, "codomain": lr.codomain_dim}
    cohom = None
    notes: list[str] = []
    if model.kahler:
        cohom, hard = {}, True
        for r in range(n + 1):
            for k in range(1, n - r + 1):
                lr = lefschetz_rank(model, r, k, args.K, on="cohomology")
                cohom[f"L^{k}: H^{r}->H^{r + 2 * k}"] = {
                    "rank": lr.rank, "domain": lr.domain_dim, "codomain": lr.codomain_dim,
                    "injective": lr.injective, "surjective": lr.surjective,
                }
                if k == n - r:
                    hard = hard and lr.injective and lr.surjective
    else:
        hard = None
        notes.append("model is not transversely Kähler; L does not act on basic cohomology")
    forms_ok = all(v["rank"] == v["domain"] == v["codomain"] for v in forms.values())
    ok = sl2.max_residual <= DEFAULTS.identity_tol and forms_ok
    result = {"sl2": sl2, "sl2_max_residual": sl2.max_residual, "forms": forms, "cohomology": cohom,
              "hard_lefschetz": hard}
    doc = build_report("lefschetz", model, args.K, result, ok, notes=notes)
    summary = [f"model {model.name}  K={args.K}", f"sl2 max residual {sl2.max_residual:.3e}"]
    summary += [f"forms       {k}  rank {v['rank']}" for k, v in forms.items()]
    if cohom is not None:
        summary += [f"cohomology  {k}  rank {v['rank']} ({v['domain']}->{v['codomain']})" for k, v in cohom.items()]
        summary.append(f"hard Lefschetz holds: {hard}")
    summary += notes
    _emit(doc, args.out, summary)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_deform(model: FoliationModel, args) -> int:
    try:
        f = parse_deformation(args.f, model.dims)
        deformed = deform_leafwise(model, f)
    except ModelError as exc:
        raise UsageError(str(exc)) from exc
    return {"cohomology": cmd_cohomology, "identities": cmd_identities}[args.then](deformed, args)


def cmd_export_op(model: FoliationModel, args) -> int:
    try:
        kind = OperatorKind.parse(args.kind)
        component = parse_component(args.component)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    op = laplacian(model, kind, args.K, component) if kind.label in LAPLACIAN_KINDS else assemble(model, kind, args.K, component)
    text = export_operator(op, None if args.out in (None, "-") else args.out)
    if args.out in (None, "-"):
        sys.stdout.write(text)
    else:
        print(f"{op.label}: {op.shape[0]}x{op.shape[1]}, {op.matrix.nnz} nonzeros, {len(op.flagged)} flagged columns")
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _nonneg(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="foliage", description="Basic cohomology and transverse identities of Riemannian foliations.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, K=4):
        sp.add_argument("--model", required=True, help=f"one of {', '.join(BUILTIN_MODELS)} or a JSON config path")
        sp.add_argument("--K", type=_nonneg, default=K, help="Fourier truncation per coordinate")
        sp.add_argument("--out", help="write the JSON report here ('-' for stdout)")

    def cohomology_flags(sp):
        sp.add_argument("--tol", type=float, default=DEFAULTS.kernel_tol, help="relative kernel threshold")

    def identity_flags(sp):
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--trials", type=_nonneg, default=20)
        sp.add_argument("--suite", default="all", help="all, a level (riemannian, hermitian, kahler, automorphic, taut) or ids")

    sp = sub.add_parser("cohomology", help="Betti, Dolbeault and Bott-Chern numbers with class flags")
    common(sp, K=8)
    cohomology_flags(sp)
    sp.set_defaults(func=cmd_cohomology)

    sp = sub.add_parser("identities", help="run the identity suite I1-I23")
    common(sp)
    identity_flags(sp)
    sp.set_defaults(func=cmd_identities)

    sp = sub.add_parser("lefschetz", help="sl2 relations and Lefschetz ranks")
    common(sp)
    sp.set_defaults(func=cmd_lefschetz)

    sp = sub.add_parser("deform", help="apply a leafwise deformation, then run another command")
    common(sp)
    sp.add_argument("--f", required=True, help="'m1,m2:re:im;...' or a JSON file of [mode, re, im] triples")
    sp.add_argument("--then", required=True, choices=("cohomology", "identities"))
    cohomology_flags(sp)
    identity_flags(sp)
    sp.set_defaults(func=cmd_deform)

    sp = sub.add_parser("export-op", help="write an assembled operator in coordinate text format")
    common(sp)
    sp.add_argument("--kind", required=True, help="operator label, e.g. d_B, delta_B, Delta_B")
    sp.add_argument("--component", default="all", help="degree j, bidegree r,s or all")
    sp.set_defaults(func=cmd_export_op)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        model = _model(args.model)
        return args.func(model, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (TruncationError, NonConvergenceError, InconsistencyError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
