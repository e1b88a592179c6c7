"""Batch command line front end.

Exit status: 0 for a positive answer, 1 for a negative one (ill typed,
underivable, rejected derivation, semantic counterexample), 2 for usage,
parse or configuration errors.  Reports are line oriented: ``RESULT``,
``COUNTEREXAMPLE`` and ``SKIPPED`` prefixes, deterministic for fixed
inputs and flags.
"""

from __future__ import annotations

import argparse
import sys

from .syntax import Context, GttError
from .grammar import (
    context_to_text, parse_signature, parse_term_file, parse_type,
    term_to_text, type_to_text,
)
from .typecheck import Signature, default_signature, check_type_dyn, infer_type
from .dynamism import DynJudgment, check_derivation, derivation_errors
from .derivio import derivations_to_text, parse_derivations
from .elaborate import elaborate, equal_terms, normalize
from .model import (
    ModelError, check_equipment, check_judgment_semantics, enumerate_values,
    eval_term, first_order, model_signature, tydyn_holds, value_to_text,
)
from .theorems import derive_theorem, theorem_instances, REDUCTION_THEOREMS
from .typecheck import DynCtx, enumerate_types


class _Failure(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_signature(args) -> Signature:
    if getattr(args, "sig", None):
        with open(args.sig) as fh:
            sig = parse_signature(fh.read())
    else:
        sig = default_signature()
    if getattr(args, "retract", None):
        sig = sig.replace(retract=args.retract == "on")
    if getattr(args, "disjointness", None):
        sig = sig.replace(disjointness=args.disjointness == "on")
    return sig


def _read(path: str) -> str:
    with open(path) as fh:
        return fh.read()


def _emit(args, lines: list[str]):
    text = "\n".join(lines) + "\n"
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    sys.stdout.write(text)


def _cmd_check(args, sig):
    ctx, term = parse_term_file(_read(args.file), sig)
    try:
        ty = infer_type(sig, ctx, term)
    except GttError as e:
        raise _Failure(1, f"RESULT FAIL ill-typed: {e}")
    _emit(args, [type_to_text(ty)])
    return 0


def _cmd_dyncheck(args, sig):
    lines_out = []
    status = 0
    for raw in _read(args.file).splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        left, sep, right = line.partition("<=")
        if not sep:
            raise _Failure(2, f"dyncheck lines must be 'A <= B': {line!r}")
        a, b = parse_type(left.strip()), parse_type(right.strip())
        ok = check_type_dyn(sig, a, b)
        lines_out.append(f"RESULT {'PASS' if ok else 'FAIL'} "
                         f"{type_to_text(a)} <= {type_to_text(b)}")
        status = status or (0 if ok else 1)
    _emit(args, lines_out)
    return status


def _cmd_prove(args, sig):
    ds = parse_derivations(_read(args.file), sig)
    lines = []
    status = 0
    for i, d in enumerate(ds):
        errs = derivation_errors(sig, d)
        if errs:
            status = 1
            lines.append(f"RESULT FAIL derivation {i} ({d.rule})")
            lines.extend(f"  {e}" for e in errs)
        else:
            lines.append(f"RESULT PASS derivation {i} ({d.rule}): "
                         f"{d.conclusion.describe()}")
    _emit(args, lines)
    return status


def _cmd_derive(args, sig):
    params = [parse_type(p) if p not in ("app", "prj1", "prj2") else p
              for p in args.params]
    if args.name in ("ur-s", "ul-s", "dr-s", "dl-s"):
        raise _Failure(2, "sequent rules need a premise derivation; "
                          "use the library API for those")
    try:
        ds = derive_theorem(sig, args.name, *params)
    except GttError as e:
        raise _Failure(2, f"cannot derive {args.name}: {e}")
    _emit(args, [derivations_to_text(ds).rstrip("\n")])
    return 0


def _cmd_elaborate(args, sig):
    ctx, term = parse_term_file(_read(args.file), sig)
    out = elaborate(sig, ctx, term)
    _emit(args, [term_to_text(out)])
    return 0


def _cmd_normalize(args, sig):
    ctx, term = parse_term_file(_read(args.file), sig)
    out = normalize(sig, elaborate(sig, ctx, term), ctx)
    _emit(args, [term_to_text(out)])
    return 0


def _cmd_eval(args, sig):
    ctx, term = parse_term_file(_read(args.file), sig)
    if len(ctx):
        raise _Failure(2, "eval expects a closed term")
    try:
        v = eval_term(sig, {}, term)
    except ModelError as e:
        raise _Failure(2, f"not evaluable: {e}")
    _emit(args, [value_to_text(v)])
    return 0


def _cmd_compare(args, sig):
    ctx1, t1 = parse_term_file(_read(args.left), sig)
    ctx2, t2 = parse_term_file(_read(args.right), sig)
    if ctx1.entries != ctx2.entries:
        raise _Failure(2, "compared terms must share one context")
    if args.semantic:
        ty1 = infer_type(sig, ctx1, t1)
        ty2 = infer_type(sig, ctx2, t2)
        msig = model_signature(sig)
        if not tydyn_holds(msig, ty1, ty2):
            raise _Failure(2, f"types not related: {type_to_text(ty1)} "
                              f"<= {type_to_text(ty2)} fails")
        phi = DynCtx.diag(ctx1)
        report = check_judgment_semantics(
            sig, DynJudgment(phi, t1, t2, ty1, ty2), args.bound)
        _emit(args, report.lines())
        return 0 if report.passed else 1
    ok = equal_terms(sig, t1, t2, ctx1)
    _emit(args, [f"RESULT {'PASS' if ok else 'FAIL'} syntactic comparison"])
    return 0 if ok else 1


def _cmd_test_model(args, sig):
    lines = []
    status = 0
    msig = model_signature(sig)
    types = [ty for ty in enumerate_types(sig, args.size) if first_order(ty)]
    pairs = [(a, b) for a in types for b in types if tydyn_holds(msig, a, b)]
    for a, b in pairs:
        report = check_equipment(sig, a, b, args.bound)
        lines.extend(report.lines())
        status = status or (0 if report.passed else 1)
    lines.append(f"RESULT {'PASS' if status == 0 else 'FAIL'} "
                 f"equipment laws over {len(pairs)} pairs")
    _emit(args, lines)
    return status


def _cmd_test_theorems(args, sig):
    lines = []
    counts = {"pass": 0, "fail": 0, "skip": 0}
    for name, params, ds in theorem_instances(sig, args.size):
        if isinstance(ds, str):
            counts["skip"] += 1
            lines.append(f"SKIPPED {name} {ds}")
            continue
        ok = all(check_derivation(sig, d) for d in ds)
        if ok and name in REDUCTION_THEOREMS:
            from .theorems import conclusion_equation
            ctx, lhs, rhs = conclusion_equation(ds[0])
            ok = equal_terms(sig, lhs, rhs, ctx)
            if not ok:
                lines.append(f"RESULT FAIL {name} {params}: sides differ "
                             "after elaboration")
        if ok:
            from .model import derivation_first_order
            for d in ds:
                if derivation_first_order(d):
                    report = check_judgment_semantics(sig, d.conclusion, args.bound)
                    if not report.passed:
                        ok = False
                        lines.extend(report.lines())
                        break
        counts["pass" if ok else "fail"] += 1
        if not ok:
            lines.append(f"RESULT FAIL {name} {params}")
    lines.append(f"RESULT {'PASS' if counts['fail'] == 0 else 'FAIL'} theorems: "
                 f"{counts['pass']} passed, {counts['fail']} failed, "
                 f"{counts['skip']} skipped")
    _emit(args, lines)
    return 0 if counts["fail"] == 0 else 1


def _common_options() -> argparse.ArgumentParser:
    # shared options, accepted both before and after the subcommand; the
    # SUPPRESS default keeps a subcommand from clobbering a value that was
    # already parsed at the top level
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--sig", default=argparse.SUPPRESS,
                        help="signature file (.gttsig)")
    common.add_argument("--retract", choices=("on", "off"),
                        default=argparse.SUPPRESS,
                        help="override the retract flag")
    common.add_argument("--disjointness", choices=("on", "off"),
                        default=argparse.SUPPRESS,
                        help="override the disjointness flag")
    common.add_argument("--out", default=argparse.SUPPRESS,
                        help="also write the report to this file")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(
        prog="gtt", parents=[common],
        description="check gradual typing judgments, derivations and models")
    subparsers = parser.add_subparsers(dest="command", required=True)

    class _Sub:
        def add_parser(self, name, **kw):
            return subparsers.add_parser(name, parents=[common], **kw)

    sub = _Sub()

    p = sub.add_parser("check", help="infer the type of a term file")
    p.add_argument("file")
    p.set_defaults(run=_cmd_check)

    p = sub.add_parser("dyncheck", help="decide 'A <= B' lines")
    p.add_argument("file")
    p.set_defaults(run=_cmd_dyncheck)

    p = sub.add_parser("prove", help="check a derivation file")
    p.add_argument("file")
    p.set_defaults(run=_cmd_prove)

    p = sub.add_parser("derive", help="emit a theorem's derivations")
    p.add_argument("name")
    p.add_argument("params", nargs="*")
    p.set_defaults(run=_cmd_derive)

    p = sub.add_parser("elaborate", help="rewrite casts to ground casts")
    p.add_argument("file")
    p.set_defaults(run=_cmd_elaborate)

    p = sub.add_parser("normalize", help="elaborate and normalize a term")
    p.add_argument("file")
    p.set_defaults(run=_cmd_normalize)

    p = sub.add_parser("eval", help="evaluate a closed term in the tree model")
    p.add_argument("file")
    p.set_defaults(run=_cmd_eval)

    p = sub.add_parser("compare", help="compare two term files")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--syntactic", action="store_true")
    group.add_argument("--semantic", action="store_true")
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(run=_cmd_compare)

    p = sub.add_parser("test-model", help="equipment laws over derivable pairs")
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--size", type=int, default=3)
    p.set_defaults(run=_cmd_test_model)

    p = sub.add_parser("test-theorems", help="derive and cross-check the catalog")
    p.add_argument("--bound", type=int, default=2)
    p.add_argument("--size", type=int, default=3)
    p.set_defaults(run=_cmd_test_theorems)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        sig = _load_signature(args)
        return args.run(args, sig)
    except _Failure as f:
        print(f.args[0], file=sys.stderr if f.code == 2 else sys.stdout)
        return f.code
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except GttError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
