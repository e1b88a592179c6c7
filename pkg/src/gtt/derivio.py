"""Reading and writing derivation files (``.gttd``).

A file holds one or more s-expressions, one per derivation::

    (rule
      (concl (ctx (x x' {Nat} {?}) ...) {left} {right} {A} {A'})
      (aux ...)            ; rule-specific, may be absent
      premise...)

Aux forms: ``(aux fwd)`` / ``(aux bwd)`` for the beta and eta rules,
``(aux 1)`` / ``(aux 2)`` for projection congruence, ``(aux N)`` for an
axiom index, ``(aux (sub (x {t}) ...) (sub (x' {t}) ...))`` for the
substitution rule, and ``(aux (mid (ctx (x {A}) ...) {t} {A}))`` for the
stored middle judgment of transitivity.
"""

from __future__ import annotations

from .grammar import (
    ParseError, SexpList, parse_sexps, parse_term, parse_type, sexp_to_text,
    term_to_text, type_to_text,
)
from .syntax import Context, Term, Type
from .typecheck import DynCtx, Signature
from .dynamism import Derivation, DynJudgment


def _chunk(x) -> str:
    if isinstance(x, tuple) and x and x[0] == "chunk":
        return x[1]
    raise ParseError(f"expected a {{...}} chunk, found {x!r}")


def _read_dynctx(sx, sig) -> DynCtx:
    if not (isinstance(sx, SexpList) and sx and sx[0] == "ctx"):
        raise ParseError("expected (ctx ...)")
    entries = []
    for entry in sx[1:]:
        if not (isinstance(entry, SexpList) and len(entry) == 4):
            raise ParseError("context entry must be (x x' {A} {A'})")
        xl, xr = entry[0], entry[1]
        entries.append((xl, xr,
                        parse_type(_chunk(entry[2])),
                        parse_type(_chunk(entry[3]))))
    return DynCtx(tuple(entries))


def _read_concl(sx, sig) -> DynJudgment:
    if not (isinstance(sx, SexpList) and len(sx) == 6 and sx[0] == "concl"):
        raise ParseError("expected (concl (ctx ...) {t} {t'} {A} {A'})")
    phi = _read_dynctx(sx[1], sig)
    return DynJudgment(
        phi,
        parse_term(_chunk(sx[2]), sig),
        parse_term(_chunk(sx[3]), sig),
        parse_type(_chunk(sx[4])),
        parse_type(_chunk(sx[5])))


def _read_aux(sx, sig):
    body = sx[1:]
    if len(body) == 1 and isinstance(body[0], str):
        word = body[0]
        if word in ("fwd", "bwd"):
            return word
        if not word.isdigit():
            raise ParseError(f"bad aux atom {word!r}")
        return int(word)
    if len(body) == 2 and all(isinstance(b, SexpList) and b and b[0] == "sub"
                              for b in body):
        def read_sub(b):
            return tuple((e[0], parse_term(_chunk(e[1]), sig)) for e in b[1:])
        return (read_sub(body[0]), read_sub(body[1]))
    if len(body) == 1 and isinstance(body[0], SexpList) and body[0][0] == "mid":
        mid = body[0]
        ctx_sx = mid[1]
        entries = tuple((e[0], parse_type(_chunk(e[1]))) for e in ctx_sx[1:])
        return (Context(entries), parse_term(_chunk(mid[2]), sig),
                parse_type(_chunk(mid[3])))
    raise ParseError(f"unrecognized aux form: {sx!r}")


def sexp_to_derivation(sx, sig: Signature) -> Derivation:
    if not (isinstance(sx, SexpList) and sx and isinstance(sx[0], str)):
        raise ParseError("derivation must be (rule (concl ...) ...)")
    rule = sx[0]
    if len(sx) < 2:
        raise ParseError(f"rule {rule} is missing its conclusion")
    conclusion = _read_concl(sx[1], sig)
    aux = None
    rest = sx[2:]
    if rest and isinstance(rest[0], SexpList) and rest[0] and rest[0][0] == "aux":
        aux = _read_aux(rest[0], sig)
        rest = rest[1:]
    premises = tuple(sexp_to_derivation(p, sig) for p in rest)
    return Derivation(rule, conclusion, premises, aux)


def parse_derivations(text: str, sig: Signature) -> list[Derivation]:
    return [sexp_to_derivation(sx, sig) for sx in parse_sexps(text)]


def _ctx_sexp(phi: DynCtx) -> SexpList:
    out = SexpList(["ctx"])
    for xl, xr, tl, tr in phi:
        out.append(SexpList([
            xl, xr,
            ("chunk", type_to_text(tl)),
            ("chunk", type_to_text(tr))]))
    return out


def _concl_sexp(j: DynJudgment) -> SexpList:
    return SexpList([
        "concl", _ctx_sexp(j.phi),
        ("chunk", term_to_text(j.left)),
        ("chunk", term_to_text(j.right)),
        ("chunk", type_to_text(j.type_left)),
        ("chunk", type_to_text(j.type_right))])


def _aux_sexp(aux) -> SexpList | None:
    if aux is None:
        return None
    if isinstance(aux, str):
        return SexpList(["aux", aux])
    if isinstance(aux, int):
        return SexpList(["aux", str(aux)])
    if isinstance(aux, tuple) and len(aux) == 2 and all(
            isinstance(side, tuple) for side in aux):
        subs = []
        for side in aux:
            sx = SexpList(["sub"])
            for name, img in side:
                sx.append(SexpList([name, ("chunk", term_to_text(img))]))
            subs.append(sx)
        return SexpList(["aux", *subs])
    if isinstance(aux, tuple) and len(aux) == 3:
        ctx, term, ty = aux
        ctx_sx = SexpList(["ctx"])
        for name, t in ctx:
            ctx_sx.append(SexpList([name, ("chunk", type_to_text(t))]))
        return SexpList(["aux", SexpList([
            "mid", ctx_sx,
            ("chunk", term_to_text(term)),
            ("chunk", type_to_text(ty))])])
    raise ValueError(f"cannot serialize aux {aux!r}")


def derivation_to_sexp(d: Derivation) -> SexpList:
    out = SexpList([d.rule, _concl_sexp(d.conclusion)])
    aux = _aux_sexp(d.aux)
    if aux is not None:
        out.append(aux)
    out.extend(derivation_to_sexp(p) for p in d.premises)
    return out


def derivations_to_text(ds) -> str:
    return "\n\n".join(sexp_to_text(derivation_to_sexp(d)) for d in ds) + "\n"
