"""Derived theorems about casts, emitted as explicit derivation trees.

Every constructor returns a tuple of derivations (two for equi-dynamism
results, one per direction) built purely from the primitive rules, so
``check_derivation`` is the single source of truth for their correctness.

Catalog:

``identity_up/dn(A)``            casts from a type to itself are identity
``decompose_up/dn(A, A', A'')``  casts factor through any middle type
``fn_cast_up/dn(A, B, A', B')``  function casts are the wrapping terms
``prod_cast_up/dn(A0, A1, ...)`` product casts cast componentwise
``fun_ext(A, B, A', B')``        pointwise-related functions are related
``strict_up(A, A')``             upcasts preserve the error constant
``strict_dn(A, A')``             downcasts do too (needs the retract flag)
``uniqueness(A, A')``            the cast rules pin casts up to order-equality
``galois_unit/counit(A, A')``    round trips over- and under-approximate
``cast_congruence(A, A', B, B')``casts are monotone in their endpoints
``equidyn_iso_1..4(A, B)``       mutually dynamic types are isomorphic
``cast_r(A1, A2, B2)``           general-cast right rule via up-then-down
``cast_l(A1, A2, B1)``           and the left rule (needs the retract flag)
``err_elim(shape, ...)``         eliminators applied to errors give errors
"""

from __future__ import annotations

from typing import Callable, Iterable, Iterator

from .syntax import (
    App, Context, Downcast, DYN, Err, Fn, Lam, Pair, Prod, Proj, Term, Type,
    Upcast, Var, type_size,
)
from .typecheck import DynCtx, Signature, enumerate_types, tydyn_holds
from .dynamism import (
    Derivation, DerivationError, app_mon, cast_cong_dn, comp_node, dl_s,
    dr_s, errbot_node, fn_beta_node, fn_eta_node, lam_mon, pair_mon,
    prj_mon, prod_beta_node, prod_eta_node, refl_node, retract_node,
    trans_node, ul_s, under_dn, ur_s, var_node,
)


class FlagRequired(DerivationError):
    def __init__(self, theorem: str, flag: str):
        super().__init__(f"{theorem} requires the {flag} flag")
        self.flag = flag


class HypothesisError(DerivationError):
    pass


def _need(sig: Signature, a: Type, b: Type, what: str):
    if not tydyn_holds(sig, a, b):
        from .grammar import type_to_text
        raise HypothesisError(
            f"{what}: {type_to_text(a)} <= {type_to_text(b)} is not derivable")


# ---------------------------------------------------------------------------
# Individual constructors
# ---------------------------------------------------------------------------

def identity_up(sig: Signature, a: Type) -> tuple[Derivation, Derivation]:
    from .dynamism import ul_node, ur_node
    return (ul_node(a, a, "x", "x'"), ur_node(a, a, "x", "x'"))


def identity_dn(sig: Signature, a: Type) -> tuple[Derivation, Derivation]:
    from .dynamism import dl_node, dr_node
    return (dl_node(a, a, "x", "x'"), dr_node(a, a, "x", "x'"))


def decompose_up(sig: Signature, a: Type, a1: Type, a2: Type) -> tuple[Derivation, Derivation]:
    """``up[A => A''] x`` is order-equal to ``up[A' => A''] (up[A => A'] x)``."""
    _need(sig, a, a1, "decompose_up")
    _need(sig, a1, a2, "decompose_up")
    x = var_node(DynCtx.of(("x", "x'", a, a)), 0)
    le = ul_s(ur_s(ur_s(x, a1), a2), a2)          # up x <= up (up x)
    ge = ul_s(ul_s(ur_s(x, a2), a1), a2)          # up (up x) <= up x
    return le, ge


def decompose_dn(sig: Signature, a: Type, a1: Type, a2: Type) -> tuple[Derivation, Derivation]:
    """``dn[A'' => A] x`` is order-equal to ``dn[A' => A] (dn[A'' => A'] x)``."""
    _need(sig, a, a1, "decompose_dn")
    _need(sig, a1, a2, "decompose_dn")
    x = var_node(DynCtx.of(("x", "x'", a2, a2)), 0)
    le = dr_s(dr_s(dl_s(x, a), a1), a)            # dn x <= dn (dn x)
    ge = dr_s(dl_s(dl_s(x, a1), a), a)            # dn (dn x) <= dn x
    return le, ge


def _fn_wrap_ctx(fname: str, fty: Type) -> DynCtx:
    return DynCtx.of((fname, fname, fty, fty))


def fn_cast_up(sig: Signature, a: Type, b: Type, a1: Type, b1: Type
               ) -> tuple[Derivation, Derivation]:
    """``up[A->B => A'->B'] f`` is the wrapper ``\\x':A'. up (f (dn x'))``."""
    _need(sig, a, a1, "fn_cast_up")
    _need(sig, b, b1, "fn_cast_up")
    f, f1 = Fn(a, b), Fn(a1, b1)
    fctx = Context.of(("f", f))

    # up f <= wrapper
    phi = DynCtx.of(("f", "f", f, f), ("x", "x'", a, a1))
    core = ur_s(app_mon(var_node(phi, 0), dr_s(var_node(phi, 1), a)), b1)
    body = trans_node(fn_eta_node(fctx, Var("f"), f, "fwd", binder="x"),
                      lam_mon(core))
    le = ul_s(body, f1)

    # wrapper <= up f
    phi2 = DynCtx.of(("f", "f", f, f), ("x'", "x'", a1, a1))
    core2 = ul_s(app_mon(ur_s(var_node(phi2, 0), f1), dl_s(var_node(phi2, 1), a)), b1)
    up_f = Upcast(f, f1, Var("f"))
    ge = trans_node(lam_mon(core2), fn_eta_node(fctx, up_f, f1, "bwd", binder="x'"))
    return le, ge


def fn_cast_dn(sig: Signature, a: Type, b: Type, a1: Type, b1: Type
               ) -> tuple[Derivation, Derivation]:
    """``dn[A'->B' => A->B] f`` is the wrapper ``\\x:A. dn (f (up x))``."""
    _need(sig, a, a1, "fn_cast_dn")
    _need(sig, b, b1, "fn_cast_dn")
    f, f1 = Fn(a, b), Fn(a1, b1)
    fctx = Context.of(("f", f1))

    # dn f <= wrapper
    phi = DynCtx.of(("f", "f", f1, f1), ("x", "x", a, a))
    core = dr_s(app_mon(dl_s(var_node(phi, 0), f), ur_s(var_node(phi, 1), a1)), b)
    dn_f = Downcast(f, f1, Var("f"))
    le = trans_node(fn_eta_node(fctx, dn_f, f, "fwd", binder="x"), lam_mon(core))

    # wrapper <= dn f
    phi2 = DynCtx.of(("f", "f", f1, f1), ("x", "x'", a, a1))
    core2 = dl_s(app_mon(var_node(phi2, 0), ul_s(var_node(phi2, 1), a1)), b)
    ge = dr_s(trans_node(lam_mon(core2),
                         fn_eta_node(fctx, Var("f"), f1, "bwd", binder="x'")), f)
    return le, ge


def prod_cast_up(sig: Signature, a0: Type, a1: Type, b0: Type, b1: Type
                 ) -> tuple[Derivation, Derivation]:
    """``up[A0*A1 => B0*B1] p`` casts componentwise."""
    _need(sig, a0, b0, "prod_cast_up")
    _need(sig, a1, b1, "prod_cast_up")
    p, p1 = Prod(a0, a1), Prod(b0, b1)
    pctx = Context.of(("p", p))
    phi = DynCtx.of(("p", "p", p, p))

    # up p <= (up (fst p), up (snd p))
    comps = pair_mon(ur_s(prj_mon(var_node(phi, 0), 1), b0),
                     ur_s(prj_mon(var_node(phi, 0), 2), b1))
    le = ul_s(trans_node(prod_eta_node(pctx, Var("p"), p, "fwd"), comps), p1)

    # (up (fst p), up (snd p)) <= up p
    up_p = ur_s(var_node(phi, 0), p1)
    comps2 = pair_mon(ul_s(prj_mon(up_p, 1), b0), ul_s(prj_mon(up_p, 2), b1))
    up_term = Upcast(p, p1, Var("p"))
    ge = trans_node(comps2, prod_eta_node(pctx, up_term, p1, "bwd"))
    return le, ge


def prod_cast_dn(sig: Signature, a0: Type, a1: Type, b0: Type, b1: Type
                 ) -> tuple[Derivation, Derivation]:
    """``dn[B0*B1 => A0*A1] p`` casts componentwise."""
    _need(sig, a0, b0, "prod_cast_dn")
    _need(sig, a1, b1, "prod_cast_dn")
    p, p1 = Prod(a0, a1), Prod(b0, b1)
    pctx = Context.of(("p", p1))
    phi = DynCtx.of(("p", "p", p1, p1))

    # dn p <= (dn (fst p), dn (snd p))
    dn_p = dl_s(var_node(phi, 0), p)
    comps = pair_mon(dr_s(prj_mon(dn_p, 1), a0), dr_s(prj_mon(dn_p, 2), a1))
    dn_term = Downcast(p, p1, Var("p"))
    le = trans_node(prod_eta_node(pctx, dn_term, p, "fwd"), comps)

    # (dn (fst p), dn (snd p)) <= dn p
    comps2 = pair_mon(dl_s(prj_mon(var_node(phi, 0), 1), a0),
                      dl_s(prj_mon(var_node(phi, 0), 2), a1))
    ge = dr_s(trans_node(comps2, prod_eta_node(pctx, Var("p"), p1, "bwd")), p)
    return le, ge


def fun_ext(sig: Signature, a: Type, b: Type, a1: Type, b1: Type
            ) -> tuple[Derivation]:
    """Two functions are related when applying them to related inputs
    yields related outputs; instantiated at a pair of function variables."""
    _need(sig, a, a1, "fun_ext")
    _need(sig, b, b1, "fun_ext")
    f, f1 = Fn(a, b), Fn(a1, b1)
    phi = DynCtx.of(("f", "f'", f, f1), ("x", "x'", a, a1))
    pointwise = app_mon(var_node(phi, 0), var_node(phi, 1))
    d = trans_node(
        trans_node(fn_eta_node(Context.of(("f", f)), Var("f"), f, "fwd", binder="x"),
                   lam_mon(pointwise)),
        fn_eta_node(Context.of(("f'", f1)), Var("f'"), f1, "bwd", binder="x'"))
    return (d,)


def err_lift(sig: Signature, ctx: Context, a: Type, a1: Type, t1: Term) -> Derivation:
    """``err[A] <= t' : A <= A'`` for any ``t' : A'``, via a downcast detour."""
    _need(sig, a, a1, "err_lift")
    return trans_node(errbot_node(ctx, a, Downcast(a, a1, t1)),
                      dl_s(refl_node(ctx, t1, a1), a))


def strict_up(sig: Signature, a: Type, a1: Type) -> tuple[Derivation, Derivation]:
    """``up err`` is order-equal to ``err``."""
    _need(sig, a, a1, "strict_up")
    ctx = Context()
    le = ul_s(err_lift(sig, ctx, a, a1, Err(a1)), a1)
    ge = errbot_node(ctx, a1, Upcast(a, a1, Err(a)))
    return le, ge


def strict_dn(sig: Signature, a: Type, a1: Type) -> tuple[Derivation, Derivation]:
    """``dn err`` is order-equal to ``err``; the interesting direction
    composes the retract axiom with upcast strictness."""
    if not sig.retract:
        raise FlagRequired("strict_dn", "retract")
    _need(sig, a, a1, "strict_dn")
    ctx = Context()
    steps = under_dn(a, a1, errbot_node(ctx, a1, Upcast(a, a1, Err(a))))
    collapse = comp_node(retract_node(a, a1, "x", "x"),
                         {"x": Err(a)}, {"x": Err(a)},
                         (refl_node(ctx, Err(a), a),))
    le = trans_node(steps, collapse)
    ge = errbot_node(ctx, a, Downcast(a, a1, Err(a1)))
    return le, ge


def uniqueness(sig: Signature, a: Type, a1: Type) -> tuple[Derivation, Derivation]:
    """The characterizing rules pin the casts: any two terms satisfying
    them are order-equal, here witnessed by relating a cast to itself via
    one side's introduction and the other's elimination."""
    _need(sig, a, a1, "uniqueness")
    up = ul_s(ur_s(var_node(DynCtx.of(("x", "x'", a, a)), 0), a1), a1)
    dn = cast_cong_dn(a, a1, "y", "y'")
    return up, dn


def galois_unit(sig: Signature, a: Type, a1: Type) -> tuple[Derivation]:
    """``x <= dn (up x)``."""
    _need(sig, a, a1, "galois_unit")
    return (dr_s(ur_s(var_node(DynCtx.of(("x", "x'", a, a)), 0), a1), a),)


def galois_counit(sig: Signature, a: Type, a1: Type) -> tuple[Derivation]:
    """``up (dn x) <= x``."""
    _need(sig, a, a1, "galois_counit")
    return (ul_s(dl_s(var_node(DynCtx.of(("x", "x'", a1, a1)), 0), a), a1),)


def cast_congruence(sig: Signature, a: Type, a1: Type, b: Type, b1: Type
                    ) -> tuple[Derivation, Derivation]:
    """Related inputs give related casts across a dynamism square."""
    _need(sig, a, a1, "cast_congruence")
    _need(sig, b, b1, "cast_congruence")
    _need(sig, a, b, "cast_congruence")
    _need(sig, a1, b1, "cast_congruence")
    up = ul_s(ur_s(var_node(DynCtx.of(("x", "y", a, b)), 0), b1), a1)
    dn = dr_s(dl_s(var_node(DynCtx.of(("x'", "y'", a1, b1)), 0), a), b)
    return up, dn


def _need_equidyn(sig: Signature, a: Type, b: Type, what: str):
    _need(sig, a, b, what)
    _need(sig, b, a, what)


def equidyn_iso_1(sig: Signature, a: Type, b: Type) -> tuple[Derivation, Derivation]:
    """``up[B => A] (up[A => B] x)`` is order-equal to ``x``."""
    _need_equidyn(sig, a, b, "equidyn_iso_1")
    x = var_node(DynCtx.of(("x", "x'", a, a)), 0)
    le = ul_s(ul_s(x, b), a)
    ge = ur_s(ur_s(x, b), a)
    return le, ge


def equidyn_iso_2(sig: Signature, a: Type, b: Type) -> tuple[Derivation, Derivation]:
    """``dn[B => A] (dn[A => B] x)`` is order-equal to ``x``."""
    _need_equidyn(sig, a, b, "equidyn_iso_2")
    x = var_node(DynCtx.of(("x", "x'", a, a)), 0)
    le = dl_s(dl_s(x, b), a)
    ge = dr_s(dr_s(x, b), a)
    return le, ge


def equidyn_iso_3(sig: Signature, a: Type, b: Type) -> tuple[Derivation, Derivation]:
    """``dn[B => A] (up[A => B] x)`` is order-equal to ``x``; no retract
    axiom needed because the two types sit below each other."""
    _need_equidyn(sig, a, b, "equidyn_iso_3")
    x = var_node(DynCtx.of(("x", "x'", a, a)), 0)
    le = dl_s(ul_s(x, b), a)
    ge = dr_s(ur_s(x, b), a)
    return le, ge


def equidyn_iso_4(sig: Signature, a: Type, b: Type) -> tuple[Derivation, Derivation]:
    """``up[B => A] y`` is order-equal to ``dn[A => B] y``."""
    _need_equidyn(sig, a, b, "equidyn_iso_4")
    y = var_node(DynCtx.of(("y", "y'", b, b)), 0)
    le = dr_s(ul_s(y, a), a)
    ge = ur_s(dl_s(y, a), a)
    return le, ge


def cast_r(sig: Signature, a1: Type, a2: Type, b2: Type) -> tuple[Derivation]:
    """From ``x1 <= x2 : A1 <= A2``, the general cast of the right side to
    ``B2`` (up through ``?`` then down) stays above ``x1``."""
    _need(sig, a1, a2, "cast_r")
    _need(sig, a1, b2, "cast_r")
    _need(sig, a2, DYN, "cast_r")
    _need(sig, b2, DYN, "cast_r")
    prem = var_node(DynCtx.of(("x1", "x2", a1, a2)), 0)
    return (dr_s(ur_s(prem, DYN), b2),)


def cast_l(sig: Signature, a1: Type, a2: Type, b1: Type) -> tuple[Derivation]:
    """From ``x1 <= x2 : A1 <= A2``, the general cast of the left side to
    ``B1 <= A2`` stays below ``x2``.  Routes the cast through ``A2``
    instead of ``?`` using decomposition and the retract axiom."""
    if not sig.retract:
        raise FlagRequired("cast_l", "retract")
    _need(sig, a1, a2, "cast_l")
    _need(sig, b1, a2, "cast_l")
    _need(sig, a1, DYN, "cast_l")
    _need(sig, b1, DYN, "cast_l")

    ctx1 = Context.of(("x1", a1))
    x1 = Var("x1")
    up_a1 = Upcast(a1, DYN, x1)                       # up[A1 => ?] x1
    up_fac = Upcast(a2, DYN, Upcast(a1, a2, x1))  # up[A2 => ?] (up[A1 => A2] x1)

    # dn[? => B1] (up[A1 => ?] x1)  <=  dn[? => B1] (up[A2 => ?] (up[A1 => A2] x1))
    dec_up = comp_node(decompose_up(sig, a1, a2, DYN)[0],
                       {"x": x1}, {"x'": x1}, (refl_node(ctx1, x1, a1),))
    step1 = under_dn(b1, DYN, dec_up)

    # ... <= dn[A2 => B1] (dn[? => A2] (up[A2 => ?] (up[A1 => A2] x1)))
    dec_dn = comp_node(decompose_dn(sig, b1, a2, DYN)[0],
                       {"x": up_fac}, {"x'": up_fac},
                       (refl_node(ctx1, up_fac, DYN),))

    # retract at A2 <= ? collapses the middle round trip under dn[A2 => B1]
    inner = Upcast(a1, a2, x1)
    rt = comp_node(retract_node(a2, DYN, "z", "z"),
                   {"z": inner}, {"z": inner}, (refl_node(ctx1, inner, a2),))
    step3 = under_dn(b1, a2, rt)

    factor = trans_node(trans_node(step1, dec_dn), step3)

    prem = var_node(DynCtx.of(("x1", "x2", a1, a2)), 0)
    core = dl_s(ul_s(prem, a2), b1)
    return (trans_node(factor, core),)


def err_elim(sig: Signature, shape: str, a: Type, b: Type
             ) -> tuple[Derivation, Derivation]:
    """Applying or projecting an error gives an error."""
    if shape == "app":
        fty = Fn(a, b)
        ctx = Context.of(("u", a))
        phi = DynCtx.diag(ctx)
        redex = App(Lam("x", a, Err(b)), Var("u"))
        le = trans_node(
            app_mon(errbot_node(ctx, fty, Lam("x", a, Err(b))), var_node(phi, 0)),
            fn_beta_node(ctx, redex, b, "fwd"))
        ge = errbot_node(ctx, b, App(Err(fty), Var("u")))
        return le, ge
    if shape in ("prj1", "prj2"):
        i = 1 if shape == "prj1" else 2
        pty = Prod(a, b)
        ctx = Context()
        target = a if i == 1 else b
        redex = Proj(i, Pair(Err(a), Err(b)))
        le = trans_node(
            prj_mon(errbot_node(ctx, pty, Pair(Err(a), Err(b))), i),
            prod_beta_node(ctx, redex, target, "fwd"))
        ge = errbot_node(ctx, target, Proj(i, Err(pty)))
        return le, ge
    raise DerivationError(f"unknown err_elim shape {shape!r}")


# ---------------------------------------------------------------------------
# Catalog and enumeration
# ---------------------------------------------------------------------------

# name -> (parameter kind, builder).  Parameter kinds drive enumeration:
#   "ty"      one type
#   "pair"    A <= A'
#   "chain"   A <= A' <= A''
#   "pair2"   (A <= A', B <= B')
#   "square"  A <= A', B <= B', A <= B, A' <= B'
#   "equi"    A <= B and B <= A
#   "tri_r"   A1 <= A2, A1 <= B2
#   "tri_l"   A1 <= A2, B1 <= A2
#   "errsh"   an eliminator shape plus two types
THEOREMS: dict[str, tuple[str, Callable]] = {
    "identity_up": ("ty", identity_up),
    "identity_dn": ("ty", identity_dn),
    "decompose_up": ("chain", decompose_up),
    "decompose_dn": ("chain", decompose_dn),
    "fn_cast_up": ("pair2", fn_cast_up),
    "fn_cast_dn": ("pair2", fn_cast_dn),
    "prod_cast_up": ("pair2", prod_cast_up),
    "prod_cast_dn": ("pair2", prod_cast_dn),
    "fun_ext": ("pair2", fun_ext),
    "strict_up": ("pair", strict_up),
    "strict_dn": ("pair", strict_dn),
    "uniqueness": ("pair", uniqueness),
    "galois_unit": ("pair", galois_unit),
    "galois_counit": ("pair", galois_counit),
    "cast_congruence": ("square", cast_congruence),
    "equidyn_iso_1": ("equi", equidyn_iso_1),
    "equidyn_iso_2": ("equi", equidyn_iso_2),
    "equidyn_iso_3": ("equi", equidyn_iso_3),
    "equidyn_iso_4": ("equi", equidyn_iso_4),
    "cast_r": ("tri_r", cast_r),
    "cast_l": ("tri_l", cast_l),
    "err_elim": ("errsh", err_elim),
}

# The subset whose two sides must also agree under cast elaboration.
REDUCTION_THEOREMS = (
    "identity_up", "identity_dn", "decompose_up", "decompose_dn",
    "fn_cast_up", "fn_cast_dn", "prod_cast_up", "prod_cast_dn",
    "strict_up", "strict_dn",
)


def derive_theorem(sig: Signature, name: str, *params) -> tuple[Derivation, ...]:
    if name not in THEOREMS:
        raise DerivationError(f"unknown theorem {name!r}")
    return THEOREMS[name][1](sig, *params)


def conclusion_equation(d: Derivation) -> tuple[Context, Term, Term]:
    """A derivation's conclusion as an equation over its left context,
    with right-side variables renamed to their left partners.  Only
    meaningful when the context pairs variables at equal types, as the
    reduction theorems do."""
    from .syntax import free_vars, substitute
    j = d.conclusion
    ren = {xr: Var(xl) for xl, xr, _, _ in j.phi}
    for x in free_vars(j.right):
        ren.setdefault(x, Var(x))
    return j.phi.left_ctx(), j.left, substitute(j.right, ren)


def _params_for(sig: Signature, kind: str, types: list[Type]) -> Iterator[tuple]:
    pairs = [(a, b) for a in types for b in types if tydyn_holds(sig, a, b)]
    if kind == "ty":
        for a in types:
            yield (a,)
    elif kind == "pair":
        yield from pairs
    elif kind == "chain":
        for a, a1 in pairs:
            for a2 in types:
                if tydyn_holds(sig, a1, a2):
                    yield (a, a1, a2)
    elif kind == "pair2":
        for a, a1 in pairs:
            for b, b1 in pairs:
                yield (a, b, a1, b1)
    elif kind == "square":
        for a, a1 in pairs:
            for b, b1 in pairs:
                if tydyn_holds(sig, a, b) and tydyn_holds(sig, a1, b1):
                    yield (a, a1, b, b1)
    elif kind == "equi":
        for a, b in pairs:
            if tydyn_holds(sig, b, a):
                yield (a, b)
    elif kind == "tri_r":
        for a1, a2 in pairs:
            for b2 in types:
                if tydyn_holds(sig, a1, b2):
                    yield (a1, a2, b2)
    elif kind == "tri_l":
        for a1, a2 in pairs:
            for b1 in types:
                if tydyn_holds(sig, b1, a2):
                    yield (a1, a2, b1)
    elif kind == "errsh":
        for shape in ("app", "prj1", "prj2"):
            for a in types:
                for b in types:
                    yield (shape, a, b)
    else:  # pragma: no cover
        raise ValueError(kind)


def judgment_types(d: Derivation) -> Iterator[Type]:
    """Every type mentioned by a derivation's root judgment: endpoints,
    context entries, and annotations inside the two terms."""
    from .syntax import cast_annotations
    j = d.conclusion
    yield j.type_left
    yield j.type_right
    for _, _, tl, tr in j.phi:
        yield tl
        yield tr
    yield from cast_annotations(j.left)
    yield from cast_annotations(j.right)


def theorem_instances(sig: Signature, size: int = 3,
                      names: Iterable[str] | None = None,
                      types: list[Type] | None = None
                      ) -> Iterator[tuple[str, tuple, tuple[Derivation, ...] | str]]:
    """Instantiate every catalog theorem at every hypothesis-satisfying
    parameter tuple whose instantiated conclusions mention only types of
    the given size or smaller.

    Yields ``(name, params, derivations)``; a flag-gated theorem whose
    flag is off yields the string ``"SKIPPED(flag)"`` instead.
    """
    if types is None:
        types = enumerate_types(sig, size)
    for name in (names or THEOREMS):
        kind, _ = THEOREMS[name]
        for params in _params_for(sig, kind, types):
            try:
                ds = derive_theorem(sig, name, *params)
            except FlagRequired:
                yield name, params, "SKIPPED(flag)"
                continue
            if all(type_size(ty) <= size
                   for d in ds for ty in judgment_types(d)):
                yield name, params, ds
