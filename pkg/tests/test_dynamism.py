import random

import pytest

from gtt.grammar import parse_term, parse_type
from gtt.syntax import (
    App, Context, DYN, Downcast, Err, Fn, Lam, NAT, Pair, Prod, Proj, UNIT,
    UNITVAL, Upcast, Var, num,
)
from gtt.typecheck import DynCtx, Signature, default_signature
from gtt.dynamism import (
    Derivation, DynJudgment, app_mon, check_derivation, derivation_errors,
    derive_sequent, dl_node, dr_node, errbot_node, fn_beta_node, fn_eta_node,
    lam_mon, pair_mon, prj_mon, prod_beta_node, prod_eta_node, refl_node,
    retract_node, trans_node, ul_node, unit_eta_node, ur_node, var_node,
    disjoint_node,
)

SIG = default_signature()
NO_RETRACT = default_signature(retract=False)
NO_DISJ = default_signature(disjointness=False)


# -- primitive rule examples ---------------------------------------------------

def test_errbot_accepts():
    d = errbot_node(Context(), NAT, num(0))
    assert check_derivation(SIG, d)


def test_refl_accepts():
    ctx = Context.of(("x", NAT))
    assert check_derivation(SIG, refl_node(ctx, Var("x"), NAT))


def test_errbot_wrong_side_rejected():
    # err must be on the left
    j = DynJudgment(DynCtx(), num(0), Err(NAT), NAT, NAT)
    d = Derivation("err-bot", j)
    errs = derivation_errors(SIG, d)
    assert errs and "err-bot" in errs[0]


def test_var_requires_context_entry():
    phi = DynCtx.of(("x", "x'", NAT, DYN))
    assert check_derivation(SIG, var_node(phi, 0))
    bad = Derivation("var", DynJudgment(phi, Var("x'"), Var("x"), NAT, DYN))
    assert not check_derivation(SIG, bad)


def test_presupposition_failure_reported_with_path():
    # inner premise is ill-typed: unbound variable
    bad_inner = Derivation(
        "refl", DynJudgment(DynCtx(), Var("ghost"), Var("ghost"), NAT, NAT))
    outer = trans_node(bad_inner, bad_inner)
    errs = derivation_errors(SIG, outer)
    assert any(e.startswith("root.0") for e in errs)
    assert any("ghost" in e for e in errs)


def test_cast_rules_accept():
    assert check_derivation(SIG, ur_node(NAT, DYN))
    assert check_derivation(SIG, ul_node(NAT, DYN))
    assert check_derivation(SIG, dl_node(NAT, DYN))
    assert check_derivation(SIG, dr_node(NAT, DYN))


def test_cast_rules_need_derivable_endpoints():
    assert not check_derivation(SIG, ur_node(DYN, NAT))  # ? <= Nat fails


def test_retract_flag_discipline():
    d = retract_node(NAT, DYN)
    assert check_derivation(SIG, d)
    errs = derivation_errors(NO_RETRACT, d)
    assert errs and "retract" in errs[0]


def test_retract_inside_larger_tree_rejected_without_flag():
    rt = retract_node(NAT, DYN)
    from gtt.dynamism import comp_node
    wrapped = comp_node(rt, {"x": num(0)}, {"x": num(0)},
                        (refl_node(Context(), num(0), NAT),))
    assert check_derivation(SIG, wrapped)
    assert not check_derivation(NO_RETRACT, wrapped)


def test_disjoint_node():
    d = disjoint_node(Prod(DYN, DYN), NAT)
    assert check_derivation(SIG, d)
    assert not check_derivation(NO_DISJ, d)
    same_tag = disjoint_node(NAT, NAT)
    assert not check_derivation(SIG, same_tag)
    not_ground = disjoint_node(Prod(NAT, DYN), NAT)
    assert not check_derivation(SIG, not_ground)


def test_disjoint_rejects_related_tags():
    sig = Signature(base_types=("Nat", "Even"),
                    tydyn_axioms=((parse_type("Even"), NAT),),
                    base_codes={"Nat": (0, 100), "Even": (100, 200)})
    d = disjoint_node(NAT, parse_type("Even"))
    assert not check_derivation(sig, d)


def test_beta_eta_rules():
    ctx = Context.of(("u", NAT))
    redex = App(Lam("x", NAT, Var("x")), Var("u"))
    assert check_derivation(SIG, fn_beta_node(ctx, redex, NAT, "fwd"))
    assert check_derivation(SIG, fn_beta_node(ctx, redex, NAT, "bwd"))

    fctx = Context.of(("f", Fn(NAT, DYN)))
    assert check_derivation(SIG, fn_eta_node(fctx, Var("f"), Fn(NAT, DYN), "fwd"))
    assert check_derivation(SIG, fn_eta_node(fctx, Var("f"), Fn(NAT, DYN), "bwd"))

    pctx = Context.of(("p", Prod(NAT, UNIT)))
    redex2 = Proj(2, Pair(Var("p"), UNITVAL))
    assert check_derivation(
        SIG, prod_beta_node(Context.of(("p", NAT)), Proj(1, Pair(Var("p"), num(0))), NAT))
    assert check_derivation(SIG, prod_eta_node(pctx, Var("p"), Prod(NAT, UNIT)))
    assert check_derivation(SIG, unit_eta_node(Context.of(("u", UNIT)), Var("u")))
    assert check_derivation(SIG, unit_eta_node(Context(), Err(UNIT), "bwd"))


def test_congruence_rules():
    phi = DynCtx.of(("x", "x'", NAT, DYN))
    inner = var_node(phi, 0)
    lam = lam_mon(inner)
    assert check_derivation(SIG, lam)
    assert lam.conclusion.type_left == Fn(NAT, NAT)

    fphi = DynCtx.of(("f", "f'", Fn(NAT, NAT), Fn(DYN, DYN)),
                     ("x", "x'", NAT, DYN))
    apm = app_mon(var_node(fphi, 0), var_node(fphi, 1))
    assert check_derivation(SIG, apm)

    pm = pair_mon(var_node(phi, 0), var_node(phi, 0))
    assert check_derivation(SIG, pm)

    pphi = DynCtx.of(("p", "p'", Prod(NAT, NAT), Prod(DYN, DYN)))
    assert check_derivation(SIG, prj_mon(var_node(pphi, 0), 1))
    assert check_derivation(SIG, prj_mon(var_node(pphi, 0), 2))


# -- transitivity composition --------------------------------------------------

def test_trans_composes_accepted_derivations():
    d1 = ur_node(NAT, NAT, "x", "x")        # x <= up[Nat => Nat] x
    phi2 = DynCtx.of(("x", "x'", NAT, NAT))
    d2 = ul_node(NAT, NAT, "x", "x'")       # up x <= x'
    t = trans_node(d1, d2)
    assert check_derivation(SIG, t)
    assert t.conclusion.left == Var("x") and t.conclusion.right == Var("x'")


def test_trans_mismatched_middle_rejected():
    d1 = ur_node(NAT, DYN, "x", "x")     # ... <= up x : Nat <= ?
    d2 = dl_node(NAT, DYN, "x", "x'")    # dn x <= x' : Nat <= ?
    t = trans_node(d1, d2)
    errs = derivation_errors(SIG, t)
    assert any("middle" in e for e in errs)


def test_trans_stored_middle_is_validated():
    d1 = ur_node(NAT, NAT, "x", "x")
    d2 = ul_node(NAT, NAT, "x", "x'")
    good = trans_node(d1, d2)
    tampered = Derivation("trans", good.conclusion, good.premises,
                          aux=(Context.of(("x", DYN)), Var("x"), DYN))
    errs = derivation_errors(SIG, tampered)
    assert any("middle judgment" in e for e in errs)


# -- sequent-style rules ---------------------------------------------------------

def test_ul_s_example():
    phi = DynCtx.of(("x", "x'", NAT, NAT))
    prem = var_node(phi, 0)
    d = derive_sequent("UL_S", prem, DYN)
    # hypothesis Nat <= ? <= Nat fails: conclusion presupposes mid <= right type
    assert not check_derivation(SIG, d)

    prem2 = var_node(DynCtx.of(("x", "x'", NAT, DYN)), 0)
    d2 = derive_sequent("UL_S", prem2, DYN)
    assert check_derivation(SIG, d2)
    assert d2.conclusion.left == Upcast(NAT, DYN, Var("x"))
    assert d2.conclusion.type_left == DYN


def test_ur_s_degenerate_chain_collapses():
    prem = var_node(DynCtx.of(("x", "x'", NAT, NAT)), 0)
    d = derive_sequent("UR_S", prem, NAT)
    assert check_derivation(SIG, d)
    assert d.conclusion.right == Upcast(NAT, NAT, Var("x'"))


def test_dr_s_on_errbot_through_dyn():
    # err[Nat] <= 0 : Nat lifts to err <= dn[? => Nat] (up[Nat => ?] 0)
    prem = errbot_node(Context(), NAT, num(0))
    lifted = derive_sequent("UR_S", prem, DYN)
    d = derive_sequent("DR_S", lifted, NAT)
    assert check_derivation(SIG, d)
    assert d.conclusion.right == Downcast(NAT, DYN, Upcast(NAT, DYN, num(0)))
    assert d.conclusion.left == Err(NAT)


def test_dl_s_side_condition_violation():
    prem = var_node(DynCtx.of(("x", "x'", NAT, NAT)), 0)
    d = derive_sequent("DL_S", prem, DYN)  # ? <= Nat is needed, fails
    assert not check_derivation(SIG, d)
    # with a signature in hand the violation surfaces immediately
    with pytest.raises(Exception, match="side condition"):
        derive_sequent("DL_S", prem, DYN, SIG)
    # valid side conditions still build
    ok = derive_sequent("UR_S", prem, DYN, SIG)
    assert check_derivation(SIG, ok)


def test_unknown_sequent_rule():
    prem = var_node(DynCtx.of(("x", "x'", NAT, NAT)), 0)
    with pytest.raises(Exception):
        derive_sequent("XX_S", prem, NAT)


# -- schema fuzzing: single-field corruption is always rejected -----------------

def _corruptions(d: Derivation):
    j = d.conclusion
    yield Derivation(d.rule, DynJudgment(j.phi, j.right, j.left,
                                         j.type_right, j.type_left),
                     d.premises, d.aux)
    yield Derivation(d.rule, DynJudgment(j.phi, j.left, Err(j.type_right),
                                         j.type_left, j.type_right),
                     d.premises, d.aux)
    yield Derivation(d.rule, DynJudgment(j.phi, j.left, j.right,
                                         DYN, j.type_right),
                     d.premises, d.aux)
    if j.phi.entries:
        shrunk = DynCtx(j.phi.entries[:-1])
        yield Derivation(d.rule, DynJudgment(shrunk, j.left, j.right,
                                             j.type_left, j.type_right),
                         d.premises, d.aux)
    if d.premises:
        yield Derivation(d.rule, j, d.premises[:-1], d.aux)


def test_congruence_fuzzing():
    phi = DynCtx.of(("x", "x'", NAT, DYN))
    fphi = DynCtx.of(("f", "f'", Fn(NAT, NAT), Fn(DYN, DYN)),
                     ("x", "x'", NAT, DYN))
    pphi = DynCtx.of(("p", "p'", Prod(NAT, NAT), Prod(DYN, DYN)))
    samples = [
        lam_mon(var_node(phi, 0)),
        app_mon(var_node(fphi, 0), var_node(fphi, 1)),
        pair_mon(var_node(phi, 0), var_node(phi, 0)),
        prj_mon(var_node(pphi, 0), 1),
        ur_node(NAT, DYN),
        dl_node(NAT, DYN),
        errbot_node(Context(), NAT, num(1)),
        fn_beta_node(Context(), App(Lam("x", NAT, Var("x")), num(0)), NAT),
        prod_eta_node(Context.of(("p", Prod(NAT, NAT))), Var("p"), Prod(NAT, NAT)),
    ]
    for d in samples:
        assert check_derivation(SIG, d), d.rule
        for bad in _corruptions(d):
            if bad.conclusion == d.conclusion and bad.premises == d.premises:
                continue
            if d.rule == "err-bot" and isinstance(bad.conclusion.right, Err):
                continue  # err <= err is itself a valid instance
            assert not check_derivation(SIG, bad), (d.rule, bad.conclusion)


# -- term-dynamism axioms --------------------------------------------------------

def test_ax_rule_membership():
    axiom = (Context.of(("x", NAT)), Var("x"), Context.of(("y", DYN)), Var("y"))
    sig = Signature(tmdyn_axioms=(axiom,))
    from gtt.dynamism import ax_node
    d = ax_node(sig, 0)
    assert check_derivation(sig, d)
    # the same conclusion is rejected when the signature lacks the axiom
    assert not check_derivation(SIG, Derivation("ax", d.conclusion, (), 0))
