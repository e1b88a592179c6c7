import itertools
import random

import pytest

from gtt.grammar import parse_term, parse_type
from gtt.syntax import (
    Context, DYN, Downcast, Err, Fn, NAT, Pair, Prod, Proj, UNIT, Upcast,
    Var, num,
)
from gtt.typecheck import DynCtx, Signature, default_signature, enumerate_types
from gtt.dynamism import DynJudgment
from gtt.elaborate import elaborate
from gtt.model import (
    ERR_LEAF, Coreflection, ModelError, NatLeaf, NatVal, Node, PairVal,
    TreeVal, UNIT_SEM, check_equipment, check_judgment_semantics,
    denote_coreflection, enumerate_trees, enumerate_values, eval_term,
    first_order, least_value, model_signature, tree_leq, tydyn_holds,
    value_leq, value_leq_at, value_to_text,
)

from oracles import tree_leq_oracle
from termgen import gen_term

SIG = default_signature()


# -- tree order ------------------------------------------------------------------

def test_tree_leq_examples():
    assert tree_leq(ERR_LEAF, Node(NatLeaf(0), ERR_LEAF))
    assert tree_leq(Node(NatLeaf(0), ERR_LEAF), Node(NatLeaf(0), NatLeaf(1)))
    assert not tree_leq(Node(ERR_LEAF, ERR_LEAF), NatLeaf(0))
    # the replacement oracle agrees on the last one: replacements of a
    # leaf are just the leaf and the error
    assert not tree_leq_oracle(Node(ERR_LEAF, ERR_LEAF), NatLeaf(0))


def test_tree_leq_matches_replacement_oracle_depth3():
    trees = enumerate_trees(3, leaves=(0, 1))
    assert len(trees) > 100
    for a in trees:
        for b in trees:
            assert tree_leq(a, b) == tree_leq_oracle(a, b), (a, b)


def test_tree_leq_partial_order_depth3():
    trees = enumerate_trees(3, leaves=(0, 1))
    for a in trees:
        assert tree_leq(a, a)
    downs = {b: [a for a in trees if tree_leq(a, b)] for b in trees}
    for b in trees:
        for a in downs[b]:
            if tree_leq(b, a):
                assert a == b  # antisymmetry
            for c in downs[a]:
                assert tree_leq(c, b)  # transitivity


# -- coreflections ------------------------------------------------------------------

def test_nat_tag():
    c = denote_coreflection(SIG, NAT, DYN)
    assert c.up(NatVal(3)) == TreeVal(NatLeaf(3))
    assert c.dn(TreeVal(Node(ERR_LEAF, ERR_LEAF))) == NatVal(None)
    assert c.dn(TreeVal(NatLeaf(7))) == NatVal(7)


def test_pair_embedding_composes():
    c = denote_coreflection(SIG, Prod(NAT, NAT), DYN)
    assert c.up(PairVal(NatVal(0), NatVal(1))) == TreeVal(Node(NatLeaf(0), NatLeaf(1)))
    assert c.dn(TreeVal(NatLeaf(5))) == PairVal(NatVal(None), NatVal(None))


def test_unit_embeds_as_error_leaf():
    c = denote_coreflection(SIG, UNIT, DYN)
    assert c.up(UNIT_SEM) == TreeVal(ERR_LEAF)
    assert c.dn(TreeVal(NatLeaf(0))) == UNIT_SEM


def test_pair_of_errors_glues_to_error_leaf():
    c = denote_coreflection(SIG, Prod(DYN, DYN), DYN)
    bottom = PairVal(TreeVal(ERR_LEAF), TreeVal(ERR_LEAF))
    assert c.up(bottom) == TreeVal(ERR_LEAF)
    assert c.dn(TreeVal(ERR_LEAF)) == bottom


def _semantic_identity():
    from gtt.model import FnVal
    return FnVal(lambda v: v)


def test_function_pairs_denote_structurally():
    c = denote_coreflection(SIG, Fn(NAT, NAT), Fn(NAT, DYN))
    lifted = c.up(_semantic_identity())
    assert lifted(NatVal(2)) == TreeVal(NatLeaf(2))


def test_fn_below_dyn_rejected():
    with pytest.raises(ModelError):
        denote_coreflection(SIG, Fn(NAT, NAT), DYN)


def test_extra_base_needs_codes():
    sig = Signature(base_types=("Nat", "Color"))
    with pytest.raises(ModelError):
        denote_coreflection(sig, parse_type("Color"), DYN)
    coded = Signature(base_types=("Nat", "Color"),
                      base_codes={"Nat": (0, 100), "Color": (100, 200)})
    c = denote_coreflection(coded, parse_type("Color"), DYN)
    assert c.up(NatVal(3)) == TreeVal(NatLeaf(103))
    assert c.dn(TreeVal(NatLeaf(3))) == NatVal(None)  # Nat's range, not Color's
    cn = denote_coreflection(coded, NAT, DYN)
    assert cn.up(NatVal(3)) == TreeVal(NatLeaf(3))


# -- evaluation ----------------------------------------------------------------------

def test_eval_retract():
    v = eval_term(SIG, {}, parse_term("dn[? => Nat] up[Nat => ?] 0", SIG))
    assert v == NatVal(0)


def test_eval_wrong_tag_errors():
    v = eval_term(SIG, {}, parse_term("dn[? => ? * ?] up[Nat => ?] 0", SIG))
    assert v == PairVal(TreeVal(ERR_LEAF), TreeVal(ERR_LEAF))
    assert v == least_value(SIG, Prod(DYN, DYN))


def test_eval_error_function():
    f = eval_term(SIG, {}, Err(Fn(NAT, NAT)))
    assert f(NatVal(5)) == NatVal(None)


def test_eval_rejects_uninterpreted_symbols():
    sig = Signature(fn_symbols={"f": ((NAT,), NAT)})
    with pytest.raises(ModelError):
        eval_term(sig, {}, parse_term("f(0)", sig))


def test_eval_beta_and_pairs():
    t = parse_term("(\\x:Nat * ?. fst x) (1, up[Nat => ?] 2)", SIG)
    assert eval_term(SIG, {}, t) == NatVal(1)


# -- orders -----------------------------------------------------------------------

def test_value_leq_examples():
    assert value_leq(SIG, NAT, NAT, NatVal(None), NatVal(0))
    assert value_leq(SIG, NAT, DYN, NatVal(0), TreeVal(NatLeaf(0)))
    assert not value_leq(SIG, NAT, DYN, NatVal(0), TreeVal(NatLeaf(1)))


def test_value_leq_functions_pointwise():
    bottom = least_value(SIG, Fn(NAT, NAT))
    ident = _semantic_identity()
    assert value_leq(SIG, Fn(NAT, NAT), Fn(NAT, NAT), bottom, ident)
    assert not value_leq(SIG, Fn(NAT, NAT), Fn(NAT, NAT), ident, bottom)


# -- equipment laws ------------------------------------------------------------------

def test_equipment_nat_dyn():
    report = check_equipment(SIG, NAT, DYN, bound=2)
    assert report.passed and report.checks > 0


def test_equipment_prod():
    report = check_equipment(SIG, Prod(NAT, NAT), Prod(DYN, DYN), bound=2)
    assert report.passed


def test_equipment_identity_trivial():
    report = check_equipment(SIG, NAT, NAT, bound=3)
    assert report.passed


def test_equipment_catches_broken_coreflection():
    # a deliberately broken pair: dn loses information
    broken = Coreflection(NAT, DYN,
                          up=lambda v: TreeVal(ERR_LEAF),
                          dn=lambda v: NatVal(None))
    SIG._model_cache[("coref", NAT, DYN)] = broken
    try:
        report = check_equipment(SIG, NAT, DYN, bound=2)
        assert not report.passed
        assert report.counterexample
    finally:
        SIG._model_cache.pop(("coref", NAT, DYN))


# -- judgment semantics ---------------------------------------------------------------

def test_judgment_err_below_zero():
    j = DynJudgment(DynCtx(), Err(NAT), num(0), NAT, NAT)
    assert check_judgment_semantics(SIG, j, 2).passed


def test_judgment_zero_below_err_fails():
    j = DynJudgment(DynCtx(), num(0), Err(NAT), NAT, NAT)
    report = check_judgment_semantics(SIG, j, 2)
    assert not report.passed and report.counterexample


def test_judgment_var_rule():
    j = DynJudgment(DynCtx.of(("x", "x'", NAT, DYN)), Var("x"), Var("x'"), NAT, DYN)
    report = check_judgment_semantics(SIG, j, 2)
    assert report.passed and report.checks > 5


def test_judgment_rejects_function_contexts():
    phi = DynCtx.of(("f", "f", Fn(NAT, NAT), Fn(NAT, NAT)))
    j = DynJudgment(phi, Var("f"), Var("f"), Fn(NAT, NAT), Fn(NAT, NAT))
    with pytest.raises(ModelError):
        check_judgment_semantics(SIG, j, 2)


def test_model_validates_disjointness_for_grounds():
    for n in range(2):
        t = Downcast(Prod(DYN, DYN), DYN, Upcast(NAT, DYN, num(n)))
        assert eval_term(SIG, {}, t) == least_value(SIG, Prod(DYN, DYN))


def test_eval_commutes_with_elaboration():
    rng = random.Random(16)
    types = [NAT, DYN, Prod(NAT, DYN), Prod(DYN, UNIT)]
    seen = 0
    for _ in range(400):
        ty = rng.choice(types)
        t = gen_term(rng, SIG, Context(), ty, size=rng.randint(1, 12),
                     first_order=True)
        try:
            direct = eval_term(SIG, {}, t)
        except ModelError:
            continue
        seen += 1
        elaborated = eval_term(SIG, {}, elaborate(SIG, Context(), t))
        assert direct == elaborated, (t,)
    assert seen > 200


def test_value_printing():
    assert value_to_text(TreeVal(Node(NatLeaf(0), ERR_LEAF))) == "(0 , err)"
    assert value_to_text(NatVal(None)) == "err"
    assert value_to_text(PairVal(NatVal(1), UNIT_SEM)) == "(1 , ())"
