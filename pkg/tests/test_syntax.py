import random

import pytest

from gtt.syntax import (
    App, Context, ContextError, Err, FnApp, Lam, NAT, Pair, Prod, Proj,
    UnboundVariable, Upcast, DYN, Var, alpha_eq, compose_subst, free_vars,
    num, subst1, substitute,
)
from gtt.typecheck import default_signature

from oracles import alpha_eq_oracle, subst_nameless, to_nameless
from termgen import gen_welltyped

SIG = default_signature()


def test_alpha_eq_renamed_binder():
    assert alpha_eq(Lam("x", NAT, Var("x")), Lam("y", NAT, Var("y")))


def test_alpha_eq_distinct_bodies():
    assert not alpha_eq(Lam("x", NAT, Var("x")), Lam("x", NAT, Err(NAT)))


def test_alpha_eq_free_vs_bound():
    # free x on the left, bound binder renamed on the right
    t = Pair(Var("x"), Lam("x", NAT, Var("x")))
    u = Pair(Var("x"), Lam("z", NAT, Var("z")))
    assert alpha_eq(t, u)
    assert alpha_eq_oracle(t, u)
    # but a free variable cannot be renamed
    assert not alpha_eq(Pair(Var("x"), Var("x")), Pair(Var("y"), Var("y")))


def test_alpha_eq_casts_compare_types():
    assert not alpha_eq(Upcast(NAT, DYN, Var("x")), Upcast(DYN, DYN, Var("x")))


def test_substitute_disjoint():
    t = App(Var("x"), Var("y"))
    out = substitute(t, {"x": Lam("z", NAT, Var("z")), "y": num(0)})
    assert out == App(Lam("z", NAT, Var("z")), num(0))


def test_substitute_identity_up_to_alpha():
    t = Lam("x", NAT, Var("x"))
    assert alpha_eq(substitute(t, {}), t)


def test_substitute_avoids_capture():
    # (\y:Nat. x)[x := y] must rename the binder
    t = Lam("y", NAT, Var("x"))
    out = substitute(t, {"x": Var("y")})
    assert isinstance(out, Lam) and out.var != "y"
    assert out.body == Var("y")
    # cross-checked against the nameless-representation oracle
    assert to_nameless(out) == subst_nameless(to_nameless(t), {"x": ("free", "y")})


def test_substitute_unbound_raises():
    with pytest.raises(UnboundVariable) as exc:
        substitute(Var("q"), {})
    assert "q" in str(exc.value)


def test_free_vars():
    assert free_vars(Lam("x", NAT, Var("x"))) == set()
    assert free_vars(App(Var("x"), Var("y"))) == {"x", "y"}
    assert free_vars(Upcast(NAT, DYN, Var("x"))) == {"x"}


def test_context_rejects_duplicates():
    with pytest.raises(ContextError):
        Context.of(("x", NAT), ("x", DYN))


def _identity_subst(t):
    return {x: Var(x) for x in free_vars(t)}


def test_substitution_composes():
    rng = random.Random(7)
    for _ in range(150):
        ctx, t, _ = gen_welltyped(rng, SIG, size=rng.randint(1, 20))
        sigma = {x: Var(x) for x, _ in ctx}
        sigma["a"] = num(1)
        sigma["b"] = Upcast(NAT, DYN, num(0))
        delta = {x: Var(x) for x, _ in ctx}
        delta["p"] = Pair(num(2), Upcast(NAT, DYN, num(3)))
        one_two = substitute(substitute(t, sigma), delta)
        composed = substitute(t, compose_subst(sigma, delta))
        assert alpha_eq(one_two, composed)


def test_substitute_never_captures():
    rng = random.Random(8)
    image = Lam("w", NAT, App(Var("g"), Var("free"))), Var("free")
    for _ in range(150):
        ctx, t, _ = gen_welltyped(rng, SIG, size=rng.randint(1, 15))
        sigma = {x: Var(x) for x, _ in ctx}
        sigma["a"] = rng.choice(image)
        out = substitute(t, sigma)
        if "a" in free_vars(t):
            assert "free" in free_vars(out)


def test_alpha_eq_is_equivalence_and_congruence():
    rng = random.Random(9)
    terms = [gen_welltyped(rng, SIG, size=rng.randint(1, 10))[1] for _ in range(60)]
    for t in terms:
        assert alpha_eq(t, t)
    for t in terms:
        for u in terms[:20]:
            assert alpha_eq(t, u) == alpha_eq(u, t)
            if alpha_eq(t, u):
                assert alpha_eq(Pair(t, num(0)), Pair(u, num(0)))
                assert alpha_eq(Lam("x", NAT, t), Lam("x", NAT, u))


def test_alpha_eq_matches_canonical_renaming_oracle():
    rng = random.Random(10)
    terms = [gen_welltyped(rng, SIG, size=rng.randint(1, 12))[1] for _ in range(80)]
    for t in terms:
        for u in terms[:25]:
            assert alpha_eq(t, u) == alpha_eq_oracle(t, u)


def test_subst1_keeps_other_frees():
    t = App(Var("x"), Var("y"))
    assert subst1(t, "x", num(0)) == App(num(0), Var("y"))
