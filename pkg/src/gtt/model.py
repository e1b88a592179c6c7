"""A pointed-preorder model over finite binary trees.

The dynamic type denotes finite binary trees whose leaves are naturals or
the error leaf; the order lets any subtree collapse to the error leaf.
Types denote pointed preorders: naturals-with-error for base types,
componentwise pairs, a one-point unit, monotone maps for functions, and
the trees for ``?``.  Every derivable dynamism pair carries a coreflection
(an upcast whose downcast retracts it), with first-order types embedding
into the trees via tag injections:

* a base value ``n`` becomes the leaf ``n`` (shifted by its code range),
* a pair becomes a node of the embedded components,
* the unit value embeds as the error leaf itself,
* downcasts strip the matching tag and error out on anything else.

The dynamic type has no function summand, so function types never sit
below ``?`` here; everything stays away from ``?`` or first-order.
Checks over function spaces are bounded: they enumerate arguments up to a
bound and say so, proving nothing beyond it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Optional

from .syntax import (
    App, Base, Context, Downcast, DYN, Err, Fn, FnApp, GttError, Lam, Pair,
    Prod, Proj, Term, Type, Unit, UNIT, UnitVal, Upcast, Var, contains_fn,
)
from .typecheck import DynCtx, Signature, infer_type, tydyn_holds
from .dynamism import Derivation, DynJudgment


class ModelError(GttError):
    pass


# ---------------------------------------------------------------------------
# Trees: the dynamic type
# ---------------------------------------------------------------------------

class Tree:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class ErrLeaf(Tree):
    pass


@dataclass(frozen=True, slots=True)
class NatLeaf(Tree):
    n: int


@dataclass(frozen=True, slots=True)
class Node(Tree):
    left: Tree
    right: Tree


ERR_LEAF = ErrLeaf()


def tree_leq(a: Tree, b: Tree) -> bool:
    """``a`` is below ``b`` when it arises by replacing subtrees of ``b``
    with the error leaf."""
    match a, b:
        case ErrLeaf(), _:
            return True
        case NatLeaf(n), NatLeaf(m):
            return n == m
        case Node(l1, r1), Node(l2, r2):
            return tree_leq(l1, l2) and tree_leq(r1, r2)
        case _:
            return False


def tree_to_text(t: Tree) -> str:
    match t:
        case ErrLeaf():
            return "err"
        case NatLeaf(n):
            return str(n)
        case Node(l, r):
            return f"({tree_to_text(l)} , {tree_to_text(r)})"


# ---------------------------------------------------------------------------
# Semantic values
# ---------------------------------------------------------------------------

class SemValue:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class TreeVal(SemValue):
    tree: Tree


@dataclass(frozen=True, slots=True)
class NatVal(SemValue):
    """A base-type value: a natural, or None for the error."""
    n: Optional[int]


@dataclass(frozen=True, slots=True)
class PairVal(SemValue):
    fst: SemValue
    snd: SemValue


@dataclass(frozen=True, slots=True)
class UnitValSem(SemValue):
    pass


UNIT_SEM = UnitValSem()


class FnVal(SemValue):
    """A monotone map represented as a closure; compared only pointwise
    within a bound, never by identity."""
    __slots__ = ("fn",)

    def __init__(self, fn: Callable[[SemValue], SemValue]):
        self.fn = fn

    def __call__(self, v: SemValue) -> SemValue:
        return self.fn(v)


def least_value(sig: Signature, ty: Type) -> SemValue:
    match ty:
        case Base(_):
            return NatVal(None)
        case Unit():
            return UNIT_SEM
        case Prod(a, b):
            return PairVal(least_value(sig, a), least_value(sig, b))
        case Fn(_, cod):
            bottom = least_value(sig, cod)
            return FnVal(lambda _v: bottom)
        case _:
            return TreeVal(ERR_LEAF)


def denotable(sig: Signature, ty: Type) -> bool:
    """Types this model interprets: everything built from declared bases
    (with code ranges when there is more than one), unit, products,
    functions and ``?``."""
    match ty:
        case Base(n):
            return n in sig.base_types and _base_range(sig, n) is not None
        case Prod(a, b) | Fn(a, b):
            return denotable(sig, a) and denotable(sig, b)
        case _:
            return True


def first_order(ty: Type) -> bool:
    return not contains_fn(ty)


def _base_range(sig: Signature, name: str) -> tuple[int, float] | None:
    if name in sig.base_codes:
        return sig.base_codes[name]
    if name == "Nat" and not sig.base_codes:
        return (0, float("inf"))
    return None


def model_signature(sig: Signature) -> Signature:
    """The signature with ``?`` restricted to function-free types, which is
    the fragment this model supports."""
    cached = sig._model_cache.get("fo_sig")
    if cached is None:
        cached = sig.first_order_dyn()
        sig._model_cache["fo_sig"] = cached
    return cached


# ---------------------------------------------------------------------------
# Orders and enumeration
# ---------------------------------------------------------------------------

def value_leq_at(sig: Signature, ty: Type, v: SemValue, w: SemValue,
                 bound: int = 2) -> bool:
    """The pointed-preorder order within one type's denotation."""
    match ty:
        case Base(_):
            return v.n is None or v == w
        case Unit():
            return True
        case Prod(a, b):
            return (value_leq_at(sig, a, v.fst, w.fst, bound)
                    and value_leq_at(sig, b, v.snd, w.snd, bound))
        case Fn(dom, cod):
            return all(value_leq_at(sig, cod, v(arg), w(arg), bound)
                       for arg in enumerate_values(sig, dom, bound))
        case _:
            return tree_leq(v.tree, w.tree)


def enumerate_trees(bound: int, leaves: tuple[int, ...] | None = None) -> list[Tree]:
    """All trees of depth at most ``bound`` with the error leaf and the
    given natural leaves (default ``0 .. bound-1``)."""
    if leaves is None:
        leaves = tuple(range(bound))
    level: list[Tree] = [ERR_LEAF] + [NatLeaf(n) for n in leaves]
    out = list(level)
    for _ in range(bound - 1):
        level = [Node(a, b) for a in out for b in out]
        fresh = [t for t in level if t not in out]
        out.extend(fresh)
    return out


def enumerate_values(sig: Signature, ty: Type, bound: int = 2) -> list[SemValue]:
    """All values of a function-free type within the bound (leaf values
    below ``bound``, tree depth at most ``bound``)."""
    key = ("values", ty, bound)
    cached = sig._model_cache.get(key)
    if cached is None:
        cached = _enumerate_values(sig, ty, bound)
        sig._model_cache[key] = cached
    return cached


def _enumerate_values(sig: Signature, ty: Type, bound: int) -> list[SemValue]:
    match ty:
        case Base(name):
            rng = _base_range(sig, name)
            if rng is None:
                raise ModelError(f"base type {name} has no code range")
            lo, hi = rng
            top = min(bound, hi - lo) if hi != float("inf") else bound
            return [NatVal(None)] + [NatVal(n) for n in range(int(top))]
        case Unit():
            return [UNIT_SEM]
        case Prod(a, b):
            return [PairVal(x, y)
                    for x in enumerate_values(sig, a, bound)
                    for y in enumerate_values(sig, b, bound)]
        case Fn(_, _):
            raise ModelError("cannot enumerate a function space")
        case _:
            return [TreeVal(t) for t in enumerate_trees(bound)]


# ---------------------------------------------------------------------------
# Coreflections
# ---------------------------------------------------------------------------

@dataclass(frozen=True, slots=True)
class Coreflection:
    src: Type
    tgt: Type
    up: Callable[[SemValue], SemValue]
    dn: Callable[[SemValue], SemValue]

    @staticmethod
    def identity(ty: Type) -> "Coreflection":
        return Coreflection(ty, ty, lambda v: v, lambda v: v)

    def compose(self, outer: "Coreflection") -> "Coreflection":
        """self : A <| B composed with outer : B <| C gives A <| C."""
        return Coreflection(self.src, outer.tgt,
                            lambda v: outer.up(self.up(v)),
                            lambda v: self.dn(outer.dn(v)))


def _tag_coreflection(sig: Signature, ground: Type) -> Coreflection:
    """The chosen embedding of a ground tag into the trees."""
    match ground:
        case Base(name):
            rng = _base_range(sig, name)
            if rng is None:
                raise ModelError(
                    f"base type {name} needs a code range to embed into ?")
            lo, hi = rng

            def up(v: SemValue) -> SemValue:
                if v.n is None:
                    return TreeVal(ERR_LEAF)
                if lo + v.n >= hi:
                    raise ModelError(f"value {v.n} exceeds the code range of {name}")
                return TreeVal(NatLeaf(lo + v.n))

            def dn(v: SemValue) -> SemValue:
                match v.tree:
                    case NatLeaf(m) if lo <= m < hi:
                        return NatVal(m - lo)
                    case _:
                        return NatVal(None)

            return Coreflection(ground, DYN, up, dn)
        case Prod(a, b) if a == DYN and b == DYN:
            def up_pair(v: SemValue) -> SemValue:
                l, r = v.fst.tree, v.snd.tree
                if l == ERR_LEAF and r == ERR_LEAF:
                    return TreeVal(ERR_LEAF)  # the wedge glues the two bottoms
                return TreeVal(Node(l, r))

            def dn_pair(v: SemValue) -> SemValue:
                match v.tree:
                    case Node(l, r):
                        return PairVal(TreeVal(l), TreeVal(r))
                    case _:
                        return PairVal(TreeVal(ERR_LEAF), TreeVal(ERR_LEAF))

            return Coreflection(ground, DYN, up_pair, dn_pair)
        case Unit():
            return Coreflection(UNIT, DYN,
                                lambda _v: TreeVal(ERR_LEAF),
                                lambda _v: UNIT_SEM)
        case _:
            raise ModelError(f"type {ground} has no tag in the dynamic type")


def denote_coreflection(sig: Signature, a: Type, b: Type) -> Coreflection:
    """The coreflection for a derivable pair ``a <= b``, built structurally
    and through ground tags at ``?``."""
    key = ("coref", a, b)
    cached = sig._model_cache.get(key)
    if cached is not None:
        return cached
    msig = model_signature(sig)
    if not (denotable(sig, a) and denotable(sig, b)):
        raise ModelError(f"types not denotable in the tree model: {a}, {b}")
    if not tydyn_holds(msig, a, b):
        raise ModelError(f"{a} <= {b} is not derivable in the first-order model")
    out = _coref(sig, a, b)
    sig._model_cache[key] = out
    return out


def _coref(sig: Signature, a: Type, b: Type) -> Coreflection:
    if a == b:
        return Coreflection.identity(a)
    if b == DYN:
        from .elaborate import floor_type
        tag = floor_type(a)
        tagc = _tag_coreflection(sig, tag)
        if a == tag:
            return tagc
        return _coref(sig, a, tag).compose(tagc)
    match a, b:
        case Prod(a1, a2), Prod(b1, b2):
            c1, c2 = _coref(sig, a1, b1), _coref(sig, a2, b2)
            return Coreflection(
                a, b,
                lambda v: PairVal(c1.up(v.fst), c2.up(v.snd)),
                lambda v: PairVal(c1.dn(v.fst), c2.dn(v.snd)))
        case Fn(a1, a2), Fn(b1, b2):
            carg, cres = _coref(sig, a1, b1), _coref(sig, a2, b2)
            return Coreflection(
                a, b,
                lambda f: FnVal(lambda v: cres.up(f(carg.dn(v)))),
                lambda f: FnVal(lambda v: cres.dn(f(carg.up(v)))))
        case _:
            raise ModelError(f"no structural coreflection for {a} <= {b}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def eval_term(sig: Signature, env: dict[str, SemValue], t: Term) -> SemValue:
    """Compositional denotation.  Function symbols other than numerals
    have no canonical meaning and are rejected."""
    match t:
        case Var(x):
            if x not in env:
                raise ModelError(f"environment does not bind {x}")
            return env[x]
        case FnApp(f, args):
            if f.isdigit() and not args and sig.numerals_enabled():
                return NatVal(int(f))
            raise ModelError(f"function symbol {f} is not evaluable")
        case Lam(x, _, body):
            def closure(v: SemValue, _x=x, _body=body, _env=dict(env)):
                inner = dict(_env)
                inner[_x] = v
                return eval_term(sig, inner, _body)
            return FnVal(closure)
        case App(f, a):
            fv = eval_term(sig, env, f)
            return fv(eval_term(sig, env, a))
        case Pair(a, b):
            return PairVal(eval_term(sig, env, a), eval_term(sig, env, b))
        case Proj(i, b):
            v = eval_term(sig, env, b)
            return v.fst if i == 1 else v.snd
        case UnitVal():
            return UNIT_SEM
        case Upcast(lo, hi, b):
            return denote_coreflection(sig, lo, hi).up(eval_term(sig, env, b))
        case Downcast(lo, hi, b):
            return denote_coreflection(sig, lo, hi).dn(eval_term(sig, env, b))
        case Err(at):
            return least_value(sig, at)
    raise ModelError(f"cannot evaluate {t!r}")


def value_to_text(v: SemValue) -> str:
    match v:
        case TreeVal(t):
            return tree_to_text(t)
        case NatVal(None):
            return "err"
        case NatVal(n):
            return str(n)
        case PairVal(a, b):
            return f"({value_to_text(a)} , {value_to_text(b)})"
        case UnitValSem():
            return "()"
    return "<fun>"


# ---------------------------------------------------------------------------
# Cross-type order and checks
# ---------------------------------------------------------------------------

def value_leq(sig: Signature, a: Type, b: Type, v: SemValue, w: SemValue,
              bound: int = 2) -> bool:
    """``v : [[a]]`` is below ``w : [[b]]`` when its upcast is below ``w``.
    Function orderings are checked pointwise within the bound."""
    if a == b:
        return value_leq_at(sig, a, v, w, bound)
    up = denote_coreflection(sig, a, b).up
    return value_leq_at(sig, b, up(v), w, bound)


@dataclass
class Report:
    """Outcome of a bounded semantic check."""
    subject: str
    bound: int
    passed: bool
    counterexample: str | None = None
    checks: int = 0

    def lines(self) -> list[str]:
        status = "PASS" if self.passed else "FAIL"
        out = [f"RESULT {status} {self.subject} (bound {self.bound}, "
               f"{self.checks} checks; no counterexample within bound)"
               if self.passed else
               f"RESULT {status} {self.subject} (bound {self.bound})"]
        if self.counterexample:
            out.append(f"COUNTEREXAMPLE {self.counterexample}")
        return out


def check_equipment(sig: Signature, a: Type, b: Type, bound: int = 2) -> Report:
    """Exhaustively check, within the bound: the downcast retracts the
    upcast, the round trip deflates, both maps are monotone, and embedding
    into ``?`` factors through the pair's upcast."""
    from .grammar import type_to_text
    subject = f"equipment {type_to_text(a)} <= {type_to_text(b)}"
    if not (first_order(a) and first_order(b)):
        raise ModelError("equipment checks need function-free types")
    c = denote_coreflection(sig, a, b)
    values_a = enumerate_values(sig, a, bound)
    values_b = enumerate_values(sig, b, bound)
    checks = 0

    for v in values_a:
        checks += 1
        if c.dn(c.up(v)) != v:
            return Report(subject, bound, False,
                          f"dn (up v) != v at v = {value_to_text(v)}", checks)
    for w in values_b:
        checks += 1
        if not value_leq_at(sig, b, c.up(c.dn(w)), w, bound):
            return Report(subject, bound, False,
                          f"up (dn w) not below w at w = {value_to_text(w)}", checks)
    for v in values_a:
        for v2 in values_a:
            if value_leq_at(sig, a, v, v2, bound):
                checks += 1
                if not value_leq_at(sig, b, c.up(v), c.up(v2), bound):
                    return Report(subject, bound, False,
                                  f"up not monotone at {value_to_text(v)} <= "
                                  f"{value_to_text(v2)}", checks)
    for w in values_b:
        for w2 in values_b:
            if value_leq_at(sig, b, w, w2, bound):
                checks += 1
                if not value_leq_at(sig, a, c.dn(w), c.dn(w2), bound):
                    return Report(subject, bound, False,
                                  f"dn not monotone at {value_to_text(w)} <= "
                                  f"{value_to_text(w2)}", checks)
    msig = model_signature(sig)
    if tydyn_holds(msig, a, DYN) and tydyn_holds(msig, b, DYN):
        into_dyn_a = denote_coreflection(sig, a, DYN)
        into_dyn_b = denote_coreflection(sig, b, DYN)
        for v in values_a:
            checks += 1
            if into_dyn_a.up(v) != into_dyn_b.up(c.up(v)):
                return Report(subject, bound, False,
                              f"embedding into ? does not factor at "
                              f"{value_to_text(v)}", checks)
    return Report(subject, bound, True, None, checks)


def related_value_pairs(sig: Signature, a: Type, b: Type, bound: int = 2
                        ) -> list[tuple[SemValue, SemValue]]:
    """All ``(v, w)`` with ``v : [[a]]`` below ``w : [[b]]`` within bound."""
    key = ("relpairs", a, b, bound)
    cached = sig._model_cache.get(key)
    if cached is None:
        cached = [(v, w)
                  for v in enumerate_values(sig, a, bound)
                  for w in enumerate_values(sig, b, bound)
                  if value_leq(sig, a, b, v, w, bound)]
        sig._model_cache[key] = cached
    return cached


def related_env_pairs(sig: Signature, phi: DynCtx, bound: int = 2
                      ) -> Iterator[tuple[dict[str, SemValue], dict[str, SemValue]]]:
    """All pairs of environments related pointwise along ``phi``."""
    def go(entries, left_env, right_env):
        if not entries:
            yield dict(left_env), dict(right_env)
            return
        (xl, xr, tl, tr), *rest = entries
        for v, w in related_value_pairs(sig, tl, tr, bound):
            left_env[xl] = v
            right_env[xr] = w
            yield from go(rest, left_env, right_env)

    yield from go(list(phi.entries), {}, {})


def check_judgment_semantics(sig: Signature, j: DynJudgment, bound: int = 2) -> Report:
    """Check a dynamism judgment against the model: over every pair of
    related environments, the left denotation sits below the right."""
    subject = f"judgment {j.describe()}"
    for _, _, tl, tr in j.phi:
        if not (first_order(tl) and first_order(tr)):
            raise ModelError("judgment context mentions function types")
        if not (denotable(sig, tl) and denotable(sig, tr)):
            raise ModelError("judgment context is not denotable")
    if not (first_order(j.type_left) and first_order(j.type_right)):
        raise ModelError("judgment endpoint types mention function types")
    checks = 0
    for left_env, right_env in related_env_pairs(sig, j.phi, bound):
        lv = eval_term(sig, left_env, j.left)
        rv = eval_term(sig, right_env, j.right)
        checks += 1
        if not value_leq(sig, j.type_left, j.type_right, lv, rv, bound):
            env_text = ", ".join(
                f"{x}={value_to_text(v)}" for x, v in
                list(left_env.items()) + [(f"{x}'", v) for x, v in right_env.items()])
            return Report(subject, bound, False,
                          f"[{env_text}] gives {value_to_text(lv)} not below "
                          f"{value_to_text(rv)}", checks)
    return Report(subject, bound, True, None, checks)


def derivation_first_order(d: Derivation) -> bool:
    """Whether a derivation's root judgment stays in the model fragment."""
    from .theorems import judgment_types
    return all(first_order(ty) for ty in judgment_types(d))
