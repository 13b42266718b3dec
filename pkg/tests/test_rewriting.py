import random

import pytest
from hypothesis import given, settings, strategies as st

from modulo.generators import stt_term
from modulo.lang import IOTA, PROP, Arrow, Atom, Sym, Var, well_sorted
from modulo.rewriting import (
    Budget, FuelExhausted, RuleError, Verdict, apply_rule, congruent, expansions,
    match, normal_form, normalize_counting, reducts, rewrite_step,
)
from modulo.syntax import parse_expr, parse_prop
from modulo.theories import builtin, parse_theory

STT = builtin("stt")
PIMPQ = builtin("pimpq")
QIMPP = builtin("qimpp")
SUBSET = builtin("subset")


def stt(text):
    return parse_expr(text, STT.scope())


def test_match_binds_pattern_variables():
    x, y = Var("x", IOTA), Var("y", IOTA)
    pat = Atom(Sym("R"), (x, y))
    sub = match(pat, Atom(Sym("R"), (Var("a", IOTA), Var("a", IOTA))))
    assert sub == {x: Var("a", IOTA), y: Var("a", IOTA)}
    # non-linear patterns need equal subterms
    assert match(Atom(Sym("R"), (x, x)), Atom(Sym("R"), (Var("a", IOTA), Var("b", IOTA)))) is None


def test_k_rule_fires_at_any_sort():
    assert normal_form(STT.system, stt("(alpha (alpha {K iota o} a) p)")) == stt("a")
    assert normal_form(STT.system, stt("(alpha (alpha {K o iota} p) a)")) == stt("p")


def test_s_rule():
    # S K K a -> K a (K a) -> a
    skk = "(alpha (alpha (alpha {S iota (-> iota iota) iota} {K iota (-> iota iota)}) {K iota iota}) a)"
    assert rewrite_step(STT.system, stt(skk)) == stt(
        "(alpha (alpha {K iota (-> iota iota)} a) (alpha {K iota iota} a))")
    assert normal_form(STT.system, stt(skk)) == stt("a")


def test_eps_connectives():
    nf = normal_form(STT.system, stt("(eps (alpha (alpha dand dtop) dtop))"))
    assert nf == parse_prop("(and true true)", STT.scope())
    nf = normal_form(STT.system, stt("(eps (alpha (alpha dimp p) q))"))
    assert nf == parse_prop("(=> (eps p) (eps q))", STT.scope())


def test_eps_forall_introduces_binder():
    nf = normal_form(STT.system, stt("(eps (alpha {dall iota} f))"))
    assert nf == parse_prop("(forall (y iota) (eps (alpha f y)))", STT.scope())


def test_rewriting_under_binders():
    p = parse_prop("(forall (w iota) (eps (alpha (alpha {K o iota} p) w)))", STT.scope())
    assert normal_form(STT.system, p) == parse_prop("(forall (w iota) (eps p))", STT.scope())


def test_leftmost_outermost_step():
    x = stt("(eps (alpha (alpha dand (alpha (alpha {K o o} dtop) dbot)) dtop))")
    # the root eps-and rule fires before the inner K redex
    assert rewrite_step(STT.system, x) == parse_prop(
        "(and (eps (alpha (alpha {K o o} dtop) dbot)) (eps dtop))", STT.scope()
    )


def test_normal_form_is_idempotent_on_normal_forms():
    x = stt("(eps p)")
    assert normal_form(STT.system, x) == x
    assert rewrite_step(STT.system, x) is None


def test_fuel_exhaustion():
    with pytest.raises(FuelExhausted) as info:
        normal_form(PIMPQ.system, parse_prop("P", PIMPQ.scope()), Budget(50))
    assert info.value.steps == 50
    _, steps = normalize_counting(STT.system, stt("(eps (alpha (alpha dand dtop) dtop))"))
    assert steps == 3


def test_congruence_verdicts():
    P = parse_prop("P", PIMPQ.scope())
    assert congruent(PIMPQ.system, P, parse_prop("(=> P Q)", PIMPQ.scope())) is Verdict.YES
    assert congruent(PIMPQ.system, P, parse_prop("(=> (=> P Q) Q)", PIMPQ.scope())) is Verdict.YES
    assert congruent(QIMPP.system, P, parse_prop("(=> Q P)", QIMPP.scope())) is Verdict.YES
    assert congruent(STT.system, stt("(eps dtop)"), stt("(eps dbot)")) is Verdict.NO
    assert congruent(STT.system, stt("(eps dtop)"), parse_prop("true", STT.scope())) is Verdict.YES


def test_congruence_in_pimpq_is_undecided_or_no_for_unrelated():
    P, Q = parse_prop("P", PIMPQ.scope()), parse_prop("Q", PIMPQ.scope())
    v = congruent(PIMPQ.system, P, Q, Budget(200))
    assert v is not Verdict.YES


def test_subset_unfolds():
    a = parse_prop("(subset x y)", SUBSET.scope())
    b = parse_prop("(forall (w set) (=> (mem w x) (mem w y)))", SUBSET.scope())
    assert congruent(SUBSET.system, a, b) is Verdict.YES


def test_rule_validation():
    with pytest.raises(RuleError):
        parse_theory("(theory bad (sorts d) (pred P d) (vars (x d) (y d)) (rule (P x) (P y)))").check()
    with pytest.raises(RuleError):
        # a proposition rule must have an atomic left-hand side
        parse_theory("(theory bad (pred P) (pred Q) (rule (=> P Q) P))").check()


def test_expansions_invert_reducts():
    rhs = parse_prop("(=> P Q)", PIMPQ.scope())
    assert parse_prop("P", PIMPQ.scope()) in list(expansions(PIMPQ.system, rhs))
    x = stt("(and (eps p) (eps q))")
    for e in expansions(STT.system, x):
        assert x in list(reducts(STT.system, e))


@settings(max_examples=80)
@given(st.integers(0, 100_000))
def test_stt_terms_terminate_and_nf_is_irreducible(seed):
    rng = random.Random(seed)
    vs = [Var(k, s) for k, s in sorted(STT.env.items())]
    t = stt_term(rng, PROP, vs, rng.randint(1, 30))
    nf = normal_form(STT.system, Atom(Sym("eps"), (t,)))
    assert rewrite_step(STT.system, nf) is None
    assert congruent(STT.system, Atom(Sym("eps"), (t,)), nf) is Verdict.YES


@settings(max_examples=60)
@given(st.integers(0, 100_000))
def test_reducts_preserve_sorts(seed):
    rng = random.Random(seed)
    vs = [Var(k, s) for k, s in sorted(STT.env.items())]
    sort = rng.choice([IOTA, PROP, Arrow(IOTA, PROP)])
    t = stt_term(rng, sort, vs, 12)
    for r in reducts(STT.system, t):
        assert well_sorted(STT.signature, r) == sort


def test_apply_rule_only_at_root():
    k = next(r for r in STT.system.rules if r.name == "K")
    assert apply_rule(k, stt("(alpha (alpha {K iota iota} a) b)")) == stt("a")
    assert apply_rule(k, stt("(alpha f (alpha (alpha {K iota iota} a) b))")) is None
