import itertools

import pytest

from modulo.generators import random_proofs
from modulo.kernel import check
from modulo.lang import Base, Sequent, Var
from modulo.models import (
    MissingDomain, UnboundVariable, assignments, check_model, check_soundness_sample, denote_context,
    denote_prop, denote_sequent, denote_term, from_tables,
)
from modulo.proofio import parse_proof
from modulo.structures import bundled_corpus, data_path, load_structure
from modulo.syntax import parse_prop, parse_term
from modulo.theories import builtin
from modulo.tva import bool2, chain, heyting_to_tva

SET = Base("set")
SUBSET = builtin("subset")


def subset_structure(mem, subset, n=2):
    dom = tuple(range(n))
    return from_tables(
        bool2(), {SET: dom},
        {},
        {"mem": {k: mem[k] for k in itertools.product(dom, repeat=2)},
         "subset": {k: subset[k] for k in itertools.product(dom, repeat=2)}},
        "s",
    )


def inclusion(mem, n=2):
    """Oracle: x is included in y when every member of x is a member of y."""
    return {(x, y): int(all(not mem[(z, x)] or mem[(z, y)] for z in range(n)))
            for x in range(n) for y in range(n)}


def test_bundled_structures_check():
    expected = {
        "pimpq_model.json": True, "qimpp_model.json": True, "qimpp_bad.json": False,
        "subset_bool2.json": True, "monoid_chain3.json": True,
    }
    for name, ok in expected.items():
        s, th = load_structure(data_path(name))
        assert check_model(s, th).ok is ok, name


def test_bad_structure_reports_witness():
    s, th = load_structure(data_path("qimpp_bad.json"))
    entry = next(e for e in check_model(s, th).entries if not e.passed)
    assert entry.name == "P-unfold"
    assert "lhs denotes" in entry.reason


def test_subset_models_are_exactly_inclusion():
    dom = range(2)
    keys = list(itertools.product(dom, repeat=2))
    for bits in itertools.product([0, 1], repeat=4):
        mem = dict(zip(keys, bits))
        incl = inclusion(mem)
        for sbits in itertools.product([0, 1], repeat=4):
            sub = dict(zip(keys, sbits))
            s = subset_structure(mem, sub)
            assert check_model(s, SUBSET).ok == (sub == incl)


def test_denotation_of_connectives_and_quantifiers():
    mem = {(0, 0): 1, (0, 1): 1, (1, 0): 0, (1, 1): 1}
    s = subset_structure(mem, inclusion(mem))
    x, y = Var("x", SET), Var("y", SET)
    sc = SUBSET.scope()
    assert denote_prop(s, {x: 1, y: 0}, parse_prop("(mem x y)", sc)) == 0
    assert denote_prop(s, {x: 1, y: 0}, parse_prop("(=> (mem x y) false)", sc)) == 1
    assert denote_prop(s, {}, parse_prop("(forall (w set) (mem w w))", sc)) == 1
    assert denote_prop(s, {}, parse_prop("(exists (w set) (=> (mem w w) false))", sc)) == 0
    assert denote_prop(s, {y: 0}, parse_prop("(exists (w set) (mem w y))", sc)) == 1


def test_empty_context_denotes_top():
    empty = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 0}
    s = subset_structure(empty, inclusion(empty))
    assert denote_context(s, {}, ()) == 1
    seq = Sequent((), parse_prop("true", SUBSET.scope()))
    assert denote_sequent(s, {}, seq) == 1


def test_unbound_variable_and_missing_domain():
    s, _ = load_structure(data_path("subset_bool2.json"))
    with pytest.raises(UnboundVariable):
        denote_prop(s, {}, parse_prop("(mem x x)", SUBSET.scope()))
    with pytest.raises(MissingDomain):
        list(assignments(s, [Var("v", Base("other"))]))


def test_assignments_enumerate_product():
    s, _ = load_structure(data_path("subset_bool2.json"))
    vs = [Var("x", SET), Var("y", SET), Var("z", SET)]
    assert len(list(assignments(s, vs))) == 8


def test_monoid_structure():
    s, th = load_structure(data_path("monoid_chain3.json"))
    t = parse_term("(op e x)", th.scope())
    for d in s.domain(Base("d")):
        assert denote_term(s, {Var("x", Base("d")): d}, t) == d


@pytest.mark.parametrize("name", ["subset", "qimpp"])
def test_soundness_on_bundled_models(name):
    th = builtin(name)
    proofs = [p for p in random_proofs(th, 40, 11) if check(th, p).accepted]
    structure = {"subset": "subset_bool2.json", "qimpp": "qimpp_model.json"}[name]
    s, _ = load_structure(data_path(structure))
    rep = check_soundness_sample(s, th, proofs)
    assert rep.ok and rep.checked >= len(proofs)


def test_soundness_check_catches_non_models():
    th = builtin("qimpp")
    s, _ = load_structure(data_path("qimpp_bad.json"))
    # (Q => P) => P holds by congruence, but is 0 when P and Q are both 0
    proof = parse_proof(
        "(impI :concl (|- () (=> (=> Q P) P)) :A (=> Q P) :B P (axiom :concl (|- ((=> Q P)) P)))", th
    )
    assert check(th, proof).accepted
    rep = check_soundness_sample(s, th, [proof])
    assert not rep.ok and rep.violations[0]["value"] == 0


def test_chain3_denotations():
    t = heyting_to_tva(chain(3))
    s = from_tables(t, {}, {}, {"P": {(): 1}, "Q": {(): 0}})
    sc = builtin("pimpq").scope()
    assert denote_prop(s, {}, parse_prop("(=> P Q)", sc)) == 0
    assert denote_prop(s, {}, parse_prop("(=> Q P)", sc)) == 2
    assert denote_prop(s, {}, parse_prop("(or P Q)", sc)) == 1


def test_corpus_lists_required_files():
    files = set(bundled_corpus())
    assert {"paper_q_proof.sexp", "bool2.json", "chain3.json", "subset.thy", "stt_exprs.sexp"} <= files

