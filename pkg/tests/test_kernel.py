import pytest

from modulo.kernel import (
    Checker, Proof, ProofError, at, check, classify, is_cut_free, is_neutral, proof_free_vars,
    replace_at,
)
from modulo.proofio import load_proof, parse_proof
from modulo.rewriting import Budget
from modulo.structures import data_path
from modulo.theories import builtin, parse_theory

PIMPQ = builtin("pimpq")
QIMPP = builtin("qimpp")
SUBSET = builtin("subset")
STT = builtin("stt")


def proof(text, th):
    return parse_proof(text, th)


def failures(th, text):
    rep = check(th, proof(text, th))
    return [(f.path, f.rule, f.kind) for f in rep.failures]


def test_bundled_q_proof_is_accepted_and_neutral():
    p = load_proof(data_path("paper_q_proof.sexp"), PIMPQ)
    rep = check(PIMPQ, p)
    assert rep.accepted and rep.nodes == 9
    assert is_neutral(p) and not is_cut_free(p)
    assert classify(p) == {"rule": "impE", "neutral": True, "cut_free": False}


def test_bundled_q_proof_is_rejected_without_the_rule():
    # P and P => Q are not congruent in the other theory
    p = load_proof(data_path("paper_q_proof.sexp"), QIMPP)
    rep = check(QIMPP, p)
    assert not rep.accepted
    assert any(f.rule == "axiom" for f in rep.failures)


def test_stt_proof_file():
    p = load_proof(data_path("proof_refl.sexp"), STT)
    assert check(STT, p).accepted
    assert is_cut_free(p)


def test_axiom_needs_a_congruent_hypothesis():
    assert failures(QIMPP, "(axiom :concl (|- (Q) P))") == [((), "axiom", "no")]
    assert failures(QIMPP, "(axiom :concl (|- ((=> Q P)) P))") == []


def test_explicit_hypothesis_index():
    assert failures(QIMPP, "(axiom :concl (|- (P Q) P) :hyp 0)") == []
    assert failures(QIMPP, "(axiom :concl (|- (P Q) P) :hyp 1)") == [((), "axiom", "no")]
    assert failures(QIMPP, "(axiom :concl (|- (P) P) :hyp 3)") == [((), "axiom", "structure")]


def test_impE_reports_the_failing_node():
    text = """(impE :concl (|- (P) Q) :A P :B Q
                 (axiom :concl (|- (P) (=> P Q)))
                 (axiom :concl (|- (P) P)))"""
    assert failures(QIMPP, text) == [((0,), "axiom", "no")]
    assert failures(PIMPQ, text) == []


def test_context_mismatch_is_structural():
    text = """(impI :concl (|- () (=> P P)) :A P :B P (axiom :concl (|- () P)))"""
    kinds = {k for _, _, k in failures(PIMPQ, text)}
    assert "structure" in kinds


def test_modulo_introduction():
    # impI may conclude P itself, since P is congruent to Q => P
    text = "(impI :concl (|- () P) :A Q :B P (axiom :concl (|- (Q) P)))"
    assert failures(QIMPP, text) == [((0,), "axiom", "no")]
    text = "(impI :concl (|- (P) P) :A Q :B P (axiom :concl (|- (P Q) P)))"
    assert failures(QIMPP, text) == []


def test_allI_freshness():
    ok = """(allI :concl (|- () (forall (v set) (=> (mem v v) (mem v v)))) :x (w set)
              :A (=> (mem w w) (mem w w))
              (impI :concl (|- () (=> (mem w w) (mem w w))) :A (mem w w) :B (mem w w)
                (axiom :concl (|- ((mem w w)) (mem w w)))))"""
    bad = """(proof :vars ((w set))
              (allI :concl (|- ((mem w w)) (forall (v set) (mem v v))) :x (w set) :A (mem w w)
                (axiom :concl (|- ((mem w w)) (mem w w)))))"""
    assert failures(SUBSET, ok) == []
    assert failures(SUBSET, bad) == [((), "allI", "freshness")]


def test_allE_instance_and_subset_unfolding():
    text = """(impE :concl (|- ((subset x y) (mem a x)) (mem a y)) :A (mem a x) :B (mem a y)
       (allE :concl (|- ((subset x y) (mem a x)) (=> (mem a x) (mem a y)))
             :x (z set) :A (=> (mem z x) (mem z y)) :t a
          (axiom :concl (|- ((subset x y) (mem a x)) (forall (z set) (=> (mem z x) (mem z y))))))
       (axiom :concl (|- ((subset x y) (mem a x)) (mem a x))))"""
    assert failures(SUBSET, text) == []
    p = proof(text, SUBSET)
    assert is_cut_free(p)


def test_exE_eigenvariable_must_not_escape():
    text = """(proof :vars ((w set))
      (exE :concl (|- ((exists (z set) (mem z z))) (mem w w)) :x (w set) :A (mem w w)
        (axiom :concl (|- ((exists (z set) (mem z z))) (exists (z set) (mem z z))))
        (axiom :concl (|- ((exists (z set) (mem z z)) (mem w w)) (mem w w)))))"""
    assert ((), "exE", "freshness") in failures(SUBSET, text)


def test_sort_errors_are_reported():
    text = "(allE :concl (|- () (eps p)) :x (v iota) :A (eps p) :t p (topI :concl (|- () true)))"
    assert any(k == "sort" for _, _, k in failures(STT, text))


def test_undecided_congruence_is_not_accepted():
    # without the confluence flag only the bounded search is available
    th = parse_theory("(theory p2 (pred P) (pred Q) (rule P (=> P Q)) (confluent false))")
    c = Checker(th, Budget(max_steps=200, max_reducts=50))
    rep = c.check(proof("(axiom :concl (|- (Q) P))", th))
    assert [f.kind for f in rep.failures] == ["undecided"]
    assert c.check(proof("(axiom :concl (|- (P) (=> (=> P Q) Q)))", th)).accepted


def test_proof_shape_validation():
    with pytest.raises(ProofError):
        Proof("impI", proof("(topI :concl (|- () true))", STT).concl)


def test_tree_navigation():
    p = load_proof(data_path("paper_q_proof.sexp"), PIMPQ)
    assert at(p, (0, 0)).rule == "impE"
    leaf = at(p, (1, 0, 1))
    assert leaf.rule == "axiom"
    q = replace_at(p, (1,), at(p, (0,)))
    assert at(q, (1,)) == at(p, (0,))
    assert proof_free_vars(p) == frozenset()
    assert p.size() == 9 and p.depth() == 4


def test_cut_free_definition():
    neutral_major = proof("""(impE :concl (|- ((=> Q P) Q) P) :A Q :B P
        (axiom :concl (|- ((=> Q P) Q) (=> Q P))) (axiom :concl (|- ((=> Q P) Q) Q)))""", QIMPP)
    assert is_cut_free(neutral_major)
    detour = proof("""(impE :concl (|- (Q) P) :A Q :B P
        (impI :concl (|- (Q) (=> Q P)) :A Q :B P (axiom :concl (|- (Q Q) P)))
        (axiom :concl (|- (Q) Q)))""", QIMPP)
    assert not is_cut_free(detour)
