import json
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from modulo.structures import data_path, load_json
from modulo.tva import (
    CONDITIONS, FiniteHeyting, add_bottom, add_top, bool2, chain, check_condition,
    condition_holds, heyting_from_json, heyting_to_tva, powerset, product, single_entry_mutations,
    small_heyting_algebras, tva_from_json, tva_to_json, validate_complete, validate_order,
    validate_tva,
)


def chain_arrow(a, b, top):
    """Closed form for a chain: a => b is top when a <= b, else b."""
    return top if a <= b else b


def test_bundled_bool2_matches_derived_tables():
    hand = tva_from_json(load_json(data_path("bool2.json")))
    derived = bool2()
    for field in ("positive", "top", "bot", "imp", "conj", "disj", "forall", "exists"):
        assert getattr(hand, field) == getattr(derived, field), field


def test_bundled_chain3():
    t = tva_from_json(load_json(data_path("chain3.json")))
    derived = heyting_to_tva(chain(3))
    assert t.imp == derived.imp
    assert t.forall == derived.forall
    assert validate_tva(t).ok


@pytest.mark.parametrize("n", range(2, 8))
def test_chain_arrow_closed_form(n):
    h = chain(n)
    for a in h.elements:
        for b in h.elements:
            assert h.arrow[(a, b)] == chain_arrow(a, b, n - 1)
            assert h.meet[(a, b)] == min(a, b)
            assert h.join[(a, b)] == max(a, b)


def test_product_is_componentwise():
    h = product(chain(2), chain(3))
    for a in h.elements:
        for b in h.elements:
            # elements are labelled by their two coordinates, e.g. "12"
            want = f"{chain_arrow(int(a[0]), int(b[0]), 1)}{chain_arrow(int(a[1]), int(b[1]), 2)}"
            assert h.arrow[(a, b)] == want


def test_small_heyting_family():
    algebras = small_heyting_algebras()
    assert [len(h.elements) for h in algebras] == [2, 3, 4, 5, 6, 4, 5, 5, 6]


@pytest.mark.parametrize("h", small_heyting_algebras(), ids=lambda h: h.name or str(len(h.elements)))
def test_heyting_algebras_are_full_ordered_complete(h):
    t = heyting_to_tva(h)
    rep = validate_tva(t)
    assert rep.is_tva, rep.failed
    assert rep.full and rep.ordered and rep.complete.passed


def test_non_distributive_lattice_has_no_arrow():
    # the diamond with three atoms is modular but not distributive
    pairs = [("0", x) for x in "abc"] + [(x, "1") for x in "abc"]
    with pytest.raises(ValueError):
        FiniteHeyting.from_pairs(["0", "a", "b", "c", "1"], pairs)


def test_diamond_file_is_boolean_square():
    h = heyting_from_json(load_json(data_path("diamond.json")))
    assert h.arrow[("a", "0")] == "b"
    assert validate_tva(heyting_to_tva(h)).ok


def test_all_positive_algebra_is_a_tva():
    # every value positive: the closure conditions hold trivially
    t = replace(bool2(), positive=frozenset([0, 1]), name="trivial")
    assert validate_tva(t).is_tva


def test_reversed_order_is_rejected():
    t = replace(bool2(), order=frozenset({(0, 0), (1, 1), (1, 0)}))
    names = {v.name for v in validate_order(t) if not v.passed}
    assert "top-maximal" in names


def test_incomplete_without_full_quantifiers():
    t = bool2()
    partial = replace(t, forall={s: v for s, v in t.forall.items() if s != frozenset()})
    rep = validate_tva(partial)
    assert not rep.full


def test_completeness_on_chain():
    assert validate_complete(heyting_to_tva(chain(4))).passed


@pytest.mark.parametrize("label_t", list(single_entry_mutations(bool2()))[:400:7], ids=lambda x: x[0])
def test_mutation_witnesses_replay(label_t):
    _, m = label_t
    rep = validate_tva(m)
    for c in rep.conditions:
        if not c.passed:
            assert condition_holds(m, c.index, c.witness) is False


def test_every_condition_can_be_violated():
    failed = set()
    for _, m in single_entry_mutations(bool2()):
        failed.update(validate_tva(m).failed)
    assert failed == set(CONDITIONS)


def test_json_roundtrip():
    for h in small_heyting_algebras():
        t = heyting_to_tva(h)
        data = json.loads(json.dumps(tva_to_json(t)))
        back = tva_from_json(data)
        assert (back.imp, back.forall, back.positive) == (t.imp, t.forall, t.positive)


def test_json_rejects_partial_tables():
    data = tva_to_json(bool2())
    data["imp"] = [[1, 1]]
    with pytest.raises(ValueError):
        tva_from_json(data)


def test_powerset_size():
    assert len(powerset(range(4))) == 16


@given(st.integers(2, 6), st.integers(2, 3))
def test_heyting_laws_on_products(n, m):
    h = product(chain(n), chain(m))
    for a in h.elements:
        for b in h.elements:
            # modus ponens inequality and a => a = top
            assert h.le(h.meet[(a, h.arrow[(a, b)])], b)
            assert h.arrow[(a, a)] == h.top


@given(st.integers(2, 5))
def test_add_top_and_bottom_stay_heyting(n):
    for h in (add_top(chain(n)), add_bottom(chain(n))):
        assert validate_tva(heyting_to_tva(h)).ok


def test_check_condition_counts_instances():
    res = check_condition(bool2(), 3)
    assert res.passed and res.instances == 8
