import random

from hypothesis import given, settings, strategies as st
import pytest

from modulo.generators import random_proofs, random_prop, vocabulary
from modulo.kernel import check
from modulo.lang import check_prop, free_vars
from modulo.structures import data_path
from modulo.theories import builtin, load_theory

NAMES = ["pimpq", "qimpp", "subset", "stt"]


@pytest.mark.parametrize("name", NAMES)
def test_generated_proofs_are_accepted(name):
    th = builtin(name)
    for p in random_proofs(th, 60, 5):
        assert check(th, p).accepted
        assert p.depth() <= 6


@pytest.mark.parametrize("name", NAMES)
def test_generation_is_deterministic_per_seed(name):
    th = builtin(name)
    assert random_proofs(th, 10, 42) == random_proofs(th, 10, 42)
    assert random_proofs(th, 10, 42) != random_proofs(th, 10, 43)


def test_depth_bound():
    th = builtin("subset")
    assert all(p.depth() <= 3 for p in random_proofs(th, 50, 1, depth=3))


def test_some_proofs_are_closed():
    th = builtin("qimpp")
    assert any(not p.context for p in random_proofs(th, 30, 2))


def test_first_order_vocabulary():
    th = load_theory(data_path("monoid.thy"))
    voc = vocabulary(th)
    rng = random.Random(0)
    for _ in range(50):
        p = random_prop(rng, voc, 3)
        check_prop(th.signature, p)
        assert {v.name for v in free_vars(p)} <= set(th.env)
    for p in random_proofs(th, 30, 3):
        assert check(th, p).accepted


@settings(max_examples=60)
@given(st.integers(0, 10_000))
def test_subset_props_are_well_scoped(seed):
    th = builtin("subset")
    p = random_prop(random.Random(seed), vocabulary(th), 4)
    assert {v.name for v in free_vars(p)} <= set(th.env)
