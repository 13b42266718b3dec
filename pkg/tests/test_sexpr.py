import pytest
from hypothesis import given, strategies as st

from modulo import sexpr
from modulo.sexpr import ParseError

atoms = st.from_regex(r"[a-zA-Z=>|:\-][a-zA-Z0-9=>\-]{0,5}", fullmatch=True)
trees = st.recursive(atoms, lambda kids: st.lists(kids, max_size=4), max_leaves=20)


def test_read_nested():
    assert sexpr.read("(a (b c) ())") == ["a", ["b", "c"], []]


def test_comments_and_whitespace():
    assert sexpr.read_all("; note\n(a b) ; tail\n c") == [["a", "b"], "c"]


def test_braces_are_marked():
    x = sexpr.read("{K T U}")
    assert sexpr.is_brace(x)
    assert sexpr.dumps(x) == "{K T U}"


@pytest.mark.parametrize("bad", ["(a b", "a)", "", "(a} ", "a b"])
def test_rejects_malformed(bad):
    with pytest.raises(ParseError):
        sexpr.read(bad)


def test_split_keywords():
    kw, rest = sexpr.split_keywords(sexpr.read("(:name n :vars (x) L R)"))
    assert kw == {"name": "n", "vars": ["x"]}
    assert rest == ["L", "R"]


def test_pretty_keeps_keyword_pairs_together():
    text = sexpr.pretty(sexpr.read("(node :concl (|- () (=> P Q)) :A P (leaf :concl x) (leaf :concl y))"), 30)
    assert any(line.strip().startswith(":concl (|-") or ":concl (|-" in line for line in text.splitlines())
    assert sexpr.read(text) == sexpr.read("(node :concl (|- () (=> P Q)) :A P (leaf :concl x) (leaf :concl y))")


@given(trees)
def test_dumps_read_roundtrip(t):
    assert sexpr.read(sexpr.dumps(t)) == t


@given(trees, st.integers(min_value=10, max_value=80))
def test_pretty_read_roundtrip(t, width):
    assert sexpr.read(sexpr.pretty(t, width)) == t
