import pytest
from hypothesis import given, strategies as st

from polyforge.cosets import enumerate_cosets, group_order, table_violations
from polyforge.errors import LimitExceeded, MalformedPresentation
from polyforge.groups import ConcreteGroup, element_order, subgroup_elements
from polyforge.words import Presentation, Word

letters = st.lists(st.tuples(st.integers(0, 2), st.sampled_from([1, -1])), max_size=12)


def test_reduction_and_inverse():
    w = Word.of(0, 1) * Word.of(1).inverse() * Word.of(2)
    assert w == Word.of(0, 2)
    assert (w * w.inverse()).is_identity
    assert str(Word.parse("g0 g1^-1")) == "g0 g1^-1"


def test_involutions_normalized():
    p = Presentation(2, (True, False), (Word(((0, -1), (1, 1), (1, 1))),))
    assert p.relators == (Word.of(0, 1, 1),)
    assert Word.of(0, 0) in p.all_relators()


def test_text_round_trip():
    p = Presentation.coxeter([4, 3], [Word.of(0, 1, 2) ** 3])
    text = p.to_text()
    assert Presentation.from_text(text).to_text() == text
    assert Presentation.from_text(text) == p


@pytest.mark.parametrize("text", [
    "generators x\ninvolutory 1\n",
    "generators 2\ninvolutory 1\n",
    "generators 1\ninvolutory 1\ng1\n",
    "generators 1\ninvolutory 1\ng0^2\n",
    "",
])
def test_malformed(text):
    with pytest.raises(MalformedPresentation):
        Presentation.from_text(text)


@given(letters)
def test_word_text_round_trip(ls):
    w = Word(tuple(ls))
    assert Word.parse(str(w)) == w


def test_small_orders():
    assert group_order(Presentation(1, (True,))) == 2
    assert group_order(Presentation.coxeter([4, 3])) == 48
    assert group_order(Presentation.coxeter([3, 3])) == 24


def test_coset_table_invariants():
    p = Presentation.coxeter([4, 3])
    t = enumerate_cosets(p, [Word.gen(1), Word.gen(2)])
    assert t.n_cosets == 8
    assert table_violations(t) == []
    # index times subgroup order
    g = ConcreteGroup.from_presentation(p)
    assert t.n_cosets * len(subgroup_elements(g, [Word.gen(1), Word.gen(2)])) == 48


def test_limit_is_not_a_proof():
    with pytest.raises(LimitExceeded) as e:
        group_order(Presentation.coxeter([4, 4]), 2000)
    assert e.value.limit == 2000


def test_rerun_with_larger_budget_is_stable():
    p = Presentation.coxeter([4, 3, 3])
    assert group_order(p, 5000) == group_order(p, 10**6) == 384


def test_env_budget(monkeypatch):
    monkeypatch.setenv("POLYFORGE_MAX_COSETS", "20")
    with pytest.raises(LimitExceeded):
        group_order(Presentation.coxeter([4, 3]))


def test_element_orders():
    g = ConcreteGroup.from_presentation(Presentation.coxeter([4, 3]))
    assert element_order(g, Word()) == 1
    assert element_order(g, Word.of(0, 1)) == 4
    assert element_order(g, Word.of(0, 1, 2)) == 6


_cube = ConcreteGroup.from_presentation(Presentation.coxeter([4, 3]))


@given(letters)
def test_lagrange(ls):
    w = Word(tuple(ls))
    assert 48 % element_order(_cube, w) == 0


@given(letters, letters)
def test_free_reduction_keeps_action(a, b):
    u, v = Word(tuple(a)), Word(tuple(b))
    padded = Word(u.letters + v.letters + v.inverse().letters)
    assert _cube.element(padded) == _cube.element(u)


def test_subgroup_sets():
    g = _cube
    assert subgroup_elements(g, []) == frozenset({0})
    a = subgroup_elements(g, [Word.gen(1), Word.gen(2)])
    b = subgroup_elements(g, [Word.gen(0), Word.gen(1)])
    assert len(a) == 6
    assert a & b == subgroup_elements(g, [Word.gen(1)])
    assert len(a & b) == 2


def test_explicit_set_bound():
    with pytest.raises(LimitExceeded):
        subgroup_elements(_cube, [Word.gen(0)], bound=10)
