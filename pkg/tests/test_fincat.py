from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from deskcat.errors import IdentityLawViolation, MissingComposite, NonAssociative
from deskcat.fincat import (Functor, arrow_category, comma_category, compose_functors, discrete_category,
                            full_subcategory, identity_functor, materialize, monoid_category, opposite, ordinals,
                            parse_ordinal_morphism, terminal_category, validate_category)

# {e, a, b} with e the unit and xy = y on {a, b} (a right-zero band)
BAND = {("e", "e"): "e", ("e", "a"): "a", ("e", "b"): "b", ("a", "e"): "a", ("b", "e"): "b",
        ("a", "a"): "a", ("a", "b"): "b", ("b", "a"): "a", ("b", "b"): "b"}


def band():
    return monoid_category(["e", "a", "b"], BAND, "e")


def test_terminal_is_valid():
    T = validate_category({"objects": ["*"], "morphisms": [{"name": "id", "dom": "*", "cod": "*"}],
                           "identities": {"*": "id"}, "compose": [["id", "id", "id"]]})
    assert (T.n_objects, T.n_morphisms) == (1, 1)


def test_missing_composite():
    data = {"objects": ["0", "1"],
            "morphisms": [["id0", "0", "0"], ["id1", "1", "1"], ["f", "0", "1"]],
            "identities": {"0": "id0", "1": "id1"},
            "compose": [["id0", "id0", "id0"], ["id1", "id1", "id1"], ["f", "id0", "f"]]}
    with pytest.raises(MissingComposite):
        validate_category(data)
    data["compose"].append(["id1", "f", "f"])
    assert validate_category(data).n_morphisms == 3


def test_monoid_associativity_brute_force():
    C = band()
    elems = ["e", "a", "b"]
    triples = list(itertools.product(elems, repeat=3))
    assert len(triples) == 27
    for h, g, f in triples:
        assert BAND[(BAND[(h, g)], f)] == BAND[(h, BAND[(g, f)])]
        assert C.compose(C.compose(h, g), f) == C.compose(h, C.compose(g, f))


def test_non_associative_rejected():
    bad = {("e", x): x for x in "eab"} | {(x, "e"): x for x in "ab"}
    bad |= {("a", "a"): "b", ("a", "b"): "a", ("b", "a"): "a", ("b", "b"): "a"}
    with pytest.raises(NonAssociative):
        monoid_category(["e", "a", "b"], bad, "e")


def test_identity_law_violation():
    table = {(x, y): "a" for x in "ea" for y in "ea"}
    with pytest.raises(IdentityLawViolation):
        monoid_category(["e", "a"], table, "e")


def monotone_count(a, b):
    return sum(1 for t in itertools.product(range(b), repeat=a) if all(x <= y for x, y in zip(t, t[1:])))


def test_ordinal_windows():
    O1 = materialize(ordinals(), 1)
    assert (O1.n_objects, O1.n_morphisms) == (1, 1)
    O3 = materialize(ordinals(), 3)
    assert list(O3.objects) == ["0", "1", "2"]
    assert len(O3.hom("2", "2")) == 3
    O4 = materialize(ordinals(), 4)
    assert len(O4.hom("3", "3")) == 10


@pytest.mark.parametrize("window", [1, 2, 3, 4, 5])
def test_ordinal_hom_counts_match_enumeration(window):
    O = materialize(ordinals(), window)
    for a in range(window):
        for b in range(window):
            assert len(O.hom(str(a), str(b))) == monotone_count(a, b)


def test_ordinal_composition_is_function_composition():
    O = materialize(ordinals(), 4)
    g_, f_, gf_ = O.composable_pairs
    for g, f, gf in zip(g_, f_, gf_):
        _, _, kg = parse_ordinal_morphism(O.morphisms[g])
        _, _, kf = parse_ordinal_morphism(O.morphisms[f])
        _, _, kgf = parse_ordinal_morphism(O.morphisms[gf])
        assert kgf == tuple(kg[i] for i in kf)


def test_materialize_inclusion_is_full():
    O3, O5 = materialize(ordinals(), 3), materialize(ordinals(), 5)
    assert full_subcategory(O5, O3.objects) == O3


def test_opposite():
    T = terminal_category()
    assert opposite(T) == T
    A = arrow_category()
    Aop = opposite(A)
    a = Aop.mor("a")
    assert (Aop.objects[Aop.dom[a]], Aop.objects[Aop.cod[a]]) == ("1", "0")
    assert opposite(opposite(band())) == band()


def test_comma_identity_examples():
    T = terminal_category()
    c = comma_category(identity_functor(T), identity_functor(T)).category
    assert (c.n_objects, c.n_morphisms) == (1, 1)
    A = arrow_category()
    c = comma_category(identity_functor(A), identity_functor(A)).category
    assert c.n_objects == 3


def test_comma_with_object_is_hom():
    O = materialize(ordinals(), 4)
    A = full_subcategory(O, ["1"])
    incl = Functor(A, O, [O.ob("1")], [O.mor(m) for m in A.morphisms])
    K = Functor(terminal_category(), O, [O.ob("3")], [O.identity(O.ob("3"))])
    c = comma_category(incl, K).category
    assert c.n_objects == len(O.hom("1", "3"))


@pytest.mark.parametrize("C", [terminal_category(), arrow_category(), discrete_category("xyz"), band(),
                               materialize(ordinals(), 3)], ids=repr)
def test_comma_identity_object_count(C):
    I = identity_functor(C)
    assert comma_category(I, I).category.n_objects == C.n_morphisms


def test_functor_composition_and_json():
    A = arrow_category()
    I = identity_functor(A)
    assert compose_functors(I, I) == I
    assert I.to_json()["objects"] == {"0": "0", "1": "1"}


def test_json_roundtrip():
    C = materialize(ordinals(), 3)
    assert validate_category(C.to_json()) == C


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 5), st.data())
def test_random_triples_associate(window, data):
    O = materialize(ordinals(), window)
    g_, f_, gf_ = O.composable_pairs
    i = data.draw(st.integers(0, len(g_) - 1))
    h_cands = np.flatnonzero(O.dom == O.cod[g_[i]])
    h = int(h_cands[data.draw(st.integers(0, len(h_cands) - 1))])
    assert O.comp[O.comp[h, g_[i]], f_[i]] == O.comp[h, gf_[i]]
