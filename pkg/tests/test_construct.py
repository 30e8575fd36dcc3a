from __future__ import annotations

import itertools

import pytest

from deskcat.construct import (approximately_complete_check, enumerate_cones, equifier, inserter,
                               isomorphic_categories, pseudopullback, pullback_equiv_check, skeleton,
                               strict_pullback)
from deskcat.corpus import iso_tuple_count, sample_categories
from deskcat.fincat import (Functor, NatTransformation, arrow_category, constant_functor, discrete_category,
                            identity_functor, monoid_category, terminal_category)

Z2 = {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}
IDEM = {("1", "1"): "1", ("1", "a"): "a", ("a", "1"): "a", ("a", "a"): "a"}


def empty_shape():
    return discrete_category([])


def test_pseudopullback_examples():
    T = terminal_category()
    I = identity_functor(T)
    assert pseudopullback(I, I).category.n_objects == 1
    D = discrete_category("ab")
    assert pseudopullback(identity_functor(D), identity_functor(D)).category.n_objects == 2
    Z = monoid_category(["e", "s"], Z2, "e")
    F = Functor(T, Z, [0], [Z.mor("e")])
    P = pseudopullback(F, F)
    assert P.category.n_objects == 4
    # (f, g) range over {id, s}^2
    pairs = {(lab[3], lab[4]) for lab in P.object_labels.values()}
    assert pairs == set(itertools.product(["e", "s"], repeat=2))


@pytest.mark.parametrize("name,C", sample_categories(), ids=lambda x: x if isinstance(x, str) else "")
def test_pseudopullback_identity_matches_iso_count(name, C):
    I = identity_functor(C)
    assert pseudopullback(I, I).category.n_objects == iso_tuple_count(C)


def test_pseudopullback_projections_are_functors():
    C = monoid_category(["e", "s"], Z2, "e")
    I = identity_functor(C)
    P = pseudopullback(I, I)
    for proj in P.projections.values():
        assert proj.source is P.category


def test_pullback_equivalence():
    A = arrow_category()
    I = identity_functor(A)
    assert pullback_equiv_check(I, I).equivalent
    D2, D3 = discrete_category("ab"), discrete_category("xyz")
    G = Functor(D2, D3, [0, 2], [0, 2])
    F = identity_functor(D3)
    assert pullback_equiv_check(F, G).equivalent
    T = terminal_category()
    c0 = constant_functor(T, D2, "a")
    c1 = constant_functor(T, D2, "b")
    rep = pullback_equiv_check(c0, c1)
    assert rep.equivalent and rep.strict_objects == 0 and rep.pseudo_objects == 0


def test_pseudopullback_not_equivalent_without_isofibration():
    T = terminal_category()
    Z = monoid_category(["e", "s"], Z2, "e")
    F = Functor(T, Z, [0], [Z.mor("e")])
    rep = pullback_equiv_check(F, F)
    assert rep.strict_objects == 1 and rep.pseudo_objects == 4
    # (f, g) ~ (f', g') iff f g^-1 = f' g'^-1, so two iso classes against one strict object
    assert not rep.equivalent
    assert skeleton(pseudopullback(F, F).category).n_objects == 2
    assert strict_pullback(F, F).category.n_objects == 1


def test_skeleton_and_isomorphism():
    Z = monoid_category(["e", "s"], Z2, "e")
    assert skeleton(Z).n_objects == 1
    assert isomorphic_categories(Z, Z)
    assert not isomorphic_categories(Z, monoid_category(["1", "a"], IDEM, "1"))


def test_inserter_examples():
    T = terminal_category()
    I = identity_functor(T)
    assert inserter(I, I).category.n_objects == 1
    M = monoid_category(["1", "a"], IDEM, "1")
    ins = inserter(identity_functor(M), identity_functor(M))
    assert sorted(l[1] for l in ins.object_labels.values()) == ["1", "a"]
    # oracle: k: m -> m' iff k.m = m'.k over the 4 candidate (k, pair) combinations
    expected = sum(1 for m, m2, k in itertools.product("1a", "1a", "1a") if IDEM[(k, m)] == IDEM[(m2, k)])
    assert ins.category.n_morphisms == expected == 6
    assert ins.projections["P"].is_faithful()


def test_inserter_into_terminal_value():
    D = discrete_category("abc")
    T = terminal_category()
    F = identity_functor(D)
    G = Functor(D, D, [0, 0, 0], [0, 0, 0])
    ins = inserter(Functor(D, T, [0, 0, 0], [0, 0, 0]), Functor(D, T, [0, 0, 0], [0, 0, 0]))
    assert ins.category.n_objects == 3
    assert list(ins.projections["P"].obj_map) == [0, 1, 2]
    assert inserter(F, G).category.n_objects == 1


def test_equifier_examples():
    A = arrow_category()
    I = identity_functor(A)
    phi = NatTransformation(I, I, A.ident)
    assert equifier(phi, phi) == A
    D = discrete_category("ab")
    Z = monoid_category(["e", "s"], Z2, "e")
    F = constant_functor(D, Z, "*")
    e, s = Z.mor("e"), Z.mor("s")
    assert equifier(NatTransformation(F, F, [e, e]), NatTransformation(F, F, [s, s])).n_objects == 0
    E = equifier(NatTransformation(F, F, [e, e]), NatTransformation(F, F, [e, s]))
    assert list(E.objects) == ["a"]


def test_weakly_initial_examples():
    A = arrow_category()
    rep = approximately_complete_check(A, [Functor(empty_shape(), A, [], [])])[0]
    assert len(rep.weakly_initial_subset) == 1
    assert rep.cones[rep.weakly_initial_subset[0]][0] == A.ob("1")
    D = discrete_category("ab")
    rep = approximately_complete_check(D, [Functor(empty_shape(), D, [], [])])[0]
    assert [rep.cones[w][0] for w in rep.weakly_initial_subset] == [0, 1]
    T = terminal_category()
    rep = approximately_complete_check(T, [identity_functor(T)])[0]
    assert len(rep.cones) == 1 and rep.weakly_initial_subset == [0] and rep.verified


@pytest.mark.parametrize("name,C", sample_categories()[:10], ids=lambda x: x if isinstance(x, str) else "")
def test_weakly_initial_subset_covers(name, C):
    diagrams = [Functor(empty_shape(), C, [], []), identity_functor(C)]
    for rep in approximately_complete_check(C, diagrams):
        assert rep.verified
        assert len(rep.cones) == len(enumerate_cones(rep.diagram))
