from __future__ import annotations

import numpy as np
import pytest

from deskcat.colimits import chain_colimit, coproduct, pushout
from deskcat.errors import PresheafError, WindowTooSmall
from deskcat.fincat import arrow_category, category_from_function, discrete_category, materialize, ordinals
from deskcat.lifting import brute_force_maps
from deskcat.presheaf import (FormalColimitPresheaf, PresheafMap, TabularPresheaf, canonical_functor_E,
                              constant_set, count_maps, empty_presheaf, evaluate_formal, identity_map, image,
                              is_filtered, isomorphic, point_category, pullback, search_maps, set_map,
                              subpresheaf, tabulate, terminal_presheaf, to_terminal, yoneda, yoneda_map)


def O(n):
    return materialize(ordinals(), n)


def parallel_pair():
    return category_from_function(
        ["s", "t"], [("id_s", "s", "s"), ("id_t", "t", "t"), ("f", "s", "t"), ("g", "s", "t")],
        {"s": "id_s", "t": "id_t"}, lambda g, f: f if g.startswith("id") else g)


def span():
    return category_from_function(
        ["c", "a", "b"], [("id_c", "c", "c"), ("id_a", "a", "a"), ("id_b", "b", "b"), ("l", "c", "a"), ("r", "c", "b")],
        {"c": "id_c", "a": "id_a", "b": "id_b"}, lambda g, f: f if g.startswith("id") else g)


def chain3():
    comp = {("v", "u"): "vu"}
    return category_from_function(
        ["0", "1", "2"],
        [("id0", "0", "0"), ("id1", "1", "1"), ("id2", "2", "2"), ("u", "0", "1"), ("v", "1", "2"), ("vu", "0", "2")],
        {"0": "id0", "1": "id1", "2": "id2"},
        lambda g, f: f if g.startswith("id") else g if f.startswith("id") else comp[(g, f)])


def test_from_dict_and_json_roundtrip():
    A = arrow_category()
    X = TabularPresheaf.from_dict(A, {"0": ["x", "y"], "1": ["p"]}, {"a": {"p": "y"}})
    assert X.restrict("a", "p") == "y"
    again = TabularPresheaf.from_dict(A, X.to_json()["sets"], X.to_json()["actions"])
    assert again == X


def test_missing_action_is_an_error():
    with pytest.raises(PresheafError):
        TabularPresheaf.from_dict(arrow_category(), {"0": ["x"], "1": ["p"]}, {})


def test_functoriality_violation_detected():
    C = O(3)
    Y = yoneda(C, "2")
    act = [a.copy() for a in Y.act]
    m = C.mor("1>2:0")
    act[m] = act[m][::-1].copy()
    with pytest.raises(PresheafError):
        TabularPresheaf(C, Y.elements, act)


def test_yoneda_examples():
    T = point_category()
    assert yoneda(T, "*").sizes.tolist() == [1]
    C = O(3)
    assert yoneda(C, "2").size("1") == 2
    A = arrow_category()
    assert yoneda(A, "1").sizes.tolist() == [1, 1]


@pytest.mark.parametrize("window", [2, 3, 4])
def test_yoneda_sizes_are_hom_counts(window):
    C = O(window)
    for a in C.objects:
        Y = yoneda(C, a)
        assert Y.sizes.tolist() == [len(C.hom(b, a)) for b in C.objects]


@pytest.mark.parametrize("a,b", [("1", "2"), ("2", "2"), ("0", "1"), ("2", "1")])
def test_yoneda_lemma_counts(a, b):
    C = O(3)
    assert count_maps(yoneda(C, a), yoneda(C, b)) == len(C.hom(a, b))
    assert len(brute_force_maps(yoneda(C, a), yoneda(C, b))) == len(C.hom(a, b))


def test_yoneda_map_is_natural_and_composes():
    C = O(4)
    f, g = C.mor("1>2:1"), C.mor("2>3:0,2")
    assert yoneda_map(C, g) @ yoneda_map(C, f) == yoneda_map(C, C.compose(g, f))


def test_map_inverse_and_identity():
    S = constant_set("abc")
    T = constant_set("xyz")
    f = set_map(S, T, "zxy")
    assert f.is_iso()
    assert f.inverse() @ f == identity_map(S)
    assert not to_terminal(S).is_injective()


def test_subpresheaf_closure():
    C = O(3)
    D = yoneda(C, "2")
    with pytest.raises(PresheafError):
        subpresheaf(D, {"2": ["2>2:0,1"]})
    at_zero = {o: [e for e in D[o] if set(e.split(":")[1].split(",")) <= {"0", ""}] for o in C.objects}
    S, incl = subpresheaf(D, at_zero)
    assert S.sizes.tolist() == [1, 1, 1] and incl.is_injective()


def test_image_and_pullback():
    S, T = constant_set("abc"), constant_set("xy")
    f = set_map(S, T, "xxy")
    I, incl = image(f)
    assert I.total == 2
    P, q1, q2 = pullback(f, f)
    assert P.total == 5
    assert f @ q1 == f @ q2
    assert "(a,b)" in P["*"]


def test_isomorphic():
    C = O(3)
    X = coproduct([yoneda(C, "1"), yoneda(C, "2")])[0]
    Y = coproduct([yoneda(C, "2"), yoneda(C, "1")])[0]
    assert isomorphic(X, Y)
    assert not isomorphic(X, yoneda(C, "2"))


def test_search_is_sorted_and_deterministic():
    C = O(3)
    X, Y = yoneda(C, "2"), coproduct([yoneda(C, "2"), yoneda(C, "1")])[0]
    a = [m.key() for m in search_maps(X, Y)]
    assert a == sorted(a) == [m.key() for m in search_maps(X, Y)]
    assert len(a) == len(brute_force_maps(X, Y))


def test_canonical_functor_examples():
    C = O(4)
    E = canonical_functor_E("2", C, ["1", "2"])
    assert E.size("2") >= 1 and "2>2:0,1" in E["2"]
    T = terminal_presheaf(C)
    E = canonical_functor_E(T, C, ["1", "2"])
    assert E.sizes.tolist() == [1, 1]
    D2 = yoneda(C, "3")
    E = canonical_functor_E(D2, C, ["1", "2"])
    # isotone maps from a 2-chain to a 3-chain
    assert E.size("2") == 6 == len(C.hom("2", "3"))


def test_canonical_functor_object_and_presheaf_agree():
    C = O(4)
    by_obj = canonical_functor_E("3", C, ["1", "2", "3"])
    by_psh = canonical_functor_E(yoneda(C, "3"), C, ["1", "2", "3"])
    assert by_obj.sizes.tolist() == by_psh.sizes.tolist()
    assert by_obj == by_psh


def test_formal_point_and_discrete():
    pt = discrete_category(["j"])
    P = FormalColimitPresheaf(ordinals(), pt, {"j": "2"})
    assert len(evaluate_formal(P, "1", window=3)) == 2
    two = discrete_category(["j", "k"])
    P2 = FormalColimitPresheaf(ordinals(), two, {"j": "2", "k": "2"})
    assert len(evaluate_formal(P2, "1", window=3)) == 4


def test_formal_delta_1s_at_vertices():
    P = FormalColimitPresheaf(ordinals(), parallel_pair(), {"s": "2", "t": "3"},
                              {"f": "2>3:0,2", "g": "2>3:0,0"})
    assert len(evaluate_formal(P, "1", window=4)) == 2


def test_formal_respects_window():
    P = FormalColimitPresheaf(ordinals(), discrete_category(["j"]), {"j": "3"})
    with pytest.raises(WindowTooSmall):
        tabulate(P, 3)
    with pytest.raises(WindowTooSmall):
        evaluate_formal(P, "4", window=4)


@pytest.mark.parametrize("window", [2, 3, 4])
def test_tabulate_representable_is_yoneda(window):
    P = FormalColimitPresheaf(ordinals(), discrete_category(["j"]), {"j": "1"})
    X = tabulate(P, window)
    Y = yoneda(O(window), "1")
    assert X.sizes.tolist() == Y.sizes.tolist()
    assert X.rename(lambda o, e: e.split("|", 1)[1]) == Y


def test_tabulate_empty_shape():
    X = tabulate(FormalColimitPresheaf(ordinals(), discrete_category([]), {}), 3)
    assert X == empty_presheaf(O(3))


def test_tabulate_pushout_matches_colimits():
    P = FormalColimitPresheaf(ordinals(), span(), {"c": "1", "a": "2", "b": "2"},
                              {"l": "1>2:1", "r": "1>2:0"})
    X = tabulate(P, 4)
    C = O(4)
    cone = pushout(yoneda_map(C, "1>2:1"), yoneda_map(C, "1>2:0"))
    assert isomorphic(X, cone.apex)
    assert X.sizes.tolist() == [1, 3, 5, 7]


def test_filtered_formal_matches_chain_colimit():
    S = chain3()
    assert is_filtered(S) and not is_filtered(discrete_category("ab"))
    P = FormalColimitPresheaf(ordinals(), S, {"0": "1", "1": "2", "2": "3"},
                              {"u": "1>2:0", "v": "2>3:0,1", "vu": "1>3:0"})
    C = O(4)
    cone = chain_colimit([yoneda_map(C, "1>2:0"), yoneda_map(C, "2>3:0,1")])
    X = tabulate(P, 4)
    for o in C.objects:
        assert len(evaluate_formal(P, o, window=4)) == cone.apex.size(o) == X.size(o)


def test_ambiguous_morphism_label():
    P = FormalColimitPresheaf(ordinals(), parallel_pair(), {"s": "2", "t": "3"})
    with pytest.raises(Exception):
        tabulate(P, 4)


def test_map_validate_rejects_unnatural():
    C = O(3)
    X = yoneda(C, "2")
    bad = [np.zeros(n, dtype=np.int64) for n in X.sizes]
    bad[2] = np.array([0, 1, 2])
    with pytest.raises(PresheafError):
        PresheafMap(X, X, [np.arange(n) for n in X.sizes[:2]] + [np.array([2, 1, 0])])
    assert PresheafMap(X, X, [np.arange(n) for n in X.sizes]) == identity_map(X)
