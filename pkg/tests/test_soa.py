from __future__ import annotations

import pytest

from deskcat.errors import ConfigError, PresheafError
from deskcat.lifting import box, injective, verify_cellular
from deskcat.ordsimp import delta, delta_1s
from deskcat.presheaf import (constant_set, from_empty, identity_map, isomorphic, set_map, terminal_presheaf,
                              to_terminal)
from deskcat.soa import (BUDGET_EXHAUSTED, FIXPOINT, BoundednessConfig, MorphismClassSource, collect_triples,
                         factorize, injectivity_colimit_check, one_step, union_factorize, weak_reflection)

EMPTY, ONE, TWO = constant_set([]), constant_set(["*"]), constant_set(["p", "q"])
T3 = constant_set("xyz")
E1 = from_empty(ONE)
FOLD = set_map(TWO, ONE, "**")


def test_config_rejects_zero_stages():
    with pytest.raises(ConfigError):
        BoundednessConfig(max_stages=0)


def test_collect_triples_examples():
    f = from_empty(T3)
    assert collect_triples(f, MorphismClassSource([])) == []
    iso = set_map(TWO, constant_set("ab"), "ba")
    assert collect_triples(iso, MorphismClassSource([E1, FOLD])) == []
    triples = collect_triples(f, MorphismClassSource([E1]))
    assert len(triples) == 3
    assert sorted(t.v.comps[0][0] for t in triples) == [0, 1, 2]


def test_unpruned_keeps_solved_squares():
    f = to_terminal(TWO)
    assert collect_triples(f, MorphismClassSource([E1]), prune=True) == []
    assert len(collect_triples(f, MorphismClassSource([E1]), prune=False)) == 1


def test_one_step_examples():
    g = to_terminal(TWO)
    f01, f1 = one_step(g, MorphismClassSource([E1]))
    assert f01 == identity_map(TWO) and f1 == g
    f01, f1 = one_step(from_empty(T3), MorphismClassSource([E1]))
    assert f1.is_iso() and f01.target.total == 3
    assert f1 @ f01 == from_empty(T3)


def test_one_step_symmetrization_of_delta2():
    X = delta(2, 3)
    _, j = delta_1s(3)
    st = one_step(to_terminal(X), MorphismClassSource([j]))
    # one attachment per unsolved nondegenerate edge of the 2-simplex
    assert len(st.triples) == 3


def test_factorize_examples():
    f = from_empty(T3)
    cert = factorize(f, MorphismClassSource([]))
    assert cert.status == FIXPOINT and cert.n_stages == 0 and cert.residual == f
    cert = factorize(f, MorphismClassSource([E1]))
    assert cert.status == FIXPOINT and cert.n_stages == 1 and cert.right_class_verified
    assert cert.check_factorization() and verify_cellular(cert.cellular(), [E1])
    assert cert.cells_per_stage() == [3]


def test_factorize_symmetrization_exhausts_budget():
    X = delta(1, 3)
    _, j = delta_1s(3)
    cert = factorize(to_terminal(X), MorphismClassSource([j]), BoundednessConfig(max_stages=3))
    assert cert.status == BUDGET_EXHAUSTED and cert.n_stages == 3 and cert.pending_triples > 0
    assert cert.check_factorization() and verify_cellular(cert.cellular(), [j])
    assert cert.right_class_verified is None


def test_budget_exhausted_partial_guarantee():
    # every square attached at a completed stage is solved in the next stage's residual
    X = delta(1, 3)
    _, j = delta_1s(3)
    cert = factorize(to_terminal(X), MorphismClassSource([j]), BoundednessConfig(max_stages=2))
    from deskcat.lifting import LiftingProblem, solve
    for i, st in enumerate(cert.stages):
        for t in st.triples:
            u = st.stage_map @ t.u
            assert solve(LiftingProblem(j, st.residual, u, t.v), limit=1)


def test_weak_reflection():
    r, cert = weak_reflection(EMPTY, MorphismClassSource([E1]))
    assert r.target.total == 1 and cert.right_class_verified
    r, cert = weak_reflection(TWO, MorphismClassSource([E1]))
    assert cert.n_stages == 0 and r == identity_map(TWO)
    X = delta(1, 3)
    _, j = delta_1s(3)
    r, cert = weak_reflection(X, MorphismClassSource([j]), BoundednessConfig(max_stages=2))
    assert cert.status == BUDGET_EXHAUSTED and r.source == X


def test_injectivity_colimit_check():
    src = MorphismClassSource([E1])
    i = identity_map(TWO)
    assert injectivity_colimit_check([i, i], src)
    assert injectivity_colimit_check([], src, start=TWO) == injective(TWO, [E1])
    grow = [set_map(ONE, TWO, "p"), set_map(TWO, T3, "xy")]
    assert injectivity_colimit_check(grow, src)
    with pytest.raises(PresheafError):
        injectivity_colimit_check([from_empty(ONE)], src)


def test_union_factorize_examples():
    srcA, srcB = MorphismClassSource([E1]), MorphismClassSource([FOLD])
    f = from_empty(T3)
    alone = factorize(f, srcA)
    with_empty = union_factorize(f, srcA, MorphismClassSource([]))
    assert with_empty.status == FIXPOINT
    assert with_empty.middle == alone.middle and with_empty.residual == alone.residual
    same = union_factorize(f, srcA, srcA)
    assert isomorphic(same.middle, alone.middle)
    assert box(E1, same.residual) == box(E1, alone.residual)
    both = union_factorize(f, srcA, srcB)
    assert both.status == FIXPOINT and both.right_class_verified
    assert box(E1, both.residual) and box(FOLD, both.residual)
    assert both.check_factorization()
    assert verify_cellular(both.cellular(), both.generators)


def test_union_factorize_budget_is_shared():
    X = delta(1, 3)
    _, j = delta_1s(3)
    T = terminal_presheaf(X.base)
    cert = union_factorize(to_terminal(X, T), MorphismClassSource([j]), MorphismClassSource([]),
                           BoundednessConfig(max_stages=2))
    assert cert.status == BUDGET_EXHAUSTED and cert.n_stages == 2


def test_stage_names_are_readable():
    cert = factorize(from_empty(T3), MorphismClassSource([E1]))
    assert cert.middle["*"] == ("c1.0/*", "c1.1/*", "c1.2/*")
