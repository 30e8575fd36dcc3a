"""The reference corpus: fixed instances and one checker per acceptance criterion.

Each checker returns a :class:`CriterionResult` whose ``stats`` contain only
deterministic counts, so summaries can be compared byte for byte.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable

from .colimits import coproduct
from .construct import equifier, pseudopullback
from .fincat import (FinCategory, NatTransformation, arrow_category, comma_category, discrete_category,
                     identity_functor, materialize, monoid_category, opposite, ordinals, terminal_category,
                     category_from_function)
from .lifting import box, brute_force_fillers, solve, squares, verify_cellular
from .ofs import reflect_ort, square_correspondence
from .ordsimp import boundary, codiscrete, census, delta, delta_1s, horn, symmetrize
from .presheaf import PresheafMap, TabularPresheaf, constant_set, from_empty, search_maps, set_map, to_terminal
from .soa import FIXPOINT, BoundednessConfig, MorphismClassSource, factorize


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    stats: dict = field(default_factory=dict)

    def line(self) -> str:
        detail = ", ".join(f"{k}={v}" for k, v in sorted(self.stats.items()))
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.number}: {self.name} ({detail})"

    def to_json(self) -> dict:
        return {"criterion": self.number, "name": self.name, "passed": self.passed, "stats": self.stats}


# ---------------------------------------------------------------------------
# building blocks


def sets(n: int, prefix: str = "e") -> TabularPresheaf:
    return constant_set([f"{prefix}{i}" for i in range(n)])


EMPTY, ONE, TWO = sets(0), sets(1), sets(2)


def set_classes() -> dict[str, list[PresheafMap]]:
    empty_to_one = set_map(EMPTY, ONE, {})
    fold = set_map(TWO, ONE, ["e0", "e0"])
    point = set_map(ONE, TWO, ["e0"])
    return {
        "empty->1": [empty_to_one],
        "2->1": [fold],
        "1->2": [point],
        "empty->1,2->1": [empty_to_one, fold],
    }


def all_set_maps(S: TabularPresheaf, T: TabularPresheaf) -> list[PresheafMap]:
    return search_maps(S, T)


def set_map_pool(max_total: int = 8) -> list[PresheafMap]:
    """A spread of functions between small sets with ``|S| + |T| <= max_total``."""
    pool = []
    for s, t in [(0, 3), (0, 1), (1, 1), (2, 1), (3, 1), (1, 3), (2, 2), (3, 2), (4, 2), (2, 4), (5, 3), (4, 4)]:
        if s + t > max_total:
            continue
        S, T = sets(s, "s"), sets(t, "t")
        maps = all_set_maps(S, T)
        # first, last and a middle map keep the pool small but varied
        picks = sorted({0, len(maps) // 2, len(maps) - 1}) if maps else []
        pool.extend(maps[k] for k in picks)
    return pool


def simplicial_pool(window: int = 3) -> tuple[dict[str, list[PresheafMap]], list[PresheafMap]]:
    """Generator lists and maps over the ordinal window with bound ``window``."""
    d0, d1 = delta(0, window), delta(1, window)
    b1, i1 = boundary(1, window)
    v0 = search_maps(d0, d1)[0]
    two_pts, _ = coproduct([d0, d0])
    fold = search_maps(two_pts, d0)[0]
    classes = {
        "points": [from_empty(d0)],
        "boundary1": [i1],
        "vertex": [v0],
        "fold0": [fold],
    }
    maps = [from_empty(d0), from_empty(d1), fold, i1, v0, to_terminal(d1), to_terminal(b1),
            to_terminal(two_pts), search_maps(d1, d0)[0], search_maps(b1, d0)[0]]
    return classes, maps


# ---------------------------------------------------------------------------
# criteria


def criterion_1(max_stages: int = 8) -> CriterionResult:
    instances = []
    for cname, gens in set_classes().items():
        for f in set_map_pool():
            instances.append((f"sets:{cname}", f, gens))
    classes, maps = simplicial_pool(3)
    for cname, gens in classes.items():
        for f in maps:
            instances.append((f"simplicial:{cname}", f, gens))
    cfg = BoundednessConfig(max_stages=max_stages)
    fix = failures = 0
    for _, f, gens in instances:
        cert = factorize(f, MorphismClassSource(gens), cfg)
        if cert.status != FIXPOINT:
            continue
        fix += 1
        ok = cert.check_factorization() and cert.right_class_verified
        ok = ok and verify_cellular(cert.cellular(), gens)
        ok = ok and all(box(h, cert.residual) for h in gens)
        failures += 0 if ok else 1
    return CriterionResult(1, "WFS factorization soundness", failures == 0 and fix >= 30,
                           {"instances": len(instances), "fixpoints": fix, "failures": failures})


def lifting_square_pool() -> list[tuple[PresheafMap, PresheafMap]]:
    pairs = []
    cls = set_classes()
    lefts = [cls["empty->1"][0], cls["2->1"][0], cls["1->2"][0]]
    rights = set_map_pool(6)
    pairs += [(f, g) for f in lefts for g in rights]
    classes, maps = simplicial_pool(2)
    lefts = [g for gs in classes.values() for g in gs]
    pairs += [(f, g) for f in lefts for g in maps]
    return [(f, g) for f, g in pairs if max(f.source.total, f.target.total, g.source.total, g.target.total) <= 64]


def criterion_2() -> CriterionResult:
    n_sq = disc = 0
    for f, g in lifting_square_pool():
        for p in squares(f, g):
            n_sq += 1
            if [d.key() for d in solve(p)] != brute_force_fillers(p):
                disc += 1
    return CriterionResult(2, "lifting solver matches brute force", disc == 0 and n_sq > 0,
                           {"squares": n_sq, "discrepancies": disc})


def _inclusion_chain(objs: list[TabularPresheaf]) -> list[PresheafMap]:
    """Maps sending each element to the element of the same name in the next object."""
    out = []
    for X, Y in zip(objs, objs[1:]):
        comps = {X.base.objects[o]: {e: e for e in X.elements[o]} for o in range(X.base.n_objects)}
        out.append(PresheafMap.from_dict(X, Y, comps))
    return out


def injective_chains() -> list[tuple[list[PresheafMap], TabularPresheaf, list[PresheafMap]]]:
    """``(chain, first object, generators)`` with every object injective."""
    cls = set_classes()
    out = []
    for n in (1, 2, 3):
        objs = [sets(k) for k in range(n, n + 3)]
        out.append((_inclusion_chain(objs), objs[0], cls["empty->1"]))
        out.append((_inclusion_chain(objs), objs[0], cls["1->2"]))
    out.append((_inclusion_chain([ONE] * 4), ONE, cls["2->1"]))
    out.append((_inclusion_chain([EMPTY] * 3), EMPTY, cls["2->1"]))
    out.append(([], ONE, cls["empty->1,2->1"]))
    _, j = delta_1s(3)
    letters = "abcd"
    objs = [codiscrete(letters[:k], 3) for k in range(1, 4)]
    out.append((_inclusion_chain(objs), objs[0], [j]))
    d0 = delta(0, 3)
    _, i1 = boundary(1, 3)
    out.append((_inclusion_chain(objs), objs[0], [i1, from_empty(d0)]))
    objs2 = [codiscrete(letters[:k], 2) for k in range(1, 5)]
    _, i1b = boundary(1, 2)
    out.append((_inclusion_chain(objs2), objs2[0], [i1b]))
    _, h = horn(2, 1, 3)
    out.append((_inclusion_chain(objs), objs[0], [h]))
    return out


def criterion_3() -> CriterionResult:
    from .soa import injectivity_colimit_check

    chains = injective_chains()
    failures = 0
    for chain, start, gens in chains:
        if len(chain) + 1 > 5:
            failures += 1
            continue
        if not injectivity_colimit_check(chain, MorphismClassSource(gens), start):
            failures += 1
    return CriterionResult(3, "injectivity closed under chain colimits", failures == 0 and len(chains) >= 10,
                           {"chains": len(chains), "failures": failures})


def square_pairs() -> list[tuple[PresheafMap, PresheafMap]]:
    small = [sets(k, "x") for k in range(3)]
    pairs = []
    for S, T in itertools.product(small, repeat=2):
        for f in search_maps(S, T):
            if f.source.total + f.target.total > 3:
                continue
            for g in (set_map(TWO, ONE, ["e0", "e0"]), set_map(ONE, TWO, ["e1"]), to_terminal(TWO)):
                pairs.append((f, g))
    return pairs


def criterion_4() -> CriterionResult:
    cls = set_classes()
    family = [sets(k, "y") for k in range(4)]
    wrong = bad_counts = checks = 0
    for name, expect in (("empty->1", lambda n: 1), ("2->1", lambda n: 0 if n == 0 else 1)):
        for n in range(5):
            R = reflect_ort(sets(n), cls[name], test_family=family)
            if R.certificate.status != FIXPOINT or R.reflected.total != expect(n) or not R.orthogonal:
                wrong += 1
            checks += len(R.universal_counts)
            bad_counts += sum(1 for c in R.universal_counts if c != 1)
    pairs = square_pairs()
    corr_fail = sum(1 for f, g in pairs if not square_correspondence(f, g).ok)
    ok = wrong == 0 and bad_counts == 0 and corr_fail == 0 and len(pairs) >= 20 and checks > 0
    return CriterionResult(4, "orthogonal reflections and square correspondence", ok,
                           {"reflection_mismatches": wrong, "universal_checks": checks,
                            "non_unique": bad_counts, "square_pairs": len(pairs),
                            "correspondence_failures": corr_fail})


def criterion_5(window: int = 3) -> CriterionResult:
    Q, _ = delta_1s(window)
    c = census(Q)
    rep = symmetrize(delta(1, window), 3)
    edges = rep.edge_counts
    increasing = all(a < b for a, b in zip(edges, edges[1:]))
    ok = c[0] == 2 and c[1] == 2 and increasing and rep.certificate.status == "BudgetExhausted"
    return CriterionResult(5, "symmetric simplex anchors", ok,
                           {"vertices": c[0], "edges": c[1], "symmetrize_edges": edges,
                            "status": rep.certificate.status})


def sample_categories() -> list[tuple[str, FinCategory]]:
    z2 = monoid_category(["e", "s"], {("e", "e"): "e", ("e", "s"): "s", ("s", "e"): "s", ("s", "s"): "e"}, "e")
    idem = monoid_category(["1", "a"], {("1", "1"): "1", ("1", "a"): "a", ("a", "1"): "a", ("a", "a"): "a"}, "1")
    z3 = monoid_category(["0", "1", "2"], {(str(a), str(b)): str((a + b) % 3) for a in range(3) for b in range(3)}, "0")
    chaotic = category_from_function(
        ["p", "q"],
        [("id_p", "p", "p"), ("id_q", "q", "q"), ("pq", "p", "q"), ("qp", "q", "p")],
        {"p": "id_p", "q": "id_q"},
        lambda g, f: f if g.startswith("id") else g if f.startswith("id") else
        {("qp", "pq"): "id_p", ("pq", "qp"): "id_q"}[(g, f)],
    )
    return [
        ("terminal", terminal_category()),
        ("discrete2", discrete_category(["a", "b"])),
        ("discrete3", discrete_category(["a", "b", "c"])),
        ("arrow", arrow_category()),
        ("arrow_op", opposite(arrow_category())),
        ("z2", z2),
        ("z3", z3),
        ("idempotent", idem),
        ("chaotic2", chaotic),
        ("ordinals2", materialize(ordinals(), 2)),
        ("ordinals3", materialize(ordinals(), 3)),
        ("ordinals4", materialize(ordinals(), 4)),
        ("arrow_of_arrow", comma_category(identity_functor(arrow_category()),
                                          identity_functor(arrow_category())).category),
    ]


def iso_tuple_count(C: FinCategory) -> int:
    """Direct count of ``(K, L, M, f, g)`` with ``f: K -> M``, ``g: L -> M`` invertible."""
    total = 0
    for M in range(C.n_objects):
        into = 0
        for m in range(C.n_morphisms):
            if C.cod[m] != M:
                continue
            if any(C.comp[n, m] == C.ident[C.dom[m]] and C.comp[m, n] == C.ident[M]
                   for n in range(C.n_morphisms) if C.dom[n] == M and C.cod[n] == C.dom[m]):
                into += 1
        total += into * into
    return total


def criterion_6() -> CriterionResult:
    cats = sample_categories()
    failures = []
    for name, C in cats:
        I = identity_functor(C)
        phi = NatTransformation(I, I, C.ident)
        E = equifier(phi, phi)
        if E != C:
            failures.append(f"{name}:equifier")
        if comma_category(I, I).category.n_objects != C.n_morphisms:
            failures.append(f"{name}:comma")
        if pseudopullback(I, I).category.n_objects != iso_tuple_count(C):
            failures.append(f"{name}:pseudopullback")
    return CriterionResult(6, "construction identities", not failures and len(cats) >= 10,
                           {"categories": len(cats), "failures": len(failures)})


CRITERIA: list[Callable[[], CriterionResult]] = [criterion_1, criterion_2, criterion_3, criterion_4,
                                                  criterion_5, criterion_6]


def run_corpus() -> list[CriterionResult]:
    """Criteria 1-6; determinism (7) is a property of the written summary."""
    return [c() for c in CRITERIA]
