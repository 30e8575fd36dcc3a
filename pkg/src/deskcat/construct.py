"""Limit-type constructions on finite categories."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import FunctorError, SearchExceeded
from .fincat import (Construction, FinCategory, Functor, NatTransformation, build_construction,
                     full_subcategory)

EQUIV_SIZE_BOUND = 32
EQUIV_BUDGET = 1_000_000


def _iso_pairs(M: FinCategory):
    """``(iso, inverse)`` lookup for every isomorphism of ``M``."""
    out = {}
    for m in M.isos:
        out[int(m)] = M.inverse(int(m))
    return out


def pseudopullback(F: Functor, G: Functor) -> Construction:
    """Objects ``(K, L, M, f: FK -> M, g: GL -> M)`` with ``f, g`` isomorphisms;
    morphisms ``(k, l, m)`` with ``m f = f' F(k)`` and ``m g = g' G(l)``.

    Objects are ordered by ``(K, L, M, f, g)`` indices.
    """
    if F.target != G.target:
        raise FunctorError("pseudopullback needs functors with a common target")
    K, L, M = F.source, G.source, F.target
    isos = _iso_pairs(M)
    objs = []
    for a in range(K.n_objects):
        for b in range(L.n_objects):
            for c in range(M.n_objects):
                fs = [int(f) for f in M.hom(F.obj_map[a], c) if int(f) in isos]
                gs = [int(g) for g in M.hom(G.obj_map[b], c) if int(g) in isos]
                objs.extend((a, b, c, f, g) for f in fs for g in gs)
    mors = []
    for x in objs:
        for y in objs:
            for k in K.hom(x[0], y[0]):
                for l in L.hom(x[1], y[1]):
                    for m in M.hom(x[2], y[2]):
                        if (M.comp[m, x[3]] == M.comp[y[3], F.mor_map[k]]
                                and M.comp[m, x[4]] == M.comp[y[4], G.mor_map[l]]):
                            mors.append(((int(k), int(l), int(m)), x, y))
    C, okeys, mkeys = build_construction(
        objs, mors,
        lambda g, f: (int(K.comp[g[0], f[0]]), int(L.comp[g[1], f[1]]), int(M.comp[g[2], f[2]])),
        lambda x: (int(K.ident[x[0]]), int(L.ident[x[1]]), int(M.ident[x[2]])),
    )
    P1 = Functor(C, K, [o[0] for o in okeys], [m[0][0] for m in mkeys])
    P2 = Functor(C, L, [o[1] for o in okeys], [m[0][1] for m in mkeys])
    P3 = Functor(C, M, [o[2] for o in okeys], [m[0][2] for m in mkeys])
    return Construction(
        C,
        {C.objects[i]: (K.objects[o[0]], L.objects[o[1]], M.objects[o[2]], M.morphisms[o[3]], M.morphisms[o[4]])
         for i, o in enumerate(okeys)},
        {C.morphisms[i]: (K.morphisms[k[0]], L.morphisms[k[1]], M.morphisms[k[2]])
         for i, (k, _, _) in enumerate(mkeys)},
        {"P1": P1, "P2": P2, "P3": P3},
    )


def strict_pullback(F: Functor, G: Functor) -> Construction:
    """Objects ``(K, L)`` with ``FK = GL``; morphisms ``(k, l)`` with ``Fk = Gl``."""
    if F.target != G.target:
        raise FunctorError("pullback needs functors with a common target")
    K, L = F.source, G.source
    objs = [(a, b) for a in range(K.n_objects) for b in range(L.n_objects) if F.obj_map[a] == G.obj_map[b]]
    mors = []
    for x in objs:
        for y in objs:
            for k in K.hom(x[0], y[0]):
                for l in L.hom(x[1], y[1]):
                    if F.mor_map[k] == G.mor_map[l]:
                        mors.append(((int(k), int(l)), x, y))
    C, okeys, mkeys = build_construction(
        objs, mors,
        lambda g, f: (int(K.comp[g[0], f[0]]), int(L.comp[g[1], f[1]])),
        lambda x: (int(K.ident[x[0]]), int(L.ident[x[1]])),
    )
    return Construction(
        C,
        {C.objects[i]: (K.objects[o[0]], L.objects[o[1]]) for i, o in enumerate(okeys)},
        {C.morphisms[i]: (K.morphisms[k[0]], L.morphisms[k[1]]) for i, (k, _, _) in enumerate(mkeys)},
        {"P1": Functor(C, K, [o[0] for o in okeys], [m[0][0] for m in mkeys]),
         "P2": Functor(C, L, [o[1] for o in okeys], [m[0][1] for m in mkeys])},
    )


# ---------------------------------------------------------------------------
# equivalence of finite categories


def iso_classes(C: FinCategory) -> list[list[int]]:
    isos = C.isos
    parent = list(range(C.n_objects))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for m in isos:
        a, b = find(int(C.dom[m])), find(int(C.cod[m]))
        if a != b:
            parent[max(a, b)] = min(a, b)
    classes: dict[int, list[int]] = {}
    for o in range(C.n_objects):
        classes.setdefault(find(o), []).append(o)
    return [classes[k] for k in sorted(classes)]


def skeleton(C: FinCategory) -> FinCategory:
    return full_subcategory(C, [cls[0] for cls in iso_classes(C)])


def isomorphic_categories(A: FinCategory, B: FinCategory, budget: int = EQUIV_BUDGET) -> bool:
    """Backtracking search for an isomorphism of finite categories."""
    if A.n_objects != B.n_objects or A.n_morphisms != B.n_morphisms:
        return False

    def signature(C, o):
        out = sorted(len(C.hom(o, p)) for p in range(C.n_objects))
        inn = sorted(len(C.hom(p, o)) for p in range(C.n_objects))
        return (len(C.hom(o, o)), tuple(out), tuple(inn))

    sa = [signature(A, o) for o in range(A.n_objects)]
    sb = [signature(B, o) for o in range(B.n_objects)]
    if sorted(sa) != sorted(sb):
        return False
    nodes = [0]

    def tick():
        nodes[0] += 1
        if nodes[0] > budget:
            raise SearchExceeded("category isomorphism search exceeded its budget", nodes[0])

    obj = [-1] * A.n_objects
    used_o = [False] * B.n_objects

    def assign_objects(i):
        if i == A.n_objects:
            return assign_morphisms()
        for j in range(B.n_objects):
            if used_o[j] or sa[i] != sb[j]:
                continue
            ok = all(len(A.hom(i, p)) == len(B.hom(j, obj[p])) and len(A.hom(p, i)) == len(B.hom(obj[p], j))
                     for p in range(i))
            if not ok:
                continue
            tick()
            obj[i], used_o[j] = j, True
            if assign_objects(i + 1):
                return True
            obj[i], used_o[j] = -1, False
        return False

    def assign_morphisms():
        mor = np.full(A.n_morphisms, -1, dtype=np.int64)
        used = np.zeros(B.n_morphisms, dtype=bool)
        for o in range(A.n_objects):
            mor[A.ident[o]] = B.ident[obj[o]]
            used[B.ident[obj[o]]] = True
        order = [m for m in range(A.n_morphisms) if mor[m] < 0]

        def consistent(m):
            g, f, gf = A.composable_pairs
            sel = (g == m) | (f == m) | (gf == m)
            for gg, ff, hh in zip(g[sel], f[sel], gf[sel]):
                if mor[gg] >= 0 and mor[ff] >= 0 and mor[hh] >= 0 and B.comp[mor[gg], mor[ff]] != mor[hh]:
                    return False
            return True

        def rec(k):
            if k == len(order):
                return True
            m = order[k]
            for t in B.hom(obj[A.dom[m]], obj[A.cod[m]]):
                if used[t]:
                    continue
                tick()
                mor[m], used[t] = t, True
                if consistent(m) and rec(k + 1):
                    return True
                mor[m], used[t] = -1, False
            return False

        return rec(0)

    return assign_objects(0)


@dataclass
class EquivalenceReport:
    equivalent: bool
    method: str
    strict_objects: int
    pseudo_objects: int


def pullback_equiv_check(F: Functor, G: Functor, size_bound: int = EQUIV_SIZE_BOUND,
                         budget: int = EQUIV_BUDGET) -> EquivalenceReport:
    """Whether the strict pullback and the pseudopullback are equivalent.

    The comparison functor ``(K, L) -> (K, L, FK, id, id)`` is always fully
    faithful, so it is an equivalence iff every 5-tuple is isomorphic to one in
    its image.  Otherwise the skeletons are compared up to isomorphism.
    """
    strict = strict_pullback(F, G).category
    pseudo = pseudopullback(F, G)
    P = pseudo.category
    if strict.n_objects > size_bound or P.n_objects > size_bound:
        raise SearchExceeded(f"equivalence check is limited to {size_bound} objects")
    M = F.target
    image = set()
    for i, name in enumerate(P.objects):
        K, L, Mo, f, g = pseudo.object_labels[name]
        if M.is_identity(M.mor(f)) and M.is_identity(M.mor(g)):
            image.add(i)
    cls = iso_classes(P)
    if all(any(o in image for o in c) for c in cls):
        return EquivalenceReport(True, "comparison", strict.n_objects, P.n_objects)
    equiv = isomorphic_categories(skeleton(strict), skeleton(P), budget)
    return EquivalenceReport(equiv, "skeleton", strict.n_objects, P.n_objects)


# ---------------------------------------------------------------------------


def inserter(F: Functor, G: Functor) -> Construction:
    """Objects ``(K, f: FK -> GK)``; morphisms ``k`` with ``G(k) f = f' F(k)``.

    The projection ``P`` sends ``(K, f)`` to ``K``.
    """
    if F.source != G.source or F.target != G.target:
        raise FunctorError("inserter needs parallel functors")
    K, L = F.source, F.target
    objs = [(a, int(f)) for a in range(K.n_objects) for f in L.hom(F.obj_map[a], G.obj_map[a])]
    mors = []
    for x in objs:
        for y in objs:
            for k in K.hom(x[0], y[0]):
                if L.comp[G.mor_map[k], x[1]] == L.comp[y[1], F.mor_map[k]]:
                    mors.append((int(k), x, y))
    C, okeys, mkeys = build_construction(objs, mors, lambda g, f: int(K.comp[g, f]), lambda x: int(K.ident[x[0]]))
    P = Functor(C, K, [o[0] for o in okeys], [m[0] for m in mkeys])
    return Construction(
        C,
        {C.objects[i]: (K.objects[o[0]], L.morphisms[o[1]]) for i, o in enumerate(okeys)},
        {C.morphisms[i]: (K.morphisms[k],) for i, (k, _, _) in enumerate(mkeys)},
        {"P": P},
    )


def equifier(phi: NatTransformation, psi: NatTransformation) -> FinCategory:
    """Full subcategory of the source on the objects where ``phi`` and ``psi`` agree."""
    if phi.source != psi.source or phi.target != psi.target:
        raise FunctorError("equifier needs parallel natural transformations")
    S = phi.source.source
    keep = [S.objects[o] for o in range(S.n_objects) if phi.components[o] == psi.components[o]]
    return full_subcategory(S, keep)


# ---------------------------------------------------------------------------
# cones and weakly initial sets


@dataclass
class ConeSet:
    """Cones over ``diagram`` and a subset every cone factors through.

    A cone ``(X, legs)`` factors through ``(Y, legs')`` when some ``k: X -> Y``
    has ``legs'[s] k = legs[s]`` for every shape object ``s``.
    """

    diagram: Functor
    cones: list[tuple[int, tuple[int, ...]]]
    weakly_initial_subset: list[int] = field(default_factory=list)
    verified: bool = False

    @property
    def empty(self) -> bool:
        return not self.cones


def enumerate_cones(D: Functor) -> list[tuple[int, tuple[int, ...]]]:
    S, C = D.source, D.target
    out = []
    for x in range(C.n_objects):
        choices = [C.hom(x, D.obj_map[s]) for s in range(S.n_objects)]
        legs = [-1] * S.n_objects

        def rec(s):
            if s == S.n_objects:
                out.append((x, tuple(legs)))
                return
            for leg in choices[s]:
                legs[s] = int(leg)
                ok = True
                for m in range(S.n_morphisms):
                    a, b = int(S.dom[m]), int(S.cod[m])
                    if max(a, b) == s and C.comp[D.mor_map[m], legs[a]] != legs[b]:
                        ok = False
                        break
                if ok:
                    rec(s + 1)
            legs[s] = -1

        rec(0)
    return out


def _factors(C: FinCategory, src, dst) -> bool:
    x, legs = src
    y, legs2 = dst
    for k in C.hom(x, y):
        if all(C.comp[l2, k] == l for l, l2 in zip(legs, legs2)):
            return True
    return False


def approximately_complete_check(C: FinCategory, diagrams) -> list[ConeSet]:
    """For each diagram: all cones and a greedily chosen set they factor through."""
    reports = []
    for D in diagrams:
        if D.target != C:
            raise FunctorError("diagram does not land in the given category")
        cones = enumerate_cones(D)
        n = len(cones)
        cover = [[i for i in range(n) if _factors(C, cones[i], cones[w])] for w in range(n)]
        covered = np.zeros(n, dtype=bool)
        chosen = []
        while not covered.all():
            gains = [int((~covered[cover[w]]).sum()) for w in range(n)]
            w = int(np.argmax(gains))
            chosen.append(w)
            covered[cover[w]] = True
        ok = all(any(_factors(C, cones[i], cones[w]) for w in chosen) for i in range(n))
        reports.append(ConeSet(D, cones, sorted(chosen), ok))
    return reports
