"""Finite colimits of tabular presheaves, computed pointwise with union-find."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import PresheafError
from .fincat import FinCategory
from .presheaf import (PresheafMap, TabularPresheaf, empty_presheaf, identity_map, mask_from_postcomposition,
                       search_maps, DEFAULT_BUDGET)


@dataclass
class Diagram:
    """Finite diagram: nodes and edges ``(i, j, map node_i -> node_j)``."""

    nodes: list[TabularPresheaf]
    edges: list[tuple[int, int, PresheafMap]] = field(default_factory=list)

    def validate(self):
        for i, j, m in self.edges:
            if m.source != self.nodes[i] or m.target != self.nodes[j]:
                raise PresheafError(f"edge {i}->{j} does not match its nodes")
        return self


@dataclass
class Cocone:
    diagram: Diagram
    apex: TabularPresheaf
    legs: list[PresheafMap]

    def verify(self) -> bool:
        """Legs commute with every diagram edge."""
        return all((self.legs[j] @ m) == self.legs[i] for i, j, m in self.diagram.edges)

    def induce(self, other: Sequence[PresheafMap]) -> PresheafMap:
        """The map ``apex -> Z`` through which the competing cocone ``other`` factors.

        Requires the legs to be jointly surjective (true for computed
        colimits), which also makes the map unique.  Raises PresheafError if
        ``other`` cannot factor.
        """
        Z = other[0].target if other else None
        A = self.apex
        if Z is None:
            if A.total:
                raise PresheafError("empty cocone cannot receive a nonempty apex")
            return PresheafMap(A, A, [np.empty(0)] * A.base.n_objects, check=False)
        vals = np.full(A.total, -1, dtype=np.int64)
        off = A.offsets
        for leg, o in zip(self.legs, other):
            for ob in range(A.base.n_objects):
                slot = off[ob] + leg.comps[ob].astype(np.int64)
                want = o.comps[ob].astype(np.int64)
                prev = vals[slot]
                if ((prev >= 0) & (prev != want)).any():
                    raise PresheafError("competing cocone does not factor through the colimit")
                vals[slot] = want
                if (vals[slot] != want).any():
                    raise PresheafError("competing cocone does not factor through the colimit")
        if (vals < 0).any():
            raise PresheafError("colimit legs are not jointly surjective")
        m = PresheafMap.from_flat(A, Z, vals)
        m.validate()
        return m


def coproduct(Xs: Sequence[TabularPresheaf], base: FinCategory | None = None):
    """Pointwise disjoint union; element ``x`` of summand ``i`` is named ``"i/x"``.

    Returns ``(S, injections)``.
    """
    if not Xs:
        if base is None:
            raise PresheafError("empty coproduct needs an explicit base")
        return empty_presheaf(base), []
    B = Xs[0].base
    for X in Xs[1:]:
        if X.base is not B and X.base != B:
            raise PresheafError("coproduct of presheaves over different bases")
    elements, act = [], []
    for o in range(B.n_objects):
        elements.append([f"{i}/{e}" for i, X in enumerate(Xs) for e in X.elements[o]])
    shifts = [np.concatenate([[0], np.cumsum([X.sizes[o] for X in Xs])]) for o in range(B.n_objects)]
    for m in range(B.n_morphisms):
        a = int(B.dom[m])
        act.append(np.concatenate([X.act[m] + shifts[a][i] for i, X in enumerate(Xs)])
                   if Xs else np.empty(0, np.int64))
    S = TabularPresheaf(B, elements, act, check=False)
    inj = [PresheafMap(X, S, [np.arange(X.sizes[o]) + shifts[o][i] for o in range(B.n_objects)], check=False)
           for i, X in enumerate(Xs)]
    return S, inj


def quotient(Y: TabularPresheaf, left: np.ndarray, right: np.ndarray):
    """Quotient of ``Y`` by the congruence generated by flat pairs ``left ~ right``.

    Saturates under the presheaf actions until stable.  Each class is named
    after its least member.  Returns ``(Q, projection)``.
    """
    n = Y.total
    eoff, emor, etgt = Y.edges
    esrc = np.repeat(np.arange(n), np.diff(eoff))
    aoff, aflat = Y.act_flat
    off = Y.offsets
    B = Y.base
    left = np.asarray(left, dtype=np.int64)
    right = np.asarray(right, dtype=np.int64)
    labels = _kernels.min_label_classes(n, left, right)
    idx = np.arange(n)
    while True:
        moved = labels[esrc] != esrc
        if not moved.any():
            break
        src, mor, tgt = esrc[moved], emor[moved], etgt[moved]
        rep_local = labels[src] - off[B.cod[mor]]
        rep_tgt = off[B.dom[mor]] + aflat[aoff[mor] + rep_local]
        # restrictions of an element and of its representative must agree
        new = _kernels.min_label_classes(n, np.concatenate([idx, tgt]), np.concatenate([labels, rep_tgt]))
        if np.array_equal(new, labels):
            break
        labels = new
    elements, pos_of, comps = [], np.full(n, -1, dtype=np.int64), []
    for o in range(B.n_objects):
        lo, hi = off[o], off[o + 1]
        reps = np.unique(labels[lo:hi])
        pos_of[reps] = np.arange(len(reps))
        elements.append([Y.elements[o][r - lo] for r in reps])
        comps.append(pos_of[labels[lo:hi]])
    act = []
    for m in range(B.n_morphisms):
        a, b = int(B.dom[m]), int(B.cod[m])
        reps_local = np.unique(labels[off[b]:off[b + 1]]) - off[b]
        act.append(comps[a][Y.act[m][reps_local]])
    Q = TabularPresheaf(B, elements, act, check=False)
    return Q, PresheafMap(Y, Q, comps, check=False)


def coequalizer(f: PresheafMap, g: PresheafMap):
    """Returns ``(Q, q)`` with ``q . f = q . g`` universal."""
    if f.source != g.source or f.target != g.target:
        raise PresheafError("coequalizer of a non-parallel pair")
    Y = f.target
    return quotient(Y, Y.offsets[f.source.elem_obj] + f.flat, Y.offsets[g.source.elem_obj] + g.flat)


def pushout(f: PresheafMap, g: PresheafMap) -> Cocone:
    """Pushout of ``B <-f- A -g-> C``; legs are ``(B -> P, C -> P)``.

    The returned cocone's diagram is the span with nodes ``[A, B, C]``; its
    ``legs`` list holds the leg out of ``A`` first.
    """
    if f.source != g.source:
        raise PresheafError("pushout of maps with different domains")
    A, B, C = f.source, f.target, g.target
    S, (iB, iC) = coproduct([B, C])
    lhs = S.offsets[A.elem_obj] + (iB @ f).flat
    rhs = S.offsets[A.elem_obj] + (iC @ g).flat
    P, q = quotient(S, lhs, rhs)
    lB, lC = q @ iB, q @ iC
    D = Diagram([A, B, C], [(0, 1, f), (0, 2, g)])
    return Cocone(D, P, [lB @ f, lB, lC])


def pushout_legs(c: Cocone) -> tuple[PresheafMap, PresheafMap]:
    return c.legs[1], c.legs[2]


def finite_colimit(D: Diagram, base: FinCategory | None = None) -> Cocone:
    """Coproduct of all nodes quotiented by every edge relation."""
    D.validate()
    S, inj = coproduct(D.nodes, base)
    left, right = [], []
    for i, j, m in D.edges:
        X = m.source
        left.append(S.offsets[X.elem_obj] + (inj[i]).flat)
        right.append(S.offsets[X.elem_obj] + (inj[j] @ m).flat)
    left = np.concatenate(left) if left else np.empty(0, np.int64)
    right = np.concatenate(right) if right else np.empty(0, np.int64)
    Q, q = quotient(S, left, right)
    return Cocone(D, Q, [q @ i for i in inj])


def chain_colimit(chain: Sequence[PresheafMap], start: TabularPresheaf | None = None) -> Cocone:
    """Colimit of ``X0 -> X1 -> ... -> Xn``: the last object with composite legs."""
    if not chain:
        if start is None:
            raise PresheafError("an empty chain needs its single object")
        return Cocone(Diagram([start]), start, [identity_map(start)])
    for a, b in zip(chain, chain[1:]):
        if a.target != b.source:
            raise PresheafError("chain maps are not composable")
    nodes = [chain[0].source] + [m.target for m in chain]
    top = nodes[-1]
    legs = [identity_map(top)]
    for m in reversed(chain):
        legs.append(legs[-1] @ m)
    legs.reverse()
    D = Diagram(nodes, [(k, k + 1, m) for k, m in enumerate(chain)])
    return Cocone(D, top, legs)


@dataclass
class CanonicalDiagram:
    """The comma category ``A|K``, its forgetful diagram, colimit and comparison."""

    comma: FinCategory
    objects: list[tuple[int, PresheafMap]]
    diagram: Diagram
    cocone: Cocone
    comparison: PresheafMap


def canonical_diagram(A: Sequence[TabularPresheaf], K: TabularPresheaf,
                      budget: int = DEFAULT_BUDGET) -> CanonicalDiagram:
    """Canonical diagram of ``K`` with respect to the presheaves ``A``.

    Objects of the comma category are ``(i, phi: A[i] -> K)``, named ``"i|k"``
    with ``k`` the position of ``phi`` in the sorted hom-set; morphisms are
    maps ``t: A[i] -> A[j]`` with ``psi . t = phi``, named ``"t<n>"``.
    """
    objs = []
    for i, X in enumerate(A):
        for k, phi in enumerate(search_maps(X, K, budget=budget)):
            objs.append((i, k, phi))
    mors = []  # (src, tgt, t)
    for s, (i, _, phi) in enumerate(objs):
        for t_, (j, _, psi) in enumerate(objs):
            mask = mask_from_postcomposition(A[i], psi, phi)
            for t in search_maps(A[i], A[j], allowed=mask, budget=budget):
                mors.append((s, t_, t))
    index = {(s, t_, t.key()): n for n, (s, t_, t) in enumerate(mors)}
    names = [f"t{n}" for n in range(len(mors))]
    dom = np.array([s for s, _, _ in mors], dtype=np.int64)
    cod = np.array([t_ for _, t_, _ in mors], dtype=np.int64)
    ident = np.empty(len(objs), dtype=np.int64)
    for n, (s, t_, t) in enumerate(mors):
        if s == t_ and all(np.array_equal(c, np.arange(len(c))) for c in t.comps):
            ident[s] = n
    comp = np.full((len(mors), len(mors)), -1, dtype=np.int64)
    for g, (gs, gt, tg) in enumerate(mors):
        for f, (fs, ft, tf) in enumerate(mors):
            if ft == gs:
                comp[g, f] = index[(fs, gt, (tg @ tf).key())]
    comma = FinCategory([f"{i}|{k}" for i, k, _ in objs], names, dom, cod, ident, comp)
    nodes = [A[i] for i, _, _ in objs]
    D = Diagram(nodes, [(s, t_, t) for s, t_, t in mors])
    cocone = finite_colimit(D, base=K.base)
    comparison = cocone.induce([phi for _, _, phi in objs]) if objs else PresheafMap(
        cocone.apex, K, [np.empty(0)] * K.base.n_objects, check=False)
    return CanonicalDiagram(comma, [(i, phi) for i, _, phi in objs], D, cocone, comparison)
