"""Set-valued presheaves over a finite base, natural maps between them, and
small presheaves presented as formal colimits of representables."""

from __future__ import annotations

from functools import cached_property
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import CategoryError, PresheafError, SearchExceeded, WindowTooSmall
from .fincat import FinCategory, Functor, ProceduralCategory, full_subcategory, materialize, terminal_category

DEFAULT_BUDGET = 10_000_000


class TabularPresheaf:
    """A functor ``base^op -> Set`` with finite values.

    ``elements[o]`` names the elements of ``X(o)``; ``act[m]`` is an integer
    array: for ``m: a -> b``, ``act[m][x]`` is the index in ``X(a)`` of the
    restriction of element ``x`` of ``X(b)``.
    """

    def __init__(self, base: FinCategory, elements: Sequence[Sequence[str]],
                 act: Sequence[np.ndarray], *, check=True):
        self.base = base
        self.elements = tuple(tuple(str(e) for e in es) for es in elements)
        self.act = tuple(np.asarray(a, dtype=np.int32) for a in act)
        if check:
            self.validate()

    @classmethod
    def from_dict(cls, base: FinCategory, sets: Mapping, actions: Mapping, *, check=True):
        """Build from ``{obj: [elem, ...]}`` and ``{mor: {elem: elem}}``.

        Identity actions may be omitted.
        """
        elements = [list(sets.get(o, [])) for o in base.objects]
        index = [{e: i for i, e in enumerate(es)} for es in elements]
        act = []
        for m, name in enumerate(base.morphisms):
            a, b = int(base.dom[m]), int(base.cod[m])
            if name not in actions:
                if base.is_identity(m):
                    act.append(np.arange(len(elements[b])))
                    continue
                if len(elements[b]) == 0:
                    act.append(np.empty(0, np.int64))
                    continue
                raise PresheafError(f"no action given for morphism {name!r}")
            table = actions[name]
            try:
                act.append(np.array([index[a][table[e]] for e in elements[b]], dtype=np.int64))
            except KeyError as exc:
                raise PresheafError(f"action of {name!r} is incomplete or leaves X({base.objects[a]}): {exc}") from None
        return cls(base, elements, act, check=check)

    # -- structure -------------------------------------------------------

    def __repr__(self):
        sizes = ", ".join(f"{o}:{len(es)}" for o, es in zip(self.base.objects, self.elements))
        return f"TabularPresheaf({sizes})"

    @cached_property
    def sizes(self) -> np.ndarray:
        return np.array([len(es) for es in self.elements], dtype=np.int64)

    @cached_property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum(self.sizes)]).astype(np.int64)

    @property
    def total(self) -> int:
        return int(self.offsets[-1])

    @cached_property
    def index(self) -> list[dict[str, int]]:
        return [{e: i for i, e in enumerate(es)} for es in self.elements]

    @cached_property
    def elem_obj(self) -> np.ndarray:
        return np.repeat(np.arange(self.base.n_objects), self.sizes)

    def size(self, o) -> int:
        return int(self.sizes[self.base.ob(o)])

    def __getitem__(self, o) -> tuple[str, ...]:
        return self.elements[self.base.ob(o)]

    def restrict(self, m, x: str) -> str:
        """``X(m)(x)`` by names."""
        m = self.base.mor(m)
        a, b = int(self.base.dom[m]), int(self.base.cod[m])
        return self.elements[a][self.act[m][self.index[b][x]]]

    @cached_property
    def act_flat(self) -> tuple[np.ndarray, np.ndarray]:
        """All actions concatenated, with per-morphism offsets."""
        lens = np.array([len(a) for a in self.act], dtype=np.int64)
        off = np.concatenate([[0], np.cumsum(lens)]).astype(np.int64)
        flat = np.concatenate(self.act).astype(np.int32) if self.act else np.empty(0, np.int32)
        return off, flat

    @cached_property
    def edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """CSR list of restriction edges ``(element, morphism, restricted element)``."""
        B = self.base
        srcs, mors, tgts = [], [], []
        for m in range(B.n_morphisms):
            if B.is_identity(m):
                continue
            a, b = int(B.dom[m]), int(B.cod[m])
            nb = int(self.sizes[b])
            if nb == 0:
                continue
            srcs.append(self.offsets[b] + np.arange(nb))
            mors.append(np.full(nb, m))
            tgts.append(self.offsets[a] + self.act[m])
        if not srcs:
            return np.zeros(self.total + 1, np.int64), np.empty(0, np.int64), np.empty(0, np.int64)
        src = np.concatenate(srcs)
        order = np.argsort(src, kind="stable")
        counts = np.bincount(src, minlength=self.total)
        off = np.concatenate([[0], np.cumsum(counts)]).astype(np.int64)
        return off, np.concatenate(mors)[order].astype(np.int64), np.concatenate(tgts)[order].astype(np.int64)

    def validate(self):
        B = self.base
        if len(self.elements) != B.n_objects or len(self.act) != B.n_morphisms:
            raise PresheafError("presheaf data does not match its base")
        for o, es in enumerate(self.elements):
            if len(set(es)) != len(es):
                raise PresheafError(f"duplicate element names in X({B.objects[o]})")
        for m, a in enumerate(self.act):
            d, c = int(B.dom[m]), int(B.cod[m])
            if a.shape != (self.sizes[c],):
                raise PresheafError(f"action of {B.morphisms[m]} has the wrong length")
            if a.size and (a.min() < 0 or a.max() >= self.sizes[d]):
                raise PresheafError(f"action of {B.morphisms[m]} leaves X({B.objects[d]})")
            if B.is_identity(m) and not np.array_equal(a, np.arange(len(a))):
                raise PresheafError(f"identity {B.morphisms[m]} acts non-trivially")
        g, f, gf = B.composable_pairs
        off, flat = self.act_flat
        k = _kernels.functoriality_violation(g, f, gf, self.sizes[B.cod[g]], off, flat)
        if k >= 0:
            raise PresheafError(
                f"X({B.morphisms[gf[k]]}) != X({B.morphisms[f[k]]}) . X({B.morphisms[g[k]]})")
        return self

    # -- comparison and I/O ---------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, TabularPresheaf):
            return NotImplemented
        if self is other:
            return True
        return (self.base == other.base and self.elements == other.elements
                and all(np.array_equal(a, b) for a, b in zip(self.act, other.act)))

    __hash__ = object.__hash__

    def rename(self, fn: Callable[[int, str], str]) -> "TabularPresheaf":
        """Same presheaf with element names ``fn(object_index, name)``."""
        return TabularPresheaf(self.base, [[fn(o, e) for e in es] for o, es in enumerate(self.elements)],
                               self.act, check=False)

    def to_json(self) -> dict:
        B = self.base
        return {
            "sets": {B.objects[o]: list(es) for o, es in enumerate(self.elements)},
            "actions": {
                B.morphisms[m]: {self.elements[B.cod[m]][x]: self.elements[B.dom[m]][y]
                                 for x, y in enumerate(a)}
                for m, a in enumerate(self.act) if not B.is_identity(m)
            },
        }


class PresheafMap:
    """A natural transformation; ``comps[o][x]`` indexes ``target(o)``."""

    def __init__(self, source: TabularPresheaf, target: TabularPresheaf, comps, *, check=True):
        if source.base is not target.base and source.base != target.base:
            raise PresheafError("map between presheaves over different bases")
        self.source = source
        self.target = target
        self.comps = tuple(np.asarray(c, dtype=np.int32) for c in comps)
        if check:
            self.validate()

    @classmethod
    def from_dict(cls, source, target, components: Mapping, *, check=True):
        B = source.base
        comps = []
        for o, name in enumerate(B.objects):
            table = components.get(name, {})
            try:
                comps.append([target.index[o][table[x]] for x in source.elements[o]])
            except KeyError as exc:
                raise PresheafError(f"component at {name!r} is incomplete: {exc}") from None
        return cls(source, target, comps, check=check)

    @classmethod
    def from_flat(cls, source, target, flat, *, check=False):
        off = source.offsets
        return cls(source, target, [flat[off[o]:off[o + 1]] for o in range(source.base.n_objects)],
                   check=check)

    @property
    def base(self) -> FinCategory:
        return self.source.base

    @cached_property
    def flat(self) -> np.ndarray:
        if not self.comps:
            return np.empty(0, np.int32)
        return np.concatenate(self.comps).astype(np.int32)

    def key(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.flat)

    def __repr__(self):
        return f"PresheafMap({self.source!r} -> {self.target!r})"

    def validate(self):
        X, Y = self.source, self.target
        for o, c in enumerate(self.comps):
            if c.shape != (X.sizes[o],):
                raise PresheafError(f"component at {X.base.objects[o]} has the wrong length")
            if c.size and (c.min() < 0 or c.max() >= Y.sizes[o]):
                raise PresheafError(f"component at {X.base.objects[o]} leaves the target")
        if len(self.comps) != X.base.n_objects:
            raise PresheafError("wrong number of components")
        off, mor, tgt = X.edges
        if len(mor):
            src = np.repeat(np.arange(X.total), np.diff(off))
            yoff, yflat = Y.act_flat
            flat = self.flat
            lhs = flat[tgt]
            rhs = yflat[yoff[mor] + flat[src]]
            bad = np.nonzero(lhs != rhs)[0]
            if bad.size:
                raise PresheafError(f"naturality fails at {X.base.morphisms[mor[bad[0]]]}")
        return self

    def __matmul__(self, other: "PresheafMap") -> "PresheafMap":
        """Composition: ``(g @ f)(x) = g(f(x))``."""
        if other.target is not self.source and other.target != self.source:
            raise PresheafError("maps are not composable")
        return PresheafMap(other.source, self.target,
                           [g[f] for g, f in zip(self.comps, other.comps)], check=False)

    def __eq__(self, other):
        if not isinstance(other, PresheafMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and all(np.array_equal(a, b) for a, b in zip(self.comps, other.comps)))

    __hash__ = object.__hash__

    def is_injective(self) -> bool:
        return all(len(np.unique(c)) == len(c) for c in self.comps)

    def is_surjective(self) -> bool:
        return all(len(np.unique(c)) == n for c, n in zip(self.comps, self.target.sizes))

    def is_iso(self) -> bool:
        return self.is_injective() and self.is_surjective()

    def inverse(self) -> "PresheafMap":
        if not self.is_iso():
            raise PresheafError("map is not invertible")
        comps = []
        for c in self.comps:
            inv = np.empty_like(c)
            inv[c] = np.arange(len(c))
            comps.append(inv)
        return PresheafMap(self.target, self.source, comps, check=False)

    def apply(self, o, x: str) -> str:
        o = self.base.ob(o)
        return self.target.elements[o][self.comps[o][self.source.index[o][x]]]

    def to_json(self) -> dict:
        X, Y = self.source, self.target
        return {
            X.base.objects[o]: {X.elements[o][i]: Y.elements[o][j] for i, j in enumerate(c)}
            for o, c in enumerate(self.comps)
        }


# ---------------------------------------------------------------------------
# stock presheaves and maps


def identity_map(X: TabularPresheaf) -> PresheafMap:
    return PresheafMap(X, X, [np.arange(n) for n in X.sizes], check=False)


def empty_presheaf(base: FinCategory) -> TabularPresheaf:
    return TabularPresheaf(base, [[] for _ in base.objects],
                           [np.empty(0, np.int64) for _ in base.morphisms], check=False)


def terminal_presheaf(base: FinCategory, name: str = "*") -> TabularPresheaf:
    return TabularPresheaf(base, [[name] for _ in base.objects],
                           [np.zeros(1, np.int64) for _ in base.morphisms], check=False)


def to_terminal(X: TabularPresheaf, T: TabularPresheaf | None = None) -> PresheafMap:
    T = T if T is not None else terminal_presheaf(X.base)
    return PresheafMap(X, T, [np.zeros(n, np.int64) for n in X.sizes], check=False)


def from_empty(Y: TabularPresheaf) -> PresheafMap:
    return PresheafMap(empty_presheaf(Y.base), Y, [np.empty(0, np.int64) for _ in Y.sizes], check=False)


_POINT = terminal_category()


def point_category() -> FinCategory:
    """The shared terminal base used for constant presheaves (plain sets)."""
    return _POINT


def constant_set(names: Iterable) -> TabularPresheaf:
    """A finite set as a presheaf over the terminal category."""
    names = [str(n) for n in names]
    return TabularPresheaf(_POINT, [names], [np.arange(len(names))])


def set_map(source: TabularPresheaf, target: TabularPresheaf, mapping) -> PresheafMap:
    """Map of constant presheaves from a dict or a list of target names."""
    if not isinstance(mapping, Mapping):
        mapping = dict(zip(source.elements[0], mapping))
    return PresheafMap.from_dict(source, target, {source.base.objects[0]: {str(k): str(v) for k, v in mapping.items()}})


def yoneda(base: FinCategory, a) -> TabularPresheaf:
    """``hom(-, a)``; elements are morphism names, actions precomposition."""
    a = base.ob(a)
    homs = [base.hom(b, a) for b in range(base.n_objects)]
    pos = np.full(base.n_morphisms, -1, dtype=np.int64)
    for h in homs:
        pos[h] = np.arange(len(h))
    act = []
    for m in range(base.n_morphisms):
        b = int(base.cod[m])
        act.append(pos[base.comp[homs[b], m]] if len(homs[b]) else np.empty(0, np.int64))
    return TabularPresheaf(base, [[base.morphisms[x] for x in h] for h in homs], act, check=False)


def yoneda_map(base: FinCategory, m) -> PresheafMap:
    """``hom(-, m): hom(-, a) -> hom(-, b)`` by postcomposition."""
    m = base.mor(m)
    A, B = yoneda(base, int(base.dom[m])), yoneda(base, int(base.cod[m]))
    comps = []
    for o in range(base.n_objects):
        src = [base.mor(x) for x in A.elements[o]]
        comps.append([B.index[o][base.morphisms[base.comp[m, x]]] for x in src])
    return PresheafMap(A, B, comps, check=False)


def subpresheaf(X: TabularPresheaf, keep: Mapping) -> tuple[TabularPresheaf, PresheafMap]:
    """Subpresheaf on ``keep[obj]`` (element names), with its inclusion.

    Raises PresheafError unless the selection is closed under restriction.
    """
    B = X.base
    kept = []
    for o, name in enumerate(B.objects):
        chosen = set(keep.get(name, ()))
        kept.append(np.array([i for i, e in enumerate(X.elements[o]) if e in chosen], dtype=np.int64))
    new_pos = []
    for o, idx in enumerate(kept):
        pos = np.full(X.sizes[o], -1, dtype=np.int64)
        pos[idx] = np.arange(len(idx))
        new_pos.append(pos)
    act = []
    for m in range(B.n_morphisms):
        a, b = int(B.dom[m]), int(B.cod[m])
        img = new_pos[a][X.act[m][kept[b]]]
        if (img < 0).any():
            raise PresheafError(f"selection is not closed under {B.morphisms[m]}")
        act.append(img)
    S = TabularPresheaf(B, [[X.elements[o][i] for i in idx] for o, idx in enumerate(kept)], act, check=False)
    return S, PresheafMap(S, X, kept, check=False)


def image(f: PresheafMap) -> tuple[TabularPresheaf, PresheafMap]:
    Y = f.target
    return subpresheaf(Y, {Y.base.objects[o]: {Y.elements[o][j] for j in c}
                           for o, c in enumerate(f.comps)})


def pullback(g1: PresheafMap, g2: PresheafMap) -> tuple[TabularPresheaf, PresheafMap, PresheafMap]:
    """Pointwise pullback of ``g1: C1 -> D <- C2: g2``.

    Elements are the pairs ``(c1, c2)`` with ``g1 c1 = g2 c2`` in lexicographic
    index order, named ``"(c1,c2)"``.
    """
    if g1.target != g2.target:
        raise PresheafError("pullback of maps with different codomains")
    C1, C2 = g1.source, g2.source
    B = C1.base
    pairs = []
    for o in range(B.n_objects):
        eq = g1.comps[o][:, None] == g2.comps[o][None, :]
        pairs.append(np.argwhere(eq))
    lookup = [{(int(i), int(j)): k for k, (i, j) in enumerate(p)} for p in pairs]
    act = []
    for m in range(B.n_morphisms):
        a, b = int(B.dom[m]), int(B.cod[m])
        act.append([lookup[a][(int(C1.act[m][i]), int(C2.act[m][j]))] for i, j in pairs[b]])
    P = TabularPresheaf(
        B, [[f"({C1.elements[o][i]},{C2.elements[o][j]})" for i, j in p] for o, p in enumerate(pairs)],
        act, check=False)
    q1 = PresheafMap(P, C1, [p[:, 0] if len(p) else np.empty(0) for p in pairs], check=False)
    q2 = PresheafMap(P, C2, [p[:, 1] if len(p) else np.empty(0) for p in pairs], check=False)
    return P, q1, q2


def find_iso(X: TabularPresheaf, Y: TabularPresheaf, budget: int = DEFAULT_BUDGET) -> PresheafMap | None:
    """Some isomorphism ``X -> Y``, or None.

    Backtracking over natural maps that stay injective in every component;
    with equal sizes that is exactly a search for isomorphisms.
    """
    if X.base is not Y.base and X.base != Y.base:
        raise PresheafError("isomorphism test between presheaves over different bases")
    if not np.array_equal(X.sizes, Y.sizes):
        return None
    n = X.total
    eoff, emor, etgt = X.edges
    yoff = Y.offsets
    obj = X.elem_obj
    order = np.lexsort((np.arange(n), -obj, -X.sizes[obj]))
    val = np.full(n, -1, dtype=np.int64)
    used = np.zeros(Y.total, dtype=bool)
    nodes = 0

    def assign(e, y, trail):
        # set val[e] = y and propagate along restrictions; False on conflict
        stack = [(e, y)]
        while stack:
            e, y = stack.pop()
            if val[e] >= 0:
                if val[e] != y:
                    return False
                continue
            flat = yoff[obj[e]] + y
            if used[flat]:
                return False
            val[e] = y
            used[flat] = True
            trail.append(e)
            for k in range(eoff[e], eoff[e + 1]):
                stack.append((int(etgt[k]), int(Y.act[emor[k]][y])))
        return True

    def undo(trail):
        for e in trail:
            used[yoff[obj[e]] + val[e]] = False
            val[e] = -1

    def rec(q):
        nonlocal nodes
        while q < n and val[order[q]] >= 0:
            q += 1
        if q == n:
            return True
        e = int(order[q])
        for y in range(int(Y.sizes[obj[e]])):
            nodes += 1
            if nodes > budget:
                raise SearchExceeded(f"isomorphism search exceeded {budget} nodes", nodes)
            trail: list[int] = []
            if assign(e, y, trail) and rec(q + 1):
                return True
            undo(trail)
        return False

    if not rec(0):
        return None
    return PresheafMap.from_flat(X, Y, val, check=True)


def isomorphic(X: TabularPresheaf, Y: TabularPresheaf, budget: int = DEFAULT_BUDGET) -> bool:
    return find_iso(X, Y, budget) is not None


# ---------------------------------------------------------------------------
# map search (the engine behind hom-sets, lifting and squares)


def search_maps(X: TabularPresheaf, Y: TabularPresheaf, *, fixed: np.ndarray | None = None,
                allowed: np.ndarray | None = None, limit: int = 0,
                budget: int = DEFAULT_BUDGET) -> list[PresheafMap]:
    """All natural maps ``X -> Y`` subject to optional constraints, sorted.

    ``fixed`` is a flat array over the elements of ``X`` holding a target
    index or -1.  ``allowed`` is a flat boolean mask: for element ``e`` of
    ``X(o)`` the slice ``[mask_off[e], mask_off[e] + |Y(o)|)`` lists which
    targets are permitted (see :func:`mask_offsets`).
    """
    sols = search_flat(X, Y, fixed=fixed, allowed=allowed, limit=limit, budget=budget)
    return [PresheafMap.from_flat(X, Y, row) for row in sols]


def mask_offsets(X: TabularPresheaf, Y: TabularPresheaf) -> np.ndarray:
    ysize = Y.sizes[X.elem_obj]
    return np.concatenate([[0], np.cumsum(ysize)]).astype(np.int64)


def search_flat(X, Y, *, fixed=None, allowed=None, limit=0, budget=DEFAULT_BUDGET) -> np.ndarray:
    if X.base is not Y.base and X.base != Y.base:
        raise PresheafError("maps between presheaves over different bases")
    n = X.total
    ysize = Y.sizes[X.elem_obj].astype(np.int64)
    moff = np.concatenate([[0], np.cumsum(ysize)]).astype(np.int64)
    mask = np.ones(int(moff[-1]), dtype=np.bool_) if allowed is None else np.asarray(allowed, dtype=np.bool_)
    init = np.full(n, -1, dtype=np.int32) if fixed is None else np.asarray(fixed, dtype=np.int32)
    # branch on the largest sets first, higher objects breaking ties
    order = np.lexsort((np.arange(n), -X.elem_obj, -X.sizes[X.elem_obj])).astype(np.int64)
    eoff, emor, etgt = X.edges
    aoff, aflat = Y.act_flat
    sols, status, nodes = _kernels.search_homs(order, eoff, emor, etgt, aoff, aflat,
                                               moff, mask, ysize, init, int(limit), int(budget))
    if status == _kernels.SEARCH_BUDGET:
        raise SearchExceeded(f"map search exceeded {budget} nodes", nodes)
    if len(sols) > 1:
        sols = sols[np.lexsort(sols.T[::-1])]
    return sols


def count_maps(X, Y, *, fixed=None, allowed=None, limit=0, budget=DEFAULT_BUDGET) -> int:
    return len(search_flat(X, Y, fixed=fixed, allowed=allowed, limit=limit, budget=budget))


def fixed_from_map(f: PresheafMap, u: PresheafMap, size_of: TabularPresheaf) -> np.ndarray | None:
    """Flat constraint ``d . f = u`` on maps ``d`` out of ``f.target``.

    Returns None when ``u`` is not constant on the fibres of ``f`` (no ``d``).
    """
    fixed = np.full(size_of.total, -1, dtype=np.int32)
    off = size_of.offsets
    for o, (fc, uc) in enumerate(zip(f.comps, u.comps)):
        slot = off[o] + fc.astype(np.int64)
        seen = fixed[slot]
        if ((seen >= 0) & (seen != uc)).any():
            return None
        fixed[slot] = uc
        # duplicates inside one object: the last write wins, so recheck
        if (fixed[slot] != uc).any():
            return None
    return fixed


def mask_from_postcomposition(X: TabularPresheaf, g: PresheafMap, v: PresheafMap) -> np.ndarray:
    """Mask for maps ``d: X -> g.source`` with ``g . d = v``."""
    parts = []
    for o in range(X.base.n_objects):
        want = v.comps[o]
        parts.append((g.comps[o][None, :] == want[:, None]).reshape(-1))
    return np.concatenate(parts) if parts else np.empty(0, np.bool_)


# ---------------------------------------------------------------------------
# canonical functor E


def canonical_functor_E(K, base: FinCategory, A: Sequence, *, budget: int = DEFAULT_BUDGET) -> TabularPresheaf:
    """Restricted hom ``a |-> hom(a, K)`` as a presheaf on the full subcategory ``A``.

    ``K`` is a base object (hom-sets of the base) or a presheaf over ``base``
    (hom-sets computed by enumerating maps out of representables).  In the
    presheaf case each map is named by the element of ``K`` it picks out.
    """
    sub = full_subcategory(base, A)
    if isinstance(K, TabularPresheaf):
        return _restricted_hom_presheaf(K, base, sub, budget)
    k = base.ob(K)
    elements, act = [], []
    homs = [base.hom(base.ob(o), k) for o in sub.objects]
    pos = {}
    for h in homs:
        for i, m in enumerate(h):
            pos[int(m)] = i
    for h in homs:
        elements.append([base.morphisms[m] for m in h])
    for m in range(sub.n_morphisms):
        bm = base.mor(sub.morphisms[m])
        cod = int(sub.cod[m])
        act.append([pos[int(base.comp[x, bm])] for x in homs[cod]])
    return TabularPresheaf(sub, elements, act)


def _restricted_hom_presheaf(K, base, sub, budget):
    reps = {o: yoneda(base, o) for o in sub.objects}
    maps = {o: search_maps(reps[o], K, budget=budget) for o in sub.objects}
    keys = {o: {m.key(): i for i, m in enumerate(ms)} for o, ms in maps.items()}
    elements = []
    for o in sub.objects:
        oi = base.ob(o)
        ident = reps[o].index[oi][base.morphisms[base.ident[oi]]]
        elements.append([K.elements[oi][m.comps[oi][ident]] for m in maps[o]])
    act = []
    for m in range(sub.n_morphisms):
        a, b = sub.objects[sub.dom[m]], sub.objects[sub.cod[m]]
        ym = yoneda_map(base, sub.morphisms[m])
        ym = PresheafMap(reps[a], reps[b], ym.comps, check=False)
        act.append([keys[a][(phi @ ym).key()] for phi in maps[b]])
    return TabularPresheaf(sub, elements, act)


# ---------------------------------------------------------------------------
# formal colimits of representables


class FormalColimitPresheaf:
    """The colimit of ``hom(-, label(j))`` over a finite shape.

    ``base`` is procedural (evaluated through a window) or already finite.
    Morphism labels may be omitted where the base hom-set forces them.
    """

    def __init__(self, base, shape: FinCategory, object_labels: Mapping,
                 morphism_labels: Mapping | None = None):
        self.base = base
        self.shape = shape
        self.object_labels = {str(k): str(v) for k, v in object_labels.items()}
        self.morphism_labels = {str(k): str(v) for k, v in (morphism_labels or {}).items()}

    def labeling(self, window: int | None = None) -> Functor:
        C = self.base_at(window)
        S = self.shape
        for j in S.objects:
            if self.object_labels.get(j) not in C.obj_index:
                if isinstance(self.base, ProceduralCategory):
                    raise WindowTooSmall(f"label {self.object_labels.get(j)!r} of {j!r} is outside window {window}")
                raise CategoryError(f"label of {j!r} is not an object of the base")
        mor = {}
        for m in range(S.n_morphisms):
            name = S.morphisms[m]
            a = self.object_labels[S.objects[S.dom[m]]]
            b = self.object_labels[S.objects[S.cod[m]]]
            if name in self.morphism_labels:
                mor[name] = self.morphism_labels[name]
            elif S.is_identity(m):
                mor[name] = C.morphisms[C.ident[C.ob(a)]]
            else:
                hom = C.hom(a, b)
                if len(hom) != 1:
                    raise CategoryError(f"label of shape morphism {name!r} is ambiguous; give it explicitly")
                mor[name] = C.morphisms[hom[0]]
        return Functor(S, C, self.object_labels, mor)

    def base_at(self, window: int | None) -> FinCategory:
        if isinstance(self.base, ProceduralCategory):
            if window is None:
                raise WindowTooSmall("a procedural base needs a window")
            return materialize(self.base, window)
        return self.base


def _formal_classes(P: FormalColimitPresheaf, L: Functor, a: int):
    """Tagged elements ``(j, x)`` of the coproduct at ``a`` and their class labels."""
    C, S = L.target, L.source
    tags, index = [], {}
    for j in range(S.n_objects):
        for x in C.hom(a, L.obj_map[j]):
            index[(j, int(x))] = len(tags)
            tags.append((j, int(x)))
    left, right = [], []
    for s in range(S.n_morphisms):
        j, jj = int(S.dom[s]), int(S.cod[s])
        ls = L.mor_map[s]
        for x in C.hom(a, L.obj_map[j]):
            left.append(index[(j, int(x))])
            right.append(index[(jj, int(C.comp[ls, x]))])
    labels = _kernels.min_label_classes(len(tags), np.array(left, np.int64), np.array(right, np.int64))
    return tags, index, labels


def evaluate_formal(P: FormalColimitPresheaf, a, window: int | None = None) -> list[str]:
    """Elements of ``P(a)``: classes of the coproduct of hom-sets under the
    zig-zag relation, named ``"shapeobj|morphism"`` after the least member."""
    L = P.labeling(window)
    C = L.target
    if isinstance(a, str) and a not in C.obj_index:
        raise WindowTooSmall(f"object {a!r} is outside the window")
    tags, _, labels = _formal_classes(P, L, C.ob(a))
    reps = sorted(set(int(r) for r in labels))
    return [f"{L.source.objects[tags[r][0]]}|{C.morphisms[tags[r][1]]}" for r in reps]


def tabulate(P: FormalColimitPresheaf, window: int | None = None) -> TabularPresheaf:
    L = P.labeling(window)
    C, S = L.target, L.source
    per_obj = [_formal_classes(P, L, a) for a in range(C.n_objects)]
    elements, cls_pos = [], []
    for tags, _, labels in per_obj:
        reps = sorted(set(int(r) for r in labels))
        pos = {r: i for i, r in enumerate(reps)}
        cls_pos.append(pos)
        elements.append([f"{S.objects[tags[r][0]]}|{C.morphisms[tags[r][1]]}" for r in reps])
    act = []
    for m in range(C.n_morphisms):
        a, b = int(C.dom[m]), int(C.cod[m])
        tags_b, _, labels_b = per_obj[b]
        _, index_a, labels_a = per_obj[a]
        reps_b = sorted(cls_pos[b])
        row = []
        for r in reps_b:
            j, x = tags_b[r]
            row.append(cls_pos[a][int(labels_a[index_a[(j, int(C.comp[x, m]))]])])
        act.append(row)
    return TabularPresheaf(C, elements, act)


def is_filtered(shape: FinCategory) -> bool:
    """Nonempty, every pair of objects has a cocone, every parallel pair is
    coequalized by some morphism."""
    S = shape
    if S.n_objects == 0:
        return False
    n = S.n_objects
    for a in range(n):
        for b in range(n):
            if not any(len(S.hom(a, c)) and len(S.hom(b, c)) for c in range(n)):
                return False
    for a in range(n):
        for b in range(n):
            hom = S.hom(a, b)
            for i in hom:
                for j in hom:
                    if i < j and not any(S.comp[w, i] == S.comp[w, j]
                                         for w in range(S.n_morphisms) if S.dom[w] == b):
                        return False
    return True
