"""Finite categories given by total composition tables, functors and natural
transformations between them, and procedurally presented categories that are
only ever looked at through a finite window."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Hashable, Iterable, Mapping, Sequence

import numpy as np

from . import _kernels
from .errors import (
    CategoryError,
    FunctorError,
    IdentityLawViolation,
    MissingComposite,
    NonAssociative,
    OracleInconsistent,
)


# Above this many morphisms associativity is checked on a seeded sample.
EXHAUSTIVE_ASSOCIATIVITY = 200
ASSOCIATIVITY_SAMPLES = 100_000


class FinCategory:
    """A finitely presented category.

    Objects and morphisms are named by strings.  Internally everything is
    indexed: ``dom``/``cod`` map morphism index to object index, ``ident``
    maps object index to its identity, and ``comp[g, f]`` holds the index of
    ``g . f`` (or -1 when ``cod f != dom g``).
    """

    def __init__(self, objects, morphisms, dom, cod, ident, comp, *, check=True):
        self.objects = tuple(objects)
        self.morphisms = tuple(morphisms)
        self.dom = np.asarray(dom, dtype=np.int64)
        self.cod = np.asarray(cod, dtype=np.int64)
        self.ident = np.asarray(ident, dtype=np.int64)
        self.comp = np.asarray(comp, dtype=np.int32)
        self.obj_index = {name: i for i, name in enumerate(self.objects)}
        self.mor_index = {name: i for i, name in enumerate(self.morphisms)}
        if len(self.obj_index) != len(self.objects):
            raise CategoryError("object names are not unique")
        if len(self.mor_index) != len(self.morphisms):
            raise CategoryError("morphism names are not unique")
        if check:
            self._check_laws()

    # -- basic accessors -------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.morphisms)

    def __repr__(self):
        return f"FinCategory({self.n_objects} objects, {self.n_morphisms} morphisms)"

    def __eq__(self, other):
        if not isinstance(other, FinCategory):
            return NotImplemented
        if self is other:
            return True
        return (
            self.objects == other.objects
            and self.morphisms == other.morphisms
            and np.array_equal(self.dom, other.dom)
            and np.array_equal(self.cod, other.cod)
            and np.array_equal(self.ident, other.ident)
            and np.array_equal(self.comp, other.comp)
        )

    __hash__ = object.__hash__

    def ob(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.obj_index[name]
        except KeyError:
            raise CategoryError(f"unknown object {name!r}") from None

    def mor(self, name) -> int:
        if isinstance(name, (int, np.integer)):
            return int(name)
        try:
            return self.mor_index[name]
        except KeyError:
            raise CategoryError(f"unknown morphism {name!r}") from None

    @cached_property
    def _hom_table(self):
        table: dict[tuple[int, int], list[int]] = {}
        for m in range(self.n_morphisms):
            table.setdefault((int(self.dom[m]), int(self.cod[m])), []).append(m)
        return {k: np.array(v, dtype=np.int64) for k, v in table.items()}

    def hom(self, a, b) -> np.ndarray:
        """Indices of the morphisms ``a -> b``."""
        return self._hom_table.get((self.ob(a), self.ob(b)), np.empty(0, np.int64))

    @cached_property
    def into(self) -> list[np.ndarray]:
        """Per object, the indices of all morphisms with that codomain."""
        return [np.nonzero(self.cod == b)[0] for b in range(self.n_objects)]

    @cached_property
    def composable_pairs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        g, f = np.nonzero(self.comp >= 0)
        return g.astype(np.int64), f.astype(np.int64), self.comp[g, f].astype(np.int64)

    def compose(self, g, f):
        """``g . f`` by name or index; returns the same kind as ``g``."""
        gi, fi = self.mor(g), self.mor(f)
        r = int(self.comp[gi, fi])
        if r < 0:
            raise CategoryError(f"{self.morphisms[gi]} . {self.morphisms[fi]} is not composable")
        return self.morphisms[r] if isinstance(g, str) else r

    def identity(self, a):
        i = int(self.ident[self.ob(a)])
        return self.morphisms[i] if isinstance(a, str) else i

    def is_identity(self, m) -> bool:
        m = self.mor(m)
        return int(self.ident[self.dom[m]]) == m

    def inverse(self, m) -> int | None:
        """Index of the two-sided inverse of ``m``, or None."""
        m = self.mor(m)
        a, b = int(self.dom[m]), int(self.cod[m])
        for k in self.hom(b, a):
            if self.comp[k, m] == self.ident[a] and self.comp[m, k] == self.ident[b]:
                return int(k)
        return None

    def is_iso(self, m) -> bool:
        return self.inverse(m) is not None

    @cached_property
    def isos(self) -> np.ndarray:
        return np.array([m for m in range(self.n_morphisms) if self.is_iso(m)], dtype=np.int64)

    # -- validation ------------------------------------------------------

    def _check_laws(self):
        n = self.n_morphisms
        if self.comp.shape != (n, n):
            raise CategoryError("composition table has the wrong shape")
        for a in range(self.n_objects):
            i = int(self.ident[a])
            if not (0 <= i < n) or self.dom[i] != a or self.cod[i] != a:
                raise CategoryError(f"identity of {self.objects[a]} is not an endomorphism of it")
        composable = self.cod[None, :] == self.dom[:, None]
        defined = self.comp >= 0
        extra = np.argwhere(defined & ~composable)
        if extra.size:
            g, f = extra[0]
            raise CategoryError(
                f"composite given for non-composable pair ({self.morphisms[g]}, {self.morphisms[f]})")
        missing = np.argwhere(composable & ~defined)
        if missing.size:
            g, f = missing[0]
            raise MissingComposite(
                f"missing composite {self.morphisms[g]} . {self.morphisms[f]}")
        g, f, gf = self.composable_pairs
        wrong = np.nonzero((self.dom[gf] != self.dom[f]) | (self.cod[gf] != self.cod[g]))[0]
        if wrong.size:
            k = wrong[0]
            raise CategoryError(
                f"{self.morphisms[g[k]]} . {self.morphisms[f[k]]} = {self.morphisms[gf[k]]} "
                "lands in the wrong hom-set")
        ms = np.arange(n)
        left = self.comp[self.ident[self.cod], ms]
        right = self.comp[ms, self.ident[self.dom]]
        bad = np.nonzero((left != ms) | (right != ms))[0]
        if bad.size:
            m = bad[0]
            raise IdentityLawViolation(f"identity law fails for {self.morphisms[m]}")
        if n <= EXHAUSTIVE_ASSOCIATIVITY:
            h, gg, ff = _kernels.associativity_violation(self.comp, self.dom, self.cod)
        else:
            h, gg, ff = self._sampled_associativity_violation()
        if h >= 0:
            raise NonAssociative(
                f"({self.morphisms[h]} . {self.morphisms[gg]}) . {self.morphisms[ff]} != "
                f"{self.morphisms[h]} . ({self.morphisms[gg]} . {self.morphisms[ff]})")

    def _sampled_associativity_violation(self):
        rng = np.random.default_rng(0)
        g, f, gf = self.composable_pairs
        pick = rng.integers(0, len(g), ASSOCIATIVITY_SAMPLES)
        g, f, gf = g[pick], f[pick], gf[pick]
        out_of = [np.nonzero(self.dom == o)[0] for o in range(self.n_objects)]
        counts = np.array([len(out_of[c]) for c in self.cod[g]])
        h = np.array([out_of[c][k] for c, k in
                      zip(self.cod[g], (rng.random(len(g)) * counts).astype(np.int64))])
        bad = np.nonzero(self.comp[h, gf] != self.comp[self.comp[h, g], f])[0]
        if bad.size:
            k = bad[0]
            return int(h[k]), int(g[k]), int(f[k])
        return -1, -1, -1

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        g, f, gf = self.composable_pairs
        order = np.lexsort((f, g))
        return {
            "objects": list(self.objects),
            "morphisms": [
                {"name": self.morphisms[m], "dom": self.objects[self.dom[m]],
                 "cod": self.objects[self.cod[m]]}
                for m in range(self.n_morphisms)
            ],
            "identities": {self.objects[a]: self.morphisms[self.ident[a]]
                           for a in range(self.n_objects)},
            "compose": [[self.morphisms[g[k]], self.morphisms[f[k]], self.morphisms[gf[k]]]
                        for k in order],
        }


def validate_category(data: Mapping) -> FinCategory:
    """Parse and validate a raw category description (the JSON file format)."""
    for key in ("objects", "morphisms", "identities", "compose"):
        if key not in data:
            raise CategoryError(f"category description lacks {key!r}")
    objects = [str(o) for o in data["objects"]]
    obj_index = {o: i for i, o in enumerate(objects)}
    if len(obj_index) != len(objects):
        raise CategoryError("object names are not unique")
    names, dom, cod = [], [], []
    for entry in data["morphisms"]:
        if isinstance(entry, Mapping):
            name, d, c = entry["name"], entry["dom"], entry["cod"]
        else:
            name, d, c = entry
        for o in (d, c):
            if o not in obj_index:
                raise CategoryError(f"morphism {name!r} mentions unknown object {o!r}")
        names.append(str(name))
        dom.append(obj_index[d])
        cod.append(obj_index[c])
    mor_index = {m: i for i, m in enumerate(names)}
    if len(mor_index) != len(names):
        raise CategoryError("morphism names are not unique")

    def lookup(m):
        try:
            return mor_index[m]
        except KeyError:
            raise CategoryError(f"unknown morphism {m!r}") from None

    ident = []
    for o in objects:
        if o not in data["identities"]:
            raise CategoryError(f"object {o!r} has no identity")
        ident.append(lookup(data["identities"][o]))
    n = len(names)
    comp = np.full((n, n), -1, dtype=np.int32)
    for entry in data["compose"]:
        g, f, gf = (lookup(x) for x in entry)
        if comp[g, f] >= 0 and comp[g, f] != gf:
            raise CategoryError(f"conflicting composites for ({names[g]}, {names[f]})")
        comp[g, f] = gf
    return FinCategory(objects, names, dom, cod, ident, comp)


def category_from_function(objects: Sequence[str],
                           morphisms: Sequence[tuple[str, str, str]],
                           identities: Mapping[str, str],
                           compose: Callable[[str, str], str]) -> FinCategory:
    """Build a category by calling ``compose(g, f)`` on every composable pair."""
    table = []
    for g, gdom, _ in morphisms:
        for f, _, fcod in morphisms:
            if fcod == gdom:
                table.append([g, f, compose(g, f)])
    return validate_category({
        "objects": list(objects),
        "morphisms": [{"name": m, "dom": d, "cod": c} for m, d, c in morphisms],
        "identities": dict(identities),
        "compose": table,
    })


# ---------------------------------------------------------------------------
# small stock categories


def terminal_category() -> FinCategory:
    return FinCategory(["*"], ["id_*"], [0], [0], [0], [[0]])


def discrete_category(names: Iterable[str]) -> FinCategory:
    names = list(names)
    n = len(names)
    comp = np.full((n, n), -1, dtype=np.int32)
    comp[np.arange(n), np.arange(n)] = np.arange(n)
    return FinCategory(names, [f"id_{o}" for o in names], range(n), range(n), range(n), comp)


def arrow_category() -> FinCategory:
    """The walking arrow ``0 -> 1``."""
    return category_from_function(
        ["0", "1"],
        [("id_0", "0", "0"), ("id_1", "1", "1"), ("a", "0", "1")],
        {"0": "id_0", "1": "id_1"},
        lambda g, f: f if g.startswith("id") else g,
    )


def monoid_category(elements: Sequence[str], table: Mapping[tuple[str, str], str],
                    unit: str, obj: str = "*") -> FinCategory:
    """One-object category; ``table[(g, f)]`` is the product ``g . f``."""
    return category_from_function(
        [obj], [(e, obj, obj) for e in elements], {obj: unit},
        lambda g, f: table[(g, f)],
    )


def full_subcategory(C: FinCategory, objects: Iterable) -> FinCategory:
    keep = sorted({C.ob(o) for o in objects})
    mors = np.array([m for m in range(C.n_morphisms)
                     if C.dom[m] in keep and C.cod[m] in keep], dtype=np.int64)
    return _restrict(C, keep, mors)


def _restrict(C: FinCategory, keep, mors) -> FinCategory:
    obj_new = {o: i for i, o in enumerate(keep)}
    mor_new = np.full(C.n_morphisms, -1, dtype=np.int64)
    mor_new[mors] = np.arange(len(mors))
    sub = C.comp[np.ix_(mors, mors)]
    comp = np.where(sub >= 0, mor_new[np.maximum(sub, 0)], -1)
    return FinCategory(
        [C.objects[o] for o in keep],
        [C.morphisms[m] for m in mors],
        [obj_new[int(C.dom[m])] for m in mors],
        [obj_new[int(C.cod[m])] for m in mors],
        [mor_new[C.ident[o]] for o in keep],
        comp,
        check=False,
    )


def opposite(C: FinCategory) -> FinCategory:
    """Same names, domains and codomains swapped, composition transposed."""
    return FinCategory(C.objects, C.morphisms, C.cod, C.dom, C.ident, C.comp.T.copy(), check=False)


# ---------------------------------------------------------------------------
# functors and natural transformations


class Functor:
    def __init__(self, source: FinCategory, target: FinCategory, obj_map, mor_map, *, check=True):
        self.source = source
        self.target = target
        if isinstance(obj_map, Mapping):
            obj_map = [target.ob(obj_map[o]) for o in source.objects]
        if isinstance(mor_map, Mapping):
            mor_map = [target.mor(mor_map[m]) for m in source.morphisms]
        self.obj_map = np.asarray(obj_map, dtype=np.int64)
        self.mor_map = np.asarray(mor_map, dtype=np.int64)
        if check:
            self._check()

    def _check(self):
        S, T = self.source, self.target
        if self.obj_map.shape != (S.n_objects,) or self.mor_map.shape != (S.n_morphisms,):
            raise FunctorError("functor maps have the wrong length")
        F, M = self.obj_map, self.mor_map
        bad = np.nonzero((T.dom[M] != F[S.dom]) | (T.cod[M] != F[S.cod]))[0]
        if bad.size:
            raise FunctorError(f"functor does not preserve domain/codomain of {S.morphisms[bad[0]]}")
        bad = np.nonzero(M[S.ident] != T.ident[F])[0]
        if bad.size:
            raise FunctorError(f"functor does not preserve the identity of {S.objects[bad[0]]}")
        g, f, gf = S.composable_pairs
        bad = np.nonzero(M[gf] != T.comp[M[g], M[f]])[0]
        if bad.size:
            k = bad[0]
            raise FunctorError(
                f"functor does not preserve {S.morphisms[g[k]]} . {S.morphisms[f[k]]}")

    def on_object(self, a):
        return self.target.objects[self.obj_map[self.source.ob(a)]]

    def on_morphism(self, m):
        return self.target.morphisms[self.mor_map[self.source.mor(m)]]

    def is_faithful(self) -> bool:
        S = self.source
        seen = set()
        for m in range(S.n_morphisms):
            key = (int(S.dom[m]), int(S.cod[m]), int(self.mor_map[m]))
            if key in seen:
                return False
            seen.add(key)
        return True

    def is_full(self) -> bool:
        S, T = self.source, self.target
        for a in range(S.n_objects):
            for b in range(S.n_objects):
                image = {int(self.mor_map[m]) for m in S.hom(a, b)}
                if len(image) != len(T.hom(self.obj_map[a], self.obj_map[b])):
                    return False
        return True

    def __eq__(self, other):
        if not isinstance(other, Functor):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and np.array_equal(self.obj_map, other.obj_map)
                and np.array_equal(self.mor_map, other.mor_map))

    __hash__ = object.__hash__

    def to_json(self) -> dict:
        return {
            "objects": {self.source.objects[i]: self.target.objects[j]
                        for i, j in enumerate(self.obj_map)},
            "morphisms": {self.source.morphisms[i]: self.target.morphisms[j]
                          for i, j in enumerate(self.mor_map)},
        }


def identity_functor(C: FinCategory) -> Functor:
    return Functor(C, C, np.arange(C.n_objects), np.arange(C.n_morphisms), check=False)


def constant_functor(source: FinCategory, target: FinCategory, obj) -> Functor:
    o = target.ob(obj)
    return Functor(source, target, np.full(source.n_objects, o),
                   np.full(source.n_morphisms, target.ident[o]))


def compose_functors(G: Functor, F: Functor) -> Functor:
    if G.source != F.target:
        raise FunctorError("functors are not composable")
    return Functor(F.source, G.target, G.obj_map[F.obj_map], G.mor_map[F.mor_map], check=False)


class NatTransformation:
    """``components[a]`` is a morphism ``F a -> G a`` of the common target."""

    def __init__(self, source: Functor, target: Functor, components, *, check=True):
        if source.source != target.source or source.target != target.target:
            raise FunctorError("natural transformation between non-parallel functors")
        self.source = source
        self.target = target
        C = source.target
        if isinstance(components, Mapping):
            components = [C.mor(components[o]) for o in source.source.objects]
        self.components = np.asarray(components, dtype=np.int64)
        if check:
            self._check()

    def _check(self):
        F, G = self.source, self.target
        S, C = F.source, F.target
        a = self.components
        if a.shape != (S.n_objects,):
            raise FunctorError("wrong number of components")
        bad = np.nonzero((C.dom[a] != F.obj_map) | (C.cod[a] != G.obj_map))[0]
        if bad.size:
            raise FunctorError(f"component at {S.objects[bad[0]]} has the wrong type")
        lhs = C.comp[G.mor_map, a[S.dom]]
        rhs = C.comp[a[S.cod], F.mor_map]
        bad = np.nonzero(lhs != rhs)[0]
        if bad.size:
            raise FunctorError(f"naturality fails at {S.morphisms[bad[0]]}")

    def component(self, a) -> str:
        S = self.source.source
        return self.source.target.morphisms[self.components[S.ob(a)]]


# ---------------------------------------------------------------------------
# procedurally presented categories


class ProceduralCategory:
    """A category presented by oracles; only finite windows are ever built.

    ``objects(n)`` enumerates the first ``n`` objects, ``hom(a, b)`` lists
    morphism keys, ``compose(g, f)``/``identity(a)`` act on keys and
    ``name(a, b, key)`` renders a morphism name.
    """

    def __init__(self, name, objects, hom, compose, identity, morphism_name):
        self.name = name
        self._objects = objects
        self._hom = hom
        self._compose = compose
        self._identity = identity
        self._morphism_name = morphism_name
        self._cache: dict[int, FinCategory] = {}

    def __repr__(self):
        return f"ProceduralCategory({self.name!r})"

    def materialize(self, window: int) -> FinCategory:
        return materialize(self, window)

    def _build(self, window: int) -> FinCategory:
        objs = list(self._objects(window))
        keys, dom, cod, lookup = [], [], [], {}
        for ai, a in enumerate(objs):
            for bi, b in enumerate(objs):
                for k in self._hom(a, b):
                    lookup[(ai, bi, k)] = len(keys)
                    keys.append(k)
                    dom.append(ai)
                    cod.append(bi)
        comp = self._table(objs, keys, dom, cod, lookup)
        ident = []
        for ai, a in enumerate(objs):
            ident.append(lookup.get((ai, ai, self._identity(a)), -1))
        names = [self._morphism_name(objs[d], objs[c], k) for k, d, c in zip(keys, dom, cod)]
        if any(i < 0 for i in ident):
            raise OracleInconsistent(f"{self.name}: identity oracle returned a non-morphism")
        try:
            return FinCategory([str(o) for o in objs], names, dom, cod, ident, comp)
        except CategoryError as exc:
            raise OracleInconsistent(f"{self.name} window {window}: {exc}") from exc

    def _table(self, objs, keys, dom, cod, lookup):
        n = len(keys)
        comp = np.full((n, n), -1, dtype=np.int32)
        for g in range(n):
            for f in range(n):
                if cod[f] != dom[g]:
                    continue
                r = self._compose(keys[g], keys[f])
                idx = lookup.get((dom[f], cod[g], r))
                if idx is None:
                    raise OracleInconsistent(
                        f"{self.name}: composite of {keys[g]} and {keys[f]} is not in the window")
                comp[g, f] = idx
        return comp


def materialize(P: ProceduralCategory, window: int) -> FinCategory:
    """Full subcategory on the first ``window`` generated objects."""
    if window < 0:
        raise ValueError("window must be >= 0")
    if window not in P._cache:
        P._cache[window] = P._build(window)
    return P._cache[window]


def isotone_maps(a: int, b: int) -> list[tuple[int, ...]]:
    """Weakly increasing maps from an ``a``-chain to a ``b``-chain."""
    return list(itertools.combinations_with_replacement(range(b), a))


class _Ordinals(ProceduralCategory):
    """Finite ordinals ``0, 1, 2, ...`` and isotone maps, vectorized compose."""

    def __init__(self):
        super().__init__(
            "ordinals",
            objects=lambda n: range(n),
            hom=isotone_maps,
            compose=lambda g, f: tuple(g[i] for i in f),
            identity=lambda a: tuple(range(a)),
            morphism_name=ordinal_morphism_name,
        )

    def _table(self, objs, keys, dom, cod, lookup):
        n = len(keys)
        comp = np.full((n, n), -1, dtype=np.int32)
        start = {}
        for i, (d, c) in enumerate(zip(dom, cod)):
            start.setdefault((d, c), i)
        W = len(objs)
        homs = {}
        for a in range(W):
            for b in range(W):
                mats = isotone_maps(a, b)
                arr = np.array(mats, dtype=np.int64).reshape(len(mats), a)
                homs[(a, b)] = arr
        for a in range(W):
            for b in range(W):
                F = homs[(a, b)]
                if len(F) == 0:
                    continue
                for c in range(W):
                    G = homs[(b, c)]
                    if len(G) == 0:
                        continue
                    H = homs[(a, c)]
                    # codes of isotone tuples are strictly increasing in enumeration order
                    weights = c ** np.arange(a - 1, -1, -1, dtype=np.int64) if a else np.zeros(0, np.int64)
                    hcodes = H @ weights
                    prod = G[:, F]  # (len G, len F, a)
                    codes = prod @ weights
                    pos = np.searchsorted(hcodes, codes)
                    comp[np.ix_(start[(b, c)] + np.arange(len(G)),
                                start[(a, b)] + np.arange(len(F)))] = start[(a, c)] + pos
        return comp


def ordinal_morphism_name(a, b, key) -> str:
    return f"{a}>{b}:" + ",".join(str(v) for v in key)


def parse_ordinal_morphism(name: str) -> tuple[int, int, tuple[int, ...]]:
    head, _, vals = name.partition(":")
    a, _, b = head.partition(">")
    return int(a), int(b), tuple(int(v) for v in vals.split(",")) if vals else ()


_ORDINALS = _Ordinals()


def ordinals() -> ProceduralCategory:
    """The category of finite ordinals (as chains) and isotone maps."""
    return _ORDINALS


BUILTINS: dict[str, Callable[[], ProceduralCategory]] = {"ordinals": ordinals}


# ---------------------------------------------------------------------------
# constructions with generated names


@dataclass
class Construction:
    """A constructed category with ``gen#k`` names.

    ``labels`` maps every generated object/morphism name to the structural
    data it stands for; ``projections`` holds the evident functors out of it.
    """

    category: FinCategory
    object_labels: dict[str, tuple]
    morphism_labels: dict[str, tuple]
    projections: dict[str, Functor] = field(default_factory=dict)


def build_construction(obj_keys: Sequence[Hashable],
                       mor_keys: Sequence[tuple[Hashable, Hashable, Hashable]],
                       compose: Callable[[Hashable, Hashable], Hashable],
                       identity: Callable[[Hashable], Hashable]) -> tuple[FinCategory, list, list]:
    """Assign ``gen#k`` names in the given order and tabulate composition.

    ``mor_keys`` are ``(key, dom_key, cod_key)``; composition acts on keys.
    """
    oidx = {k: i for i, k in enumerate(obj_keys)}
    midx = {(d, c, k): i for i, (k, d, c) in enumerate(mor_keys)}
    dom = [oidx[d] for _, d, _ in mor_keys]
    cod = [oidx[c] for _, _, c in mor_keys]
    n = len(mor_keys)
    comp = np.full((n, n), -1, dtype=np.int32)
    by_dom: dict[int, list[int]] = {}
    for i, d in enumerate(dom):
        by_dom.setdefault(d, []).append(i)
    for f in range(n):
        for g in by_dom.get(cod[f], []):
            key = compose(mor_keys[g][0], mor_keys[f][0])
            comp[g, f] = midx[(mor_keys[f][1], mor_keys[g][2], key)]
    ident = [midx[(k, k, identity(k))] for k in obj_keys]
    C = FinCategory([f"gen#{i}" for i in range(len(obj_keys))],
                    [f"gen#{i}" for i in range(n)], dom, cod, ident, comp)
    return C, list(obj_keys), list(mor_keys)


def comma_category(F1: Functor, F2: Functor) -> Construction:
    """``F1 / F2``: objects ``(K1, K2, f: F1 K1 -> F2 K2)``; morphisms are pairs
    ``(k1, k2)`` with ``F2(k2) . f = f' . F1(k1)``.

    Objects are ordered by ``(K1, K2, f)`` indices, morphisms by
    ``(domain, codomain, k1, k2)``.
    """
    if F1.target != F2.target:
        raise FunctorError("comma category needs functors with a common target")
    L = F1.target
    K1, K2 = F1.source, F2.source
    objs = []
    for a in range(K1.n_objects):
        for b in range(K2.n_objects):
            for f in L.hom(F1.obj_map[a], F2.obj_map[b]):
                objs.append((a, b, int(f)))
    mors = []
    for x in objs:
        for y in objs:
            for k1 in K1.hom(x[0], y[0]):
                lhs_tail = F1.mor_map[k1]
                for k2 in K2.hom(x[1], y[1]):
                    if L.comp[F2.mor_map[k2], x[2]] == L.comp[y[2], lhs_tail]:
                        mors.append(((int(k1), int(k2)), x, y))
    C, okeys, mkeys = build_construction(
        objs, mors,
        lambda g, f: (int(K1.comp[g[0], f[0]]), int(K2.comp[g[1], f[1]])),
        lambda x: (int(K1.ident[x[0]]), int(K2.ident[x[1]])),
    )
    P1 = Functor(C, K1, [k[0] for k in okeys], [m[0][0] for m in mkeys])
    P2 = Functor(C, K2, [k[1] for k in okeys], [m[0][1] for m in mkeys])
    return Construction(
        C,
        {C.objects[i]: (K1.objects[a], K2.objects[b], L.morphisms[f])
         for i, (a, b, f) in enumerate(okeys)},
        {C.morphisms[i]: (K1.morphisms[k[0]], K2.morphisms[k[1]]) for i, (k, _, _) in enumerate(mkeys)},
        {"P1": P1, "P2": P2},
    )


def arrow_category_of(C: FinCategory) -> Construction:
    """``C^->`` as the comma category ``Id / Id``, with domain/codomain projections."""
    I = identity_functor(C)
    return comma_category(I, I)
