"""Orthogonal factorization via codiagonals.

Adding the codiagonal ``f*: A* -> B`` of every generator ``f`` (where ``A*``
is the pushout of ``f`` with itself) turns unique lifting against ``C`` into
plain lifting against ``C + C*``, so the small object argument applies.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .colimits import Cocone, pushout
from .errors import PresheafError, UniquenessFailure
from .lifting import orthogonal, perp, squares
from .presheaf import (DEFAULT_BUDGET, PresheafMap, TabularPresheaf, fixed_from_map, identity_map, pullback,
                       search_maps, terminal_presheaf, to_terminal)
from .soa import FIXPOINT, BoundednessConfig, FactorizationCertificate, MorphismClassSource, factorize


@dataclass
class CodiagonalData:
    f: PresheafMap
    Astar: TabularPresheaf
    p1: PresheafMap
    p2: PresheafMap
    fstar: PresheafMap
    cocone: Cocone

    def check(self) -> bool:
        idB = identity_map(self.f.target)
        return ((self.fstar @ self.p1) == idB and (self.fstar @ self.p2) == idB
                and (self.p1 @ self.f) == (self.p2 @ self.f))


@dataclass
class PullbackData:
    g: PresheafMap
    Dstar: TabularPresheaf
    q1: PresheafMap
    q2: PresheafMap
    gstar: PresheafMap

    def check(self) -> bool:
        idC = identity_map(self.g.source)
        return ((self.g @ self.q1) == (self.g @ self.q2)
                and (self.q1 @ self.gstar) == idC and (self.q2 @ self.gstar) == idC)

    def pair(self, a: PresheafMap, b: PresheafMap) -> PresheafMap:
        """The map into ``D*`` with projections ``a`` and ``b``."""
        P = self.Dstar
        comps = []
        for o in range(P.base.n_objects):
            look = {(int(x), int(y)): k for k, (x, y) in enumerate(zip(self.q1.comps[o], self.q2.comps[o]))}
            try:
                comps.append([look[(int(x), int(y))] for x, y in zip(a.comps[o], b.comps[o])])
            except KeyError:
                raise PresheafError("maps do not agree after g; no map into the pullback") from None
        return PresheafMap(a.source, P, comps, check=False)


def codiagonal(f: PresheafMap) -> CodiagonalData:
    po = pushout(f, f)
    idB = identity_map(f.target)
    fstar = po.induce([f, idB, idB])
    return CodiagonalData(f, po.apex, po.legs[1], po.legs[2], fstar, po)


def pullback_data(g: PresheafMap) -> PullbackData:
    P, q1, q2 = pullback(g, g)
    C = g.source
    comps = []
    for o in range(C.base.n_objects):
        comps.append([P.index[o][f"({c},{c})"] for c in C.elements[o]])
    return PullbackData(g, P, q1, q2, PresheafMap(C, P, comps, check=False))


def cbar(C: Sequence[PresheafMap]) -> list[PresheafMap]:
    """Generators followed by their codiagonals."""
    return list(C) + [codiagonal(h).fstar for h in C]


def orth_factorize(f: PresheafMap, C: Sequence[PresheafMap],
                   cfg: BoundednessConfig | None = None) -> FactorizationCertificate:
    """Factorize against ``cbar(C)``; a fixpoint residual is checked for unique lifts."""
    cfg = cfg or BoundednessConfig()
    cert = factorize(f, MorphismClassSource(cbar(C)), cfg)
    if cert.status == FIXPOINT:
        for h in C:
            if not perp(h, cert.residual, cfg.budget):
                raise UniquenessFailure("residual has a lifting problem with more than one diagonal")
    return cert


@dataclass
class Reflection:
    r: PresheafMap
    certificate: FactorizationCertificate
    orthogonal: bool | None
    universal_counts: list[int] = field(default_factory=list)

    @property
    def reflected(self) -> TabularPresheaf:
        return self.r.target

    @property
    def universal_ok(self) -> bool:
        return all(c == 1 for c in self.universal_counts)


def reflect_ort(K: TabularPresheaf, C: Sequence[PresheafMap], cfg: BoundednessConfig | None = None,
                test_family: Sequence[TabularPresheaf] = ()) -> Reflection:
    """Reflection ``r: K -> RK`` onto objects orthogonal to ``C``.

    For each orthogonal ``X`` in ``test_family`` and each map ``K -> X``, the
    number of factorizations through ``r`` is recorded.
    """
    cfg = cfg or BoundednessConfig()
    cert = orth_factorize(to_terminal(K, terminal_presheaf(K.base)), C, cfg)
    r = cert.composite
    if cert.status != FIXPOINT:
        return Reflection(r, cert, None)
    RK = r.target
    ok = orthogonal(RK, C, cfg.budget)
    counts = []
    for X in test_family:
        if not orthogonal(X, C, cfg.budget):
            continue
        for phi in search_maps(K, X, budget=cfg.budget):
            fixed = fixed_from_map(r, phi, RK)
            counts.append(0 if fixed is None else len(search_maps(RK, X, fixed=fixed, budget=cfg.budget)))
    return Reflection(r, cert, ok, counts)


@dataclass
class CorrespondenceReport:
    left: int
    right: int
    ok: bool


def square_correspondence(f: PresheafMap, g: PresheafMap, budget: int = DEFAULT_BUDGET) -> CorrespondenceReport:
    """Compare squares ``f* -> g`` with squares ``f -> g_*``.

    ``(u, v)`` goes to ``t = u p1 f`` and the ``h`` with ``q_i h = u p_i``;
    ``(t, h)`` goes back to the ``u`` induced by ``(q1 h, q2 h)`` and
    ``v = g q1 h``.  Both assignments must land in the other set and be
    mutually inverse.
    """
    cd = codiagonal(f)
    pd = pullback_data(g)
    left = {(p.u.key(), p.v.key()): p for p in squares(cd.fstar, g, budget)}
    right = {(p.u.key(), p.v.key()): p for p in squares(f, pd.gstar, budget)}
    ok = len(left) == len(right)

    def forward(u, v):
        t = u @ cd.p1 @ f
        h = pd.pair(u @ cd.p1, u @ cd.p2)
        return t, h

    def backward(t, h):
        a, b = pd.q1 @ h, pd.q2 @ h
        u = cd.cocone.induce([a @ f, a, b])
        return u, g @ a

    for key, p in left.items():
        if not ok:
            break
        try:
            t, h = forward(p.u, p.v)
            back = backward(t, h)
        except PresheafError:
            ok = False
            break
        ok = (t.key(), h.key()) in right and (back[0].key(), back[1].key()) == key
    for key, p in right.items():
        if not ok:
            break
        try:
            u, v = backward(p.u, p.v)
            fwd = forward(u, v)
        except PresheafError:
            ok = False
            break
        ok = (u.key(), v.key()) in left and (fwd[0].key(), fwd[1].key()) == key
    return CorrespondenceReport(len(left), len(right), ok)


def square_correspondence_check(f: PresheafMap, g: PresheafMap, budget: int = DEFAULT_BUDGET) -> bool:
    return square_correspondence(f, g, budget).ok
