"""Lifting problems, the box/perp relations, and certificate checks."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .colimits import coproduct, pushout
from .errors import BadStage, DeskcatError, PresheafError, SearchExceeded
from .presheaf import (DEFAULT_BUDGET, PresheafMap, TabularPresheaf, fixed_from_map, identity_map,
                       mask_from_postcomposition, search_maps, terminal_presheaf, to_terminal)

BRUTE_FORCE_LIMIT = 2_000_000


def enumerate_maps(X: TabularPresheaf, Y: TabularPresheaf, budget: int = DEFAULT_BUDGET) -> list[PresheafMap]:
    """All natural maps ``X -> Y`` in canonical (flat lexicographic) order."""
    return search_maps(X, Y, budget=budget)


@dataclass
class LiftingProblem:
    """Square ``g . u = v . f`` with ``f: A -> B`` left and ``g: C -> D`` right."""

    f: PresheafMap
    g: PresheafMap
    u: PresheafMap
    v: PresheafMap

    def validate(self):
        f, g, u, v = self.f, self.g, self.u, self.v
        if u.source != f.source or u.target != g.source or v.source != f.target or v.target != g.target:
            raise PresheafError("lifting problem has mismatched corners")
        if (g @ u) != (v @ f):
            raise PresheafError("lifting square does not commute")
        return self


def is_diagonal(p: LiftingProblem, d: PresheafMap) -> bool:
    return (d @ p.f) == p.u and (p.g @ d) == p.v


def solve(p: LiftingProblem, *, limit: int = 0, budget: int = DEFAULT_BUDGET) -> list[PresheafMap]:
    """All diagonals ``d`` with ``d . f = u`` and ``g . d = v``, sorted."""
    B = p.f.target
    fixed = fixed_from_map(p.f, p.u, B)
    if fixed is None:
        return []
    mask = mask_from_postcomposition(B, p.g, p.v)
    return search_maps(B, p.g.source, fixed=fixed, allowed=mask, limit=limit, budget=budget)


def squares(f: PresheafMap, g: PresheafMap, budget: int = DEFAULT_BUDGET) -> Iterator[LiftingProblem]:
    """Every commutative square from ``f`` to ``g``, ordered by ``(u, v)``."""
    for u in search_maps(f.source, g.source, budget=budget):
        gu = g @ u
        fixed = fixed_from_map(f, gu, f.target)
        if fixed is None:
            continue
        for v in search_maps(f.target, g.target, fixed=fixed, budget=budget):
            yield LiftingProblem(f, g, u, v)


def box(f: PresheafMap, g: PresheafMap, budget: int = DEFAULT_BUDGET) -> bool:
    return all(solve(p, limit=1, budget=budget) for p in squares(f, g, budget))


def perp(f: PresheafMap, g: PresheafMap, budget: int = DEFAULT_BUDGET) -> bool:
    return all(len(solve(p, limit=2, budget=budget)) == 1 for p in squares(f, g, budget))


def box_counterexample(f, g, budget: int = DEFAULT_BUDGET) -> LiftingProblem | None:
    for p in squares(f, g, budget):
        if not solve(p, limit=1, budget=budget):
            return p
    return None


def injective(X: TabularPresheaf, C: Sequence[PresheafMap], budget: int = DEFAULT_BUDGET) -> bool:
    bang = to_terminal(X, terminal_presheaf(X.base))
    return all(box(h, bang, budget) for h in C)


def orthogonal(X: TabularPresheaf, C: Sequence[PresheafMap], budget: int = DEFAULT_BUDGET) -> bool:
    bang = to_terminal(X, terminal_presheaf(X.base))
    return all(perp(h, bang, budget) for h in C)


# ---------------------------------------------------------------------------
# brute-force oracles


def _functions(X: TabularPresheaf, Y: TabularPresheaf, candidates) -> Iterator[list[tuple[int, ...]]]:
    total = 1
    for row in candidates:
        for c in row:
            total *= len(c)
    if total > BRUTE_FORCE_LIMIT:
        raise SearchExceeded(f"brute force would try {total} functions")
    per_obj = [list(itertools.product(*candidates[o])) for o in range(X.base.n_objects)]
    yield from itertools.product(*per_obj)


def _natural(X, Y, comps) -> bool:
    B = X.base
    for m in range(B.n_morphisms):
        a, b = int(B.dom[m]), int(B.cod[m])
        for x in range(X.sizes[b]):
            if comps[a][X.act[m][x]] != Y.act[m][comps[b][x]]:
                return False
    return True


def brute_force_maps(X: TabularPresheaf, Y: TabularPresheaf) -> list[tuple[int, ...]]:
    """Flat keys of all natural maps, by trying every family of functions."""
    cands = [[range(Y.sizes[o])] * int(X.sizes[o]) for o in range(X.base.n_objects)]
    out = []
    for comps in _functions(X, Y, cands):
        if _natural(X, Y, comps):
            out.append(tuple(v for c in comps for v in c))
    return sorted(out)


def brute_force_fillers(p: LiftingProblem) -> list[tuple[int, ...]]:
    """Flat keys of all diagonals, checking every function ``B -> C`` that
    meets the two triangle conditions elementwise, then naturality."""
    f, g, u, v = p.f, p.g, p.u, p.v
    B, C = f.target, g.source
    cands = []
    for o in range(B.base.n_objects):
        forced = {}
        for a in range(f.source.sizes[o]):
            forced.setdefault(int(f.comps[o][a]), set()).add(int(u.comps[o][a]))
        row = []
        for x in range(B.sizes[o]):
            ok = [c for c in range(C.sizes[o]) if g.comps[o][c] == v.comps[o][x]]
            if x in forced:
                ok = [c for c in ok if forced[x] == {c}]
            row.append(ok)
        cands.append(row)
    out = []
    for comps in _functions(B, C, cands):
        if _natural(B, C, comps):
            out.append(tuple(val for c in comps for val in c))
    return sorted(out)


# ---------------------------------------------------------------------------
# retracts


@dataclass
class RetractWitness:
    """Arrow-category maps ``s: f -> f'`` and ``r: f' -> f`` with ``r . s = id``."""

    s_dom: PresheafMap
    s_cod: PresheafMap
    r_dom: PresheafMap
    r_cod: PresheafMap


def verify_retract(f: PresheafMap, f_prime: PresheafMap, w: RetractWitness) -> bool:
    try:
        return ((f_prime @ w.s_dom) == (w.s_cod @ f)
                and (f @ w.r_dom) == (w.r_cod @ f_prime)
                and (w.r_dom @ w.s_dom) == identity_map(f.source)
                and (w.r_cod @ w.s_cod) == identity_map(f.target))
    except DeskcatError:
        return False


# ---------------------------------------------------------------------------
# cellular certificates


@dataclass
class CellStage:
    """One pushout stage: cells ``C[h]`` attached along ``u: dom C[h] -> A_i``.

    ``stage_map: A_i -> A_{i+1}`` and ``cell_map: coproduct of cod C[h] -> A_{i+1}``
    form the claimed pushout square.
    """

    attaching: list[tuple[int, PresheafMap]]
    stage_map: PresheafMap
    cell_map: PresheafMap


@dataclass
class CellularCertificate:
    source: TabularPresheaf
    stages: list[CellStage] = field(default_factory=list)
    composite: PresheafMap | None = None


def attaching_data(attaching, C: Sequence[PresheafMap], A: TabularPresheaf):
    """``(coprod h, <u>)`` for an attaching list; both out of the coproduct of domains."""
    hs = [C[k] for k, _ in attaching]
    Sd, inj_d = coproduct([h.source for h in hs], A.base)
    Sc, inj_c = coproduct([h.target for h in hs], A.base)
    coprod_h = PresheafMap(Sd, Sc, _cotuple_comps(Sd, [ic @ h for ic, h in zip(inj_c, hs)], Sc), check=False)
    glue = PresheafMap(Sd, A, _cotuple_comps(Sd, [u for _, u in attaching], A), check=False)
    return coprod_h, glue


def _cotuple_comps(S: TabularPresheaf, maps: Sequence[PresheafMap], target: TabularPresheaf):
    B = S.base
    comps = []
    for o in range(B.n_objects):
        parts = [m.comps[o] for m in maps]
        comps.append(np.concatenate(parts) if parts else np.empty(0, np.int64))
    return comps


def verify_cellular(cert: CellularCertificate, C: Sequence[PresheafMap]) -> bool:
    """Check every stage is a pushout of generators and the composite matches.

    Raises BadStage at the first failure; the composite is reported as stage
    ``len(stages)``.
    """
    A = cert.source
    total = identity_map(A)
    for i, st in enumerate(cert.stages):
        try:
            if st.stage_map.source != A:
                raise BadStage(i, "stage map does not start at the previous stage")
            for k, u in st.attaching:
                if not 0 <= k < len(C):
                    raise BadStage(i, f"generator index {k} out of range")
                if u.source != C[k].source or u.target != A:
                    raise BadStage(i, "attaching map has the wrong type")
                u.validate()
            coprod_h, glue = attaching_data(st.attaching, C, A)
            st.stage_map.validate()
            st.cell_map.validate()
            if st.cell_map.source != coprod_h.target or st.cell_map.target != st.stage_map.target:
                raise BadStage(i, "cell map has the wrong type")
            if (st.stage_map @ glue) != (st.cell_map @ coprod_h):
                raise BadStage(i, "square does not commute")
            po = pushout(glue, coprod_h)
            cmp = po.induce([st.stage_map @ glue, st.stage_map, st.cell_map])
            if not cmp.is_iso():
                raise BadStage(i, "square is not a pushout")
        except BadStage:
            raise
        except DeskcatError as exc:
            raise BadStage(i, str(exc)) from None
        total = st.stage_map @ total
        A = st.stage_map.target
    if cert.composite is not None and cert.composite != total:
        raise BadStage(len(cert.stages), "composite differs from the composite of the stages")
    return True
