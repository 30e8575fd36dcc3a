"""Small object argument over a finite generating list.

Each stage collects the triples ``(u, h, v)`` with ``f . u = v . h``, glues a
copy of ``cod h`` to the domain along ``u`` for every triple (one pushout of a
coproduct), and continues with the induced residual map.  With pruning,
triples that already have a lift are skipped, so a stage with nothing left to
attach means the residual has the right lifting property.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .colimits import chain_colimit, coproduct, pushout
from .errors import ConfigError, PresheafError
from .lifting import CellStage, CellularCertificate, LiftingProblem, attaching_data, box, injective, solve
from .presheaf import (DEFAULT_BUDGET, PresheafMap, TabularPresheaf, fixed_from_map, identity_map, search_maps,
                       terminal_presheaf, to_terminal)

FIXPOINT = "Fixpoint"
BUDGET_EXHAUSTED = "BudgetExhausted"


@dataclass
class MorphismClassSource:
    """A finite class of generators with an optional rule picking ``C_f``.

    The rule maps ``f`` to indices into ``generators``; by default every
    generator is used.
    """

    generators: list[PresheafMap]
    rule: Callable[[PresheafMap], Sequence[int]] | None = None

    def for_map(self, f: PresheafMap) -> list[int]:
        if self.rule is None:
            return list(range(len(self.generators)))
        chosen = sorted(set(int(k) for k in self.rule(f)))
        if any(not 0 <= k < len(self.generators) for k in chosen):
            raise ConfigError("coreflection rule returned an index outside the generator list")
        return chosen


@dataclass
class BoundednessConfig:
    max_stages: int = 8
    prune_solved: bool = True
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if int(self.max_stages) < 1:
            raise ConfigError("max_stages must be at least 1")
        if int(self.budget) < 1:
            raise ConfigError("budget must be positive")


@dataclass
class Triple:
    u: PresheafMap
    h: int
    v: PresheafMap


def collect_triples(f: PresheafMap, src: MorphismClassSource, prune: bool = True,
                    budget: int = DEFAULT_BUDGET) -> list[Triple]:
    """Triples over ``C_f`` ordered by ``(h, u, v)``; solved ones dropped if ``prune``."""
    out = []
    for k in src.for_map(f):
        h = src.generators[k]
        for u in search_maps(h.source, f.source, budget=budget):
            fixed = fixed_from_map(h, f @ u, h.target)
            if fixed is None:
                continue
            for v in search_maps(h.target, f.target, fixed=fixed, budget=budget):
                if prune and solve(LiftingProblem(h, f, u, v), limit=1, budget=budget):
                    continue
                out.append(Triple(u, k, v))
    return out


@dataclass
class Stage:
    """One attachment round: ``stage_map: A_i -> A_{i+1}``, ``residual: A_{i+1} -> B``."""

    index: int
    triples: list[Triple]
    stage_map: PresheafMap
    cell_map: PresheafMap
    residual: PresheafMap

    @property
    def attaching(self) -> list[tuple[int, PresheafMap]]:
        return [(t.h, t.u) for t in self.triples]

    def __iter__(self):
        yield self.stage_map
        yield self.residual


def _cotuple(S: TabularPresheaf, maps: Sequence[PresheafMap], target: TabularPresheaf) -> PresheafMap:
    comps = []
    for o in range(S.base.n_objects):
        parts = [m.comps[o] for m in maps]
        comps.append(np.concatenate(parts) if parts else np.empty(0, np.int64))
    return PresheafMap(S, target, comps, check=False)


def _stage_names(P: TabularPresheaf, stage: int) -> TabularPresheaf:
    """``0/x -> x`` and ``1/k/y -> c<stage>.<k>/y`` unless that clashes."""
    def short(name: str) -> str:
        tag, rest = name.split("/", 1)
        return rest if tag == "0" else f"c{stage}.{rest}"

    renamed = [[short(e) for e in es] for es in P.elements]
    if all(len(set(es)) == len(es) for es in renamed):
        return TabularPresheaf(P.base, renamed, P.act, check=False)
    return P


def _retarget(m: PresheafMap, source=None, target=None) -> PresheafMap:
    return PresheafMap(source or m.source, target or m.target, m.comps, check=False)


def attach(f: PresheafMap, triples: Sequence[Triple], generators: Sequence[PresheafMap], stage: int = 1) -> Stage:
    """Pushout of ``coprod h`` along ``<u>`` and the induced residual."""
    A = f.source
    if not triples:
        return Stage(stage, [], identity_map(A), _cotuple(coproduct([], A.base)[0], [], A), f)
    attaching = [(t.h, t.u) for t in triples]
    coprod_h, glue = attaching_data(attaching, generators, A)
    po = pushout(glue, coprod_h)
    vs = _cotuple(coprod_h.target, [t.v for t in triples], f.target)
    res = po.induce([f @ glue, f, vs])
    P = _stage_names(po.apex, stage)
    f01 = _retarget(po.legs[1], target=P)
    cells = _retarget(po.legs[2], target=P)
    return Stage(stage, list(triples), f01, cells, _retarget(res, source=P))


def one_step(f: PresheafMap, src: MorphismClassSource, prune: bool = True, *, stage: int = 1,
             budget: int = DEFAULT_BUDGET) -> Stage:
    """One round; iterating the result yields ``(f01, f1)``."""
    return attach(f, collect_triples(f, src, prune, budget), src.generators, stage)


@dataclass
class FactorizationCertificate:
    f: PresheafMap
    generators: list[PresheafMap]
    stages: list[Stage]
    composite: PresheafMap
    residual: PresheafMap
    status: str
    prune: bool
    max_stages: int
    right_class_verified: bool | None = None
    pending_triples: int = 0

    @property
    def middle(self) -> TabularPresheaf:
        return self.composite.target

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    def cells_per_stage(self) -> list[int]:
        return [len(s.triples) for s in self.stages]

    def cellular(self) -> CellularCertificate:
        return CellularCertificate(self.f.source,
                                   [CellStage(s.attaching, s.stage_map, s.cell_map) for s in self.stages],
                                   self.composite)

    def check_factorization(self) -> bool:
        return (self.residual @ self.composite) == self.f


def _run(f, sources, max_stages, prune, budget, first_stage=1):
    """Iterate stages against ``sources`` (list of (offset, src)); returns
    ``(stages, status, pending)``."""
    gens = [g for _, s in sources for g in s.generators]
    stages = []
    cur = f
    while True:
        triples = []
        for off, s in sources:
            triples += [Triple(t.u, t.h + off, t.v) for t in collect_triples(cur, s, prune, budget)]
        if not triples:
            return stages, FIXPOINT, 0
        if len(stages) >= max_stages:
            return stages, BUDGET_EXHAUSTED, len(triples)
        st = attach(cur, triples, gens, first_stage + len(stages))
        stages.append(st)
        cur = st.residual


def _compose_stages(f: PresheafMap, stages: Sequence[Stage]) -> PresheafMap:
    total = identity_map(f.source)
    for s in stages:
        total = s.stage_map @ total
    return total


def factorize(f: PresheafMap, src: MorphismClassSource, cfg: BoundednessConfig | None = None) -> FactorizationCertificate:
    cfg = cfg or BoundednessConfig()
    stages, status, pending = _run(f, [(0, src)], cfg.max_stages, cfg.prune_solved, cfg.budget)
    residual = stages[-1].residual if stages else f
    cert = FactorizationCertificate(f, list(src.generators), stages, _compose_stages(f, stages), residual,
                                    status, cfg.prune_solved, cfg.max_stages, pending_triples=pending)
    if status == FIXPOINT:
        cert.right_class_verified = all(box(h, residual, cfg.budget) for h in src.generators)
    return cert


def weak_reflection(K: TabularPresheaf, src: MorphismClassSource, cfg: BoundednessConfig | None = None):
    """``K -> K*`` from factorizing ``K -> 1``; returns ``(r, certificate)``."""
    cfg = cfg or BoundednessConfig()
    cert = factorize(to_terminal(K, terminal_presheaf(K.base)), src, cfg)
    if cert.status == FIXPOINT:
        cert.right_class_verified = cert.right_class_verified and injective(cert.middle, src.generators, cfg.budget)
    return cert.composite, cert


def injectivity_colimit_check(chain: Sequence[PresheafMap], src: MorphismClassSource,
                              start: TabularPresheaf | None = None, budget: int = DEFAULT_BUDGET) -> bool:
    """Whether the colimit of a chain of injective objects is injective."""
    cocone = chain_colimit(chain, start)
    for X in cocone.diagram.nodes:
        if not injective(X, src.generators, budget):
            raise PresheafError("chain contains an object that is not injective")
    return injective(cocone.apex, src.generators, budget)


def union_factorize(f: PresheafMap, srcA: MorphismClassSource, srcB: MorphismClassSource,
                    cfg: BoundednessConfig | None = None) -> FactorizationCertificate:
    """Alternate full passes against ``srcA`` and ``srcB``.

    Stops once a pass attaches nothing right after a pass that reached its
    fixpoint; the residual then has the lifting property for both lists.
    ``max_stages`` bounds the total number of stages over all passes.
    Generator indices in the certificate refer to ``srcA + srcB``.
    """
    cfg = cfg or BoundednessConfig()
    passes = [(0, srcA), (len(srcA.generators), srcB)]
    gens = list(srcA.generators) + list(srcB.generators)
    stages: list[Stage] = []
    cur = f
    prev_fix = False
    turn = 0
    while True:
        off, src = passes[turn % 2]
        got, status, pending = _run(cur, [(off, src)], cfg.max_stages - len(stages), cfg.prune_solved,
                                    cfg.budget, first_stage=len(stages) + 1)
        stages += got
        if got:
            cur = got[-1].residual
        if status == BUDGET_EXHAUSTED:
            final = BUDGET_EXHAUSTED
            break
        if not got and prev_fix:
            final = FIXPOINT
            pending = 0
            break
        prev_fix = True
        turn += 1
    cert = FactorizationCertificate(f, gens, stages, _compose_stages(f, stages), cur, final,
                                    cfg.prune_solved, cfg.max_stages, pending_triples=pending)
    if final == FIXPOINT:
        cert.right_class_verified = all(box(h, cur, cfg.budget) for h in gens)
    return cert
