"""Simplicial experiments over finite windows of the ordinal category.

Ordinal ``k`` is the ``k``-element chain, so ``k``-simplices live at ordinal
``k + 1`` and ordinal 0 is the augmentation level.  A window with bound ``n``
has objects ``0..n``; census vectors list dimensions ``0..n-1``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .colimits import coequalizer
from .errors import PresheafError, WindowTooSmall
from .fincat import FinCategory, materialize, ordinal_morphism_name, ordinals, parse_ordinal_morphism
from .lifting import injective
from .presheaf import PresheafMap, TabularPresheaf, subpresheaf, terminal_presheaf, to_terminal, yoneda, yoneda_map
from .soa import BoundednessConfig, FactorizationCertificate, MorphismClassSource, factorize


def ordinal_window(n: int) -> FinCategory:
    """Objects ``0..n`` with all isotone maps."""
    if n < 0:
        raise WindowTooSmall("window bound must be non-negative")
    return materialize(ordinals(), n + 1)


def window_bound(base: FinCategory) -> int:
    expected = ordinal_window(base.n_objects - 1)
    if base is not expected and base != expected:
        raise PresheafError("presheaf does not live over an ordinal window")
    return base.n_objects - 1


def _face(a: int, b: int, key) -> str:
    return ordinal_morphism_name(a, b, tuple(key))


def delta(alpha: int, window: int) -> TabularPresheaf:
    """The ``alpha``-simplex ``hom(-, alpha + 1)``."""
    if alpha < 0:
        raise PresheafError("simplex dimension must be non-negative")
    if alpha + 1 > window:
        raise WindowTooSmall(f"delta({alpha}) needs window >= {alpha + 1}, got {window}")
    return yoneda(ordinal_window(window), str(alpha + 1))


def delta_1s(window: int) -> tuple[TabularPresheaf, PresheafMap]:
    """Symmetric 1-simplex and ``j: delta(1) -> delta_1s``.

    Coequalizer of the face ``[0,2]`` and the constant map at ``0`` from
    ``delta(1)`` to ``delta(2)``; ``j`` is the class of the face ``[0,1]``.
    """
    if window < 3:
        raise WindowTooSmall(f"delta_1s needs window >= 3, got {window}")
    O = ordinal_window(window)
    f = yoneda_map(O, _face(2, 3, (0, 2)))
    g = yoneda_map(O, _face(2, 3, (0, 0)))
    Q, q = coequalizer(f, g)
    j = q @ yoneda_map(O, _face(2, 3, (0, 1)))
    return Q, j


def degenerate_mask(X: TabularPresheaf) -> list[np.ndarray]:
    """Per object, which elements lie in the image of a non-injective action."""
    B = X.base
    out = [np.zeros(int(n), dtype=bool) for n in X.sizes]
    for m in range(B.n_morphisms):
        a, b, key = parse_ordinal_morphism(B.morphisms[m])
        if len(set(key)) < len(key) and X.sizes[b]:
            out[a][X.act[m]] = True
    return out


def census(X: TabularPresheaf) -> list[int]:
    """Nondegenerate simplex counts in dimensions ``0..n-1``."""
    n = window_bound(X.base)
    deg = degenerate_mask(X)
    return [int((~deg[k]).sum()) for k in range(1, n + 1)]


def nondegenerate(X: TabularPresheaf, dim: int) -> list[str]:
    deg = degenerate_mask(X)[dim + 1]
    return [e for e, d in zip(X.elements[dim + 1], deg) if not d]


@dataclass
class SymmetrizeReport:
    tower: list[TabularPresheaf]
    censuses: list[list[int]]
    injective: list[bool]
    certificate: FactorizationCertificate

    @property
    def edge_counts(self) -> list[int]:
        return [c[1] if len(c) > 1 else 0 for c in self.censuses]


def symmetrize(X: TabularPresheaf, stages: int, *, budget: int | None = None) -> SymmetrizeReport:
    """Run pruned small-object stages of ``X -> 1`` against ``{j}``.

    Reports, for ``X`` and each stage object, the census and whether it is
    injective with respect to ``j``.
    """
    n = window_bound(X.base)
    _, j = delta_1s(n)
    src = MorphismClassSource([j])
    cfg = BoundednessConfig(max_stages=stages, prune_solved=True,
                            **({"budget": budget} if budget is not None else {}))
    cert = factorize(to_terminal(X, terminal_presheaf(X.base)), src, cfg)
    tower = [X] + [s.stage_map.target for s in cert.stages]
    return SymmetrizeReport(tower, [census(Y) for Y in tower],
                            [injective(Y, [j], cfg.budget) for Y in tower], cert)


def codiscrete(values, window: int) -> TabularPresheaf:
    """``X(k) = V^k`` with actions by precomposition (every tuple is a simplex)."""
    O = ordinal_window(window)
    V = [str(v) for v in values]
    elements, index = [], []
    for k in range(O.n_objects):
        tuples = list(itertools.product(range(len(V)), repeat=k))
        elements.append(["".join(V[i] for i in t) if k else "()" for t in tuples])
        index.append({t: i for i, t in enumerate(tuples)})
    act = []
    for m in range(O.n_morphisms):
        a, b, key = parse_ordinal_morphism(O.morphisms[m])
        tuples_b = list(index[b])
        act.append([index[a][tuple(t[i] for i in key)] for t in tuples_b])
    # names may repeat when values have several characters; fall back to indices
    if any(len(set(es)) != len(es) for es in elements):
        elements = [[",".join(str(i) for i in t) for t in index[k]] for k in range(O.n_objects)]
    return TabularPresheaf(O, elements, act)


def _sub_of_delta(n: int, window: int, keep) -> tuple[TabularPresheaf, PresheafMap]:
    D = delta(n, window)
    sel = {}
    for o, es in zip(D.base.objects, D.elements):
        sel[o] = [e for e in es if keep(set(parse_ordinal_morphism(e)[2]))]
    return subpresheaf(D, sel)


def boundary(n: int, window: int) -> tuple[TabularPresheaf, PresheafMap]:
    """Boundary of the ``n``-simplex and its inclusion."""
    full = set(range(n + 1))
    return _sub_of_delta(n, window, lambda img: img != full)


def horn(n: int, i: int, window: int) -> tuple[TabularPresheaf, PresheafMap]:
    """The horn missing the face opposite vertex ``i``, with its inclusion."""
    rest = set(range(n + 1)) - {i}
    return _sub_of_delta(n, window, lambda img: not rest <= img)
