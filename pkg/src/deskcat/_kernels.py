"""Hot inner loops.

Every kernel exists twice: a plain implementation (``py_*``) that only needs
numpy, and a numba-compiled twin.  The public names (``search_homs``,
``min_label_classes``, ...) point at the compiled versions unless numba is
missing or the environment variable ``DESKCAT_NUMBA`` is set to ``0``.

The backtracking search is written once and compiled as-is; the other
kernels have genuinely different numpy fallbacks (vectorized label
propagation and broadcasting checks) because loops over numpy scalars are
slow in the interpreter.
"""

from __future__ import annotations

import os

import numpy as np

SEARCH_OK = 0
SEARCH_BUDGET = 1


def _numba_requested() -> bool:
    flag = os.environ.get("DESKCAT_NUMBA", "1").strip().lower()
    return flag not in ("0", "false", "no", "off")


# ---------------------------------------------------------------------------
# natural transformation search


def py_search_homs(order, edge_off, edge_mor, edge_tgt, act_off, act_flat,
                   mask_off, mask, ysize, init, limit, budget):
    """Enumerate assignments ``val`` (one target element per source element).

    Constraint: for every edge ``k`` of element ``e``,
    ``val[edge_tgt[k]] == act_flat[act_off[edge_mor[k]] + val[e]]``, and
    every value must be allowed by ``mask``.  Elements listed in ``init``
    (value >= 0) are fixed up front.  Branching follows ``order``; every
    other element is forced by propagation.

    Returns ``(solutions, status, nodes)``.  ``limit == 0`` means all.
    """
    n = init.shape[0]
    val = init.copy()
    trail = np.empty(n + 1, np.int64)
    tlen = 0
    nodes = 0
    cap = 16
    out = np.empty((cap, n), np.int32)
    nsol = 0

    for e in range(n):
        if init[e] >= 0 and not mask[mask_off[e] + init[e]]:
            return out[:0].copy(), SEARCH_OK, nodes
    for e in range(n):
        if init[e] < 0:
            continue
        y = val[e]
        for k in range(edge_off[e], edge_off[e + 1]):
            t = edge_tgt[k]
            yt = act_flat[act_off[edge_mor[k]] + y]
            if val[t] < 0:
                if not mask[mask_off[t] + yt]:
                    return out[:0].copy(), SEARCH_OK, nodes
                val[t] = yt
            elif val[t] != yt:
                return out[:0].copy(), SEARCH_OK, nodes

    q = 0
    while q < n and val[order[q]] >= 0:
        q += 1
    if q == n:
        out[0, :] = val
        return out[:1].copy(), SEARCH_OK, nodes

    st_pos = np.empty(n + 1, np.int64)
    st_y = np.empty(n + 1, np.int64)
    st_t = np.empty(n + 1, np.int64)
    sp = 0
    st_pos[0] = q
    st_y[0] = 0
    st_t[0] = tlen

    while sp >= 0:
        p = st_pos[sp]
        e = order[p]
        while tlen > st_t[sp]:
            tlen -= 1
            val[trail[tlen]] = -1
        y = st_y[sp]
        placed = False
        while y < ysize[e]:
            if mask[mask_off[e] + y]:
                nodes += 1
                if nodes > budget:
                    return out[:nsol].copy(), SEARCH_BUDGET, nodes
                val[e] = y
                trail[tlen] = e
                tlen += 1
                ok = True
                for k in range(edge_off[e], edge_off[e + 1]):
                    t = edge_tgt[k]
                    yt = act_flat[act_off[edge_mor[k]] + y]
                    if val[t] < 0:
                        if not mask[mask_off[t] + yt]:
                            ok = False
                            break
                        val[t] = yt
                        trail[tlen] = t
                        tlen += 1
                    elif val[t] != yt:
                        ok = False
                        break
                if ok:
                    placed = True
                    break
                while tlen > st_t[sp]:
                    tlen -= 1
                    val[trail[tlen]] = -1
            y += 1
        if not placed:
            sp -= 1
            continue
        st_y[sp] = y + 1
        q = p + 1
        while q < n and val[order[q]] >= 0:
            q += 1
        if q == n:
            if nsol == cap:
                grown = np.empty((2 * cap, n), np.int32)
                grown[:cap] = out
                out = grown
                cap *= 2
            out[nsol, :] = val
            nsol += 1
            if limit > 0 and nsol >= limit:
                return out[:nsol].copy(), SEARCH_OK, nodes
            continue
        sp += 1
        st_pos[sp] = q
        st_y[sp] = 0
        st_t[sp] = tlen

    return out[:nsol].copy(), SEARCH_OK, nodes


# ---------------------------------------------------------------------------
# quotients


def py_min_label_classes(n, a, b):
    """Label each of ``n`` items by the least index of its class.

    Classes are generated by the pairs ``(a[k], b[k])``.  Vectorized min-label
    propagation with pointer jumping; converges in O(log n) rounds on chains.
    """
    labels = np.arange(n, dtype=np.int64)
    if n == 0 or len(a) == 0:
        return labels
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    while True:
        before = labels.copy()
        m = np.minimum(labels[a], labels[b])
        np.minimum.at(labels, a, m)
        np.minimum.at(labels, b, m)
        while True:
            jumped = labels[labels]
            if np.array_equal(jumped, labels):
                break
            labels = jumped
        if np.array_equal(before, labels):
            return labels


def nb_min_label_classes_impl(n, a, b):
    parent = np.arange(n)
    for k in range(a.shape[0]):
        x = a[k]
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        y = b[k]
        while parent[y] != y:
            parent[y] = parent[parent[y]]
            y = parent[y]
        if x < y:
            parent[y] = x
        elif y < x:
            parent[x] = y
    labels = np.empty(n, np.int64)
    for i in range(n):
        x = i
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        labels[i] = x
    return labels


# ---------------------------------------------------------------------------
# table checks


def py_functoriality_violation(pair_g, pair_f, pair_gf, pair_n, act_off, act_flat):
    """Index of the first pair with ``X(g.f) != X(f).X(g)``, or -1.

    ``pair_n[k]`` is the size of the set the composite acts on.
    """
    if len(pair_g) == 0:
        return -1
    bad = []
    for size in np.unique(pair_n):
        sel = np.nonzero(pair_n == size)[0]
        if size == 0:
            continue
        cols = np.arange(size)
        xg = act_flat[act_off[pair_g[sel]][:, None] + cols]
        lhs = act_flat[act_off[pair_gf[sel]][:, None] + cols]
        rhs = act_flat[act_off[pair_f[sel]][:, None] + xg]
        rows = np.nonzero((lhs != rhs).any(axis=1))[0]
        if rows.size:
            bad.append(sel[rows].min())
    return int(min(bad)) if bad else -1


def nb_functoriality_violation_impl(pair_g, pair_f, pair_gf, pair_n, act_off, act_flat):
    for k in range(pair_g.shape[0]):
        og = act_off[pair_g[k]]
        of = act_off[pair_f[k]]
        ogf = act_off[pair_gf[k]]
        for x in range(pair_n[k]):
            if act_flat[ogf + x] != act_flat[of + act_flat[og + x]]:
                return k
    return -1


def py_associativity_violation(comp, dom, cod):
    """First composable triple ``(h, g, f)`` with ``h(gf) != (hg)f``."""
    n = comp.shape[0]
    if n == 0:
        return -1, -1, -1
    gs, fs = np.nonzero(comp >= 0)
    gf = comp[gs, fs]
    best = None
    chunk = 1 << 21
    for c in np.unique(cod[gs]):
        sel = np.nonzero(cod[gs] == c)[0]
        hs = np.nonzero(dom == c)[0]
        if hs.size == 0:
            continue
        step = max(1, chunk // hs.size)
        for lo in range(0, sel.size, step):
            part = sel[lo:lo + step]
            lhs = comp[hs[:, None], gf[part][None, :]]
            hg = comp[hs[:, None], gs[part][None, :]]
            rhs = comp[hg, fs[part][None, :]]
            bad = np.argwhere(lhs != rhs)
            if bad.size:
                cands = [(int(hs[i]), int(gs[part[j]]), int(fs[part[j]])) for i, j in bad]
                cand = min(cands)
                if best is None or cand < best:
                    best = cand
    return best if best is not None else (-1, -1, -1)


def nb_associativity_violation_impl(comp, dom, cod):
    n = comp.shape[0]
    n_obj = 0
    for m in range(n):
        n_obj = max(n_obj, dom[m] + 1, cod[m] + 1)
    by_cod = np.argsort(cod, kind="mergesort")
    by_dom = np.argsort(dom, kind="mergesort")
    cod_off = np.zeros(n_obj + 1, np.int64)
    dom_off = np.zeros(n_obj + 1, np.int64)
    for m in range(n):
        cod_off[cod[m] + 1] += 1
        dom_off[dom[m] + 1] += 1
    for o in range(n_obj):
        cod_off[o + 1] += cod_off[o]
        dom_off[o + 1] += dom_off[o]
    best_h, best_g, best_f = -1, -1, -1
    for g in range(n):
        b = dom[g]
        c = cod[g]
        for i in range(cod_off[b], cod_off[b + 1]):
            f = by_cod[i]
            gf = comp[g, f]
            for k in range(dom_off[c], dom_off[c + 1]):
                h = by_dom[k]
                if comp[h, gf] != comp[comp[h, g], f]:
                    if best_h < 0 or (h, g, f) < (best_h, best_g, best_f):
                        best_h, best_g, best_f = h, g, f
    return best_h, best_g, best_f


# ---------------------------------------------------------------------------
# backend selection

NUMBA_AVAILABLE = False
try:  # pragma: no cover - depends on the environment
    import numba as _numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    _numba = None

if NUMBA_AVAILABLE:
    _jit = _numba.njit(cache=True)
    nb_search_homs = _jit(py_search_homs)
    nb_min_label_classes = _jit(nb_min_label_classes_impl)
    nb_functoriality_violation = _jit(nb_functoriality_violation_impl)
    nb_associativity_violation = _jit(nb_associativity_violation_impl)
else:  # pragma: no cover
    nb_search_homs = py_search_homs
    nb_min_label_classes = py_min_label_classes
    nb_functoriality_violation = py_functoriality_violation
    nb_associativity_violation = py_associativity_violation

USE_NUMBA = NUMBA_AVAILABLE and _numba_requested()
BACKEND = "numba" if USE_NUMBA else "python"

if USE_NUMBA:
    search_homs = nb_search_homs
    min_label_classes = nb_min_label_classes
    functoriality_violation = nb_functoriality_violation
    associativity_violation = nb_associativity_violation
else:
    search_homs = py_search_homs
    min_label_classes = py_min_label_classes
    functoriality_violation = py_functoriality_violation
    associativity_violation = py_associativity_violation
