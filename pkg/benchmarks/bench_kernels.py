"""Compare the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py --repeat 5 --window 5

Both variants are called directly (the ``DESKCAT_NUMBA`` switch only decides
which one the library uses), and every pair of results is checked for
agreement before timings are reported.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from deskcat import _kernels as K
from deskcat.fincat import materialize, ordinals
from deskcat.ordsimp import codiscrete, delta


def best_of(fn, repeat):
    fn()  # warm-up (and JIT compile)
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def search_args(X, Y):
    n = X.total
    ysize = Y.sizes[X.elem_obj].astype(np.int64)
    moff = np.concatenate([[0], np.cumsum(ysize)]).astype(np.int64)
    mask = np.ones(int(moff[-1]), dtype=np.bool_)
    init = np.full(n, -1, dtype=np.int32)
    order = np.lexsort((np.arange(n), -X.elem_obj, -X.sizes[X.elem_obj])).astype(np.int64)
    eoff, emor, etgt = X.edges
    aoff, aflat = Y.act_flat
    return (order, eoff, emor, etgt, aoff, aflat, moff, mask, ysize, init, 0, 10**9)


def cases(window):
    X = delta(2, window)
    Y = codiscrete("abcd", window)
    args = search_args(X, Y)
    yield "search_homs", lambda: K.nb_search_homs(*args), lambda: K.py_search_homs(*args), \
        lambda a, b: np.array_equal(a[0], b[0])

    rng = np.random.default_rng(0)
    n = 200_000
    a = rng.integers(0, n, size=n // 2)
    b = rng.integers(0, n, size=n // 2)
    yield "min_label_classes", lambda: K.nb_min_label_classes(n, a, b), lambda: K.py_min_label_classes(n, a, b), \
        np.array_equal

    B = Y.base
    g, f, gf = B.composable_pairs
    sizes = Y.sizes[B.cod[g]]
    off, flat = Y.act_flat
    yield "functoriality", lambda: K.nb_functoriality_violation(g, f, gf, sizes, off, flat), \
        lambda: K.py_functoriality_violation(g, f, gf, sizes, off, flat), lambda x, y: x == y

    C = materialize(ordinals(), window + 1)
    yield "associativity", lambda: K.nb_associativity_violation(C.comp, C.dom, C.cod), \
        lambda: K.py_associativity_violation(C.comp, C.dom, C.cod), lambda x, y: tuple(x) == tuple(y)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--window", type=int, default=5, help="ordinal window bound for the presheaf cases")
    ap.add_argument("--json", action="store_true", help="print one JSON object per case")
    args = ap.parse_args()
    if not K.NUMBA_AVAILABLE:
        print("numba is not installed; only the fallback exists")
    rows = []
    for name, nb, py, same in cases(args.window):
        t_nb, r_nb = best_of(nb, args.repeat)
        t_py, r_py = best_of(py, args.repeat)
        rows.append({"case": name, "numba_s": t_nb, "numpy_s": t_py,
                     "speedup": t_py / t_nb if t_nb > 0 else float("inf"), "agree": bool(same(r_nb, r_py))})
    for r in rows:
        if args.json:
            print(json.dumps(r, sort_keys=True))
        else:
            print(f"{r['case']:<20} numba {r['numba_s'] * 1e3:9.2f} ms   numpy {r['numpy_s'] * 1e3:9.2f} ms"
                  f"   x{r['speedup']:7.1f}   agree={r['agree']}")


if __name__ == "__main__":
    main()
