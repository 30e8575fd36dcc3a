"""Command-line interface.

Every run writes its results as line-delimited JSON into ``--out`` together
with ``manifest.json`` (input/output digests, configuration, wall-clock).
Exit status: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import _kernels
from .errors import ConfigError, DeskcatError
from .io import Loader, certificate_json, dump_lines, dumps, map_json, presheaf_json, read_json, sha256_file, \
    verify_certificate, write_atomic
from .presheaf import DEFAULT_BUDGET

DEFAULT_WINDOW = 6
DEFAULT_STAGES = 8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive(flag):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects an integer, got {text!r}") from None
        if v < 1:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 1, got {v}")
        return v
    return conv


def _nonneg(flag):
    def conv(text):
        try:
            v = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"{flag} expects an integer, got {text!r}") from None
        if v < 0:
            raise argparse.ArgumentTypeError(f"{flag} must be >= 0, got {v}")
        return v
    return conv


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--window", type=_nonneg("--window"), default=None,
                        help=f"window for procedural bases (default {DEFAULT_WINDOW})")
    common.add_argument("--max-stages", type=_positive("--max-stages"), default=DEFAULT_STAGES)
    common.add_argument("--no-prune", action="store_true", help="keep triples that already have a lift")
    common.add_argument("--budget", type=_positive("--budget"), default=DEFAULT_BUDGET,
                        help="backtracking node budget per search")
    common.add_argument("--out", default="deskcat-out", help="output directory")

    p = _Parser(prog="deskcat", description="Finite category theory with checkable certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("validate", parents=[common], help="validate a category, presheaf, map or class file")
    s.add_argument("file")

    s = sub.add_parser("construct", parents=[common], help="comma, pseudopullback, inserter, equifier, cones")
    s.add_argument("kind", choices=["pspb", "inserter", "equifier", "comma", "approx-complete"])
    s.add_argument("--F")
    s.add_argument("--G")
    s.add_argument("--phi")
    s.add_argument("--psi")
    s.add_argument("--category")
    s.add_argument("--diagram", action="append", default=[])

    s = sub.add_parser("colimit", parents=[common], help="pushouts, coequalizers, chain colimits")
    s.add_argument("kind", choices=["pushout", "coeq", "chain"])
    s.add_argument("maps", nargs="+")

    s = sub.add_parser("lift", parents=[common], help="lifting problems and lifting properties")
    s.add_argument("kind", choices=["solve", "box", "perp", "inj", "ort"])
    s.add_argument("--f")
    s.add_argument("--g")
    s.add_argument("--u")
    s.add_argument("--v")
    s.add_argument("--object")
    s.add_argument("--class", dest="cls")

    for name in ("factorize", "ofactorize"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--class", dest="cls", required=True)
        s.add_argument("--map", required=True)
    for name in ("reflect", "reflect-ort"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("--class", dest="cls", required=True)
        s.add_argument("--object", required=True)
        s.add_argument("--test", action="append", default=[], help="test object for the universal property")

    s = sub.add_parser("square-corr", parents=[common])
    s.add_argument("--f", required=True)
    s.add_argument("--g", required=True)

    s = sub.add_parser("simplicial", parents=[common], help="simplices over the ordinal category")
    s.add_argument("kind", choices=["delta", "delta1s", "symmetrize"])
    s.add_argument("n", nargs="?", type=_nonneg("n"))
    s.add_argument("--stages", type=_positive("--stages"), default=3)

    s = sub.add_parser("corpus", parents=[common], help="run the reference corpus")
    s.add_argument("action", choices=["run"])

    s = sub.add_parser("verify", parents=[common], help="re-check a written certificate")
    s.add_argument("file")
    return p


# ---------------------------------------------------------------------------


def _need(args, *names):
    for n in names:
        if getattr(args, n) in (None, []):
            raise UsageError(f"missing required flag --{n.replace('_', '-')}")


def _config(args):
    from .soa import BoundednessConfig

    return BoundednessConfig(max_stages=args.max_stages, prune_solved=not args.no_prune, budget=args.budget)


def cmd_validate(args, L: Loader):
    data = read_json(args.file)
    L.inputs[args.file] = sha256_file(args.file)
    here = Path(args.file).parent
    if "compose" in data or "identities" in data:
        C = L.category(data, here)
        return [{"kind": "category", "valid": True, "objects": C.n_objects, "morphisms": C.n_morphisms}]
    if "generators" in data:
        gens = L.map_class(data, here)
        return [{"kind": "class", "valid": True, "generators": len(gens)}]
    if "components" in data:
        m = L.map(data, here)
        return [{"kind": "map", "valid": True, "source_size": m.source.total, "target_size": m.target.total}]
    if "sets" in data or "shape" in data:
        X = L.presheaf(data, here)
        return [{"kind": "presheaf", "valid": True, "sizes": dict(zip(X.base.objects, map(int, X.sizes)))}]
    raise ConfigError("cannot tell what kind of file this is")


def cmd_construct(args, L: Loader):
    from .construct import approximately_complete_check, equifier, inserter, pseudopullback
    from .fincat import comma_category

    if args.kind in ("pspb", "inserter", "comma"):
        _need(args, "F", "G")
        F, G = L.functor(args.F), L.functor(args.G)
        c = {"pspb": pseudopullback, "inserter": inserter, "comma": comma_category}[args.kind](F, G)
        return [{"category": c.category.to_json(), "object_labels": c.object_labels,
                 "morphism_labels": c.morphism_labels,
                 "projections": {k: P.to_json() for k, P in c.projections.items()}}]
    if args.kind == "equifier":
        _need(args, "phi", "psi")
        return [{"category": equifier(L.nat_transformation(args.phi), L.nat_transformation(args.psi)).to_json()}]
    _need(args, "category", "diagram")
    C = L.category(args.category)
    diagrams = [L.functor(d) for d in args.diagram]
    out = []
    for path, r in zip(args.diagram, approximately_complete_check(C, diagrams)):
        out.append({
            "diagram": path,
            "cones": [{"apex": C.objects[x], "legs": [C.morphisms[l] for l in legs]} for x, legs in r.cones],
            "weakly_initial_subset": r.weakly_initial_subset,
            "verified": r.verified,
        })
    return out


def cmd_colimit(args, L: Loader):
    from .colimits import chain_colimit, coequalizer, pushout

    maps = [L.map(m) for m in args.maps]
    if args.kind in ("pushout", "coeq") and len(maps) != 2:
        raise UsageError(f"colimit {args.kind} takes exactly two map files")
    if args.kind == "pushout":
        c = pushout(maps[0], maps[1])
        return [{"apex": presheaf_json(c.apex), "legs": [c.legs[1].to_json(), c.legs[2].to_json()]}]
    if args.kind == "coeq":
        Q, q = coequalizer(maps[0], maps[1])
        return [{"apex": presheaf_json(Q), "projection": q.to_json()}]
    c = chain_colimit(maps)
    return [{"apex": presheaf_json(c.apex), "legs": [leg.to_json() for leg in c.legs]}]


def cmd_lift(args, L: Loader):
    from .lifting import LiftingProblem, box, injective, orthogonal, perp, solve

    if args.kind == "solve":
        _need(args, "f", "g", "u", "v")
        p = LiftingProblem(L.map(args.f), L.map(args.g), L.map(args.u), L.map(args.v)).validate()
        ds = solve(p, budget=args.budget)
        return [{"diagonals": len(ds)}] + [map_json(d) for d in ds]
    if args.kind in ("box", "perp"):
        _need(args, "f", "g")
        fn = box if args.kind == "box" else perp
        return [{args.kind: fn(L.map(args.f), L.map(args.g), args.budget)}]
    _need(args, "object", "cls")
    fn = injective if args.kind == "inj" else orthogonal
    return [{args.kind: fn(L.presheaf(args.object), L.map_class(args.cls), args.budget)}]


def _cert_lines(cert):
    return [certificate_json(cert)]


def cmd_factorize(args, L: Loader):
    from .soa import MorphismClassSource, factorize

    cert = factorize(L.map(args.map), MorphismClassSource(L.map_class(args.cls)), _config(args))
    return _cert_lines(cert)


def cmd_ofactorize(args, L: Loader):
    from .ofs import orth_factorize

    return _cert_lines(orth_factorize(L.map(args.map), L.map_class(args.cls), _config(args)))


def cmd_reflect(args, L: Loader):
    from .soa import MorphismClassSource, weak_reflection

    r, cert = weak_reflection(L.presheaf(args.object), MorphismClassSource(L.map_class(args.cls)), _config(args))
    return [{"reflection": map_json(r), "status": cert.status}] + _cert_lines(cert)


def cmd_reflect_ort(args, L: Loader):
    from .ofs import reflect_ort

    R = reflect_ort(L.presheaf(args.object), L.map_class(args.cls), _config(args),
                    [L.presheaf(t) for t in args.test])
    return [{"reflection": map_json(R.r), "status": R.certificate.status, "orthogonal": R.orthogonal,
             "universal_counts": R.universal_counts}] + _cert_lines(R.certificate)


def cmd_square_corr(args, L: Loader):
    from .ofs import square_correspondence

    r = square_correspondence(L.map(args.f), L.map(args.g), args.budget)
    return [{"left_squares": r.left, "right_squares": r.right, "bijection": r.ok}]


def cmd_simplicial(args, L: Loader):
    from .ordsimp import census, delta, delta_1s, symmetrize

    window = args.window if args.window is not None else DEFAULT_WINDOW
    if args.kind == "delta":
        if args.n is None:
            raise UsageError("simplicial delta needs a dimension N")
        X = delta(args.n, window)
        return [{"census": census(X), "presheaf": presheaf_json(X)}]
    if args.kind == "delta1s":
        Q, j = delta_1s(window)
        return [{"census": census(Q), "presheaf": presheaf_json(Q), "j": map_json(j)}]
    dim = args.n if args.n is not None else 1
    rep = symmetrize(delta(dim, window), args.stages, budget=args.budget)
    return [{"censuses": rep.censuses, "injective": rep.injective, "status": rep.certificate.status,
             "cells_per_stage": rep.certificate.cells_per_stage()}] + _cert_lines(rep.certificate)


def cmd_corpus(args, L: Loader):
    from .corpus import run_corpus

    return [r.to_json() for r in run_corpus()]


def cmd_verify(args, L: Loader):
    L.inputs[args.file] = sha256_file(args.file)
    text = Path(args.file).read_text(encoding="utf-8")
    import json

    results = []
    for line in text.splitlines():
        if not line.strip():
            continue
        doc = json.loads(line)
        if doc.get("kind") == "factorization":
            results.append(verify_certificate(doc, args.budget))
    if not results:
        raise ConfigError("no certificate found in the file")
    if not all(r["ok"] for r in results):
        raise DeskcatError(f"certificate verification failed: {dumps(results)}")
    return results


COMMANDS = {
    "validate": cmd_validate, "construct": cmd_construct, "colimit": cmd_colimit, "lift": cmd_lift,
    "factorize": cmd_factorize, "ofactorize": cmd_ofactorize, "reflect": cmd_reflect,
    "reflect-ort": cmd_reflect_ort, "square-corr": cmd_square_corr, "simplicial": cmd_simplicial,
    "corpus": cmd_corpus, "verify": cmd_verify,
}


def run(argv=None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    window = args.window if args.window is not None else DEFAULT_WINDOW
    L = Loader(".", window)
    t0 = time.perf_counter()
    try:
        lines = COMMANDS[args.command](args, L)
    except UsageError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except ConfigError as exc:
        print(f"usage error: {exc}", file=stderr)
        return 2
    except DeskcatError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=stderr)
        return 1
    elapsed = time.perf_counter() - t0
    out = Path(args.out)
    name = "summary.jsonl" if args.command == "corpus" else "result.jsonl"
    digest = write_atomic(out / name, dump_lines(lines))
    manifest = {
        "command": argv,
        "inputs": dict(sorted(L.inputs.items())),
        "config": {"window": window, "max_stages": args.max_stages, "prune": not args.no_prune,
                   "budget": args.budget, "backend": _kernels.BACKEND},
        "outputs": {name: digest},
        "wall_clock_s": round(elapsed, 6),
    }
    write_atomic(out / "manifest.json", dumps(manifest) + "\n")
    if args.command == "corpus":
        for row in lines:
            mark = "PASS" if row["passed"] else "FAIL"
            print(f"[{mark}] criterion {row['criterion']}: {row['name']}", file=stdout)
    else:
        for row in lines[:1]:
            text = dumps(row)
            print(text if len(text) <= 400 else text[:400] + "...", file=stdout)
    print(f"wrote {out / name} (sha256 {digest})", file=stdout)
    if args.command == "corpus" and not all(r["passed"] for r in lines):
        return 1
    return 0


def main():  # pragma: no cover
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
