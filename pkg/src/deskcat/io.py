"""JSON file formats.

Every artifact is line-delimited JSON with sorted keys.  References to
categories and presheaves may be inline objects or paths (relative to the
referring file); categories may also be ``{"builtin": "ordinals", "window": n}``
(objects ``0..n-1``) or ``{"builtin": "terminal"}``.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any

from .errors import ConfigError, DeskcatError
from .fincat import (BUILTINS, FinCategory, Functor, NatTransformation, materialize, ordinals, terminal_category,
                     validate_category)
from .presheaf import FormalColimitPresheaf, PresheafMap, TabularPresheaf, point_category, tabulate


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def dump_lines(objs) -> str:
    return "".join(dumps(o) + "\n" for o in objs)


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def write_atomic(path, text: str) -> str:
    """Write via a temporary file and rename; returns the sha256 of the bytes."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    data = text.encode("utf-8")
    tmp.write_bytes(data)
    os.replace(tmp, path)
    return sha256_bytes(data)


def read_json(path) -> Any:
    """Read a JSON document (a single object, or the first line of a JSONL file)."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        first = text.strip().splitlines()[0] if text.strip() else ""
        try:
            return json.loads(first)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: not valid JSON ({exc})") from None


class Loader:
    """Resolves references; equal category descriptions share one object."""

    def __init__(self, base_dir: str | Path = ".", window: int | None = None):
        self.base_dir = Path(base_dir)
        self.window = window
        self.inputs: dict[str, str] = {}
        self._cats: dict[str, FinCategory] = {}

    def _deref(self, ref, here: Path):
        if isinstance(ref, str):
            p = Path(ref)
            if not p.is_absolute():
                p = here / p
            if not p.exists():
                raise ConfigError(f"file not found: {p}")
            self.inputs[str(p)] = sha256_file(p)
            return read_json(p), p.parent
        return ref, here

    # categories

    def category(self, ref, here: Path | None = None) -> FinCategory:
        data, here = self._deref(ref, here or self.base_dir)
        if not isinstance(data, dict):
            raise ConfigError("category reference must be an object or a path")
        if "builtin" in data:
            name = data["builtin"]
            if name == "terminal":
                return point_category()
            if name not in BUILTINS:
                raise ConfigError(f"unknown builtin category {name!r}")
            window = data.get("window", self.window)
            if window is None:
                raise ConfigError("builtin category needs a window")
            return materialize(BUILTINS[name](), int(window))
        key = dumps(data)
        if key not in self._cats:
            self._cats[key] = validate_category(data)
        return self._cats[key]

    def functor(self, ref, here: Path | None = None) -> Functor:
        data, here = self._deref(ref, here or self.base_dir)
        return Functor(self.category(data["source"], here), self.category(data["target"], here),
                       data["objects"], data["morphisms"])

    def nat_transformation(self, ref, here: Path | None = None) -> NatTransformation:
        data, here = self._deref(ref, here or self.base_dir)
        return NatTransformation(self.functor(data["source"], here), self.functor(data["target"], here),
                                 data["components"])

    # presheaves

    def presheaf(self, ref, here: Path | None = None) -> TabularPresheaf:
        data, here = self._deref(ref, here or self.base_dir)
        if "shape" in data:
            return tabulate(self.formal(data, here), self._formal_window(data))
        base = self.category(data.get("base", {"builtin": "terminal"}), here)
        return TabularPresheaf.from_dict(base, data.get("sets", {}), data.get("actions", {}))

    def _formal_window(self, data):
        b = data.get("base")
        if isinstance(b, dict) and "window" in b:
            return int(b["window"])
        return self.window

    def formal(self, data, here: Path) -> FormalColimitPresheaf:
        b = data["base"]
        if isinstance(b, dict) and b.get("builtin") in BUILTINS:
            base = BUILTINS[b["builtin"]]()
        else:
            base = self.category(b, here)
        return FormalColimitPresheaf(base, self.category(data["shape"], here), data["labels"],
                                     data.get("morphism_labels"))

    def map(self, ref, here: Path | None = None) -> PresheafMap:
        data, here = self._deref(ref, here or self.base_dir)
        return PresheafMap.from_dict(self.presheaf(data["source"], here), self.presheaf(data["target"], here),
                                     data["components"])

    def map_class(self, ref, here: Path | None = None) -> list[PresheafMap]:
        data, here = self._deref(ref, here or self.base_dir)
        return [self.map(g, here) for g in data.get("generators", [])]


# ---------------------------------------------------------------------------
# encoders


def base_ref(C: FinCategory) -> dict:
    if C is point_category() or C == terminal_category():
        return {"builtin": "terminal"}
    O = ordinals()
    if C.n_objects in O._cache and O._cache[C.n_objects] is C:
        return {"builtin": "ordinals", "window": C.n_objects}
    return C.to_json()


def presheaf_json(X: TabularPresheaf) -> dict:
    return {"base": base_ref(X.base), **X.to_json()}


def map_json(m: PresheafMap) -> dict:
    return {"source": presheaf_json(m.source), "target": presheaf_json(m.target), "components": m.to_json()}


class Interner:
    """Numbers presheaves in order of first appearance so maps can refer to them."""

    def __init__(self):
        self.table: dict[str, str] = {}
        self.docs: list[dict] = []

    def ref(self, X: TabularPresheaf) -> str:
        doc = X.to_json()
        key = dumps(doc)
        if key not in self.table:
            self.table[key] = f"X{len(self.docs)}"
            self.docs.append(doc)
        return self.table[key]

    def map(self, m: PresheafMap) -> dict:
        return {"source": self.ref(m.source), "target": self.ref(m.target), "components": m.to_json()}

    def objects(self) -> dict:
        return {f"X{i}": d for i, d in enumerate(self.docs)}


def certificate_json(cert) -> dict:
    """Self-contained description of a factorization certificate."""
    it = Interner()
    doc = {
        "kind": "factorization",
        "status": cert.status,
        "prune": cert.prune,
        "max_stages": cert.max_stages,
        "pending_triples": cert.pending_triples,
        "right_class_verified": cert.right_class_verified,
        "f": it.map(cert.f),
        "generators": [it.map(g) for g in cert.generators],
        "stages": [
            {
                "index": s.index,
                "attaching": [[k, it.map(u)] for k, u in s.attaching],
                "stage_map": it.map(s.stage_map),
                "cell_map": it.map(s.cell_map),
                "residual": it.map(s.residual),
            }
            for s in cert.stages
        ],
        "composite": it.map(cert.composite),
        "residual": it.map(cert.residual),
        "cells_per_stage": cert.cells_per_stage(),
    }
    base = cert.f.base
    doc["base"] = base_ref(base)
    doc["objects"] = it.objects()
    return doc


class CertificateReader:
    def __init__(self, doc: dict, loader: Loader | None = None):
        if doc.get("kind") != "factorization":
            raise ConfigError("not a factorization certificate")
        self.doc = doc
        self.loader = loader or Loader()
        self.base = self.loader.category(doc["base"])
        self._objs: dict[str, TabularPresheaf] = {}

    def obj(self, ref: str) -> TabularPresheaf:
        if ref not in self._objs:
            d = self.doc["objects"][ref]
            self._objs[ref] = TabularPresheaf.from_dict(self.base, d["sets"], d["actions"])
        return self._objs[ref]

    def map(self, d: dict) -> PresheafMap:
        return PresheafMap.from_dict(self.obj(d["source"]), self.obj(d["target"]), d["components"])


def verify_certificate(doc: dict, budget: int | None = None) -> dict:
    """Re-check a written certificate from its JSON alone."""
    from .lifting import CellStage, CellularCertificate, box, verify_cellular
    from .presheaf import DEFAULT_BUDGET

    budget = budget or DEFAULT_BUDGET
    r = CertificateReader(doc)
    f = r.map(doc["f"])
    gens = [r.map(g) for g in doc["generators"]]
    stages = [CellStage([(int(k), r.map(u)) for k, u in s["attaching"]], r.map(s["stage_map"]), r.map(s["cell_map"]))
              for s in doc["stages"]]
    composite = r.map(doc["composite"])
    residual = r.map(doc["residual"])
    out = {"factorization": (residual @ composite) == f}
    try:
        out["cellular"] = verify_cellular(CellularCertificate(f.source, stages, composite), gens)
    except DeskcatError as exc:
        out["cellular"] = False
        out["cellular_error"] = str(exc)
    if doc["status"] == "Fixpoint":
        out["right_class"] = all(box(h, residual, budget) for h in gens)
    out["ok"] = all(v for k, v in out.items() if isinstance(v, bool))
    return out
