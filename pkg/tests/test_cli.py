from __future__ import annotations

import io
import json

import pytest

from deskcat import cli
from deskcat.io import (Loader, certificate_json, dumps, presheaf_json, read_json, sha256_file, verify_certificate,
                        write_atomic)
from deskcat.ordsimp import delta, delta_1s
from deskcat.presheaf import constant_set, from_empty, to_terminal
from deskcat.soa import MorphismClassSource, factorize


def write(path, obj):
    path.write_text(json.dumps(obj))
    return str(path)


def run(argv):
    out, err = io.StringIO(), io.StringIO()
    code = cli.run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def result_lines(out_dir):
    return [json.loads(l) for l in (out_dir / "result.jsonl").read_text().splitlines()]


@pytest.fixture
def files(tmp_path):
    d = tmp_path
    p = {}
    p["empty"] = write(d / "empty.json", {"sets": {"*": []}})
    p["one"] = write(d / "one.json", {"sets": {"*": ["x"]}})
    p["two"] = write(d / "two.json", {"sets": {"*": ["a", "b"]}})
    p["three"] = write(d / "three.json", {"sets": {"*": ["p", "q", "r"]}})
    p["e1"] = write(d / "e1.json", {"source": "empty.json", "target": "one.json", "components": {"*": {}}})
    p["fold"] = write(d / "fold.json", {"source": "two.json", "target": "one.json",
                                        "components": {"*": {"a": "x", "b": "x"}}})
    p["e3"] = write(d / "e3.json", {"source": "empty.json", "target": "three.json", "components": {"*": {}}})
    p["class_e1"] = write(d / "class_e1.json", {"generators": ["e1.json"]})
    p["class_fold"] = write(d / "class_fold.json", {"generators": ["fold.json"]})
    p["bad"] = write(d / "bad.json", {
        "objects": ["*"],
        "morphisms": [{"name": n, "dom": "*", "cod": "*"} for n in "eab"],
        "identities": {"*": "e"},
        "compose": [[x, "e", x] for x in "eab"] + [["e", x, x] for x in "ab"]
        + [["a", "a", "b"], ["a", "b", "a"], ["b", "a", "a"], ["b", "b", "a"]]})
    p["arrow"] = write(d / "arrow.json", {
        "objects": ["0", "1"],
        "morphisms": [["id0", "0", "0"], ["id1", "1", "1"], ["a", "0", "1"]],
        "identities": {"0": "id0", "1": "id1"},
        "compose": [["id0", "id0", "id0"], ["id1", "id1", "id1"], ["a", "id0", "a"], ["id1", "a", "a"]]})
    p["idF"] = write(d / "idF.json", {"source": "arrow.json", "target": "arrow.json",
                                      "objects": {"0": "0", "1": "1"},
                                      "morphisms": {"id0": "id0", "id1": "id1", "a": "a"}})
    p["dir"] = d
    return p


def test_validate_bad_category(files):
    code, _, err = run(["validate", files["bad"], "--out", str(files["dir"] / "o")])
    assert code == 1 and "NonAssociative" in err


def test_validate_kinds(files):
    out = files["dir"] / "o"
    for key, kind in [("arrow", "category"), ("two", "presheaf"), ("fold", "map"), ("class_e1", "class")]:
        code, stdout, _ = run(["validate", files[key], "--out", str(out)])
        assert code == 0, key
        assert result_lines(out)[0]["kind"] == kind


def test_zero_stages_is_usage_error(files):
    code, _, err = run(["factorize", "--class", files["class_e1"], "--map", files["e3"], "--max-stages", "0"])
    assert code == 2 and "usage error" in err


def test_factorize_then_verify(files):
    out = files["dir"] / "f"
    code, stdout, _ = run(["factorize", "--class", files["class_e1"], "--map", files["e3"], "--out", str(out)])
    assert code == 0
    cert = result_lines(out)[0]
    assert cert["status"] == "Fixpoint" and cert["cells_per_stage"] == [3]
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["outputs"]["result.jsonl"] == sha256_file(out / "result.jsonl")
    assert manifest["config"]["max_stages"] == 8 and manifest["config"]["budget"] == 10_000_000
    assert files["e3"] in manifest["inputs"]
    code, _, _ = run(["verify", str(out / "result.jsonl"), "--out", str(files["dir"] / "v")])
    assert code == 0
    assert result_lines(files["dir"] / "v")[0]["ok"] is True


def test_verify_detects_tampering(files):
    out = files["dir"] / "f"
    run(["factorize", "--class", files["class_e1"], "--map", files["e3"], "--out", str(out)])
    cert = result_lines(out)[0]
    cert["stages"][0]["attaching"] = cert["stages"][0]["attaching"][:2]
    bad = files["dir"] / "tampered.jsonl"
    bad.write_text(dumps(cert) + "\n")
    code, _, err = run(["verify", str(bad), "--out", str(files["dir"] / "v")])
    assert code == 1


def test_verify_without_certificate(files):
    code, _, _ = run(["verify", files["two"], "--out", str(files["dir"] / "v")])
    assert code == 2


def test_deterministic_outputs(files):
    digests = []
    for k in range(2):
        out = files["dir"] / f"d{k}"
        run(["factorize", "--class", files["class_e1"], "--map", files["e3"], "--out", str(out)])
        digests.append(json.loads((out / "manifest.json").read_text())["outputs"])
    assert digests[0] == digests[1]


def test_lift_commands(files):
    out = files["dir"] / "l"
    assert run(["lift", "box", "--f", files["e1"], "--g", files["fold"], "--out", str(out)])[0] == 0
    assert result_lines(out)[0] == {"box": True}
    run(["lift", "perp", "--f", files["e1"], "--g", files["fold"], "--out", str(out)])
    assert result_lines(out)[0] == {"perp": False}
    run(["lift", "inj", "--object", files["two"], "--class", files["class_e1"], "--out", str(out)])
    assert result_lines(out)[0] == {"inj": True}
    run(["lift", "ort", "--object", files["two"], "--class", files["class_e1"], "--out", str(out)])
    assert result_lines(out)[0] == {"ort": False}
    code, _, err = run(["lift", "box", "--f", files["e1"], "--out", str(out)])
    assert code == 2 and "--g" in err


def test_colimit_commands(files):
    out = files["dir"] / "c"
    assert run(["colimit", "pushout", files["fold"], files["fold"], "--out", str(out)])[0] == 0
    assert result_lines(out)[0]["apex"]["sets"]["*"] == ["0/x"]
    assert run(["colimit", "pushout", files["fold"], "--out", str(out)])[0] == 2


def test_reflect_commands(files):
    out = files["dir"] / "r"
    assert run(["reflect", "--class", files["class_e1"], "--object", files["empty"], "--out", str(out)])[0] == 0
    assert result_lines(out)[0]["status"] == "Fixpoint"
    assert run(["reflect-ort", "--class", files["class_fold"], "--object", files["three"],
                "--test", files["one"], "--test", files["two"], "--out", str(out)])[0] == 0
    row = result_lines(out)[0]
    assert row["orthogonal"] and row["universal_counts"] == [1]
    assert run(["ofactorize", "--class", files["class_fold"], "--map", files["e3"], "--out", str(out)])[0] == 0
    assert run(["square-corr", "--f", files["e1"], "--g", files["fold"], "--out", str(out)])[0] == 0
    assert result_lines(out)[0]["bijection"] is True


def test_construct_commands(files):
    out = files["dir"] / "k"
    assert run(["construct", "comma", "--F", files["idF"], "--G", files["idF"], "--out", str(out)])[0] == 0
    assert len(result_lines(out)[0]["category"]["objects"]) == 3
    assert run(["construct", "pspb", "--F", files["idF"], "--G", files["idF"], "--out", str(out)])[0] == 0
    assert run(["construct", "inserter", "--F", files["idF"], "--G", files["idF"], "--out", str(out)])[0] == 0
    assert run(["construct", "approx-complete", "--category", files["arrow"], "--diagram", files["idF"],
                "--out", str(out)])[0] == 0
    assert result_lines(out)[0]["verified"] is True


def test_simplicial_commands(tmp_path):
    out = tmp_path / "s"
    assert run(["simplicial", "delta1s", "--window", "4", "--out", str(out)])[0] == 0
    assert result_lines(out)[0]["census"] == [2, 2, 1, 0]
    assert run(["simplicial", "symmetrize", "1", "--window", "3", "--stages", "2", "--out", str(out)])[0] == 0
    row = result_lines(out)[0]
    assert row["status"] == "BudgetExhausted" and row["censuses"][0] == [2, 1, 0]
    assert run(["verify", str(out / "result.jsonl"), "--out", str(tmp_path / "v")])[0] == 0


def test_builtin_category_reference(tmp_path):
    X = delta(1, 3)
    path = tmp_path / "d1.json"
    path.write_text(dumps(presheaf_json(X)))
    doc = read_json(path)
    assert doc["base"] == {"builtin": "ordinals", "window": 4}
    assert Loader(tmp_path).presheaf(str(path)) == X


def test_formal_presheaf_file(tmp_path):
    shape = {"objects": ["s", "t"],
             "morphisms": [["id_s", "s", "s"], ["id_t", "t", "t"], ["f", "s", "t"], ["g", "s", "t"]],
             "identities": {"s": "id_s", "t": "id_t"},
             "compose": [["id_s", "id_s", "id_s"], ["id_t", "id_t", "id_t"], ["f", "id_s", "f"], ["g", "id_s", "g"],
                         ["id_t", "f", "f"], ["id_t", "g", "g"]]}
    doc = {"base": {"builtin": "ordinals", "window": 4}, "shape": shape, "labels": {"s": "2", "t": "3"},
           "morphism_labels": {"f": "2>3:0,2", "g": "2>3:0,0"}}
    X = Loader(tmp_path).presheaf(doc)
    assert X.sizes.tolist() == delta_1s(3)[0].sizes.tolist()


def test_certificate_roundtrip_in_memory():
    one = constant_set("x")
    three = constant_set("pqr")
    cert = factorize(from_empty(three), MorphismClassSource([from_empty(one)]))
    doc = json.loads(dumps(certificate_json(cert)))
    rep = verify_certificate(doc)
    assert rep == {"factorization": True, "cellular": True, "right_class": True, "ok": True}
    _, j = delta_1s(3)
    cert = factorize(to_terminal(delta(1, 3)), MorphismClassSource([j]))
    assert verify_certificate(json.loads(dumps(certificate_json(cert))))["ok"]


def test_write_atomic_digest(tmp_path):
    d = write_atomic(tmp_path / "x" / "y.txt", "hello\n")
    assert d == sha256_file(tmp_path / "x" / "y.txt")
    assert not list((tmp_path / "x").glob("*.tmp"))
