"""One test per acceptance criterion; each prints a PASS/FAIL line.

Run directly (``python3 tests/test_acceptance.py``) for just the table.
"""

from __future__ import annotations

import io
import json
import time

import pytest

from deskcat import cli
from deskcat.corpus import CRITERIA, CriterionResult

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []


def report(res: CriterionResult) -> None:
    line = res.line()
    print(line)
    ACCEPTANCE_LINES.append(line)


@pytest.mark.parametrize("check", CRITERIA, ids=[f"criterion_{i + 1}" for i in range(len(CRITERIA))])
def test_criterion(check):
    t0 = time.perf_counter()
    res = check()
    elapsed = time.perf_counter() - t0
    if res.number == 1:
        res.stats["under_60s"] = elapsed < 60
        res.passed = res.passed and elapsed < 60
    report(res)
    assert res.passed, res.line()


def test_criterion_7_determinism(tmp_path):
    digests, blobs = [], []
    for k in range(2):
        out = tmp_path / f"run{k}"
        code = cli.run(["corpus", "run", "--out", str(out)], stdout=io.StringIO(), stderr=io.StringIO())
        assert code == 0
        manifest = json.loads((out / "manifest.json").read_text())
        digests.append(manifest["outputs"]["summary.jsonl"])
        blobs.append((out / "summary.jsonl").read_bytes())
    passed = digests[0] == digests[1] and blobs[0] == blobs[1]
    report(CriterionResult(7, "determinism", passed, {"sha256": digests[0][:16]}))
    assert passed


if __name__ == "__main__":
    for check in CRITERIA:
        print(check().line())
