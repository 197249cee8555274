import hashlib
import json

import pytest

from cloneembed.cli import main
from cloneembed.lattice import m3


@pytest.fixture
def m3_file(tmp_path):
    p = tmp_path / "m3.json"
    p.write_text(json.dumps(m3().to_json()))
    return p


def test_validate_exit_codes(tmp_path, m3_file, capsys):
    assert main(["validate", "--lattice", str(m3_file)]) == 0
    bad = tmp_path / "vee.json"
    bad.write_text(json.dumps({"elements": ["bot", "a", "b"], "leq": [[0, 1], [0, 2]]}))
    assert main(["validate", "--lattice", str(bad)]) == 2
    assert "(1, 2)" in capsys.readouterr().err
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    assert main(["validate", "--lattice", str(broken)]) == 3
    assert main(["validate", "--lattice", str(tmp_path / "missing.json")]) == 3
    cyclic = tmp_path / "cyclic.json"
    cyclic.write_text(json.dumps({"elements": ["a", "b"], "leq": [[0, 1], [1, 0]]}))
    assert main(["validate", "--lattice", str(cyclic)]) == 2


def test_build_writes_tables_and_witnesses(tmp_path):
    out = tmp_path / "built"
    assert main(["build", "--lattice", "chain2", "--out", str(out)]) == 0
    gens = json.loads((out / "generators.json").read_text())
    assert len(gens["phi"]) == 2 and len(gens["m"]) == 7
    wit = json.loads((out / "witnesses.json").read_text())
    assert any(w.get("ideal") == "top" and w["p"] == "bot" for w in wit)


def test_verify_chain2_all_suites(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "--lattice", "chain2", "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["schema_version"] == 1 and r["status"] == "PASS"
    assert set(r["suites"]) == {"construction", "lemmas", "when4", "embedding"}
    assert r["manifest"]["bounds"]["budget"] == 200_000


def test_fault_injection_fails_composition(tmp_path):
    out = tmp_path / "r.json"
    code = main(["verify", "--lattice", "chain2", "--suite", "lemmas", "--budget", "20000",
                 "--fault-inject", "phi", "--out", str(out)])
    assert code == 1
    r = json.loads(out.read_text())
    assert "lemmas/composition" in r["failed"]
    comp = next(s for s in r["suites"]["lemmas"] if s["name"] == "composition")
    assert comp["counterexample"]["generator"]


def test_tiny_budget_is_inconclusive_not_failing(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "--lattice", "chain2", "--budget", "1", "--out", str(out)]) == 0
    r = json.loads(out.read_text())
    assert r["status"] == "INCONCLUSIVE" and r["inconclusive"] and not r["failed"]


def test_reports_are_byte_identical(tmp_path):
    outs = [tmp_path / "a.json", tmp_path / "b.json"]
    for o in outs:
        assert main(["verify", "--lattice", "one", "--out", str(o)]) == 0
    digest = [hashlib.sha256(o.read_bytes()).hexdigest() for o in outs]
    assert digest[0] == digest[1]


def test_exports(tmp_path):
    js = tmp_path / "g.json"
    assert main(["export", "--lattice", "m3", "--format", "json", "--out", str(js)]) == 0
    data = json.loads(js.read_text())
    assert [d["p"] for d in data["phi"]] == [0, 1, 2, 3, 4]
    dot = tmp_path / "h.dot"
    assert main(["export", "--lattice", "m3", "--format", "dot", "--depth", "2", "--out", str(dot)]) == 0
    text = dot.read_text()
    assert text.count("digraph") == 2 and "{bot,a}" in text


def test_enumerate_jsonl(tmp_path, capsys):
    out = tmp_path / "e.jsonl"
    assert main(["enumerate", "--lattice", "chain2", "--arity", "1", "--depth", "2", "--jsonl", str(out)]) == 0
    rows = [json.loads(line) for line in out.read_text().splitlines()]
    assert rows[0]["term"] == "x1" and all(len(r["table_sha256"]) == 16 for r in rows)
    summary = json.loads(capsys.readouterr().out)
    assert summary["members"] == len(rows)
    assert main(["enumerate", "--lattice", "m3", "--arity", "2", "--depth", "2", "--ideal", "a"]) == 0


def test_independent_family_too_large_is_an_input_error():
    assert main(["build", "--lattice", "m3", "--family", "independent", "--out", "/tmp/never"]) == 3
