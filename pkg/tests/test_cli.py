import json

import pytest

from seqtop.cli import BAD_INPUT, FAILED, OK, UNDECIDED, main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def files(tmp_path, capsys):
    paths = {}
    for fid in ("sierpinski", "three-point-crust", "cascade-order2", "example-A1", "removed-point"):
        p = tmp_path / f"{fid}.json"
        assert run(capsys, "gen", fid, "--out", str(p), "--manifest", str(tmp_path / f"{fid}.manifest.json"))[0] == OK
        paths[fid] = p
    return paths


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(p)


def test_refine_sierpinski_is_discrete(files, capsys):
    code, out, _ = run(capsys, "refine", "--in", str(files["sierpinski"]), "--D", "p")
    doc = json.loads(out)
    assert code == OK
    assert sorted(map(sorted, doc["refinement"])) == [[], ["p"], ["p", "q"], ["q"]]
    assert doc["chain_holds"] and doc["refinement_equals_starred_topology"]


def test_order_cascade(files, capsys):
    code, out, _ = run(capsys, "order", "--in", str(files["cascade-order2"]), "--format", "text")
    assert (code, out.strip()) == (OK, "KthOrder(2)")


def test_order_of_topology_is_first(files, capsys):
    code, out, _ = run(capsys, "order", "--in", str(files["three-point-crust"]))
    assert code == OK and json.loads(out) == {"order": "FirstOrder"}


def test_report_a1(files, capsys):
    code, out, _ = run(capsys, "report", "--in", str(files["example-A1"]))
    rep = json.loads(out)
    assert code == OK
    assert rep["checks"]["separation_chr"] and rep["checks"]["separation_star"] == []


def test_report_output_is_stable(files, capsys, tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    run(capsys, "report", "--in", str(files["removed-point"]), "--out", str(a))
    run(capsys, "report", "--in", str(files["removed-point"]), "--out", str(b))
    assert a.read_bytes() == b.read_bytes()


def test_gen_writes_manifest(files, tmp_path):
    manifest = json.loads((tmp_path / "example-A1.manifest.json").read_text())
    assert manifest["fixture"] == "example-A1" and manifest["claims"]


def test_gen_param_out_of_range(capsys):
    code, _, err = run(capsys, "gen", "example-A3", "--param", "k=5")
    assert code == BAD_INPUT and "k=2" in err


def test_complete_json_and_dot(files, capsys):
    code, out, _ = run(capsys, "complete", "--in", str(files["removed-point"]))
    assert code == OK and [p["name"] for p in json.loads(out)["pairs"] if p["kind"] == "boundary"] == ["(P,F)"]
    code, out, _ = run(capsys, "complete", "--in", str(files["removed-point"]), "--format", "dot")
    assert out.startswith("digraph completion")


def test_export_dot(files, capsys):
    code, out, _ = run(capsys, "export-dot", "--in", str(files["sierpinski"]))
    assert code == OK and '"q" -> "p";' in out


def test_validate_failures(tmp_path, capsys):
    bad_op = write(tmp_path, "op.json", {"points": ["a", "b"], "table": {"a": ["a"], "b": ["b"], "a,b": ["a", "b"]}})
    assert run(capsys, "validate", "--in", bad_op)[0] == FAILED
    cyc = write(tmp_path, "m.json", {"core": ["a", "b", "c"], "rel": {"core": [["a", "b"], ["b", "c"]]}})
    assert run(capsys, "validate", "--in", cyc)[0] == FAILED


def test_undecided_designation(tmp_path, capsys):
    doc = {"families": ["c"], "rel": {"family_family": [{"f": "c", "g": "c", "pred": "m<n"}]},
           "tips": [{"name": "Pk", "range": "k>=1", "fams": {"c": "n<k"}}]}
    code, out, _ = run(capsys, "validate", "--in", write(tmp_path, "u.json", doc))
    assert code in (UNDECIDED, FAILED)
    d = json.loads(out)["designations"][0]
    # the set is the proper past of c(k), so terminality fails before indecomposability matters
    assert code == FAILED and d["proper_of"]


@pytest.mark.parametrize("doc,fragment", [
    ('{"points": ["a"], "opens": [[]]', "line 1"),
    ({"points": ["a", "b"], "opens": [[], ["a"], ["b"]]}, "opens must contain"),
    ({"core": ["a"], "rel": {"core": [["a", "zz"]]}}, "rel.core[0]"),
    ({"points": ["p", "q"], "opens": [[], ["p"], ["p", "q"]], "D": ["q"]}, "not open"),
    ({"nothing": 1}, "cannot tell"),
])
def test_schema_errors_exit_2(tmp_path, capsys, doc, fragment):
    code, _, err = run(capsys, "validate", "--in", write(tmp_path, "x.json", doc))
    assert code == BAD_INPUT and fragment in err


def test_missing_input(capsys):
    code, _, err = run(capsys, "refine")
    assert code == BAD_INPUT and "--in" in err


def test_suite_respects_enumeration_cap(capsys, monkeypatch):
    monkeypatch.setenv("SEQTOP_MAX_ENUM", "3")
    code, _, err = run(capsys, "suite", "--max-points", "4")
    assert code == BAD_INPUT and "SEQTOP_MAX_ENUM" in err
    code, out, _ = run(capsys, "suite", "--max-points", "3", "--format", "text")
    assert code == OK and out.count("PASS") == 3
