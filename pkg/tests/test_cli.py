from __future__ import annotations

import io
import json
from importlib import resources
from pathlib import Path

import jsonschema
import pytest

from fibalg import catalog
from fibalg.cli import main, run

ROOT = Path(__file__).resolve().parents[1]
SCHEMA = json.loads(resources.files("fibalg").joinpath("schemas", "report.v1.json").read_text())


def report(argv, code=0):
    got, r = run(argv)
    assert got == code, r.payload
    doc = r.as_dict()
    jsonschema.validate(doc, SCHEMA)
    json.dumps(doc)
    return doc["payload"]


def test_schema_mirror_matches():
    assert json.loads((ROOT / "schemas" / "v1" / "report.json").read_text()) == SCHEMA
    jsonschema.Draft202012Validator.check_schema(SCHEMA)


@pytest.mark.parametrize("name", catalog.names())
def test_catalog_files_are_golden(name):
    assert catalog.text(name) == catalog.render(name)
    assert catalog.load(name) == catalog.build(name)


@pytest.mark.parametrize("name", catalog.names())
def test_emit_then_check(name, monkeypatch, capsys):
    assert main(["examples", "emit", name]) == 0
    emitted = capsys.readouterr().out
    monkeypatch.setattr("sys.stdin", io.StringIO(emitted))
    assert main(["check", "-"]) == 0


def test_check_chain3():
    p = report(["check", "examples/chain3.fib"])
    assert p["diagnostics"] == [] and p["entities"] == [{"name": "chain3", "kind": "category"}]


def test_recognize_codomain():
    p = report(["recognize", "--fibration", "codomain2", "examples/codomain2.fib", "--json"])
    assert p["pruned"] is True and p["is_em"] is False
    assert (p["source_objects"], p["target_objects"]) == (3, 2)


def test_recognize_writer_and_coreader():
    p = report(["recognize", "--fibration", "writer_chain3", "writer_chain3.fib"])
    assert p["pruned"] and p["is_em"]
    p = report(["recognize", "--fibration", "coreader_bool4", "coreader_bool4.fib"])
    assert p["dual"] and p["is_em"]


def test_semidirect_iso():
    p = report(["semidirect", "--action", "z2_on_z3_inv", "examples/groups.fib"])
    assert p["order"] == 6 and p["iso_to"] == "S3" and not p["direct_product"]
    p = report(["semidirect", "--action", "triv_Z2_Z3", "groups.fib"])
    assert p["direct_product"] and p["trivial_action"]


def test_total_and_compare_hat():
    p = report(["total", "--param", "writer_chain3", "--flavor", "em", "writer_chain3.fib"])
    assert p["object_count"] == 6
    assert sorted(tuple(o["data"][:2]) for o in p["objects"]) == [
        ("c0", "c0"), ("c0", "c1"), ("c0", "c2"), ("c1", "c1"), ("c1", "c2"), ("c2", "c2")
    ]
    p = report(["compare-hat", "--param", "writer_chain3", "writer_chain3.fib"])
    assert p["equivalence"] and p["hom_counts_match"] and p["total_objects"] == p["hat_objects"] == 6


def test_reindex():
    p = report(["reindex", "--param", "writer_chain3", "--along", "c0_c2", "--algebra", "c2:c2:id_c2", "writer_chain3.fib"])
    assert p["result"]["data"] == ["c0", "c2", "id_c2"]
    p = report(["reindex", "--param", "writer_chain3", "--along", "c0_c2", "--algebra", "c2:c0:id_c0", "writer_chain3.fib"], 3)
    assert p["witness"]


def test_verify_fib():
    report(["verify-fib", "--total", "codomain2", "codomain2.fib"])
    p = report(["verify-fib", "--total", "points_splitepi", "points_splitepi.fib"], 3)
    assert "no cartesian lift" in p["message"] and p["witness"]


def test_limits_and_coproduct():
    p = report(["limits", "--total", "writer_chain3", "--diagram", "pair", "writer_chain3.fib"])
    assert p["checked"] == p["agreed"] > 0
    p = report(["coproduct", "--total", "writer_chain3", "--left", "c0:c1:id_c1", "--right", "c1:c1:id_c1", "writer_chain3.fib"])
    assert p["agrees"] and p["coproduct"]["data"] == ["c1", "c1", "id_c1"]


def test_swindle():
    p = report(["swindle", "--alpha", "alpha", "--algebra", "c0:id_c0", "swindle_chain3.fib"])
    assert p["stabilized_at"] == 2 and p["result"]["carrier"] == "c2" and p["bijection"]
    p = report(["swindle", "--alpha", "alpha", "--algebra", "c0:id_c0", "--cap", "1", "swindle_chain3.fib"], 4)
    assert "did not stabilize" in p["message"]


def test_examples_list():
    p = report(["examples", "list"])
    assert [e["name"] for e in p["examples"]] == catalog.names()


@pytest.mark.parametrize(
    "argv, code",
    [
        (["bogus"], 1),
        (["check"], 1),
        (["check", "missing.fib"], 1),
        (["total", "--param", "nope", "writer_chain3.fib"], 1),
        (["total", "--param", "chain3", "chain3.fib"], 1),
    ],
)
def test_usage_errors(argv, code):
    p = report(argv, code)
    assert p["message"]


def test_parse_and_law_failures(tmp_path):
    bad = tmp_path / "bad.fib"
    bad.write_text("category C { objects: a; morphisms: f : a -> q; }")
    p = report(["check", str(bad)], 2)
    assert p["diagnostics"][0]["severity"] == "reference"
    bad.write_text("category C { objects: a; morphisms: f : a -> a; }")
    p = report(["check", str(bad)], 3)
    assert p["diagnostics"][0]["code"] == "incomplete-table"


def test_human_output(capsys):
    assert main(["semidirect", "--action", "z2_on_z3_inv", "groups.fib"]) == 0
    out = capsys.readouterr().out
    assert "order 6" in out and "S3" in out
    assert main(["check", "missing.fib"]) == 1
    assert "no such file" in capsys.readouterr().err


def test_json_output(capsys):
    assert main(["recognize", "--fibration", "codomain2", "codomain2.fib", "--json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["status"] == "ok" and doc["payload"]["is_em"] is False
