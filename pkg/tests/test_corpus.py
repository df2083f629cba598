from __future__ import annotations

import json

import pytest

from herm.corpus import SCHEMA_VERSION, dumps, load, logic_from_json, logic_to_json, parse_text, save
from herm.embedding import LogicSpec
from herm.errors import CorpusError

from conftest import FIXTURES, HERM_FIXTURES


def _toy_raw():
    return json.loads((FIXTURES / "toy.herm").read_text())


def _errors(raw, origin="doc.herm"):
    text = raw if isinstance(raw, str) else json.dumps(raw)
    with pytest.raises(CorpusError) as err:
        parse_text(text, origin)
    return err.value.errors


@pytest.mark.parametrize("name", HERM_FIXTURES)
def test_fixtures_round_trip_byte_for_byte(name, tmp_path):
    doc = load(FIXTURES / name)
    text = dumps(doc)
    assert dumps(parse_text(text)) == text
    save(doc, tmp_path / name)
    assert (tmp_path / name).read_text() == text
    assert json.loads(text)["schema"] == SCHEMA_VERSION


def test_missing_sentence_is_reported_with_pointer():
    raw = _toy_raw()
    raw["arguments"]["a1"]["premises"].append("ghost")
    assert _errors(raw) == ["doc.herm#/arguments/a1/premises/2: unknown sentence 'ghost'"]


def test_duplicate_label_is_reported_with_both_locations():
    raw = _toy_raw()
    raw["sentences"]["n_swims"]["candidates"][0]["label"] = "n_fish_lit"
    (msg,) = _errors(raw)
    assert msg.startswith("doc.herm#/sentences/n_swims/candidates/0: duplicate formula label 'n_fish_lit'")
    assert "#/sentences/n_fish/candidates/0" in msg


def test_all_problems_are_collected_at_once():
    raw = _toy_raw()
    raw["arguments"]["a1"]["premises"].append("ghost")
    raw["sentences"]["n_sea"]["candidates"][0]["formula"] = "sea @ shark"
    errors = _errors(raw)
    assert len(errors) == 2
    assert any("unknown constant 'shark'" in e for e in errors)


def test_schema_violations_and_malformed_json():
    errors = _errors('{"schema": "herm/2", "sentences": 3}', "y")
    assert "y#/schema: 'herm/1' was expected" in errors
    assert "y#/sentences: 3 is not of type 'object'" in errors
    assert _errors('{"schema": "herm/1", "schema": "herm/1"}', "y") == ["y: duplicate key 'schema'"]
    (msg,) = _errors("{nope", "y")
    assert msg.startswith("y:1:2: invalid JSON")


def test_network_and_argument_integrity():
    raw = _toy_raw()
    raw["network"]["edges"].append({"from": "a1", "to": "a1", "polarity": "attack"})
    raw["arguments"]["a2"]["premises"].append("n_sea_not_fish")
    errors = _errors(raw)
    assert any("#/network/edges/2" in e for e in errors)
    assert any("#/arguments/a2" in e for e in errors)


def test_missing_file():
    with pytest.raises(CorpusError, match="cannot read"):
        load(FIXTURES / "absent.herm")


def test_logic_json_forms():
    assert logic_from_json("S4") == LogicSpec.preset("S4")
    spec = logic_from_json({"frame": ["reflexive", "symmetric"], "domain": "actualist", "validity": "local"})
    assert spec.frame == frozenset({"reflexive", "symmetric"})
    assert logic_from_json(logic_to_json(spec)) == spec
    assert logic_to_json(LogicSpec.preset("T")) == "T"


def test_document_accessors(toy):
    assert toy.candidate("n_fish_dia").source == "dia (fish @ nemo)"
    corpus = toy.corpus()
    assert corpus.arguments["i1"].tag == "incorrect"
    assert [a.id for a in corpus.containing("n_sea", "correct")] == ["a2"]
