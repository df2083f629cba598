from __future__ import annotations

import itertools

import pytest

from herm.embedding import FRAME_CONDITIONS, PRESETS, K, LogicSpec, embed, frame_axioms, signature_for, validize
from herm.errors import EmbeddingError
from herm.parser import parse, parse_formula
from herm.printer import show
from herm.reasoner.semantics import evaluate, world_model
from herm.terms import E, O, WO, W, arrow

from conftest import prop_sig

SIG = prop_sig("p", "q")
SIG.declare("fish", "e>w>o")
SIG.declare("nemo", "e")


def test_presets_and_toggles():
    assert LogicSpec.preset("S4").frame == frozenset({"reflexive", "transitive"})
    assert LogicSpec.preset("T").toggled("transitive") == LogicSpec.preset("S4")
    assert LogicSpec.preset("K").describe() == "K"
    assert LogicSpec.preset("K", validity="local").describe() == "K[local]"
    assert LogicSpec.preset("T", "actualist").to_dict()["domain"] == "actualist"
    with pytest.raises(EmbeddingError):
        LogicSpec.preset("GL")
    with pytest.raises(EmbeddingError):
        LogicSpec(frozenset({"dense"}))
    assert set(PRESETS) == {"K", "T", "KB", "S4", "S5"}


def test_frame_axioms_follow_conditions():
    for spec_name, frame in PRESETS.items():
        labels = [f.label for f in frame_axioms(LogicSpec.preset(spec_name))]
        assert labels == [f"frame_{c}" for c in FRAME_CONDITIONS if c in frame]


def test_embedding_produces_truth_sets_and_aux_signature():
    t = parse_formula("box (fish @ nemo)", SIG)
    e = embed(t, LogicSpec.preset("T", validity="local"))
    assert e.hol_term.ty == WO
    assert set(e.aux_signature) == {"acc", "w0"}
    printed = show(e.hol_term)
    assert parse(printed, signature_for(SIG, e.spec)).ty == WO


def test_world_independent_formulas_are_lifted():
    sig = prop_sig("p")
    sig.declare("b", "o")
    e = embed(parse_formula("b", sig), K)
    assert e.hol_term.ty == WO


def test_actualist_quantifier_requires_actualist_policy():
    t = parse_formula("?A [X:e]: fish @ X", SIG)
    with pytest.raises(EmbeddingError, match="actualist"):
        embed(t, K)
    assert "existsAt" in embed(t, K.with_domain("actualist")).aux_signature


def test_validize_modes():
    e = embed(parse_formula("p", SIG), K)
    assert validize(e.hol_term, "global").ty == O
    assert validize(e.hol_term, "local").ty == O
    with pytest.raises(EmbeddingError):
        validize(e.hol_term, "somewhere")


def _all_models(n):
    cells = [(u, v) for u in range(n) for v in range(n)]
    for bits in itertools.product((False, True), repeat=len(cells)):
        acc = {c for c, b in zip(cells, bits) if b}
        for vp in itertools.product((False, True), repeat=n):
            yield world_model(n, acc, {"p": {w for w in range(n) if vp[w]}, "q": set()})


def test_box_is_dual_of_dia_on_all_small_models():
    box = embed(parse_formula("box p", SIG), K).hol_term
    dual = embed(parse_formula("~ dia ~ p", SIG), K).hol_term
    for n in (1, 2):
        for m in _all_models(n):
            assert evaluate(box, m) == evaluate(dual, m)


def test_actualist_matches_possibilist_when_everything_exists():
    spec = K.with_domain("actualist")
    act = embed(parse_formula("!A [X:e]: dia (fish @ X)", SIG), spec).hol_term
    pos = embed(parse_formula("! [X:e]: dia (fish @ X)", SIG), spec).hol_term
    ty = arrow(E, W, O)
    everywhere = ((True, True), (True, True))
    for fish in itertools.product((False, True), repeat=4):
        table = ((fish[0], fish[1]), (fish[2], fish[3]))
        m = world_model(2, {(0, 1), (1, 1)}, {}, extra={"fish": (ty, table), "existsAt": (ty, everywhere)},
                        n_individuals=2)
        assert evaluate(act, m) == evaluate(pos, m)
