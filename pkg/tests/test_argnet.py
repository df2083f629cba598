from __future__ import annotations

import pytest

from herm.argnet import (
    ArgumentNetwork,
    Edge,
    attack_graph,
    grounded_extension,
    preferred_extensions,
    realized_relations,
    role_fulfillment,
    to_dot,
)
from herm.correctness import Argument
from herm.errors import HermError
from herm.parser import parse_formula
from herm.reasoner import Reasoner
from herm.terms import NamedFormula

from conftest import prop_sig

SIG = prop_sig("p", "q", "r", "s")


def arg(aid, premises, conclusion):
    prem = [NamedFormula(f"{aid}_{i}", "premise", parse_formula(src, SIG)) for i, src in enumerate(premises)]
    return Argument(aid, prem, NamedFormula(f"{aid}_c", "conclusion", parse_formula(conclusion, SIG)))


ARGS = {
    "a": arg("a", ["p", "p => ~ q"], "~ q"),
    "b": arg("b", ["q", "q => r"], "r"),
    "c": arg("c", ["s", "s => q"], "q"),
}


def test_mechanisms():
    r = Reasoner()
    rels = realized_relations(ARGS["a"], ARGS["b"], reasoner=r)
    # ~q also entails q => r vacuously, so a endorses b's second premise
    assert [(x.mechanism, x.target) for x in rels] == [("rebut", "b_0"), ("undermine", None), ("endorse", "b_1")]
    rels = realized_relations(ARGS["c"], ARGS["b"], reasoner=r)
    assert [(x.polarity, x.mechanism, x.target) for x in rels] == [("support", "endorse", "b_0")]
    assert realized_relations(ARGS["b"], ARGS["a"], reasoner=r) == []


def test_role_fulfillment_counts_realized_and_spurious_edges():
    net = ArgumentNetwork(["a", "b", "c"], [Edge("a", "b", "attack"), Edge("c", "b", "support")])
    report = role_fulfillment(net, ARGS)
    spurious = sorted({(x.src, x.dst, x.polarity) for x in report.spurious})
    assert spurious == [("a", "b", "support"), ("a", "c", "attack"), ("c", "a", "attack")]
    assert report.score == pytest.approx((2 - 0.5 * 3) / 2)
    assert report.unrealized() == []
    assert role_fulfillment(net, ARGS, lam=0.0).score == 1.0
    assert role_fulfillment(net, ARGS, lam=2.0).score == 0.0


def test_unrealized_edge_is_reported():
    net = ArgumentNetwork(["a", "b"], [Edge("b", "a", "attack")])
    report = role_fulfillment(net, ARGS)
    assert report.unrealized() == [Edge("b", "a", "attack")]
    assert report.score == 0.0
    assert "style=dashed" in to_dot(net, report)


def test_empty_network():
    report = role_fulfillment(ArgumentNetwork(["a"]), ARGS)
    assert report.empty_network and report.score == 1.0


def test_network_validation():
    with pytest.raises(HermError):
        Edge("a", "a", "attack")
    with pytest.raises(HermError):
        Edge("a", "b", "rebut")
    with pytest.raises(HermError):
        ArgumentNetwork(["a"], [Edge("a", "b", "attack")])
    with pytest.raises(HermError):
        ArgumentNetwork(["a", "b"], [Edge("a", "b", "attack"), Edge("a", "b", "attack")])
    with pytest.raises(HermError, match="without a formalized"):
        role_fulfillment(ArgumentNetwork(["a", "zz"]), ARGS)


def test_dung_semantics():
    attacks = {("a", "b"), ("b", "c")}
    assert grounded_extension(["a", "b", "c"], attacks) == ["a", "c"]
    mutual = {("a", "b"), ("b", "a")}
    assert grounded_extension(["a", "b"], mutual) == []
    assert preferred_extensions(["a", "b"], mutual) == [["a"], ["b"]]
    report = role_fulfillment(ArgumentNetwork(["a", "b", "c"]), ARGS)
    assert ("a", "b") in attack_graph(report.relations)
