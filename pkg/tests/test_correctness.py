from __future__ import annotations

import pytest

from herm.correctness import Argument, certificate_id, check_correctness
from herm.embedding import K, LogicSpec
from herm.errors import HermError
from herm.parser import parse_formula
from herm.reasoner import Budget, Reasoner
from herm.terms import NamedFormula

from conftest import prop_sig, suite_cases

SIG = prop_sig("p", "q", "r")
CASES = suite_cases()


def nf(label, src, role="premise"):
    return NamedFormula(label, role, parse_formula(src, SIG))


@pytest.mark.parametrize("arg,theory,expected", CASES, ids=[c[0].id for c in CASES])
def test_annotated_suite(arg, theory, expected):
    report = check_correctness(arg, theory, Reasoner()).to_dict()
    assert {k: report[k] for k in expected} == expected


def test_suite_covers_every_failure_mode():
    seen = set()
    for _, _, e in CASES:
        seen |= {k for k, bad in (("invalid", e["validity"] == "invalid"),
                                   ("inconsistent", e["consistency"] == "unsat"),
                                   ("circular", e["circular"] == "yes"),
                                   ("idle", bool(e["idle_premises"]))) if bad}
    assert seen == {"invalid", "inconsistent", "circular", "idle"}
    assert len(CASES) == 12


def test_circularity_check_can_be_switched_off():
    arg = Argument("c", [nf("a", "p & q"), nf("b", "r")], nf("c", "q & p", "conclusion"))
    report = check_correctness(arg, circularity=False)
    assert report.circular == "no"
    assert report.idle_premises == ["b"]


def test_theory_is_never_idle():
    arg = Argument("t", [nf("a", "p"), nf("b", "r")], nf("c", "q & r", "conclusion"))
    theory = [nf("mp", "p => q", "meaning-postulate"), nf("extra", "r => r", "meaning-postulate")]
    report = check_correctness(arg, theory)
    assert report.passed and report.idle_premises == []


def test_unknown_verdicts_do_not_pass():
    spec = LogicSpec.preset("S4", validity="local")
    arg = Argument("u", [nf("a", "dia p"), nf("b", "q")], nf("c", "box dia p", "conclusion"), spec)
    report = check_correctness(arg, reasoner=Reasoner(Budget(max_world_count=1)))
    assert (report.validity.kind, report.circular, report.idle_unknown) == ("unknown", "unknown", ["b"])
    assert report.overall == "unknown"
    # with room for a second world the countermodel appears
    assert check_correctness(arg, reasoner=Reasoner()).overall == "fail"


def test_argument_rejects_label_clashes():
    with pytest.raises(HermError):
        Argument("x", [nf("a", "p"), nf("a", "q")], nf("c", "p", "conclusion"), K)
    with pytest.raises(HermError):
        Argument("x", [nf("a", "p")], nf("a", "p", "conclusion"), K)


def test_certificate_ids_are_stable():
    arg = Argument("m", [nf("a", "p"), nf("b", "p => q")], nf("c", "q", "conclusion"))
    one = check_correctness(arg, reasoner=Reasoner())
    two = check_correctness(arg, reasoner=Reasoner())
    assert certificate_id(one.validity) == certificate_id(two.validity)
    assert certificate_id(one.validity).startswith("v-")
    assert certificate_id(one.consistency).startswith("s-")
