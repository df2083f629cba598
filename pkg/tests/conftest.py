from __future__ import annotations

import json
from pathlib import Path

import pytest

from herm.corpus import load, logic_from_json
from herm.correctness import Argument
from herm.parser import parse_formula
from herm.reasoner import Budget, Reasoner
from herm.terms import NamedFormula, Signature

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"
HERM_FIXTURES = sorted(p.name for p in FIXTURES.glob("*.herm"))


def fixture_path(name: str) -> Path:
    return FIXTURES / name


@pytest.fixture
def toy():
    return load(FIXTURES / "toy.herm")


@pytest.fixture
def reasoner():
    return Reasoner(Budget())


def prop_sig(*names: str) -> Signature:
    return Signature(constants={n: "w>o" for n in names})


def suite_cases():
    """The annotated correctness suite as (Argument, theory, expected) triples."""
    raw = json.loads((FIXTURES / "correctness_suite.json").read_text())
    sig = Signature(constants=raw["signature"])
    out = []
    for a in raw["arguments"]:
        prem = [NamedFormula(lbl, "premise", parse_formula(src, sig)) for lbl, src in a["premises"]]
        concl = NamedFormula("c", "conclusion", parse_formula(a["conclusion"], sig))
        theory = [NamedFormula(f"t{i}", "meaning-postulate", parse_formula(src, sig))
                  for i, src in enumerate(a.get("theory", []))]
        out.append((Argument(a["id"], prem, concl, logic_from_json(a["logic"])), theory, a["expected"]))
    return out


# ---------------------------------------------------------------------------
# one summary line per acceptance criterion

_CRITERIA: dict = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    name = item.name
    if not name.startswith("test_criterion_"):
        return
    number = int(name.split("_")[2])
    title = (item.function.__doc__ or name).strip().splitlines()[0]
    if rep.when == "call" or (rep.when == "setup" and rep.failed):
        status = "PASS" if rep.passed else "FAIL"
        _CRITERIA[number] = f"criterion {number}: {status}  {title} ({rep.duration:.1f}s)"


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        terminalreporter.write_line(_CRITERIA[number])
