"""Logical correctness of a single formalized argument."""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from .embedding import K, LogicSpec
from .errors import HermError
from .reasoner import Invalid, Reasoner, Sat, Unknown, Unsat, Valid
from .terms import NamedFormula, equivalent


@dataclass
class Argument:
    id: str
    premises: list  # of NamedFormula
    conclusion: NamedFormula
    spec: LogicSpec = K
    postulates: list = field(default_factory=list)  # labels into the shared theory

    def __post_init__(self):
        labels = [p.label for p in self.premises]
        if len(set(labels)) != len(labels):
            raise HermError(f"argument {self.id}: duplicate premise labels")
        if self.conclusion.label in labels:
            raise HermError(f"argument {self.id}: conclusion label {self.conclusion.label} is also a premise")


def certificate_id(verdict) -> str | None:
    """Short content hash of a verdict's certificate (None when it has none)."""
    if isinstance(verdict, (Valid, Unsat)):
        payload = repr(verdict.proof)
    elif isinstance(verdict, (Invalid, Sat)):
        payload = json.dumps(verdict.model.to_dict(), sort_keys=True)
    else:
        return None
    return verdict.kind[0] + "-" + hashlib.sha256(payload.encode()).hexdigest()[:12]


@dataclass
class CorrectnessReport:
    argument: str
    validity: object
    consistency: object
    circular: str  # yes | no | unknown
    circular_premise: str | None
    idle_premises: list
    idle_unknown: list
    overall: str  # pass | fail | unknown

    def to_dict(self) -> dict:
        return {
            "argument": self.argument,
            "validity": self.validity.kind,
            "validity_certificate": certificate_id(self.validity),
            "consistency": self.consistency.kind,
            "consistency_certificate": certificate_id(self.consistency),
            "circular": self.circular,
            "circular_premise": self.circular_premise,
            "idle_premises": list(self.idle_premises),
            "idle_unknown": list(self.idle_unknown),
            "overall": self.overall,
        }

    @property
    def passed(self) -> bool:
        return self.overall == "pass"


def _terms(formulas) -> list:
    return [f.term if isinstance(f, NamedFormula) else f for f in formulas]


def check_correctness(arg: Argument, theory=(), reasoner: Reasoner | None = None,
                      circularity: bool = True) -> CorrectnessReport:
    """Validity, consistency, circularity and idle premises of one argument.

    `theory` holds the meaning postulates in force; they are added to the
    premises for every check but are never reported as idle.
    """
    r = reasoner or Reasoner()
    spec = arg.spec
    th = _terms(theory)
    prem = _terms(arg.premises)
    concl = arg.conclusion.term

    validity = r.entails(prem + th, concl, spec)
    consistency = r.consistent(prem + th, spec)

    circular, offender = "no", None
    if circularity:
        for p in arg.premises:
            if equivalent(p.term, concl):
                circular, offender = "yes", p.label
                break
        if circular == "no":
            unsure = False
            for p in arg.premises:
                v = r.entails([p.term] + th, concl, spec)
                if isinstance(v, Valid):
                    circular, offender = "yes", p.label
                    break
                unsure = unsure or isinstance(v, Unknown)
            if circular == "no" and unsure:
                circular = "unknown"

    idle, idle_unknown = [], []
    for i, p in enumerate(arg.premises):
        rest = prem[:i] + prem[i + 1:]
        v = r.entails(rest + th, concl, spec)
        if isinstance(v, Valid):
            idle.append(p.label)
        elif isinstance(v, Unknown):
            idle_unknown.append(p.label)

    failed = (
        isinstance(validity, Invalid)
        or isinstance(consistency, Unsat)
        or circular == "yes"
        or bool(idle)
    )
    passed = (
        isinstance(validity, Valid)
        and isinstance(consistency, Sat)
        and circular == "no"
        and not idle
        and not idle_unknown
    )
    overall = "fail" if failed else ("pass" if passed else "unknown")
    return CorrectnessReport(arg.id, validity, consistency, circular, offender, idle, idle_unknown, overall)
