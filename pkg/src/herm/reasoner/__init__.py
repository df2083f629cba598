"""Certified entailment and consistency checks for embedded modal formulas.

Every question is put to two procedures: the finite model finder looks
for a countermodel (or a model, for consistency), and the labelled
tableau looks for a closed proof. Either certificate is re-checked
before it is reported; when neither procedure settles the question the
verdict is Unknown.
"""
from __future__ import annotations

import os
import threading
import time
from dataclasses import dataclass, field

from ..embedding import LogicSpec, K, embed, frame_axioms, validize
from ..errors import BudgetExhausted, EmbeddingError, HermError, OutsideFragment
from ..terms import (
    ACC,
    AUX_TYPES,
    DESIGNATED,
    Base,
    NamedFormula,
    Not,
    Term,
    canonical,
    constants_of,
    LOGICAL_NAMES,
)
from . import tableau
from .finder import find_model as _find_model
from .semantics import FiniteModel, evaluate, holds, world_model

BUDGET_ENV = "HERM_BUDGET"


@dataclass(frozen=True)
class Budget:
    max_world_count: int = 3
    max_individual_count: int = 2
    max_tableau_depth: int = 8
    timeout_ms: int = 10_000

    def __post_init__(self):
        for name in ("max_world_count", "max_individual_count", "max_tableau_depth", "timeout_ms"):
            if getattr(self, name) < 1:
                raise HermError(f"budget field {name} must be positive")

    def key(self) -> tuple:
        return (self.max_world_count, self.max_individual_count, self.max_tableau_depth, self.timeout_ms)

    @classmethod
    def from_env(cls, **overrides) -> "Budget":
        """Defaults, then HERM_BUDGET ("worlds=4,individuals=2,depth=8,timeout=5000"), then overrides."""
        fields = {}
        raw = os.environ.get(BUDGET_ENV, "")
        names = {"worlds": "max_world_count", "individuals": "max_individual_count",
                 "depth": "max_tableau_depth", "timeout": "timeout_ms"}
        for part in filter(None, (p.strip() for p in raw.split(","))):
            key, _, value = part.partition("=")
            if key not in names:
                raise HermError(f"{BUDGET_ENV}: unknown key {key!r}")
            try:
                fields[names[key]] = int(value)
            except ValueError:
                raise HermError(f"{BUDGET_ENV}: {key} needs an integer") from None
        fields.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**fields)


# ---------------------------------------------------------------------------
# verdicts


@dataclass(frozen=True)
class Valid:
    proof: dict
    problem: object = field(default=None, compare=False, repr=False)
    kind = "valid"

    def replay(self) -> bool:
        return tableau.replay(self.proof, self.problem)


@dataclass(frozen=True)
class Invalid:
    model: FiniteModel
    kind = "invalid"


@dataclass(frozen=True)
class Unknown:
    reason: str
    kind = "unknown"


@dataclass(frozen=True)
class Sat:
    model: FiniteModel
    kind = "sat"


@dataclass(frozen=True)
class Unsat:
    proof: dict
    problem: object = field(default=None, compare=False, repr=False)
    kind = "unsat"

    def replay(self) -> bool:
        return tableau.replay(self.proof, self.problem)


def _formula(x) -> tuple[Term, LogicSpec | None]:
    if isinstance(x, NamedFormula):
        return x.term, None
    if hasattr(x, "hol_term") and hasattr(x, "source"):
        return x.source, x.spec
    if isinstance(x, Term):
        return x, None
    raise HermError(f"not a formula: {x!r}")


def _unify_spec(items, spec: LogicSpec | None) -> tuple[list[Term], LogicSpec]:
    terms = []
    seen = set()
    for x in items:
        t, s = _formula(x)
        terms.append(t)
        if s is not None:
            seen.add(s)
    if spec is not None:
        seen.add(spec)
    if len(seen) > 1:
        raise EmbeddingError("formulas embedded under different logics: "
                             + ", ".join(sorted(s.describe() for s in seen)))
    return terms, (seen.pop() if seen else K)


# ---------------------------------------------------------------------------
# problem construction


def _hol(t: Term, spec: LogicSpec) -> Term:
    return validize(embed(t, spec).hol_term, spec.validity)


def _types_of(terms) -> dict:
    out = {}
    for t in terms:
        for c in constants_of(t):
            if c.name not in LOGICAL_NAMES:
                out[c.name] = c.ty
    return out


def build_problem(premises, conclusion, spec: LogicSpec):
    """HOL formulas for the model finder and the tableau problem."""
    hol = [_hol(p, spec) for p in premises]
    frames = [f.term for f in frame_axioms(spec)]
    goal = [Not(_hol(conclusion, spec))] if conclusion is not None else []
    all_hol = hol + frames + goal

    types = _types_of(all_hol)
    types.setdefault(ACC, AUX_TYPES[ACC])
    if spec.validity == "local":
        types.setdefault(DESIGNATED, AUX_TYPES[DESIGNATED])
    incomplete = []

    def tr(t, pos):
        try:
            return tableau.translate(t, pos)
        except OutsideFragment as exc:
            incomplete.append(f"outside-decidable-fragment: {exc}")
            return None

    nnf_prem = [f for f in (tr(p, True) for p in premises) if f is not None]
    nnf_goal = []
    if conclusion is not None:
        g = tr(conclusion, False)
        if g is not None:
            nnf_goal.append(g)
    if spec.validity == "global":
        root, glob = list(nnf_goal), nnf_prem
    else:
        root, glob = nnf_prem + nnf_goal, []
    universe: dict[str, list] = {}
    for name, ty in sorted(types.items()):
        if isinstance(ty, Base) and ty.name not in ("o", "w"):
            universe.setdefault(ty.name, []).append(name)

    def verify(model: FiniteModel) -> bool:
        return all(holds(f, model) for f in all_hol)

    problem = tableau.Problem(
        root=list(dict.fromkeys(root)),
        glob=list(dict.fromkeys(glob)),
        frame=spec.frame,
        types=types,
        universe=universe,
        verify=verify,
        incomplete=incomplete,
        local=spec.validity == "local",
    )
    return all_hol, problem


# ---------------------------------------------------------------------------
# the reasoner


class Reasoner:
    """Entailment and consistency with a thread-safe verdict cache."""

    def __init__(self, budget: Budget | None = None, cache: bool = True):
        self.budget = budget or Budget()
        self.use_cache = cache
        self._cache: dict = {}
        self._lock = threading.Lock()
        self.queries = 0
        self.cache_hits = 0
        self.unknowns = 0

    def stats(self) -> dict:
        return {"queries": self.queries, "cache_hits": self.cache_hits, "unknown": self.unknowns}

    def _key(self, kind, premises, conclusion, spec, budget):
        prem = tuple(repr(canonical(p)) for p in premises)
        concl = repr(canonical(conclusion)) if conclusion is not None else None
        return (kind, prem, concl, spec.key(), budget.key())

    def _cached(self, key, compute):
        with self._lock:
            self.queries += 1
            if self.use_cache and key in self._cache:
                self.cache_hits += 1
                return self._cache[key]
        result = compute()
        with self._lock:
            if isinstance(result, Unknown):
                self.unknowns += 1
            if self.use_cache:
                self._cache.setdefault(key, result)
                result = self._cache[key]
        return result

    def entails(self, premises, conclusion, spec: LogicSpec | None = None,
                budget: Budget | None = None):
        """Valid(proof) | Invalid(countermodel) | Unknown(reason)."""
        budget = budget or self.budget
        terms, spec = _unify_spec(list(premises) + [conclusion], spec)
        premises, conclusion = _ordered(terms[:-1]), terms[-1]
        key = self._key("entails", premises, conclusion, spec, budget)
        return self._cached(key, lambda: self._decide(premises, conclusion, spec, budget))

    def consistent(self, formulas, spec: LogicSpec | None = None, budget: Budget | None = None):
        """Sat(model) | Unsat(proof) | Unknown(reason)."""
        budget = budget or self.budget
        formulas, spec = _unify_spec(list(formulas), spec)
        formulas = _ordered(formulas)
        key = self._key("consistent", formulas, None, spec, budget)

        def compute():
            v = self._decide(formulas, None, spec, budget)
            if isinstance(v, Invalid):
                return Sat(v.model)
            if isinstance(v, Valid):
                return Unsat(v.proof, v.problem)
            return v

        return self._cached(key, compute)

    def find_model(self, formulas, budget: Budget | None = None, signature=None):
        budget = budget or self.budget
        return _find_model(formulas, budget.max_world_count, budget.max_individual_count,
                           budget.timeout_ms, signature)

    def _decide(self, premises, conclusion, spec, budget):
        deadline = time.monotonic() + budget.timeout_ms / 1000.0
        all_hol, problem = build_problem(premises, conclusion, spec)
        timed_out = False
        try:
            remaining = max(1, int((deadline - time.monotonic()) * 1000))
            model = _find_model(all_hol, budget.max_world_count, budget.max_individual_count, remaining)
        except BudgetExhausted:
            model, timed_out = None, True
        except OutsideFragment:
            model = None
        if model is not None:
            return Invalid(_complete(model, problem.types))
        result = tableau.prove(problem, budget.max_tableau_depth, deadline)
        if result.status == "closed":
            return Valid(result.proof, problem)
        if result.status == "open":
            if _within(result.model, budget):
                return Invalid(_complete(result.model, problem.types))
            return Unknown("budget-exhausted: the only model found exceeds the size caps")
        reason = result.reason
        if timed_out and not reason.startswith("budget"):
            reason = "budget-exhausted: model search timed out; " + reason
        return Unknown(reason)


def _ordered(terms) -> list:
    """Deduplicate up to alpha-beta-eta and sort, so verdicts do not depend on input order."""
    keyed = {}
    for t in terms:
        keyed.setdefault(repr(canonical(t)), t)
    return [keyed[k] for k in sorted(keyed)]


def _within(model: FiniteModel, budget: Budget) -> bool:
    return all(
        n <= (budget.max_world_count if ty == "w" else budget.max_individual_count)
        for ty, n in model.sizes.items()
    )


def _complete(model: FiniteModel, types: dict) -> FiniteModel:
    from .semantics import default_table

    interp = dict(model.interp)
    all_types = {**model.types, **types}
    for name, ty in all_types.items():
        if name not in interp:
            interp[name] = default_table(ty, model)
    return FiniteModel(dict(model.sizes), interp, all_types)


_default = Reasoner()


def entails(premises, conclusion, spec: LogicSpec | None = None, budget: Budget | None = None):
    return _default.entails(premises, conclusion, spec, budget)


def consistent(formulas, spec: LogicSpec | None = None, budget: Budget | None = None):
    return _default.consistent(formulas, spec, budget)


def find_model(formulas, budget: Budget | None = None, signature=None):
    return _default.find_model(formulas, budget, signature)


def check_countermodel(model: FiniteModel, premises, conclusion, spec: LogicSpec) -> bool:
    """Independent re-check: premises and frame conditions hold, conclusion fails."""
    all_hol, _ = build_problem(premises, conclusion, spec)
    return all(holds(f, model) for f in all_hol)


__all__ = [
    "Budget",
    "Valid",
    "Invalid",
    "Unknown",
    "Sat",
    "Unsat",
    "Reasoner",
    "entails",
    "consistent",
    "find_model",
    "evaluate",
    "holds",
    "world_model",
    "check_countermodel",
]
