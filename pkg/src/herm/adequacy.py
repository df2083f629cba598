"""Scoring candidate formalizations of sentences against a tagged corpus.

A formalization of a sentence is reliable when no argument tagged
incorrect that uses the sentence becomes valid, and it is the more
ambitious the more correct-tagged arguments it renders valid.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .embedding import LogicSpec
from .errors import HermError
from .reasoner import Reasoner, Unknown, Valid
from .terms import App, Const, Lam, Term, head_args, symbol_count

REJECTED = -math.inf
W_AMBITION = 1.0
W_SIMPLICITY = 0.05


@dataclass(frozen=True)
class CorpusArgument:
    id: str
    premises: tuple  # sentence ids
    conclusion: str
    tag: str  # correct | incorrect

    def sentences(self) -> tuple:
        return tuple(self.premises) + (self.conclusion,)


@dataclass
class Corpus:
    sentences: dict  # id -> text
    arguments: dict  # id -> CorpusArgument

    def __post_init__(self):
        for a in self.arguments.values():
            if a.tag not in ("correct", "incorrect"):
                raise HermError(f"argument {a.id}: tag must be correct or incorrect")
            for s in a.sentences():
                if s not in self.sentences:
                    raise HermError(f"argument {a.id} refers to unknown sentence {s}")

    def containing(self, sid: str, tag: str) -> list:
        return [a for a in self.arguments.values() if a.tag == tag and sid in a.sentences()]


@dataclass(frozen=True)
class Formalization:
    term: Term
    spec: LogicSpec


@dataclass
class AdequacyScore:
    sentence: str
    candidate: str
    reliable: str  # yes | no | unknown
    ambitiousness: float
    simplicity: int
    aggregate: float
    validated: tuple = ()
    violations: tuple = ()

    def to_dict(self) -> dict:
        return {
            "sentence": self.sentence,
            "candidate": self.candidate,
            "reliable": self.reliable,
            "ambitiousness": self.ambitiousness,
            "simplicity": self.simplicity,
            "aggregate": None if self.aggregate == REJECTED else round(self.aggregate, 6),
            "validated": list(self.validated),
            "violations": list(self.violations),
        }


def _instance(arg: CorpusArgument, fmap: dict, arg_specs: dict | None, focus: str):
    missing = [s for s in arg.sentences() if s not in fmap]
    if missing:
        raise HermError(f"argument {arg.id} needs a formalization of {', '.join(missing)}")
    spec = (arg_specs or {}).get(arg.id) or fmap[focus].spec
    return [fmap[s].term for s in arg.premises], fmap[arg.conclusion].term, spec


def argument_verdict(arg: CorpusArgument, fmap: dict, theory, reasoner: Reasoner,
                     arg_specs: dict | None = None, focus: str | None = None):
    prem, concl, spec = _instance(arg, fmap, arg_specs, focus or arg.conclusion)
    return reasoner.entails(prem + list(theory), concl, spec)


def reliability(sid: str, fmap: dict, corpus: Corpus, theory=(), reasoner: Reasoner | None = None,
                arg_specs: dict | None = None, strict: bool = False):
    """("yes" | "no" | "unknown", ids of incorrect arguments made valid)."""
    r = reasoner or Reasoner()
    violations, unsure = [], False
    for arg in corpus.containing(sid, "incorrect"):
        v = argument_verdict(arg, fmap, theory, r, arg_specs, sid)
        if isinstance(v, Valid):
            violations.append(arg.id)
        elif isinstance(v, Unknown):
            unsure = True
    if violations:
        return "no", tuple(violations)
    return ("unknown" if (unsure and strict) else "yes"), ()


def ambitiousness(sid: str, fmap: dict, corpus: Corpus, theory=(), reasoner: Reasoner | None = None,
                  arg_specs: dict | None = None):
    """(fraction of correct arguments containing sid that are valid, their ids)."""
    r = reasoner or Reasoner()
    relevant = corpus.containing(sid, "correct")
    if not relevant:
        return 1.0, ()
    ok = tuple(a.id for a in relevant
               if isinstance(argument_verdict(a, fmap, theory, r, arg_specs, sid), Valid))
    return len(ok) / len(relevant), ok


def aggregate(reliable: str, ambition: float, simplicity: int, min_count: int, max_count: int,
              w_a: float = W_AMBITION, w_s: float = W_SIMPLICITY) -> float:
    """w_a * ambitiousness minus w_s times the candidate's excess symbol count.

    The excess is measured from the simplest candidate for the sentence and
    normalized by the largest count, so the simplest candidate pays nothing.
    """
    if reliable == "no":
        return REJECTED
    norm = (simplicity - min_count) / max_count if max_count else 0.0
    return w_a * ambition - w_s * norm


def score_candidates(sid: str, candidates: dict, fmap: dict, corpus: Corpus, theory=(),
                     reasoner: Reasoner | None = None, arg_specs: dict | None = None,
                     strict: bool = False, w_a: float = W_AMBITION, w_s: float = W_SIMPLICITY) -> list:
    """Score every candidate (label -> Formalization) for sid, holding the rest of fmap fixed."""
    r = reasoner or Reasoner()
    counts = {label: symbol_count(f.term) for label, f in candidates.items()}
    lo, hi = (min(counts.values()), max(counts.values())) if counts else (0, 0)
    out = []
    for label, f in candidates.items():
        local = {**fmap, sid: f}
        rel, bad = reliability(sid, local, corpus, theory, r, arg_specs, strict)
        amb, ok = ambitiousness(sid, local, corpus, theory, r, arg_specs)
        agg = aggregate(rel, amb, counts[label], lo, hi, w_a, w_s)
        out.append(AdequacyScore(sid, label, rel, amb, counts[label], agg, ok, bad))
    return out


# ---------------------------------------------------------------------------
# grammatical similarity (weight 0 in the default objective)


_CONNECTIVES = {n: n for n in ("not", "and", "or", "implies", "iff", "box", "dia")}
_CONNECTIVES.update({"m" + n: n for n in ("not", "and", "or", "implies", "iff")})


def _shape(t: Term):
    prefix = []
    while True:
        head, args = head_args(t)
        quant = isinstance(head, Const) and head.name.lstrip("m").startswith(("forall", "exists"))
        if not (quant and args and isinstance(args[0], Lam)):
            break
        prefix.append("A" if "forall" in head.name else "E")
        t = args[0].body
    connectives = Counter()
    stack = [t]
    while stack:
        s = stack.pop()
        if isinstance(s, Const) and s.name in _CONNECTIVES:
            connectives[_CONNECTIVES[s.name]] += 1
        elif isinstance(s, App):
            stack += [s.fn, s.arg]
        elif isinstance(s, Lam):
            stack.append(s.body)
    return "".join(prefix), connectives


def grammatical_distance(a: Term, b: Term) -> int:
    """Quantifier-prefix mismatch plus connective multiset distance."""
    pa, ca = _shape(a)
    pb, cb = _shape(b)
    return int(pa != pb) + sum(((ca - cb) + (cb - ca)).values())
