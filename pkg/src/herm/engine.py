"""Simulated-annealing search over formalization choices.

A state picks one candidate formula per sentence, a set of active pool
postulates and one admissible logic per argument. The objective rewards
logically correct arguments, adequate sentence formalizations and an
argument network whose intended attack and support edges are realized.
"""
from __future__ import annotations

import itertools
import json
import math
import random
from dataclasses import dataclass, field, replace

from .adequacy import REJECTED, Formalization, aggregate, ambitiousness, reliability
from .argnet import role_fulfillment
from .corpus import CorpusDocument, Postulate
from .correctness import Argument, check_correctness
from .embedding import FRAME_CONDITIONS, K
from .errors import HermError
from .reasoner import Budget, Reasoner, Sat, Unsat, Valid
from .terms import NamedFormula, symbol_count

MOVE_KINDS = ("swap-candidate", "toggle-postulate", "switch-logic", "toggle-frame", "toggle-domain")
MAX_REPROPOSALS = 10


@dataclass(frozen=True)
class EngineConfig:
    w_valid: float = 1.0
    w_consistent: float = 0.5
    w_noncircular: float = 0.25
    w_noidle: float = 0.25
    w_adequacy: float = 1.0
    w_net: float = 1.0
    lam: float = 0.5
    w_a: float = 1.0
    w_s: float = 0.05
    strict: bool = False
    t0: float = 1.0
    alpha: float = 0.99
    iters: int = 500
    stagnation: int = 200
    seed: int = 0
    promote_min: int = 2
    promote_min_gain: float = 0.0
    budget: Budget = field(default_factory=Budget)

    def __post_init__(self):
        if self.t0 <= 0:
            raise HermError("t0 must be positive")
        if not 0 < self.alpha < 1:
            raise HermError("alpha must lie strictly between 0 and 1")
        if self.stagnation < 1:
            raise HermError("stagnation window must be at least 1")
        if self.iters < 0:
            raise HermError("iteration budget must be non-negative")


@dataclass(frozen=True)
class Assignment:
    choice: tuple  # ((sentence, candidate label), ...) in document order
    active: tuple  # active pool postulate labels, in document order
    logics: tuple  # ((argument, LogicSpec), ...) in document order

    def candidate(self, sid: str) -> str:
        return dict(self.choice)[sid]

    def logic(self, aid: str):
        return dict(self.logics)[aid]

    def to_dict(self) -> dict:
        return {
            "formalizations": dict(self.choice),
            "active_postulates": list(self.active),
            "logics": {a: s.describe() for a, s in self.logics},
        }


@dataclass(frozen=True)
class Move:
    kind: str
    target: str
    value: object = None

    def describe(self) -> str:
        if self.kind == "toggle-postulate" or self.kind == "toggle-domain":
            return f"{self.kind}({self.target})"
        v = self.value.describe() if hasattr(self.value, "describe") else self.value
        return f"{self.kind}({self.target}, {v})"


@dataclass
class Evaluation:
    total: float
    breakdown: dict
    structural: bool
    correctness: dict  # argument id -> CorrectnessReport
    adequacy: dict  # sentence id -> row dict
    network: object  # RoleReport | None


@dataclass
class EngineState:
    assignment: Assignment
    evaluation: Evaluation
    iteration: int
    best: Assignment | None
    best_evaluation: Evaluation | None


@dataclass
class RunResult:
    state: EngineState
    trace: list
    termination: str
    promoted: list
    revalidated: bool | None
    unrealizable: list
    stats: dict

    @property
    def best(self) -> Assignment:
        return self.state.best or self.state.assignment


# ---------------------------------------------------------------------------
# inputs


def pool(doc: CorpusDocument) -> list:
    return [p for p in doc.postulates.values() if p.status == "candidate"]


def settled(doc: CorpusDocument) -> list:
    return [p for p in doc.postulates.values() if p.status == "settled"]


def check_inputs(doc: CorpusDocument) -> None:
    empty = [s.id for s in doc.sentences.values() if not s.candidates]
    if empty:
        raise HermError(f"sentences with an empty candidate pool: {', '.join(empty)}")
    for a in doc.arguments.values():
        if not a.logics:
            raise HermError(f"argument {a.id} has no admissible logic")


def bootstrap(doc: CorpusDocument) -> Assignment:
    """First candidate per sentence, first admissible logic, pool postulates as marked."""
    check_inputs(doc)
    return Assignment(
        tuple((s.id, s.candidates[0].label) for s in doc.sentences.values()),
        tuple(p.label for p in pool(doc) if p.active),
        tuple((a.id, a.logics[0]) for a in doc.arguments.values()),
    )


# ---------------------------------------------------------------------------
# objective


class Evaluator:
    def __init__(self, doc: CorpusDocument, config: EngineConfig, reasoner: Reasoner | None = None):
        check_inputs(doc)
        self.doc = doc
        self.config = config
        self.reasoner = reasoner or Reasoner(config.budget)
        self.corpus = doc.corpus()
        self.counts = {
            s.id: {c.label: symbol_count(c.term) for c in s.candidates} for s in doc.sentences.values()
        }
        self._memo: dict = {}

    def theory(self, a: Assignment) -> list:
        active = set(a.active)
        return [NamedFormula(p.label, "meaning-postulate", p.term)
                for p in self.doc.postulates.values() if p.status == "settled" or p.label in active]

    def fmap(self, a: Assignment) -> dict:
        return {sid: Formalization(self.doc.candidate(lbl).term, K) for sid, lbl in a.choice}

    def arguments(self, a: Assignment) -> dict:
        out = {}
        for entry in self.doc.arguments.values():
            prem = [NamedFormula(s, "premise", self.doc.candidate(a.candidate(s)).term) for s in entry.premises]
            concl = NamedFormula(entry.conclusion, "conclusion",
                                 self.doc.candidate(a.candidate(entry.conclusion)).term)
            out[entry.id] = Argument(entry.id, prem, concl, a.logic(entry.id), list(entry.postulates))
        return out

    def consistent_theory(self, a: Assignment) -> bool:
        """False when the active postulates are refuted in some logic in use."""
        th = [f.term for f in self.theory(a)]
        if not th:
            return True
        specs = {}
        for _, s in a.logics:
            specs.setdefault(s.key(), s)
        for s in (specs.values() or [K]):
            if isinstance(self.reasoner.consistent(th, s), Unsat):
                return False
        return True

    def evaluate(self, a: Assignment) -> Evaluation:
        if a in self._memo:
            return self._memo[a]
        ev = self._evaluate(a)
        self._memo[a] = ev
        return ev

    def _evaluate(self, a: Assignment) -> Evaluation:
        cfg, r = self.config, self.reasoner
        theory = self.theory(a)
        args = self.arguments(a)
        arg_specs = {aid: a.logic(aid) for aid in args}

        correctness, corr_total, all_pass = {}, 0.0, True
        for aid, entry in self.doc.arguments.items():
            if entry.tag != "correct":
                continue
            rep = check_correctness(args[aid], theory, r)
            correctness[aid] = rep
            corr_total += (
                cfg.w_valid * isinstance(rep.validity, Valid)
                + cfg.w_consistent * isinstance(rep.consistency, Sat)
                + cfg.w_noncircular * (rep.circular == "no")
                + cfg.w_noidle * (not rep.idle_premises and not rep.idle_unknown)
            )
            all_pass = all_pass and rep.passed

        fmap = self.fmap(a)
        adequacy, adq_total, rejected = {}, 0.0, False
        th_terms = [f.term for f in theory]
        for sid, lbl in a.choice:
            rel, bad = reliability(sid, fmap, self.corpus, th_terms, r, arg_specs, cfg.strict)
            amb, ok = ambitiousness(sid, fmap, self.corpus, th_terms, r, arg_specs)
            counts = self.counts[sid]
            agg = aggregate(rel, amb, counts[lbl], min(counts.values()), max(counts.values()), cfg.w_a, cfg.w_s)
            adequacy[sid] = {"candidate": lbl, "reliable": rel, "ambitiousness": amb,
                             "simplicity": counts[lbl], "aggregate": agg, "violations": list(bad)}
            if agg == REJECTED:
                rejected = True
            else:
                adq_total += agg

        net, net_score, net_ok = self.doc.network, 0.0, True
        report = None
        if net is not None and net.edges:
            report = role_fulfillment(net, args, theory, r, cfg.lam)
            net_score = report.score
            net_ok = not report.unrealized() and not report.spurious

        breakdown = {
            "correctness": corr_total,
            "adequacy": adq_total,
            "network": net_score,
            "rejected": rejected,
        }
        if rejected:
            total = -math.inf
        else:
            total = corr_total + cfg.w_adequacy * adq_total + cfg.w_net * net_score
        structural = all_pass and net_ok and not rejected
        return Evaluation(total, breakdown, structural, correctness, adequacy, report)


def objective(a: Assignment, doc: CorpusDocument, config: EngineConfig | None = None,
              reasoner: Reasoner | None = None) -> Evaluation:
    return Evaluator(doc, config or EngineConfig(), reasoner).evaluate(a)


# ---------------------------------------------------------------------------
# moves


def legal_moves(a: Assignment, doc: CorpusDocument) -> dict:
    """Legal moves grouped by kind, each list in a fixed order."""
    out = {k: [] for k in MOVE_KINDS}
    for sid, cur in a.choice:
        for c in doc.sentences[sid].candidates:
            if c.label != cur:
                out["swap-candidate"].append(Move("swap-candidate", sid, c.label))
    for p in pool(doc):
        out["toggle-postulate"].append(Move("toggle-postulate", p.label))
    for aid, spec in a.logics:
        admissible = doc.arguments[aid].logics
        for s in admissible:
            if s != spec:
                out["switch-logic"].append(Move("switch-logic", aid, s))
        for cond in FRAME_CONDITIONS:
            t = spec.toggled(cond)
            if t in admissible:
                out["toggle-frame"].append(Move("toggle-frame", aid, cond))
        flipped = spec.with_domain("actualist" if spec.domain == "constant" else "constant")
        if flipped in admissible:
            out["toggle-domain"].append(Move("toggle-domain", aid))
    return {k: v for k, v in out.items() if v}


def apply_move(a: Assignment, m: Move, doc: CorpusDocument) -> Assignment:
    if m.kind == "swap-candidate":
        return replace(a, choice=tuple((s, m.value if s == m.target else c) for s, c in a.choice))
    if m.kind == "toggle-postulate":
        active = set(a.active) ^ {m.target}
        return replace(a, active=tuple(p.label for p in pool(doc) if p.label in active))

    def pick(spec):
        for s in doc.arguments[m.target].logics:
            if s == spec:
                return s
        raise HermError(f"{m.describe()} leaves the admissible logics")

    cur = a.logic(m.target)
    if m.kind == "switch-logic":
        new = pick(m.value)
    elif m.kind == "toggle-frame":
        new = pick(cur.toggled(m.value))
    elif m.kind == "toggle-domain":
        new = pick(cur.with_domain("actualist" if cur.domain == "constant" else "constant"))
    else:
        raise HermError(f"unknown move kind {m.kind}")
    return replace(a, logics=tuple((x, new if x == m.target else s) for x, s in a.logics))


def propose_move(a: Assignment, doc: CorpusDocument, rng: random.Random) -> Move | None:
    """Uniform over kinds with a legal move, then uniform within the kind."""
    moves = legal_moves(a, doc)
    if not moves:
        return None
    kind = rng.choice(sorted(moves, key=MOVE_KINDS.index))
    return rng.choice(moves[kind])


def accept_probability(delta: float, temperature: float) -> float:
    if math.isnan(delta) or delta >= 0:
        return 1.0
    if delta == -math.inf:
        return 0.0
    return math.exp(delta / temperature)


# ---------------------------------------------------------------------------
# the run


def _num(x: float):
    if x == -math.inf:
        return "-inf"
    return round(x, 9)


def run(doc: CorpusDocument, config: EngineConfig | None = None, reasoner: Reasoner | None = None,
        start: Assignment | None = None) -> RunResult:
    cfg = config or EngineConfig()
    ev = Evaluator(doc, cfg, reasoner)
    rng = random.Random(cfg.seed)
    cur = start or bootstrap(doc)
    cur_ev = ev.evaluate(cur)
    finite = cur_ev.total > -math.inf
    state = EngineState(cur, cur_ev, 0, cur if finite else None, cur_ev if finite else None)
    trace: list = []
    termination = "budget"
    if state.best_evaluation is not None and state.best_evaluation.structural:
        termination = "satisfied"
    stale = 0
    for i in range(cfg.iters):
        if termination != "budget":
            break
        temperature = cfg.t0 * cfg.alpha ** i
        move, rejected = None, 0
        while True:
            move = propose_move(state.assignment, doc, rng)
            if move is None or move.kind != "toggle-postulate" or move.target in state.assignment.active:
                break
            if ev.consistent_theory(apply_move(state.assignment, move, doc)):
                break
            rejected += 1
            move = None
            if rejected >= MAX_REPROPOSALS:
                break
        u = rng.random()
        record = {"iter": i + 1, "temperature": _num(temperature), "rejected_proposals": rejected}
        if move is None and rejected == 0:
            termination = "fixpoint"
            break
        if move is None:
            record.update(move=None, candidate=None, delta=None, accepted=False)
        else:
            new = apply_move(state.assignment, move, doc)
            new_ev = ev.evaluate(new)
            old = state.evaluation.total
            if new_ev.total == -math.inf and old == -math.inf:
                delta = 0.0
            else:
                delta = new_ev.total - old
            accepted = u < accept_probability(delta, temperature)
            record.update(move=move.describe(), candidate=_num(new_ev.total), delta=_num(delta), accepted=accepted)
            if accepted:
                state.assignment, state.evaluation = new, new_ev
        state.iteration = i + 1
        cur_total = state.evaluation.total
        best_total = state.best_evaluation.total if state.best_evaluation else -math.inf
        if cur_total > best_total:
            state.best, state.best_evaluation = state.assignment, state.evaluation
            stale = 0
        else:
            stale += 1
        record.update(current=_num(state.evaluation.total),
                      best=_num(state.best_evaluation.total) if state.best_evaluation else "-inf")
        trace.append(record)
        if state.best_evaluation is not None and state.best_evaluation.structural:
            termination = "satisfied"
        elif stale >= cfg.stagnation:
            termination = "stagnation"

    best = state.best or state.assignment
    best_ev = state.best_evaluation or state.evaluation
    revalidated = None
    if best_ev.structural:
        revalidated = revalidate(best, doc, cfg)
    promoted = promote(best, best_ev, doc, cfg, ev)
    unrealizable = [s.edge for s in best_ev.network.intended if not s.realized] if best_ev.network else []
    return RunResult(state, trace, termination, promoted, revalidated, unrealizable, ev.reasoner.stats())


def revalidate(a: Assignment, doc: CorpusDocument, cfg: EngineConfig) -> bool:
    """Re-check a structural maximum with a fresh, uncached reasoner."""
    fresh = Evaluator(doc, cfg, Reasoner(cfg.budget, cache=False))
    e = fresh.evaluate(a)
    if not e.structural:
        return False
    if e.network is not None and e.network.score != 1.0:
        return False
    return all(rep.passed for rep in e.correctness.values())


def participates(label: str, a: Assignment, ev: Evaluator, evaluation: Evaluation) -> list:
    """Passing arguments whose validity depends on the postulate."""
    theory = ev.theory(a)
    without = [f.term for f in theory if f.label != label]
    args = ev.arguments(a)
    out = []
    for aid, rep in evaluation.correctness.items():
        if not rep.passed:
            continue
        arg = args[aid]
        v = ev.reasoner.entails([p.term for p in arg.premises] + without, arg.conclusion.term, arg.spec)
        if not isinstance(v, Valid):
            out.append(aid)
    return out


def promote(a: Assignment, evaluation: Evaluation, doc: CorpusDocument, cfg: EngineConfig,
            ev: Evaluator) -> list:
    """Active pool postulates used by >= promote_min passing arguments whose removal hurts."""
    out = []
    for label in a.active:
        users = participates(label, a, ev, evaluation)
        if len(users) < cfg.promote_min:
            continue
        without = replace(a, active=tuple(x for x in a.active if x != label))
        if ev.evaluate(without).total < evaluation.total - cfg.promote_min_gain:
            out.append({"label": label, "arguments": users})
    return out


def final_document(doc: CorpusDocument, result: RunResult) -> CorpusDocument:
    """The input document rewritten to the best state, promoted postulates settled."""
    best = result.best
    promoted = {p["label"] for p in result.promoted}
    sentences = {}
    for sid, s in doc.sentences.items():
        chosen = best.candidate(sid)
        sentences[sid] = replace(s, candidates=sorted(s.candidates, key=lambda c: c.label != chosen))
    arguments = {}
    for aid, arg in doc.arguments.items():
        spec = best.logic(aid)
        arguments[aid] = replace(arg, logics=tuple(sorted(arg.logics, key=lambda s: s != spec)))
    postulates = {}
    for label, p in doc.postulates.items():
        if label in promoted:
            postulates[label] = Postulate(p.label, p.source, p.term, "settled", True)
        elif p.status == "candidate":
            postulates[label] = replace(p, active=label in best.active)
        else:
            postulates[label] = p
    return replace(doc, sentences=sentences, arguments=arguments, postulates=postulates)


def trace_lines(trace: list) -> str:
    return "".join(json.dumps(r, sort_keys=True) + "\n" for r in trace)


def structural_maxima(doc: CorpusDocument, config: EngineConfig | None = None,
                      reasoner: Reasoner | None = None) -> list:
    """Every assignment reaching the structural maximum, found by exhaustive search.

    Arguments are checked one at a time so that only candidate combinations
    under which every correct argument passes reach the network check.
    """
    cfg = config or EngineConfig()
    ev = Evaluator(doc, cfg, reasoner)
    labels = [p.label for p in pool(doc)]
    sids = list(doc.sentences)
    logic_choices = [[(aid, s) for s in arg.logics] for aid, arg in doc.arguments.items()]
    out = []
    for mask in itertools.product((False, True), repeat=len(labels)):
        active = tuple(lbl for lbl, on in zip(labels, mask) if on)
        for logics in itertools.product(*logic_choices):
            partial = [{}]
            for aid, entry in doc.arguments.items():
                if entry.tag != "correct":
                    continue
                needed = list(dict.fromkeys(list(entry.premises) + [entry.conclusion]))
                grown = []
                for base in partial:
                    free = [s for s in needed if s not in base]
                    options = [[c.label for c in doc.sentences[s].candidates] for s in free]
                    for pick in itertools.product(*options):
                        choice = {**base, **dict(zip(free, pick))}
                        full = {s: choice.get(s, doc.sentences[s].candidates[0].label) for s in sids}
                        a = Assignment(tuple((s, full[s]) for s in sids), active, tuple(logics))
                        arg = ev.arguments(a)[aid]
                        if check_correctness(arg, ev.theory(a), ev.reasoner).passed:
                            grown.append(choice)
                partial = grown
                if not partial:
                    break
            for choice in partial:
                free = [s for s in sids if s not in choice]
                options = [[c.label for c in doc.sentences[s].candidates] for s in free]
                for pick in itertools.product(*options):
                    full = {**choice, **dict(zip(free, pick))}
                    a = Assignment(tuple((s, full[s]) for s in sids), active, tuple(logics))
                    if ev.evaluate(a).structural:
                        out.append(a)
    return out
