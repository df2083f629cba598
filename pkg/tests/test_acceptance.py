"""Acceptance suite: one test per criterion, summarized at the end of the run."""
from __future__ import annotations

import io
import itertools
import json
import math
import random
import time

from herm.adequacy import REJECTED, Formalization, score_candidates
from herm.argnet import role_fulfillment
from herm.cli import main
from herm.conceptualization import (
    IntensionalStructure,
    OntologicalCommitment,
    Vocabulary,
    intended_models,
    ontology_fit,
)
from herm.corpus import load
from herm.correctness import check_correctness
from herm.embedding import K, LogicSpec, embed
from herm.engine import Evaluator, EngineConfig, bootstrap, run, trace_lines
from herm.parser import parse, parse_formula
from herm.reasoner import Budget, Invalid, Reasoner, Unknown, Valid, check_countermodel
from herm.reasoner.semantics import evaluate, world_model
from herm.terms import E, O, W, Signature, arrow, symbol_count

from conftest import FIXTURES, HERM_FIXTURES, prop_sig, suite_cases
from oracles import ATOMS, countermodel_exists, intended_keys, sample, to_source

ORACLE_BOUNDS = {"K": 3, "T": 3, "KB": 4, "S4": 4, "S5": 5}


def test_criterion_1_prover_oracle_agreement():
    """Tableau verdicts agree with finite-model enumeration on 500 formulas per frame class"""
    start = time.monotonic()
    sig = prop_sig(*ATOMS)
    reasoner = Reasoner(Budget(max_tableau_depth=10))
    conflicts, counts = [], {}
    for cls, bound in ORACLE_BOUNDS.items():
        rng = random.Random(f"criterion-1-{cls}")
        spec = LogicSpec.preset(cls)
        tally = {"valid": 0, "invalid": 0, "unknown": 0}
        for _ in range(500):
            f = sample(rng)
            t = parse_formula(to_source(f), sig)
            v = reasoner.entails([], t, spec)
            tally[v.kind] += 1
            if isinstance(v, Unknown):
                continue
            oracle_invalid = countermodel_exists(f, cls, bound)
            if isinstance(v, Valid) and oracle_invalid:
                conflicts.append((cls, to_source(f), "prover valid, oracle countermodel"))
            if isinstance(v, Invalid):
                if not oracle_invalid:
                    conflicts.append((cls, to_source(f), "prover countermodel, oracle valid"))
                if not check_countermodel(v.model, [], t, spec):
                    conflicts.append((cls, to_source(f), "countermodel does not refute"))
        counts[cls] = tally
    elapsed = time.monotonic() - start
    print(json.dumps(counts), f"{elapsed:.1f}s")
    assert conflicts == []
    # both verdicts occur in every class, so agreement is not vacuous
    assert all(c["valid"] >= 50 and c["invalid"] >= 50 for c in counts.values())
    assert elapsed < 300


CORRESPONDENCE = [
    ("box p => p", "K", "invalid"),
    ("box p => p", "T", "valid"),
    ("p => box dia p", "K", "invalid"),
    ("p => box dia p", "KB", "valid"),
    ("box p => box box p", "S4", "valid"),
    ("dia p => box dia p", "S5", "valid"),
] + [("box (p => q) => (box p => box q)", cls, "valid") for cls in ("K", "T", "KB", "S4", "S5")]


def test_criterion_2_frame_correspondence():
    """Frame-correspondence table with exact verdicts and replaying certificates"""
    start = time.monotonic()
    sig = prop_sig("p", "q")
    reasoner = Reasoner()
    for src, cls, expected in CORRESPONDENCE:
        t = parse_formula(src, sig)
        spec = LogicSpec.preset(cls)
        v = reasoner.entails([], t, spec)
        assert v.kind == expected, (src, cls)
        if isinstance(v, Valid):
            assert v.replay(), (src, cls)
        else:
            assert check_countermodel(v.model, [], t, spec), (src, cls)
    assert time.monotonic() - start < 10


# ---------------------------------------------------------------------------
# criterion 3 helpers: random first-order modal formulas and small models

FO_SIG = Signature(constants={"p": "w>o", "q": "w>o", "f": "e>w>o", "g": "e>w>o", "c": "e"})
EWO = arrow(E, W, O)


def _fo_formula(rng, depth, bound):
    terms = ["c"] + list(bound)
    if depth == 0 or rng.random() < 0.25:
        return ("atom", rng.choice(["p", "q", f"f @ {rng.choice(terms)}", f"g @ {rng.choice(terms)}"]))
    op = rng.choice(["~", "&", "|", "=>", "box", "dia", "all", "some"])
    if op in ("~", "box", "dia"):
        return (op, _fo_formula(rng, depth - 1, bound))
    if op in ("all", "some"):
        v = "XYZ"[len(bound) % 3] + str(len(bound))
        return (op, v, _fo_formula(rng, depth - 1, bound + (v,)))
    return (op, _fo_formula(rng, depth - 1, bound), _fo_formula(rng, depth - 1, bound))


def _render(node, actualist=False):
    op = node[0]
    if op == "atom":
        return node[1]
    if op in ("~", "box", "dia"):
        return f"{op} ({_render(node[1], actualist)})"
    if op in ("all", "some"):
        q = {"all": "!", "some": "?"}[op] + ("A" if actualist else "")
        return f"{q} [{node[1]}:e]: ({_render(node[2], actualist)})"
    return f"({_render(node[1], actualist)}) {op} ({_render(node[2], actualist)})"


def _random_model(rng, everyone_exists):
    nw, ne = rng.randint(1, 3), rng.randint(1, 2)
    acc = {(u, v) for u in range(nw) for v in range(nw) if rng.random() < 0.5}
    val = {a: {w for w in range(nw) if rng.random() < 0.5} for a in ("p", "q")}

    def pred():
        return tuple(tuple(rng.random() < 0.5 for _ in range(nw)) for _ in range(ne))

    exists = tuple(tuple(everyone_exists or rng.random() < 0.5 for _ in range(nw)) for _ in range(ne))
    extra = {"f": (EWO, pred()), "g": (EWO, pred()), "c": (E, rng.randrange(ne)), "existsAt": (EWO, exists)}
    return world_model(nw, acc, val, extra, n_individuals=ne)


def test_criterion_3_embedding_laws():
    """Modal duality and actualist/possibilist coincidence on 200 random formulas"""
    rng = random.Random("criterion-3")
    actualist = K.with_domain("actualist")
    violations, divergent = [], 0
    for _ in range(200):
        node = _fo_formula(rng, 4, ())
        src = _render(node)
        box = embed(parse_formula(f"box ({src})", FO_SIG), K).hol_term
        dual = embed(parse_formula(f"~ (dia (~ ({src})))", FO_SIG), K).hol_term
        poss = embed(parse_formula(src, FO_SIG), actualist).hol_term
        act = embed(parse_formula(_render(node, actualist=True), FO_SIG), actualist).hol_term
        for _ in range(10):
            m = _random_model(rng, everyone_exists=True)
            if evaluate(box, m) != evaluate(dual, m):
                violations.append(("duality", src))
            if evaluate(poss, m) != evaluate(act, m):
                violations.append(("coincidence", src))
        # control: with partial existence the two readings may come apart
        divergent += evaluate(poss, m := _random_model(rng, everyone_exists=False)) != evaluate(act, m)
    assert violations == []
    assert divergent > 0


def test_criterion_4_correctness_suite():
    """Every report field matches the annotated 12-argument suite"""
    cases = suite_cases()
    assert len(cases) == 12
    reasoner = Reasoner()
    mismatches = []
    for arg, theory, expected in cases:
        report = check_correctness(arg, theory, reasoner).to_dict()
        for key, want in expected.items():
            if report[key] != want:
                mismatches.append((arg.id, key, report[key], want))
    assert mismatches == []


def test_criterion_5_intended_models():
    """Intended models match a double-loop oracle on every toy-shaped structure"""
    vocab = Vocabulary(("nemo",), {"fish": 1})
    elapsed = 0.0
    checked = 0
    for n_dom in (1, 2, 3):
        domain = [f"d{i}" for i in range(n_dom)]
        for n_worlds in (1, 2, 3):
            worlds = [f"w{i}" for i in range(n_worlds)]
            subsets = [frozenset((d,) for d, keep in zip(domain, bits) if keep)
                       for bits in itertools.product((False, True), repeat=n_dom)]
            for exts in itertools.product(subsets, repeat=n_worlds):
                table = dict(zip(worlds, exts))
                structure = IntensionalStructure(domain, worlds, {"fish_rel": (1, table)})
                for nemo in domain:
                    K_ = OntologicalCommitment(structure, vocab, {"nemo": nemo}, {"fish": "fish_rel"})
                    t0 = time.monotonic()
                    got = {m.key() for m in intended_models(K_)}
                    elapsed += time.monotonic() - t0
                    want = intended_keys(domain, worlds, {"fish_rel": table}, {"nemo": nemo},
                                         {"fish": "fish_rel"}, {"fish": 1})
                    assert got == want
                    checked += 1
    toy = load(FIXTURES / "toy.herm").conceptualizations["toy"].commitment
    t0 = time.monotonic()
    fit = ontology_fit([parse("~ (fish @ nemo)", toy.vocabulary.signature())], toy)
    elapsed_fit = time.monotonic() - t0
    print(f"{checked} commitments, enumeration {elapsed:.3f}s")
    assert fit.soundness == 0.5
    assert elapsed < 1.0 and elapsed_fit < 1.0


def _recount(sid, label, term, doc, fmap, reasoner, cands):
    """Aggregate score from raw entailment calls, without the scoring module."""
    theory = [p.term for p in doc.postulates.values() if p.status == "settled" or p.active]
    local = {**fmap, sid: term}
    valid_incorrect, valid_correct, n_correct = 0, 0, 0
    for a in doc.arguments.values():
        if sid not in list(a.premises) + [a.conclusion]:
            continue
        v = reasoner.entails([local[s] for s in a.premises] + theory, local[a.conclusion], a.logics[0])
        if a.tag == "incorrect":
            valid_incorrect += isinstance(v, Valid)
        else:
            n_correct += 1
            valid_correct += isinstance(v, Valid)
    if valid_incorrect:
        return REJECTED
    counts = [symbol_count(t) for t in cands.values()]
    amb = valid_correct / n_correct if n_correct else 1.0
    return 1.0 * amb - 0.05 * (symbol_count(term) - min(counts)) / max(counts)


def test_criterion_6_adequacy_recount():
    """Scorer output equals a recount over raw reasoner calls; unreliable readings get -inf"""
    doc = load(FIXTURES / "adequacy.herm")
    sig = doc.signature
    extra = {
        "too_strong": "box (! [X:e]: vert @ X)",
        "everything_vert": "! [X:e]: vert @ X",
        "fish_are_vert_now": "! [X:e]: (fish @ X => vert @ X)",
        "tautology": "! [X:e]: (fish @ X => fish @ X)",
    }
    terms = {c.label: c.term for c in doc.sentences["s_all"].candidates}
    terms.update({k: parse_formula(v, sig) for k, v in extra.items()})
    fmap = {sid: s.candidates[0].term for sid, s in doc.sentences.items()}
    arg_specs = {a.id: a.logics[0] for a in doc.arguments.values()}
    scores = score_candidates(
        "s_all", {k: Formalization(t, K) for k, t in terms.items()},
        {sid: Formalization(t, K) for sid, t in fmap.items()}, doc.corpus(), (), Reasoner(), arg_specs)
    fresh = Reasoner(cache=False)
    seen_rejection = False
    for s in scores:
        want = _recount("s_all", s.candidate, terms[s.candidate], doc, fmap, fresh, terms)
        if want == REJECTED:
            seen_rejection = True
            assert s.aggregate == -math.inf and s.reliable == "no", s.candidate
        else:
            assert abs(s.aggregate - want) < 1e-12, s.candidate
            assert s.reliable == "yes"
    by = {s.candidate: s for s in scores}
    assert (by["all_de_re"].ambitiousness, by["all_de_dicto"].ambitiousness) == (0.5, 1.0)
    assert seen_rejection


def _cli(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = main(list(argv), out, err)
    return code, out.getvalue()


def test_criterion_7_engine_end_to_end(tmp_path):
    """Planted discourse reaches its structural maximum; contradictory edges end in stagnation"""
    start = time.monotonic()
    planted = FIXTURES / "planted.herm"
    doc = load(planted)
    correct = [a for a in doc.arguments.values() if a.tag == "correct"]
    assert len(correct) == 4
    assert all(len(s.candidates) >= 2 for s in doc.sentences.values())
    assert sum(p.status == "candidate" for p in doc.postulates.values()) >= 3
    assert len(doc.network.edges) == 3

    outputs = []
    for i in range(2):
        trace = tmp_path / f"trace{i}.jsonl"
        final = tmp_path / f"final{i}.herm"
        code, out = _cli("search", str(planted), "--seed", "7", "--iters", "500",
                         "--trace", str(trace), "--out", str(final))
        outputs.append((code, out, trace.read_bytes(), final.read_bytes()))
    assert outputs[0] == outputs[1]
    code, out = outputs[0][0], outputs[0][1]
    data = json.loads(out.split("--- machine-readable ---\n", 1)[1])
    assert code == 0
    assert data["termination"] == "satisfied" and data["iterations"] <= 500
    assert data["structural_maximum"] is True and data["revalidated"] is True
    assert [p["label"] for p in data["promoted"]] == ["mp_fish_vert"]

    contra = run(load(FIXTURES / "contradictory.herm"), EngineConfig(seed=7))
    assert contra.termination == "stagnation"
    assert [(e.src, e.dst, e.polarity) for e in contra.unrealizable] == [("A", "B", "attack")]
    assert time.monotonic() - start < 120


def test_criterion_8_determinism_and_cache_transparency():
    """Best-so-far never decreases in any trace; cache on and off give identical verdicts"""
    for name in HERM_FIXTURES:
        doc = load(FIXTURES / name)
        for seed in (0, 7):
            res = run(doc, EngineConfig(seed=seed, iters=80))
            best = [-math.inf if r["best"] == "-inf" else r["best"] for r in res.trace]
            assert best == sorted(best), (name, seed)

    def verdicts(reasoner):
        out = []
        for name in HERM_FIXTURES:
            doc = load(FIXTURES / name)
            ev = Evaluator(doc, EngineConfig(), reasoner)
            a = bootstrap(doc)
            args = ev.arguments(a)
            theory = ev.theory(a)
            for aid in sorted(args):
                for spec in doc.arguments[aid].logics:
                    args[aid].spec = spec
                    out.append((name, aid, spec.describe(), check_correctness(args[aid], theory, reasoner).to_dict()))
            if doc.network is not None:
                report = role_fulfillment(doc.network, args, theory, reasoner)
                out.append((name, "network", report.to_dict()))
        for arg, theory, _ in suite_cases():
            out.append(("suite", arg.id, check_correctness(arg, theory, reasoner).to_dict()))
        return out

    cached = Reasoner()
    first = verdicts(cached)
    again = verdicts(cached)
    assert cached.stats()["cache_hits"] > 0
    assert first == again == verdicts(Reasoner(cache=False))

    cfg = EngineConfig(seed=3, iters=60)
    planted = load(FIXTURES / "planted.herm")
    on = run(planted, cfg, Reasoner(cfg.budget))
    off = run(planted, cfg, Reasoner(cfg.budget, cache=False))
    assert trace_lines(on.trace) == trace_lines(off.trace)
