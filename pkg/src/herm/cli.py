"""Command-line front end: ``herm <command> FILE.herm [options]``.

Exit codes: 0 success, 1 domain failure (an argument fails its checks,
``models`` finds no model, the search misses its target), 2 the outcome
is dominated by Unknown verdicts, 64 usage error, 65 malformed input data.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import __version__
from .adequacy import Formalization, argument_verdict, score_candidates
from .argnet import role_fulfillment, to_dot
from .conceptualization import intended_models, ontology_fit
from .corpus import CorpusDocument, dumps, load, logic_from_json
from .correctness import Argument, certificate_id, check_correctness
from .embedding import K, embed, signature_for
from .engine import EngineConfig, final_document, run, trace_lines
from .errors import CorpusError, HermError
from .parser import parse_formula
from .printer import show, show_type
from .reasoner import BUDGET_ENV, Budget, Invalid, Reasoner, Sat, Unknown, Unsat, Valid
from .report import (
    adequacy_section,
    correctness_section,
    error_report,
    fit_section,
    fmt,
    network_section,
    render,
    table,
)
from .terms import NamedFormula

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


# ---------------------------------------------------------------------------
# shared helpers


def _budget(ns) -> Budget:
    overrides = {}
    for flag, name in (("max_worlds", "max_world_count"), ("max_individuals", "max_individual_count"),
                       ("depth", "max_tableau_depth"), ("timeout_ms", "timeout_ms")):
        v = getattr(ns, flag, None)
        if v is not None:
            overrides[name] = v
    return Budget.from_env(**overrides)


def _reasoner(ns) -> Reasoner:
    return Reasoner(_budget(ns), cache=not getattr(ns, "no_cache", False))


def _theory(doc: CorpusDocument) -> list:
    return [NamedFormula(p.label, "meaning-postulate", p.term)
            for p in doc.postulates.values() if p.status == "settled" or p.active]


def _current(doc: CorpusDocument) -> dict:
    """The document's default reading: first candidate per sentence."""
    return {sid: s.candidates[0] for sid, s in doc.sentences.items() if s.candidates}


def _argument(doc: CorpusDocument, aid: str, spec=None) -> Argument:
    if aid not in doc.arguments:
        raise UsageError(f"unknown argument {aid!r}")
    entry = doc.arguments[aid]
    cur = _current(doc)
    prem = [NamedFormula(s, "premise", cur[s].term) for s in entry.premises]
    concl = NamedFormula(entry.conclusion, "conclusion", cur[entry.conclusion].term)
    return Argument(aid, prem, concl, spec or entry.logics[0], list(entry.postulates))


def _logic(ns):
    if getattr(ns, "logic", None) is None:
        return None
    frame, _, rest = ns.logic.partition(":")
    parts = [x for x in rest.split(":") if x]
    domain = next((p for p in parts if p in ("constant", "actualist")), "constant")
    validity = next((p for p in parts if p in ("global", "local")), "global")
    return logic_from_json({"frame": frame, "domain": domain, "validity": validity})


def _stats_lines(r: Reasoner) -> list:
    s = r.stats()
    return [f"reasoner: {s['queries']} queries, {s['cache_hits']} cache hits, {s['unknown']} unknown"]


# ---------------------------------------------------------------------------
# commands


def cmd_parse(ns, out) -> int:
    doc = load(ns.file)
    if ns.formula:
        t = parse_formula(ns.formula, doc.signature)
        out.write(render([f"{show(t)} : {show_type(t.ty)}"],
                         {"formula": show(t), "type": show_type(t.ty)}, ns.json))
        return EXIT_OK
    rows, data = [], []
    for s in doc.sentences.values():
        for c in s.candidates:
            rows.append((s.id, c.label, show_type(c.term.ty), show(c.term)))
            data.append({"sentence": s.id, "label": c.label, "type": show_type(c.term.ty), "formula": show(c.term)})
    for p in doc.postulates.values():
        rows.append(("(postulate)", p.label, show_type(p.term.ty), show(p.term)))
        data.append({"postulate": p.label, "status": p.status, "type": show_type(p.term.ty), "formula": show(p.term)})
    lines = [f"{ns.file}: ok, {len(doc.sentences)} sentences, {len(doc.arguments)} arguments, "
             f"{len(doc.postulates)} postulates"] + table(["sentence", "label", "type", "formula"], rows)
    out.write(render(lines, {"file": str(ns.file), "formulas": data}, ns.json))
    return EXIT_OK


def _lookup_formula(doc: CorpusDocument, ns):
    if ns.formula:
        return parse_formula(ns.formula, doc.signature)
    if ns.label:
        if ns.label in doc.postulates:
            return doc.postulates[ns.label].term
        return doc.candidate(ns.label).term
    raise UsageError("give --formula TEXT or --label LABEL")


def cmd_embed(ns, out) -> int:
    doc = load(ns.file)
    spec = _logic(ns) or K
    t = _lookup_formula(doc, ns)
    e = embed(t, spec)
    lines = [f"logic: {spec.describe()}", f"source: {show(t)}", f"hol: {show(e.hol_term)}"]
    lines += [f"frame {f.label}: {show(f.term)}" for f in e.frame_theory]
    aux = sorted(e.aux_signature)
    data = {"logic": spec.to_dict(), "source": show(t), "hol": show(e.hol_term),
            "frame_axioms": {f.label: show(f.term) for f in e.frame_theory},
            "auxiliary": {n: show_type(e.aux_signature[n]) for n in aux}}
    # printed terms parse back against the extended signature
    parse_formula(show(e.hol_term), signature_for(doc.signature, spec))
    out.write(render(lines, data, ns.json))
    return EXIT_OK


def cmd_check(ns, out) -> int:
    doc = load(ns.file)
    r = _reasoner(ns)
    ids = ns.arg or list(doc.arguments)
    spec = _logic(ns)
    reports = [check_correctness(_argument(doc, a, spec), _theory(doc), r, circularity=not ns.no_circularity)
               for a in ids]
    lines, data = correctness_section(reports)
    lines += _stats_lines(r)
    out.write(render(lines, {"arguments": data, "reasoner": r.stats()}, ns.json))
    overall = [rep.overall for rep in reports]
    if "fail" in overall:
        return EXIT_FAIL
    return EXIT_UNKNOWN if "unknown" in overall else EXIT_OK


def cmd_models(ns, out) -> int:
    doc = load(ns.file)
    r = _reasoner(ns)
    if ns.arg:
        arg = _argument(doc, ns.arg, _logic(ns))
        th = [f.term for f in _theory(doc)]
        v = r.entails([p.term for p in arg.premises] + th, arg.conclusion.term, arg.spec)
        head = f"argument {arg.id} in {arg.spec.describe()}: {v.kind}"
        found = isinstance(v, Invalid)
    else:
        t = _lookup_formula(doc, ns)
        spec = _logic(ns) or K
        v = r.consistent([t] + [f.term for f in _theory(doc)], spec)
        head = f"formula in {spec.describe()}: {v.kind}"
        found = isinstance(v, Sat)
    lines = [head]
    data = {"verdict": v.kind, "certificate": certificate_id(v)}
    if found:
        lines += ["model:"] + ["  " + x for x in v.model.describe().splitlines()]
        data["model"] = v.model.to_dict()
    elif isinstance(v, (Valid, Unsat)):
        lines.append(f"no model exists; certificate {certificate_id(v)}")
    else:
        lines.append(f"undecided: {v.reason}")
        data["reason"] = v.reason
    out.write(render(lines + _stats_lines(r), {**data, "reasoner": r.stats()}, ns.json))
    if isinstance(v, Unknown):
        return EXIT_UNKNOWN
    return EXIT_OK if found else EXIT_FAIL


def cmd_score(ns, out) -> int:
    doc = load(ns.file)
    r = _reasoner(ns)
    corpus = doc.corpus()
    cur = _current(doc)
    fmap = {sid: Formalization(c.term, K) for sid, c in cur.items()}
    arg_specs = {a.id: a.logics[0] for a in doc.arguments.values()}
    theory = [f.term for f in _theory(doc)]
    sids = ns.sentence or [s for s in doc.sentences if len(doc.sentences[s].candidates) > 1] or list(doc.sentences)
    lines, data, unknown, rejected = [], {}, False, False
    for sid in sids:
        if sid not in doc.sentences:
            raise UsageError(f"unknown sentence {sid!r}")
        cands = {c.label: Formalization(c.term, K) for c in doc.sentences[sid].candidates}
        scores = score_candidates(sid, cands, fmap, corpus, theory, r, arg_specs, ns.strict, ns.w_a, ns.w_s)
        verdicts = {}
        for label, f in cands.items():
            local = {**fmap, sid: f}
            rows = []
            for arg in corpus.arguments.values():
                if sid in arg.sentences():
                    v = argument_verdict(arg, local, theory, r, arg_specs, sid)
                    rows.append({"argument": arg.id, "tag": arg.tag, "verdict": v.kind,
                                 "certificate": certificate_id(v)})
            verdicts[label] = rows
        sec_lines, sec_data = adequacy_section(sid, scores, verdicts)
        lines += sec_lines
        data[sid] = sec_data
        unknown = unknown or any(s.reliable == "unknown" for s in scores)
        rejected = rejected or all(s.reliable == "no" for s in scores)
    lines += _stats_lines(r)
    out.write(render(lines, {"sentences": data, "reasoner": r.stats()}, ns.json))
    if rejected:
        return EXIT_FAIL
    return EXIT_UNKNOWN if unknown else EXIT_OK


def cmd_network(ns, out) -> int:
    doc = load(ns.file)
    if doc.network is None:
        raise HermError(f"{ns.file} has no network section")
    r = _reasoner(ns)
    args = {aid: _argument(doc, aid) for aid in doc.network.nodes}
    rep = role_fulfillment(doc.network, args, _theory(doc), r, ns.lam)
    lines, data = network_section(rep)
    dot = to_dot(doc.network, rep)
    if ns.dot:
        Path(ns.dot).write_text(dot, encoding="utf-8")
    else:
        lines += ["", dot.rstrip("\n")]
    lines += _stats_lines(r)
    out.write(render(lines, {"network": data, "dot": dot, "reasoner": r.stats()}, ns.json))
    return EXIT_OK if not rep.unrealized() and not rep.spurious else EXIT_FAIL


def cmd_concept(ns, out) -> int:
    doc = load(ns.file)
    if not doc.conceptualizations:
        raise HermError(f"{ns.file} has no conceptualizations section")
    ids = ns.id or list(doc.conceptualizations)
    lines, data = [], {}
    for cid in ids:
        if cid not in doc.conceptualizations:
            raise UsageError(f"unknown conceptualization {cid!r}")
        entry = doc.conceptualizations[cid]
        ims = intended_models(entry.commitment)
        lines.append(f"conceptualization {cid}: {len(ims)} intended model(s)")
        lines += [f"  {m.describe()}" for m in ims]
        fits = {}
        for name, axs in entry.axioms.items():
            fit = ontology_fit([t for _, t in axs], entry.commitment)
            fits[name] = fit.to_dict()
            lines += [x.replace("coincide modulo isomorphism: -", "coincide modulo isomorphism: unevaluated")
                      for x in fit_section(name, fit)]
        data[cid] = {"intended_models": [m.describe() for m in ims], "fit": fits}
    out.write(render(lines, {"conceptualizations": data}, ns.json))
    return EXIT_OK


def cmd_search(ns, out) -> int:
    doc = load(ns.file)
    cfg = EngineConfig(seed=ns.seed, iters=ns.iters, t0=ns.t0, alpha=ns.alpha, stagnation=ns.stagnation,
                       promote_min=ns.promote_min, w_net=ns.w_net, lam=ns.lam, strict=ns.strict,
                       budget=_budget(ns))
    r = _reasoner(ns)
    res = run(doc, cfg, r)
    best = res.best
    best_ev = res.state.best_evaluation or res.state.evaluation
    lines = [f"termination: {res.termination} after {res.state.iteration} iteration(s)",
             f"best objective: {fmt(best_ev.total)}",
             f"structural maximum: {'yes' if best_ev.structural else 'no'}"
             + (f" (revalidated: {'yes' if res.revalidated else 'no'})" if res.revalidated is not None else "")]
    lines += ["formalizations:"] + ["  " + x for x in table(
        ["sentence", "candidate"], list(best.choice))]
    lines.append("active postulates: " + (", ".join(best.active) or "-"))
    lines.append("promoted postulates: " + (", ".join(p["label"] for p in res.promoted) or "-"))
    corr_lines, corr_data = correctness_section(list(best_ev.correctness.values()))
    lines += ["correctness:"] + ["  " + x for x in corr_lines]
    net_data = None
    if best_ev.network is not None:
        nl, net_data = network_section(best_ev.network)
        lines += ["network:"] + ["  " + x for x in nl]
    if res.unrealizable:
        lines.append("unrealizable edges: " + ", ".join(f"{e.src}->{e.dst} ({e.polarity})" for e in res.unrealizable))
    lines += _stats_lines(r)
    data = {
        "termination": res.termination,
        "iterations": res.state.iteration,
        "objective": best_ev.total,
        "breakdown": best_ev.breakdown,
        "structural_maximum": best_ev.structural,
        "revalidated": res.revalidated,
        "assignment": best.to_dict(),
        "promoted": res.promoted,
        "unrealizable_edges": [{"from": e.src, "to": e.dst, "polarity": e.polarity} for e in res.unrealizable],
        "correctness": corr_data,
        "adequacy": best_ev.adequacy,
        "network": net_data,
        "trace_summary": {
            "length": len(res.trace),
            "accepted": sum(1 for t in res.trace if t.get("accepted")),
            "final_best": res.trace[-1]["best"] if res.trace else None,
        },
        "reasoner": r.stats(),
    }
    if ns.out:
        Path(ns.out).write_text(dumps(final_document(doc, res)), encoding="utf-8")
    if ns.trace:
        Path(ns.trace).write_text(trace_lines(res.trace), encoding="utf-8")
    out.write(render(lines, data, ns.json))
    return EXIT_OK if best_ev.structural else EXIT_FAIL


# ---------------------------------------------------------------------------
# argument parsing


def _budget_flags(p):
    g = p.add_argument_group("reasoner budget (defaults come from " + BUDGET_ENV + ")")
    g.add_argument("--max-worlds", type=int, help="largest number of worlds in a countermodel")
    g.add_argument("--max-individuals", type=int, help="largest number of individuals in a countermodel")
    g.add_argument("--depth", type=int, help="tableau depth cap")
    g.add_argument("--timeout-ms", type=int, help="wall-clock limit per query in milliseconds")
    g.add_argument("--no-cache", action="store_true", help="disable the verdict cache")


def _common(p):
    p.add_argument("file", help="corpus document (.herm)")
    p.add_argument("--json", action="store_true", help="print only the machine-readable section")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="herm", description="Formalize, check and search argument formalizations.")
    top.add_argument("--version", action="version", version=f"herm {__version__}")
    sub = top.add_subparsers(dest="command", parser_class=_Parser, metavar="command")

    p = sub.add_parser("parse", help="validate a corpus document and print its formulas")
    _common(p)
    p.add_argument("--formula", help="parse this formula against the document's signature instead")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("embed", help="print the HOL embedding of a formula")
    _common(p)
    p.add_argument("--formula", help="formula source text")
    p.add_argument("--label", help="candidate or postulate label from the document")
    p.add_argument("--logic", help="logic as FRAME[:actualist][:local], e.g. S4 or T:local (default K)")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("check", help="logical correctness report for arguments")
    _common(p)
    p.add_argument("--arg", action="append", help="argument id (repeatable; default all)")
    p.add_argument("--logic", help="override every argument's logic, e.g. T or S5:actualist")
    p.add_argument("--no-circularity", action="store_true", help="skip the circularity test")
    _budget_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("models", help="countermodel for an argument, or a model of a formula")
    _common(p)
    p.add_argument("--arg", help="argument id: look for a countermodel")
    p.add_argument("--formula", help="formula source text: look for a model")
    p.add_argument("--label", help="candidate or postulate label: look for a model")
    p.add_argument("--logic", help="logic as FRAME[:actualist][:local]")
    _budget_flags(p)
    p.set_defaults(func=cmd_models)

    p = sub.add_parser("score", help="adequacy tables for candidate formalizations")
    _common(p)
    p.add_argument("--sentence", action="append", help="sentence id (repeatable; default all with >1 candidate)")
    p.add_argument("--strict", action="store_true", help="report reliability unknown when a verdict is Unknown")
    p.add_argument("--w-a", type=float, default=1.0, help="ambitiousness weight (default 1.0)")
    p.add_argument("--w-s", type=float, default=0.05, help="simplicity weight (default 0.05)")
    _budget_flags(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("network", help="edge status of the intended argument network")
    _common(p)
    p.add_argument("--lam", type=float, default=0.5, help="penalty per spurious edge (default 0.5)")
    p.add_argument("--dot", help="write the Graphviz rendering to this file")
    _budget_flags(p)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("concept", help="intended models and ontology fit")
    _common(p)
    p.add_argument("--id", action="append", help="conceptualization id (repeatable; default all)")
    p.set_defaults(func=cmd_concept)

    p = sub.add_parser("search", help="run the annealing search over formalizations")
    _common(p)
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    p.add_argument("--iters", type=int, default=500, help="iteration budget (default 500)")
    p.add_argument("--t0", type=float, default=1.0, help="initial temperature (default 1.0)")
    p.add_argument("--alpha", type=float, default=0.99, help="cooling factor (default 0.99)")
    p.add_argument("--stagnation", type=int, default=200,
                   help="stop after this many iterations without improvement (default 200)")
    p.add_argument("--promote-min", type=int, default=2,
                   help="passing arguments a postulate must serve to be promoted (default 2)")
    p.add_argument("--w-net", type=float, default=1.0, help="network weight in the objective (default 1.0)")
    p.add_argument("--lam", type=float, default=0.5, help="penalty per spurious edge (default 0.5)")
    p.add_argument("--strict", action="store_true", help="treat Unknown reliability verdicts as unknown")
    p.add_argument("--out", help="write the final document here")
    p.add_argument("--trace", help="write the per-iteration trace (JSON lines) here")
    _budget_flags(p)
    p.set_defaults(func=cmd_search)
    return top


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        if not argv:
            raise UsageError("missing command")
        ns = parser.parse_args(argv)
        if ns.command is None:
            raise UsageError("missing command")
        return ns.func(ns, out)
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0)
    except UsageError as exc:
        err.write(parser.format_usage())
        err.write(error_report("usage", [str(exc)]))
        return EXIT_USAGE
    except CorpusError as exc:
        err.write(error_report("data", exc.errors))
        return EXIT_DATA
    except HermError as exc:
        err.write(error_report("data", [str(exc)]))
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
