"""The `.herm` corpus document: a JSON file with schema version ``herm/1``.

One document carries the signature, sentences with candidate
formalizations, tagged arguments with their admissible logics, the
intended argument network, a pool of meaning postulates and optional
conceptualization structures. Loading collects every integrity problem
it can find instead of stopping at the first one.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .adequacy import Corpus, CorpusArgument
from .argnet import ArgumentNetwork, Edge
from .conceptualization import IntensionalStructure, OntologicalCommitment, Vocabulary
from .embedding import FRAME_CONDITIONS, PRESETS, LogicSpec
from .errors import CorpusError, HermError
from .parser import parse_formula
from .printer import show
from .terms import Signature, Term

SCHEMA_VERSION = "herm/1"

_ID = {"type": "string", "pattern": "^[A-Za-z][A-Za-z0-9_.-]*$"}
_LOGIC = {
    "oneOf": [
        {"type": "string"},
        {
            "type": "object",
            "properties": {
                "frame": {"oneOf": [{"type": "string"}, {"type": "array", "items": {"type": "string"}}]},
                "domain": {"enum": ["constant", "actualist"]},
                "validity": {"enum": ["global", "local"]},
            },
            "required": ["frame"],
            "additionalProperties": False,
        },
    ]
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "herm corpus document",
    "type": "object",
    "required": ["schema", "signature", "sentences", "arguments"],
    "additionalProperties": False,
    "properties": {
        "schema": {"const": SCHEMA_VERSION},
        "description": {"type": "string"},
        "signature": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "bases": {"type": "array", "items": {"type": "string"}},
                "constants": {"type": "object", "additionalProperties": {"type": "string"}},
            },
        },
        "sentences": {
            "type": "object",
            "propertyNames": _ID,
            "additionalProperties": {
                "type": "object",
                "required": ["candidates"],
                "additionalProperties": False,
                "properties": {
                    "text": {"type": "string"},
                    "candidates": {
                        "type": "array",
                        "items": {
                            "type": "object",
                            "required": ["label", "formula"],
                            "additionalProperties": False,
                            "properties": {"label": _ID, "formula": {"type": "string"}},
                        },
                    },
                },
            },
        },
        "arguments": {
            "type": "object",
            "propertyNames": _ID,
            "additionalProperties": {
                "type": "object",
                "required": ["premises", "conclusion", "tag"],
                "additionalProperties": False,
                "properties": {
                    "premises": {"type": "array", "items": _ID},
                    "conclusion": _ID,
                    "tag": {"enum": ["correct", "incorrect"]},
                    "logics": {"type": "array", "items": _LOGIC, "minItems": 1},
                    "postulates": {"type": "array", "items": _ID},
                },
            },
        },
        "network": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "nodes": {"type": "array", "items": _ID},
                "edges": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["from", "to", "polarity"],
                        "additionalProperties": False,
                        "properties": {"from": _ID, "to": _ID, "polarity": {"enum": ["attack", "support"]}},
                    },
                },
            },
        },
        "postulates": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["label", "formula"],
                "additionalProperties": False,
                "properties": {
                    "label": _ID,
                    "formula": {"type": "string"},
                    "status": {"enum": ["candidate", "settled"]},
                    "active": {"type": "boolean"},
                },
            },
        },
        "conceptualizations": {
            "type": "object",
            "propertyNames": _ID,
            "additionalProperties": {
                "type": "object",
                "required": ["domain", "worlds", "relations", "vocabulary", "commitment"],
                "additionalProperties": False,
                "properties": {
                    "domain": {"type": "array", "items": {"type": "string"}},
                    "worlds": {"type": "array", "items": {"type": "string"}},
                    "relations": {
                        "type": "object",
                        "additionalProperties": {
                            "type": "object",
                            "required": ["arity", "extension"],
                            "additionalProperties": False,
                            "properties": {
                                "arity": {"type": "integer", "minimum": 0},
                                "extension": {
                                    "type": "object",
                                    "additionalProperties": {
                                        "type": "array",
                                        "items": {"type": "array", "items": {"type": "string"}},
                                    },
                                },
                            },
                        },
                    },
                    "vocabulary": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "constants": {"type": "array", "items": {"type": "string"}},
                            "predicates": {"type": "object", "additionalProperties": {"type": "integer", "minimum": 0}},
                        },
                    },
                    "commitment": {
                        "type": "object",
                        "additionalProperties": False,
                        "properties": {
                            "constants": {"type": "object", "additionalProperties": {"type": "string"}},
                            "predicates": {"type": "object", "additionalProperties": {"type": "string"}},
                        },
                    },
                    "axioms": {
                        "type": "object",
                        "additionalProperties": {"type": "array", "items": {"type": "string"}},
                    },
                },
            },
        },
    },
}


# ---------------------------------------------------------------------------
# document model


@dataclass(frozen=True)
class Candidate:
    label: str
    source: str
    term: Term


@dataclass
class Sentence:
    id: str
    text: str
    candidates: list  # of Candidate


@dataclass
class ArgumentEntry:
    id: str
    premises: tuple
    conclusion: str
    tag: str
    logics: tuple  # admissible LogicSpecs, first one is the default
    postulates: tuple = ()


@dataclass(frozen=True)
class Postulate:
    label: str
    source: str
    term: Term
    status: str = "candidate"  # candidate | settled
    active: bool = False


@dataclass
class ConceptEntry:
    id: str
    commitment: OntologicalCommitment
    axioms: dict  # name -> list of (source, term)


@dataclass
class CorpusDocument:
    signature: Signature
    sentences: dict
    arguments: dict
    network: ArgumentNetwork | None
    postulates: dict
    conceptualizations: dict = field(default_factory=dict)
    description: str = ""

    def corpus(self) -> Corpus:
        return Corpus(
            {s.id: s.text for s in self.sentences.values()},
            {a.id: CorpusArgument(a.id, tuple(a.premises), a.conclusion, a.tag) for a in self.arguments.values()},
        )

    def candidate(self, label: str) -> Candidate:
        for s in self.sentences.values():
            for c in s.candidates:
                if c.label == label:
                    return c
        raise HermError(f"unknown candidate {label}")

    def to_dict(self) -> dict:
        out = {"schema": SCHEMA_VERSION}
        if self.description:
            out["description"] = self.description
        out["signature"] = self.signature.to_dict()
        out["sentences"] = {
            s.id: {"text": s.text, "candidates": [{"label": c.label, "formula": c.source} for c in s.candidates]}
            for s in self.sentences.values()
        }
        args = {}
        for a in self.arguments.values():
            d = {"premises": list(a.premises), "conclusion": a.conclusion, "tag": a.tag,
                 "logics": [logic_to_json(s) for s in a.logics]}
            if a.postulates:
                d["postulates"] = list(a.postulates)
            args[a.id] = d
        out["arguments"] = args
        if self.network is not None:
            out["network"] = {
                "nodes": list(self.network.nodes),
                "edges": [{"from": e.src, "to": e.dst, "polarity": e.polarity} for e in self.network.edges],
            }
        if self.postulates:
            out["postulates"] = [
                {"label": p.label, "formula": p.source, "status": p.status, "active": p.active}
                for p in self.postulates.values()
            ]
        if self.conceptualizations:
            out["conceptualizations"] = {cid: _concept_to_json(c) for cid, c in self.conceptualizations.items()}
        return out


def logic_from_json(value) -> LogicSpec:
    if isinstance(value, str):
        return LogicSpec.preset(value)
    frame = value["frame"]
    domain = value.get("domain", "constant")
    validity = value.get("validity", "global")
    if isinstance(frame, str):
        return LogicSpec.preset(frame, domain, validity)
    return LogicSpec(frozenset(frame), domain, validity)


def logic_to_json(spec: LogicSpec):
    preset = next((n for n, f in PRESETS.items() if f == spec.frame), None)
    frame = preset or [c for c in FRAME_CONDITIONS if c in spec.frame]
    if preset and spec.domain == "constant" and spec.validity == "global":
        return preset
    return {"frame": frame, "domain": spec.domain, "validity": spec.validity}


def _concept_to_json(c: ConceptEntry) -> dict:
    K = c.commitment
    C = K.structure
    return {
        "domain": list(C.domain),
        "worlds": list(C.worlds),
        "relations": {
            name: {"arity": arity, "extension": {w: [list(t) for t in sorted(table[w])] for w in C.worlds}}
            for name, (arity, table) in C.relations.items()
        },
        "vocabulary": {"constants": list(K.vocabulary.constants), "predicates": dict(K.vocabulary.predicates)},
        "commitment": {"constants": dict(K.constants), "predicates": dict(K.predicates)},
        "axioms": {name: [src for src, _ in axs] for name, axs in c.axioms.items()},
    }


# ---------------------------------------------------------------------------
# loading


def _no_duplicates(pairs):
    out = {}
    for k, v in pairs:
        if k in out:
            raise CorpusError([f"duplicate key {k!r}"])
        out[k] = v
    return out


def _pointer(path) -> str:
    return "/" + "/".join(str(p) for p in path)


class _Collector:
    def __init__(self):
        self.errors: list = []

    def add(self, where: str, msg: str):
        self.errors.append(f"{where}: {msg}")


def parse_text(text: str, origin: str = "<string>") -> CorpusDocument:
    try:
        raw = json.loads(text, object_pairs_hook=_no_duplicates)
    except CorpusError as exc:
        raise CorpusError([f"{origin}: {e}" for e in exc.errors]) from None
    except json.JSONDecodeError as exc:
        msg = f"{origin}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}"
        raise CorpusError([msg]) from None
    return from_dict(raw, origin)


def from_dict(raw: dict, origin: str = "<document>") -> CorpusDocument:
    validator = jsonschema.Draft202012Validator(SCHEMA)
    schema_errors = sorted(validator.iter_errors(raw), key=lambda e: (list(map(str, e.absolute_path)), e.message))
    if schema_errors:
        errs = [f"{origin}#{_pointer(e.absolute_path)}: {e.message}" for e in schema_errors]
        raise CorpusError(errs)

    col = _Collector()
    at = lambda *path: f"{origin}#{_pointer(path)}"  # noqa: E731

    sig = Signature()
    sraw = raw["signature"]
    for b in sraw.get("bases", []):
        try:
            sig.add_base(b)
        except HermError as exc:
            col.add(at("signature", "bases"), str(exc))
    for name, ty in sraw.get("constants", {}).items():
        try:
            sig.declare(name, ty)
        except HermError as exc:
            col.add(at("signature", "constants", name), str(exc))

    labels: dict = {}

    def claim(label, where):
        if label in labels:
            col.add(where, f"duplicate formula label {label!r} (first used at {labels[label]})")
        else:
            labels[label] = where

    def formula(src, where):
        try:
            return parse_formula(src, sig)
        except HermError as exc:
            col.add(where, f"cannot parse {src!r}: {exc}")
            return None

    sentences = {}
    for sid, s in raw["sentences"].items():
        cands = []
        if not s["candidates"]:
            col.add(at("sentences", sid, "candidates"), "sentence has an empty candidate pool")
        for i, c in enumerate(s["candidates"]):
            where = at("sentences", sid, "candidates", i)
            claim(c["label"], where)
            t = formula(c["formula"], where)
            if t is not None:
                cands.append(Candidate(c["label"], c["formula"], t))
        sentences[sid] = Sentence(sid, s.get("text", ""), cands)

    postulates = {}
    for i, p in enumerate(raw.get("postulates", [])):
        where = at("postulates", i)
        claim(p["label"], where)
        t = formula(p["formula"], where)
        if t is not None:
            postulates[p["label"]] = Postulate(p["label"], p["formula"], t, p.get("status", "candidate"),
                                               bool(p.get("active", False)))

    arguments = {}
    for aid, a in raw["arguments"].items():
        for j, sid in enumerate(list(a["premises"]) + [a["conclusion"]]):
            if sid not in raw["sentences"]:
                field_ = ("premises", j) if j < len(a["premises"]) else ("conclusion",)
                col.add(at("arguments", aid, *field_), f"unknown sentence {sid!r}")
        if a["conclusion"] in a["premises"]:
            col.add(at("arguments", aid), "conclusion is also listed as a premise")
        if len(set(a["premises"])) != len(a["premises"]):
            col.add(at("arguments", aid, "premises"), "duplicate premise")
        logics = []
        for j, lg in enumerate(a.get("logics", ["K"])):
            try:
                logics.append(logic_from_json(lg))
            except HermError as exc:
                col.add(at("arguments", aid, "logics", j), str(exc))
        if len(set(logics)) != len(logics):
            col.add(at("arguments", aid, "logics"), "duplicate logic")
        for j, lbl in enumerate(a.get("postulates", [])):
            if lbl not in {p["label"] for p in raw.get("postulates", [])}:
                col.add(at("arguments", aid, "postulates", j), f"unknown postulate {lbl!r}")
        arguments[aid] = ArgumentEntry(aid, tuple(a["premises"]), a["conclusion"], a["tag"],
                                       tuple(logics), tuple(a.get("postulates", [])))

    network = None
    if "network" in raw:
        n = raw["network"]
        nodes = list(n.get("nodes", []))
        if not nodes:
            nodes = sorted({e["from"] for e in n.get("edges", [])} | {e["to"] for e in n.get("edges", [])})
        for j, node in enumerate(nodes):
            if node not in raw["arguments"]:
                col.add(at("network", "nodes", j), f"unknown argument {node!r}")
        edges, seen = [], set()
        for j, e in enumerate(n.get("edges", [])):
            where = at("network", "edges", j)
            bad = False
            for end in ("from", "to"):
                if e[end] not in nodes:
                    col.add(where, f"edge endpoint {e[end]!r} is not a network node")
                    bad = True
            if e["from"] == e["to"]:
                col.add(where, f"self-edge on {e['from']!r}")
                bad = True
            key = (e["from"], e["to"], e["polarity"])
            if key in seen:
                col.add(where, "duplicate edge")
                bad = True
            seen.add(key)
            if not bad:
                edges.append(Edge(*key))
        if not col.errors:
            network = ArgumentNetwork(nodes, edges)

    concepts = {}
    for cid, c in raw.get("conceptualizations", {}).items():
        try:
            structure = IntensionalStructure(
                tuple(c["domain"]), tuple(c["worlds"]),
                {name: (r["arity"], {w: [tuple(t) for t in ext] for w, ext in r["extension"].items()})
                 for name, r in c["relations"].items()},
            )
            vocab = Vocabulary(tuple(c["vocabulary"].get("constants", [])),
                               dict(c["vocabulary"].get("predicates", {})))
            K = OntologicalCommitment(structure, vocab, dict(c["commitment"].get("constants", {})),
                                      dict(c["commitment"].get("predicates", {})))
        except HermError as exc:
            col.add(at("conceptualizations", cid), str(exc))
            continue
        fo_sig = vocab.signature()
        axioms = {}
        for name, srcs in c.get("axioms", {}).items():
            parsed = []
            for j, src in enumerate(srcs):
                try:
                    parsed.append((src, parse_formula(src, fo_sig)))
                except HermError as exc:
                    col.add(at("conceptualizations", cid, "axioms", name, j), f"cannot parse {src!r}: {exc}")
            axioms[name] = parsed
        concepts[cid] = ConceptEntry(cid, K, axioms)

    if col.errors:
        raise CorpusError(col.errors)
    return CorpusDocument(sig, sentences, arguments, network, postulates, concepts, raw.get("description", ""))


def load(path) -> CorpusDocument:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise CorpusError([f"{path}: cannot read file: {exc.strerror}"]) from None
    return parse_text(text, str(path))


def dumps(doc: CorpusDocument) -> str:
    return json.dumps(doc.to_dict(), indent=2, ensure_ascii=False) + "\n"


def save(doc: CorpusDocument, path) -> None:
    Path(path).write_text(dumps(doc), encoding="utf-8")


def formula_text(t: Term) -> str:
    return show(t)
