"""Finite conceptualizations, ontological commitments and intended models.

A conceptualization fixes individuals, worlds and intensional relations
(world -> set of tuples). A commitment maps vocabulary constants to
individuals and predicate symbols to intensional relations. A first-order
model is intended when it agrees with the commitment on constants and some
single world supplies the extension of every predicate at once.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .errors import HermError
from .reasoner.semantics import FiniteModel, holds
from .terms import E, O, Signature, Term, arrow

CELL_CAP = 64  # |D|^arity * |W| per relation
MODEL_CAP = 1 << 16
ISO_MAX_DOMAIN = 3


@dataclass(frozen=True)
class IntensionalStructure:
    domain: tuple
    worlds: tuple
    relations: dict  # name -> (arity, {world: frozenset of tuples})

    def __post_init__(self):
        object.__setattr__(self, "domain", tuple(self.domain))
        object.__setattr__(self, "worlds", tuple(self.worlds))
        rels = {}
        for name, (arity, ext) in self.relations.items():
            if set(ext) != set(self.worlds):
                raise HermError(f"intensional relation {name} must be defined at every world")
            if len(self.domain) ** arity * len(self.worlds) > CELL_CAP:
                raise HermError(f"relation {name} exceeds the enumeration cap of {CELL_CAP} cells")
            table = {}
            for w, tuples in ext.items():
                tuples = frozenset(tuple(t) for t in tuples)
                for t in tuples:
                    if len(t) != arity or any(x not in self.domain for x in t):
                        raise HermError(f"relation {name} at {w}: bad tuple {t}")
                table[w] = tuples
            rels[name] = (arity, table)
        object.__setattr__(self, "relations", rels)

    def __hash__(self):
        return hash((self.domain, self.worlds, tuple(sorted(self.relations))))


@dataclass(frozen=True)
class ExtensionalStructure:
    domain: tuple
    relations: dict  # name -> frozenset of tuples


@dataclass(frozen=True)
class Vocabulary:
    constants: tuple
    predicates: dict  # name -> arity

    def signature(self) -> Signature:
        sig = Signature()
        for c in self.constants:
            sig.declare(c, E)
        for p, k in self.predicates.items():
            sig.declare(p, arrow(*([E] * k), O))
        return sig


@dataclass(frozen=True)
class OntologicalCommitment:
    structure: IntensionalStructure
    vocabulary: Vocabulary
    constants: dict  # constant -> individual
    predicates: dict  # predicate -> intensional relation name

    def __post_init__(self):
        C, V = self.structure, self.vocabulary
        if set(self.constants) != set(V.constants) or set(self.predicates) != set(V.predicates):
            raise HermError("commitment must interpret exactly the vocabulary")
        for c, d in self.constants.items():
            if d not in C.domain:
                raise HermError(f"constant {c} is committed to {d}, which is not in the domain")
        for p, rho in self.predicates.items():
            if rho not in C.relations:
                raise HermError(f"predicate {p} is committed to unknown relation {rho}")
            if C.relations[rho][0] != V.predicates[p]:
                raise HermError(f"predicate {p} and relation {rho} differ in arity")

    def __hash__(self):
        return hash((self.structure, tuple(sorted(self.constants.items())), tuple(sorted(self.predicates.items()))))


@dataclass(frozen=True)
class FOModel:
    domain: tuple
    interp: tuple  # sorted (symbol, value) pairs; value is an individual or a frozenset of tuples

    @classmethod
    def make(cls, domain, interp: dict) -> "FOModel":
        return cls(tuple(domain), tuple(sorted(interp.items())))

    def __getitem__(self, symbol):
        return dict(self.interp)[symbol]

    def key(self) -> tuple:
        return tuple((k, v if isinstance(v, str) else tuple(sorted(v))) for k, v in self.interp)

    def describe(self) -> str:
        parts = []
        for k, v in self.interp:
            if isinstance(v, str):
                parts.append(f"{k}={v}")
            else:
                parts.append(f"{k}={{" + ",".join("(" + ",".join(t) + ")" for t in sorted(v)) + "}")
        return "; ".join(parts)


# ---------------------------------------------------------------------------
# operations


def world_extension(C: IntensionalStructure, w) -> ExtensionalStructure:
    if w not in C.worlds:
        raise HermError(f"unknown world {w}")
    return ExtensionalStructure(C.domain, {name: table[w] for name, (_, table) in C.relations.items()})


def _check_vocab(M: FOModel, K: OntologicalCommitment) -> dict:
    I = dict(M.interp)
    V = K.vocabulary
    if set(I) != set(V.constants) | set(V.predicates):
        raise HermError("model and commitment use different vocabularies")
    if tuple(M.domain) != tuple(K.structure.domain):
        raise HermError("model and commitment use different domains")
    return I


def is_intended_model(M: FOModel, K: OntologicalCommitment) -> bool:
    I = _check_vocab(M, K)
    if any(I[c] != d for c, d in K.constants.items()):
        return False
    rels = K.structure.relations
    return any(
        all(I[p] == rels[rho][1][w] for p, rho in K.predicates.items())
        for w in K.structure.worlds
    )


def witness_worlds(M: FOModel, K: OntologicalCommitment) -> list:
    I = _check_vocab(M, K)
    rels = K.structure.relations
    return [w for w in K.structure.worlds
            if all(I[p] == rels[rho][1][w] for p, rho in K.predicates.items())]


def intended_models(K: OntologicalCommitment) -> list:
    """Intended models, one per distinct world snapshot, in canonical order."""
    out = {}
    for w in K.structure.worlds:
        interp = dict(K.constants)
        for p, rho in K.predicates.items():
            interp[p] = K.structure.relations[rho][1][w]
        M = FOModel.make(K.structure.domain, interp)
        out.setdefault(M.key(), M)
    return [out[k] for k in sorted(out)]


def all_models(vocab: Vocabulary, domain) -> list:
    """Every first-order model over a fixed domain, in canonical order."""
    domain = tuple(domain)
    n = len(domain)
    count = n ** len(vocab.constants)
    for k in vocab.predicates.values():
        count *= 2 ** (n ** k)
    if count > MODEL_CAP:
        raise HermError(f"{count} models exceed the enumeration cap of {MODEL_CAP}")
    preds = sorted(vocab.predicates)
    consts = sorted(vocab.constants)
    ext_choices = []
    for p in preds:
        cells = list(itertools.product(domain, repeat=vocab.predicates[p]))
        ext_choices.append([frozenset(c for c, b in zip(cells, bits) if b)
                            for bits in itertools.product((False, True), repeat=len(cells))])
    out = []
    for cvals in itertools.product(domain, repeat=len(consts)):
        for pvals in itertools.product(*ext_choices):
            out.append(FOModel.make(domain, {**dict(zip(consts, cvals)), **dict(zip(preds, pvals))}))
    return out


def to_finite_model(M: FOModel, vocab: Vocabulary) -> FiniteModel:
    """View a first-order model as a finite HOL model over base type e."""
    index = {d: i for i, d in enumerate(M.domain)}
    I = dict(M.interp)
    interp, types = {}, {}
    for c in vocab.constants:
        interp[c] = index[I[c]]
        types[c] = E
    for p, k in vocab.predicates.items():
        ext = {tuple(index[x] for x in t) for t in I[p]}

        def table(prefix, k=k, ext=ext):
            if len(prefix) == k:
                return prefix in ext
            return tuple(table(prefix + (i,)) for i in range(len(M.domain)))

        interp[p] = table(())
        types[p] = arrow(*([E] * k), O)
    return FiniteModel({"e": len(M.domain)}, interp, types)


def satisfies(M: FOModel, axioms, vocab: Vocabulary) -> bool:
    fm = to_finite_model(M, vocab)
    return all(holds(a, fm) for a in axioms)


@dataclass
class OntologyFit:
    soundness: float
    coverage: float
    intended: int
    axiom_models: int
    intended_and_axiom: int
    total_models: int
    excluded_intended: list  # intended models the axioms rule out
    unintended_admitted: list  # axiom models that are not intended
    coincide_modulo_iso: bool | None

    def to_dict(self) -> dict:
        return {
            "soundness": round(self.soundness, 6),
            "coverage": round(self.coverage, 6),
            "intended": self.intended,
            "axiom_models": self.axiom_models,
            "intended_and_axiom_models": self.intended_and_axiom,
            "total_models": self.total_models,
            "excluded_intended": [m.describe() for m in self.excluded_intended],
            "unintended_admitted": [m.describe() for m in self.unintended_admitted],
            "coincide_modulo_isomorphism": self.coincide_modulo_iso,
        }


def ontology_fit(axioms, K: OntologicalCommitment) -> OntologyFit:
    """Soundness and coverage of an axiom set against the intended models of K.

    soundness: share of intended models satisfying the axioms.
    coverage: share of axiom models (over K's domain) that are intended.
    """
    for a in axioms:
        if not isinstance(a, Term) or a.ty != O:
            raise HermError("ontology axioms must be closed first-order formulas of type o")
    V = K.vocabulary
    intended = intended_models(K)
    keys = {m.key() for m in intended}
    everything = all_models(V, K.structure.domain)
    axiom_models = [m for m in everything if satisfies(m, axioms, V)]
    both = [m for m in axiom_models if m.key() in keys]
    excluded = [m for m in intended if not satisfies(m, axioms, V)]
    admitted = [m for m in axiom_models if m.key() not in keys]
    soundness = (len(intended) - len(excluded)) / len(intended) if intended else 1.0
    coverage = len(both) / len(axiom_models) if axiom_models else 1.0
    iso = None
    if len(K.structure.domain) <= ISO_MAX_DOMAIN:
        iso = isomorphism_classes(axiom_models) == isomorphism_classes(intended)
    return OntologyFit(soundness, coverage, len(intended), len(axiom_models), len(both),
                       len(everything), excluded, admitted, iso)


def _iso_key(M: FOModel) -> tuple:
    best = None
    for perm in itertools.permutations(M.domain):
        rename = dict(zip(M.domain, perm))
        key = tuple(
            (k, rename[v] if isinstance(v, str) else tuple(sorted(tuple(rename[x] for x in t) for t in v)))
            for k, v in M.interp
        )
        if best is None or key < best:
            best = key
    return best


def isomorphism_classes(models) -> set:
    """Canonical forms of models up to renaming individuals (|D| <= 3 only)."""
    models = list(models)
    if models and len(models[0].domain) > ISO_MAX_DOMAIN:
        raise HermError(f"isomorphism checks are limited to domains of size {ISO_MAX_DOMAIN}")
    return {_iso_key(m) for m in models}
