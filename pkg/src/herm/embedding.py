"""Shallow embedding of the modal surface language into HOL truth sets.

A modal formula of type w>o is compiled by unfolding each modal
connective into its lambda definition and normalizing, e.g.
``box A`` becomes ``^[W:w]: ![V:w]: acc @ W @ V => A @ V``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .errors import EmbeddingError
from .terms import (
    ACC,
    AUX_TYPES,
    DESIGNATED,
    E,
    EXISTS_AT,
    O,
    W,
    WO,
    App,
    Const,
    Fun,
    Lam,
    NamedFormula,
    Signature,
    Term,
    Var,
    free_vars,
    logical,
    normalize,
    quant_index,
)

FRAME_CONDITIONS = ("reflexive", "symmetric", "transitive", "euclidean")

PRESETS = {
    "K": frozenset(),
    "T": frozenset({"reflexive"}),
    "KB": frozenset({"symmetric"}),
    "S4": frozenset({"reflexive", "transitive"}),
    "S5": frozenset({"reflexive", "symmetric", "transitive"}),
}
DOMAIN_POLICIES = ("constant", "actualist")
VALIDITY_MODES = ("global", "local")


def _frame_name(frame: frozenset) -> str:
    for name, f in PRESETS.items():
        if f == frame:
            return name
    return "K+" + "+".join(c[:4] for c in FRAME_CONDITIONS if c in frame)


@dataclass(frozen=True)
class LogicSpec:
    """A modal logic: frame conditions on acc plus quantifier and validity policy."""

    frame: frozenset = frozenset()
    domain: str = "constant"
    validity: str = "global"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        frame = frozenset(self.frame)
        unknown = frame - set(FRAME_CONDITIONS)
        if unknown:
            raise EmbeddingError(f"unknown frame condition(s): {', '.join(sorted(unknown))}")
        if self.domain not in DOMAIN_POLICIES:
            raise EmbeddingError(f"unknown domain policy {self.domain!r}")
        if self.validity not in VALIDITY_MODES:
            raise EmbeddingError(f"unknown validity mode {self.validity!r}")
        object.__setattr__(self, "frame", frame)
        if not self.name:
            object.__setattr__(self, "name", _frame_name(frame))

    @classmethod
    def preset(cls, name: str, domain: str = "constant", validity: str = "global") -> "LogicSpec":
        try:
            frame = PRESETS[name]
        except KeyError:
            raise EmbeddingError(f"unknown logic preset {name!r}") from None
        return cls(frame, domain, validity, name)

    def with_frame(self, frame) -> "LogicSpec":
        return LogicSpec(frozenset(frame), self.domain, self.validity)

    def toggled(self, condition: str) -> "LogicSpec":
        return self.with_frame(self.frame ^ {condition})

    def with_domain(self, domain: str) -> "LogicSpec":
        return LogicSpec(self.frame, domain, self.validity, self.name)

    def key(self) -> tuple:
        return (tuple(sorted(self.frame)), self.domain, self.validity)

    def describe(self) -> str:
        extra = []
        if self.domain != "constant":
            extra.append(self.domain)
        if self.validity != "global":
            extra.append(self.validity)
        return self.name + (f"[{','.join(extra)}]" if extra else "")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "frame": [c for c in FRAME_CONDITIONS if c in self.frame],
            "domain": self.domain,
            "validity": self.validity,
        }


K = LogicSpec.preset("K")


@dataclass(frozen=True)
class EmbeddingResult:
    hol_term: Term  # type w>o
    frame_theory: tuple  # of NamedFormula
    aux_signature: dict  # name -> Ty
    source: Term
    spec: LogicSpec


# ---------------------------------------------------------------------------
# definitions of the lifted connectives


def _v(name, ty=W):
    return Var(name, ty)


def _acc(a: Term, b: Term) -> Term:
    return App(App(Const(ACC, AUX_TYPES[ACC]), a), b)


def _exists_at(x: Term, w: Term) -> Term:
    return App(App(Const(EXISTS_AT, AUX_TYPES[EXISTS_AT]), x), w)


def _q(name: str, v: Var, body: Term) -> Term:
    return App(logical(name, v.ty), Lam(v, body))


def _b(name: str, a: Term, b: Term) -> Term:
    return App(App(logical(name), a), b)


def definition(c: Const) -> Term | None:
    """Lambda definition of a lifted logical constant, or None."""
    A, B = _v("A", WO), _v("B", WO)
    Wv, Vv = _v("W"), _v("V")
    name = c.name
    if name == "mnot":
        return Lam(A, Lam(Wv, App(logical("not"), App(A, Wv))))
    if name in ("mand", "mor", "mimplies", "miff"):
        return Lam(A, Lam(B, Lam(Wv, _b(name[1:], App(A, Wv), App(B, Wv)))))
    if name == "box":
        return Lam(A, Lam(Wv, _q("forall", Vv, _b("implies", _acc(Wv, Vv), App(A, Vv)))))
    if name == "dia":
        return Lam(A, Lam(Wv, _q("exists", Vv, _b("and", _acc(Wv, Vv), App(A, Vv)))))
    if name == "rigid":
        P = _v("P", O)
        return Lam(P, Lam(Wv, P))
    if name in ("mforall", "mexists"):
        tau = quant_index(c)
        P, X = _v("P", Fun(tau, WO)), _v("X", tau)
        return Lam(P, Lam(Wv, _q(name[1:], X, App(App(P, X), Wv))))
    if name == "mforallA":
        P, X = _v("P", Fun(E, WO)), _v("X", E)
        body = _b("implies", _exists_at(X, Wv), App(App(P, X), Wv))
        return Lam(P, Lam(Wv, _q("forall", X, body)))
    if name == "mexistsA":
        P, X = _v("P", Fun(E, WO)), _v("X", E)
        body = _b("and", _exists_at(X, Wv), App(App(P, X), Wv))
        return Lam(P, Lam(Wv, _q("exists", X, body)))
    return None


def _unfold(t: Term, seen: set) -> Term:
    if isinstance(t, Const):
        d = definition(t)
        if d is None:
            return t
        seen.add(t.name)
        return d
    if isinstance(t, Var):
        return t
    if isinstance(t, Lam):
        return Lam(t.var, _unfold(t.body, seen))
    return App(_unfold(t.fn, seen), _unfold(t.arg, seen))


def expand(t: Term) -> tuple[Term, set]:
    """Unfold lifted connectives in t and normalize; also report which were used."""
    seen: set = set()
    return normalize(_unfold(t, seen)), seen


def embed(phi: Term, spec: LogicSpec = K) -> EmbeddingResult:
    """Compile a surface formula (type w>o, or o for world-independent ones)."""
    if phi.ty not in (WO, O):
        raise EmbeddingError(f"can only embed formulas, got type {phi.ty}")
    body, used = expand(phi)
    if used & {"mforallA", "mexistsA"} and spec.domain != "actualist":
        raise EmbeddingError(
            "actualist quantifier used under the constant-domain policy; "
            "switch the logic's domain policy to 'actualist'"
        )
    if phi.ty == O:
        body = Lam(_v("W"), body)
    aux = {ACC: AUX_TYPES[ACC]}
    if spec.domain == "actualist":
        aux[EXISTS_AT] = AUX_TYPES[EXISTS_AT]
    if spec.validity == "local":
        aux[DESIGNATED] = AUX_TYPES[DESIGNATED]
    return EmbeddingResult(body, tuple(frame_axioms(spec)), aux, phi, spec)


def validize(t: Term, mode: str = "global") -> Term:
    """Close a truth set: truth at every world (global) or at w0 (local)."""
    if t.ty != WO:
        raise EmbeddingError(f"validize needs type w>o, got {t.ty}")
    if mode == "local":
        return normalize(App(t, Const(DESIGNATED, W)))
    if mode != "global":
        raise EmbeddingError(f"unknown validity mode {mode!r}")
    w = _v("W")
    body = normalize(App(t, w))
    if w not in free_vars(body):
        return body
    return App(logical("forall", W), Lam(w, body))


def frame_axioms(spec: LogicSpec) -> list[NamedFormula]:
    U, V, X = _v("U"), _v("V"), _v("X")
    out = []
    for cond in FRAME_CONDITIONS:
        if cond not in spec.frame:
            continue
        if cond == "reflexive":
            t = _q("forall", U, _acc(U, U))
        elif cond == "symmetric":
            t = _q("forall", U, _q("forall", V, _b("implies", _acc(U, V), _acc(V, U))))
        elif cond == "transitive":
            t = _q("forall", U, _q("forall", V, _q("forall", X, _b(
                "implies", _b("and", _acc(U, V), _acc(V, X)), _acc(U, X)))))
        else:  # euclidean
            t = _q("forall", U, _q("forall", V, _q("forall", X, _b(
                "implies", _b("and", _acc(U, V), _acc(U, X)), _acc(V, X)))))
        out.append(NamedFormula(f"frame_{cond}", "frame-axiom", t))
    return out


def frame_axioms_for(conditions) -> list[NamedFormula]:
    """frame_axioms for a bare collection of condition names."""
    return frame_axioms(LogicSpec(frozenset(conditions)))


def signature_for(sig: Signature, spec: LogicSpec) -> Signature:
    """sig extended with the auxiliary constants the embedding may mention."""
    names = [ACC]
    if spec.domain == "actualist":
        names.append(EXISTS_AT)
    if spec.validity == "local":
        names.append(DESIGNATED)
    return sig.with_aux(*names)
