"""Simply typed lambda terms over the base types o, w and e.

Terms are immutable. Every constructor checks types eagerly, so a Term
that exists is well typed and carries its type in ``.ty``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Union

from .errors import SignatureError, TypeMismatch


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class Fun:
    dom: "Ty"
    cod: "Ty"

    def __str__(self) -> str:
        left = f"({self.dom})" if isinstance(self.dom, Fun) else str(self.dom)
        return f"{left}>{self.cod}"


Ty = Union[Base, Fun]

O = Base("o")
W = Base("w")
E = Base("e")
BUILTIN_BASES = ("o", "w", "e")

WO = Fun(W, O)  # lifted propositions
WWO = Fun(W, Fun(W, O))


def arrow(*tys: Ty) -> Ty:
    """Right-associated function type: arrow(a, b, c) == a>(b>c)."""
    *doms, cod = tys
    for d in reversed(doms):
        cod = Fun(d, cod)
    return cod


def arg_types(ty: Ty) -> tuple[list[Ty], Ty]:
    args = []
    while isinstance(ty, Fun):
        args.append(ty.dom)
        ty = ty.cod
    return args, ty


def is_lifted(ty: Ty) -> bool:
    """True for w>o."""
    return ty == WO


# ---------------------------------------------------------------------------
# Terms


class Term:
    """Base class; use Var, Const, Lam, App."""

    ty: Ty

    def __str__(self) -> str:
        from .printer import show

        return show(self)


@dataclass(frozen=True, eq=True)
class Var(Term):
    name: str
    ty: Ty


@dataclass(frozen=True, eq=True)
class Const(Term):
    name: str
    ty: Ty


@dataclass(frozen=True, eq=True)
class Lam(Term):
    var: Var
    body: Term
    ty: Ty = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "ty", Fun(self.var.ty, self.body.ty))


@dataclass(frozen=True, eq=True)
class App(Term):
    fn: Term
    arg: Term
    ty: Ty = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        fty = self.fn.ty
        if not isinstance(fty, Fun):
            raise TypeMismatch(f"cannot apply {self.fn} of non-function type {fty}")
        if fty.dom != self.arg.ty:
            raise TypeMismatch(
                f"argument {self.arg} has type {self.arg.ty}, expected {fty.dom}"
            )
        object.__setattr__(self, "ty", fty.cod)


def apply(fn: Term, *args: Term) -> Term:
    for a in args:
        fn = App(fn, a)
    return fn


def head_args(t: Term) -> tuple[Term, list[Term]]:
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fn
    args.reverse()
    return t, args


def lam(vars_: Iterable[Var], body: Term) -> Term:
    for v in reversed(list(vars_)):
        body = Lam(v, body)
    return body


# ---------------------------------------------------------------------------
# Logical constants
#
# HOL connectives work on o; the "m"-prefixed ones are their lifted
# counterparts on w>o used by the modal surface language.

HOL_CONNECTIVES = {
    "not": arrow(O, O),
    "and": arrow(O, O, O),
    "or": arrow(O, O, O),
    "implies": arrow(O, O, O),
    "iff": arrow(O, O, O),
    "true": O,
    "false": O,
}
MODAL_CONNECTIVES = {
    "mnot": arrow(WO, WO),
    "mand": arrow(WO, WO, WO),
    "mor": arrow(WO, WO, WO),
    "mimplies": arrow(WO, WO, WO),
    "miff": arrow(WO, WO, WO),
    "box": arrow(WO, WO),
    "dia": arrow(WO, WO),
    "rigid": arrow(O, WO),
}
# type-indexed families: the index type is recovered from the constant's type
QUANTIFIERS = ("forall", "exists")
MODAL_QUANTIFIERS = ("mforall", "mexists")
ACTUALIST_QUANTIFIERS = ("mforallA", "mexistsA")
EQUALITY = "eq"

LOGICAL_NAMES = frozenset(
    list(HOL_CONNECTIVES)
    + list(MODAL_CONNECTIVES)
    + list(QUANTIFIERS)
    + list(MODAL_QUANTIFIERS)
    + list(ACTUALIST_QUANTIFIERS)
    + [EQUALITY]
)
# coercion, not a logical symbol for simplicity counting
UNCOUNTED = frozenset({"rigid"})

# auxiliary constants introduced by the embedding
ACC = "acc"
EXISTS_AT = "existsAt"
DESIGNATED = "w0"
AUX_TYPES = {ACC: WWO, EXISTS_AT: arrow(E, W, O), DESIGNATED: W}

RESERVED = LOGICAL_NAMES | frozenset(AUX_TYPES)


def is_logical(c: Term) -> bool:
    return isinstance(c, Const) and c.name in LOGICAL_NAMES


def logical(name: str, index: Ty | None = None) -> Const:
    """The logical constant ``name``; quantifiers and eq take an index type."""
    if name in HOL_CONNECTIVES:
        return Const(name, HOL_CONNECTIVES[name])
    if name in MODAL_CONNECTIVES:
        return Const(name, MODAL_CONNECTIVES[name])
    if index is None:
        raise ValueError(f"{name} needs an index type")
    if name in QUANTIFIERS:
        return Const(name, Fun(Fun(index, O), O))
    if name in MODAL_QUANTIFIERS:
        return Const(name, Fun(Fun(index, WO), WO))
    if name in ACTUALIST_QUANTIFIERS:
        if index != E:
            raise TypeMismatch("actualist quantifiers range over e only")
        return Const(name, Fun(Fun(E, WO), WO))
    if name == EQUALITY:
        return Const(name, arrow(index, index, O))
    raise ValueError(f"unknown logical constant {name}")


def quant_index(c: Const) -> Ty:
    """Index type of a quantifier or eq constant."""
    assert isinstance(c.ty, Fun)
    if c.name == EQUALITY:
        return c.ty.dom
    assert isinstance(c.ty.dom, Fun)
    return c.ty.dom.dom


TRUE = logical("true")
FALSE = logical("false")


def Not(a: Term) -> Term:
    return App(logical("mnot" if is_lifted(a.ty) else "not"), a)


def _bin(hol: str, a: Term, b: Term) -> Term:
    name = ("m" + hol) if is_lifted(a.ty) else hol
    return App(App(logical(name), a), b)


def And(a: Term, b: Term) -> Term:
    return _bin("and", a, b)


def Or(a: Term, b: Term) -> Term:
    return _bin("or", a, b)


def Implies(a: Term, b: Term) -> Term:
    return _bin("implies", a, b)


def Iff(a: Term, b: Term) -> Term:
    return _bin("iff", a, b)


def Box(a: Term) -> Term:
    return App(logical("box"), a)


def Dia(a: Term) -> Term:
    return App(logical("dia"), a)


def Rigid(a: Term) -> Term:
    return App(logical("rigid"), a)


def Eq(a: Term, b: Term) -> Term:
    return App(App(logical(EQUALITY, a.ty), a), b)


def Forall(v: Var, body: Term) -> Term:
    name = "mforall" if is_lifted(body.ty) else "forall"
    return App(logical(name, v.ty), Lam(v, body))


def Exists(v: Var, body: Term) -> Term:
    name = "mexists" if is_lifted(body.ty) else "exists"
    return App(logical(name, v.ty), Lam(v, body))


def ForallA(v: Var, body: Term) -> Term:
    return App(logical("mforallA", v.ty), Lam(v, body))


def ExistsA(v: Var, body: Term) -> Term:
    return App(logical("mexistsA", v.ty), Lam(v, body))


def conj(ts: list[Term]) -> Term:
    if not ts:
        return TRUE
    out = ts[0]
    for t in ts[1:]:
        out = And(out, t)
    return out


# ---------------------------------------------------------------------------
# Signatures


class Signature:
    """Base types plus constant declarations.

    The logical constants are implicit and reserved; so are the
    auxiliary names ``acc``, ``existsAt`` and ``w0`` unless
    ``with_aux`` was used to add them.
    """

    def __init__(self, bases: Iterable[str] = (), constants: dict | None = None):
        self.bases: dict[str, Base] = {n: Base(n) for n in BUILTIN_BASES}
        self.constants: dict[str, Ty] = {}
        for b in bases:
            self.add_base(b)
        for name, ty in (constants or {}).items():
            self.declare(name, ty)

    def add_base(self, name: str) -> Base:
        if name in BUILTIN_BASES:
            raise SignatureError(f"base type {name!r} is built in")
        if name in self.bases:
            raise SignatureError(f"duplicate base type {name!r}")
        self.bases[name] = Base(name)
        return self.bases[name]

    def declare(self, name: str, ty: Ty | str, *, aux: bool = False) -> Const:
        if isinstance(ty, str):
            from .parser import parse_type

            ty = parse_type(ty, self)
        if name in self.constants:
            raise SignatureError(f"duplicate constant {name!r}")
        if name in LOGICAL_NAMES or (name in AUX_TYPES and not aux):
            raise SignatureError(f"{name!r} is a reserved name")
        if not name[:1].islower():
            raise SignatureError(f"constant {name!r} must start with a lowercase letter")
        for b in _bases_of(ty):
            if b.name not in self.bases:
                raise SignatureError(f"unknown base type {b.name!r} in {name}")
        self.constants[name] = ty
        return Const(name, ty)

    def const(self, name: str) -> Const:
        try:
            return Const(name, self.constants[name])
        except KeyError:
            raise SignatureError(f"unknown constant {name!r}") from None

    def __contains__(self, name: str) -> bool:
        return name in self.constants

    def with_aux(self, *names: str) -> "Signature":
        """Copy extended by auxiliary embedding constants."""
        out = self.copy()
        for n in names:
            if n not in out.constants:
                out.declare(n, AUX_TYPES[n], aux=True)
        return out

    def copy(self) -> "Signature":
        out = Signature()
        out.bases = dict(self.bases)
        out.constants = dict(self.constants)
        return out

    def check(self, t: Term) -> None:
        """Raise unless every non-logical constant of t is declared at its type."""
        for c in constants_of(t):
            if c.name in LOGICAL_NAMES:
                continue
            if self.constants.get(c.name) != c.ty:
                raise SignatureError(f"constant {c.name}:{c.ty} not in signature")

    def to_dict(self) -> dict:
        return {
            "bases": [b for b in self.bases if b not in BUILTIN_BASES],
            "constants": {n: str(t) for n, t in self.constants.items() if n not in AUX_TYPES},
        }

    def __eq__(self, other):
        return (
            isinstance(other, Signature)
            and self.bases == other.bases
            and self.constants == other.constants
        )

    def __repr__(self):
        return f"Signature({self.to_dict()!r})"


def _bases_of(ty: Ty) -> Iterator[Base]:
    if isinstance(ty, Base):
        yield ty
    else:
        yield from _bases_of(ty.dom)
        yield from _bases_of(ty.cod)


@dataclass(frozen=True)
class NamedFormula:
    label: str
    role: str  # premise | conclusion | meaning-postulate | frame-axiom | candidate
    term: Term

    ROLES = ("premise", "conclusion", "meaning-postulate", "frame-axiom", "candidate")

    def __post_init__(self):
        if self.role not in self.ROLES:
            raise ValueError(f"unknown role {self.role!r}")
        if self.term.ty not in (O, WO):
            raise TypeMismatch(f"formula {self.label} has type {self.term.ty}, expected o or w>o")


# ---------------------------------------------------------------------------
# Traversals


def subterms(t: Term) -> Iterator[Term]:
    stack = [t]
    while stack:
        s = stack.pop()
        yield s
        if isinstance(s, Lam):
            stack.append(s.body)
        elif isinstance(s, App):
            stack.append(s.arg)
            stack.append(s.fn)


def constants_of(t: Term) -> Iterator[Const]:
    return (s for s in subterms(t) if isinstance(s, Const))


def free_vars(t: Term) -> set[Var]:
    if isinstance(t, Var):
        return {t}
    if isinstance(t, Const):
        return set()
    if isinstance(t, Lam):
        return free_vars(t.body) - {t.var}
    return free_vars(t.fn) | free_vars(t.arg)


def _all_var_names(t: Term) -> set[str]:
    return {s.name for s in subterms(t) if isinstance(s, Var)} | {
        s.var.name for s in subterms(t) if isinstance(s, Lam)
    }


def fresh_var(base: Var, avoid: set[str]) -> Var:
    stem = base.name.rstrip("0123456789") or "X"
    for i in itertools.count(1):
        name = f"{stem}{i}"
        if name not in avoid:
            return Var(name, base.ty)
    raise AssertionError  # pragma: no cover


def subst(t: Term, v: Var, s: Term) -> Term:
    """Capture-avoiding t[s/v]."""
    return _subst(t, v, s, {x.name for x in free_vars(s)})


def _subst(t: Term, v: Var, s: Term, s_free: set[str]) -> Term:
    if isinstance(t, Var):
        return s if t == v else t
    if isinstance(t, Const):
        return t
    if isinstance(t, App):
        fn = _subst(t.fn, v, s, s_free)
        arg = _subst(t.arg, v, s, s_free)
        if fn is t.fn and arg is t.arg:
            return t
        return App(fn, arg)
    if t.var == v or v not in free_vars(t.body):
        return t
    bv, body = t.var, t.body
    if bv.name in s_free:
        nv = fresh_var(bv, s_free | _all_var_names(body) | {v.name})
        body = _subst(body, bv, nv, {nv.name})
        bv = nv
    return Lam(bv, _subst(body, v, s, s_free))


# ---------------------------------------------------------------------------
# Normalization


def beta_normal(t: Term) -> Term:
    if isinstance(t, (Var, Const)):
        return t
    if isinstance(t, Lam):
        body = beta_normal(t.body)
        return t if body is t.body else Lam(t.var, body)
    fn = beta_normal(t.fn)
    if isinstance(fn, Lam):
        return beta_normal(subst(fn.body, fn.var, t.arg))
    arg = beta_normal(t.arg)
    if fn is t.fn and arg is t.arg:
        return t
    return App(fn, arg)


def eta_reduce(t: Term) -> Term:
    if isinstance(t, (Var, Const)):
        return t
    if isinstance(t, App):
        fn, arg = eta_reduce(t.fn), eta_reduce(t.arg)
        return t if (fn is t.fn and arg is t.arg) else App(fn, arg)
    body = eta_reduce(t.body)
    if isinstance(body, App) and body.arg == t.var and t.var not in free_vars(body.fn):
        return body.fn
    return t if body is t.body else Lam(t.var, body)


def normalize(t: Term) -> Term:
    """Beta-eta normal form."""
    return eta_reduce(beta_normal(t))


def canonical(t: Term, *, normal: bool = True):
    """Nameless, hashable key; equal keys iff alpha-equivalent (after normalizing)."""
    if normal:
        t = normalize(t)
    return _nameless(t, ())


def _nameless(t: Term, bound: tuple):
    if isinstance(t, Var):
        for i, b in enumerate(reversed(bound)):
            if b == t:
                return ("b", i)
        return ("f", t.name, t.ty)
    if isinstance(t, Const):
        return ("c", t.name, t.ty)
    if isinstance(t, Lam):
        return ("l", t.var.ty, _nameless(t.body, bound + (t.var,)))
    return ("a", _nameless(t.fn, bound), _nameless(t.arg, bound))


def alpha_eq(a: Term, b: Term) -> bool:
    return canonical(a, normal=False) == canonical(b, normal=False)


def equivalent(a: Term, b: Term) -> bool:
    """Equal up to alpha, beta and eta."""
    return canonical(a) == canonical(b)


# ---------------------------------------------------------------------------
# Metrics


def symbol_count(t: Term) -> int:
    """Occurrences of logical symbols in the normal form of t."""
    return sum(
        1
        for s in subterms(normalize(t))
        if isinstance(s, Const) and s.name in LOGICAL_NAMES and s.name not in UNCOUNTED
    )


def free_symbols(t: Term) -> set[str]:
    """Non-logical constant names occurring in t."""
    return {c.name for c in constants_of(normalize(t)) if c.name not in LOGICAL_NAMES}
