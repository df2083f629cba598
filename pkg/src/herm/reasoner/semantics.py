"""Finite models and direct evaluation of HOL terms over them.

Values: o is bool, every other base type is an index ``0..n-1``.
Interpretation tables for a constant of type ``t1>...>tn>b`` are nested
tuples indexed by argument values.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable

from ..embedding import definition
from ..errors import HermError
from ..terms import (
    DESIGNATED,
    EQUALITY,
    HOL_CONNECTIVES,
    O,
    Base,
    Const,
    Fun,
    Lam,
    Term,
    Ty,
    Var,
    arg_types,
    quant_index,
)

FUN_DOMAIN_CAP = 4096


@dataclass(frozen=True)
class FiniteModel:
    sizes: dict  # base-type name -> domain size (o excluded)
    interp: dict  # constant name -> table
    types: dict = field(default_factory=dict)  # constant name -> Ty

    @property
    def worlds(self) -> int:
        return self.sizes.get("w", 1)

    @property
    def individuals(self) -> int:
        return self.sizes.get("e", 1)

    @property
    def designated(self) -> int | None:
        return self.interp.get(DESIGNATED)

    def size(self, ty: Base) -> int:
        if ty == O:
            return 2
        return self.sizes.get(ty.name, 1)

    def key(self) -> tuple:
        return (
            tuple(sorted(self.sizes.items())),
            tuple(sorted(self.interp.items())),
        )

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, FiniteModel) and self.key() == other.key()

    def to_dict(self) -> dict:
        return {
            "sizes": dict(sorted(self.sizes.items())),
            "interp": {k: _jsonable(v) for k, v in sorted(self.interp.items())},
        }

    def describe(self) -> str:
        """Stable human-readable rendering: worlds, relation, extensions."""
        lines = ["domains: " + ", ".join(f"|{k}|={v}" for k, v in sorted(self.sizes.items()))]
        for name in sorted(self.interp):
            lines.append(f"  {name} = {_render_table(self.interp[name], self.types.get(name))}")
        return "\n".join(lines)


def _jsonable(v):
    if isinstance(v, tuple):
        return [_jsonable(x) for x in v]
    return v


def _render_table(table, ty) -> str:
    if isinstance(ty, Base) and ty != O:
        return f"{ty.name}{table}"
    if ty is None or not isinstance(ty, Fun):
        return str(_jsonable(table)).replace("True", "1").replace("False", "0")
    doms, cod = arg_types(ty)
    if cod == O and all(isinstance(d, Base) and d != O for d in doms):
        # relation: list the tuples it holds for
        rows = []
        for idx in itertools.product(*[range(len(_level(table, i))) for i in range(len(doms))]):
            v = table
            for i in idx:
                v = v[i]
            if v:
                rows.append("(" + ",".join(f"{d.name}{i}" for d, i in zip(doms, idx)) + ")")
        return "{" + ", ".join(rows) + "}"
    return str(_jsonable(table)).replace("True", "1").replace("False", "0")


def _level(table, depth):
    for _ in range(depth):
        table = table[0]
    return table


# ---------------------------------------------------------------------------
# domains


def domain(ty: Ty, model: FiniteModel) -> list:
    """All values of a type in canonical order."""
    if ty == O:
        return [False, True]
    if isinstance(ty, Base):
        return list(range(model.size(ty)))
    dom = domain(ty.dom, model)
    cod = domain(ty.cod, model)
    count = len(cod) ** len(dom)
    if count > FUN_DOMAIN_CAP:
        raise HermError(f"function space {ty} too large to enumerate ({count})")
    return [tuple(vals) for vals in itertools.product(cod, repeat=len(dom))]


def _index(value, ty: Ty, model: FiniteModel):
    if isinstance(ty, Base):
        return int(value)
    return domain(ty, model).index(materialize(value, ty, model))


def materialize(value, ty: Ty, model: FiniteModel):
    """Turn closures into tuple tables so values are comparable and hashable."""
    if not isinstance(ty, Fun):
        return value
    if isinstance(value, tuple):
        return value
    return tuple(materialize(ap(value, x, ty.dom, model), ty.cod, model) for x in domain(ty.dom, model))


def ap(f, x, dom_ty: Ty, model: FiniteModel):
    if callable(f):
        return f(x)
    return f[_index(x, dom_ty, model)]


# ---------------------------------------------------------------------------
# evaluation


def evaluate(t: Term, model: FiniteModel, env: dict | None = None):
    """Value of t in model under the assignment env (Var -> value)."""
    value = _Evaluator(model).ev(t, env or {})
    return materialize(value, t.ty, model)


def holds(t: Term, model: FiniteModel, env: dict | None = None) -> bool:
    if t.ty != O:
        raise HermError(f"holds() needs a formula of type o, got {t.ty}")
    return bool(evaluate(t, model, env))


class _Evaluator:
    def __init__(self, model: FiniteModel):
        self.m = model

    def ev(self, t: Term, env: dict) -> Any:
        if isinstance(t, Var):
            try:
                return env[t]
            except KeyError:
                raise HermError(f"unbound variable {t.name}") from None
        if isinstance(t, Const):
            return self.const(t)
        if isinstance(t, Lam):
            v, body = t.var, t.body
            return lambda x: self.ev(body, {**env, v: x})
        return ap(self.ev(t.fn, env), self.ev(t.arg, env), t.fn.ty.dom, self.m)

    def const(self, c: Const) -> Any:
        name = c.name
        m = self.m
        if name in HOL_CONNECTIVES:
            return _CONNECTIVES[name]
        if name in ("forall", "exists"):
            tau = quant_index(c)
            dom = domain(tau, m)
            if name == "forall":
                return lambda f: all(ap(f, x, tau, m) for x in dom)
            return lambda f: any(ap(f, x, tau, m) for x in dom)
        if name == EQUALITY:
            tau = quant_index(c)
            return lambda a: lambda b: materialize(a, tau, m) == materialize(b, tau, m)
        d = definition(c)
        if d is not None:
            return self.ev(d, {})
        try:
            return m.interp[name]
        except KeyError:
            raise HermError(f"model does not interpret {name}") from None


_CONNECTIVES: dict[str, Callable | bool] = {
    "not": lambda a: not a,
    "and": lambda a: lambda b: a and b,
    "or": lambda a: lambda b: a or b,
    "implies": lambda a: lambda b: (not a) or b,
    "iff": lambda a: lambda b: a == b,
    "true": True,
    "false": False,
}


def default_table(ty: Ty, model: FiniteModel):
    """Lex-least interpretation of a type: all-false / index 0."""
    if ty == O:
        return False
    if isinstance(ty, Base):
        return 0
    return tuple(default_table(ty.cod, model) for _ in domain(ty.dom, model))


def make_model(sizes: dict, interp: dict, types: dict) -> FiniteModel:
    return FiniteModel(dict(sizes), dict(interp), dict(types))


def world_model(n_worlds: int, acc, valuation: dict, extra: dict | None = None,
                n_individuals: int = 1) -> FiniteModel:
    """Convenience constructor for propositional Kripke models.

    acc is a set of (u, v) pairs; valuation maps a proposition name to
    the set of worlds where it holds.
    """
    from ..terms import ACC, AUX_TYPES, WO

    interp = {ACC: tuple(tuple((u, v) in acc for v in range(n_worlds)) for u in range(n_worlds))}
    types = {ACC: AUX_TYPES[ACC]}
    for p, ws in valuation.items():
        interp[p] = tuple(w in ws for w in range(n_worlds))
        types[p] = WO
    for name, (ty, table) in (extra or {}).items():
        interp[name] = table
        types[name] = ty
    return FiniteModel({"w": n_worlds, "e": n_individuals}, interp, types)


__all__ = [
    "FiniteModel",
    "domain",
    "evaluate",
    "holds",
    "materialize",
    "default_table",
    "world_model",
]
