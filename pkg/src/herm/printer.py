"""Render terms in the concrete syntax accepted by :mod:`herm.parser`."""
from __future__ import annotations

import re

from .terms import (
    ACTUALIST_QUANTIFIERS,
    EQUALITY,
    MODAL_QUANTIFIERS,
    QUANTIFIERS,
    App,
    Const,
    Lam,
    Term,
    Var,
    arg_types,
    free_vars,
    head_args,
    quant_index,
)

_VAR_NAME = re.compile(r"[A-Z][A-Za-z0-9_]*$")

_BINARY = {
    "and": "&", "or": "|", "implies": "=>", "iff": "<=>",
    "mand": "&", "mor": "|", "mimplies": "=>", "miff": "<=>",
}
_UNARY = {"not": "~", "mnot": "~", "box": "box", "dia": "dia"}
_QUANT = {"forall": "!", "exists": "?", "mforall": "!", "mexists": "?",
          "mforallA": "!A", "mexistsA": "?A"}
_ARITY = {**{k: 2 for k in _BINARY}, **{k: 1 for k in _UNARY}, "rigid": 1, EQUALITY: 2,
          **{k: 1 for k in QUANTIFIERS + MODAL_QUANTIFIERS + ACTUALIST_QUANTIFIERS}}

# precedence: larger binds tighter
_ATOM, _APP, _EQ, _UN, _CONJ, _DISJ, _IMPL, _IFF, _BIND = 9, 8, 7, 6, 5, 4, 3, 2, 1
_BIN_PREC = {"&": _CONJ, "|": _DISJ, "=>": _IMPL, "<=>": _IFF}


def show(t: Term) -> str:
    return _Printer().render(t)[0]


def show_type(ty) -> str:
    return str(ty)


class _Printer:
    def __init__(self):
        self.counter = 0

    def fresh(self, stem: str, avoid: set[str]) -> str:
        while True:
            self.counter += 1
            name = f"{stem}{self.counter}"
            if name not in avoid:
                return name

    def var_name(self, v: Var, body: Term, scope: dict) -> str:
        avoid = {scope.get(x, x.name) for x in free_vars(body) if x != v}
        name = v.name if _VAR_NAME.match(v.name) else (v.name[:1].upper() + v.name[1:] or "X")
        if not _VAR_NAME.match(name):
            name = "X"
        if name in avoid:
            name = self.fresh(name.rstrip("0123456789") or "X", avoid)
        return name

    def render(self, t: Term, scope: dict | None = None) -> tuple[str, int]:
        scope = scope or {}
        if isinstance(t, Var):
            name = scope.get(t, t.name)
            if not _VAR_NAME.match(name):
                name = name[:1].upper() + name[1:]
            return name, _ATOM
        if isinstance(t, Const):
            if t.name == "true":
                return "$true", _ATOM
            if t.name == "false":
                return "$false", _ATOM
            if t.name in _ARITY:
                return self.render(self._expand(t, []), scope)
            return t.name, _ATOM
        if isinstance(t, Lam):
            return self.binder("^", t, scope)
        head, args = head_args(t)
        if isinstance(head, Const) and head.name in _ARITY:
            n = _ARITY[head.name]
            if len(args) < n:
                return self.render(self._expand(head, args), scope)
            if len(args) == n:
                return self.logical(head, args, scope)
            # over-applied logical constant (only possible for quantifier-like heads)
        fn_s, fn_p = self.render(head, scope)
        parts = [fn_s if fn_p >= _APP else f"({fn_s})"]
        for a in args:
            s, p = self.render(a, scope)
            parts.append(s if p == _ATOM else f"({s})")
        return " @ ".join(parts), _APP

    def _expand(self, head: Const, args: list[Term]) -> Term:
        """Eta-expand a partially applied logical constant."""
        doms, _ = arg_types(head.ty)
        t: Term = head
        for a in args:
            t = App(t, a)
        vs = []
        for i, d in enumerate(doms[len(args):_ARITY[head.name]]):
            v = Var(f"X{i}", d)
            vs.append(v)
            t = App(t, v)
        for v in reversed(vs):
            t = Lam(v, t)
        return t

    def binder(self, sym: str, t: Lam, scope: dict) -> tuple[str, int]:
        name = self.var_name(t.var, t.body, scope)
        inner = dict(scope)
        inner[t.var] = name
        body, _ = self.render(t.body, inner)
        return f"{sym} [{name}:{t.var.ty}]: {body}", _BIND

    def logical(self, head: Const, args: list[Term], scope: dict) -> tuple[str, int]:
        name = head.name
        if name == "rigid":
            return self.render(args[0], scope)
        if name in _UNARY:
            s, p = self.render(args[0], scope)
            if p < _ATOM:
                s = f"({s})"
            return f"{_UNARY[name]} {s}", _UN
        if name in _BINARY:
            op = _BINARY[name]
            prec = _BIN_PREC[op]
            ls, lp = self.render(args[0], scope)
            rs, rp = self.render(args[1], scope)
            # => is right-associative; the others are printed left-nested
            left_ok = lp > prec or (lp == prec and op in ("&", "|"))
            right_ok = rp > prec or (rp == prec and op == "=>")
            if not left_ok:
                ls = f"({ls})"
            if not right_ok:
                rs = f"({rs})"
            return f"{ls} {op} {rs}", prec
        if name == EQUALITY:
            ls, lp = self.render(args[0], scope)
            rs, rp = self.render(args[1], scope)
            ls = ls if lp >= _APP else f"({ls})"
            rs = rs if rp >= _APP else f"({rs})"
            return f"{ls} = {rs}", _EQ
        # quantifiers
        body = args[0]
        if not isinstance(body, Lam):
            v = Var("X", quant_index(head))
            avoid = {x.name for x in free_vars(body)}
            if v.name in avoid:
                v = Var(self.fresh("X", avoid), v.ty)
            body = Lam(v, App(body, v))
        return self.binder(_QUANT[name], body, scope)


__all__ = ["show", "show_type"]
