"""Reader for the THF-flavoured formula syntax.

Connectives are overloaded by type: ``p & q`` is HOL conjunction when both
sides have type o and lifted (modal) conjunction when both have type w>o.
A side of type o next to one of type w>o is coerced with ``rigid``.
See docs/grammar.md for the grammar.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, SignatureError, TypeMismatch
from .terms import (
    E,
    FALSE,
    O,
    TRUE,
    WO,
    App,
    Fun,
    Lam,
    Signature,
    Term,
    Ty,
    Var,
    is_lifted,
    logical,
)

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<op><=>|=>|!=|!A(?![A-Za-z0-9_])|\?A(?![A-Za-z0-9_])|[()\[\],:@&|~=>^!?])
  | (?P<kw>\$true|\$false)
  | (?P<var>[A-Z][A-Za-z0-9_]*)
  | (?P<ident>[a-z][A-Za-z0-9_]*)
    """,
    re.VERBOSE,
)

KEYWORDS = {"box", "dia"}


@dataclass
class Token:
    kind: str
    text: str
    start: int
    end: int


def tokenize(src: str) -> list[Token]:
    toks = []
    pos = 0
    while pos < len(src):
        m = _TOKEN_RE.match(src, pos)
        if not m:
            raise ParseError(f"unexpected character {src[pos]!r}", (pos, pos + 1), src)
        kind = m.lastgroup
        text = m.group()
        if kind != "ws":
            if kind == "ident" and text in KEYWORDS:
                kind = "kw"
            toks.append(Token(kind, text, m.start(), m.end()))
        pos = m.end()
    toks.append(Token("eof", "", len(src), len(src)))
    return toks


# Untyped syntax tree: (tag, span, *payload)


class _Reader:
    def __init__(self, src: str):
        self.src = src
        self.toks = tokenize(src)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, text: str) -> Token:
        t = self.tok
        if t.text != text or t.kind not in ("op", "kw"):
            raise ParseError(f"expected {text!r}, found {t.text or 'end of input'!r}", (t.start, t.end), self.src)
        return self.next()

    def error(self, msg: str) -> ParseError:
        t = self.tok
        return ParseError(msg, (t.start, t.end), self.src)

    def at(self, *texts: str) -> bool:
        return self.tok.kind in ("op", "kw") and self.tok.text in texts

    # formula := binder | iff
    def formula(self):
        if self.at("!", "?", "!A", "?A", "^"):
            return self.binder()
        return self.iff()

    def binder(self):
        q = self.next()
        self.expect("[")
        decls = [self.vdecl()]
        while self.at(","):
            self.next()
            decls.append(self.vdecl())
        self.expect("]")
        self.expect(":")
        body = self.formula()
        return ("bind", (q.start, body[1][1]), q.text, decls, body)

    def vdecl(self):
        t = self.tok
        if t.kind != "var":
            raise self.error("expected a variable (uppercase identifier)")
        self.next()
        self.expect(":")
        return (t.text, self.type_expr(), (t.start, t.end))

    def type_expr(self):
        if self.at("("):
            self.next()
            left = self.type_expr()
            self.expect(")")
        else:
            t = self.tok
            if t.kind != "ident":
                raise self.error("expected a type")
            self.next()
            left = ("base", t.text, (t.start, t.end))
        if self.at(">"):
            self.next()
            return ("fun", left, self.type_expr())
        return left

    def iff(self):
        left = self.impl()
        while self.at("<=>"):
            self.next()
            right = self.impl()
            left = ("bin", (left[1][0], right[1][1]), "<=>", left, right)
        return left

    def impl(self):
        left = self.disj()
        if self.at("=>"):
            self.next()
            right = self.impl()
            return ("bin", (left[1][0], right[1][1]), "=>", left, right)
        return left

    def disj(self):
        left = self.conj()
        while self.at("|"):
            self.next()
            right = self.conj()
            left = ("bin", (left[1][0], right[1][1]), "|", left, right)
        return left

    def conj(self):
        left = self.unary()
        while self.at("&"):
            self.next()
            right = self.unary()
            left = ("bin", (left[1][0], right[1][1]), "&", left, right)
        return left

    def unary(self):
        if self.at("~", "box", "dia"):
            t = self.next()
            arg = self.unary()
            return ("un", (t.start, arg[1][1]), t.text, arg)
        if self.at("!", "?", "!A", "?A", "^"):
            return self.binder()
        return self.equation()

    def equation(self):
        left = self.application()
        if self.at("=", "!="):
            op = self.next().text
            right = self.application()
            return ("eq", (left[1][0], right[1][1]), op, left, right)
        return left

    def application(self):
        node = self.atom()
        while self.at("@"):
            self.next()
            arg = self.atom()
            node = ("app", (node[1][0], arg[1][1]), node, arg)
        return node

    def atom(self):
        t = self.tok
        if t.kind == "ident":
            self.next()
            return ("const", (t.start, t.end), t.text)
        if t.kind == "var":
            self.next()
            return ("var", (t.start, t.end), t.text)
        if t.kind == "kw" and t.text in ("$true", "$false"):
            self.next()
            return ("truth", (t.start, t.end), t.text == "$true")
        if self.at("("):
            self.next()
            inner = self.formula()
            close = self.expect(")")
            return (inner[0], (t.start, close.end), *inner[2:])
        raise self.error(f"unexpected {t.text or 'end of input'!r}")


def _type_of(node, sig: Signature, src: str) -> Ty:
    if node[0] == "fun":
        return Fun(_type_of(node[1], sig, src), _type_of(node[2], sig, src))
    _, name, span = node
    if name not in sig.bases:
        raise ParseError(f"unknown base type {name!r}", span, src)
    return sig.bases[name]


def _coerce(t: Term) -> Term:
    return App(logical("rigid"), t) if t.ty == O else t


class _Elaborator:
    def __init__(self, sig: Signature, src: str):
        self.sig = sig
        self.src = src

    def fail(self, msg: str, span) -> ParseError:
        return ParseError(msg, span, self.src)

    def run(self, node, env: dict) -> Term:
        tag, span = node[0], node[1]
        if tag == "const":
            name = node[2]
            if name not in self.sig:
                raise self.fail(f"unknown constant {name!r}", span)
            return self.sig.const(name)
        if tag == "var":
            if node[2] not in env:
                raise self.fail(f"unbound variable {node[2]}", span)
            return env[node[2]]
        if tag == "truth":
            return TRUE if node[2] else FALSE
        if tag == "app":
            fn = self.run(node[2], env)
            arg = self.run(node[3], env)
            if not isinstance(fn.ty, Fun) or fn.ty.dom != arg.ty:
                raise self.fail(
                    f"type mismatch: {fn} : {fn.ty} cannot be applied to {arg} : {arg.ty}", span
                )
            return App(fn, arg)
        if tag == "un":
            op, arg = node[2], self.run(node[3], env)
            if op == "~":
                if arg.ty == O:
                    return App(logical("not"), arg)
                if is_lifted(arg.ty):
                    return App(logical("mnot"), arg)
                raise self.fail(f"'~' needs a formula, got type {arg.ty}", span)
            arg = _coerce(arg)
            if not is_lifted(arg.ty):
                raise self.fail(f"'{op}' needs type w>o, got {arg.ty}", span)
            return App(logical(op), arg)
        if tag == "bin":
            op = {"&": "and", "|": "or", "=>": "implies", "<=>": "iff"}[node[2]]
            a, b = self.run(node[3], env), self.run(node[4], env)
            if a.ty == O and b.ty == O:
                return App(App(logical(op), a), b)
            a, b = _coerce(a), _coerce(b)
            if is_lifted(a.ty) and is_lifted(b.ty):
                return App(App(logical("m" + op), a), b)
            raise self.fail(f"'{node[2]}' cannot combine types {a.ty} and {b.ty}", span)
        if tag == "eq":
            a, b = self.run(node[3], env), self.run(node[4], env)
            if a.ty != b.ty:
                raise self.fail(f"type mismatch in equation: {a.ty} vs {b.ty}", span)
            t = App(App(logical("eq", a.ty), a), b)
            return App(logical("not"), t) if node[2] == "!=" else t
        if tag == "bind":
            q, decls, body_node = node[2], node[3], node[4]
            inner = dict(env)
            vs = []
            for name, ty_node, _vspan in decls:
                v = Var(name, _type_of(ty_node, self.sig, self.src))
                inner[name] = v
                vs.append(v)
            body = self.run(body_node, inner)
            for v in reversed(vs):
                body = self._bind(q, v, body, span)
            return body
        raise AssertionError(tag)

    def _bind(self, q: str, v: Var, body: Term, span) -> Term:
        if q == "^":
            return Lam(v, body)
        if q in ("!A", "?A"):
            if v.ty != E:
                raise self.fail("actualist quantifiers range over individuals (type e)", span)
            body = _coerce(body)
            name = "mforallA" if q == "!A" else "mexistsA"
            return App(logical(name, E), Lam(v, body))
        name = "forall" if q == "!" else "exists"
        if body.ty == O:
            return App(logical(name, v.ty), Lam(v, body))
        if is_lifted(body.ty):
            return App(logical("m" + name, v.ty), Lam(v, body))
        raise self.fail(f"quantified body must be a formula, got type {body.ty}", span)


def parse(text: str, sig: Signature, env: dict | None = None) -> Term:
    """Parse and type-check a formula or term against ``sig``."""
    r = _Reader(text)
    node = r.formula()
    if r.tok.kind != "eof":
        raise r.error(f"unexpected {r.tok.text!r} after end of term")
    try:
        return _Elaborator(sig, text).run(node, dict(env or {}))
    except (TypeMismatch, SignatureError) as exc:
        raise ParseError(str(exc), node[1], text) from exc


def parse_type(text: str, sig: Signature | None = None) -> Ty:
    sig = sig or Signature()
    r = _Reader(text)
    node = r.type_expr()
    if r.tok.kind != "eof":
        raise r.error("trailing input after type")
    return _type_of(node, sig, text)


def parse_formula(text: str, sig: Signature) -> Term:
    """Parse a formula; the result must have type o or w>o."""
    t = parse(text, sig)
    if t.ty not in (O, WO):
        raise ParseError(f"expected a formula (type o or w>o), got {t.ty}", (0, len(text)), text)
    return t


__all__ = ["parse", "parse_formula", "parse_type", "tokenize"]
