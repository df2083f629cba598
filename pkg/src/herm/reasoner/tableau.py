"""Labelled tableau for quantified modal formulas over frame classes.

Surface formulas are translated to negation normal form over hashable
tuples::

    ('top',) ('bot',)
    ('lit', pos, pred, args)     world-relative atom
    ('rlit', pos, pred, args)    world-independent (rigid) atom
    ('eq', pos, a, b)            identity of individuals
    ('and', a, b) ('or', a, b) ('box', a) ('dia', a)
    ('all', var, ty, a) ('ex', var, ty, a)

with individual terms ``('c', name)`` or ``('v', id)``. Quantifiers are
instantiated over the constants of the problem plus a bounded number of
fresh witnesses. Anything the translation cannot handle is dropped and
the branch is marked incomplete: closing is still sound, an open branch
only yields a verdict if the model read off it survives evaluation.
"""
from __future__ import annotations

import itertools
import time
from collections import deque
from dataclasses import dataclass, field

from ..errors import BudgetExhausted, OutsideFragment
from ..terms import (
    AUX_TYPES,
    EQUALITY,
    EXISTS_AT,
    O,
    WO,
    Base,
    Const,
    Lam,
    Term,
    Var,
    App,
    beta_normal,
    head_args,
    quant_index,
)

TOP = ("top",)
BOT = ("bot",)
MAX_WITNESSES = 2
MAX_STEPS = 200_000


# ---------------------------------------------------------------------------
# translation to NNF


class _Translator:
    def __init__(self):
        self.counter = itertools.count()
        self.types: dict[str, object] = {}

    def run(self, t: Term, pos: bool = True):
        return self.nnf(beta_normal(t), pos, {})

    def term(self, t: Term, env: dict):
        if isinstance(t, Var):
            if t not in env:
                raise OutsideFragment(f"free variable {t.name}")
            return env[t]
        if isinstance(t, Const) and isinstance(t.ty, Base) and t.ty not in (O,) and t.ty.name != "w":
            self.types[t.name] = t.ty
            return ("c", t.name)
        raise OutsideFragment("only constants and bound variables may denote individuals")

    def nnf(self, t: Term, pos: bool, env: dict):
        head, args = head_args(t)
        if not isinstance(head, Const):
            raise OutsideFragment("formula with a non-constant head")
        name = head.name
        n = len(args)
        if name in ("not", "mnot") and n == 1:
            return self.nnf(args[0], not pos, env)
        if name in ("and", "mand", "or", "mor") and n == 2:
            a, b = self.nnf(args[0], pos, env), self.nnf(args[1], pos, env)
            conj = name.endswith("and")
            return ("and" if conj == pos else "or", a, b)
        if name in ("implies", "mimplies") and n == 2:
            a, b = self.nnf(args[0], not pos, env), self.nnf(args[1], pos, env)
            return ("or", a, b) if pos else ("and", a, b)
        if name in ("iff", "miff") and n == 2:
            ap, an = self.nnf(args[0], True, env), self.nnf(args[0], False, env)
            bp, bn = self.nnf(args[1], True, env), self.nnf(args[1], False, env)
            if pos:
                return ("and", ("or", an, bp), ("or", ap, bn))
            return ("or", ("and", ap, bn), ("and", an, bp))
        if name in ("box", "dia") and n == 1:
            body = self.nnf(args[0], pos, env)
            return ("box" if (name == "box") == pos else "dia", body)
        if name == "rigid" and n == 1:
            return self.nnf(args[0], pos, env)
        if name in ("true", "false") and n == 0:
            return TOP if (name == "true") == pos else BOT
        if name in ("forall", "exists", "mforall", "mexists", "mforallA", "mexistsA") and n == 1:
            return self.quant(head, args[0], pos, env)
        if name == EQUALITY and n == 2:
            tau = quant_index(head)
            if tau == O:
                return self.nnf(App(App(Const("iff", head.ty), args[0]), args[1]), pos, env)
            return ("eq", pos, self.term(args[0], env), self.term(args[1], env))
        if name in ("not", "and", "or", "implies", "iff", "mnot", "mand", "mor", "mimplies",
                    "miff", "box", "dia", "rigid", EQUALITY, "forall", "exists", "mforall",
                    "mexists", "mforallA", "mexistsA", "true", "false"):
            raise OutsideFragment(f"partially applied {name}")
        ty = t.ty
        if ty not in (O, WO):
            raise OutsideFragment(f"atom of type {ty}")
        self.types[name] = head.ty
        terms = tuple(self.term(a, env) for a in args)
        return ("lit" if ty == WO else "rlit", pos, name, terms)

    def quant(self, head: Const, body: Term, pos: bool, env: dict):
        name = head.name
        tau = quant_index(head)
        if not isinstance(tau, Base) or tau in (O,) or tau.name == "w":
            raise OutsideFragment(f"quantification over {tau}")
        if isinstance(body, Lam):
            var, inner = body.var, body.body
        else:
            var = Var("_x", tau)
            inner = beta_normal(App(body, var))
        v = ("v", next(self.counter))
        env = {**env, var: v}
        universal = name.startswith("mforall") or name == "forall"
        actualist = name.endswith("A")
        matrix = self.nnf(inner, pos, env)
        if actualist:
            self.types[EXISTS_AT] = AUX_TYPES[EXISTS_AT]
            guard = ("lit", True, EXISTS_AT, (v,))
            neg_guard = ("lit", False, EXISTS_AT, (v,))
        if universal == pos:
            if actualist:
                matrix = ("or", neg_guard, matrix)
            return ("all", v, tau.name, matrix)
        if actualist:
            matrix = ("and", guard, matrix)
        return ("ex", v, tau.name, matrix)


def translate(t: Term, pos: bool = True, types: dict | None = None):
    """NNF of t (or of its negation when pos is False)."""
    tr = _Translator()
    out = tr.run(t, pos)
    if types is not None:
        types.update(tr.types)
    return out


def subst(f, var, c):
    if f == var:
        return c
    if isinstance(f, tuple):
        if f and f[0] in ("all", "ex") and f[1] == var:
            return f
        return tuple(subst(x, var, c) for x in f)
    return f


def instantiate(f, name: str):
    """Body of a quantified formula with its variable replaced by a constant."""
    return subst(f[3], f[1], ("c", name))


def show_nnf(f) -> str:
    """Compact rendering used in proof dumps."""
    kind = f[0]
    if kind == "top":
        return "T"
    if kind == "bot":
        return "F"
    if kind in ("lit", "rlit"):
        s = f[2] + ("(" + ",".join(_show_term(a) for a in f[3]) + ")" if f[3] else "")
        return s if f[1] else "~" + s
    if kind == "eq":
        return f"{_show_term(f[2])}{'=' if f[1] else '!='}{_show_term(f[3])}"
    if kind in ("and", "or"):
        op = " & " if kind == "and" else " | "
        return "(" + show_nnf(f[1]) + op + show_nnf(f[2]) + ")"
    if kind in ("box", "dia"):
        return kind + " " + show_nnf(f[1])
    q = "!" if kind == "all" else "?"
    return f"{q}{_show_term(f[1])}:{f[2]}. {show_nnf(f[3])}"


def _show_term(t) -> str:
    return t[1] if t[0] == "c" else f"x{t[1]}"


# ---------------------------------------------------------------------------
# problems and branches


@dataclass
class Problem:
    """Initial tableau content plus what is needed to check a countermodel."""

    root: list  # NNF formulas at the root label
    glob: list  # NNF formulas holding at every label
    frame: frozenset
    types: dict  # constant name -> Ty (non-logical, incl. auxiliaries)
    universe: dict  # base name -> list of constant names
    verify: object = None  # callable(FiniteModel) -> bool
    incomplete: list = field(default_factory=list)
    local: bool = False


class Closed(Exception):
    def __init__(self, clash):
        self.clash = clash


class _UF:
    def __init__(self, parent=None):
        self.parent = dict(parent or {})

    def find(self, x):
        p = self.parent.get(x, x)
        if p == x:
            return x
        r = self.find(p)
        self.parent[x] = r
        return r

    def union(self, a, b) -> bool:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        lo, hi = sorted((ra, rb))
        self.parent[hi] = lo
        return True


def _canon_args(args, uf):
    return tuple(uf.find(a[1]) for a in args)


class Branch:
    def __init__(self, problem: Problem, depth_cap: int, deadline, counter):
        self.p = problem
        self.depth_cap = depth_cap
        self.deadline = deadline
        self.counter = counter  # shared one-element list: steps across branches
        self.sets: list[dict] = []
        self.depth: list[int] = []
        self.succ: list[list[int]] = []
        self.pred: list[list[int]] = []
        self.edges: dict = {}
        self.boxes: list[list] = []
        self.alls: list[list] = []
        self.ors: list[list] = []
        self.dias: list[list] = []
        self.exs: list[list] = []
        self.rigid: dict = {}  # rigid formula -> label where it was derived
        self.universe = {k: list(v) for k, v in problem.universe.items()}
        self.witnesses: dict[str, int] = {}
        self.ex_done: dict = {}
        self.uf = _UF()
        self.lits: list[dict] = []
        self.steps: list = []
        self.queue: deque = deque()
        self.incomplete = list(problem.incomplete)

    def copy(self) -> "Branch":
        b = Branch.__new__(Branch)
        b.p, b.depth_cap, b.deadline, b.counter = self.p, self.depth_cap, self.deadline, self.counter
        b.sets = [dict(s) for s in self.sets]
        b.depth = list(self.depth)
        b.succ = [list(x) for x in self.succ]
        b.pred = [list(x) for x in self.pred]
        b.edges = dict(self.edges)
        b.boxes = [list(x) for x in self.boxes]
        b.alls = [list(x) for x in self.alls]
        b.ors = [list(x) for x in self.ors]
        b.dias = [list(x) for x in self.dias]
        b.exs = [list(x) for x in self.exs]
        b.rigid = dict(self.rigid)
        b.universe = {k: list(v) for k, v in self.universe.items()}
        b.witnesses = dict(self.witnesses)
        b.ex_done = dict(self.ex_done)
        b.uf = _UF(self.uf.parent)
        b.lits = [dict(x) for x in self.lits]
        b.steps = []
        b.queue = deque(self.queue)
        b.incomplete = list(self.incomplete)
        return b

    # -- bookkeeping

    def tick(self):
        self.counter[0] += 1
        if self.counter[0] > MAX_STEPS:
            raise BudgetExhausted("tableau step limit reached")
        if self.deadline is not None and self.counter[0] % 256 == 0 and time.monotonic() > self.deadline:
            raise BudgetExhausted("tableau timed out")

    def new_label(self, depth: int) -> int:
        v = len(self.sets)
        for lst in (self.sets, self.lits):
            lst.append({})
        for lst in (self.succ, self.pred, self.boxes, self.alls, self.ors, self.dias, self.exs):
            lst.append([])
        self.depth.append(depth)
        return v

    def reflexive_loop(self, v: int) -> None:
        if "reflexive" in self.p.frame:
            self.add_edge(v, v, ("refl", v))

    def add(self, label: int, f, step) -> None:
        if f in self.sets[label]:
            return
        self.sets[label][f] = True
        if step is not None:
            self.steps.append(step)
        self.queue.append((label, f))

    def add_edge(self, u: int, v: int, step) -> None:
        if (u, v) in self.edges:
            return
        self.edges[(u, v)] = True
        self.steps.append(step)
        self.succ[u].append(v)
        self.pred[v].append(u)
        trans = "transitive" in self.p.frame
        for f in list(self.boxes[u]):
            self.add(v, f[1], ("box", u, v, f))
            if trans:
                self.add(v, f, ("box4", u, v, f))
        frame = self.p.frame
        if "symmetric" in frame:
            self.add_edge(v, u, ("sym", u, v))
        if trans:
            for x in list(self.pred[u]):
                self.add_edge(x, v, ("trans", x, u, v))
            for y in list(self.succ[v]):
                self.add_edge(u, y, ("trans", u, v, y))
        if "euclidean" in frame:
            for x in list(self.succ[u]):
                self.add_edge(v, x, ("eucl", u, v, x))
                self.add_edge(x, v, ("eucl", u, x, v))

    def add_constant(self, ty: str, name: str) -> None:
        self.universe.setdefault(ty, []).append(name)
        for label in range(len(self.sets)):
            for f in list(self.alls[label]):
                if f[2] == ty:
                    self.add(label, instantiate(f, name), ("all", label, f, name))

    # -- saturation

    def saturate(self) -> None:
        while self.queue:
            self.tick()
            label, f = self.queue.popleft()
            self.process(label, f)

    def process(self, label: int, f) -> None:
        kind = f[0]
        if kind == "bot":
            raise Closed(("bot", label))
        if kind == "lit":
            key = (f[1], f[2], _canon_args(f[3], self.uf))
            other = self.lits[label].get((not f[1],) + key[1:])
            if other is not None:
                raise Closed(("lit", label, f, other))
            self.lits[label].setdefault(key, f)
        elif kind in ("rlit", "eq"):
            self.rigid.setdefault(f, label)
            if kind == "eq" and f[1]:
                if self.uf.union(f[2][1], f[3][1]):
                    self.recanon()
            self.check_rigid(f)
        elif kind == "and":
            self.add(label, f[1], ("and", label, f))
            self.add(label, f[2], ("and", label, f))
        elif kind == "or":
            self.ors[label].append(f)
        elif kind == "box":
            self.boxes[label].append(f)
            trans = "transitive" in self.p.frame
            for v in list(self.succ[label]):
                self.add(v, f[1], ("box", label, v, f))
                if trans:
                    self.add(v, f, ("box4", label, v, f))
        elif kind == "dia":
            self.dias[label].append(f)
        elif kind == "all":
            self.alls[label].append(f)
            names = self.universe.get(f[2])
            if not names:
                self.add_constant(f[2], _default_name(f[2]))
            else:
                for c in list(names):
                    self.add(label, instantiate(f, c), ("all", label, f, c))
        elif kind == "ex":
            self.exs[label].append(f)

    def check_rigid(self, f) -> None:
        uf = self.uf
        if f[0] == "eq":
            if not f[1] and uf.find(f[2][1]) == uf.find(f[3][1]):
                raise Closed(("neq", self.rigid[f], f))
            return
        key = _canon_args(f[3], uf)
        for g, lab in self.rigid.items():
            if g[0] == "rlit" and g[2] == f[2] and g[1] != f[1] and _canon_args(g[3], uf) == key:
                raise Closed(("rlit", self.rigid[f], f, lab, g))

    def recanon(self) -> None:
        for label in range(len(self.sets)):
            table: dict = {}
            for f in self.sets[label]:
                if f[0] != "lit":
                    continue
                key = (f[1], f[2], _canon_args(f[3], self.uf))
                other = table.get((not f[1],) + key[1:])
                if other is not None:
                    raise Closed(("lit", label, f, other))
                table.setdefault(key, f)
            self.lits[label] = table
        for f in list(self.rigid):
            self.check_rigid(f)

    # -- blocking

    def blocking(self) -> dict:
        """label -> blocker for every blocked label."""
        equal = bool({"symmetric", "euclidean"} & self.p.frame)
        blocked: dict[int, int] = {}
        keys = [frozenset(s) for s in self.sets]
        for v in range(1, len(self.sets)):
            for k in range(v):
                if k in blocked:
                    continue
                if (keys[v] == keys[k]) if equal else (keys[v] <= keys[k]):
                    blocked[v] = k
                    break
        return blocked

    # -- generative rules; each returns True when it changed the branch

    def rule_ex(self) -> bool:
        for label in range(len(self.sets)):
            for f in self.exs[label]:
                if (label, f) in self.ex_done:
                    continue
                names = self.universe.get(f[2], [])
                if any(instantiate(f, c) in self.sets[label] for c in names):
                    self.ex_done[(label, f)] = True
                    continue
                count = self.witnesses.get(f[2], 0)
                self.ex_done[(label, f)] = True
                if count >= MAX_WITNESSES:
                    self.incomplete.append("witness limit reached")
                    continue
                self.witnesses[f[2]] = count + 1
                name = f"_w{count + 1}" + ("" if f[2] == "e" else f"_{f[2]}")
                self.add(label, instantiate(f, name), ("ex", label, f, name))
                self.add_constant(f[2], name)
                return True
        return False

    def pending_or(self):
        for label in range(len(self.sets)):
            s = self.sets[label]
            for f in self.ors[label]:
                if f[1] not in s and f[2] not in s:
                    return label, f
        return None

    def rule_dia(self) -> bool:
        blocked = self.blocking()
        for label in range(len(self.sets)):
            if label in blocked:
                continue
            for f in self.dias[label]:
                body = f[1]
                if any(body in self.sets[v] for v in self.succ[label]):
                    continue
                if self.depth[label] + 1 > self.depth_cap:
                    note = "tableau depth limit reached"
                    if note not in self.incomplete:
                        self.incomplete.append(note)
                    continue
                v = self.new_label(self.depth[label] + 1)
                self.steps.append(("dia", label, f, v))
                self.sets[v][body] = True
                self.queue.append((v, body))
                self.reflexive_loop(v)
                for g in self.p.glob:
                    self.add(v, g, ("global", v, g))
                self.add_edge(label, v, ("acc", label, v))
                return True
        return False


def _default_name(ty: str) -> str:
    return "_d" if ty == "e" else f"_d_{ty}"


# ---------------------------------------------------------------------------
# search


@dataclass
class TableauResult:
    status: str  # closed | open | unknown
    proof: dict | None = None
    model: object = None
    reason: str = ""


def prove(problem: Problem, depth_cap: int = 8, deadline: float | None = None) -> TableauResult:
    counter = [0]
    b = Branch(problem, depth_cap, deadline, counter)
    root = b.new_label(0)
    for f in problem.root:
        b.add(root, f, None)
    for g in problem.glob:
        b.add(root, g, None)
    b.reflexive_loop(root)
    try:
        node, outcome, extra = _run(b)
    except BudgetExhausted as exc:
        return TableauResult("unknown", reason=f"budget-exhausted: {exc}")
    if outcome == "closed":
        return TableauResult("closed", proof=node)
    if outcome == "open":
        return TableauResult("open", model=extra)
    return TableauResult("unknown", reason=extra)


def _run(b: Branch):
    while True:
        try:
            b.saturate()
        except Closed as c:
            return {"steps": b.steps, "clash": c.clash}, "closed", None
        if b.rule_ex():
            continue
        choice = b.pending_or()
        if choice is not None:
            label, f = choice
            children = []
            unknown = None
            for i in (0, 1):
                child = b.copy()
                child.steps.append(("branch", label, f, i))
                child.add(label, f[1 + i], None)
                node, outcome, extra = _run(child)
                if outcome == "open":
                    return None, "open", extra
                if outcome == "unknown":
                    unknown = extra
                children.append(node)
            if unknown is not None:
                return None, "unknown", unknown
            return {"steps": b.steps, "split": (label, f), "children": children}, "closed", None
        if b.rule_dia():
            continue
        model = extract_model(b)
        if model is not None:
            return None, "open", model
        reason = "; ".join(dict.fromkeys(b.incomplete)) or "open branch did not yield a model"
        if b.incomplete:
            return None, "unknown", f"outside-decidable-fragment: {reason}"
        return None, "unknown", f"budget-exhausted: {reason}"


# ---------------------------------------------------------------------------
# model extraction


def extract_model(b: Branch):
    from .semantics import FiniteModel, default_table

    p = b.p
    blocked = b.blocking()
    labels = [x for x in range(len(b.sets)) if x not in blocked]
    index = {x: i for i, x in enumerate(labels)}

    def target(x):
        return index[blocked.get(x, x)]

    n = len(labels)
    rel = set()
    for (u, v) in b.edges:
        if u in index:
            rel.add((index[u], target(v)))
    rel = close_relation(rel, n, p.frame)

    # individuals: equivalence classes of known names per base type
    elems: dict[str, list] = {}
    for ty, names in b.universe.items():
        for name in names:
            elems.setdefault(ty, [])
            root = b.uf.find(name)
            if root not in elems[ty]:
                elems[ty].append(root)
    for name, ty in p.types.items():
        if isinstance(ty, Base) and ty.name not in ("o", "w"):
            root = b.uf.find(name)
            lst = elems.setdefault(ty.name, [])
            if root not in lst:
                lst.append(root)
    sizes = {"w": max(n, 1)}
    for ty, lst in elems.items():
        sizes[ty] = max(len(lst), 1)
    for ty in p.types.values():
        for base in _bases(ty):
            if base not in ("o",):
                sizes.setdefault(base, 1)
    cls = {ty: {r: i for i, r in enumerate(lst)} for ty, lst in elems.items()}

    truth_w: dict = {}
    for label in labels:
        for f in b.sets[label]:
            if f[0] == "lit" and f[1]:
                truth_w[(f[2], _canon_args(f[3], b.uf), index[label])] = True
    truth_r: dict = {}
    for f in b.rigid:
        if f[0] == "rlit" and f[1]:
            truth_r[(f[2], _canon_args(f[3], b.uf))] = True

    interp: dict = {}
    model = FiniteModel(sizes, interp, dict(p.types))
    from ..terms import ACC, DESIGNATED, arg_types

    for name, ty in p.types.items():
        if name == ACC:
            interp[name] = tuple(tuple((u, v) in rel for v in range(n)) for u in range(n))
            continue
        if name == DESIGNATED:
            interp[name] = 0
            continue
        if isinstance(ty, Base):
            if ty.name in cls:
                interp[name] = cls[ty.name].get(b.uf.find(name), 0)
            else:
                interp[name] = default_table(ty, model)
            continue
        doms, cod = arg_types(ty)
        if cod == O and all(isinstance(d, Base) for d in doms):
            world_rel = bool(doms) and doms[-1].name == "w"
            ind = doms[:-1] if world_rel else doms
            if any(d.name in ("o", "w") for d in ind):
                interp[name] = default_table(ty, model)
                continue
            inv = [{i: r for r, i in cls.get(d.name, {}).items()} for d in ind]

            def build(level, chosen, name=name, ind=ind, inv=inv, world_rel=world_rel):
                if level == len(ind):
                    args = tuple(inv_i.get(c) for inv_i, c in zip(inv, chosen))
                    if world_rel:
                        return tuple(truth_w.get((name, args, w), False) for w in range(sizes["w"]))
                    return truth_r.get((name, args), False)
                return tuple(build(level + 1, chosen + (i,)) for i in range(sizes[ind[level].name]))

            interp[name] = build(0, ())
            continue
        interp[name] = default_table(ty, model)
    if p.verify is None or p.verify(model):
        return model
    return None


def _bases(ty):
    if isinstance(ty, Base):
        yield ty.name
    else:
        yield from _bases(ty.dom)
        yield from _bases(ty.cod)


def close_relation(rel: set, n: int, frame) -> set:
    rel = set(rel)
    if "reflexive" in frame:
        rel |= {(i, i) for i in range(n)}
    changed = True
    while changed:
        changed = False
        new = set()
        if "symmetric" in frame:
            new |= {(v, u) for (u, v) in rel}
        if "transitive" in frame:
            new |= {(u, x) for (u, v) in rel for (v2, x) in rel if v == v2}
        if "euclidean" in frame:
            new |= {(v, x) for (u, v) in rel for (u2, x) in rel if u == u2}
        if not new <= rel:
            rel |= new
            changed = True
    return rel


# ---------------------------------------------------------------------------
# proof replay


class ReplayError(Exception):
    pass


def replay(proof: dict, problem: Problem) -> bool:
    """Re-check a closed tableau step by step; raises ReplayError on a bad step."""
    state = _ReplayState(problem)
    state.sets.append(set(problem.root) | set(problem.glob))
    _replay_node(proof, state)
    return True


class _ReplayState:
    def __init__(self, problem: Problem):
        self.p = problem
        self.sets: list[set] = []
        self.edges: set = set()
        self.names: set = set()
        for names in problem.universe.values():
            self.names |= set(names)
        self.names |= set(problem.types)

    def copy(self):
        s = _ReplayState.__new__(_ReplayState)
        s.p = self.p
        s.sets = [set(x) for x in self.sets]
        s.edges = set(self.edges)
        s.names = set(self.names)
        return s

    def has(self, label, f):
        if label >= len(self.sets) or f not in self.sets[label]:
            raise ReplayError(f"formula {show_nnf(f)} not present at label {label}")

    def edge(self, u, v):
        if (u, v) not in self.edges:
            raise ReplayError(f"edge ({u},{v}) not present")

    def frame(self, cond):
        if cond not in self.p.frame:
            raise ReplayError(f"rule needs a {cond} frame")


def _replay_node(node: dict, st: _ReplayState) -> None:
    for step in node["steps"]:
        _replay_step(step, st)
    if "clash" in node:
        _replay_clash(node["clash"], st)
        return
    label, f = node["split"]
    st.has(label, f)
    if f[0] != "or":
        raise ReplayError("split on a non-disjunction")
    for i, child in enumerate(node["children"]):
        first = child["steps"][0] if child["steps"] else None
        if first != ("branch", label, f, i):
            raise ReplayError("child branch does not start with its disjunct")
        sub = st.copy()
        sub.sets[label].add(f[1 + i])
        _replay_node({**child, "steps": child["steps"][1:]}, sub)


def _replay_step(step, st: _ReplayState) -> None:
    kind = step[0]
    if kind == "and":
        _, label, f = step
        st.has(label, f)
        if f[0] != "and":
            raise ReplayError("and-rule on a non-conjunction")
        st.sets[label] |= {f[1], f[2]}
    elif kind in ("box", "box4"):
        _, u, v, f = step
        st.has(u, f)
        st.edge(u, v)
        if f[0] != "box":
            raise ReplayError("box-rule on a non-box formula")
        if kind == "box4":
            st.frame("transitive")
        st.sets[v].add(f[1] if kind == "box" else f)
    elif kind == "dia":
        _, u, f, v = step
        st.has(u, f)
        if f[0] != "dia" or v != len(st.sets):
            raise ReplayError("bad dia-rule application")
        st.sets.append({f[1]})
    elif kind == "acc":
        _, u, v = step
        if v >= len(st.sets) or u >= len(st.sets):
            raise ReplayError("edge between unknown labels")
        st.edges.add((u, v))
    elif kind == "global":
        _, v, g = step
        if g not in st.p.glob or v >= len(st.sets):
            raise ReplayError("global rule with a non-global formula")
        st.sets[v].add(g)
    elif kind == "refl":
        st.frame("reflexive")
        st.edges.add((step[1], step[1]))
    elif kind == "sym":
        st.frame("symmetric")
        _, u, v = step
        st.edge(u, v)
        st.edges.add((v, u))
    elif kind == "trans":
        st.frame("transitive")
        _, x, y, z = step
        st.edge(x, y)
        st.edge(y, z)
        st.edges.add((x, z))
    elif kind == "eucl":
        st.frame("euclidean")
        _, u, v, x = step
        st.edge(u, v)
        st.edge(u, x)
        st.edges.add((v, x))
    elif kind == "all":
        _, label, f, name = step
        st.has(label, f)
        if f[0] != "all":
            raise ReplayError("all-rule on a non-universal")
        st.names.add(name)
        st.sets[label].add(instantiate(f, name))
    elif kind == "ex":
        _, label, f, name = step
        st.has(label, f)
        if f[0] != "ex":
            raise ReplayError("ex-rule on a non-existential")
        if name in st.names or any(_mentions(g, name) for s in st.sets for g in s):
            raise ReplayError(f"witness {name} is not fresh")
        st.names.add(name)
        st.sets[label].add(instantiate(f, name))
    else:
        raise ReplayError(f"unknown rule {kind!r}")


def _mentions(f, name) -> bool:
    if f == ("c", name):
        return True
    return isinstance(f, tuple) and any(_mentions(x, name) for x in f if isinstance(x, tuple))


def _replay_uf(st: _ReplayState) -> _UF:
    uf = _UF()
    for s in st.sets:
        for f in s:
            if f[0] == "eq" and f[1]:
                uf.union(f[2][1], f[3][1])
    return uf


def _replay_clash(clash, st: _ReplayState) -> None:
    kind = clash[0]
    uf = _replay_uf(st)
    if kind == "bot":
        st.has(clash[1], BOT)
    elif kind == "lit":
        _, label, f, g = clash
        st.has(label, f)
        st.has(label, g)
        if not (f[0] == g[0] == "lit" and f[2] == g[2] and f[1] != g[1]
                and _canon_args(f[3], uf) == _canon_args(g[3], uf)):
            raise ReplayError("literals do not clash")
    elif kind == "rlit":
        _, l1, f, l2, g = clash
        st.has(l1, f)
        st.has(l2, g)
        if not (f[0] == g[0] == "rlit" and f[2] == g[2] and f[1] != g[1]
                and _canon_args(f[3], uf) == _canon_args(g[3], uf)):
            raise ReplayError("rigid literals do not clash")
    elif kind == "neq":
        _, label, f = clash
        st.has(label, f)
        if not (f[0] == "eq" and not f[1] and uf.find(f[2][1]) == uf.find(f[3][1])):
            raise ReplayError("disequality is not contradicted")
    else:
        raise ReplayError(f"unknown clash {kind!r}")


def proof_size(node: dict) -> int:
    n = len(node["steps"]) + 1
    for c in node.get("children", ()):
        n += proof_size(c)
    return n


__all__ = ["translate", "Problem", "prove", "replay", "ReplayError", "TableauResult", "show_nnf"]
