"""Finite model finding by grounding into a propositional circuit.

For fixed domain sizes every closed formula is evaluated symbolically:
o-values become circuit literals, values of other base types become a
concrete index or a one-hot choice over indices. The conjunction of the
inputs is handed to the lexicographic CDCL solver, so the model returned
is the least one in the canonical order (constants sorted by name,
table cells in index order, false before true, smaller index first).
"""
from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from ..embedding import definition
from ..errors import BudgetExhausted, HermError, OutsideFragment
from ..terms import (
    EQUALITY,
    HOL_CONNECTIVES,
    LOGICAL_NAMES,
    O,
    Base,
    Const,
    Lam,
    Term,
    Ty,
    Var,
    arg_types,
    constants_of,
    quant_index,
    subterms,
)
from .sat import FALSE, TRUE, Circuit, Solver
from .semantics import FiniteModel, default_table, holds

HO_ENUM_CAP = 256


@dataclass(frozen=True)
class Choice:
    """A symbolic element of a base type: exactly one literal holds."""

    lits: tuple

    def options(self):
        return [(i, lit) for i, lit in enumerate(self.lits) if lit != FALSE]


def _mk_choice(lits) -> "Choice | int":
    lits = tuple(lits)
    trues = [i for i, lit in enumerate(lits) if lit == TRUE]
    if len(trues) == 1 and all(lit in (TRUE, FALSE) for lit in lits):
        return trues[0]
    return Choice(lits)


class _Table:
    """Partially applied symbolic interpretation of a constant."""

    def __init__(self, grounder, cells, doms, cod, args=()):
        self.g, self.cells, self.doms, self.cod, self.args = grounder, cells, doms, cod, args

    def __call__(self, x):
        args = self.args + (x,)
        if len(args) < len(self.doms):
            return _Table(self.g, self.cells, self.doms, self.cod, args)
        return self.g.lookup(self.cells, self.doms, self.cod, args)


class Grounder:
    def __init__(self, sizes: dict, constants: dict):
        self.sizes = sizes
        self.c = Circuit()
        self.cells: dict[str, object] = {}
        self.order: list[int] = []
        for name in sorted(constants):
            self.cells[name] = self._alloc(constants[name])

    def size(self, ty: Base) -> int:
        return 2 if ty == O else self.sizes.get(ty.name, 1)

    def _alloc(self, ty: Ty):
        doms, cod = arg_types(ty)
        for d in doms:
            if not isinstance(d, Base):
                raise OutsideFragment(f"constants with higher-order arguments ({ty}) are not supported")
        return self._cells(doms, cod)

    def _cells(self, doms, cod):
        if doms:
            return tuple(self._cells(doms[1:], cod) for _ in range(self.size(doms[0])))
        if cod == O:
            return self.c.new_input(prefer=False)
        n = self.size(cod)
        lits = [self.c.new_input(prefer=True) for _ in range(n)]
        self.c.exactly_one(lits)
        return Choice(tuple(lits))

    # -- symbolic helpers

    def options(self, value, ty: Ty):
        if ty == O:
            return [(0, -value), (1, value)]
        if isinstance(value, Choice):
            return value.options()
        return [(value, TRUE)]

    def mux(self, pairs, ty: Ty):
        """Value equal to v_i when cond_i holds (conds exclusive and exhaustive)."""
        pairs = [(c, v) for c, v in pairs if c != FALSE]
        if len(pairs) == 1:
            return pairs[0][1]
        if ty == O:
            return self.c.OR([self.c.AND([c, v]) for c, v in pairs])
        if isinstance(ty, Base):
            n = self.size(ty)
            return _mk_choice(
                self.c.OR([self.c.AND([c, self.is_index(v, j)]) for c, v in pairs]) for j in range(n)
            )
        raise OutsideFragment("function-valued case split")

    def is_index(self, v, j: int) -> int:
        if isinstance(v, Choice):
            return v.lits[j]
        return TRUE if v == j else FALSE

    def lookup(self, cells, doms, cod, args):
        pairs = []
        for combo in itertools.product(*(self.options(a, d) for a, d in zip(args, doms))):
            cell = cells
            conds = []
            for idx, cond in combo:
                cell = cell[idx]
                conds.append(cond)
            pairs.append((self.c.AND(conds), cell))
        return self.mux(pairs, cod)

    def eq(self, a, b, ty: Ty) -> int:
        if ty == O:
            return self.c.IFF(a, b)
        if isinstance(ty, Base):
            if not isinstance(a, Choice) and not isinstance(b, Choice):
                return TRUE if a == b else FALSE
            if not isinstance(a, Choice):
                a, b = b, a
            if not isinstance(b, Choice):
                return a.lits[b]
            return self.c.OR([self.c.AND([x, y]) for x, y in zip(a.lits, b.lits)])
        return self.c.AND([self.eq(a(x), b(x), ty.cod) for x in self.elements(ty.dom)])

    def elements(self, ty: Ty) -> list:
        if ty == O:
            return [FALSE, TRUE]
        if isinstance(ty, Base):
            return list(range(self.size(ty)))
        doms, cod = arg_types(ty)
        if any(not isinstance(d, Base) for d in doms) or not isinstance(cod, Base):
            raise OutsideFragment(f"quantification over {ty}")
        n_in = 1
        for d in doms:
            n_in *= self.size(d)
        n_out = self.size(cod)
        if n_out ** n_in > HO_ENUM_CAP:
            raise OutsideFragment(f"quantification over {ty} exceeds the enumeration cap")
        out = []
        for vals in itertools.product(range(n_out), repeat=n_in):
            cells = self._concrete(doms, cod, iter(vals))
            out.append(_Table(self, cells, doms, cod))
        return out

    def _concrete(self, doms, cod, it):
        if doms:
            return tuple(self._concrete(doms[1:], cod, it) for _ in range(self.size(doms[0])))
        v = next(it)
        return (TRUE if v else FALSE) if cod == O else v

    # -- evaluation

    def ev(self, t: Term, env: dict):
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
        return self.ev(t.fn, env)(self.ev(t.arg, env))

    def const(self, k: Const):
        c = self.c
        name = k.name
        if name in HOL_CONNECTIVES:
            return {
                "not": lambda a: -a,
                "and": lambda a: lambda b: c.AND([a, b]),
                "or": lambda a: lambda b: c.OR([a, b]),
                "implies": lambda a: lambda b: c.IMPLIES(a, b),
                "iff": lambda a: lambda b: c.IFF(a, b),
                "true": TRUE,
                "false": FALSE,
            }[name]
        if name in ("forall", "exists"):
            tau = quant_index(k)
            elems = self.elements(tau)
            if name == "forall":
                return lambda f: c.AND([f(x) for x in elems])
            return lambda f: c.OR([f(x) for x in elems])
        if name == EQUALITY:
            tau = quant_index(k)
            return lambda a: lambda b: self.eq(a, b, tau)
        d = definition(k)
        if d is not None:
            return self.ev(d, {})
        cells = self.cells[name]
        doms, cod = arg_types(k.ty)
        if not doms:
            return cells
        return _Table(self, cells, doms, cod)

    def read(self, assignment: dict, cells):
        if isinstance(cells, tuple):
            return tuple(self.read(assignment, x) for x in cells)
        if isinstance(cells, Choice):
            for i, lit in enumerate(cells.lits):
                if assignment[lit]:
                    return i
            raise AssertionError("one-hot cell without a value")
        return bool(assignment[cells])


def problem_constants(formulas) -> dict:
    out: dict[str, Ty] = {}
    for f in formulas:
        for k in constants_of(f):
            if k.name in LOGICAL_NAMES:
                continue
            if out.setdefault(k.name, k.ty) != k.ty:
                raise HermError(f"constant {k.name} used at two types")
    return out


def problem_bases(formulas, constants: dict) -> list[str]:
    names = set()

    def visit(ty):
        if isinstance(ty, Base):
            if ty != O:
                names.add(ty.name)
        else:
            visit(ty.dom)
            visit(ty.cod)

    for ty in constants.values():
        visit(ty)
    for f in formulas:
        for s in subterms(f):
            visit(s.ty)
    rank = {"w": 0, "e": 1}
    return sorted(names, key=lambda n: (rank.get(n, 2), n))


def size_schedule(bases: list[str], max_worlds: int, max_individuals: int):
    """Size assignments in nondecreasing total size, then lexicographic."""
    caps = [max_worlds if b == "w" else max_individuals for b in bases]
    combos = list(itertools.product(*[range(1, c + 1) for c in caps]))
    combos.sort(key=lambda s: (sum(s), s))
    return [dict(zip(bases, s)) for s in combos]


def solve_at(formulas, sizes: dict, constants: dict, deadline: float | None = None):
    """Least model of the given sizes, or None if there is none."""
    g = Grounder(sizes, constants)
    for f in formulas:
        if f.ty != O:
            raise HermError(f"find_model needs formulas of type o, got {f.ty}")
        g.c.assert_(g.ev(f, {}))
    solver = Solver(g.c.nvars, g.c.clauses, g.c.inputs, g.c.prefer, deadline)
    assignment = solver.solve()
    if assignment is None:
        return None
    interp = {name: g.read(assignment, cells) for name, cells in g.cells.items()}
    return interp


def find_model(formulas, max_worlds: int = 3, max_individuals: int = 2,
               timeout_ms: int | None = None, signature=None) -> FiniteModel | None:
    """Smallest (then lexicographically least) model of closed o-formulas.

    Returns None when no model exists within the size caps. Raises
    BudgetExhausted if the time limit runs out first.
    """
    formulas = list(formulas)
    deadline = None if timeout_ms is None else time.monotonic() + timeout_ms / 1000.0
    constants = problem_constants(formulas)
    all_types = dict(constants)
    if signature is not None:
        for name, ty in signature.constants.items():
            all_types.setdefault(name, ty)
    bases = problem_bases(formulas, all_types)
    if "w" not in bases:
        bases = ["w"] + bases
    for sizes in size_schedule(bases, max_worlds, max_individuals):
        if deadline is not None and time.monotonic() > deadline:
            raise BudgetExhausted("model search timed out")
        interp = solve_at(formulas, sizes, constants, deadline)
        if interp is None:
            continue
        model = FiniteModel(dict(sizes), interp, dict(all_types))
        for name, ty in all_types.items():
            if name not in interp:
                interp[name] = default_table(ty, model)
        for f in formulas:
            if not holds(f, model):
                raise AssertionError(f"model finder produced a non-model for {f}")
        return model
    return None


__all__ = ["find_model", "solve_at", "size_schedule"]
