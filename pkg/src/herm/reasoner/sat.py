"""Propositional circuits and a small CDCL solver.

The solver branches on a fixed variable order with a fixed preferred
polarity per variable and never restarts, so the first model it returns
is the lexicographically least one in that order.
"""
from __future__ import annotations

import time

from ..errors import BudgetExhausted

TRUE = 1
FALSE = -1


class Circuit:
    """Hash-consed and/or/iff gates over integer literals (Tseitin encoded)."""

    def __init__(self):
        self.nvars = 1  # var 1 is the constant true
        self.clauses: list[list[int]] = [[TRUE]]
        self.inputs: list[int] = []
        self.prefer: dict[int, bool] = {}
        self._gates: dict = {}

    def new_input(self, prefer: bool = False) -> int:
        self.nvars += 1
        self.inputs.append(self.nvars)
        self.prefer[self.nvars] = prefer
        return self.nvars

    def _gate(self) -> int:
        self.nvars += 1
        return self.nvars

    def AND(self, lits) -> int:
        seen = set()
        for lit in lits:
            if lit == FALSE or -lit in seen:
                return FALSE
            if lit != TRUE:
                seen.add(lit)
        if not seen:
            return TRUE
        if len(seen) == 1:
            return next(iter(seen))
        key = ("and", frozenset(seen))
        g = self._gates.get(key)
        if g is None:
            g = self._gate()
            self._gates[key] = g
            for lit in seen:
                self.clauses.append([-g, lit])
            self.clauses.append([g] + [-lit for lit in seen])
        return g

    def OR(self, lits) -> int:
        return -self.AND([-lit for lit in lits])

    def IMPLIES(self, a: int, b: int) -> int:
        return self.OR([-a, b])

    def IFF(self, a: int, b: int) -> int:
        if a == b:
            return TRUE
        if a == -b:
            return FALSE
        if a in (TRUE, FALSE):
            return b if a == TRUE else -b
        if b in (TRUE, FALSE):
            return a if b == TRUE else -a
        key = ("iff", frozenset((a, b)))
        g = self._gates.get(key)
        if g is None:
            g = self._gate()
            self._gates[key] = g
            self.clauses += [[-g, -a, b], [-g, a, -b], [g, a, b], [g, -a, -b]]
        return g

    def assert_(self, lit: int) -> None:
        self.clauses.append([lit])

    def exactly_one(self, lits: list[int]) -> None:
        self.clauses.append(list(lits))
        for i in range(len(lits)):
            for j in range(i + 1, len(lits)):
                self.clauses.append([-lits[i], -lits[j]])


class Solver:
    """CDCL with two watched literals, first-UIP learning, static order."""

    def __init__(self, nvars: int, clauses, order, prefer: dict, deadline: float | None = None):
        self.n = nvars
        self.order = list(order)
        seen = set(self.order)
        self.order += [v for v in range(1, nvars + 1) if v not in seen]
        self.prefer = prefer
        self.deadline = deadline
        self.value: list = [None] * (nvars + 1)
        self.level = [0] * (nvars + 1)
        self.reason: list = [None] * (nvars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.watches: dict[int, list] = {}
        self.clauses: list[list[int]] = []
        self.units: list[int] = []
        self.ok = True
        self.ticks = 0
        for c in clauses:
            self._add_clause(list(dict.fromkeys(c)))

    def _add_clause(self, c: list[int]):
        if any(-lit in c for lit in c):
            return
        if not c:
            self.ok = False
            return
        if len(c) == 1:
            self.units.append(c[0])
            return
        self.clauses.append(c)
        self.watches.setdefault(c[0], []).append(c)
        self.watches.setdefault(c[1], []).append(c)

    def _lit_value(self, lit: int):
        v = self.value[abs(lit)]
        if v is None:
            return None
        return v if lit > 0 else not v

    def _assign(self, lit: int, reason):
        var = abs(lit)
        self.value[var] = lit > 0
        self.level[var] = len(self.trail_lim)
        self.reason[var] = reason
        self.trail.append(lit)

    def _propagate(self, start: int):
        """Returns a conflicting clause or None."""
        i = start
        while i < len(self.trail):
            lit = self.trail[i]
            i += 1
            false_lit = -lit
            ws = self.watches.get(false_lit)
            if not ws:
                continue
            self.ticks += 1
            if self.deadline is not None and self.ticks % 2048 == 0 and time.monotonic() > self.deadline:
                raise BudgetExhausted("model search timed out")
            keep = []
            conflict = None
            j = 0
            while j < len(ws):
                c = ws[j]
                j += 1
                if c[0] == false_lit:
                    c[0], c[1] = c[1], c[0]
                first = c[0]
                if self._lit_value(first) is True:
                    keep.append(c)
                    continue
                moved = False
                for k in range(2, len(c)):
                    if self._lit_value(c[k]) is not False:
                        c[1], c[k] = c[k], c[1]
                        self.watches.setdefault(c[1], []).append(c)
                        moved = True
                        break
                if moved:
                    continue
                keep.append(c)
                fv = self._lit_value(first)
                if fv is False:
                    conflict = c
                    keep.extend(ws[j:])
                    break
                if fv is None:
                    self._assign(first, c)
            self.watches[false_lit] = keep
            if conflict is not None:
                return conflict, i
        return None, i

    def _analyze(self, conflict):
        level = len(self.trail_lim)
        seen = set()
        learnt = []
        counter = 0
        p = None
        idx = len(self.trail) - 1
        clause = conflict
        while True:
            for q in clause:
                if p is not None and q == p:
                    continue
                var = abs(q)
                if var in seen or self.level[var] == 0:
                    continue
                seen.add(var)
                if self.level[var] == level:
                    counter += 1
                else:
                    learnt.append(q)
            while abs(self.trail[idx]) not in seen:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            counter -= 1
            if counter == 0:
                break
            clause = self.reason[abs(p)]
        learnt.insert(0, -p)
        back = max((self.level[abs(q)] for q in learnt[1:]), default=0)
        return learnt, back

    def _backtrack(self, level: int):
        if len(self.trail_lim) <= level:
            return
        cut = self.trail_lim[level]
        for lit in self.trail[cut:]:
            var = abs(lit)
            self.value[var] = None
            self.reason[var] = None
        del self.trail[cut:]
        del self.trail_lim[level:]

    def solve(self):
        """A model as {var: bool}, or None when unsatisfiable."""
        if not self.ok:
            return None
        for u in self.units:
            val = self._lit_value(u)
            if val is False:
                return None
            if val is None:
                self._assign(u, None)
        conflict, qhead = self._propagate(0)
        if conflict is not None:
            return None
        pos = 0
        while True:
            while pos < len(self.order) and self.value[self.order[pos]] is not None:
                pos += 1
            if pos == len(self.order):
                return {v: bool(self.value[v]) for v in range(1, self.n + 1)}
            var = self.order[pos]
            self.trail_lim.append(len(self.trail))
            self._assign(var if self.prefer.get(var, False) else -var, None)
            while True:
                conflict, qhead = self._propagate(qhead)
                if conflict is None:
                    break
                if not self.trail_lim:
                    return None
                learnt, back = self._analyze(conflict)
                self._backtrack(back)
                qhead = len(self.trail)
                pos = 0
                if len(learnt) == 1:
                    self._assign(learnt[0], None)
                else:
                    # second watch: the literal from the backjump level
                    j = max(range(1, len(learnt)), key=lambda k: self.level[abs(learnt[k])])
                    learnt[1], learnt[j] = learnt[j], learnt[1]
                    self.clauses.append(learnt)
                    self.watches.setdefault(learnt[0], []).append(learnt)
                    self.watches.setdefault(learnt[1], []).append(learnt)
                    self._assign(learnt[0], learnt)
