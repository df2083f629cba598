"""Attack and support between formalized arguments, relative to a logic."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .correctness import Argument, certificate_id
from .errors import HermError
from .reasoner import Reasoner, Unsat, Valid
from .terms import NamedFormula, Not

POLARITIES = ("attack", "support")
MECHANISMS = {"rebut": "attack", "undermine": "attack", "endorse": "support"}
LAMBDA_SPURIOUS = 0.5


@dataclass(frozen=True)
class Edge:
    src: str
    dst: str
    polarity: str

    def __post_init__(self):
        if self.polarity not in POLARITIES:
            raise HermError(f"edge {self.src}->{self.dst}: polarity must be attack or support")
        if self.src == self.dst:
            raise HermError(f"self-edge on {self.src}")


@dataclass
class ArgumentNetwork:
    nodes: list
    edges: list = field(default_factory=list)

    def __post_init__(self):
        seen = set()
        for e in self.edges:
            for end in (e.src, e.dst):
                if end not in self.nodes:
                    raise HermError(f"edge endpoint {end} is not an argument")
            if e in seen:
                raise HermError(f"duplicate edge {e.src}->{e.dst} ({e.polarity})")
            seen.add(e)


@dataclass(frozen=True)
class RealizedRelation:
    src: str
    dst: str
    polarity: str
    mechanism: str
    target: str | None  # premise label, or None for the whole premise set
    certificate: str | None

    def edge(self) -> Edge:
        return Edge(self.src, self.dst, self.polarity)

    def to_dict(self) -> dict:
        return {"from": self.src, "to": self.dst, "polarity": self.polarity,
                "mechanism": self.mechanism, "target": self.target, "certificate": self.certificate}


def _terms(formulas) -> list:
    return [f.term if isinstance(f, NamedFormula) else f for f in formulas]


def realized_relations(a: Argument, b: Argument, theory=(), reasoner: Reasoner | None = None) -> list:
    """Ways in which a's conclusion attacks or supports b, decided in b's logic."""
    r = reasoner or Reasoner()
    th = _terms(theory)
    spec = b.spec
    c = a.conclusion.term
    out = []
    for p in b.premises:
        v = r.entails([c] + th, Not(p.term), spec)
        if isinstance(v, Valid):
            out.append(RealizedRelation(a.id, b.id, "attack", "rebut", p.label, certificate_id(v)))
    v = r.consistent(_terms(b.premises) + [c] + th, spec)
    if isinstance(v, Unsat):
        out.append(RealizedRelation(a.id, b.id, "attack", "undermine", None, certificate_id(v)))
    for p in b.premises:
        v = r.entails([c] + th, p.term, spec)
        if isinstance(v, Valid):
            out.append(RealizedRelation(a.id, b.id, "support", "endorse", p.label, certificate_id(v)))
    return out


@dataclass
class EdgeStatus:
    edge: Edge
    realized: bool
    mechanisms: list

    def to_dict(self) -> dict:
        return {"from": self.edge.src, "to": self.edge.dst, "polarity": self.edge.polarity,
                "status": "realized" if self.realized else "unrealized",
                "mechanisms": list(self.mechanisms)}


@dataclass
class RoleReport:
    score: float
    intended: list  # of EdgeStatus
    spurious: list  # of RealizedRelation
    relations: list  # every realized relation
    empty_network: bool = False

    def to_dict(self) -> dict:
        return {
            "score": round(self.score, 6),
            "empty_network": self.empty_network,
            "intended": [s.to_dict() for s in self.intended],
            "spurious": [r.to_dict() for r in self.spurious],
        }

    def unrealized(self) -> list:
        return [s.edge for s in self.intended if not s.realized]


def all_relations(args: dict, theory=(), reasoner: Reasoner | None = None) -> list:
    r = reasoner or Reasoner()
    out = []
    for src, dst in itertools.permutations(sorted(args), 2):
        out += realized_relations(args[src], args[dst], theory, r)
    return out


def role_fulfillment(net: ArgumentNetwork, args: dict, theory=(), reasoner: Reasoner | None = None,
                     lam: float = LAMBDA_SPURIOUS) -> RoleReport:
    """(realized intended edges - lam * spurious realized edges, floored at 0) / |intended|."""
    missing = [n for n in net.nodes if n not in args]
    if missing:
        raise HermError(f"network nodes without a formalized argument: {', '.join(missing)}")
    relations = all_relations({n: args[n] for n in net.nodes}, theory, reasoner)
    by_edge: dict = {}
    for rel in relations:
        by_edge.setdefault(rel.edge(), []).append(rel)
    intended = set(net.edges)
    statuses = [EdgeStatus(e, e in by_edge, [r.mechanism for r in by_edge.get(e, [])]) for e in net.edges]
    spurious_edges = [e for e in by_edge if e not in intended]
    spurious = [rel for e in spurious_edges for rel in by_edge[e]]
    if not net.edges:
        return RoleReport(1.0, statuses, spurious, relations, empty_network=True)
    realized = sum(s.realized for s in statuses)
    score = max(0.0, realized - lam * len(spurious_edges)) / len(net.edges)
    return RoleReport(score, statuses, spurious, relations)


# ---------------------------------------------------------------------------
# Dung-style diagnostics over realized attacks


def attack_graph(relations) -> set:
    return {(r.src, r.dst) for r in relations if r.polarity == "attack"}


def grounded_extension(nodes, attacks: set) -> list:
    nodes = sorted(nodes)
    attackers = {n: {a for (a, b) in attacks if b == n} for n in nodes}
    ext: set = set()
    while True:
        defended = {n for n in nodes
                    if all(any((d, a) in attacks for d in ext) for a in attackers[n])}
        if defended == ext:
            return sorted(ext)
        ext = defended


def preferred_extensions(nodes, attacks: set) -> list:
    """Maximal admissible sets (brute force; intended for small networks)."""
    nodes = sorted(nodes)
    if len(nodes) > 16:
        raise HermError("preferred extensions are only enumerated for at most 16 arguments")

    def conflict_free(s):
        return not any((a, b) in attacks for a in s for b in s)

    def admissible(s):
        return conflict_free(s) and all(
            any((d, a) in attacks for d in s) for n in s for (a, b) in attacks if b == n
        )

    adm = [set(c) for k in range(len(nodes) + 1) for c in itertools.combinations(nodes, k)
           if admissible(set(c))]
    maximal = [s for s in adm if not any(s < t for t in adm)]
    return sorted(sorted(s) for s in maximal)


def to_dot(net: ArgumentNetwork, report: RoleReport | None = None) -> str:
    """Graphviz rendering: intended edges solid, unrealized dashed, spurious dotted."""
    lines = ["digraph network {"]
    for n in net.nodes:
        lines.append(f'  "{n}";')
    status = {s.edge: s.realized for s in report.intended} if report else {}
    for e in net.edges:
        style = "solid" if status.get(e, True) else "dashed"
        color = "red" if e.polarity == "attack" else "darkgreen"
        lines.append(f'  "{e.src}" -> "{e.dst}" [label="{e.polarity}", color={color}, style={style}];')
    if report:
        for e in sorted({r.edge() for r in report.spurious}, key=lambda e: (e.src, e.dst, e.polarity)):
            lines.append(f'  "{e.src}" -> "{e.dst}" [label="{e.polarity} (spurious)", style=dotted];')
    lines.append("}")
    return "\n".join(lines) + "\n"
