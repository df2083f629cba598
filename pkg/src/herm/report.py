"""Rendering of command results as text tables plus a JSON section.

Every report is a pair (lines, data). The text form prints the lines,
then a separator, then ``data`` as indented JSON; the JSON form prints
only the data. Field order is fixed by construction, so reports are
byte-identical for identical inputs.
"""
from __future__ import annotations

import json
import math

SEPARATOR = "--- machine-readable ---"


def table(headers: list, rows: list) -> list:
    cells = [[str(h) for h in headers]] + [["" if c is None else str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(headers))]
    out = []
    for j, r in enumerate(cells):
        out.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if j == 0:
            out.append("  ".join("-" * w for w in widths))
    return out


def fmt(x) -> str:
    if x is None:
        return "-"
    if isinstance(x, float):
        if x == -math.inf:
            return "-inf"
        return f"{x:.4f}"
    return str(x)


def jsonable(x):
    if isinstance(x, float):
        if x == -math.inf:
            return "-inf"
        if x == math.inf:
            return "inf"
        return round(x, 9)
    if isinstance(x, dict):
        return {k: jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    return x


def render(lines: list, data: dict, as_json: bool = False) -> str:
    body = json.dumps(jsonable(data), indent=2, ensure_ascii=False)
    if as_json:
        return body + "\n"
    return "\n".join(lines) + "\n" + SEPARATOR + "\n" + body + "\n"


def error_report(kind: str, messages: list) -> str:
    lines = [f"error ({kind}): {m}" for m in messages]
    data = {"error": {"kind": kind, "messages": list(messages)}}
    return "\n".join(lines) + "\n" + SEPARATOR + "\n" + json.dumps(data, indent=2, ensure_ascii=False) + "\n"


# ---------------------------------------------------------------------------
# per-command sections


def correctness_section(reports: list) -> tuple:
    rows = [(r.argument, r.validity.kind, r.consistency.kind, r.circular + (f" ({r.circular_premise})" if r.circular_premise else ""),
             ",".join(r.idle_premises) or "-", r.overall) for r in reports]
    lines = table(["argument", "validity", "consistency", "circular", "idle", "overall"], rows)
    return lines, [r.to_dict() for r in reports]


def adequacy_section(sid: str, scores: list, verdicts: dict) -> tuple:
    rows = [(s.candidate, s.reliable, fmt(s.ambitiousness), s.simplicity, fmt(s.aggregate)) for s in scores]
    lines = [f"sentence {sid}"] + ["  " + x for x in
                                  table(["candidate", "reliable", "ambitiousness", "simplicity", "aggregate"], rows)]
    data = []
    for s in scores:
        d = s.to_dict()
        d["verdicts"] = verdicts.get(s.candidate, [])
        data.append(d)
    return lines, data


def network_section(report) -> tuple:
    rows = [(s.edge.src, s.edge.dst, s.edge.polarity, "realized" if s.realized else "unrealized",
             ",".join(s.mechanisms) or "-") for s in report.intended]
    lines = table(["from", "to", "polarity", "status", "mechanisms"], rows)
    if report.spurious:
        lines.append("spurious relations:")
        lines += ["  " + x for x in table(
            ["from", "to", "polarity", "mechanism", "target"],
            [(r.src, r.dst, r.polarity, r.mechanism, r.target or "-") for r in report.spurious])]
    lines.append(f"role fulfillment: {fmt(report.score)}" + (" (empty network)" if report.empty_network else ""))
    return lines, report.to_dict()


def fit_section(name: str, fit) -> list:
    return [f"  axioms {name}: soundness {fmt(fit.soundness)}, coverage {fmt(fit.coverage)}, "
            f"axiom models {fit.axiom_models}/{fit.total_models}, "
            f"coincide modulo isomorphism: {fmt(fit.coincide_modulo_iso)}"]
