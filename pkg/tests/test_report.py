from __future__ import annotations

import json
import math

from herm.report import SEPARATOR, error_report, fmt, jsonable, render, table


def test_table_aligns_columns():
    lines = table(["a", "long header"], [("xyz", 1), ("q", None)])
    assert lines[0] == "a    long header"
    assert lines[1] == "---  -----------"
    assert lines[2] == "xyz  1"
    assert lines[3] == "q"


def test_infinities_survive_json():
    data = {"score": -math.inf, "rows": [0.1 + 0.2, math.inf]}
    text = render(["x"], data, as_json=True)
    assert json.loads(text) == {"score": "-inf", "rows": [0.3, "inf"]}
    assert jsonable((1, 2)) == [1, 2]
    assert fmt(-math.inf) == "-inf" and fmt(0.5) == "0.5000" and fmt(None) == "-"


def test_text_report_has_both_sections():
    text = render(["line one"], {"k": 1})
    head, body = text.split(SEPARATOR + "\n")
    assert head == "line one\n" and json.loads(body) == {"k": 1}
    err = error_report("usage", ["bad flag"])
    assert err.startswith("error (usage): bad flag\n")
