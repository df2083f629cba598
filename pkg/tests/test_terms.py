from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from herm.errors import ParseError, SignatureError, TypeMismatch
from herm.parser import parse, parse_formula, parse_type
from herm.printer import show, show_type
from herm.terms import (
    E,
    O,
    WO,
    App,
    Const,
    Lam,
    NamedFormula,
    Signature,
    Var,
    alpha_eq,
    arrow,
    beta_normal,
    canonical,
    equivalent,
    free_vars,
    normalize,
    subst,
    symbol_count,
)

SIG = Signature(constants={"fish": "e>w>o", "vert": "e>w>o", "nemo": "e", "dory": "e",
                           "p": "w>o", "q": "w>o", "b": "o"})


def test_types_are_right_associative():
    assert parse_type("e>w>o") == arrow(E, parse_type("w"), O)
    assert show_type(parse_type("(e>o)>o")) == "(e>o)>o"


def test_signature_rejects_reserved_and_duplicates():
    sig = Signature()
    sig.declare("fish", "e>w>o")
    with pytest.raises(SignatureError):
        sig.declare("fish", "e>o")
    with pytest.raises(SignatureError):
        sig.declare("acc", "w>w>o")
    with pytest.raises(SignatureError):
        sig.declare("Fish", "e")
    with pytest.raises(ParseError, match="unknown base type"):
        sig.declare("thing", "animal>o")


def test_connectives_are_read_by_operand_type():
    assert parse("b & b", SIG).ty == O
    assert parse("p & q", SIG).ty == WO
    mixed = parse("b & p", SIG)
    assert mixed.ty == WO
    assert "rigid" in repr(mixed)


def test_application_and_quantifier_typing():
    t = parse_formula("! [X:e]: (fish @ X => vert @ X)", SIG)
    assert t.ty == WO
    with pytest.raises(ParseError):
        parse_formula("fish @ p", SIG)
    with pytest.raises(ParseError):
        parse_formula("nemo", SIG)


def test_parse_errors_carry_spans():
    with pytest.raises(ParseError) as err:
        parse_formula("p & shark @ nemo", SIG)
    assert err.value.span == (4, 9)
    with pytest.raises(ParseError) as err:
        parse_formula("p & # q", SIG)
    assert err.value.span == (4, 5)
    with pytest.raises(ParseError, match="unbound variable"):
        parse_formula("fish @ X", SIG)


def test_actualist_quantifier_needs_individuals():
    with pytest.raises(ParseError, match="individuals"):
        parse_formula("!A [P:w>o]: P", SIG)


def test_comments_and_truth_constants():
    t = parse_formula("$true & p % trailing comment", SIG)
    assert show(t) == "$true & p"


def test_named_formula_checks_type():
    with pytest.raises(TypeMismatch):
        NamedFormula("x", "premise", SIG.const("nemo"))
    with pytest.raises(ValueError):
        NamedFormula("x", "lemma", SIG.const("p"))


def test_beta_and_alpha():
    x, y = Var("X", E), Var("Y", E)
    fish = SIG.const("fish")
    lam_x = Lam(x, App(fish, x))
    lam_y = Lam(y, App(fish, y))
    assert alpha_eq(lam_x, lam_y)
    assert beta_normal(App(lam_x, SIG.const("nemo"))) == App(fish, SIG.const("nemo"))
    assert canonical(lam_x) == canonical(lam_y)
    # eta: ^X. fish @ X is just fish
    assert normalize(lam_x) == fish


def test_substitution_avoids_capture():
    x, y = Var("X", E), Var("Y", E)
    eq = parse("^ [Y:e]: X = Y", SIG, env={"X": x})
    out = subst(eq, x, y)
    assert y in free_vars(out)
    assert not alpha_eq(out, Lam(y, App(App(Const("eq", arrow(E, E, O)), y), y)))


def test_equivalent_is_modulo_normalization():
    a = parse_formula("(^ [X:e]: fish @ X) @ nemo", SIG)
    b = parse_formula("fish @ nemo", SIG)
    assert equivalent(a, b)
    assert not equivalent(a, parse_formula("fish @ dory", SIG))


def test_symbol_count_grows_with_connectives():
    assert symbol_count(parse_formula("p", SIG)) < symbol_count(parse_formula("p & q", SIG))


# ---------------------------------------------------------------------------
# printer round trip on generated formulas


def _formulas():
    atoms = st.sampled_from(["p", "q", "fish @ nemo", "vert @ dory", "$true", "b"])

    def extend(inner):
        return st.one_of(
            st.tuples(st.sampled_from(["~", "box", "dia"]), inner).map(lambda t: f"{t[0]} ({t[1]})"),
            st.tuples(inner, st.sampled_from(["&", "|", "=>", "<=>"]), inner).map(
                lambda t: f"({t[0]}) {t[1]} ({t[2]})"),
            st.tuples(st.sampled_from(["!", "?"]), inner).map(
                lambda t: f"{t[0]} [X:e]: (fish @ X & ({t[1]}))"),
        )

    return st.recursive(atoms, extend, max_leaves=8)


@settings(max_examples=200, deadline=None)
@given(_formulas())
def test_print_parse_round_trip(src):
    t = parse_formula(src, SIG)
    printed = show(t)
    again = parse_formula(printed, SIG)
    assert alpha_eq(t, again)
    assert show(again) == printed
