import pytest
from hypothesis import given, settings, strategies as st

from corpus import EXPRESSIONS, MALFORMED
from padlab.errors import DivideByZero, DomainError, ExprSyntaxError, PrecisionExhausted
from padlab.expr import (
    Bin, Lit, Num, Pow, Root, Var, check_ledger, evaluate, parse, to_rational, to_text, variables,
)
from padlab.field import INF


def test_shapes():
    e = parse("x^2/(1+x)")
    assert isinstance(e, Bin) and e.op == "/"
    assert isinstance(e.left, Pow) and e.left.exp == 2 and e.left.base == Var("x")
    assert e.right == Bin("+", Num(1), Var("x"))
    r = parse("root(2, 6)")
    assert isinstance(r, Root) and r.n == 2 and r.arg == Num(6)
    assert isinstance(parse("[1,1]"), Lit)


def test_precedence():
    assert to_text(parse("-x^2")) == "-x^2"
    assert parse("-x^2") != parse("(-x)^2")
    assert to_text(parse("((x+y))+z")) == "x+y+z"
    assert to_text(parse("x - (y + z)")) == "x-(y+z)"


@pytest.mark.parametrize("text", EXPRESSIONS)
def test_round_trip(text):
    assert to_text(parse(text)) == text


@pytest.mark.parametrize("text,pos", MALFORMED)
def test_positioned_errors(text, pos):
    with pytest.raises(ExprSyntaxError) as exc:
        parse(text)
    assert (exc.value.data["line"], exc.value.data["col"]) == pos
    assert exc.value.data["expected"]
    assert exc.value.to_json()["error"] == "SyntaxError"


def test_evaluation(Q5):
    r = evaluate("x^2/(1+x)", {"x": 5}, Q5)
    assert r.value == Q5.from_int(25) / 6 and r.value.val == 2
    root = evaluate("root(2,6)", {}, Q5).value
    assert root.to_int() % 25 == 16
    z = evaluate("x-x", {"x": 7}, Q5).value
    assert z.is_zero() and z.val == INF
    h = evaluate("henselroot(2;5,1)", {}, Q5).value
    assert h.to_int() % 125 == 95


def test_domain_errors(Q5):
    with pytest.raises(DomainError) as exc:
        evaluate("1+root(2,2)", {}, Q5)
    assert exc.value.data["subexpr"] == "root(2,2)"
    with pytest.raises(DivideByZero):
        evaluate("1/0", {}, Q5)
    with pytest.raises(PrecisionExhausted):
        evaluate("1/(x-x)", {"x": 3}, Q5)
    with pytest.raises(DomainError):
        evaluate("y+1", {}, Q5)


def test_ledger(Q5):
    r = evaluate("1/(1-5*x)+root(2,x)", {"x": 6}, Q5)
    assert [row["expr"] for row in r.ledger] == ["1/(1-5*x)", "root(2,x)"]
    ok, lo, hi = check_ledger("x^2/(5+x)", {"x": 5}, Q5)
    assert ok and lo.precision <= hi.precision


def test_variables_and_rational(Q5):
    assert variables(parse("x*y-z^2")) == ["x", "y", "z"]
    num, den = to_rational("x^2/(1+x)", Q5)
    assert [c.to_int() if not c.is_zero() else 0 for c in num] == [0, 0, 1]
    assert [c.to_int() for c in den] == [1, 1]


_atoms = st.sampled_from(["x", "y", "1", "5", "[1,2]", "[3]e1"])


def _exprs():
    return st.recursive(
        _atoms,
        lambda inner: st.one_of(
            st.tuples(inner, st.sampled_from("+-*/"), inner).map(lambda t: f"({t[0]}){t[1]}({t[2]})"),
            st.tuples(inner, st.integers(-3, 4)).map(lambda t: f"({t[0]})^{t[1]}"),
            inner.map(lambda s: f"-({s})"),
        ),
        max_leaves=8,
    )


@settings(max_examples=200, deadline=None)
@given(_exprs())
def test_printer_is_a_fixed_point(text):
    once = to_text(parse(text))
    assert to_text(parse(once)) == once
    assert parse(once) == parse(text)
