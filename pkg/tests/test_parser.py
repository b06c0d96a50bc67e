import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from cinfty.expr import Const, DomainError, IntPower, Var, evaluate
from cinfty.parser import ParseError, parse, to_text, tokenize

from oracles import random_smooth


@pytest.mark.parametrize("text", [
    "x0^2 + x1^2 - 1",
    "exp(x0)*sin(x1)",
    "1/3*x0 - 7/2",
    "x0^-2 * invexp(x0)",
    "atan(sqrt(x0^2 + 1)) + log(2 + cos(x1))",
    "-(x0 - x1)^3",
])
def test_round_trip(text):
    e = parse(text)
    assert parse(to_text(e)) == e
    assert to_text(parse(to_text(e))) == to_text(e)


@given(st.integers(0, 10_000))
def test_round_trip_random(seed):
    text, _ = random_smooth(random.Random(seed), 3, 3)
    e = parse(text)
    assert parse(e.printed) == e


def test_precedence():
    assert parse("2*x0^2") == parse("2*(x0^2)")
    assert parse("-x0^2") == parse("-(x0^2)")
    assert parse("x0 - x1 - x2") == parse("(x0 - x1) - x2")
    assert parse("x0 - x1 - x2") != parse("x0 - (x1 - x2)")
    assert parse("x0/2/2") == parse("x0/4")


def test_negative_exponent():
    assert parse("x0^-3") == IntPower(Var(0), -3)
    assert parse("x0^(-3)") == IntPower(Var(0), -3)


def test_constants_fold():
    assert parse("2^10 - 24") == Const(Fraction(1000))
    assert parse("1.5e2") == Const(Fraction(150))


@pytest.mark.parametrize("text, offset", [
    ("x0 +", 4),
    ("x0 $ x1", 3),
    ("foo(x0)", 0),
    ("x0 + (x1", 8),
    ("x0^x1", 3),
    ("exp x0", 4),
    ("x0 x1", 3),
])
def test_errors_carry_offsets(text, offset):
    with pytest.raises(ParseError) as exc:
        parse(text)
    assert exc.value.offset == offset


def test_offset_counts_bytes():
    with pytest.raises(ParseError) as exc:
        parse("x0 + é")
    assert exc.value.offset == 5
    with pytest.raises(ParseError) as exc:
        parse("é")
    assert exc.value.offset == 0


def test_arity_is_enforced():
    assert parse("x0 + x1", 2).max_var == 1
    with pytest.raises(ParseError) as exc:
        parse("x0 + x2", 2)
    assert exc.value.offset == 5


def test_division_is_a_negative_power():
    assert parse("1/x0") == IntPower(Var(0), -1)
    with pytest.raises(DomainError):
        evaluate(parse("x0/0"), [1.0])


def test_tokenize_skips_whitespace():
    kinds = [k for k, _, _ in tokenize(" x0\t+ 1 ")]
    assert kinds == ["name", "op", "num", "end"]
