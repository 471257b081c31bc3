from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import COMPLEX1, REAL1, REAL2, exprs, scalars
from geoquant.errors import ParseError, UnmappedVariable
from geoquant.symexpr import (
    I, ONE, ZERO, Expr, Scalar, add, conjugate, diff, evaluate, mul, named, p, parse_expr,
    parse_scalar, q, scale, subst_linear, z, zb,
)

Q, P, Z, ZB = (Expr.var(v) for v in (q(1), p(1), z(1), zb(1)))
TO_REAL = {z(1): P + Q.scale(I), zb(1): P - Q.scale(I)}
TO_COMPLEX = {p(1): (Z + ZB) / 2, q(1): (Z - ZB).scale(-I / 2)}


def test_ring_examples():
    assert add(Q, -Q) == ZERO
    assert add(Q, -Q).terms == {}
    assert mul(Q + P, Q - P) == Q ** 2 - P ** 2
    assert str(scale(I, P)) == "i*p1"


def test_diff_examples():
    assert diff(Q ** 2 * P, q(1)) == Q * P * 2
    assert diff(Z * ZB, z(1)) == ZB
    assert diff(Expr.const(7), p(1)) == ZERO


def test_subst_examples():
    assert subst_linear(Z * ZB, TO_REAL) == P ** 2 + Q ** 2
    assert subst_linear(Q, {q(1): Q}) == Q
    assert subst_linear(Z, TO_REAL) == P + Q.scale(I)


def test_subst_unmapped_and_nonlinear():
    with pytest.raises(UnmappedVariable):
        subst_linear(Q * P, {q(1): P})
    with pytest.raises(ValueError):
        subst_linear(Q, {q(1): P ** 2})


def test_evaluate_examples():
    assert evaluate(Q ** 2 + P ** 2, {q(1): 3, p(1): 4}) == 25
    assert evaluate(ZERO, {}) == 0
    assert evaluate(Z * ZB, {z(1): Scalar(1, 1), zb(1): Scalar(1, -1)}) == 2
    with pytest.raises(UnmappedVariable):
        evaluate(Q, {})


def test_scalar_arithmetic():
    a = Scalar(Fraction(1, 2), 3)
    assert a * a.inverse() == 1
    assert (a / a) == ONE.constant_value()
    assert a.conjugate() == Scalar(Fraction(1, 2), -3)
    assert I * I == -1
    with pytest.raises(ZeroDivisionError):
        Scalar(0).inverse()


@pytest.mark.parametrize("text,expected", [
    ("3/4", Scalar(Fraction(3, 4))),
    ("-i", -I),
    ("1/2*i", I / 2),
    ("(1+2*i)", Scalar(1, 2)),
])
def test_parse_scalar(text, expected):
    assert parse_scalar(text) == expected


def test_parse_and_render():
    e = parse_expr("(p1^2 + q1^2)/2")
    assert e == (P ** 2 + Q ** 2) / 2
    assert parse_expr("zb*z") == Z * ZB
    assert parse_expr("hbar*q1").variables() == {named("hbar"), q(1)}
    assert str(parse_expr("0")) == "0"


@pytest.mark.parametrize("bad", ["q1 +", "q1^-1", "q1/q2", "(q1", "q1 $ p1", "q1^(1/2)", "q1^p1"])
def test_parse_errors(bad):
    with pytest.raises(ParseError):
        parse_expr(bad)


def test_parse_error_position():
    with pytest.raises(ParseError, match="column 4"):
        parse_expr("q1 ) p1")


def test_conjugate_swaps_z():
    assert conjugate(Z.scale(I) + ZB) == ZB.scale(-I) + Z


@given(exprs(REAL2, 4, 5))
def test_render_roundtrip(a):
    assert parse_expr(str(a)) == a


@given(exprs(REAL2, 3), exprs(REAL2, 3), exprs(REAL2, 3))
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a - a == ZERO
    assert a * ONE == a


@given(exprs(REAL2, 4))
def test_canonical_idempotent(a):
    again = Expr(dict(a.terms))
    assert again == a and again.terms == a.terms
    assert all(c for c in a.terms.values())


@given(exprs(REAL2, 5), st.sampled_from(REAL2), st.sampled_from(REAL2))
def test_diff_commutes(a, u, v):
    assert diff(diff(a, u), v) == diff(diff(a, v), u)


@given(exprs(REAL2, 3), exprs(REAL2, 3), st.sampled_from(REAL2))
def test_leibniz(a, b, v):
    assert diff(a * b, v) == diff(a, v) * b + a * diff(b, v)


@given(exprs(COMPLEX1, 3), exprs(COMPLEX1, 3))
def test_subst_is_ring_morphism(a, b):
    assert subst_linear(a * b, TO_REAL) == subst_linear(a, TO_REAL) * subst_linear(b, TO_REAL)
    assert subst_linear(a + b, TO_REAL) == subst_linear(a, TO_REAL) + subst_linear(b, TO_REAL)


@given(exprs(COMPLEX1, 4))
def test_chart_change_inverse(a):
    assert subst_linear(subst_linear(a, TO_REAL), TO_COMPLEX) == a


@given(exprs(REAL1, 3), scalars(), scalars())
def test_evaluate_is_homomorphism(a, x, y):
    pt = {q(1): x, p(1): y}
    b = a * a + Q
    assert evaluate(b, pt) == evaluate(a, pt) * evaluate(a, pt) + x
