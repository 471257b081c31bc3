from hypothesis import given, settings

from conftest import REAL1, diffops, exprs
from geoquant.opalg import DiffOp, apply, commutator, compose, identity, parse_op, partial
from geoquant.symexpr import Expr, monomials_upto, p, q, z, zb

Q, P = Expr.var(q(1)), Expr.var(p(1))
dq, dp = partial(q(1)), partial(p(1))
mul_q = DiffOp.multiplication(Q)


def test_apply_examples():
    assert apply(dq, Q ** 2) == Q * 2
    assert apply(DiffOp.multiplication(Q) * dp + identity(), P) == Q + P
    number = DiffOp.multiplication(Expr.var(z(1))) * partial(z(1))
    psi = Expr.var(z(1)) ** 3
    assert apply(number, psi) == psi * 3


def test_compose_examples():
    assert compose(dq, mul_q) == mul_q * dq + identity()
    assert compose(mul_q, dq) == DiffOp({((q(1), 1),): Q})
    assert compose(partial(q(1), 2), mul_q) == mul_q * partial(q(1), 2) + dq.scale(Expr.const(2))


def test_commutator_examples():
    assert commutator(dq, mul_q) == identity()
    A = mul_q * dp + dq
    assert commutator(A, A).is_zero()
    hbar = 1
    Oz = partial(zb(1)).scale(Expr.const(-2 * hbar)) + DiffOp.multiplication(Expr.var(z(1)) / 2)
    Ozb = partial(z(1)).scale(Expr.const(2 * hbar)) + DiffOp.multiplication(Expr.var(zb(1)) / 2)
    assert commutator(Oz, Ozb) == DiffOp.multiplication(Expr.const(-2 * hbar))


def test_render():
    D = dq.scale(Expr.const(-1) * Expr.var(p(1)) ** 0) + DiffOp.multiplication(P)
    assert D.render() == "-d/dq1 + p1"
    assert partial(q(1), 2).render() == "d^2/dq1^2"
    assert identity().render() == "1"
    assert DiffOp().render() == "0"


def test_parse_op():
    D = parse_op("(-i*hbar)*d/dq1 + p1")
    assert D.order() == 1
    assert parse_op(D.render()) == D
    assert parse_op("d/dq1 * q1") == mul_q * dq + identity()


@given(diffops())
def test_render_roundtrip(D):
    assert parse_op(D.render()) == D


@given(diffops(), diffops(), diffops())
def test_compose_associative(A, B, C):
    assert compose(compose(A, B), C) == compose(A, compose(B, C))


@given(diffops(max_order=1), diffops(max_order=1), diffops(max_order=1))
def test_commutator_jacobi(A, B, C):
    total = (commutator(A, commutator(B, C)) + commutator(B, commutator(C, A))
             + commutator(C, commutator(A, B)))
    assert total.is_zero()


@settings(max_examples=60)
@given(diffops(), diffops())
def test_compose_is_nested_apply(A, B):
    AB = compose(A, B)
    bound = max(A.order(), 0) + max(B.order(), 0) + 3
    for psi in monomials_upto(REAL1, bound):
        assert apply(AB, psi) == apply(A, apply(B, psi))


@given(diffops(), exprs(), exprs())
def test_apply_linear(D, a, b):
    assert apply(D, a + b.scale(3)) == apply(D, a) + apply(D, b).scale(3)
