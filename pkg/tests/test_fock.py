import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import integrate

from conftest import diffops
from geoquant.errors import FrameNotDiagonal, NotDiagonalizable, UnsupportedVariable
from geoquant.fock import (
    FockBasis, MLElement, OpMatrix, Phase, chi, chi_square_check, corrected_operator,
    gram_matrix, halfform_shift, is_hermitian, matrix_of, number_multiplicity, spectrum,
)
from geoquant.opalg import DiffOp, compose, partial
from geoquant.polar import PolarizationKind, PolarizationSpec
from geoquant.symexpr import Expr, Scalar, q, z, zb

HOL1 = PolarizationSpec(PolarizationKind.HOLOMORPHIC, 1)
HOL2 = PolarizationSpec(PolarizationKind.HOLOMORPHIC, 2)
Z1 = Expr.var(z(1))


def number_op(n, hbar=1):
    D = DiffOp()
    for j in range(1, n + 1):
        D = D + DiffOp.multiplication(Expr.var(z(j)).scale(hbar)) * partial(z(j))
    return D


def test_basis():
    B = FockBasis(2, 3)
    assert B.dim == math.comb(5, 2)
    assert B.indices[:3] == ((0, 0), (1, 0), (0, 1))
    assert all(B.position[a] == k for k, a in enumerate(B.indices))


def test_matrix_examples():
    M = matrix_of(DiffOp.multiplication(Z1), FockBasis(1, 2))
    assert M.entries == {(1, 0): 1, (2, 1): 1} and M.boundary_flag
    h = Fraction(1, 2)
    M = matrix_of(partial(z(1)).scale(Expr.const(2 * h)), FockBasis(1, 2))
    assert M.entries == {(0, 1): 2 * h, (1, 2): 2 * h * 2} and not M.boundary_flag
    M = matrix_of(number_op(1, h), FockBasis(1, 3))
    assert [M[(k, k)] for k in range(4)] == [0, h, 2 * h, 3 * h]


def test_unsupported_variable():
    with pytest.raises(UnsupportedVariable):
        matrix_of(partial(zb(1)), FockBasis(1, 2))
    with pytest.raises(UnsupportedVariable):
        matrix_of(DiffOp.multiplication(Expr.var(z(2))), FockBasis(1, 2))


def test_spectrum_examples():
    s = spectrum(matrix_of(number_op(2), FockBasis(2, 2)))
    assert s.exact and s.eigenvalues == [(0, 1), (1, 2), (2, 3)]
    zero = spectrum(OpMatrix(FockBasis(1, 4), {}))
    assert zero.eigenvalues == [(0, 5)]
    D = corrected_operator(Z1 * Expr.var(zb(1)) / 2, HOL1)
    assert spectrum(matrix_of(D, FockBasis(1, 3))).eigenvalues == [
        (Fraction(1, 2), 1), (Fraction(3, 2), 1), (Fraction(5, 2), 1), (Fraction(7, 2), 1)]


def test_numeric_spectrum():
    # z d/dz + d/dz is not degree preserving but diagonalizable with eigenvalues 0..D
    D = number_op(1) + partial(z(1))
    s = spectrum(matrix_of(D, FockBasis(1, 4)))
    assert not s.exact and s.tolerance == 1e-10
    vals = sorted(complex(v).real for v, _ in s.eigenvalues)
    assert np.allclose(vals, [0, 1, 2, 3, 4], atol=1e-9)
    assert "tolerance" in s.to_dict()


def test_defective():
    with pytest.raises(NotDiagonalizable):
        spectrum(matrix_of(partial(z(1)) + DiffOp.multiplication(Expr.var(z(1)) ** 2) * partial(z(1), 2),
                           FockBasis(1, 3)))


def test_halfform_examples():
    assert halfform_shift(Z1 * Expr.var(zb(1)) / 2, HOL1) == Fraction(1, 2)
    H2 = (Z1 * Expr.var(zb(1)) + Expr.var(z(2)) * Expr.var(zb(2))) / 2
    assert halfform_shift(H2, HOL2) == 1
    assert halfform_shift(H2, HOL2, Fraction(1, 3)) == Fraction(1, 3)
    V = PolarizationSpec(PolarizationKind.VERTICAL, 1)
    assert halfform_shift(Expr.var(q(1)), V) == 0
    with pytest.raises(FrameNotDiagonal):
        halfform_shift(Expr.var(z(1)) * Expr.var(zb(2)), HOL2)


def _quadrature_gram(m, hbar=1.0):
    f = lambda r, th: r ** (2 * m) * math.exp(-r * r / (2 * hbar)) * r
    val, _ = integrate.dblquad(f, 0, 2 * math.pi, 0, np.inf, epsabs=1e-12, epsrel=1e-12)
    return val / (2 * math.pi * hbar)


@pytest.mark.parametrize("m,expected", [(0, 1), (1, 2), (2, 8)])
def test_gram_examples(m, expected):
    g = gram_matrix(FockBasis(1, 2))
    assert g[m] == expected
    assert abs(_quadrature_gram(m) - expected) < 1e-8


def test_gram_multi_index():
    B = FockBasis(2, 2)
    g = gram_matrix(B, Fraction(1, 2))
    assert g[B.position[(1, 1)]] == 1
    assert g[B.position[(2, 0)]] == 2


@pytest.mark.parametrize("n", [1, 2, 3])
def test_number_operator_hermitian(n):
    B = FockBasis(n, 3)
    M = matrix_of(number_op(n), B)
    assert is_hermitian(M, gram_matrix(B))


def test_ladder_adjoint():
    hbar = Fraction(1, 2)
    B = FockBasis(1, 5)
    g = gram_matrix(B, hbar)
    a = matrix_of(partial(z(1)).scale(Expr.const(2 * hbar)), B)
    ad = matrix_of(DiffOp.multiplication(Z1), B)
    for (r, c), v in a.entries.items():
        assert g[r] * v == (g[c] * ad[(c, r)]).conjugate()
    x = a + ad
    assert is_hermitian(x, g, B.cutoff - 1)


@pytest.mark.parametrize("hbar", [Fraction(1), Fraction(1, 2)])
def test_ladder_commutator_interior(hbar):
    D = 6
    B = FockBasis(1, D)
    a = matrix_of(partial(z(1)).scale(Expr.const(2 * hbar)), B)
    ad = matrix_of(DiffOp.multiplication(Z1), B)
    comm = (a @ ad - ad @ a).restrict(D - 1)
    assert comm == {(k, k): 2 * hbar for k in range(D)}
    # oracle: dense products at D + 2 are exact on the same block
    Bb = FockBasis(1, D + 2)
    A = matrix_of(partial(z(1)).scale(Expr.const(2 * hbar)), Bb).to_numpy()
    Ad = matrix_of(DiffOp.multiplication(Z1), Bb).to_numpy()
    dense = (A @ Ad - Ad @ A)[:D, :D]
    assert np.allclose(dense, 2 * float(hbar) * np.eye(D))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_number_multiplicities(n):
    D = 10 if n < 3 else 6
    s = spectrum(matrix_of(number_op(n), FockBasis(n, D)))
    assert s.eigenvalues == [(N, number_multiplicity(N, n)) for N in range(D + 1)]


def _growth(D: DiffOp) -> int:
    out = 0
    for alpha, c in D.terms.items():
        out = max(out, c.degree() - sum(k for _, k in alpha))
    return out


@given(diffops((z(1), z(2)), max_order=2, coeff_degree=2), diffops((z(1), z(2)), max_order=2, coeff_degree=2))
def test_morphism_interior(A, Bop):
    B = FockBasis(2, 4)
    lhs = matrix_of(compose(A, Bop), B)
    rhs = matrix_of(A, B) @ matrix_of(Bop, B)
    top = B.cutoff - max(_growth(Bop), 0)
    cols = [k for k in range(B.dim) if B.degree(k) <= top]
    for c in cols:
        for r in range(B.dim):
            assert lhs[(r, c)] == rhs[(r, c)]


def test_chi_examples():
    assert chi(MLElement(1)) == Phase()
    e = MLElement(1, 0, 2)
    assert e.rho() == Phase() and str(chi(e)) == "-1"
    assert chi_square_check(e)


@given(st.integers(1, 4), st.fractions(-3, 3, max_denominator=6), st.fractions(-8, 8, max_denominator=6),
       st.integers(0, 7))
def test_chi_properties(n, lm, ang, k):
    e = MLElement(n, lm, ang, Fraction(2 * k, n))
    assert chi_square_check(e)
    assert chi(e, 0) == chi(e, 1) == chi(e, -1)
    other = MLElement(n, *e.representative(3))
    assert other == e and other.rho() == e.rho()


def test_ml_rejects_non_sl():
    with pytest.raises(ValueError):
        MLElement(2, 0, 0, Fraction(1, 2))


def test_phase_complex():
    assert abs(complex(Phase(0, Fraction(1, 2))) - 1j) < 1e-12
    assert Phase(0, Fraction(1, 3)).to_scalar() is None
    assert Phase(0, 1).to_scalar() == Scalar(-1)
