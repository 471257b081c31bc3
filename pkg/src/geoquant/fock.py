"""Truncated Bargmann-Fock space.

States are holomorphic polynomials in ``z1..zn`` truncated at total degree
``cutoff``.  Operators are turned into exact sparse matrices on the monomial
basis, terms pushed past the cutoff are dropped and flagged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import FrameNotDiagonal, NotDiagonalizable, UnsupportedVariable
from .opalg import DiffOp
from .polar import PolarizationSpec, reduce_op, reduced_space
from .prequant import PrequantContext, prequant_op
from .symexpr import I, ONE_S, Z_KIND, ZERO_S, Expr, Scalar, _coerce, diff, z
from .symplect import hamiltonian_vf

__all__ = [
    "FockBasis", "OpMatrix", "Spectrum", "matrix_of", "spectrum", "halfform_shift",
    "corrected_operator", "gram_matrix", "is_hermitian", "Phase", "MLElement", "chi",
    "chi_square_check", "number_multiplicity",
]

SPECTRUM_TOL = 1e-10


def _compositions(total: int, parts: int):
    """Exponent tuples summing to ``total``, first exponent largest first."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@dataclass(frozen=True)
class FockBasis:
    n: int
    cutoff: int
    indices: tuple = field(init=False, repr=False, compare=False)
    position: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1 or self.cutoff < 0:
            raise ValueError("need n >= 1 and cutoff >= 0")
        idx = tuple(a for d in range(self.cutoff + 1) for a in _compositions(d, self.n))
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "position", {a: k for k, a in enumerate(idx)})

    @property
    def dim(self) -> int:
        return len(self.indices)

    def degree(self, k: int) -> int:
        return sum(self.indices[k])

    def monomial(self, k: int) -> Expr:
        m = tuple((z(j + 1), e) for j, e in enumerate(self.indices[k]) if e)
        return Expr.monomial(m)

    def levels(self, max_degree: int | None = None) -> list:
        top = self.cutoff if max_degree is None else max_degree
        return [k for k in range(self.dim) if self.degree(k) <= top]


def number_multiplicity(N: int, n: int) -> int:
    return math.comb(N + n - 1, n - 1)


@dataclass
class OpMatrix:
    basis: FockBasis
    entries: dict
    boundary_flag: bool = False

    def __getitem__(self, rc) -> Scalar:
        return self.entries.get(rc, ZERO_S)

    def dense(self) -> list:
        d = self.basis.dim
        out = [[ZERO_S] * d for _ in range(d)]
        for (r, c), v in self.entries.items():
            out[r][c] = v
        return out

    def to_numpy(self) -> np.ndarray:
        a = np.zeros((self.basis.dim, self.basis.dim), dtype=complex)
        for (r, c), v in self.entries.items():
            a[r, c] = complex(v)
        return a

    def __matmul__(self, other: "OpMatrix") -> "OpMatrix":
        by_row: dict = {}
        for (k, c), v in other.entries.items():
            by_row.setdefault(k, []).append((c, v))
        out: dict = {}
        for (r, k), u in self.entries.items():
            for c, v in by_row.get(k, ()):
                out[(r, c)] = out.get((r, c), ZERO_S) + u * v
        return OpMatrix(self.basis, {rc: v for rc, v in out.items() if v},
                        self.boundary_flag or other.boundary_flag)

    def __add__(self, other: "OpMatrix") -> "OpMatrix":
        out = dict(self.entries)
        for rc, v in other.entries.items():
            out[rc] = out.get(rc, ZERO_S) + v
        return OpMatrix(self.basis, {rc: v for rc, v in out.items() if v},
                        self.boundary_flag or other.boundary_flag)

    def __sub__(self, other: "OpMatrix") -> "OpMatrix":
        return self + other.scale(-1)

    def scale(self, s) -> "OpMatrix":
        s = _coerce(s).constant_value()
        return OpMatrix(self.basis, {rc: v * s for rc, v in self.entries.items() if v * s},
                        self.boundary_flag)

    def restrict(self, max_degree: int) -> dict:
        """Entries whose row and column both have degree <= ``max_degree``."""
        B = self.basis
        return {(r, c): v for (r, c), v in self.entries.items()
                if B.degree(r) <= max_degree and B.degree(c) <= max_degree}

    def is_degree_preserving(self) -> bool:
        B = self.basis
        return all(B.degree(r) == B.degree(c) for r, c in self.entries)

    def conjugate_transpose(self) -> "OpMatrix":
        return OpMatrix(self.basis, {(c, r): v.conjugate() for (r, c), v in self.entries.items()},
                        self.boundary_flag)


def matrix_of(D: DiffOp, B: FockBasis) -> OpMatrix:
    """Column ``k`` holds the coordinates of ``D(z^alpha_k)``."""
    for v in D.variables():
        if v.kind != Z_KIND or v.index > B.n:
            raise UnsupportedVariable(f"Fock matrices need operators in z1..z{B.n} only, got {v}")
    entries = {}
    flag = False
    for col in range(B.dim):
        img = D(B.monomial(col))
        for m, c in img.terms.items():
            alpha = [0] * B.n
            for v, e in m:
                alpha[v.index - 1] = e
            row = B.position.get(tuple(alpha))
            if row is None:
                flag = True
                continue
            entries[(row, col)] = c
    return OpMatrix(B, entries, flag)


def _sort_key(v):
    if isinstance(v, Scalar):
        return (float(v.re), float(v.im))
    return (v.real, v.imag)


@dataclass
class Spectrum:
    eigenvalues: list  # [(value, multiplicity)], value is Scalar when exact
    exact: bool
    tolerance: float | None = None

    def multiset(self) -> dict:
        return dict(self.eigenvalues)

    def to_dict(self):
        out = {
            "exact": self.exact,
            "eigenvalues": [{"value": str(v) if self.exact else repr(complex(v)),
                             "multiplicity": m} for v, m in self.eigenvalues],
        }
        if not self.exact:
            out["tolerance"] = self.tolerance
        return out


def _triangular(block) -> bool:
    return all(i <= j for i, j in block) or all(i >= j for i, j in block)


def spectrum(M: OpMatrix) -> Spectrum:
    """Exact for degree-preserving matrices with triangular degree blocks, else numeric."""
    B = M.basis
    if M.is_degree_preserving():
        by_level: dict = {}
        for (r, c), v in M.entries.items():
            by_level.setdefault(B.degree(r), {})[(r, c)] = v
        if all(_triangular(blk) for blk in by_level.values()):
            counts: dict = {}
            for k in range(B.dim):
                val = M[(k, k)]
                counts[val] = counts.get(val, 0) + 1
            return Spectrum(sorted(counts.items(), key=lambda t: _sort_key(t[0])), True)
    return _numeric_spectrum(M)


def _numeric_spectrum(M: OpMatrix) -> Spectrum:
    a = M.to_numpy()
    vals, vecs = np.linalg.eig(a)
    if a.shape[0] and np.linalg.matrix_rank(vecs, tol=1e-8) < a.shape[0]:
        raise NotDiagonalizable("matrix is defective; no eigenbasis exists")
    scale = max(1.0, float(np.abs(a).max()) if a.size else 1.0)
    groups: list = []
    for v in sorted(vals, key=lambda x: (x.real, x.imag)):
        for g in groups:
            if abs(g[0] - v) <= SPECTRUM_TOL * scale:
                g[1] += 1
                break
        else:
            groups.append([complex(v), 1])
    return Spectrum([(v, m) for v, m in groups], False, SPECTRUM_TOL)


def halfform_shift(f, P: PolarizationSpec, hbar=Fraction(1)) -> Scalar:
    """Scalar ``(hbar/2) * sum_j lambda_j`` with ``L(X_f) dw_j = i lambda_j dw_j``.

    ``w_j`` are the residual coordinates whose differentials frame the
    polarization's canonical forms (``dz_j`` for the holomorphic one).
    """
    f = _coerce(f)
    xf = hamiltonian_vf(f, P.chart)
    total = ZERO_S
    for w in P.residual_vars:
        comp = xf[w]  # L(X) dw = d(X^w)
        for v in P.chart.coords:
            if v != w and not diff(comp, v).is_zero():
                raise FrameNotDiagonal(f"the flow of X_f mixes d{w} with d{v}")
        rate = diff(comp, w).constant_value()
        if rate is None:
            raise FrameNotDiagonal(f"L(X_f) d{w} is not a constant multiple of d{w}")
        total = total + rate / I
    return total * Scalar(Fraction(hbar)) / 2


def corrected_operator(f, P: PolarizationSpec, hbar=Fraction(1)) -> DiffOp:
    """Reduced prequantum operator plus the half-form shift times the identity."""
    R = reduced_space(P)
    ctx = PrequantContext(P.chart, R.adapted_theta, Fraction(hbar))
    reduced = reduce_op(prequant_op(f, ctx), R)
    return reduced + DiffOp.multiplication(Expr.const(halfform_shift(f, P, hbar)))


def gram_matrix(B: FockBasis, hbar=Fraction(1)) -> list:
    """Diagonal of ``<z^a, z^a> = prod_j a_j! (2 hbar)^a_j``, so ``<1, 1> = 1``."""
    h2 = 2 * Fraction(hbar)
    out = []
    for alpha in B.indices:
        v = Fraction(1)
        for a in alpha:
            v *= math.factorial(a) * h2 ** a
        out.append(v)
    return out


def is_hermitian(M: OpMatrix, gram: list, max_degree: int | None = None) -> bool:
    """Does ``G M`` equal its conjugate transpose on the block of degree <= max_degree?"""
    top = M.basis.cutoff if max_degree is None else max_degree
    entries = M.restrict(top)
    gm = {(r, c): v * gram[r] for (r, c), v in entries.items()}
    for (r, c), v in gm.items():
        if gm.get((c, r), ZERO_S) != v.conjugate():
            return False
    return True


# ---------------------------------------------------------------------------
# Metalinear group ML(n, C) restricted to scalar SL parts


def _mod(x: Fraction, m: Fraction) -> Fraction:
    return x - m * math.floor(x / m)


@dataclass(frozen=True)
class Phase:
    """The complex number ``exp(log_modulus) * exp(i pi angle)``, angle mod 2."""

    log_modulus: Fraction = Fraction(0)
    angle: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "log_modulus", Fraction(self.log_modulus))
        object.__setattr__(self, "angle", _mod(Fraction(self.angle), Fraction(2)))

    def __mul__(self, other: "Phase") -> "Phase":
        return Phase(self.log_modulus + other.log_modulus, self.angle + other.angle)

    def __pow__(self, k: int) -> "Phase":
        return Phase(self.log_modulus * k, self.angle * k)

    def inverse(self) -> "Phase":
        return Phase(-self.log_modulus, -self.angle)

    def __complex__(self):
        return complex(math.exp(self.log_modulus) * np.exp(1j * math.pi * float(self.angle)))

    def to_scalar(self) -> Scalar | None:
        """Exact value when it is one of 1, i, -1, -i."""
        if self.log_modulus or (2 * self.angle).denominator != 1:
            return None
        return [ONE_S, I, -ONE_S, -I][int(2 * self.angle)]

    def __str__(self):
        s = self.to_scalar()
        if s is not None:
            return str(s)
        return f"exp({self.log_modulus} + {self.angle}*pi*i)"


@dataclass(frozen=True)
class MLElement:
    """Coset of ``(z, A)`` with ``z = log_modulus + i pi angle`` and
    ``A = exp(i pi a_phase) I`` in SL(n, C).

    Representatives differ by ``z -> z + 4 pi i k / n``,
    ``A -> exp(-4 pi i k / n) A``; the stored pair is the normal form with
    ``0 <= angle < 4/n``.
    """

    n: int
    log_modulus: Fraction = Fraction(0)
    angle: Fraction = Fraction(0)
    a_phase: Fraction = Fraction(0)

    def __post_init__(self):
        lm, ang, ap = Fraction(self.log_modulus), Fraction(self.angle), Fraction(self.a_phase)
        if (self.n * ap).denominator != 1 or (self.n * ap) % 2:
            raise ValueError("A must have determinant 1")
        period = Fraction(4, self.n)
        k = math.floor(ang / period)
        ang -= k * period
        ap = _mod(ap + k * period, Fraction(2))
        object.__setattr__(self, "log_modulus", lm)
        object.__setattr__(self, "angle", ang)
        object.__setattr__(self, "a_phase", ap)

    def representative(self, k: int) -> tuple:
        """``(log_modulus, angle, a_phase)`` of another member of the coset."""
        period = Fraction(4, self.n)
        return (self.log_modulus, self.angle + k * period, _mod(self.a_phase - k * period, Fraction(2)))

    def rho(self) -> Phase:
        """``rho(z, A) = exp(z) A``, a scalar matrix; returns the scalar."""
        return Phase(self.log_modulus, self.angle + self.a_phase)

    def det_rho(self) -> Phase:
        return self.rho() ** self.n


def chi(e: MLElement, representative: int = 0) -> Phase:
    """``exp(n z / 2)``, evaluated on the chosen representative of the coset."""
    lm, ang, _ = e.representative(representative)
    return Phase(lm * e.n / 2, ang * e.n / 2)


def chi_square_check(e: MLElement) -> bool:
    return chi(e) ** 2 == e.det_rho()
