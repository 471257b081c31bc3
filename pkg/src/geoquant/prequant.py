"""Prequantization: ``O_f = -i hbar X_f + <X_f | theta> + f``.

The connection is ``nabla_X = X + (i/hbar) theta(X)`` so the operator above
is ``-i hbar nabla_{X_f} + f``.  ``hbar`` is either a positive rational or
``None``, in which case it stays symbolic as the named variable ``hbar``
(only used for rendering operator tables).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement

from .errors import ChartMismatch
from .opalg import DiffOp, commutator
from .symexpr import I, Expr, _coerce, monomials_upto, named, p, q
from .symplect import (
    ChartKind, ChartModel, Potential, hamiltonian_vf, pair, poisson, potential,
)

__all__ = [
    "HBAR", "Kappa", "PrequantContext", "prequant_op", "dirac_check", "dirac_sweep",
    "gauge_shift_check", "invariant_subspace_witness",
    "DiracReport", "SweepReport", "GaugeReport", "WitnessReport",
]

HBAR = named("hbar")


class Kappa(enum.Enum):
    I_OVER_HBAR = "i/hbar"
    TWO_PI_I = "2*pi*i"


@dataclass(frozen=True)
class PrequantContext:
    chart: ChartModel
    theta: Potential
    hbar: Fraction | None = Fraction(1)
    kappa: Kappa = Kappa.I_OVER_HBAR

    def __post_init__(self):
        if self.theta.chart != self.chart:
            raise ChartMismatch("potential lives on a different chart")
        if self.kappa is not Kappa.I_OVER_HBAR:
            raise ValueError("prequantization operators use the i/hbar connection")
        if self.hbar is not None:
            h = Fraction(self.hbar)
            if h <= 0:
                raise ValueError("hbar must be positive")
            object.__setattr__(self, "hbar", h)

    @classmethod
    def build(cls, kind="real", n=1, theta="canonical", hbar=Fraction(1)) -> "PrequantContext":
        kind = ChartKind(kind) if not isinstance(kind, ChartKind) else kind
        chart = ChartModel.real(n) if kind is ChartKind.REAL_CANONICAL else ChartModel.complex(n)
        return cls(chart, potential(theta, chart), hbar)

    def with_theta(self, theta: Potential) -> "PrequantContext":
        return PrequantContext(self.chart, theta, self.hbar, self.kappa)

    def with_hbar(self, hbar) -> "PrequantContext":
        return PrequantContext(self.chart, self.theta, hbar, self.kappa)

    @property
    def hbar_expr(self) -> Expr:
        return Expr.var(HBAR) if self.hbar is None else Expr.const(self.hbar)


def prequant_op(f, ctx: PrequantContext) -> DiffOp:
    f = _coerce(f)
    xf = hamiltonian_vf(f, ctx.chart)
    kinetic = xf.as_diffop().scale(ctx.hbar_expr.scale(-I))
    return kinetic + DiffOp.multiplication(pair(xf, ctx.theta.form) + f)


@dataclass
class DiracReport:
    f: Expr
    g: Expr
    holds: bool
    lhs: DiffOp
    rhs: DiffOp

    def to_dict(self):
        return {"f": str(self.f), "g": str(self.g), "holds": self.holds,
                "lhs": self.lhs.render(), "rhs": self.rhs.render()}


def dirac_check(f, g, ctx: PrequantContext, _cache=None) -> DiracReport:
    """Is ``[O_f, O_g] == i hbar O_{f,g}`` exactly?"""
    f, g = _coerce(f), _coerce(g)
    op = _cached(ctx, _cache)
    lhs = commutator(op(f), op(g))
    rhs = op(poisson(f, g, ctx.chart)).scale(ctx.hbar_expr.scale(I))
    return DiracReport(f, g, lhs == rhs, lhs, rhs)


def _cached(ctx, cache):
    if cache is None:
        return lambda f: prequant_op(f, ctx)

    def op(f):
        D = cache.get(f)
        if D is None:
            D = cache[f] = prequant_op(f, ctx)
        return D
    return op


@dataclass
class SweepReport:
    potential: str
    hbar: Fraction | None
    degree: int
    checked: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def holds(self) -> bool:
        return not self.counterexamples

    def to_dict(self):
        return {
            "potential": self.potential,
            "hbar": None if self.hbar is None else str(self.hbar),
            "degree": self.degree,
            "pairs_checked": self.checked,
            "holds": self.holds,
            "counterexamples": [c.to_dict() for c in self.counterexamples],
        }


def dirac_sweep(ctx: PrequantContext, degree: int = 3) -> SweepReport:
    """Dirac check over all unordered pairs of monomials of degree <= ``degree``.

    Unordered pairs suffice: both sides are antisymmetric in (f, g).
    """
    monos = monomials_upto(ctx.chart.coords, degree)
    report = SweepReport(ctx.theta.name, ctx.hbar, degree)
    cache: dict = {}
    for f, g in combinations_with_replacement(monos, 2):
        r = dirac_check(f, g, ctx, cache)
        report.checked += 1
        if not r.holds:
            report.counterexamples.append(r)
    return report


@dataclass
class GaugeReport:
    f: Expr
    alpha: Expr
    holds: bool
    difference: DiffOp
    expected: DiffOp

    def to_dict(self):
        return {"f": str(self.f), "alpha": str(self.alpha), "holds": self.holds,
                "difference": self.difference.render(), "expected": self.expected.render()}


def gauge_shift_check(f, alpha, ctx: PrequantContext) -> GaugeReport:
    """``O_{f, theta + d alpha} - O_{f, theta} == X_f(alpha)``."""
    f, alpha = _coerce(f), _coerce(alpha)
    shifted = ctx.with_theta(ctx.theta.shifted(alpha))
    diff_op = prequant_op(f, shifted) - prequant_op(f, ctx)
    expected = DiffOp.multiplication(hamiltonian_vf(f, ctx.chart)(alpha))
    return GaugeReport(f, alpha, diff_op == expected, diff_op, expected)


@dataclass
class WitnessReport:
    degree: int
    invariant: bool
    images: dict
    matrices: dict
    commutant: dict

    def to_dict(self):
        return {
            "degree": self.degree,
            "invariant": self.invariant,
            "images": {k: [[str(a), str(b)] for a, b in v] for k, v in self.images.items()},
            "commutant_commutes": self.commutant,
        }


def invariant_subspace_witness(ctx: PrequantContext, degree: int = 3) -> WitnessReport:
    """Functions of the momenta alone are mapped into themselves by ``O_q``, ``O_p``.

    Images are expanded on the monomials ``p^beta`` with ``|beta| <= degree + 1``
    (``O_p`` raises the degree by one).  Also records that ``d/dq`` and
    ``hbar d/dp + i q`` commute with every ``O_q``, ``O_p``.
    """
    if ctx.chart.kind is not ChartKind.REAL_CANONICAL:
        raise ChartMismatch("the momentum-function witness needs the real chart")
    n = ctx.chart.n
    momenta = [p(j) for j in range(1, n + 1)]
    basis = monomials_upto(momenta, degree)
    target = monomials_upto(momenta, degree + 1)
    row_of = {next(iter(b.terms)): i for i, b in enumerate(target)}
    allowed = set(momenta)
    images, matrices, invariant = {}, {}, True
    ops = {}
    for j in range(1, n + 1):
        ops[f"O_q{j}"] = prequant_op(Expr.var(q(j)), ctx)
        ops[f"O_p{j}"] = prequant_op(Expr.var(p(j)), ctx)
    for name, D in ops.items():
        imgs, entries = [], {}
        for col, psi in enumerate(basis):
            img = D(psi)
            imgs.append((psi, img))
            if not {v for v in img.variables() if not v.is_named} <= allowed:
                invariant = False
                continue
            for m, c in img.terms.items():
                key = (row_of[tuple(t for t in m if not t[0].is_named)], col)
                param = Expr.monomial(tuple(t for t in m if t[0].is_named), c)
                entries[key] = entries.get(key, Expr()) + param
        images[name] = imgs
        matrices[name] = entries
    commutant = {}
    for j in range(1, n + 1):
        cands = {
            f"d/dq{j}": DiffOp.partial(q(j)),
            f"hbar*d/dp{j} + i*q{j}": DiffOp.partial(p(j)).scale(ctx.hbar_expr)
            + DiffOp.multiplication(Expr.var(q(j)).scale(I)),
        }
        for cname, C in cands.items():
            commutant[cname] = all(commutator(C, D).is_zero() for D in ops.values())
    return WitnessReport(degree, invariant, images, matrices, commutant)
