"""Oscillator on the punctured plane with the circle polarization.

Phase space R^2 - {0} with ``Omega = dp ^ dq``, potential
``theta = (1/2)(p dq - q dp)``, ``H = (p^2 + q^2)/2`` and connection
``nabla_X f = X f + 2 pi i theta(X) f``.  The polarization is spanned by
``X_H = -p d/dq + q d/dp = d/dTheta``.  Polar quantities use the named
variables ``r``, ``Theta`` and ``pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .cech import Cochain, Nerve, Ring, cocycle_check, is_coboundary, metalinear_class_count
from .symexpr import I, Expr, named, p, q
from .symplect import ChartKind, ChartModel, OneForm, Potential, PotentialPreset, hamiltonian_vf, pair

__all__ = [
    "R", "THETA", "PI", "SimmsContext", "PolarizedPDE", "Leaf",
    "to_polar", "polarized_pde", "smooth_solution_exists", "bs_leaves", "metalinear_report",
    "WARNINGS",
]

R = named("r")
THETA = named("Theta")
PI = named("pi")

CASES = ("trivial", "nontrivial")

WARNINGS = {
    "simms-2piH": (
        "the Hamiltonian operator on the leaf lattice is written as multiplication by "
        "2*pi*H = 2*pi*r^2 in the source; with H = r^2/2 this is pi*r^2, which is used here "
        "so that leaf k has eigenvalue k"),
}


def _chart() -> ChartModel:
    # Omega = dp ^ dq: omega_{qp} = -1, omega_{pq} = 1
    return ChartModel(1, ChartKind.REAL_CANONICAL, (q(1), p(1)), ((0, -1), (1, 0)))


@dataclass(frozen=True)
class SimmsContext:
    case: str = "trivial"
    theta_scale: Fraction = Fraction(1)
    chart: ChartModel = field(default_factory=_chart, compare=False, repr=False)

    def __post_init__(self):
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        if Fraction(self.theta_scale) == 0:
            raise ValueError("theta_scale must be non-zero")

    @property
    def hamiltonian(self) -> Expr:
        return (Expr.var(q(1)) ** 2 + Expr.var(p(1)) ** 2) / 2

    @property
    def theta(self) -> OneForm:
        half = Fraction(1, 2) * Fraction(self.theta_scale)
        return OneForm({q(1): Expr.var(p(1)).scale(half), p(1): Expr.var(q(1)).scale(-half)})

    def potential(self) -> Potential:
        """Only the unscaled form is a genuine potential of ``dp ^ dq``."""
        return Potential(PotentialPreset.CUSTOM, self.chart, self.theta)

    def polarization_field(self):
        return hamiltonian_vf(self.hamiltonian, self.chart)


def to_polar(f: Expr) -> Expr:
    """Rewrite a radial polynomial in ``q, p`` as a polynomial in ``r``.

    Only ``q^2 + p^2 -> r^2`` is performed; anything not of the form
    ``sum c_k (q^2 + p^2)^k`` (coefficients may hold parameters) raises ValueError.
    """
    s = Expr.var(q(1)) ** 2 + Expr.var(p(1)) ** 2
    out, rebuilt = Expr(), Expr()
    for m, c in f.terms.items():
        coord = [(v, e) for v, e in m if v in (q(1), p(1))]
        param = Expr.monomial(tuple(t for t in m if t not in coord), c)
        if not coord:
            out, rebuilt = out + param, rebuilt + param
            continue
        if len(coord) > 1 or coord[0][0] != q(1):
            continue                  # carried by the pure-q term, checked below
        d = coord[0][1]
        if d % 2:
            raise ValueError(f"{f} is not a function of q^2 + p^2")
        out = out + Expr.var(R) ** d * param
        rebuilt = rebuilt + s ** (d // 2) * param
    if rebuilt != f:
        raise ValueError(f"{f} is not a function of q^2 + p^2")
    return out


@dataclass(frozen=True)
class PolarizedPDE:
    """``dTheta_coeff * df/dTheta + zero_order_coeff * f = 0``."""

    dTheta_coeff: Expr
    zero_order_coeff: Expr
    contraction: Expr          # theta(X_H) in polar form

    def at_radius(self, r) -> Expr:
        from .symexpr import specialize
        return specialize(self.zero_order_coeff, {R: r})

    def render(self) -> str:
        lead = "" if self.dTheta_coeff == Expr.const(1) else f"({self.dTheta_coeff})*"
        zero = str(self.zero_order_coeff)
        sign = " - " if zero.startswith("-") else " + "
        return f"{lead}df/dTheta{sign}{zero.lstrip('-')}*f = 0"

    def to_dict(self):
        return {"dTheta_coeff": str(self.dTheta_coeff),
                "zero_order_coeff": str(self.zero_order_coeff),
                "theta_of_X_H": str(self.contraction),
                "equation": self.render()}


def polarized_pde(ctx: SimmsContext | None = None) -> PolarizedPDE:
    """``nabla_{X_H} f = 0`` with ``X_H = d/dTheta``.

    The zero-order coefficient is ``2 pi i theta(X_H)``; the half-form factor
    is annihilated by ``L(X_H)`` in both metalinear cases and contributes nothing.
    """
    ctx = ctx or SimmsContext()
    xh = ctx.polarization_field()
    contraction = to_polar(pair(xh, ctx.theta))
    zero = contraction * Expr.var(PI) * Expr.const(2 * I)
    return PolarizedPDE(Expr.const(1), zero, contraction)


@dataclass
class Verdict:
    exists: bool
    reason: dict

    def to_dict(self):
        return {"exists": self.exists, "reason": self.reason}


def smooth_solution_exists(ctx: SimmsContext | None = None) -> Verdict:
    """Smooth polarized sections: ``f = C(r) exp(lam(r) Theta)`` must be 2pi-periodic.

    Periodicity means ``lam(r) 2 pi / (2 pi i) = -i lam(r)`` is an integer for
    every r; it cannot be if that quantity varies with r.
    """
    pde = polarized_pde(ctx)
    rate = -pde.zero_order_coeff                  # f' = rate * f (dTheta_coeff is 1)
    winding = rate.scale(-I)                      # must lie in Z
    general = f"C(r)*exp(({rate})*Theta)"
    depends = R in winding.variables()
    if depends:
        return Verdict(False, {
            "general_solution": general,
            "periodicity": f"exp(({rate})*2*pi*n) = 1 for all n in Z",
            "constraint": f"{winding} in Z for all r in (a,b)",
            "contradiction": f"{winding} is non-constant in r, so it cannot stay integral "
                             "on an interval while C(r) is smooth and non-zero",
        })
    c = winding.constant_value()
    ok = not winding.variables() and c.im == 0 and c.re.denominator == 1
    return Verdict(ok, {"general_solution": general, "constraint": f"{winding} in Z"})


@dataclass(frozen=True)
class Leaf:
    k: int

    @property
    def radius(self) -> str:
        return f"sqrt({self.k}/pi)"

    @property
    def radius_squared(self) -> str:
        return f"{self.k}/pi"

    @property
    def pi_radius_squared(self) -> Fraction:
        """``pi * r^2`` on the leaf, exact."""
        return Fraction(self.k)

    @property
    def radius_numeric(self) -> float:
        return math.sqrt(self.k / math.pi)

    @property
    def degenerate(self) -> bool:
        return self.k == 0

    @property
    def eigenvalue(self) -> Fraction:
        """``2 pi H = pi r^2`` evaluated on the leaf."""
        two_pi_h = to_polar(SimmsContext().hamiltonian) * Expr.var(PI) * Expr.const(2)
        total = Fraction(0)
        for m, c in two_pi_h.terms.items():
            if dict(m) != {PI: 1, R: 2} or c.im:
                raise ValueError(f"2*pi*H = {two_pi_h} is not a multiple of pi*r^2")
            total += c.re * self.pi_radius_squared
        return total

    def to_dict(self):
        out = {"k": self.k, "radius": self.radius, "radius_squared": self.radius_squared,
               "eigenvalue": str(self.eigenvalue), "section": f"exp(i*{self.k}*Theta)*delta(r - {self.radius})"}
        if self.degenerate:
            out["degenerate"] = True
        return out


def bs_leaves(k_max: int) -> list:
    """Bohr-Sommerfeld leaves ``pi r^2 = k`` for ``k = 0..k_max``."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    return [Leaf(k) for k in range(k_max + 1)]


def _two_set_transitions(case: str) -> dict:
    # U1 = M minus {Theta = 0}, U2 = M minus {Theta = pi}; U1 n U2 has two components
    eps = -1 if case == "nontrivial" else 1
    return {"(0,pi)": 1, "(pi,2pi)": eps}


def metalinear_report(k_max: int = 0, cases=CASES) -> dict:
    """Both metalinear classes: transition data, cocycle checks, PDE, leaves."""
    nerve = Nerve.triangle()
    count = metalinear_class_count(nerve)
    pde_by_case, out_cases = {}, {}
    for case in cases:
        trans = _two_set_transitions(case)
        # Z2 written multiplicatively as +-1: c_12 c_21 = c_12^2 = 1 on each component
        two_set_ok = all(Fraction(v) * Fraction(v) == 1 for v in trans.values())
        # refinement to three arcs (a good cover): the class sits on one edge
        flip = {(0, 1): 1, (1, 2): 1, (0, 2): -1 if case == "nontrivial" else 1}
        additive = Cochain(nerve, 1, Ring.Z2, {e: (1 if v == -1 else 0) for e, v in flip.items()})
        pde = polarized_pde(SimmsContext(case))
        pde_by_case[case] = pde
        out_cases[case] = {
            "transition_c12": trans,
            "transition_squared": {k: v * v for k, v in trans.items()},
            "two_set_cocycle": two_set_ok,
            "triangle_cocycle": cocycle_check(flip, nerve),
            "class_trivial": is_coboundary(additive),
            "pde": pde.to_dict(),
            "smooth_solution": smooth_solution_exists(SimmsContext(case)).to_dict(),
        }
    same = len({(d.dTheta_coeff, d.zero_order_coeff) for d in pde_by_case.values()}) == 1
    return {
        "class_count": count,
        "cases": out_cases,
        "same_pde": same,
        "leaves": [leaf.to_dict() for leaf in bs_leaves(k_max)],
        "warnings": [{"code": code, "message": msg} for code, msg in sorted(WARNINGS.items())],
    }
