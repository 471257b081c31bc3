"""Constant polarizations on flat charts and reduction to polarized sections.

A polarization is spanned by coordinate fields (``d/dp_j`` for the vertical
one, ``d/dzb_j`` for the holomorphic one, ...).  With an adapted potential
the polarized sections are exactly the functions of the complementary
("residual") coordinates, so a quantizable operator reduces to a
differential operator in those coordinates alone.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .errors import ChartMismatch, NotPolarizationPreserving
from .opalg import DiffOp
from .prequant import PrequantContext, prequant_op
from .symexpr import Expr, _coerce, monomials_upto, p, q, z, zb
from .symplect import (
    ChartModel, Potential, PotentialPreset, VectorField, hamiltonian_vf, pair, potential,
)

__all__ = [
    "PolarizationKind", "PolarizationSpec", "ReducedSpace", "REPRESENTATIONS",
    "adapted_potential", "reduced_space", "preserves_polarization", "polarization_witness",
    "reduce_op", "representation_table", "RepresentationRow",
]


class PolarizationKind(enum.Enum):
    VERTICAL = "vertical"                # span d/dp_j
    HORIZONTAL = "horizontal"            # span d/dq_j
    HOLOMORPHIC = "holomorphic"          # span d/dzb_j
    ANTIHOLOMORPHIC = "antiholomorphic"  # span d/dz_j


REPRESENTATIONS = {
    "schrodinger": PolarizationKind.VERTICAL,
    "momentum": PolarizationKind.HORIZONTAL,
    "bargmann": PolarizationKind.HOLOMORPHIC,
    "antibargmann": PolarizationKind.ANTIHOLOMORPHIC,
}

_LAYOUT = {
    # kind: (chart factory, spanned coordinate, residual coordinate, adapted preset)
    PolarizationKind.VERTICAL: (ChartModel.real, p, q, PotentialPreset.CANONICAL),
    PolarizationKind.HORIZONTAL: (ChartModel.real, q, p, PotentialPreset.MOMENTUM),
    PolarizationKind.HOLOMORPHIC: (ChartModel.complex, zb, z, PotentialPreset.HOLO_ADAPTED),
    PolarizationKind.ANTIHOLOMORPHIC: (ChartModel.complex, z, zb, PotentialPreset.ANTIHOLO_ADAPTED),
}


@dataclass(frozen=True)
class PolarizationSpec:
    kind: PolarizationKind
    n: int = 1
    chart: ChartModel = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be positive")
        make = _LAYOUT[self.kind][0]
        object.__setattr__(self, "chart", make(self.n))
        fields = self.spanning_fields()
        omega = self.chart.omega_form()
        for a in fields:
            for b in fields:
                va, vb = next(iter(a.coeffs)), next(iter(b.coeffs))
                if not omega(va, vb).is_zero():
                    raise ValueError(f"{self.kind.value} distribution is not Lagrangian")
        if len(fields) != self.n:
            raise ValueError("a polarization needs n spanning fields")

    @classmethod
    def from_representation(cls, name: str, n: int = 1) -> "PolarizationSpec":
        try:
            return cls(REPRESENTATIONS[name], n)
        except KeyError:
            raise ValueError(f"unknown representation {name!r}") from None

    @property
    def spanned_vars(self) -> tuple:
        return tuple(_LAYOUT[self.kind][1](j) for j in range(1, self.n + 1))

    @property
    def residual_vars(self) -> tuple:
        return tuple(_LAYOUT[self.kind][2](j) for j in range(1, self.n + 1))

    def spanning_fields(self) -> list:
        return [VectorField({v: 1}) for v in self.spanned_vars]


@dataclass(frozen=True)
class ReducedSpace:
    residual_vars: tuple
    adapted_theta: Potential
    spanning_fields: tuple = ()

    def __post_init__(self):
        for Y in self.spanning_fields:
            if not pair(Y, self.adapted_theta.form).is_zero():
                raise ValueError("potential is not adapted to the polarization")


def adapted_potential(P: PolarizationSpec) -> Potential:
    theta = potential(_LAYOUT[P.kind][3], P.chart)
    for Y in P.spanning_fields():
        assert pair(Y, theta.form).is_zero()
    return theta


def reduced_space(P: PolarizationSpec) -> ReducedSpace:
    return ReducedSpace(P.residual_vars, adapted_potential(P), tuple(P.spanning_fields()))


def polarization_witness(f, P: PolarizationSpec) -> list:
    """Brackets ``[X_f, Y]`` (Y spanning) that leave the polarization."""
    f = _coerce(f)
    P.chart.check_expr(f)
    xf = hamiltonian_vf(f, P.chart)
    spanned = set(P.spanned_vars)
    bad = []
    for Y in P.spanning_fields():
        br = xf.bracket(Y)
        if any(v not in spanned for v in br.coeffs):
            bad.append((Y, br))
    return bad


def preserves_polarization(f, P: PolarizationSpec) -> bool:
    """``[X_f, P] subset P``, decided by exact vanishing of off-span coefficients."""
    return not polarization_witness(f, P)


def reduce_op(D: DiffOp, R: ReducedSpace) -> DiffOp:
    """Restrict ``D`` to functions of the residual variables."""
    residual = set(R.residual_vars)

    def outside(vs):
        return [v for v in vs if not v.is_named and v not in residual]

    kept = {}
    for alpha, c in D.terms.items():
        if all(v in residual for v, _ in alpha):
            bad = outside(c.variables())
            if bad:
                raise NotPolarizationPreserving(
                    f"operator {D.render()} maps polarized sections to functions of {bad[0]}")
            kept[alpha] = c
    reduced = DiffOp(kept)
    for psi in monomials_upto(R.residual_vars, max(D.order(), 0) + 3):
        img = D(psi)
        if outside(img.variables()) or img != reduced(psi):
            raise NotPolarizationPreserving(
                f"operator {D.render()} sends {psi} outside the polarized sections")
    return reduced


@dataclass
class RepresentationRow:
    name: str
    observable: Expr
    quantizable: bool
    operator: DiffOp
    reduced: DiffOp | None
    reason: str = ""

    def to_dict(self):
        out = {
            "observable": str(self.observable),
            "quantizable": self.quantizable,
            "operator": self.operator.render(),
        }
        if self.quantizable:
            out["reduced"] = self.reduced.render()
        else:
            out["rejected"] = self.reason
        return out


def representation_table(P: PolarizationSpec, generators: Mapping[str, object],
                         hbar: Fraction | None = None,
                         theta: Potential | None = None) -> list:
    """Quantizability verdict and reduced operator for every generator.

    ``operator`` is the prequantum operator built with ``theta`` (defaults to
    the adapted potential); ``reduced`` always uses the adapted potential.
    """
    R = reduced_space(P)
    adapted_ctx = PrequantContext(P.chart, R.adapted_theta, hbar)
    shown_ctx = adapted_ctx if theta is None else PrequantContext(P.chart, theta, hbar)
    rows = []
    for name, f in generators.items():
        f = _coerce(f)
        if any(not v.is_named and v not in P.chart.coords for v in f.variables()):
            raise ChartMismatch(f"observable {name} is not on the {P.chart.kind.value} chart")
        shown = prequant_op(f, shown_ctx)
        witness = polarization_witness(f, P)
        if witness:
            Y, br = witness[0]
            reason = (f"not quantizable: [X_{name}, {Y.as_diffop().render()}] = "
                      f"{br.as_diffop().render()} leaves the polarization")
            rows.append(RepresentationRow(name, f, False, shown, None, reason))
            continue
        reduced = reduce_op(prequant_op(f, adapted_ctx), R)
        rows.append(RepresentationRow(name, f, True, shown, reduced))
    return rows
