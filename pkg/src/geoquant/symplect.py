"""Flat symplectic charts, one-forms, vector fields and Poisson brackets.

Conventions: ``i(X_f) Omega = df`` and ``{f, g} = Omega(X_f, X_g)``.  On the
real canonical chart ``Omega = dq^j ^ dp_j`` this gives
``{f, g} = f_q g_p - f_p g_q``; on the complex chart
``Omega = (i/2) dzb_j ^ dz_j``.  Both go through the same linear solve.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ChartMismatch, InvalidPotential
from .opalg import DiffOp
from .symexpr import (
    I, ONE_S, ZERO_S, Expr, Scalar, Var, _coerce, diff, p, q, render_expr, z, zb,
    to_scalar,
)

__all__ = [
    "ChartKind", "ChartModel", "OneForm", "TwoForm", "VectorField",
    "PotentialPreset", "Potential", "potential",
    "hamiltonian_vf", "poisson", "d_of_oneform", "pair", "exterior_derivative",
    "interior", "symplectic_form",
]


class ChartKind(enum.Enum):
    REAL_CANONICAL = "real"
    COMPLEX = "complex"


def _invert(mat):
    """Exact Gauss-Jordan inverse of a square Scalar matrix."""
    n = len(mat)
    a = [list(row) + [ONE_S if i == j else ZERO_S for j in range(n)] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            raise ValueError("symplectic matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col].inverse()
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(tuple(row[n:]) for row in a)


@dataclass(frozen=True)
class ChartModel:
    """A flat chart with constant symplectic matrix.

    ``omega[a][b]`` are the components in ``Omega = 1/2 omega_ab dx^a ^ dx^b``
    with respect to ``coords``.
    """

    n: int
    kind: ChartKind
    coords: tuple
    omega: tuple
    _field_matrix: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        dim = len(self.coords)
        if dim != 2 * self.n:
            raise ValueError("a chart needs 2n coordinates")
        om = tuple(tuple(to_scalar(x) for x in row) for row in self.omega)
        if len(om) != dim or any(len(r) != dim for r in om):
            raise ValueError("omega must be a 2n x 2n matrix")
        for a in range(dim):
            for b in range(dim):
                if om[a][b] != -om[b][a]:
                    raise ValueError("omega must be antisymmetric")
        object.__setattr__(self, "omega", om)
        # i(X)Omega = df  <=>  omega^T X = grad f
        transpose = tuple(tuple(om[b][a] for b in range(dim)) for a in range(dim))
        object.__setattr__(self, "_field_matrix", _invert(transpose))

    @classmethod
    def real(cls, n: int = 1) -> "ChartModel":
        coords = tuple(q(j) for j in range(1, n + 1)) + tuple(p(j) for j in range(1, n + 1))
        om = [[ZERO_S] * (2 * n) for _ in range(2 * n)]
        for j in range(n):
            om[j][n + j] = ONE_S
            om[n + j][j] = -ONE_S
        return cls(n, ChartKind.REAL_CANONICAL, coords, tuple(map(tuple, om)))

    @classmethod
    def complex(cls, n: int = 1) -> "ChartModel":
        coords = tuple(z(j) for j in range(1, n + 1)) + tuple(zb(j) for j in range(1, n + 1))
        half_i = I / 2
        om = [[ZERO_S] * (2 * n) for _ in range(2 * n)]
        for j in range(n):
            om[n + j][j] = half_i      # (i/2) dzb ^ dz
            om[j][n + j] = -half_i
        return cls(n, ChartKind.COMPLEX, coords, tuple(map(tuple, om)))

    def index(self, v: Var) -> int:
        try:
            return self.coords.index(v)
        except ValueError:
            raise ChartMismatch(f"variable {v} is not a coordinate of this chart") from None

    def check_expr(self, f: Expr) -> None:
        """Named variables are parameters; other variables must be coordinates."""
        for v in f.variables():
            if not v.is_named and v not in self.coords:
                raise ChartMismatch(f"variable {v} is not a coordinate of the {self.kind.value} chart")

    def omega_form(self) -> "TwoForm":
        return symplectic_form(self)


class OneForm:
    """``sum_v coeffs[v] * d(v)``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Var, object] | None = None):
        self.coeffs = {v: _coerce(c) for v, c in sorted((coeffs or {}).items()) if not _coerce(c).is_zero()}

    def __getitem__(self, v: Var) -> Expr:
        return self.coeffs.get(v, Expr())

    def __eq__(self, other):
        return isinstance(other, OneForm) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other: "OneForm") -> "OneForm":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, Expr()) + c
        return OneForm(out)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return self + other.scale(-1)

    def scale(self, s) -> "OneForm":
        return OneForm({v: c * _coerce(s) for v, c in self.coeffs.items()})

    def __repr__(self):
        return f"OneForm({self})"

    def __str__(self):
        if not self.coeffs:
            return "0"
        return " + ".join(f"({render_expr(c)})*d{v}" for v, c in self.coeffs.items())


class TwoForm:
    """Antisymmetric components ``comp[(a, b)]`` for ``a < b``: ``sum comp * da ^ db``."""

    __slots__ = ("comp",)

    def __init__(self, comp: Mapping | None = None):
        clean = {}
        for (a, b), c in (comp or {}).items():
            c = _coerce(c)
            if a == b:
                continue
            if b < a:
                a, b, c = b, a, -c
            prev = clean.get((a, b), Expr())
            clean[(a, b)] = prev + c
        self.comp = {k: c for k, c in sorted(clean.items()) if not c.is_zero()}

    def __call__(self, a: Var, b: Var) -> Expr:
        if a == b:
            return Expr()
        if a < b:
            return self.comp.get((a, b), Expr())
        return -self.comp.get((b, a), Expr())

    def __eq__(self, other):
        return isinstance(other, TwoForm) and self.comp == other.comp

    def is_zero(self) -> bool:
        return not self.comp

    def __repr__(self):
        if not self.comp:
            return "TwoForm(0)"
        body = " + ".join(f"({render_expr(c)})*d{a}^d{b}" for (a, b), c in self.comp.items())
        return f"TwoForm({body})"


def symplectic_form(chart: ChartModel) -> TwoForm:
    comp = {}
    for i, a in enumerate(chart.coords):
        for j, b in enumerate(chart.coords):
            if a < b and chart.omega[i][j]:
                comp[(a, b)] = Expr.const(chart.omega[i][j])
    return TwoForm(comp)


class VectorField:
    """``sum_v coeffs[v] * d/dv``; calling it on an Expr is the derivation."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Mapping[Var, object] | None = None):
        self.coeffs = {v: _coerce(c) for v, c in sorted((coeffs or {}).items()) if not _coerce(c).is_zero()}

    def __getitem__(self, v: Var) -> Expr:
        return self.coeffs.get(v, Expr())

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __call__(self, f) -> Expr:
        f = _coerce(f)
        out = Expr()
        for v, c in self.coeffs.items():
            d = diff(f, v)
            if not d.is_zero():
                out = out + c * d
        return out

    def __add__(self, other: "VectorField") -> "VectorField":
        out = dict(self.coeffs)
        for v, c in other.coeffs.items():
            out[v] = out.get(v, Expr()) + c
        return VectorField(out)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s) -> "VectorField":
        return VectorField({v: c * _coerce(s) for v, c in self.coeffs.items()})

    def bracket(self, other: "VectorField") -> "VectorField":
        """Lie bracket ``[self, other] = self o other - other o self``."""
        out = {}
        for v in set(self.coeffs) | set(other.coeffs):
            out[v] = self(other[v]) - other(self[v])
        return VectorField(out)

    def as_diffop(self) -> DiffOp:
        return DiffOp({((v, 1),): c for v, c in self.coeffs.items()})

    def __repr__(self):
        return f"VectorField({self.as_diffop().render()})"


def exterior_derivative(f) -> OneForm:
    f = _coerce(f)
    return OneForm({v: diff(f, v) for v in f.variables()})


def interior(X: VectorField, form: TwoForm) -> OneForm:
    """``i(X) form`` for a two-form."""
    out: dict = {}
    for (a, b), c in form.comp.items():
        # c da^db : i(X) -> c (X^a db - X^b da)
        if X[a]:
            out[b] = out.get(b, Expr()) + c * X[a]
        if X[b]:
            out[a] = out.get(a, Expr()) - c * X[b]
    return OneForm(out)


def hamiltonian_vf(f, chart: ChartModel) -> VectorField:
    """The field with ``i(X_f) Omega = df``."""
    f = _coerce(f)
    chart.check_expr(f)
    grad = [diff(f, v) for v in chart.coords]
    out = {}
    for a, v in enumerate(chart.coords):
        row = chart._field_matrix[a]
        acc = Expr()
        for b, m in enumerate(row):
            if m and not grad[b].is_zero():
                acc = acc + grad[b].scale(m)
        out[v] = acc
    return VectorField(out)


def poisson(f, g, chart: ChartModel) -> Expr:
    """``{f, g} = Omega(X_f, X_g)``."""
    f, g = _coerce(f), _coerce(g)
    xf = hamiltonian_vf(f, chart)
    xg = hamiltonian_vf(g, chart)
    out = Expr()
    for a, u in enumerate(chart.coords):
        if not xf[u]:
            continue
        for b, w in enumerate(chart.coords):
            m = chart.omega[a][b]
            if m and xg[w]:
                out = out + (xf[u] * xg[w]).scale(m)
    return out


def d_of_oneform(theta: OneForm) -> TwoForm:
    """``d(sum c_b dx^b) = sum_{a<b} (d_a c_b - d_b c_a) dx^a ^ dx^b``."""
    vs = set(theta.coeffs)
    for c in theta.coeffs.values():
        vs |= c.variables()
    vs = sorted(vs)
    comp = {}
    for i, a in enumerate(vs):
        for b in vs[i + 1:]:
            val = diff(theta[b], a) - diff(theta[a], b)
            if not val.is_zero():
                comp[(a, b)] = val
    return TwoForm(comp)


def pair(v: VectorField, theta: OneForm) -> Expr:
    """``<v | theta>``."""
    out = Expr()
    for w, c in v.coeffs.items():
        t = theta[w]
        if not t.is_zero():
            out = out + c * t
    return out


class PotentialPreset(enum.Enum):
    CANONICAL = "canonical"                  # -p_j dq^j
    MOMENTUM = "momentum"                    # q^j dp_j
    SYMMETRIC = "symmetric"                  # (1/2)(q^j dp_j - p_j dq^j)
    HOLO_ADAPTED = "holo_adapted"            # (i/2) zb_j dz_j
    COMPLEX_SYMMETRIC = "complex_symmetric"  # (i/4)(zb_j dz_j - z_j dzb_j)
    ANTIHOLO_ADAPTED = "antiholo_adapted"    # -(i/2) z_j dzb_j
    CUSTOM = "custom"


_REAL_PRESETS = {PotentialPreset.CANONICAL, PotentialPreset.MOMENTUM, PotentialPreset.SYMMETRIC}
_COMPLEX_PRESETS = {PotentialPreset.HOLO_ADAPTED, PotentialPreset.COMPLEX_SYMMETRIC,
                    PotentialPreset.ANTIHOLO_ADAPTED}


def _preset_form(preset: PotentialPreset, n: int) -> OneForm:
    half = Scalar(1, 0) / 2
    c = {}
    for j in range(1, n + 1):
        if preset is PotentialPreset.CANONICAL:
            c[q(j)] = -Expr.var(p(j))
        elif preset is PotentialPreset.MOMENTUM:
            c[p(j)] = Expr.var(q(j))
        elif preset is PotentialPreset.SYMMETRIC:
            c[p(j)] = Expr.var(q(j)).scale(half)
            c[q(j)] = Expr.var(p(j)).scale(-half)
        elif preset is PotentialPreset.HOLO_ADAPTED:
            c[z(j)] = Expr.var(zb(j)).scale(I / 2)
        elif preset is PotentialPreset.COMPLEX_SYMMETRIC:
            c[z(j)] = Expr.var(zb(j)).scale(I / 4)
            c[zb(j)] = Expr.var(z(j)).scale(-I / 4)
        elif preset is PotentialPreset.ANTIHOLO_ADAPTED:
            c[zb(j)] = Expr.var(z(j)).scale(-I / 2)
    return OneForm(c)


@dataclass(frozen=True, eq=False)
class Potential:
    """A symplectic potential on a chart; ``d(form) == Omega`` is enforced."""

    preset: PotentialPreset
    chart: ChartModel
    form: OneForm

    def __post_init__(self):
        for v in self.form.coeffs:
            if v not in self.chart.coords:
                raise ChartMismatch(f"potential has a d{v} component outside the chart")
        for c in self.form.coeffs.values():
            self.chart.check_expr(c)
        if d_of_oneform(self.form) != symplectic_form(self.chart):
            raise InvalidPotential(f"d({self.form}) is not the symplectic form of the chart")

    @property
    def name(self) -> str:
        return self.preset.value

    def shifted(self, alpha) -> "Potential":
        """Gauge transform ``theta + d(alpha)``."""
        return Potential(PotentialPreset.CUSTOM, self.chart, self.form + exterior_derivative(alpha))

    def __repr__(self):
        return f"Potential({self.name}: {self.form})"


def potential(name, chart: ChartModel) -> Potential:
    """Build a preset by enum or name, or a custom potential from a OneForm."""
    if isinstance(name, OneForm):
        return Potential(PotentialPreset.CUSTOM, chart, name)
    preset = name if isinstance(name, PotentialPreset) else PotentialPreset(str(name).lower())
    if preset is PotentialPreset.CUSTOM:
        raise ValueError("a custom potential needs its one-form")
    if preset in _REAL_PRESETS and chart.kind is not ChartKind.REAL_CANONICAL:
        raise ChartMismatch(f"potential {preset.value!r} needs the real chart")
    if preset in _COMPLEX_PRESETS and chart.kind is not ChartKind.COMPLEX:
        raise ChartMismatch(f"potential {preset.value!r} needs the complex chart")
    return Potential(preset, chart, _preset_form(preset, chart.n))
