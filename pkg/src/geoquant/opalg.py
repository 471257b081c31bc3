"""Linear differential operators with polynomial coefficients.

A ``DiffOp`` is stored in normal form: a map from a derivative multi-index
(same tuple layout as a monomial) to the coefficient that sits to its left,

    D = sum_alpha c_alpha(x) * d^alpha

Composition moves derivatives right through coefficients with the Leibniz
rule, so two operators are equal exactly when their normal forms agree.
"""

from __future__ import annotations

from itertools import product
from math import comb
from typing import Mapping

from .symexpr import (
    ONE_S, UNIT, Expr, Scalar, Var, _coerce, _Parser, diff, mono_degree,
    mono_key, mono_mul, render_expr, to_scalar,
)

__all__ = ["DiffOp", "apply", "compose", "commutator", "parse_op", "identity", "partial"]


def _render_deriv(alpha) -> str:
    parts = []
    for v, k in alpha:
        parts.append(f"d/d{v}" if k == 1 else f"d^{k}/d{v}^{k}")
    return "*".join(parts)


def _sub_indices(alpha):
    """All (gamma, binomial weight) with gamma <= alpha componentwise."""
    ranges = [range(k + 1) for _, k in alpha]
    for ks in product(*ranges):
        weight = 1
        gamma = []
        for (v, k), g in zip(alpha, ks):
            weight *= comb(k, g)
            if g:
                gamma.append((v, g))
        yield tuple(gamma), weight


def _mono_sub(alpha, gamma):
    d = dict(alpha)
    for v, g in gamma:
        d[v] -= g
    return tuple(sorted((v, k) for v, k in d.items() if k))


def _diff_multi(c: Expr, gamma) -> Expr:
    for v, g in gamma:
        for _ in range(g):
            c = diff(c, v)
            if c.is_zero():
                return c
    return c


class DiffOp:
    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        clean = {}
        for alpha, c in (terms or {}).items():
            c = _coerce(c)
            if not c.is_zero():
                clean[tuple(sorted(alpha))] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> "DiffOp":
        d = object.__new__(cls)
        d._terms = terms
        d._hash = None
        return d

    @classmethod
    def multiplication(cls, c) -> "DiffOp":
        c = _coerce(c)
        return cls._wrap({UNIT: c} if c else {})

    @classmethod
    def partial(cls, v: Var, order: int = 1) -> "DiffOp":
        return cls._wrap({((v, order),): Expr.const(1)})

    @property
    def terms(self) -> dict:
        return self._terms

    def items(self):
        """Terms with the highest derivative order first."""
        return sorted(self._terms.items(), key=lambda t: mono_key(t[0]), reverse=True)

    def order(self) -> int:
        if not self._terms:
            return -1
        return max(mono_degree(a) for a in self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def constant_value(self) -> Scalar | None:
        if not self._terms:
            return to_scalar(0)
        if list(self._terms) == [UNIT]:
            return self._terms[UNIT].constant_value()
        return None

    def variables(self) -> frozenset:
        out = set()
        for alpha, c in self._terms.items():
            out.update(v for v, _ in alpha)
            out.update(c.variables())
        return frozenset(out)

    def derivative_vars(self) -> frozenset:
        return frozenset(v for alpha in self._terms for v, _ in alpha)

    def zeroth_order(self) -> Expr:
        return self._terms.get(UNIT, Expr())

    def coefficient(self, alpha) -> Expr:
        return self._terms.get(tuple(sorted(alpha)), Expr())

    def __eq__(self, other):
        if isinstance(other, DiffOp):
            return self._terms == other._terms
        o = _lift(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"DiffOp({self.render()!r})"

    def __str__(self):
        return self.render()

    def render(self) -> str:
        """Deterministic text, e.g. ``(-i*hbar)*d/dq1 + p1``."""
        if not self._terms:
            return "0"
        parts = []
        for alpha, c in self.items():
            if not alpha:
                parts.append(render_expr(c))
            elif c.constant_value() == ONE_S:
                parts.append(_render_deriv(alpha))
            elif c.constant_value() == -ONE_S:
                parts.append("-" + _render_deriv(alpha))
            else:
                ctxt = render_expr(c)
                if len(c.terms) > 1 or ctxt.startswith("-") or ctxt.startswith("("):
                    ctxt = f"({ctxt})"
                parts.append(f"{ctxt}*{_render_deriv(alpha)}")
        out = parts[0]
        for t in parts[1:]:
            out += " - " + t[1:] if t.startswith("-") else " + " + t
        return out

    def __neg__(self):
        return DiffOp._wrap({a: -c for a, c in self._terms.items()})

    def __add__(self, other):
        o = _lift(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for a, c in o._terms.items():
            s = out.get(a)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(a, None)
            else:
                out[a] = s
        return DiffOp._wrap(out)

    __radd__ = __add__

    def __sub__(self, other):
        o = _lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _lift(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = _lift(other)
        if o is None:
            return NotImplemented
        return compose(self, o)

    def __rmul__(self, other):
        o = _lift(other)
        if o is None:
            return NotImplemented
        return compose(o, self)

    def __pow__(self, k: int):
        result = identity()
        for _ in range(k):
            result = compose(result, self)
        return result

    def scale(self, s) -> "DiffOp":
        s = _coerce(s)
        if s.is_zero():
            return DiffOp()
        return DiffOp._wrap({a: c * s for a, c in self._terms.items() if not (c * s).is_zero()})

    def __call__(self, psi) -> Expr:
        return apply(self, psi)


def _lift(x) -> DiffOp | None:
    if isinstance(x, DiffOp):
        return x
    e = _coerce(x)
    if e is None:
        return None
    return DiffOp.multiplication(e)


def identity() -> DiffOp:
    return DiffOp.multiplication(1)


def partial(v: Var, order: int = 1) -> DiffOp:
    return DiffOp.partial(v, order)


def apply(D: DiffOp, psi) -> Expr:
    psi = _coerce(psi)
    out = Expr()
    for alpha, c in D.terms.items():
        d = _diff_multi(psi, alpha)
        if not d.is_zero():
            out = out + c * d
    return out


def compose(A: DiffOp, B: DiffOp) -> DiffOp:
    """Normal-ordered ``A o B``."""
    out: dict = {}
    for alpha, a in A.terms.items():
        subs = list(_sub_indices(alpha)) if alpha else [((), 1)]
        for beta, b in B.terms.items():
            for gamma, weight in subs:
                db = _diff_multi(b, gamma) if gamma else b
                if db.is_zero():
                    continue
                coeff = a * db
                if weight != 1:
                    coeff = coeff.scale(weight)
                key = mono_mul(_mono_sub(alpha, gamma) if gamma else alpha, beta)
                prev = out.get(key)
                out[key] = coeff if prev is None else prev + coeff
    return DiffOp._wrap({k: c for k, c in out.items() if not c.is_zero()})


def commutator(A: DiffOp, B: DiffOp) -> DiffOp:
    return compose(A, B) - compose(B, A)


def parse_op(text: str) -> DiffOp:
    """Parse the rendering produced by ``DiffOp.render``.

    Products are compositions, so ``d/dq1*q1`` parses to ``q1*d/dq1 + 1``.
    """
    return _Parser(text, DiffOp.multiplication, DiffOp.partial).parse()
