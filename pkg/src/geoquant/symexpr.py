"""Exact polynomials over complex-rational coefficients.

The variables of phase space are ``q1, p1, ...`` (real canonical chart) and
``z1, zb1, ...`` (complex chart, ``zb`` is the formally independent
conjugate).  Anything else is a named parameter such as ``hbar`` or ``r``.

Everything here is exact.  ``Expr`` values are immutable and compare by
canonical form.
"""

from __future__ import annotations

import functools
import re
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Mapping, NamedTuple

from .errors import ParseError, UnmappedVariable

__all__ = [
    "Scalar", "Var", "Expr", "I", "ZERO", "ONE",
    "q", "p", "z", "zb", "named",
    "add", "mul", "scale", "diff", "subst_linear", "evaluate", "specialize",
    "conjugate", "parse_expr", "to_scalar", "parse_scalar",
]


# ---------------------------------------------------------------------------
# Scalars


class Scalar:
    """Gaussian rational ``re + i*im`` with ``Fraction`` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def _make(cls, re: Fraction, im: Fraction) -> "Scalar":
        s = object.__new__(cls)
        s.re = re
        s.im = im
        return s

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return render_scalar(self)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        if isinstance(other, complex):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __neg__(self):
        return Scalar._make(-self.re, -self.im)

    def __add__(self, other):
        o = to_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return Scalar._make(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = to_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return Scalar._make(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = to_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        o = to_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        if not self.im and not o.im:
            return Scalar._make(self.re * o.re, self.im)
        return Scalar._make(self.re * o.re - self.im * o.im,
                            self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = to_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = to_scalar(other, strict=False)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = ONE_S
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def inverse(self) -> "Scalar":
        n = self.re * self.re + self.im * self.im
        if n == 0:
            raise ZeroDivisionError("inverse of zero scalar")
        return Scalar._make(self.re / n, -self.im / n)

    def conjugate(self) -> "Scalar":
        return Scalar._make(self.re, -self.im)

    @property
    def is_real(self) -> bool:
        return self.im == 0


ZERO_S = Scalar(0)
ONE_S = Scalar(1)
I = Scalar(0, 1)


def to_scalar(value, strict=True):
    """Coerce int, Fraction, Scalar, or a rational-string to a Scalar."""
    if isinstance(value, Scalar):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return Scalar._make(Fraction(value), Fraction(0))
    if isinstance(value, Rational):
        return Scalar(Fraction(value.numerator, value.denominator))
    if isinstance(value, str):
        return parse_scalar(value)
    if strict:
        raise TypeError(f"cannot convert {value!r} to an exact scalar")
    return None


def _render_fraction(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def render_scalar(s: Scalar) -> str:
    """``3/4``, ``-i``, ``1/2*i``, ``(1+2*i)``."""
    re_, im = s.re, s.im
    if im == 0:
        return _render_fraction(re_)
    if im == 1:
        im_txt = "i"
    elif im == -1:
        im_txt = "-i"
    else:
        im_txt = f"{_render_fraction(im)}*i"
    if re_ == 0:
        return im_txt
    sign = "-" if im < 0 else "+"
    mag = "i" if abs(im) == 1 else f"{_render_fraction(abs(im))}*i"
    return f"({_render_fraction(re_)}{sign}{mag})"


def parse_scalar(text: str) -> Scalar:
    """Parse a constant expression such as ``"1/2"`` or ``"-i"``."""
    e = parse_expr(text)
    c = e.constant_value()
    if c is None:
        raise ParseError(f"expected a constant, got {text!r}", text)
    return c


# ---------------------------------------------------------------------------
# Variables and monomials

Q_KIND, P_KIND, Z_KIND, ZBAR_KIND, NAMED_KIND = range(5)
_KIND_PREFIX = {Q_KIND: "q", P_KIND: "p", Z_KIND: "z", ZBAR_KIND: "zb"}


class Var(NamedTuple):
    """Ordered by (kind, index, name); kinds are Q < P < Z < ZBAR < NAMED."""

    kind: int
    index: int = 0
    name: str = ""

    def __str__(self):
        if self.kind == NAMED_KIND:
            return self.name
        return f"{_KIND_PREFIX[self.kind]}{self.index}"

    def __repr__(self):
        return f"Var({self})"

    @property
    def is_named(self) -> bool:
        return self.kind == NAMED_KIND

    def conjugate(self) -> "Var":
        if self.kind == Z_KIND:
            return Var(ZBAR_KIND, self.index)
        if self.kind == ZBAR_KIND:
            return Var(Z_KIND, self.index)
        return self


def q(j: int = 1) -> Var:
    return Var(Q_KIND, j)


def p(j: int = 1) -> Var:
    return Var(P_KIND, j)


def z(j: int = 1) -> Var:
    return Var(Z_KIND, j)


def zb(j: int = 1) -> Var:
    return Var(ZBAR_KIND, j)


def named(name: str) -> Var:
    return Var(NAMED_KIND, 0, name)


_VAR_RE = re.compile(r"^(zb|q|p|z)(\d*)$")


def var_from_name(name: str) -> Var:
    m = _VAR_RE.match(name)
    if m:
        kind = {"q": Q_KIND, "p": P_KIND, "z": Z_KIND, "zb": ZBAR_KIND}[m.group(1)]
        idx = int(m.group(2)) if m.group(2) else 1
        if idx < 1:
            raise ParseError(f"variable index must be >= 1: {name!r}")
        return Var(kind, idx)
    return named(name)


# A monomial is a tuple of (Var, exponent) pairs sorted by Var, exponents > 0.
Monomial = tuple
UNIT: Monomial = ()


def mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for v, e in b:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def mono_vars(m: Monomial) -> tuple:
    return tuple(v for v, _ in m)


def mono_from(pairs: Mapping[Var, int] | Iterable) -> Monomial:
    items = pairs.items() if isinstance(pairs, Mapping) else pairs
    return tuple(sorted((v, e) for v, e in items if e))


def _mono_cmp(a: Monomial, b: Monomial) -> int:
    """Graded lexicographic comparison with q1 > p1 > ... in lex weight."""
    da, db = mono_degree(a), mono_degree(b)
    if da != db:
        return -1 if da < db else 1
    ea, eb = dict(a), dict(b)
    for v in sorted(set(ea) | set(eb)):
        x, y = ea.get(v, 0), eb.get(v, 0)
        if x != y:
            return -1 if x < y else 1
    return 0


mono_key = functools.cmp_to_key(_mono_cmp)


def render_monomial(m: Monomial) -> str:
    return "*".join(str(v) if e == 1 else f"{v}^{e}" for v, e in m)


# ---------------------------------------------------------------------------
# Expressions


class Expr:
    """Polynomial as a canonical ``{Monomial: Scalar}`` map (no zeros)."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping | None = None):
        if terms:
            self._terms = {m: c for m, c in terms.items() if c}
        else:
            self._terms = {}
        self._hash = None

    @classmethod
    def _wrap(cls, terms: dict) -> "Expr":
        e = object.__new__(cls)
        e._terms = terms
        e._hash = None
        return e

    # constructors
    @classmethod
    def const(cls, c) -> "Expr":
        c = to_scalar(c)
        return cls._wrap({UNIT: c} if c else {})

    @classmethod
    def var(cls, v: Var, power: int = 1) -> "Expr":
        if power == 0:
            return cls.const(1)
        return cls._wrap({((v, power),): ONE_S})

    @classmethod
    def monomial(cls, m: Monomial, c=1) -> "Expr":
        c = to_scalar(c)
        return cls._wrap({m: c} if c else {})

    # inspection
    @property
    def terms(self) -> dict:
        return self._terms

    def items(self):
        """Terms in descending graded-lex order."""
        return sorted(self._terms.items(), key=lambda t: mono_key(t[0]), reverse=True)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def degree(self) -> int:
        """Total degree; the zero polynomial has degree -1."""
        if not self._terms:
            return -1
        return max(mono_degree(m) for m in self._terms)

    def variables(self) -> frozenset:
        return frozenset(v for m in self._terms for v, _ in m)

    def constant_value(self) -> Scalar | None:
        """The value if this is a constant polynomial, else ``None``."""
        if not self._terms:
            return ZERO_S
        if len(self._terms) == 1 and UNIT in self._terms:
            return self._terms[UNIT]
        return None

    def coefficient(self, m: Monomial) -> Scalar:
        return self._terms.get(m, ZERO_S)

    # equality
    def __eq__(self, other):
        if isinstance(other, Expr):
            return self._terms == other._terms
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"Expr({render_expr(self)!r})"

    def __str__(self):
        return render_expr(self)

    # arithmetic
    def __neg__(self):
        return Expr._wrap({m: -c for m, c in self._terms.items()})

    def __add__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        if not o._terms:
            return self
        if not self._terms:
            return o
        out = dict(self._terms)
        for m, c in o._terms.items():
            s = out.get(m)
            if s is None:
                out[m] = c
            else:
                s = s + c
                if s:
                    out[m] = s
                else:
                    del out[m]
        return Expr._wrap(out)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (Scalar, int, Fraction)):
            return self.scale(other)
        o = _coerce(other)
        if o is None:
            return NotImplemented
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in o._terms.items():
                m = mono_mul(m1, m2)
                s = out.get(m)
                out[m] = c1 * c2 if s is None else s + c1 * c2
        return Expr._wrap({m: c for m, c in out.items() if c})

    def __rmul__(self, other):
        return self.__mul__(other)

    def __truediv__(self, other):
        if isinstance(other, Expr):
            c = other.constant_value()
            if c is None:
                raise ZeroDivisionError("division by a non-constant polynomial")
            other = c
        s = to_scalar(other, strict=False)
        if s is None:
            return NotImplemented
        return self.scale(s.inverse())

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a non-negative integer")
        result = Expr.const(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def scale(self, s) -> "Expr":
        s = to_scalar(s)
        if not s:
            return ZERO
        if s == ONE_S:
            return self
        return Expr._wrap({m: c * s for m, c in self._terms.items()})

    def diff(self, v: Var) -> "Expr":
        return diff(self, v)


def _coerce(x) -> Expr | None:
    if isinstance(x, Expr):
        return x
    if isinstance(x, Var):
        return Expr.var(x)
    s = to_scalar(x, strict=False)
    if s is None:
        return None
    return Expr.const(s)


ZERO = Expr()
ONE = Expr.const(1)


def add(a: Expr, b: Expr) -> Expr:
    return a + b


def mul(a: Expr, b: Expr) -> Expr:
    return a * b


def scale(s, a: Expr) -> Expr:
    return a.scale(s)


def diff(a: Expr, v: Var) -> Expr:
    out: dict = {}
    for m, c in a.terms.items():
        for k, (w, e) in enumerate(m):
            if w == v:
                nm = m[:k] + m[k + 1:] if e == 1 else m[:k] + ((w, e - 1),) + m[k + 1:]
                s = out.get(nm)
                term = c * e
                out[nm] = term if s is None else s + term
                break
    return Expr._wrap({m: c for m, c in out.items() if c})


def _substitute(a: Expr, image: Callable[[Var], Expr]) -> Expr:
    powers: dict = {}
    result = ZERO
    for m, c in a.terms.items():
        term = Expr.const(c)
        for v, e in m:
            key = (v, e)
            if key not in powers:
                powers[key] = image(v) ** e
            term = term * powers[key]
        result = result + term
    return result


def subst_linear(a: Expr, mapping: Mapping[Var, Expr]) -> Expr:
    """Ring homomorphism sending each variable to a polynomial of degree <= 1."""
    images = {}
    for v, img in mapping.items():
        img = _coerce(img)
        if img.degree() > 1:
            raise ValueError(f"substitution for {v} is not linear: {img}")
        images[v] = img

    def image(v):
        try:
            return images[v]
        except KeyError:
            raise UnmappedVariable(f"no substitution given for variable {v}") from None

    return _substitute(a, image)


def specialize(a: Expr, values: Mapping[Var, object]) -> Expr:
    """Replace the listed variables by constants, keep the rest symbolic."""
    consts = {v: Expr.const(c) for v, c in values.items()}
    return _substitute(a, lambda v: consts.get(v, Expr.var(v)))


def evaluate(a: Expr, point: Mapping[Var, object]) -> Scalar:
    """Exact value of ``a`` at ``point``; every variable must be assigned."""
    vals = {v: to_scalar(c) for v, c in point.items()}
    total = ZERO_S
    for m, c in a.terms.items():
        t = c
        for v, e in m:
            try:
                t = t * vals[v] ** e
            except KeyError:
                raise UnmappedVariable(f"no value given for variable {v}") from None
        total = total + t
    return total


def conjugate(a: Expr) -> Expr:
    """Complex conjugate: coefficients conjugated, z_j <-> zb_j swapped."""
    out = {}
    for m, c in a.terms.items():
        nm = tuple(sorted((v.conjugate(), e) for v, e in m))
        out[nm] = c.conjugate()
    return Expr._wrap(out)


# ---------------------------------------------------------------------------
# Text form


def render_expr(a: Expr) -> str:
    if a.is_zero():
        return "0"
    parts = []
    for m, c in a.items():
        if not m:
            txt = render_scalar(c)
        else:
            mono = render_monomial(m)
            if c == ONE_S:
                txt = mono
            elif c == -ONE_S:
                txt = "-" + mono
            else:
                txt = f"{render_scalar(c)}*{mono}"
        parts.append(txt)
    out = parts[0]
    for t in parts[1:]:
        out += " - " + t[1:] if t.startswith("-") else " + " + t
    return out


_TOKEN_RE = re.compile(
    r"\s*(?:"
    r"(?P<deriv>d(?:\^(?P<dord>\d+))?/d(?P<dvar>[A-Za-z_][A-Za-z0-9_]*?)(?:\^(?P<dord2>\d+))?(?![A-Za-z0-9_]))"
    r"|(?P<num>\d+)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()])"
    r")"
)


def _tokenize(text: str, allow_deriv: bool):
    pos = 0
    tokens = []
    n = len(text)
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", text, pos)
        start = pos
        if m.group("deriv") is not None:
            if not allow_deriv:
                raise ParseError("derivative not allowed in a polynomial", text, start)
            o1, o2 = m.group("dord"), m.group("dord2")
            if (o1 or "1") != (o2 or "1"):
                raise ParseError("mismatched derivative orders", text, start)
            tokens.append(("deriv", (m.group("dvar"), int(o1 or 1)), start))
        elif m.group("num") is not None:
            tokens.append(("num", int(m.group("num")), start))
        elif m.group("ident") is not None:
            tokens.append(("ident", m.group("ident"), start))
        else:
            tokens.append(("op", m.group("op"), start))
        pos = m.end()
    tokens.append(("end", None, n))
    return tokens


class _Parser:
    """Recursive descent over ``+ - * / ^`` and parentheses.

    ``lift`` maps an ``Expr`` atom into the target algebra and ``deriv``
    builds a derivative atom (operator parsing only).
    """

    def __init__(self, text, lift, deriv=None):
        self.text = text
        self.toks = _tokenize(text, deriv is not None)
        self.i = 0
        self.lift = lift
        self.deriv = deriv

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        raise ParseError(msg, self.text, tok[2])

    def parse(self):
        if self.peek()[0] == "end":
            self.error("empty expression")
        val = self.sum()
        if self.peek()[0] != "end":
            self.error(f"unexpected token {self.peek()[1]!r}")
        return val

    def sum(self):
        val = self.product()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            rhs = self.product()
            val = val + rhs if op == "+" else val - rhs
        return val

    def product(self):
        val = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()
            rhs = self.unary()
            if op[1] == "*":
                val = val * rhs
            else:
                c = _constant_of(rhs)
                if c is None:
                    self.error("division only by a constant", op)
                if not c:
                    self.error("division by zero", op)
                val = val * self.lift(Expr.const(c.inverse()))
        return val

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            val = self.unary()
            return -val if t[1] == "-" else val
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "num":
                self.error("exponent must be a non-negative integer literal", t)
            result = self.lift(ONE)
            for _ in range(t[1]):
                result = result * base
            return result
        return base

    def atom(self):
        t = self.take()
        kind, val, _ = t
        if kind == "num":
            return self.lift(Expr.const(val))
        if kind == "ident":
            if val == "i":
                return self.lift(Expr.const(I))
            return self.lift(Expr.var(var_from_name(val)))
        if kind == "deriv":
            name, order = val
            return self.deriv(var_from_name(name), order)
        if kind == "op" and val == "(":
            inner = self.sum()
            if self.take()[1] != ")":
                self.i -= 1
                self.error("expected ')'")
            return inner
        self.i -= 1
        self.error(f"unexpected token {val!r}" if val is not None else "unexpected end of input")


def _constant_of(x):
    if isinstance(x, Expr):
        return x.constant_value()
    fn = getattr(x, "constant_value", None)
    return fn() if fn else None


def parse_expr(text: str) -> Expr:
    """Parse e.g. ``"(p1^2 + q1^2)/2"`` or ``"-i*hbar*z1"``."""
    if not isinstance(text, str):
        raise ParseError(f"expression must be a string, got {type(text).__name__}")
    return _Parser(text, lambda e: e).parse()


def monomials_upto(variables, max_degree: int) -> list:
    """All monic monomials in ``variables`` of total degree <= ``max_degree``."""
    variables = sorted(variables)
    out = [UNIT]
    frontier = [UNIT]
    for _ in range(max_degree):
        nxt = set()
        for m in frontier:
            for v in variables:
                nxt.add(mono_mul(m, ((v, 1),)))
        frontier = sorted(nxt, key=mono_key)
        out.extend(frontier)
    return [Expr.monomial(m) for m in out]
