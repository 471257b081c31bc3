from __future__ import annotations

import re

from fractions import Fraction

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from geoquant.opalg import DiffOp, identity
from geoquant.symexpr import Expr, Scalar, p, q, z, zb

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")

REAL1 = (q(1), p(1))
REAL2 = (q(1), q(2), p(1), p(2))
COMPLEX1 = (z(1), zb(1))

small_fracs = st.fractions(min_value=-3, max_value=3, max_denominator=4)


@st.composite
def scalars(draw, complex_=True):
    re = draw(small_fracs)
    im = draw(small_fracs) if complex_ else Fraction(0)
    return Scalar(re, im)


@st.composite
def monomials(draw, variables, max_degree):
    deg = draw(st.integers(0, max_degree))
    vs = draw(st.lists(st.sampled_from(variables), min_size=deg, max_size=deg))
    out = Expr.const(1)
    for v in vs:
        out = out * Expr.var(v)
    return out


@st.composite
def exprs(draw, variables=REAL1, max_degree=3, max_terms=4, complex_=True):
    out = Expr()
    for _ in range(draw(st.integers(0, max_terms))):
        m = draw(monomials(variables, max_degree))
        out = out + m.scale(draw(scalars(complex_)))
    return out


@st.composite
def diffops(draw, variables=REAL1, max_order=2, coeff_degree=2, max_terms=3):
    out = DiffOp()
    for _ in range(draw(st.integers(0, max_terms))):
        order = draw(st.integers(0, max_order))
        D = identity()
        for v in draw(st.lists(st.sampled_from(variables), min_size=order, max_size=order)):
            D = D * DiffOp.partial(v)
        c = draw(exprs(variables, coeff_degree, 2))
        out = out + DiffOp.multiplication(c) * D
    return out


# one summary line per acceptance criterion ----------------------------------

_CRITERIA: dict = {}


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", report.nodeid)
    if not m or (report.when != "call" and report.passed):
        return
    key = (int(m.group(1)), m.group(2))
    ok, secs = _CRITERIA.get(key, (True, 0.0))
    _CRITERIA[key] = (ok and report.passed, secs + report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for (num, name), (ok, secs) in sorted(_CRITERIA.items()):
        terminalreporter.write_line(
            f"criterion {num:2d} {name.replace('_', ' '):<28} {'PASS' if ok else 'FAIL'}  ({secs:.2f}s)")
