import random
from fractions import Fraction
from itertools import combinations

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form as sympy_snf

from geoquant.cech import (
    Cochain, Nerve, Ring, chern_cocycle, coboundary, coboundary_matrix, cocycle_check,
    cohomology, euler_characteristic, is_coboundary, metalinear_class_count, rank,
    smith_normal_form,
)
from geoquant.errors import DegreeOverflow, MissingEdgeValue, NerveError
from geoquant.fock import Phase

TET = Nerve.tetrahedron_boundary()
TRI = Nerve.triangle()


def _projective_plane():
    # 6-vertex triangulation of RP^2
    faces = [(0, 1, 2), (0, 2, 3), (0, 3, 4), (0, 4, 5), (0, 5, 1),
             (1, 2, 4), (2, 3, 5), (3, 4, 1), (4, 5, 2), (5, 1, 3)]
    return Nerve.from_maximal(range(6), faces)


def _torus():
    # 7-vertex (Moebius-Csaszar) torus
    faces = [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)]
    faces += [(i, (i + 2) % 7, (i + 3) % 7) for i in range(7)]
    return Nerve.from_maximal(range(7), faces)


BUNDLED = {
    "point": Nerve.simplex(0),
    "simplex3": Nerve.simplex(3),
    "triangle": TRI,
    "tetrahedron": TET,
    "two_triangles": TRI.disjoint_union(TRI),
    "s3": Nerve.sphere(3),
    "rp2": _projective_plane(),
    "torus": _torus(),
}


def _sympy_invariants(mat):
    if not mat or not mat[0]:
        return []
    d = sympy_snf(sympy.Matrix(mat), domain=sympy.ZZ)
    return sorted(abs(int(d[i, i])) for i in range(min(d.shape)) if d[i, i] != 0)


def test_nerve_validation():
    with pytest.raises(NerveError):
        Nerve([0, 1, 2], [[0, 1, 2]])
    with pytest.raises(NerveError):
        Nerve([0, 1], [[0, 5]])
    with pytest.raises(NerveError):
        Nerve([0, 0])
    N = Nerve.from_json({"vertices": ["a", "b", "c"], "simplices": [["a", "b", "c"]]})
    assert N.count(1) == 3 and N.dimension == 2
    assert Nerve.from_json(N.to_json()).to_json() == N.to_json()
    with pytest.raises(NerveError):
        Nerve.from_json({"simplices": []})


def test_coboundary_examples():
    c = Cochain(TET, 0, Ring.INT, {v: 3 for v in TET.vertices})
    assert coboundary(c).is_zero()
    f = Cochain(TRI, 0, Ring.INT, {0: 0, 1: 0, 2: 1})
    df = coboundary(f)
    assert df[(0, 1)] == 0 and df[(1, 2)] == 1 and df[(0, 2)] == 1
    assert df[(2, 0)] == -1
    with pytest.raises(DegreeOverflow):
        coboundary(Cochain(TRI, 1, Ring.INT))


def test_cohomology_examples():
    assert [str(cohomology(TET, k, Ring.INT)) for k in range(3)] == ["Z", "0", "Z"]
    assert cohomology(TET, 2, Ring.INT).free_rank == 1
    assert cohomology(TRI, 1, Ring.Z2).dimension == 1
    assert cohomology(BUNDLED["two_triangles"], 0, Ring.RAT).dimension == 2


def test_torsion():
    rp2 = BUNDLED["rp2"]
    h2 = cohomology(rp2, 2, Ring.INT)
    assert h2.free_rank == 0 and h2.torsion == (2,)
    assert cohomology(rp2, 1, Ring.INT).free_rank == 0
    assert cohomology(rp2, 1, Ring.Z2).dimension == 1
    assert cohomology(rp2, 2, Ring.RAT).dimension == 0
    assert str(h2) == "Z/2"


def test_torus():
    T = BUNDLED["torus"]
    assert [cohomology(T, k, Ring.INT).free_rank for k in range(3)] == [1, 2, 1]
    assert metalinear_class_count(T) == 4


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_snf_against_sympy(name):
    N = BUNDLED[name]
    for k in range(N.dimension):
        mat = coboundary_matrix(N, k)
        assert smith_normal_form(mat) == _sympy_invariants(mat)


@given(st.lists(st.lists(st.integers(-6, 6), min_size=4, max_size=4), min_size=1, max_size=5))
def test_snf_random(mat):
    ours = smith_normal_form(mat)
    assert ours == _sympy_invariants(mat)
    assert all(b % a == 0 for a, b in zip(ours, ours[1:]))
    assert len(ours) == rank(mat, Ring.RAT)


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_euler_characteristic(name):
    h, cells = euler_characteristic(BUNDLED[name])
    assert h == cells
    h2, _ = euler_characteristic(BUNDLED[name], Ring.Z2)
    assert h2 == cells


@pytest.mark.parametrize("ring", list(Ring))
@pytest.mark.parametrize("name", ["tetrahedron", "s3", "torus", "rp2"])
def test_d_squared_zero(ring, name):
    N = BUNDLED[name]
    rng = random.Random(7)
    for k in range(N.dimension - 1):
        for _ in range(10):
            vals = {N.labels(s): rng.randint(-5, 5) for s in N.simplices(k)}
            c = Cochain(N, k, ring, vals)
            assert coboundary(coboundary(c)).is_zero()


@pytest.mark.parametrize("name", sorted(BUNDLED))
def test_relabeling_invariance(name):
    N = BUNDLED[name]
    rng = random.Random(3)
    perm = list(range(len(N.vertices)))
    rng.shuffle(perm)
    M = N.relabel({v: f"v{perm[i]}" for i, v in enumerate(N.vertices)})
    for k in range(N.dimension + 1):
        for ring in Ring:
            assert cohomology(N, k, ring) == cohomology(M, k, ring)


def _tet_data(s):
    s = Fraction(s)
    return {(0, 1): 0, (0, 2): 0, (0, 3): 0, (1, 2): s, (1, 3): s, (2, 3): s}


@pytest.mark.parametrize("s,integral", [(1, True), (Fraction(1, 2), False), (0, True)])
def test_chern_examples(s, integral):
    r = chern_cocycle(_tet_data(s), TET)
    assert r.integral is integral
    assert all(v == s for v in r.alpha.values.values())
    assert r.closed


def test_chern_antisymmetric_input():
    data = {(1, 0): 0, (2, 0): 0, (3, 0): 0, (2, 1): -1, (3, 1): -1, (3, 2): -1}
    r = chern_cocycle(data, TET)
    assert r.integral and all(v == 1 for v in r.alpha.values.values())
    assert r.integer_cochain().ring is Ring.INT


def test_chern_missing_edge():
    data = _tet_data(1)
    del data[(2, 3)]
    with pytest.raises(MissingEdgeValue):
        chern_cocycle(data, TET)


@given(st.lists(st.integers(-9, 9), min_size=6, max_size=6))
def test_integer_data_integral(vals):
    edges = list(combinations(range(4), 2))
    r = chern_cocycle(dict(zip(edges, vals)), TET)
    assert r.integral and r.closed


def test_cocycle_check_examples():
    edges = list(combinations(range(4), 2))
    assert cocycle_check({e: 1 for e in edges}, TET)
    g = {0: Fraction(2), 1: Fraction(3, 5), 2: Fraction(-7), 3: Fraction(1, 9)}
    assert cocycle_check({(a, b): g[a] / g[b] for a, b in edges}, TET)
    flipped = {e: 1 for e in edges}
    flipped[(0, 1)] = -1
    assert not cocycle_check(flipped, TET)
    with pytest.raises(MissingEdgeValue):
        cocycle_check({(0, 1): 1}, TET)


def test_cocycle_check_phases():
    edges = list(combinations(range(4), 2))
    angle = {0: Fraction(0), 1: Fraction(1, 3), 2: Fraction(5, 4), 3: Fraction(-2, 7)}
    data = {(a, b): Phase(0, angle[a] - angle[b]) for a, b in edges}
    assert cocycle_check(data, TET)
    data[(1, 2)] = Phase(0, angle[1] - angle[2] + Fraction(1, 2))
    assert not cocycle_check(data, TET)


def test_cocycle_check_inconsistent_inverse():
    data = {(0, 1): 2, (1, 0): 3, (1, 2): 1, (0, 2): 2}
    assert not cocycle_check(data, TRI)


def test_metalinear_counts():
    assert metalinear_class_count(TRI) == 2
    assert metalinear_class_count(TET) == 1
    assert metalinear_class_count(BUNDLED["two_triangles"]) == 4


def test_is_coboundary():
    one_edge = Cochain(TRI, 1, Ring.Z2, {(0, 1): 1})
    assert not is_coboundary(one_edge)
    two_edges = Cochain(TRI, 1, Ring.Z2, {(0, 1): 1, (1, 2): 1})
    assert is_coboundary(two_edges)
    assert is_coboundary(Cochain(TET, 2, Ring.RAT, {}))
    assert not is_coboundary(Cochain(TET, 2, Ring.RAT, {(0, 1, 2): 1}))
