"""Cech cohomology of finite nerves over Z, Q and Z/2.

A nerve is the simplicial complex of a good cover: vertices are the open
sets, a simplex is a family with non-empty common intersection.  Cochains
are antisymmetric functions on ordered simplices; the coboundary is the
alternating sum over faces.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .errors import DegreeOverflow, MissingEdgeValue, NerveError
from .fock import Phase

__all__ = [
    "Ring", "Nerve", "Cochain", "CohomologyGroup", "ChernResult",
    "coboundary", "coboundary_matrix", "cohomology", "chern_cocycle", "cocycle_check",
    "metalinear_class_count", "is_coboundary", "smith_normal_form", "rank",
    "euler_characteristic",
]


class Ring(enum.Enum):
    INT = "Z"
    RAT = "Q"
    Z2 = "Z2"

    def coerce(self, x):
        if self is Ring.Z2:
            return int(x) % 2
        if self is Ring.INT:
            f = Fraction(x)
            if f.denominator != 1:
                raise ValueError(f"{x} is not an integer")
            return int(f)
        return Fraction(x)


class Nerve:
    """Downward-closed set of simplices over an ordered vertex list."""

    def __init__(self, vertices: Iterable, simplices: Iterable[Iterable] = (), close: bool = False):
        self.vertices = list(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise NerveError("vertex labels must be distinct")
        self._pos = {v: i for i, v in enumerate(self.vertices)}
        found = {(i,) for i in range(len(self.vertices))}
        for s in simplices:
            t = self._key(s)
            if len(set(t)) != len(t):
                raise NerveError(f"simplex {list(s)} repeats a vertex")
            found.add(t)
        if close:
            for t in list(found):
                for k in range(1, len(t)):
                    found.update(combinations(t, k))
        else:
            for t in found:
                for k in range(1, len(t)):
                    for face in combinations(t, k):
                        if face not in found:
                            raise NerveError(
                                f"face {[self.vertices[i] for i in face]} of "
                                f"{[self.vertices[i] for i in t]} is missing")
        self._by_dim: dict = {}
        for t in found:
            self._by_dim.setdefault(len(t) - 1, []).append(t)
        for d in self._by_dim:
            self._by_dim[d].sort()

    def _key(self, labels) -> tuple:
        try:
            return tuple(sorted(self._pos[v] for v in labels))
        except KeyError as e:
            raise NerveError(f"unknown vertex {e.args[0]!r}") from None

    @property
    def dimension(self) -> int:
        return max(self._by_dim) if self._by_dim else -1

    def simplices(self, k: int) -> list:
        """k-simplices as sorted tuples of vertex positions."""
        return list(self._by_dim.get(k, []))

    def count(self, k: int) -> int:
        return len(self._by_dim.get(k, []))

    def labels(self, s: tuple) -> tuple:
        return tuple(self.vertices[i] for i in s)

    def __contains__(self, labels) -> bool:
        try:
            t = self._key(labels)
        except NerveError:
            return False
        return t in set(self._by_dim.get(len(t) - 1, []))

    def relabel(self, mapping: Mapping) -> "Nerve":
        """Same complex with vertices renamed (and hence re-ordered)."""
        new_vertices = sorted((mapping[v] for v in self.vertices), key=_label_key)
        simplices = [[mapping[self.vertices[i]] for i in s]
                     for d in self._by_dim for s in self._by_dim[d]]
        return Nerve(new_vertices, simplices)

    # builders
    @classmethod
    def from_maximal(cls, vertices, maximal) -> "Nerve":
        return cls(vertices, maximal, close=True)

    @classmethod
    def simplex(cls, d: int) -> "Nerve":
        return cls.from_maximal(range(d + 1), [range(d + 1)])

    @classmethod
    def sphere(cls, d: int) -> "Nerve":
        """Boundary of the (d+1)-simplex: a model of the d-sphere."""
        verts = list(range(d + 2))
        return cls.from_maximal(verts, [c for c in combinations(verts, d + 1)])

    @classmethod
    def tetrahedron_boundary(cls) -> "Nerve":
        return cls.sphere(2)

    @classmethod
    def triangle(cls) -> "Nerve":
        """Hollow triangle, the nerve of a three-arc cover of the circle."""
        return cls.sphere(1)

    def disjoint_union(self, other: "Nerve") -> "Nerve":
        verts = [("a", v) for v in self.vertices] + [("b", v) for v in other.vertices]
        simp = [[("a", self.vertices[i]) for i in s] for d in self._by_dim for s in self._by_dim[d]]
        simp += [[("b", other.vertices[i]) for i in s] for d in other._by_dim for s in other._by_dim[d]]
        return Nerve(verts, simp)

    # serialization
    @classmethod
    def from_json(cls, data) -> "Nerve":
        """``{"vertices": [...], "simplices": [[...], ...]}``; faces are added."""
        if isinstance(data, str):
            data = json.loads(data)
        try:
            verts = data["vertices"]
            simp = data.get("simplices", [])
        except (TypeError, KeyError) as e:
            raise NerveError(f"nerve file needs 'vertices' and 'simplices': {e}") from None
        if not isinstance(verts, list) or not isinstance(simp, list):
            raise NerveError("'vertices' and 'simplices' must be lists")
        return cls.from_maximal(verts, simp)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "simplices": [list(self.labels(s)) for d in sorted(self._by_dim) for s in self._by_dim[d]],
        }


def _label_key(v):
    return (0, v, "") if isinstance(v, (int, float)) else (1, 0, str(v))


def _perm_sign(seq) -> int:
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


class Cochain:
    """Values on the k-simplices of a nerve; missing simplices read as 0."""

    def __init__(self, nerve: Nerve, degree: int, ring: Ring, values: Mapping | None = None):
        self.nerve = nerve
        self.degree = degree
        self.ring = ring
        vals = {s: ring.coerce(0) for s in nerve.simplices(degree)}
        for labels, v in (values or {}).items():
            if not isinstance(labels, tuple):
                labels = (labels,)
            if len(labels) != degree + 1:
                raise ValueError(f"{labels} is not a {degree}-simplex")
            pos = [nerve._pos[x] for x in labels]
            key = tuple(sorted(pos))
            if key not in vals:
                raise NerveError(f"{labels} is not a simplex of the nerve")
            v = ring.coerce(v)
            if ring is not Ring.Z2 and _perm_sign(pos) < 0:
                v = -v
            vals[key] = v
        self.values = vals

    def __getitem__(self, labels):
        if not isinstance(labels, tuple):
            labels = (labels,)
        pos = [self.nerve._pos[x] for x in labels]
        v = self.values[tuple(sorted(pos))]
        if self.ring is not Ring.Z2 and _perm_sign(pos) < 0:
            v = -v
        return v

    def is_zero(self) -> bool:
        return not any(self.values.values())

    def items(self):
        return [(self.nerve.labels(s), v) for s, v in sorted(self.values.items())]

    def __eq__(self, other):
        return (isinstance(other, Cochain) and self.degree == other.degree
                and self.ring is other.ring and self.values == other.values)

    def __repr__(self):
        return f"Cochain(deg={self.degree}, {self.ring.value}, {dict(self.items())})"


def coboundary(c: Cochain) -> Cochain:
    """``(dc)(s_0..s_{k+1}) = sum_i (-1)^i c(s_0..^s_i..s_{k+1})``."""
    N = c.nerve
    if c.degree + 1 > N.dimension:
        raise DegreeOverflow(f"the nerve has no {c.degree + 1}-simplices")
    out = {}
    for s in N.simplices(c.degree + 1):
        acc = c.ring.coerce(0)
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            term = c.values[face]
            acc = acc + term if i % 2 == 0 else acc - term
        out[N.labels(s)] = acc
    return Cochain(N, c.degree + 1, c.ring, out)


def coboundary_matrix(N: Nerve, k: int) -> list:
    """Integer matrix of ``d: C^k -> C^{k+1}`` (rows: (k+1)-simplices)."""
    cols = {s: j for j, s in enumerate(N.simplices(k))}
    rows = []
    for s in N.simplices(k + 1):
        row = [0] * len(cols)
        for i in range(len(s)):
            row[cols[s[:i] + s[i + 1:]]] += -1 if i % 2 else 1
        rows.append(row)
    return rows


def smith_normal_form(matrix: list) -> list:
    """Non-zero invariant factors d_1 | d_2 | ... of an integer matrix."""
    a = [list(map(int, row)) for row in matrix]
    m = len(a)
    n = len(a[0]) if m else 0
    diag = []
    t = 0
    while t < min(m, n):
        nonzero = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nonzero:
            break
        _, pi, pj = min(nonzero)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            done = True
            piv = a[t][t]
            for i in range(t + 1, m):
                qt = a[i][t] // piv
                if qt:
                    a[i] = [x - qt * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, n):
                qt = a[t][j] // piv
                if qt:
                    for row in a:
                        row[j] -= qt * row[t]
                if a[t][j]:
                    done = False
            if done:
                # divisibility: fold a non-multiple into the pivot row
                bad = next(((i, j) for i in range(t + 1, m) for j in range(t + 1, n)
                            if a[i][j] % piv), None)
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            nonzero = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n)
                       if a[i][j] and (i == t or j == t)]
            _, pi, pj = min(nonzero)
            a[t], a[pi] = a[pi], a[t]
            for row in a:
                row[t], row[pj] = row[pj], row[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def rank(matrix: list, ring: Ring) -> int:
    if ring is Ring.INT:
        return len(smith_normal_form(matrix))
    if ring is Ring.Z2:
        rows = [sum((x % 2) << j for j, x in enumerate(r)) for r in matrix]
        r = 0
        ncols = len(matrix[0]) if matrix else 0
        for col in range(ncols):
            bit = 1 << col
            piv = next((i for i in range(r, len(rows)) if rows[i] & bit), None)
            if piv is None:
                continue
            rows[r], rows[piv] = rows[piv], rows[r]
            for i in range(len(rows)):
                if i != r and rows[i] & bit:
                    rows[i] ^= rows[r]
            r += 1
        return r
    a = [[Fraction(x) for x in row] for row in matrix]
    r = 0
    ncols = len(a[0]) if a else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][col]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, len(a)):
            if a[i][col]:
                f = a[i][col] / a[r][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        r += 1
    return r


@dataclass(frozen=True)
class CohomologyGroup:
    degree: int
    ring: Ring
    rank: int                 # free rank over Z, dimension over a field
    torsion: tuple = ()       # invariant factors > 1 (Z only)

    @property
    def dimension(self) -> int:
        return self.rank

    @property
    def free_rank(self) -> int:
        return self.rank

    def order(self) -> int | None:
        """Number of elements, ``None`` if infinite."""
        if self.ring is Ring.Z2:
            return 2 ** self.rank
        if self.rank:
            return None
        out = 1
        for t in self.torsion:
            out *= t
        return out

    def __str__(self):
        base = {Ring.INT: "Z", Ring.RAT: "Q", Ring.Z2: "Z2"}[self.ring]
        parts = []
        if self.rank:
            parts.append(base if self.rank == 1 else f"{base}^{self.rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"

    def to_dict(self):
        return {"degree": self.degree, "ring": self.ring.value, "rank": self.rank,
                "torsion": list(self.torsion), "group": str(self)}


def cohomology(N: Nerve, k: int, ring: Ring = Ring.INT) -> CohomologyGroup:
    """``ker(d_k) / im(d_{k-1})``; Smith normal form over Z."""
    if k < 0:
        raise ValueError("degree must be non-negative")
    nk = N.count(k)
    out_rank = rank(coboundary_matrix(N, k), ring) if nk else 0
    if k == 0:
        return CohomologyGroup(0, ring, nk - out_rank)
    incoming = coboundary_matrix(N, k - 1)
    if ring is Ring.INT:
        factors = smith_normal_form(incoming) if incoming else []
        torsion = tuple(d for d in factors if d > 1)
        return CohomologyGroup(k, ring, nk - out_rank - len(factors), torsion)
    in_rank = rank(incoming, ring) if incoming else 0
    return CohomologyGroup(k, ring, nk - out_rank - in_rank)


def euler_characteristic(N: Nerve, ring: Ring = Ring.RAT) -> tuple:
    """(from cohomology ranks, from simplex counts)."""
    top = max(N.dimension, 0)
    from_h = sum((-1) ** k * cohomology(N, k, ring).rank for k in range(top + 1))
    from_cells = sum((-1) ** k * N.count(k) for k in range(top + 1))
    return from_h, from_cells


def is_coboundary(c: Cochain) -> bool:
    """Is ``c = d b`` for some (k-1)-cochain ``b`` (field coefficients)?"""
    if c.ring is Ring.INT:
        raise NotImplementedError("coboundary test is implemented over Q and Z2")
    if c.degree == 0:
        return c.is_zero()
    A = coboundary_matrix(c.nerve, c.degree - 1)
    col = [c.values[s] for s in c.nerve.simplices(c.degree)]
    augmented = [row + [v] for row, v in zip(A, col)]
    return rank(A, c.ring) == rank(augmented, c.ring)


def _edge_lookup(values: Mapping, N: Nerve, inverse):
    table = {}
    for key, v in values.items():
        if len(key) != 2:
            raise ValueError(f"{key} is not an edge")
        a, b = key
        if (a, b) not in N:
            raise NerveError(f"{key} is not an edge of the nerve")
        if (a, b) in table and table[(a, b)] != v:
            raise ValueError(f"conflicting values on edge {key}")
        table[(a, b)] = v
        table.setdefault((b, a), inverse(v))
    return table


@dataclass
class ChernResult:
    alpha: Cochain
    integral: bool
    closed: bool

    def integer_cochain(self) -> Cochain | None:
        if not self.integral:
            return None
        return Cochain(self.alpha.nerve, 2, Ring.INT, dict(self.alpha.items()))

    def to_dict(self):
        return {
            "integral": self.integral,
            "closed": self.closed,
            "alpha": {",".join(map(str, k)): str(v) for k, v in self.alpha.items()},
        }


def chern_cocycle(f: Mapping, N: Nerve) -> ChernResult:
    """``alpha_{ljk} = f^{lj} + f^{jk} - f^{lk}`` from rational edge data.

    ``f`` maps ordered vertex pairs to rationals and is extended
    antisymmetrically.  The bundle data are integral iff every triple sum
    is an integer.
    """
    table = _edge_lookup({k: Fraction(v) for k, v in f.items()}, N, lambda v: -v)
    tri = {}
    for s in N.simplices(2):
        l, j, k = N.labels(s)
        try:
            tri[(l, j, k)] = table[(l, j)] + table[(j, k)] - table[(l, k)]
        except KeyError as e:
            raise MissingEdgeValue(f"no transition primitive on edge {e.args[0]}") from None
    alpha = Cochain(N, 2, Ring.RAT, tri)
    integral = all(v.denominator == 1 for v in alpha.values.values())
    closed = N.dimension < 3 or coboundary(alpha).is_zero()
    return ChernResult(alpha, integral, closed)


def cocycle_check(c: Mapping, N: Nerve) -> bool:
    """``c_lj c_jk == c_lk`` on every triangle; values are non-zero rationals or Phases."""
    def inv(v):
        return v.inverse() if isinstance(v, Phase) else 1 / Fraction(v)

    norm = {k: v if isinstance(v, Phase) else Fraction(v) for k, v in c.items()}
    try:
        table = _edge_lookup(norm, N, inv)
    except ValueError:
        return False
    for (a, b), v in list(table.items()):
        if table[(b, a)] != inv(v):
            return False
    for s in N.simplices(2):
        l, j, k = N.labels(s)
        try:
            if table[(l, j)] * table[(j, k)] != table[(l, k)]:
                return False
        except KeyError as e:
            raise MissingEdgeValue(f"no transition function on edge {e.args[0]}") from None
    for s in N.simplices(1):
        if N.labels(s) not in table:
            raise MissingEdgeValue(f"no transition function on edge {N.labels(s)}")
    return True


def metalinear_class_count(N: Nerve) -> int:
    """``|H^1(N, Z2)|``: metalinear structures form a torsor over this group."""
    return 2 ** cohomology(N, 1, Ring.Z2).rank
