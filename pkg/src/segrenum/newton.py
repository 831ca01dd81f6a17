"""Newton polyhedra of monomial ideals.

The polyhedron of an ideal generated by monomials with exponents ``A`` is
``conv(A) + R^n_{>=0}``.  Facets are found exactly, by enumerating candidate
supporting hyperplanes spanned by generator differences and coordinate
directions; everything is integer/rational arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .algebra import Polynomial, PolyTuple

MAX_DIM = 4

Exponent = tuple[int, ...]


class DimensionError(ValueError):
    pass


def _minimalize(gens: Iterable[Exponent]) -> tuple[Exponent, ...]:
    gens = sorted(set(tuple(int(a) for a in g) for g in gens), key=lambda g: (sum(g), g))
    keep: list[Exponent] = []
    for g in gens:
        if not any(all(k <= a for k, a in zip(h, g)) for h in keep):
            keep.append(g)
    return tuple(sorted(keep, key=lambda g: (-sum(g), tuple(-a for a in g))))


@dataclass(frozen=True)
class MonomialIdeal:
    """Ideal generated by monomials; generators are normalized to be minimal."""

    n: int
    generators: tuple[Exponent, ...]
    vars: tuple[str, ...] = ()

    def __post_init__(self):
        gens = [tuple(g) for g in self.generators]
        if not gens:
            raise ValueError("a monomial ideal needs at least one generator")
        for g in gens:
            if len(g) != self.n:
                raise ValueError(f"generator {g} does not have {self.n} entries")
            if any(a < 0 for a in g):
                raise ValueError(f"negative exponent in generator {g}")
        object.__setattr__(self, "generators", _minimalize(gens))
        vars = tuple(self.vars) or default_vars(self.n)
        if len(vars) != self.n:
            raise ValueError("variable names do not match the dimension")
        object.__setattr__(self, "vars", vars)

    @classmethod
    def from_polynomials(cls, polys: Sequence[Polynomial]) -> "MonomialIdeal":
        if not polys:
            raise ValueError("no generators")
        gens = []
        for p in polys:
            if p.is_zero():
                continue
            if not p.is_monomial():
                raise ValueError(f"generator {p} is not a monomial")
            gens.append(next(iter(p.terms)))
        return cls(polys[0].nvars, tuple(gens), polys[0].vars)

    @property
    def is_unit(self) -> bool:
        return any(sum(g) == 0 for g in self.generators)

    @property
    def max_degree(self) -> int:
        return max(sum(g) for g in self.generators)

    def polynomials(self) -> PolyTuple:
        return PolyTuple(tuple(Polynomial.monomial(g, self.vars) for g in self.generators))

    def __str__(self):
        return "(" + ", ".join(str(Polynomial.monomial(g, self.vars)) for g in self.generators) + ")"


def default_vars(n: int) -> tuple[str, ...]:
    if n <= 3:
        return ("x", "y", "z")[:n]
    if n == 4:
        return ("x", "y", "z", "w")
    return tuple(f"x{i + 1}" for i in range(n))


@dataclass(frozen=True)
class CoordinateSubspace:
    """``V_S = {x_i = 0 : i in S}``; ``codim == len(S)``."""

    S: frozenset[int]

    def __init__(self, S: Iterable[int]):
        object.__setattr__(self, "S", frozenset(int(i) for i in S))

    @property
    def codim(self) -> int:
        return len(self.S)

    def contains(self, other: "CoordinateSubspace") -> bool:
        """True if ``other`` (as a set of points) lies inside ``self``."""
        return self.S <= other.S

    def names(self, vars: Sequence[str]) -> list[str]:
        return [vars[i] for i in sorted(self.S)]

    def __repr__(self):
        return f"V{sorted(self.S)}"


@dataclass(frozen=True)
class Facet:
    normal: tuple[int, ...]
    offset: int

    def value(self, a: Sequence[int]) -> int:
        return sum(v * x for v, x in zip(self.normal, a))


@dataclass(frozen=True)
class NewtonPolyhedron:
    generators: tuple[Exponent, ...]
    vertices: tuple[Exponent, ...]
    facets: tuple[Facet, ...]

    @property
    def n(self) -> int:
        return len(self.generators[0])

    def to_json(self) -> dict:
        return {
            "vertices": [list(v) for v in self.vertices],
            "facets": [{"normal": list(f.normal), "offset": f.offset} for f in self.facets],
        }


def _nullspace_vector(rows: list[list[int]], n: int) -> tuple[int, ...] | None:
    """Primitive integer normal to ``n-1`` vectors, or None if they are dependent."""
    M = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pv = M[r][c]
        M[r] = [x / pv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b for a, b in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    if r != n - 1:
        return None
    free = next(c for c in range(n) if c not in pivots)
    v = [Fraction(0)] * n
    v[free] = Fraction(1)
    for i, c in enumerate(pivots):
        v[c] = -M[i][free]
    den = reduce(math.lcm, (x.denominator for x in v), 1)
    ints = [int(x * den) for x in v]
    g = reduce(math.gcd, (abs(x) for x in ints), 0)
    return tuple(x // g for x in ints)


def _rank(vectors: list[tuple[int, ...]]) -> int:
    if not vectors:
        return 0
    return int(np.linalg.matrix_rank(np.array(vectors, dtype=float)))


def newton_polyhedron(J: MonomialIdeal) -> NewtonPolyhedron:
    """Exact facet description of ``conv(generators) + R^n_{>=0}``."""
    n = J.n
    if n > MAX_DIM:
        raise DimensionError(f"Newton polyhedra are supported for n <= {MAX_DIM}, got {n}")
    gens = J.generators
    units = [tuple(int(i == j) for i in range(n)) for j in range(n)]
    facets: dict[tuple[int, ...], int] = {}
    if n == 1:
        facets[(1,)] = min(g[0] for g in gens)
    else:
        for base in gens:
            dirs = [tuple(a - b for a, b in zip(g, base)) for g in gens if g != base] + units
            for combo in itertools.combinations(dirs, n - 1):
                v = _nullspace_vector([list(d) for d in combo], n)
                if v is None:
                    continue
                if all(x <= 0 for x in v):
                    v = tuple(-x for x in v)
                if any(x < 0 for x in v):
                    continue  # recession cone is the orthant: normals are >= 0
                vals = [sum(a * b for a, b in zip(v, g)) for g in gens]
                c = min(vals)
                if sum(a * b for a, b in zip(v, base)) != c:
                    continue
                # face must be (n-1)-dimensional
                tight = [g for g, val in zip(gens, vals) if val == c]
                span = [tuple(a - b for a, b in zip(g, tight[0])) for g in tight[1:]]
                span += [u for u in units if sum(a * b for a, b in zip(v, u)) == 0]
                if _rank(span) == n - 1:
                    facets[v] = c
    flist = tuple(sorted((Facet(v, c) for v, c in facets.items()),
                         key=lambda f: (sum(1 for x in f.normal if x) , f.normal[::-1])))
    verts = []
    for g in gens:
        tight = [f.normal for f in flist if f.value(g) == f.offset]
        if _rank(tight) == n:
            verts.append(g)
    return NewtonPolyhedron(gens, tuple(verts), flist)


def np_contains(NP: NewtonPolyhedron, a: Sequence[int]) -> bool:
    if len(a) != NP.n:
        raise DimensionError(f"exponent {tuple(a)} has wrong dimension for n={NP.n}")
    return all(f.value(a) >= f.offset for f in NP.facets)


def integral_closure(J: MonomialIdeal) -> MonomialIdeal:
    """Lattice points of the Newton polyhedron, reduced to minimal generators."""
    NP = newton_polyhedron(J)
    if J.is_unit:
        return J
    bounds = [max(v[i] for v in NP.vertices) for i in range(J.n)]
    grid = np.indices([b + 1 for b in bounds]).reshape(J.n, -1).T
    ok = np.ones(len(grid), dtype=bool)
    for f in NP.facets:
        ok &= grid @ np.array(f.normal) >= f.offset
    pts = [tuple(int(x) for x in p) for p in grid[ok]]
    return MonomialIdeal(J.n, tuple(pts), J.vars)


def is_primary_to_origin(J: MonomialIdeal) -> bool:
    return all(any(g[i] > 0 and sum(g) == g[i] for g in J.generators) or J.is_unit
               for i in range(J.n))


def _polytope_volume(A: list[tuple[Fraction, ...]], b: list[Fraction], n: int) -> Fraction:
    """Exact volume of ``{x : A x <= b}`` (bounded) by Lasserre's recursion."""
    # normalize and dedupe constraints
    rows: dict[tuple, Fraction] = {}
    for a, bi in zip(A, b):
        if all(x == 0 for x in a):
            if bi < 0:
                return Fraction(0)
            continue
        piv = next(abs(x) for x in a if x != 0)
        key = tuple(x / piv for x in a)
        val = bi / piv
        rows[key] = min(rows.get(key, val), val)
    A = list(rows)
    b = [rows[k] for k in A]
    if n == 1:
        lo, hi = -math.inf, math.inf
        for (a,), bi in zip(A, b):
            if a > 0:
                hi = min(hi, bi / a)
            else:
                lo = max(lo, bi / a)
        if math.isinf(lo) or math.isinf(hi):
            raise ValueError("unbounded polytope")
        return max(Fraction(0), hi - lo)
    total = Fraction(0)
    for i, (a, bi) in enumerate(zip(A, b)):
        if bi == 0:
            continue
        k = max(range(n), key=lambda j: abs(a[j]))
        ak = a[k]
        # substitute x_k = (bi - sum_{j != k} a_j x_j) / ak into the other rows
        A2, b2 = [], []
        for l, (c, cl) in enumerate(zip(A, b)):
            if l == i:
                continue
            f = c[k] / ak
            A2.append(tuple(c[j] - f * a[j] for j in range(n) if j != k))
            b2.append(cl - f * bi)
        total += bi / abs(ak) * _polytope_volume(A2, b2, n - 1)
    return total / n


def covolume(NP: NewtonPolyhedron) -> Fraction | float:
    """Volume of the region of the orthant below the polyhedron (``inf`` if unbounded)."""
    n = NP.n
    if n > MAX_DIM:
        raise DimensionError(f"covolume is supported for n <= {MAX_DIM}")
    J = MonomialIdeal(n, NP.generators)
    if J.is_unit:
        return Fraction(0)
    if not is_primary_to_origin(J):
        return math.inf
    B = max(max(v) for v in NP.vertices) + 1
    A, b = [], []
    for f in NP.facets:
        A.append(tuple(Fraction(-x) for x in f.normal))
        b.append(Fraction(-f.offset))
    for i in range(n):
        e = [Fraction(0)] * n
        e[i] = Fraction(1)
        A.append(tuple(e))
        b.append(Fraction(B))
        A.append(tuple(-x for x in e))
        b.append(Fraction(0))
    return Fraction(B) ** n - _polytope_volume(A, b, n)


def minimal_primes(J: MonomialIdeal) -> list[CoordinateSubspace]:
    """Minimal sets of variables meeting every generator's support.

    Each set ``S`` corresponds to a component ``V_S`` of the zero set; an
    ideal containing 1 has no zeros and returns ``[]``.
    """
    if J.is_unit:
        return []
    supports = [frozenset(i for i, a in enumerate(g) if a > 0) for g in J.generators]
    found: list[frozenset[int]] = []
    for size in range(1, J.n + 1):
        for S in itertools.combinations(range(J.n), size):
            S = frozenset(S)
            if any(f <= S for f in found):
                continue
            if all(S & sup for sup in supports):
                found.append(S)
    return [CoordinateSubspace(S) for S in sorted(found, key=lambda s: (len(s), sorted(s)))]


def codim_zero_set(J: MonomialIdeal) -> int | None:
    """Codimension of the zero set; None when the ideal is the unit ideal."""
    primes = minimal_primes(J)
    return min(p.codim for p in primes) if primes else None


@dataclass(frozen=True)
class DistinguishedVariety:
    subspace: CoordinateSubspace
    order: int
    normals: tuple[tuple[int, ...], ...] = field(default=())

    @property
    def codim(self) -> int:
        return self.subspace.codim


def distinguished_varieties(J: MonomialIdeal) -> list[DistinguishedVariety]:
    """Distinguished varieties read off the facets of the Newton polyhedron.

    Every facet normal ``v`` with positive value ``min <v, a>`` over the
    generators gives the subspace cut out by the variables in ``supp(v)``,
    with that value as its order.  Several normals may share a support; the
    entry keeps the smallest order and lists all normals.
    """
    if J.is_unit:
        return []
    NP = newton_polyhedron(J)
    by_support: dict[frozenset[int], list[Facet]] = {}
    for f in NP.facets:
        if f.offset > 0:
            S = frozenset(i for i, x in enumerate(f.normal) if x > 0)
            by_support.setdefault(S, []).append(f)
    out = []
    for S, fs in by_support.items():
        out.append(DistinguishedVariety(CoordinateSubspace(S), min(f.offset for f in fs),
                                        tuple(f.normal for f in fs)))
    return sorted(out, key=lambda d: (d.codim, sorted(d.subspace.S)))
