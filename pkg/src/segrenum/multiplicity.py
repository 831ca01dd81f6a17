"""Segre numbers of monomial ideals from the bigraded Hilbert function.

For an ideal ``J`` in the local ring at the origin with maximal ideal ``m``,
the bigraded ring ``G = gr_m(gr_J R)`` has pieces

    G[i, j] = (m^j J^i + J^(i+1)) / (m^(j+1) J^i + J^(i+1)).

For monomial ideals a basis of ``G[i, j]`` is given by the monomials ``mu``
in ``J^i`` but not in ``J^(i+1)`` whose *excess* over ``J^i`` is ``j``: the
largest degree of a cofactor ``nu`` with ``mu = (product of i generators) * nu``.
The cumulative sum ``S(u, v)`` of ``dim G[i, j]`` over ``i <= u, j <= v`` is a
polynomial of degree ``n`` for large ``u, v``; its top coefficients
``c_k`` (of ``u^k v^(n-k) / (k! (n-k)!)``) are the Segre numbers ``e_k``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .newton import (
    MAX_DIM,
    CoordinateSubspace,
    DimensionError,
    MonomialIdeal,
    codim_zero_set,
    distinguished_varieties,
    integral_closure,
)

log = logging.getLogger(__name__)

_INF = np.iinfo(np.int64).max // 4

#: upper bound on lattice cells held in memory while tabulating
DEFAULT_CELL_BUDGET = 30_000_000
#: the first window is halved until its box fits in this many cells
INITIAL_CELL_CAP = 4_000_000


class BudgetExceeded(RuntimeError):
    def __init__(self, message: str, largest_window: tuple[int, int]):
        super().__init__(message)
        self.largest_window = largest_window


class SiuInvariantError(RuntimeError):
    """A Segre report violated one of its structural invariants."""

    def __init__(self, discrepancies: list[dict], report: "SegreReport | None" = None):
        super().__init__("; ".join(d["message"] for d in discrepancies))
        self.discrepancies = discrepancies
        self.report = report


def power_membership(J: MonomialIdeal, mu: Sequence[int], i: int) -> bool:
    """Whether the monomial with exponent ``mu`` lies in ``J^i``."""
    mu = tuple(int(a) for a in mu)
    if len(mu) != J.n:
        raise DimensionError(f"exponent {mu} does not have {J.n} entries")
    if i < 0:
        raise ValueError("power must be nonnegative")
    gens = J.generators

    @lru_cache(maxsize=None)
    def search(rest: tuple[int, ...], need: int, start: int) -> bool:
        if need == 0:
            return True
        for t in range(start, len(gens)):
            g = gens[t]
            if all(a <= b for a, b in zip(g, rest)):
                if search(tuple(b - a for a, b in zip(g, rest)), need - 1, t):
                    return True
        return False

    return search(mu, i, 0)


def _excess_tables(J: MonomialIdeal, I: int, Jmax: int, cell_budget: int):
    """Yield, for i = 0..I, the minimum degree of an i-fold generator product
    dividing each cell of a box (``_INF`` if none)."""
    n = J.n
    G = np.array(J.generators, dtype=np.int64)
    A = G.max(axis=0)
    shape = tuple(int((I + 1) * A[k] + Jmax + 1) for k in range(n))
    cells = int(np.prod(shape, dtype=np.int64))
    if cells > cell_budget:
        raise BudgetExceeded(f"window ({I}, {Jmax}) needs {cells} cells > budget {cell_budget}",
                             (I, Jmax))
    deg = np.indices(shape, dtype=np.int64).sum(axis=0)
    cur = np.zeros(shape, dtype=np.int64)
    gdeg = G.sum(axis=1)
    for _ in range(I + 2):
        yield deg, cur
        nxt = np.full(shape, _INF, dtype=np.int64)
        for a, d in zip(G, gdeg):
            dst = tuple(slice(int(a[k]), None) for k in range(n))
            src = tuple(slice(0, shape[k] - int(a[k])) for k in range(n))
            np.minimum(nxt[dst], cur[src] + d, out=nxt[dst])
        np.minimum(nxt, _INF, out=nxt)
        cur = nxt


def bigraded_table(J: MonomialIdeal, I: int, Jmax: int,
                   cell_budget: int = DEFAULT_CELL_BUDGET) -> np.ndarray:
    """``H[i, j] = dim G[i, j]`` for ``0 <= i <= I``, ``0 <= j <= Jmax``."""
    H = np.zeros((I + 1, Jmax + 1), dtype=np.int64)
    if J.is_unit:
        return H
    tables = _excess_tables(J, I, Jmax, cell_budget)
    deg, cur = next(tables)
    cur = cur.copy()
    for i, (_, nxt) in zip(range(I + 1), tables):
        mask = (cur < _INF) & (nxt >= _INF)
        exc = (deg - cur)[mask]
        exc = exc[exc <= Jmax]
        H[i] = np.bincount(exc, minlength=Jmax + 1)[: Jmax + 1]
        cur = nxt.copy()
    return H


def excess_dimension(J: MonomialIdeal, i: int, j: int) -> int:
    """``dim G[i, j]``: monomials in ``J^i`` but not ``J^(i+1)`` with excess exactly ``j``."""
    if i < 0 or j < 0:
        raise ValueError("indices must be nonnegative")
    return int(bigraded_table(J, i, j)[i, j])


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for a in range(total, -1, -1):
        for rest in _compositions(total - a, parts - 1):
            yield (a,) + rest


def bigraded_dimension(J: MonomialIdeal, i: int, j: int) -> int:
    """Number of monomials of total degree ``j`` in ``J^i`` but not in ``J^(i+1)``.

    This degree-stratified count is a direct enumeration.  It is not the
    table the Segre numbers are read from: for ``J = m`` its cumulative sums
    are not polynomial.  ``multiplicity_sequence`` grades by excess instead
    (see ``excess_dimension``).
    """
    if i < 0 or j < 0:
        raise ValueError("indices must be nonnegative")
    return sum(1 for mu in _compositions(j, J.n)
               if power_membership(J, mu, i) and not power_membership(J, mu, i + 1))


@dataclass(frozen=True)
class MultiplicitySequence:
    c: tuple[int, ...]
    stable_window: tuple[tuple[int, int], tuple[int, int]]

    def __getitem__(self, k):
        return self.c[k]

    def __len__(self):
        return len(self.c)

    def __iter__(self):
        return iter(self.c)


def _mixed_difference(S: np.ndarray, a: int, b: int) -> np.ndarray:
    D = S
    for _ in range(a):
        D = np.diff(D, axis=0)
    for _ in range(b):
        D = np.diff(D, axis=1)
    return D


def _certify(S: np.ndarray, n: int, u0: int, v0: int) -> bool:
    W = S[u0:, v0:]
    for a in range(n + 2):
        D = _mixed_difference(W, a, n + 1 - a)
        if D.size == 0 or np.any(D != 0):
            return False
    return True


def multiplicity_sequence(J: MonomialIdeal, start: int | None = None, max_doublings: int = 3,
                          cell_budget: int = DEFAULT_CELL_BUDGET) -> MultiplicitySequence:
    """Segre numbers ``(e_0, ..., e_n)`` at the origin.

    The table is grown (window size doubled) until every mixed difference
    of order ``n + 1`` of the cumulative table vanishes on the upper half
    window; the order-``n`` differences there are then the integers ``c_k``.
    """
    n = J.n
    if n > MAX_DIM:
        raise DimensionError(f"multiplicity sequences are supported for n <= {MAX_DIM}")
    if J.is_unit:
        return MultiplicitySequence((0,) * (n + 1), ((0, 0), (0, 0)))
    size = start if start is not None else 4 * J.max_degree * n
    # shrink the first window when the lattice box would not fit the budget
    while start is None and size > 2 * (n + 2) and _cells(J, size) > min(cell_budget, INITIAL_CELL_CAP):
        size //= 2
    size = max(size, 2 * (n + 2))
    last = (size, size)
    for _ in range(max_doublings + 1):
        try:
            H = bigraded_table(J, size, size, cell_budget)
        except BudgetExceeded as exc:
            raise BudgetExceeded(f"multiplicity window not certified before the cell budget "
                                 f"ran out; largest window tried {last}", last) from exc
        last = (size, size)
        S = H.cumsum(axis=0).cumsum(axis=1)
        u0 = v0 = size // 2
        if _certify(S, n, u0, v0):
            c = []
            for k in range(n + 1):
                D = _mixed_difference(S[u0:, v0:], k, n - k)
                vals = np.unique(D)
                if len(vals) != 1:
                    raise RuntimeError(f"internal error: c_{k} not constant on window: {vals}")
                c.append(int(vals[0]))
            if any(x < 0 for x in c):
                raise RuntimeError(f"internal error: negative multiplicity {c}")
            return MultiplicitySequence(tuple(c), ((u0, size), (v0, size)))
        log.debug("window %d not certified for %s; doubling", size, J)
        size *= 2
    raise BudgetExceeded(f"no stable window found up to size {last}", last)


def _cells(J: MonomialIdeal, size: int) -> int:
    A = np.array(J.generators).max(axis=0)
    return int(np.prod([(size + 1) * int(a) + size + 1 for a in A]))


def project_ideal(J: MonomialIdeal, S: CoordinateSubspace) -> MonomialIdeal:
    """Keep only the coordinates in ``S`` (the other variables become units)."""
    idx = sorted(S.S)
    gens = tuple(tuple(g[i] for i in idx) for g in J.generators)
    return MonomialIdeal(len(idx), gens, tuple(J.vars[i] for i in idx))


def generic_segre_along(J: MonomialIdeal, S: CoordinateSubspace) -> int:
    """Top Segre number of ``J`` at a generic point of ``V_S``."""
    if not any(d.subspace == S for d in distinguished_varieties(J)):
        log.warning("%r is not a distinguished variety of %s", S, J)
    P = project_ideal(J, S)
    return multiplicity_sequence(P)[len(S.S)]


@dataclass(frozen=True)
class FixedComponent:
    subspace: CoordinateSubspace
    beta: int


@dataclass(frozen=True)
class SegreReport:
    ideal: MonomialIdeal
    e: MultiplicitySequence
    fixed: tuple[tuple[FixedComponent, ...], ...]  # indexed by k = 0..n
    n_k: tuple[int, ...]
    codimZ: int | None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        vars = self.ideal.vars
        return {
            "e": list(self.e.c),
            "codimZ": self.codimZ,
            "decomposition": [
                {"k": k,
                 "fixed": [{"S": fc.subspace.names(vars), "beta": fc.beta} for fc in self.fixed[k]],
                 "n_k": self.n_k[k]}
                for k in range(len(self.n_k))
            ],
        }


def check_report(rep: SegreReport) -> list[dict]:
    """Structural invariants of a Segre report; returns discrepancy records."""
    out = []
    n = rep.ideal.n
    p = rep.codimZ
    for k in range(n + 1):
        total = sum(fc.beta for fc in rep.fixed[k]) + rep.n_k[k]
        if total != rep.e[k]:
            out.append({"k": k, "check": "sum", "message": f"e_{k}={rep.e[k]} != sum beta + n_k = {total}"})
        if rep.n_k[k] < 0:
            out.append({"k": k, "check": "n_k>=0", "message": f"n_{k}={rep.n_k[k]} is negative"})
        for fc in rep.fixed[k]:
            if fc.beta < 1:
                out.append({"k": k, "check": "beta>=1", "message": f"beta={fc.beta} on {fc.subspace!r}"})
        if p is not None and k < p and rep.e[k] != 0:
            out.append({"k": k, "check": "e_k=0 below codim Z", "message": f"e_{k}={rep.e[k]} but codim Z={p}"})
    if p is not None:
        if rep.n_k[p] != 0:
            out.append({"k": p, "check": "n_codimZ=0", "message": f"n_{p}={rep.n_k[p]} at k = codim Z"})
        if rep.n_k[n] != 0:
            out.append({"k": n, "check": "n_n=0", "message": f"n_{n}={rep.n_k[n]}"})
    elif any(rep.e.c):
        out.append({"k": None, "check": "unit", "message": "unit ideal with nonzero Segre numbers"})
    return out


def siu_report(J: MonomialIdeal, strict: bool = True) -> SegreReport:
    """Segre numbers with their fixed (distinguished) parts and residues ``n_k``."""
    n = J.n
    if n > MAX_DIM:
        raise DimensionError(f"siu_report supports n <= {MAX_DIM}")
    e = multiplicity_sequence(J)
    dv = distinguished_varieties(J)
    fixed: list[list[FixedComponent]] = [[] for _ in range(n + 1)]
    for d in dv:
        fixed[d.codim].append(FixedComponent(d.subspace, generic_segre_along(J, d.subspace)))
    n_k = tuple(e[k] - sum(fc.beta for fc in fixed[k]) for k in range(n + 1))
    rep = SegreReport(J, e, tuple(tuple(f) for f in fixed), n_k, codim_zero_set(J),
                      {"distinguished": [{"S": d.subspace.names(J.vars), "order": d.order,
                                          "normals": [list(v) for v in d.normals]} for d in dv]})
    bad = check_report(rep)
    if bad and strict:
        raise SiuInvariantError(bad, rep)
    return rep


def closure_invariance_check(J: MonomialIdeal) -> bool:
    return multiplicity_sequence(J).c == multiplicity_sequence(integral_closure(J)).c
