import itertools
import math
import time

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import CORPUS, ideal
from segrenum.multiplicity import (BudgetExceeded, SiuInvariantError, bigraded_dimension, bigraded_table,
                                   check_report, closure_invariance_check, excess_dimension,
                                   generic_segre_along, multiplicity_sequence, power_membership,
                                   project_ideal, siu_report)
from segrenum.newton import (CoordinateSubspace, MonomialIdeal, codim_zero_set, covolume, integral_closure,
                             is_primary_to_origin, newton_polyhedron)


def J(*gens):
    return MonomialIdeal(len(gens[0]), tuple(gens))


# --------------------------------------------------------------------------
# oracles: explicit generator sets of J^i, divisibility by brute force

def power_generators(I: MonomialIdeal, i: int) -> set:
    out = {(0,) * I.n}
    for _ in range(i):
        out = {tuple(a + b for a, b in zip(p, g)) for p in out for g in I.generators}
    return out


def divides(g, mu) -> bool:
    return all(a <= b for a, b in zip(g, mu))


def brute_table(I: MonomialIdeal, imax: int, jmax: int) -> np.ndarray:
    H = np.zeros((imax + 1, jmax + 1), int)
    bound = (imax + 1) * max(max(g) for g in I.generators) + jmax + 1
    for i in range(imax + 1):
        Pi, Pn = power_generators(I, i), power_generators(I, i + 1)
        for mu in itertools.product(range(bound), repeat=I.n):
            if any(divides(g, mu) for g in Pn):
                continue
            cands = [sum(g) for g in Pi if divides(g, mu)]
            if cands:
                ex = sum(mu) - min(cands)
                if ex <= jmax:
                    H[i, ex] += 1
    return H


# --------------------------------------------------------------------------

def test_power_membership_examples():
    I = J((2, 0), (1, 1))
    assert power_membership(I, (3, 1), 2)
    assert power_membership(I, (3, 1), 0)
    assert not power_membership(I, (2, 0), 2)
    assert power_membership(I, (0, 0), 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), min_size=1, max_size=3),
       st.tuples(st.integers(0, 8), st.integers(0, 8)), st.integers(0, 3))
def test_power_membership_matches_brute(gens, mu, i):
    I = MonomialIdeal(2, tuple(gens))
    assert power_membership(I, mu, i) == any(divides(g, mu) for g in power_generators(I, i))


def test_bigraded_dimension_examples():
    I = J((2, 0), (1, 1))
    assert bigraded_dimension(I, 0, 1) == 2
    assert bigraded_dimension(I, 1, 2) == 2
    for K in (I, J((1, 0), (0, 1)), J((2, 0, 0), (1, 1, 0), (1, 0, 1))):
        assert bigraded_dimension(K, 1, 0) == 0
    assert bigraded_dimension(J((0, 0)), 1, 0) == 0
    with pytest.raises(ValueError):
        bigraded_dimension(I, -1, 0)


def test_bigraded_dimension_is_degree_count():
    I = J((2, 0), (0, 3))
    for i in range(3):
        for j in range(10):
            want = sum(1 for mu in itertools.product(range(j + 1), repeat=2) if sum(mu) == j
                       and any(divides(g, mu) for g in power_generators(I, i))
                       and not any(divides(g, mu) for g in power_generators(I, i + 1)))
            assert bigraded_dimension(I, i, j) == want


@pytest.mark.parametrize("name", list(CORPUS))
def test_excess_table_matches_brute(name):
    I = ideal(name)
    imax, jmax = (4, 6) if I.n == 2 else (2, 3)
    assert np.array_equal(bigraded_table(I, imax, jmax), brute_table(I, imax, jmax))
    assert excess_dimension(I, 1, 1) == brute_table(I, 1, 1)[1, 1]


def test_corpus_values_and_runtime():
    t0 = time.perf_counter()
    for name, (_, _, e) in CORPUS.items():
        assert multiplicity_sequence(ideal(name)).c == e, name
    assert time.perf_counter() - t0 < 5


@pytest.mark.parametrize("name", [k for k in CORPUS])
def test_top_number_matches_covolume(name):
    """For J primary to the origin, e_n = n! covolume of the Newton polyhedron."""
    I = ideal(name)
    e = multiplicity_sequence(I)
    if is_primary_to_origin(I):
        assert e[I.n] == math.factorial(I.n) * covolume(newton_polyhedron(I))


gens_primary = st.tuples(st.integers(1, 4), st.integers(1, 4),
                         st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=2))


@settings(max_examples=12, deadline=None)
@given(gens_primary)
def test_random_primary_top_number(args):
    a, b, extra = args
    I = MonomialIdeal(2, ((a, 0), (0, b), *extra))
    if I.is_unit:
        return
    e = multiplicity_sequence(I)
    assert e[2] == 2 * covolume(newton_polyhedron(I))
    assert e[0] == e[1] == 0


def test_unit_and_principal():
    assert multiplicity_sequence(J((0, 0))).c == (0, 0, 0)
    assert multiplicity_sequence(J((3, 0))).c == (0, 3, 0)
    assert multiplicity_sequence(J((1, 2))).c == (0, 3, 0)


def test_budget_exceeded():
    I = J((7, 0, 0), (0, 7, 0), (0, 0, 7))
    with pytest.raises(BudgetExceeded) as info:
        multiplicity_sequence(I, cell_budget=10_000)
    assert len(info.value.largest_window) == 2


def test_stable_window_recorded():
    seq = multiplicity_sequence(ideal("x2,xy"))
    (u0, u1), (v0, v1) = seq.stable_window
    assert 0 < u0 < u1 and 0 < v0 < v1
    assert list(seq) == [0, 1, 2] and len(seq) == 3


def test_closure_invariance():
    assert multiplicity_sequence(J((2, 0), (0, 2))).c == multiplicity_sequence(J((2, 0), (1, 1), (0, 2))).c
    for name in CORPUS:
        assert closure_invariance_check(ideal(name)), name
    I = J((3, 0), (0, 2))
    assert multiplicity_sequence(integral_closure(I)).c == multiplicity_sequence(I).c


def test_project_and_generic_segre():
    I = ideal("x2,xy")
    P = project_ideal(I, CoordinateSubspace({0}))
    assert P.n == 1 and P.generators == ((1,),)
    assert generic_segre_along(I, CoordinateSubspace({0})) == 1
    assert generic_segre_along(I, CoordinateSubspace({0, 1})) == 2
    I3 = ideal("x2,xy,xz")
    assert generic_segre_along(I3, CoordinateSubspace({0})) == 1


def test_siu_report_x2xy():
    rep = siu_report(ideal("x2,xy"))
    assert [[(sorted(fc.subspace.S), fc.beta) for fc in f] for f in rep.fixed] == [[], [([0], 1)], [([0, 1], 2)]]
    assert rep.n_k == (0, 0, 0)
    out = rep.to_json()
    assert out["e"] == [0, 1, 2] and out["codimZ"] == 1
    assert out["decomposition"][1]["fixed"] == [{"S": ["x"], "beta": 1}]


def test_siu_report_moving_part():
    rep = siu_report(ideal("x2,xy,xz"))
    assert rep.n_k == (0, 0, 1, 0)
    assert rep.fixed[2] == ()
    assert [fc.beta for fc in rep.fixed[3]] == [2]


def test_vanishing_structure_all_corpus(corpus_ideal):
    name, I, e = corpus_ideal
    rep = siu_report(I)
    p = codim_zero_set(I)
    assert all(rep.e[k] == 0 for k in range(p))
    assert rep.n_k[p] == 0 and rep.n_k[I.n] == 0
    assert check_report(rep) == []


def test_check_report_flags_bad_report():
    rep = siu_report(ideal("x2,xy"), strict=False)
    bad = type(rep)(rep.ideal, rep.e, rep.fixed, (0, 1, 0), rep.codimZ)
    checks = {d["check"] for d in check_report(bad)}
    assert {"sum", "n_codimZ=0"} <= checks
    assert SiuInvariantError(check_report(bad), bad).discrepancies


def test_unit_report():
    rep = siu_report(J((0, 0)))
    assert rep.codimZ is None and rep.e.c == (0, 0, 0) and rep.n_k == (0, 0, 0)
