"""Acceptance criteria 1-11, run at their stated tolerances and default budgets.

Each test records one PASS/FAIL line in ``conftest.ACCEPTANCE``; the lines are
printed in the terminal summary.
"""

import contextlib
import json
import math
import time

import numpy as np
import pytest

from conftest import ACCEPTANCE, BIVARIATE, CORPUS, ideal
from segrenum.algebra import PolyTuple
from segrenum.cli import main
from segrenum.macurrent import (Perturbation, Potential, QuadratureConfig, ball_masses, bounded_no_charge_check,
                                exodus_demo, hessian, lelong_estimate, lelong_estimates,
                                perturbation_invariance_check)
from segrenum.macurrent.quadrature import ball_volume_complex
from segrenum.multiplicity import multiplicity_sequence, siu_report
from segrenum.newton import codim_zero_set, covolume, integral_closure, is_primary_to_origin, newton_polyhedron
from segrenum.vogel import vogel_statistics
from test_potential import POLY, fd_hessian, make_u

XY = ("x", "y")
DEFAULT = QuadratureConfig()


@contextlib.contextmanager
def criterion(num: int, text: str):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        ACCEPTANCE[num] = ("FAIL", f"{text} [{type(exc).__name__}: {str(exc).splitlines()[0] if str(exc) else ''}]")
        print(f"criterion {num}: FAIL {text}")
        raise
    ACCEPTANCE[num] = ("PASS", f"{text} ({time.perf_counter() - t0:.1f} s)")
    print(f"criterion {num}: PASS {text}")


# symbolic values frozen from hand calculations of the examples
HAND = {"x": (0, 1, 0), "x2,xy,xz": (0, 1, 1, 2)}


def test_criterion_01_exact_corpus():
    with criterion(1, "exact corpus of Segre numbers, each certified by an oracle, < 5 s"):
        t0 = time.perf_counter()
        got = {name: multiplicity_sequence(ideal(name)).c for name in CORPUS}
        elapsed = time.perf_counter() - t0
        for name, (n, _, e) in CORPUS.items():
            assert got[name] == e, name
            I = ideal(name)
            certified = False
            if is_primary_to_origin(I):
                assert e[n] == math.factorial(n) * covolume(newton_polyhedron(I))
                certified = True
            if n == 2:
                assert vogel_statistics(I, 10, 0).generic_e == e
                certified = True
            if name in HAND:
                assert HAND[name] == e
                certified = True
            assert certified, name
        assert elapsed < 5, elapsed


def test_criterion_02_siu_decomposition():
    with criterion(2, "fixed/moving decomposition for (x^2,xy) and (x^2,xy,xz)"):
        rep = siu_report(ideal("x2,xy"))
        fixed = [[(sorted(fc.subspace.S), fc.beta) for fc in f] for f in rep.fixed]
        assert fixed == [[], [([0], 1)], [([0, 1], 2)]]
        assert rep.n_k == (0, 0, 0)
        rep = siu_report(ideal("x2,xy,xz"))
        assert rep.n_k[2] == 1 and rep.fixed[2] == ()
        assert rep.n_k[1] == 0 and rep.n_k[3] == 0


def test_criterion_03_closure_invariance():
    with criterion(3, "Segre numbers unchanged under integral closure"):
        for name in CORPUS:
            I = ideal(name)
            assert multiplicity_sequence(I).c == multiplicity_sequence(integral_closure(I)).c, name
        a = multiplicity_sequence(ideal("x2,y2")).c
        b = multiplicity_sequence(integral_closure(ideal("x2,y2"))).c
        assert integral_closure(ideal("x2,y2")).generators == ((2, 0), (1, 1), (0, 2))
        assert a == b == (0, 0, 4)


def test_criterion_04_vanishing_structure():
    with criterion(4, "e_k = 0 below codim Z, n at codim Z and at n vanish"):
        for name in CORPUS:
            I = ideal(name)
            rep = siu_report(I)
            p = codim_zero_set(I)
            assert all(rep.e[k] == 0 for k in range(p)), name
            assert rep.n_k[p] == 0 and rep.n_k[I.n] == 0, name


def test_criterion_05_vogel_statistics():
    with criterion(5, "100 seeded Vogel trials match symbolic values in >= 95 trials, < 30 s"):
        t0 = time.perf_counter()
        for name in ("x2,xy", "x2,y3"):
            st = vogel_statistics(ideal(name), 100, base_seed=0)
            assert st.generic_e == CORPUS[name][2], name
            assert st.generic_count >= 95, (name, st.generic_count)
        assert time.perf_counter() - t0 < 30


@pytest.mark.slow
def test_criterion_06_calibration():
    with criterion(6, "calibration: coordinates k=2, hyperplane k=1, ball volume k=0"):
        t0 = time.perf_counter()
        est = lelong_estimate(PolyTuple.parse(["x", "y"], XY), None, 2, None, DEFAULT)
        assert abs(est.value - 1.0) <= 0.05, est.value
        est = lelong_estimate(PolyTuple.parse(["x"], XY), None, 1, None, DEFAULT)
        assert abs(est.value - 1.0) <= 0.05, est.value
        r = 0.5
        P = Potential(PolyTuple.parse(["x", "y"], XY), DEFAULT.epsilon(r))
        m0 = ball_masses(P, [0], None, r, DEFAULT)[0].mass
        exact = 2 * (2 / math.pi) ** 2 * ball_volume_complex(2, r)
        assert abs(m0 - exact) / exact < 0.005
        assert time.perf_counter() - t0 < 3 * 300


@pytest.mark.slow
def test_criterion_07_exodus():
    with criterion(7, "regularization non-uniqueness: masses 0.5 and 1.0, ratio 2"):
        res = exodus_demo()
        assert res.oracle["mass_G"] == pytest.approx(0.5)
        assert abs(res.mass_G - 0.5) <= 0.05, res.mass_G
        assert abs(res.mass_Gtilde - 1.0) <= 0.10, res.mass_Gtilde
        assert abs(res.ratio - 2.0) <= 0.2, res.ratio


@pytest.mark.slow
def test_criterion_08_lelong_vs_segre_plus_polar():
    with criterion(8, "Lelong numbers within 15% of e_k + m_k for (x^2,xy) and (x^2,y^3)"):
        t0 = time.perf_counter()
        st = vogel_statistics(ideal("x2,xy"), 20, 0)
        targets = {k: st.generic_e[k] + st.generic_m[k] for k in (1, 2)}
        assert targets == {1: 2, 2: 2}
        est = lelong_estimates(PolyTuple.parse(["x^2", "x*y"], XY), None, [1, 2], None, DEFAULT)
        for k in (1, 2):
            assert abs(est[k].value - targets[k]) <= 0.15 * targets[k], (k, est[k].value)
        st = vogel_statistics(ideal("x2,y3"), 20, 0)
        assert st.generic_e[2] + st.generic_m[2] == 6
        est = lelong_estimate(PolyTuple.parse(["x^2", "y^3"], XY), None, 2, None, DEFAULT)
        assert abs(est.value - 6) <= 0.15 * 6, est.value
        assert time.perf_counter() - t0 < 15 * 60


@pytest.mark.slow
def test_criterion_09_perturbation_invariance():
    with criterion(9, "bounded perturbation leaves Lelong numbers unchanged, all f and k"):
        h = Perturbation.ball(1.0)
        for gens, vars_ in ((["x^2", "x*y"], XY), (["x", "y"], XY), (["w", "z*w"], ("z", "w"))):
            f = PolyTuple.parse(gens, vars_)
            for k in range(f.nvars + 1):
                res = perturbation_invariance_check(f, h, k, None, DEFAULT)
                assert res["pass"], (gens, k, res.delta, res.threshold)


@pytest.mark.slow
def test_criterion_10_no_charge():
    with criterion(10, "bounded potential does not charge {z1 = 0}, k = 1, 2"):
        for k in (1, 2):
            res = bounded_no_charge_check(Perturbation.ball(1.0), [0], k, DEFAULT)
            assert res.passed, (k, res.slope, res.masses)


def test_criterion_11_property_suites(tmp_path):
    with criterion(11, "Hessian PSD and finite differences, Vogel conservation, JSON determinism"):
        rng = np.random.default_rng(2024)
        for name, gens in POLY.items():
            Z = (rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))) * 0.4
            P = Potential(PolyTuple.parse(gens, XY), 0.3)
            H = P.hessian_batch(Z)
            Hfd = fd_hessian(make_u(name, 0.3), Z)
            rel = np.linalg.norm(H - Hfd, axis=(1, 2)) / np.linalg.norm(H, axis=(1, 2))
            assert rel.max() < 1e-5, (name, rel.max())
            Ps = P.with_epsilon(1e-6)
            for z in Z:
                S = hessian(Ps, z)
                assert S.is_hermitian() and S.min_eigenvalue() >= -1e-12 * np.abs(S.H).max()
        for name in BIVARIATE:
            st = vogel_statistics(ideal(name), 100, 0)
            assert all(o.conserved for o in st.outcomes), name
        src = tmp_path / "i.txt"
        src.write_text("vars: x y\ngen: x^2\ngen: x*y\n")
        cfg = tmp_path / "c.toml"
        cfg.write_text("samples_per_ball = 20000\n")
        runs = {
            "segre": ["segre", str(src)],
            "vogel": ["vogel", str(src), "--trials", "20", "--csv-out", str(tmp_path / "v.csv")],
            "ma": ["ma", str(src), "--config", str(cfg), "--seed", "3"],
            "king": ["king-check", str(src), "--config", str(cfg), "--trials", "20", "--seed", "3"],
        }
        for key, args in runs.items():
            outs = []
            for rep in range(2):
                path = tmp_path / f"{key}{rep}.json"
                assert main(args + ["--json-out", str(path)]) in (0, 2)
                outs.append(path.read_bytes())
            assert outs[0] == outs[1], key
            json.loads(outs[0])
