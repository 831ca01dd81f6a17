import math

import numpy as np
import pytest
from scipy.integrate import quad

from segrenum.algebra import PolyTuple
from segrenum.macurrent.potential import (HessianSample, Perturbation, Potential, density_constant,
                                          elementary_symmetric, hessian, ma_density, ma_density_batch)


def tuple_of(gens, vars=("x", "y")):
    return PolyTuple.parse(gens, vars)


# independent evaluators of u = 1/2 log(sum |f|^2 + eps^2) + h on real coordinates
def numpy_f(name):
    return {
        "x2,xy": lambda z: [z[..., 0] ** 2, z[..., 0] * z[..., 1]],
        "z1,z2": lambda z: [z[..., 0], z[..., 1]],
        "w,zw": lambda z: [z[..., 0], z[..., 1] * z[..., 0]],
        "x2,y3": lambda z: [z[..., 0] ** 2, z[..., 1] ** 3],
    }[name]


POLY = {"x2,xy": ["x^2", "x*y"], "z1,z2": ["x", "y"], "w,zw": ["x", "y*x"], "x2,y3": ["x^2", "y^3"]}


def make_u(name, eps, h=None):
    fs = numpy_f(name)

    def u(z):
        s = sum(np.abs(v) ** 2 for v in fs(z)) + eps ** 2
        out = 0.5 * np.log(s)
        if h == "ball":
            out = out + 0.5 * np.log1p((np.abs(z) ** 2).sum(axis=-1))
        elif h == "affine":
            out = out + 0.5 * np.log1p(np.abs(z[..., 0] + 0.5j * z[..., 1] + 0.25) ** 2)
        return out
    return u


def fd_hessian(u, Z):
    """Central differences in the 2n real directions, step 1e-4 (1 + |z|)."""
    N, n = Z.shape
    step = 1e-4 * (1 + np.linalg.norm(Z, axis=1))[:, None]
    stencil = [(-1, -0.5), (1, 0.5)]
    dirs = [np.eye(n)[j] for j in range(n)] + [1j * np.eye(n)[j] for j in range(n)]
    R = np.zeros((N, 2 * n, 2 * n))
    for a in range(2 * n):
        for b in range(a, 2 * n):
            acc = np.zeros(N)
            for sa, wa in stencil:
                for sb, wb in stencil:
                    acc += wa * wb * u(Z + step * (sa * dirs[a] + sb * dirs[b]))
            R[:, a, b] = R[:, b, a] = acc / step[:, 0] ** 2
    X, Y = R[:, :n, :n], R[:, n:, n:]
    XY, YX = R[:, :n, n:], R[:, n:, :n]
    return 0.25 * ((X + Y) + 1j * (XY - YX))


PERT = {None: Perturbation.none(), "ball": Perturbation.ball(1.0),
        "affine": Perturbation.affine([1, 0.5j], 0.25, 1.0)}


@pytest.mark.parametrize("name", list(POLY))
@pytest.mark.parametrize("h", [None, "ball", "affine"])
def test_hessian_matches_finite_differences(name, h):
    rng = np.random.default_rng(11)
    Z = (rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))) * 0.4
    eps = 0.3
    P = Potential(tuple_of(POLY[name]), eps, PERT[h])
    H = P.hessian_batch(Z)
    Hfd = fd_hessian(make_u(name, eps, h), Z)
    rel = np.linalg.norm(H - Hfd, axis=(1, 2)) / np.linalg.norm(H, axis=(1, 2))
    assert rel.max() < 1e-5


@pytest.mark.parametrize("name", list(POLY))
def test_hessian_hermitian_psd(name):
    rng = np.random.default_rng(5)
    P = Potential(tuple_of(POLY[name]), 1e-4, Perturbation.ball())
    for z in (rng.normal(size=(100, 2)) + 1j * rng.normal(size=(100, 2))) * 0.3:
        S = hessian(P, z)
        assert S.is_hermitian()
        assert S.min_eigenvalue() >= -1e-12 * np.abs(S.H).max()


def test_stable_factor_matches_reference_formula():
    from segrenum.macurrent.potential import _log_norm_factor, _log_norm_hessian
    rng = np.random.default_rng(2)
    F = rng.normal(size=(50, 3)) + 1j * rng.normal(size=(50, 3))
    D = rng.normal(size=(50, 3, 2)) + 1j * rng.normal(size=(50, 3, 2))
    B = _log_norm_factor(F, D, 0.7)
    assert np.allclose(B @ B.conj().transpose(0, 2, 1), _log_norm_hessian(F, D, 0.7), atol=1e-13)


def test_hessian_at_origin_of_coordinates():
    eps = 0.01
    H = hessian(Potential(tuple_of(["x", "y"]), eps), [0, 0]).H
    assert np.allclose(H, np.eye(2) / (2 * eps ** 2))


def test_constant_tuple_has_zero_hessian():
    H = Potential(tuple_of(["3"]), 0.1).hessian_batch(np.array([[0.2, 0.1j]]))
    assert np.allclose(H, 0)
    assert ma_density(HessianSample(np.zeros(2), H[0]), 2) == 0
    assert ma_density(H[0], 0) == pytest.approx(density_constant(2, 0))


def test_density_constant_normalization():
    """With H = I every k gives k! (n-k)! sigma_k(I) (2/pi)^n = n! (2/pi)^n."""
    assert ma_density(np.eye(2), 0) == pytest.approx(2 * (2 / math.pi) ** 2)
    assert ma_density(np.eye(2), 2) == pytest.approx(2 * (2 / math.pi) ** 2)
    assert ma_density(np.eye(2), 1) == pytest.approx(2 * (2 / math.pi) ** 2)


def test_one_variable_total_mass():
    """dd^c 1/2 log(|z|^2 + eps^2) has mass R^2 / (R^2 + eps^2) on the disk of radius R."""
    eps, R = 0.2, 0.7
    P = Potential(PolyTuple.parse(["z"], ("z",)), eps)

    def integrand(r):
        return ma_density(hessian(P, [r]), 1) * 2 * math.pi * r
    val, _ = quad(integrand, 0, R, limit=200)
    assert val == pytest.approx(R ** 2 / (R ** 2 + eps ** 2), rel=1e-8)


def test_two_variable_total_mass():
    """(dd^c 1/2 log(|z|^2 + eps^2))^2 has mass (R^2 / (R^2 + eps^2))^2 on B(0, R); it tends to 1."""
    eps = 0.2
    P = Potential(tuple_of(["x", "y"]), eps)

    def integrand(r):
        return ma_density(hessian(P, [r, 0]), 2) * 2 * math.pi ** 2 * r ** 3
    for R in (0.5, 3.0, 50.0):
        val, _ = quad(integrand, 0, R, limit=200)
        assert val == pytest.approx((R * R / (R * R + eps * eps)) ** 2, rel=1e-8)


def test_elementary_symmetric():
    E = elementary_symmetric(np.array([[1.0, 2.0, 3.0]]))
    assert E.tolist() == [[1, 6, 11, 6]]


def test_density_batch_factor_equals_eigen_path():
    rng = np.random.default_rng(3)
    Z = rng.normal(size=(40, 2)) + 1j * rng.normal(size=(40, 2))
    P = Potential(tuple_of(POLY["x2,y3"]), 0.5, Perturbation.ball())
    B, _ = P.factor_batch(Z)
    a, _ = ma_density_batch(None, [0, 1, 2], factor=B)
    b, clipped = ma_density_batch(P.hessian_batch(Z), [0, 1, 2])
    for k in range(3):
        assert np.allclose(a[k], b[k], rtol=1e-9)
    with pytest.raises(ValueError):
        ma_density_batch(P.hessian_batch(Z), [3])


def test_perturbation_validation():
    with pytest.raises(ValueError):
        Perturbation.ball(-1)
    with pytest.raises(ValueError):
        Perturbation("affine", 1.0)
    with pytest.raises(ValueError):
        Potential(tuple_of(["x"]), 0.0)
    assert not Perturbation.ball(0).active
    assert Perturbation.affine([1, 0]).to_json()["a"] == [[1.0, 0.0], [0.0, 0.0]]
