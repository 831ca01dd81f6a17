"""Regularized potentials ``u = 1/2 log(|f|^2 + eps^2) + h`` and their complex Hessians.

The Hessian convention is ``H[j, k] = d^2 u / dz_j dzbar_k``.  With
``dd^c = (i/pi) d dbar`` and ``beta = dd^c |z|^2`` the density of
``(dd^c u)^k ^ beta^(n-k)`` against Lebesgue measure is

    k! (n-k)! sigma_k(H) (2/pi)^n,

``sigma_k`` being the k-th elementary symmetric function of the eigenvalues.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..algebra import CompiledTuple, PolyTuple


@dataclass(frozen=True)
class Perturbation:
    """Bounded smooth psh term ``c * 1/2 log(1 + |g|^2)``.

    ``kind`` is ``"none"``, ``"ball"`` (``g = z``) or ``"affine"``
    (``g = a . z + b``, a single affine form).
    """

    kind: str = "none"
    c: float = 0.0
    a: tuple[complex, ...] = ()
    b: complex = 0j

    def __post_init__(self):
        if self.kind not in ("none", "ball", "affine"):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")
        if self.c < 0:
            raise ValueError("perturbation coefficient must be >= 0 (psh)")
        if self.kind == "affine" and not self.a:
            raise ValueError("affine perturbation needs coefficients a")

    @classmethod
    def none(cls) -> "Perturbation":
        return cls("none", 0.0)

    @classmethod
    def ball(cls, c: float = 1.0) -> "Perturbation":
        return cls("ball", float(c))

    @classmethod
    def affine(cls, a: Sequence[complex], b: complex = 0j, c: float = 1.0) -> "Perturbation":
        return cls("affine", float(c), tuple(complex(x) for x in a), complex(b))

    @property
    def active(self) -> bool:
        return self.kind != "none" and self.c != 0

    def _g(self, Z: np.ndarray):
        if self.kind == "ball":
            return Z, np.broadcast_to(np.eye(Z.shape[1], dtype=complex), (Z.shape[0],) + (Z.shape[1],) * 2)
        a = np.asarray(self.a, dtype=complex)
        if len(a) != Z.shape[1]:
            raise ValueError("affine form dimension mismatch")
        g = (Z @ a + self.b)[:, None]
        return g, np.broadcast_to(a[None, None, :], (Z.shape[0], 1, Z.shape[1]))

    def value(self, Z: np.ndarray) -> np.ndarray:
        if not self.active:
            return np.zeros(Z.shape[0])
        g, _ = self._g(Z)
        return self.c * 0.5 * np.log1p((np.abs(g) ** 2).sum(axis=1))

    def factor(self, Z: np.ndarray) -> np.ndarray:
        n = Z.shape[1]
        if not self.active:
            return np.zeros((Z.shape[0], n, 0), dtype=complex)
        g, D = self._g(Z)
        return math.sqrt(self.c) * _log_norm_factor(g, D, 1.0)

    def hessian(self, Z: np.ndarray) -> np.ndarray:
        B = self.factor(Z)
        return B @ B.conj().transpose(0, 2, 1)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "c": self.c}
        if self.kind == "affine":
            d["a"] = [[x.real, x.imag] for x in self.a]
            d["b"] = [self.b.real, self.b.imag]
        return d


def _log_norm_factor(F: np.ndarray, D: np.ndarray, shift: float) -> np.ndarray:
    """Factor ``B[N, n, c]`` with ``B B^* = Hessian of 1/2 log(sum |F_i|^2 + shift)``.

    ``F[N, m]`` are values and ``D[N, m, n]`` derivatives.  The textbook form
    ``A/(2S) - g g^*/(2S^2)`` cancels catastrophically near ``{F = 0}``; by the
    Lagrange identity it equals ``(shift * D^* D + sum_{i<l} w_il w_il^*) / (2 S^2)``
    with ``w_il = F_l dF_i - F_i dF_l``, a sum of rank-one PSD terms.
    """
    N, m, n = D.shape
    S = (np.abs(F) ** 2).sum(axis=1) + shift
    cols = [math.sqrt(shift) * D[:, i, :] for i in range(m)]
    for i in range(m):
        for l in range(i + 1, m):
            cols.append(F[:, l][:, None] * D[:, i, :] - F[:, i][:, None] * D[:, l, :])
    B = np.stack(cols, axis=2)
    return B / (math.sqrt(2) * S)[:, None, None]


def _log_norm_hessian(F: np.ndarray, D: np.ndarray, shift: float) -> np.ndarray:
    """Hessian of ``1/2 log(sum |F_i|^2 + shift)``, reference (cancelling) formula."""
    S = (np.abs(F) ** 2).sum(axis=1) + shift
    A = np.einsum("Nij,Nik->Njk", D, D.conj())
    g = np.einsum("Ni,Nij->Nj", F.conj(), D)  # dS/dz_j
    return A / (2 * S)[:, None, None] - np.einsum("Nj,Nk->Njk", g, g.conj()) / (2 * S ** 2)[:, None, None]


@dataclass(frozen=True)
class Potential:
    f: PolyTuple
    epsilon: float
    perturbation: Perturbation = field(default_factory=Perturbation.none)

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")

    @property
    def n(self) -> int:
        return self.f.nvars

    def compiled(self) -> CompiledTuple:
        # cached on the instance; the dataclass is frozen
        c = self.__dict__.get("_compiled")
        if c is None:
            c = self.f.compile()
            object.__setattr__(self, "_compiled", c)
        return c

    def with_epsilon(self, eps: float) -> "Potential":
        p = Potential(self.f, eps, self.perturbation)
        object.__setattr__(p, "_compiled", self.compiled())
        return p

    def value(self, Z: np.ndarray) -> np.ndarray:
        Z = _as_points(Z, self.n)
        F, _ = self.compiled()(Z)
        return 0.5 * np.log((np.abs(F) ** 2).sum(axis=1) + self.epsilon ** 2) + self.perturbation.value(Z)

    def factor_batch(self, Z: np.ndarray):
        """``(B, F)``: PSD factor with ``H = B B^*`` and the values of ``f``."""
        Z = _as_points(Z, self.n)
        F, D = self.compiled()(Z)
        B = _log_norm_factor(F, D, self.epsilon ** 2)
        if self.perturbation.active:
            B = np.concatenate([B, self.perturbation.factor(Z)], axis=2)
        return B, F

    def hessian_batch(self, Z: np.ndarray, with_values: bool = False):
        B, F = self.factor_batch(Z)
        H = B @ B.conj().transpose(0, 2, 1)
        return (H, F) if with_values else H


def _as_points(Z, n: int) -> np.ndarray:
    Z = np.asarray(Z, dtype=complex)
    if Z.ndim == 1:
        Z = Z[None, :]
    if Z.shape[1] != n:
        raise ValueError(f"points have dimension {Z.shape[1]}, expected {n}")
    return Z


@dataclass(frozen=True)
class HessianSample:
    point: np.ndarray
    H: np.ndarray

    def is_hermitian(self, tol: float = 1e-12) -> bool:
        scale = max(np.abs(self.H).max(), 1e-300)
        return bool(np.abs(self.H - self.H.conj().T).max() <= tol * scale)

    def min_eigenvalue(self) -> float:
        return float(np.linalg.eigvalsh(self.H).min())


def hessian(P: Potential, z) -> HessianSample:
    z = np.asarray(z, dtype=complex).reshape(-1)
    return HessianSample(z, P.hessian_batch(z[None, :])[0])


def elementary_symmetric(eigs: np.ndarray) -> np.ndarray:
    """``E[N, k] = sigma_k`` of each row of eigenvalues, ``k = 0..n``."""
    N, n = eigs.shape
    E = np.zeros((N, n + 1))
    E[:, 0] = 1.0
    for j in range(n):
        E[:, 1:] = E[:, 1:] + E[:, :-1] * eigs[:, j: j + 1]
    return E


def density_constant(n: int, k: int) -> float:
    return math.factorial(k) * math.factorial(n - k) * (2 / math.pi) ** n


def ma_density_batch(H: np.ndarray, ks: Sequence[int], factor: np.ndarray | None = None):
    """Densities for several ``k`` at once; returns ``({k: values}, {k: clipped count})``.

    If the PSD factor ``B`` (``H = B B^*``) is given, eigenvalues are taken as
    squared singular values of ``B``, which cannot be negative.
    """
    N, n = (factor.shape[0], factor.shape[1]) if factor is not None else np.shape(H)[:2]
    for k in ks:
        if not 0 <= k <= n:
            raise ValueError(f"k={k} out of range 0..{n}")
    E = None
    if any(k > 0 for k in ks):
        if factor is not None:
            sv = np.zeros((N, n))
            if factor.shape[2]:
                s = np.linalg.svd(factor, compute_uv=False)
                sv[:, :s.shape[1]] = s ** 2
            E = elementary_symmetric(sv)
        else:
            E = elementary_symmetric(np.linalg.eigvalsh(np.asarray(H)))
    out, clipped = {}, {}
    for k in ks:
        if k == 0:
            out[k] = np.full(N, density_constant(n, 0))
            clipped[k] = 0
            continue
        s = E[:, k]
        neg = s < 0
        clipped[k] = int(neg.sum())
        out[k] = density_constant(n, k) * np.where(neg, 0.0, s)
    return out, clipped


def ma_density(H: HessianSample | np.ndarray, k: int) -> float:
    """Density of ``(dd^c u)^k ^ beta^(n-k)`` w.r.t. Lebesgue measure, clipped at 0."""
    M = H.H if isinstance(H, HessianSample) else np.asarray(H)
    vals, _ = ma_density_batch(M[None, :, :], [k])
    return float(vals[k][0])
