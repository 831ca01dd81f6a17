"""Numerical checks built on the ball-mass machinery.

* ``exodus_demo``: two regularizations of ``log|(w, zw)|`` with the same
  Lelong numbers but different limiting masses.
* ``perturbation_invariance_check``: adding a bounded psh term leaves Lelong
  numbers unchanged.
* ``bounded_no_charge_check``: ``(dd^c b)^k`` of a bounded potential puts no
  mass on a proper subspace; tube masses shrink with the tube volume.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from ..algebra import PolyTuple
from .lelong import LelongEstimate, extrapolate, lelong_estimate
from .potential import Perturbation, Potential, ma_density_batch
from .quadrature import QuadratureConfig, _ball_volume, _directions

EXODUS_EPSILONS = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
TUBE_WIDTHS = (0.2, 0.1, 0.05, 0.025)


# --------------------------------------------------------------------------
# regularization non-uniqueness on a polydisk window

def _disk(rng, m: int, R: float) -> np.ndarray:
    return R * np.sqrt(rng.random(m)) * np.exp(2j * np.pi * rng.random(m))


def polydisk_mass(P: Potential, R: float, samples: int, seed: int = 0, s: float = 0.2,
                  uniform_fraction: float = 0.2) -> tuple[float, float]:
    """Mass of ``(dd^c u)^2`` over ``{|z| <= R, |w| <= R}`` in ``C^2`` (variables ``z, w``).

    ``z`` is uniform on its disk; ``w`` mixes a uniform draw with a radial
    power law toward ``w = 0``.
    """
    if P.n != 2:
        raise ValueError("polydisk_mass works in C^2")
    rng = np.random.default_rng(seed)
    z = _disk(rng, samples, R)
    lab = rng.random(samples) < uniform_fraction
    wu = _disk(rng, samples, R)
    wp = R * rng.random(samples) ** (1 / s) * np.exp(2j * np.pi * rng.random(samples))
    w = np.where(lab, wu, wp)
    rw = np.abs(w)
    with np.errstate(divide="ignore"):
        qw = uniform_fraction / (np.pi * R ** 2) + (1 - uniform_fraction) * s * rw ** (s - 2) / (2 * np.pi * R ** s)
    q = qw / (np.pi * R ** 2)
    B, _ = P.factor_batch(np.stack([z, w], axis=1))
    dens, _ = ma_density_batch(None, [2], factor=B)
    v = np.where(np.isfinite(q), dens[2] / q, 0.0)
    mean = math.fsum(v) / samples
    var = max(math.fsum(v * v) / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / (samples - 1))


@dataclass
class ExodusResult:
    mass_G: float
    mass_G_stderr: float
    mass_Gtilde: float
    mass_Gtilde_stderr: float
    ratio: float
    ratio_stderr: float
    window_radius: float
    trace: list[dict] = field(default_factory=list)

    @property
    def oracle(self) -> dict:
        a = self.window_radius ** 2 / (1 + self.window_radius ** 2)
        return {"mass_G": a, "mass_Gtilde": 2 * a, "ratio": 2.0}

    def to_json(self) -> dict:
        return {"mass_G": self.mass_G, "mass_G_stderr": self.mass_G_stderr,
                "mass_Gtilde": self.mass_Gtilde, "mass_Gtilde_stderr": self.mass_Gtilde_stderr,
                "ratio": self.ratio, "ratio_stderr": self.ratio_stderr,
                "window_radius": self.window_radius, "oracle": self.oracle, "trace": self.trace}

    def __getitem__(self, key):
        return getattr(self, key)


def exodus_demo(window_radius: float = 1.0, epsilon_schedule: Sequence[float] = EXODUS_EPSILONS,
                samples: int = 400_000, seed: int = 0) -> ExodusResult:
    """Masses of ``(dd^c G)^2`` on the window for ``phi = (w, zw)``.

    ``G_eps = 1/2 log(|phi|^2 + eps)`` and
    ``Gtilde_eps = 1/2 log(|w|^2 + eps) + 1/2 log(1 + |z|^2)``; both tend to
    functions with the same singularities, but the limiting masses differ by a
    factor 2.
    """
    vars_ = ("z", "w")
    phi = PolyTuple.parse(["w", "z*w"], vars_)
    wonly = PolyTuple.parse(["w"], vars_)
    alpha = Perturbation.affine([1, 0], 0, 1.0)
    eps = sorted((float(e) for e in epsilon_schedule), reverse=True)
    trace, mg, sg, mt, st = [], [], [], [], []
    for e in eps:
        a, sa = polydisk_mass(Potential(phi, math.sqrt(e)), window_radius, samples, seed)
        b, sb = polydisk_mass(Potential(wonly, math.sqrt(e), alpha), window_radius, samples, seed)
        trace.append({"epsilon": e, "mass_G": a, "mass_G_stderr": sa,
                      "mass_Gtilde": b, "mass_Gtilde_stderr": sb})
        mg.append(a), sg.append(sa), mt.append(b), st.append(sb)
    g, gs = extrapolate(eps, mg, sg)[:2]
    t, ts = extrapolate(eps, mt, st)[:2]
    ratio = t / g
    rs = abs(ratio) * math.hypot(gs / g, ts / t)
    return ExodusResult(g, gs, t, ts, ratio, rs, window_radius, trace)


# --------------------------------------------------------------------------
# invariance under bounded perturbations

@dataclass
class InvarianceResult:
    delta: float
    passed: bool
    threshold: float
    with_h: LelongEstimate
    without_h: LelongEstimate

    def to_json(self) -> dict:
        return {"delta": self.delta, "pass": self.passed, "threshold": self.threshold,
                "with_h": self.with_h.to_json(), "without_h": self.without_h.to_json()}

    def __getitem__(self, key):
        return {"delta": self.delta, "pass": self.passed}[key]


def perturbation_invariance_check(f: PolyTuple, h: Perturbation, k: int, x=None,
                                  cfg: QuadratureConfig | None = None) -> InvarianceResult:
    """Compare Lelong estimates of ``log|f| + h`` and ``log|f|``, same seed for both."""
    cfg = cfg or QuadratureConfig()
    a = lelong_estimate(f, h, k, x, cfg)
    b = lelong_estimate(f, None, k, x, cfg)
    delta = abs(a.value - b.value)
    thr = max(0.1, 3 * math.hypot(a.stderr, b.stderr))
    return InvarianceResult(delta, delta < thr, thr, a, b)


# --------------------------------------------------------------------------
# bounded potentials do not charge subspaces

@dataclass
class NoChargeResult:
    k: int
    widths: tuple[float, ...]
    masses: list[float]
    stderrs: list[float]
    volumes: list[float]
    slope: float | None
    passed: bool

    def to_json(self) -> dict:
        return {"k": self.k, "widths": list(self.widths), "masses": self.masses, "stderrs": self.stderrs,
                "volumes": self.volumes, "slope": self.slope, "pass": self.passed}


def tube_mass(b: Perturbation, W: Iterable[int], k: int, n: int, t: float, samples: int, seed: int = 0):
    """Mass of ``(dd^c b)^k ^ beta^(n-k)`` and Lebesgue volume of ``{|z_W| < t} ^ B_1``.

    ``W`` lists the coordinates vanishing on the subspace.
    """
    W = sorted(set(W))
    rest = [j for j in range(n) if j not in W]
    rng = np.random.default_rng(seed)
    X = np.zeros((samples, 2 * n))
    cols_w = [c for j in W for c in (2 * j, 2 * j + 1)]
    cols_r = [c for j in rest for c in (2 * j, 2 * j + 1)]
    dw, dr = len(cols_w), len(cols_r)
    X[:, cols_w] = _directions(rng, samples, dw) * (t * rng.random(samples) ** (1 / dw))[:, None]
    q_vol = _ball_volume(dw, t)
    if cols_r:
        X[:, cols_r] = _directions(rng, samples, dr) * (rng.random(samples) ** (1 / dr))[:, None]
        q_vol *= _ball_volume(dr, 1.0)
    inside = np.linalg.norm(X, axis=1) < 1
    Z = X[:, 0::2] + 1j * X[:, 1::2]
    if b.active:
        B = b.factor(Z)
    else:
        B = np.zeros((samples, n, 0), dtype=complex)
    dens, _ = ma_density_batch(None, [k], factor=B)
    v = np.where(inside, dens[k] * q_vol, 0.0)
    ind = inside * q_vol
    mean = math.fsum(v) / samples
    var = max(math.fsum(v * v) / samples - mean * mean, 0.0)
    return mean, math.sqrt(var / (samples - 1)), math.fsum(ind) / samples


def bounded_no_charge_check(b: Perturbation, W: Iterable[int], k: int, cfg: QuadratureConfig | None = None,
                            n: int = 2, widths: Sequence[float] = TUBE_WIDTHS) -> NoChargeResult:
    """Tube masses around ``W`` for shrinking widths; passes if they vanish at
    least as fast as the tube volume (log-log slope >= 0.9) or are all zero."""
    cfg = cfg or QuadratureConfig()
    W = sorted(set(W))
    if not W or max(W) >= n:
        raise ValueError("W must name coordinates of C^n")
    masses, errs, vols = [], [], []
    for t in widths:
        m, s, v = tube_mass(b, W, k, n, t, cfg.samples_per_ball, cfg.rng_seed)
        masses.append(m), errs.append(s), vols.append(v)
    if all(m == 0 for m in masses):
        return NoChargeResult(k, tuple(widths), masses, errs, vols, None, True)
    if any(m <= 0 for m in masses):
        return NoChargeResult(k, tuple(widths), masses, errs, vols, None, False)
    slope = float(np.polyfit(np.log(vols), np.log(masses), 1)[0])
    return NoChargeResult(k, tuple(widths), masses, errs, vols, slope, slope >= 0.9)
