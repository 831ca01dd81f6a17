"""Lelong numbers of ``(dd^c u)^k`` at a point from ball masses on an (r, eps) schedule.

``nu_hat(r) = mass(B(x, r)) / (2^(n-k) r^(2(n-k)))``; for the current of a
smooth hypersurface through ``x`` with ``k = 1`` this is exactly 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from ..algebra import PolyTuple
from .potential import Perturbation, Potential
from .quadrature import QuadratureConfig, ball_masses

GAMMA_RANGE = (0.05, 8.0)
NEAR_ZERO_TARGET = 0.3


@dataclass(frozen=True)
class TracePoint:
    r: float
    epsilon: float
    mass: float
    stderr: float
    nu_hat: float
    nu_stderr: float
    near_zero_fraction: float
    clipped: int

    def to_json(self) -> dict:
        return {"r": self.r, "epsilon": self.epsilon, "mass": self.mass, "stderr": self.stderr,
                "nu_hat": self.nu_hat, "nu_stderr": self.nu_stderr,
                "near_zero_fraction": self.near_zero_fraction, "clipped": self.clipped}


@dataclass
class LelongEstimate:
    k: int
    value: float
    stderr: float
    trace: list[TracePoint]
    decay_exponent: float | None
    method: str
    flags: list[str] = field(default_factory=list)
    point: tuple[complex, ...] = ()

    @property
    def converged(self) -> bool:
        return self.method != "smallest-radius" and "non-monotone" not in self.flags

    def to_json(self, config: QuadratureConfig | None = None) -> dict:
        out = {
            "k": self.k,
            "point": [[c.real, c.imag] for c in self.point],
            "value": self.value,
            "stderr": self.stderr,
            "decay_exponent": self.decay_exponent,
            "method": self.method,
            "converged": self.converged,
            "flags": list(self.flags),
            "trace": [t.to_json() for t in self.trace],
        }
        if config is not None:
            out["config"] = config.to_json()
        return out

    def csv_rows(self) -> list[dict]:
        return [{"r": t.r, "eps": t.epsilon, "mass": t.mass, "stderr": t.stderr, "nu_hat": t.nu_hat}
                for t in self.trace]


def normalization(n: int, k: int, r: float) -> float:
    return 2.0 ** (n - k) * r ** (2 * (n - k))


def _power_fit(r: Sequence[float], v: Sequence[float]):
    """Fit ``v = nu + C r^(2 gamma)`` through three points; ``None`` if no root."""
    (r1, r2, r3), (v1, v2, v3) = r, v
    d1, d2 = v2 - v1, v3 - v2
    if d1 == 0 or d2 == 0 or (d1 > 0) != (d2 > 0):
        return None
    target = d1 / d2

    def g(gam):
        a, b, c = (x ** (2 * gam) for x in (r1, r2, r3))
        return (b - a) / (c - b) - target

    lo, hi = GAMMA_RANGE
    try:
        if g(lo) * g(hi) > 0:
            return None
        gam = brentq(g, lo, hi, xtol=1e-12)
    except (ValueError, ZeroDivisionError, OverflowError):
        return None
    C = d2 / (r3 ** (2 * gam) - r2 ** (2 * gam))
    return v3 - C * r3 ** (2 * gam), gam


def extrapolate(radii: Sequence[float], values: Sequence[float], errors: Sequence[float]):
    """Limit ``r -> 0`` from the three smallest radii.

    Returns ``(value, stderr, decay_exponent, method, flags)``.  Values that
    agree within twice their combined errors are averaged; otherwise a
    power-law fit is tried, falling back to the smallest radius with the last
    increment folded into the error bar.
    """
    order = np.argsort(radii)[::-1]
    r = [float(radii[i]) for i in order][-3:]
    v = [float(values[i]) for i in order][-3:]
    s = [max(float(errors[i]), 1e-12) for i in order][-3:]
    flags = []
    full = [float(values[i]) for i in order]
    ferr = [float(errors[i]) for i in order]
    steps = [(full[i + 1] - full[i], math.hypot(ferr[i], ferr[i + 1])) for i in range(len(full) - 1)]
    signif = [math.copysign(1, d) for d, e in steps if abs(d) > 2 * e]
    if any(a != b for a, b in zip(signif, signif[1:])):
        flags.append("non-monotone")
    if len(r) < 3:
        return v[-1], s[-1], None, "smallest-radius", flags + ["too-few-radii"]

    flat = all(abs(v[i] - v[j]) <= 2 * math.hypot(s[i], s[j]) for i in range(3) for j in range(i + 1, 3))
    if flat:
        w = [1 / e ** 2 for e in s]
        mean = math.fsum(wi * vi for wi, vi in zip(w, v)) / math.fsum(w)
        return mean, 1 / math.sqrt(math.fsum(w)), None, "flat-mean", flags

    fit = None if "non-monotone" in flags else _power_fit(r, v)
    if fit is not None:
        nu, gam = fit
        # propagate the Monte Carlo errors through the fit by one-sided differences
        var = 0.0
        for i in range(3):
            vp = list(v)
            vp[i] += s[i]
            alt = _power_fit(r, vp)
            dv = (alt[0] - nu) if alt is not None else (v[2] - v[1])
            var += dv * dv
        return nu, math.sqrt(var), gam, "power-fit", flags

    flags.append("fit-failed")
    return v[2], math.hypot(s[2], v[2] - v[1]), None, "smallest-radius", flags


def _as_potential_parts(f, h):
    if not isinstance(f, PolyTuple):
        raise TypeError("f must be a PolyTuple")
    return f, (h if h is not None else Perturbation.none())


def lelong_estimates(f: PolyTuple, h: Perturbation | None, ks: Sequence[int], x=None,
                     cfg: QuadratureConfig | None = None) -> dict[int, LelongEstimate]:
    """Lelong estimates for several ``k`` sharing one sample per radius."""
    cfg = cfg or QuadratureConfig()
    f, h = _as_potential_parts(f, h)
    n = f.nvars
    ks = sorted(set(int(k) for k in ks))
    for k in ks:
        if not 0 <= k <= n:
            raise ValueError(f"k={k} out of range 0..{n}")
    if x is None:
        x = cfg.center if cfg.center is not None else (0j,) * n
    x = tuple(complex(c) for c in x)
    if len(x) != n:
        raise ValueError(f"point has dimension {len(x)}, expected {n}")
    base = Potential(f, cfg.epsilon(cfg.radii[0]), h)
    traces: dict[int, list[TracePoint]] = {k: [] for k in ks}
    for r in cfg.radii:
        eps = cfg.epsilon(r)
        # common random numbers: the same seed at every radius
        res = ball_masses(base.with_epsilon(eps), ks, x, r, cfg)
        for k in ks:
            m = res[k]
            c = normalization(n, k, r)
            traces[k].append(TracePoint(r, eps, m.mass, m.stderr, m.mass / c, m.stderr / c,
                                        m.near_zero_fraction, m.clipped))
    out = {}
    for k in ks:
        tr = traces[k]
        value, err, gam, method, flags = extrapolate([t.r for t in tr], [t.nu_hat for t in tr],
                                                     [t.nu_stderr for t in tr])
        if any(t.clipped > 1e-3 * cfg.samples_per_ball for t in tr):
            flags.append("clipped")
        if tr[-1].near_zero_fraction < NEAR_ZERO_TARGET:
            flags.append("sparse-near-zero")
        out[k] = LelongEstimate(k, value, err, tr, gam, method, flags, x)
    return out


def lelong_estimate(f: PolyTuple, h: Perturbation | None, k: int, x=None,
                    cfg: QuadratureConfig | None = None) -> LelongEstimate:
    """Estimated Lelong number at ``x`` of ``(dd^c (log|f| + h))^k`` with its diagnostic trace."""
    return lelong_estimates(f, h, [k], x, cfg)[k]
