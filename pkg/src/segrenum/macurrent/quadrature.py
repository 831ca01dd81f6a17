"""Monte Carlo ball masses of ``(dd^c u)^k ^ beta^(n-k)`` with importance sampling.

The proposal is a mixture of

* the uniform distribution on the ball,
* a radial power law ``pdf(rho) ~ rho^(s-1)`` around the center, and
* for every coordinate subspace ``{z_S = 0}`` on which ``f`` vanishes
  identically, a power law in the distance to that subspace times a uniform
  draw in the remaining coordinates.

The mixture density is evaluated exactly, so the estimator
``mean(density * 1_ball / q)`` is unbiased whatever the weights are.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, fields, replace
from typing import Iterable, Mapping, Sequence

import numpy as np

from ..algebra import GaussianRational, PolyTuple
from .potential import Potential, ma_density_batch

log = logging.getLogger(__name__)

MIN_SAMPLES = 10_000
CLIP_FLAG_FRACTION = 1e-3


@dataclass(frozen=True)
class QuadratureConfig:
    """Sampling budget and (r, eps) schedule for Lelong estimates.

    ``eps = eta * r**epsilon_exponent`` at every radius.
    """

    center: tuple[complex, ...] | None = None
    radii: tuple[float, ...] = (0.5, 0.25, 0.125, 0.0625)
    eta: float = 0.1
    epsilon_exponent: float = 3.0
    samples_per_ball: int = 250_000
    rng_seed: int = 0
    importance_exponent: float = 0.2
    uniform_fraction: float = 0.1
    batch_size: int = 50_000
    workers: int = 1
    strata: tuple[tuple[int, ...], ...] | None = None
    split_mode: bool = False

    def __post_init__(self):
        radii = tuple(float(r) for r in self.radii)
        object.__setattr__(self, "radii", radii)
        if not radii or any(r <= 0 for r in radii):
            raise ValueError("radii must be positive")
        if any(a <= b for a, b in zip(radii, radii[1:])):
            raise ValueError("radii must be strictly decreasing")
        if self.samples_per_ball < MIN_SAMPLES:
            raise ValueError(f"samples_per_ball must be >= {MIN_SAMPLES}")
        if self.batch_size < 1 or self.workers < 1:
            raise ValueError("batch_size and workers must be positive")
        if not self.eta > 0 or not self.epsilon_exponent > 0:
            raise ValueError("eta and epsilon_exponent must be positive")
        if not 0 < self.importance_exponent <= 2:
            raise ValueError("importance_exponent must lie in (0, 2]")
        if not 0 < self.uniform_fraction <= 1:
            raise ValueError("uniform_fraction must lie in (0, 1]")
        if self.center is not None:
            object.__setattr__(self, "center", tuple(complex(c) for c in self.center))
        if self.strata is not None:
            object.__setattr__(self, "strata", tuple(tuple(sorted(int(i) for i in S)) for S in self.strata))

    def epsilon(self, r: float) -> float:
        return self.eta * r ** self.epsilon_exponent

    def with_(self, **kw) -> "QuadratureConfig":
        return replace(self, **kw)

    @classmethod
    def from_mapping(cls, data: Mapping[str, str]) -> "QuadratureConfig":
        """Build from string values, as read from a ``key = value`` file."""
        known = {f.name: f for f in fields(cls)}
        kw = {}
        for key, raw in data.items():
            if key not in known:
                raise ValueError(f"unknown config key {key!r}")
            kw[key] = _coerce(key, raw)
        return cls(**kw)

    def to_json(self) -> dict:
        return {
            "center": None if self.center is None else [[c.real, c.imag] for c in self.center],
            "radii": list(self.radii),
            "eta": self.eta,
            "epsilon_exponent": self.epsilon_exponent,
            "samples_per_ball": self.samples_per_ball,
            "rng_seed": self.rng_seed,
            "importance_exponent": self.importance_exponent,
            "uniform_fraction": self.uniform_fraction,
            "batch_size": self.batch_size,
        }


def _coerce(key: str, raw):
    if not isinstance(raw, str):
        if key == "center" and isinstance(raw, (list, tuple)):
            return tuple(complex(*c) if isinstance(c, (list, tuple)) else
                         parse_complex(c) if isinstance(c, str) else complex(c) for c in raw)
        if key == "strata" and isinstance(raw, (list, tuple)):
            return tuple(tuple(S) for S in raw)
        if key == "radii" and isinstance(raw, (list, tuple)):
            return tuple(raw)
        return raw
    s = raw.strip().strip('"').strip("'")
    if key in ("samples_per_ball", "rng_seed", "batch_size", "workers"):
        return int(s.replace("_", ""))
    if key in ("eta", "epsilon_exponent", "importance_exponent", "uniform_fraction"):
        return float(s)
    if key == "split_mode":
        if s.lower() in ("true", "1", "yes"):
            return True
        if s.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"bad boolean for {key}: {raw!r}")
    items = [t for t in s.strip("[]()").split(",") if t.strip()]
    if key == "radii":
        return tuple(float(t) for t in items)
    if key == "center":
        return tuple(parse_complex(t) for t in items)
    if key == "strata":
        # e.g. "0;1 2" -> ((0,), (1, 2))
        return tuple(tuple(int(i) for i in grp.split()) for grp in s.split(";") if grp.strip())
    raise ValueError(f"cannot parse {key}")


def parse_complex(text: str) -> complex:
    """``"0.5"``, ``"1+2j"``, ``"1+2i"`` or ``"-i"``."""
    t = text.strip().replace(" ", "").replace("i", "j")
    if t in ("j", "+j", "-j"):
        t = t.replace("j", "1j")
    try:
        return complex(t)
    except ValueError:
        raise ValueError(f"bad complex number {text!r}") from None


# --------------------------------------------------------------------------
# zero-set strata

def vanishing_strata(f: PolyTuple) -> list[frozenset[int]]:
    """All nonempty ``S`` with ``f`` identically zero on ``{z_i = 0, i in S}``."""
    n = f.nvars
    out = []
    for size in range(1, n + 1):
        for S in itertools.combinations(range(n), size):
            sub = {i: GaussianRational(0) for i in S}
            if all(p.substitute(sub).is_zero() for p in f):
                out.append(frozenset(S))
    return out


# --------------------------------------------------------------------------
# samplers

def _sphere_area(d: int) -> float:
    return 2 * math.pi ** (d / 2) / math.gamma(d / 2)


def _ball_volume(d: int, r: float) -> float:
    return math.pi ** (d / 2) / math.gamma(d / 2 + 1) * r ** d


def ball_volume_complex(n: int, r: float) -> float:
    """Lebesgue volume of a ball of radius ``r`` in ``C^n = R^(2n)``."""
    return _ball_volume(2 * n, r)


def _directions(rng, m: int, d: int) -> np.ndarray:
    g = rng.standard_normal((m, d))
    return g / np.linalg.norm(g, axis=1)[:, None]


@dataclass(frozen=True)
class _Component:
    cols: tuple[int, ...]       # real columns drawn by the power law
    anchor: np.ndarray          # power-law center in those columns
    R: float                    # power-law radius
    rest: tuple[int, ...]       # real columns drawn uniformly in a ball around the center


class BallSampler:
    """Mixture proposal on a neighborhood of ``B(center, r)`` in ``R^(2n)``."""

    def __init__(self, n: int, center, r: float, strata: Iterable[Iterable[int]] = (),
                 s: float = 0.2, uniform_fraction: float = 0.1):
        self.n, self.r, self.s = n, float(r), float(s)
        c = np.asarray(center if center is not None else np.zeros(n), dtype=complex).reshape(n)
        self.center = c
        self.x = np.empty(2 * n)
        self.x[0::2], self.x[1::2] = c.real, c.imag
        all_cols = tuple(range(2 * n))
        comps = [_Component((), np.zeros(0), 0.0, all_cols),
                 _Component(all_cols, self.x.copy(), self.r, ())]
        seen = {(all_cols, tuple(self.x))}
        for S in strata:
            S = sorted(set(S))
            cols = tuple(sorted([2 * j for j in S] + [2 * j + 1 for j in S]))
            rest = tuple(c2 for c2 in all_cols if c2 not in cols)
            anchor = np.zeros(len(cols))
            key = (cols, tuple(self.x[list(rest)])) if rest else (cols, tuple(anchor))
            if key in seen:
                continue
            seen.add(key)
            R = self.r + float(np.linalg.norm(self.x[list(cols)]))
            comps.append(_Component(cols, anchor, R, rest))
        self.components = comps
        w = np.full(len(comps), (1 - uniform_fraction) / (len(comps) - 1))
        w[0] = uniform_fraction
        self.weights = w / w.sum()

    def _power_law(self, rng, m, d, R):
        return _directions(rng, m, d) * (R * rng.random(m) ** (1 / self.s))[:, None]

    def _uniform(self, rng, m, d, R):
        return _directions(rng, m, d) * (R * rng.random(m) ** (1 / d))[:, None]

    def draw(self, rng: np.random.Generator, N: int):
        """Return complex points ``Z[N, n]``, proposal density ``q`` and the in-ball mask."""
        lab = rng.choice(len(self.components), size=N, p=self.weights)
        X = np.empty((N, 2 * self.n))
        for ci, comp in enumerate(self.components):
            idx = np.flatnonzero(lab == ci)
            m = len(idx)
            if not m:
                continue
            sub = np.empty((m, 2 * self.n))
            if comp.cols:
                sub[:, comp.cols] = comp.anchor + self._power_law(rng, m, len(comp.cols), comp.R)
            if comp.rest:
                rest = list(comp.rest)
                sub[:, rest] = self.x[rest] + self._uniform(rng, m, len(rest), self.r)
            X[idx] = sub
        q = self.density(X)
        inside = np.linalg.norm(X - self.x, axis=1) < self.r
        return X[:, 0::2] + 1j * X[:, 1::2], q, inside

    def density(self, X: np.ndarray) -> np.ndarray:
        q = np.zeros(X.shape[0])
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            for w, comp in zip(self.weights, self.components):
                qc = np.ones(X.shape[0])
                if comp.cols:
                    d = len(comp.cols)
                    rho = np.linalg.norm(X[:, comp.cols] - comp.anchor, axis=1)
                    qc = qc * np.where(rho < comp.R,
                                       self.s * rho ** (self.s - d) / (comp.R ** self.s * _sphere_area(d)), 0.0)
                if comp.rest:
                    rest = list(comp.rest)
                    rho = np.linalg.norm(X[:, rest] - self.x[rest], axis=1)
                    qc = qc * np.where(rho < self.r, 1 / _ball_volume(len(rest), self.r), 0.0)
                q += w * qc
        return q


# --------------------------------------------------------------------------
# ball masses

@dataclass
class MassResult:
    mass: float
    stderr: float
    samples: int
    inside: int
    clipped: int
    near_zero_fraction: float
    split_mass: float | None = None

    @property
    def clip_fraction(self) -> float:
        return self.clipped / self.samples if self.samples else 0.0

    @property
    def clip_flag(self) -> bool:
        return self.clip_fraction > CLIP_FLAG_FRACTION


def _batch_sizes(N: int, batch: int) -> list[int]:
    sizes = [batch] * (N // batch)
    if N % batch:
        sizes.append(N % batch)
    return sizes


def _run_batch(args):
    P, ks, sampler, seed_seq, m, split = args
    rng = np.random.default_rng(seed_seq)
    Z, q, inside = sampler.draw(rng, m)
    B, F = P.factor_batch(Z)
    dens, clipped = ma_density_batch(None, ks, factor=B)
    absf = np.sqrt((np.abs(F) ** 2).sum(axis=1))
    near = int((inside & (absf < 10 * P.epsilon)).sum())
    out = {}
    with np.errstate(divide="ignore", invalid="ignore"):
        for k in ks:
            v = np.where(inside & (q > 0) & np.isfinite(q), dens[k] / q, 0.0)
            v = np.where(np.isfinite(v), v, 0.0)
            sm = math.fsum(v[absf < P.epsilon ** 0.9]) if split else None
            out[k] = (math.fsum(v), math.fsum(v * v), clipped[k], sm)
    return out, int(inside.sum()), near


def ball_masses(P: Potential, ks: Sequence[int], center, r: float, cfg: QuadratureConfig,
                strata: Iterable[Iterable[int]] | None = None, seed: int | None = None) -> dict[int, MassResult]:
    """Masses of ``(dd^c u)^k ^ beta^(n-k)`` over ``B(center, r)`` for several ``k`` from one sample."""
    if not r > 0:
        raise ValueError("radius must be positive")
    if cfg.samples_per_ball < MIN_SAMPLES:
        raise ValueError(f"samples_per_ball must be >= {MIN_SAMPLES}")
    ks = sorted(set(int(k) for k in ks))
    if strata is None:
        strata = cfg.strata if cfg.strata is not None else vanishing_strata(P.f)
    sampler = BallSampler(P.n, center, r, strata, cfg.importance_exponent, cfg.uniform_fraction)
    N = cfg.samples_per_ball
    sizes = _batch_sizes(N, cfg.batch_size)
    seeds = np.random.SeedSequence(cfg.rng_seed if seed is None else seed).spawn(len(sizes))
    jobs = [(P, ks, sampler, sq, m, cfg.split_mode) for sq, m in zip(seeds, sizes)]
    if cfg.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(cfg.workers) as ex:
            results = list(ex.map(_run_batch, jobs))
    else:
        results = [_run_batch(j) for j in jobs]
    inside = sum(res[1] for res in results)
    near = sum(res[2] for res in results)
    out = {}
    for k in ks:
        s1 = math.fsum(res[0][k][0] for res in results)
        s2 = math.fsum(res[0][k][1] for res in results)
        clipped = sum(res[0][k][2] for res in results)
        mean = s1 / N
        var = max(s2 / N - mean * mean, 0.0)
        split = math.fsum(res[0][k][3] for res in results) / N if cfg.split_mode else None
        out[k] = MassResult(mean, math.sqrt(var / (N - 1)), N, inside, clipped,
                            near / inside if inside else 0.0, split)
        if out[k].clip_flag:
            log.warning("k=%d r=%g: %.3f%% of density samples clipped", k, r, 100 * out[k].clip_fraction)
    return out


def ball_mass(P: Potential, k: int, center, r: float, cfg: QuadratureConfig) -> tuple[float, float]:
    """Monte Carlo mass of ``(dd^c u)^k ^ beta^(n-k)`` over ``B(center, r)`` and its stderr."""
    res = ball_masses(P, [k], center, r, cfg)[k]
    return res.mass, res.stderr
