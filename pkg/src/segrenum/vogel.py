"""Vogel cycles of bivariate monomial ideals at the origin.

The recursion is ``X_0 = C^2`` and ``X_{k+1} = H_{k+1} . X_k^{off}``, where
``X_k = X_k^Z + X_k^{off}`` splits off the components lying in the zero set
``Z`` of the ideal and ``H_l`` is the divisor of a random combination ``h_l``
of the generators.  Multiplicities at the origin of ``X_k^Z`` and
``X_k^{off}`` are the Segre numbers ``e_k`` and polar multiplicities ``m_k``.

Only what the origin sees is tracked: the two coordinate axes, the origin
itself, and residual curves (never factored).  Points other than the origin
are dropped since they carry no multiplicity at 0.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field, replace

import numpy as np

from .algebra import Polynomial, order_at_zero, resultant_eliminating
from .newton import CoordinateSubspace, MonomialIdeal, minimal_primes

log = logging.getLogger(__name__)

X_AXIS_ZERO = CoordinateSubspace({0})  # {x = 0}
Y_AXIS_ZERO = CoordinateSubspace({1})  # {y = 0}
ORIGIN = CoordinateSubspace({0, 1})


class VogelError(RuntimeError):
    pass


class ImproperIntersection(VogelError):
    pass


@dataclass(frozen=True)
class PlaneCycle:
    """Integer cycle near the origin of C^2.

    ``plane`` is the multiplicity of the whole plane (only ``X_0`` has it),
    ``axis_x``/``axis_y`` those of ``{x=0}``/``{y=0}``, ``origin`` that of the
    point ``[0]``.  ``curves`` holds residual curves not divisible by x or y.
    """

    plane: int = 0
    axis_x: int = 0
    axis_y: int = 0
    origin: int = 0
    curves: tuple[tuple[Polynomial, int], ...] = ()

    def __post_init__(self):
        for name in ("plane", "axis_x", "axis_y", "origin"):
            if getattr(self, name) < 0:
                raise ValueError(f"negative multiplicity for {name}")
        for g, m in self.curves:
            if m < 0:
                raise ValueError("negative curve multiplicity")
            if any(e[0] > 0 for e in g.terms) and all(e[0] > 0 for e in g.terms):
                raise ValueError("curve polynomial divisible by x")
            if any(e[1] > 0 for e in g.terms) and all(e[1] > 0 for e in g.terms):
                raise ValueError("curve polynomial divisible by y")

    def __add__(self, other: "PlaneCycle") -> "PlaneCycle":
        return PlaneCycle(self.plane + other.plane, self.axis_x + other.axis_x,
                          self.axis_y + other.axis_y, self.origin + other.origin,
                          self.curves + other.curves)

    def is_zero(self) -> bool:
        return not (self.plane or self.axis_x or self.axis_y or self.origin
                    or any(m for _, m in self.curves))

    def multiplicity_at_origin(self) -> int:
        curve_mult = sum(m * int(order_at_zero(g)) for g, m in self.curves if not g.is_constant())
        return self.plane + self.axis_x + self.axis_y + self.origin + curve_mult

    def same_as(self, other: "PlaneCycle") -> bool:
        return (self.plane, self.axis_x, self.axis_y, self.origin) == \
            (other.plane, other.axis_x, other.axis_y, other.origin) and \
            Counter((g, m) for g, m in self.curves if m) == Counter((g, m) for g, m in other.curves if m)


def split_by_Z(C: PlaneCycle, Z: list[CoordinateSubspace], origin_in_Z: bool | None = None):
    """Split ``C`` into the part inside ``Z`` and the rest.

    ``Z`` is given by its components (coordinate subspaces).  The origin lies
    in ``Z`` whenever ``Z`` is nonempty, unless ``origin_in_Z`` says otherwise.
    """
    if origin_in_Z is None:
        origin_in_Z = bool(Z)
    x_in = any(V.contains(X_AXIS_ZERO) for V in Z)
    y_in = any(V.contains(Y_AXIS_ZERO) for V in Z)
    CZ = PlaneCycle(0, C.axis_x if x_in else 0, C.axis_y if y_in else 0,
                    C.origin if origin_in_Z else 0, ())
    Coff = PlaneCycle(C.plane, 0 if x_in else C.axis_x, 0 if y_in else C.axis_y,
                      0 if origin_in_Z else C.origin, C.curves)
    return CZ, Coff


def _strip_axes(h: Polynomial) -> tuple[int, int, Polynomial]:
    a = min(e[0] for e in h.terms)
    b = min(e[1] for e in h.terms)
    if a or b:
        h = Polynomial({(e[0] - a, e[1] - b): c for e, c in h.terms.items()}, h.vars)
    return a, b, h


def shear(p: Polynomial, s: int) -> Polynomial:
    """``p(x + s*y, y)``."""
    x = Polynomial.variable(0, p.vars)
    y = Polynomial.variable(1, p.vars)
    return p.substitute({0: x + y.scale(s)})


def local_intersection(g: Polynomial, h: Polynomial, rng: np.random.Generator,
                       shears: int = 3, shear_range: int = 997, max_reshear: int = 5) -> int:
    """Intersection multiplicity of the curves ``g = 0``, ``h = 0`` at the origin.

    Computed as the order at 0 of a resultant after a random shear; the
    minimum over ``shears`` shears is taken and disagreement triggers new
    shears (a non-generic shear can only overcount).
    """
    if not g.is_zero() and order_at_zero(g) == 0 or not h.is_zero() and order_at_zero(h) == 0:
        return 0
    if g.is_zero() or h.is_zero():
        raise ImproperIntersection("intersection with the zero polynomial")
    values = []
    for attempt in range(shears + max_reshear):
        s = int(rng.integers(1, shear_range + 1))
        gs, hs = shear(g, s), shear(h, s)
        if gs.degree_in(1) < 1 or hs.degree_in(1) < 1:
            continue
        res = resultant_eliminating(gs, hs, 1)
        if res.is_zero():
            raise ImproperIntersection(f"curves {g} and {h} share a component")
        values.append(int(order_at_zero(res)))
        if len(values) >= shears and values.count(min(values)) >= 2:
            break
    if not values:
        raise VogelError("no usable shear found")
    if len(set(values)) > 1:
        log.debug("shear disagreement %s for %s, %s", values, g, h)
    return min(values)


def intersect_with_divisor(C_off: PlaneCycle, h: Polynomial, rng: np.random.Generator) -> PlaneCycle:
    """``div(h) . C_off`` near the origin.

    The plane gives ``div(h)`` itself (axes stripped, the rest kept as one
    residual curve); axes and curves give points, of which only the origin
    is recorded.
    """
    if h.is_zero():
        raise ImproperIntersection("h vanishes identically")
    out = PlaneCycle()
    if C_off.plane:
        a, b, rest = _strip_axes(h)
        curves = ((rest, C_off.plane),) if not rest.is_constant() else ()
        out = out + PlaneCycle(0, a * C_off.plane, b * C_off.plane, 0, curves)
    pts = 0
    if C_off.axis_x:  # restrict h to x = 0
        r = h.substitute({0: 0})
        if r.is_zero():
            raise ImproperIntersection("h vanishes on {x=0}")
        pts += C_off.axis_x * int(order_at_zero(r))
    if C_off.axis_y:
        r = h.substitute({1: 0})
        if r.is_zero():
            raise ImproperIntersection("h vanishes on {y=0}")
        pts += C_off.axis_y * int(order_at_zero(r))
    for g, m in C_off.curves:
        if m:
            pts += m * local_intersection(g, h, rng)
    if C_off.origin:
        raise ImproperIntersection("cannot intersect a point with a divisor")
    return out + PlaneCycle(origin=pts)


@dataclass(frozen=True)
class VogelSequence:
    h: tuple[Polynomial, ...]
    coefficients: tuple[tuple[int, ...], ...]
    seed: int
    coeff_range: int
    retries: int = 0


def _proper_against(C_off: PlaneCycle, h: Polynomial) -> bool:
    if h.is_zero():
        return False
    if C_off.axis_x and h.substitute({0: 0}).is_zero():
        return False
    if C_off.axis_y and h.substitute({1: 0}).is_zero():
        return False
    rng = np.random.default_rng(0)
    for g, m in C_off.curves:
        if m and not g.is_constant():
            s = int(rng.integers(1, 998))
            gs, hs = shear(g, s), shear(h, s)
            if hs.degree_in(1) < 1:
                continue  # h is a nonzero univariate in x after the shear: no common factor with g
            if resultant_eliminating(gs, hs, 1).is_zero():
                return False
    return True


def draw_vogel_sequence(J: MonomialIdeal, seed: int, coeff_range: int = 1000,
                        max_retries: int = 50) -> VogelSequence:
    """Two random integer combinations of the generators satisfying the Vogel condition."""
    if J.n != 2:
        raise ValueError("Vogel sequences are implemented for n = 2 only")
    gens = J.polynomials().entries
    rng = np.random.default_rng(seed)
    Z = minimal_primes(J)
    for attempt in range(max_retries):
        coeffs = rng.integers(1, coeff_range + 1, size=(2, len(gens)))
        hs = tuple(sum((g.scale(int(c)) for g, c in zip(gens, row)), Polynomial.zero(J.vars))
                   for row in coeffs)
        if hs[0].is_zero():
            continue
        if J.is_unit:
            return VogelSequence(hs, tuple(map(tuple, coeffs.tolist())), seed, coeff_range, attempt)
        X1 = intersect_with_divisor(PlaneCycle(plane=1), hs[0], rng)
        _, X1off = split_by_Z(X1, Z)
        if _proper_against(X1off, hs[1]):
            return VogelSequence(hs, tuple(map(tuple, coeffs.tolist())), seed, coeff_range, attempt)
    raise VogelError(f"no Vogel sequence found for {J} with seed {seed} after {max_retries} draws")


@dataclass(frozen=True)
class VogelOutcome:
    e: tuple[int, int, int]
    m: tuple[int, int, int]
    seed: int
    cycles: tuple[PlaneCycle, ...] = field(default=(), compare=False, repr=False)
    conserved: bool = True

    def row(self) -> list[int]:
        return [self.seed, *self.e, *self.m]


def vogel_at_origin(J: MonomialIdeal, seed: int, coeff_range: int = 1000) -> VogelOutcome:
    """Run the Vogel recursion for one random Vogel sequence."""
    if J.n != 2:
        raise ValueError("vogel_at_origin is implemented for n = 2 only")
    seq = draw_vogel_sequence(J, seed, coeff_range)
    Z = minimal_primes(J)
    rng = np.random.default_rng([seed, 1])
    X = PlaneCycle(plane=1)
    e, m, cycles = [], [], [X]
    conserved = True
    for k in range(3):
        XZ, Xoff = split_by_Z(X, Z)
        if not (XZ + Xoff).same_as(X):
            conserved = False
        e.append(XZ.multiplicity_at_origin())
        m.append(Xoff.multiplicity_at_origin())
        if k < 2:
            if Xoff.is_zero():
                X = PlaneCycle()
            else:
                X = intersect_with_divisor(Xoff, seq.h[k], rng)
            cycles.append(X)
    if not conserved:
        raise VogelError("cycle conservation X_k = X_k^Z + X_k^off violated")
    return VogelOutcome(tuple(e), tuple(m), seed, tuple(cycles), conserved)


@dataclass
class VogelStatistics:
    outcomes: list[VogelOutcome]
    frequencies: dict[tuple, int]
    generic_e: tuple[int, ...]
    generic_m: tuple[int, ...]

    @property
    def trials(self) -> int:
        return len(self.outcomes)

    @property
    def generic_count(self) -> int:
        return self.frequencies.get((self.generic_e, self.generic_m), 0)


def vogel_statistics(J: MonomialIdeal, trials: int, base_seed: int = 0,
                     coeff_range: int = 1000) -> VogelStatistics:
    """Repeat the recursion over seeds; the generic value is the componentwise minimum."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    outs = [vogel_at_origin(J, base_seed + t, coeff_range) for t in range(trials)]
    freq = Counter((o.e, o.m) for o in outs)
    ge = tuple(min(o.e[k] for o in outs) for k in range(3))
    gm = tuple(min(o.m[k] for o in outs) for k in range(3))
    return VogelStatistics(outs, dict(freq), ge, gm)
