"""Segre numbers, polar multiplicities and Monge-Ampere masses of monomial ideals.

Three engines compute the same invariants at the origin of ``C^n``:

* ``multiplicity``: exact Segre numbers from a bigraded Hilbert function,
  with the fixed/moving decomposition read off the Newton polyhedron;
* ``vogel``: the Vogel recursion with random generic combinations (plane only);
* ``macurrent``: Monte Carlo Lelong numbers of ``(dd^c log|f|)^k``.
"""

__version__ = "0.1.0"

from .algebra import GaussianRational, ParseError, Polynomial, PolyTuple, parse_polynomial
from .multiplicity import (MultiplicitySequence, SegreReport, bigraded_dimension, excess_dimension,
                           multiplicity_sequence, siu_report)
from .newton import (CoordinateSubspace, MonomialIdeal, NewtonPolyhedron, covolume, distinguished_varieties,
                     integral_closure, newton_polyhedron)
from .vogel import PlaneCycle, vogel_at_origin, vogel_statistics

__all__ = [
    "CoordinateSubspace", "GaussianRational", "MonomialIdeal", "MultiplicitySequence", "NewtonPolyhedron",
    "ParseError", "PlaneCycle", "PolyTuple", "Polynomial", "SegreReport", "bigraded_dimension", "covolume",
    "distinguished_varieties", "excess_dimension", "integral_closure", "multiplicity_sequence", "newton_polyhedron",
    "parse_polynomial", "siu_report", "vogel_at_origin", "vogel_statistics", "__version__",
]
