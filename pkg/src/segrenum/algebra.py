"""Exact polynomial arithmetic over the Gaussian rationals.

Polynomials are immutable maps from exponent tuples to :class:`GaussianRational`
coefficients over an ordered list of variable names.  Floating point only
appears at the evaluation boundary (:func:`evaluate`) and in
:meth:`PolyTuple.compile`, which produces numpy arrays for the quadrature
engine.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import numpy as np

INFINITY = math.inf


class ParseError(ValueError):
    """Malformed polynomial text; ``pos`` is the 0-based character offset."""

    def __init__(self, message: str, pos: int):
        super().__init__(f"{message} (at position {pos})")
        self.pos = pos


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(x)  # exact binary value
    return Fraction(x)


class GaussianRational:
    """Exact complex number ``re + im*i`` with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = _frac(re)
        self.im = _frac(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x, 0)

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        d = o.re * o.re + o.im * o.im
        if d == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        num = self * o.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __pow__(self, k: int):
        out = GaussianRational(1)
        base = self
        if k < 0:
            base, k = GaussianRational(1) / base, -k
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, float, complex, GaussianRational)):
            o = GaussianRational.coerce(other)
            return self.re == o.re and self.im == o.im
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"({self.re}{sign}{_imag_str(abs(self.im))})"


def _imag_str(q: Fraction) -> str:
    if q == 1:
        return "i"
    if q == -1:
        return "-i"
    return f"{q}i"


ONE = GaussianRational(1)
ZERO = GaussianRational(0)


def _grlex_key(e: tuple[int, ...]):
    return (sum(e), e)


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Polynomial with exact Gaussian-rational coefficients.

    ``terms`` never stores zero coefficients.  Equality compares variable
    lists and term maps.
    """

    terms: Mapping[tuple[int, ...], GaussianRational]
    vars: tuple[str, ...]

    def __init__(self, terms: Mapping | Iterable = (), vars: Sequence[str] = ()):
        clean: dict[tuple[int, ...], GaussianRational] = {}
        items = terms.items() if isinstance(terms, Mapping) else terms
        n = len(vars)
        for e, c in items:
            e = tuple(int(a) for a in e)
            if len(e) != n:
                raise ValueError(f"exponent {e} does not match {n} variables")
            if any(a < 0 for a in e):
                raise ValueError(f"negative exponent in {e}")
            c = GaussianRational.coerce(c)
            if e in clean:
                c = clean[e] + c
            if c.is_zero():
                clean.pop(e, None)
            else:
                clean[e] = c
        object.__setattr__(self, "terms", clean)
        object.__setattr__(self, "vars", tuple(vars))

    # construction helpers
    @classmethod
    def zero(cls, vars: Sequence[str]) -> "Polynomial":
        return cls({}, vars)

    @classmethod
    def constant(cls, c, vars: Sequence[str]) -> "Polynomial":
        return cls({(0,) * len(vars): c}, vars)

    @classmethod
    def monomial(cls, exponent: Sequence[int], vars: Sequence[str], c=1) -> "Polynomial":
        return cls({tuple(exponent): c}, vars)

    @classmethod
    def variable(cls, index: int, vars: Sequence[str]) -> "Polynomial":
        e = [0] * len(vars)
        e[index] = 1
        return cls({tuple(e): 1}, vars)

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def is_monomial(self) -> bool:
        return len(self.terms) == 1

    def total_degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def degree_in(self, var_index: int) -> int:
        return max((e[var_index] for e in self.terms), default=-1)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: _grlex_key(t[0]), reverse=True)

    def leading_term(self):
        return self.sorted_terms()[0]

    def _check(self, other: "Polynomial"):
        if self.vars != other.vars:
            raise ValueError(f"variable mismatch: {self.vars} vs {other.vars}")

    def _lift(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.constant(other, self.vars)

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms[e] + c if e in terms else c
        return Polynomial(terms, self.vars)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial({e: -c for e, c in self.terms.items()}, self.vars)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        out: dict[tuple[int, ...], GaussianRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return Polynomial(out, self.vars)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power of a polynomial")
        out = Polynomial.constant(1, self.vars)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.vars == other.vars and self.terms == other.terms
        if isinstance(other, (int, Fraction, GaussianRational)):
            return self == Polynomial.constant(other, self.vars)
        return NotImplemented

    def __hash__(self):
        return hash((self.vars, frozenset(self.terms.items())))

    def scale(self, c) -> "Polynomial":
        c = GaussianRational.coerce(c)
        return Polynomial({e: v * c for e, v in self.terms.items()}, self.vars)

    def substitute(self, values: Mapping[int, "Polynomial | GaussianRational | int"]) -> "Polynomial":
        """Replace variables (by index) with polynomials or constants, exactly."""
        out = Polynomial.zero(self.vars)
        powers: dict[tuple[int, int], Polynomial] = {}
        for e, c in self.terms.items():
            term = Polynomial.constant(c, self.vars)
            keep = list(e)
            for j, val in values.items():
                if e[j] == 0:
                    continue
                keep[j] = 0
                key = (j, e[j])
                if key not in powers:
                    base = val if isinstance(val, Polynomial) else Polynomial.constant(val, self.vars)
                    powers[key] = base ** e[j]
                term = term * powers[key]
            out = out + term * Polynomial.monomial(keep, self.vars)
        return out

    def divide_exact(self, divisor: "Polynomial") -> "Polynomial":
        """Exact division; raises ``ArithmeticError`` if ``divisor`` does not divide."""
        divisor = self._lift(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("division by the zero polynomial")
        le, lc = divisor.leading_term()
        rem = self
        quot: dict[tuple[int, ...], GaussianRational] = {}
        while not rem.is_zero():
            e, c = rem.leading_term()
            if any(a < b for a, b in zip(e, le)):
                raise ArithmeticError("polynomial division is not exact")
            qe = tuple(a - b for a, b in zip(e, le))
            qc = c / lc
            quot[qe] = qc
            rem = rem - divisor * Polynomial({qe: qc}, self.vars)
        return Polynomial(quot, self.vars)

    def __str__(self):
        return to_string(self)

    def __repr__(self):
        return f"Polynomial({to_string(self)!r}, vars={self.vars})"


def to_string(p: Polynomial) -> str:
    """Canonical serialization (graded lexicographic, highest term first)."""
    if p.is_zero():
        return "0"
    parts = []
    for e, c in p.sorted_terms():
        factors = []
        for name, a in zip(p.vars, e):
            if a == 1:
                factors.append(name)
            elif a > 1:
                factors.append(f"{name}^{a}")
        neg = c.im == 0 and c.re < 0
        mag = -c if neg else c
        if not factors:
            body = _coef_str(mag)
        elif mag == ONE:
            body = "*".join(factors)
        else:
            body = _coef_str(mag) + "*" + "*".join(factors)
        if not parts:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


def _coef_str(c: GaussianRational) -> str:
    if c.im == 0:
        r = c.re
        return str(r.numerator) if r.denominator == 1 else f"({r})"
    return f"({_plain_gauss(c)})"


def _plain_gauss(c: GaussianRational) -> str:
    if c.re == 0:
        return _imag_str(c.im)
    sign = "+" if c.im > 0 else "-"
    return f"{c.re}{sign}{_imag_str(abs(c.im))}"


# --------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()]))")


def _tokenize(text: str):
    pos = 0
    out = []
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos)
        start = m.start(m.lastgroup)
        out.append((m.lastgroup, m.group(m.lastgroup), start))
        pos = m.end()
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, vars: Sequence[str]):
        self.toks = _tokenize(text)
        self.i = 0
        self.vars = tuple(vars)
        if "i" in self.vars:
            raise ValueError("'i' is reserved for the imaginary unit")

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, val):
        t = self.take()
        if t[1] != val:
            raise ParseError(f"expected {val!r}, found {t[1] or 'end of input'!r}", t[2])
        return t

    def poly(self) -> Polynomial:
        out = Polynomial.zero(self.vars)
        sign = 1
        t = self.peek()
        if t[1] in "+-" and t[0] == "op":
            self.take()
            sign = -1 if t[1] == "-" else 1
        out = out + self.term().scale(sign)
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] in "+-":
                self.take()
                sign = -1 if t[1] == "-" else 1
                out = out + self.term().scale(sign)
            else:
                return out

    def term(self) -> Polynomial:
        out = self.item()
        while self.peek()[1] == "*" and self.peek()[0] == "op":
            self.take()
            out = out * self.item()
        return out

    def item(self) -> Polynomial:
        kind, val, pos = self.take()
        if kind == "num":
            q = Fraction(int(val))
            if self.peek()[1] == "/" and self.peek()[0] == "op":
                self.take()
                k2, v2, p2 = self.take()
                if k2 != "num":
                    raise ParseError("expected integer denominator", p2)
                if int(v2) == 0:
                    raise ParseError("zero denominator", p2)
                q = q / int(v2)
            c = GaussianRational(q)
            prev, nxt = self.toks[self.i - 1], self.peek()
            if nxt[0] == "name" and nxt[1] == "i" and nxt[2] == prev[2] + len(prev[1]):
                self.take()  # adjacent "2i" literal
                c = GaussianRational(0, q)
            return Polynomial.constant(c, self.vars)
        if kind == "name":
            if val == "i":
                return Polynomial.constant(GaussianRational(0, 1), self.vars)
            if val not in self.vars:
                raise ParseError(f"unknown variable {val!r}", pos)
            idx = self.vars.index(val)
            k = 1
            if self.peek()[1] == "^" and self.peek()[0] == "op":
                self.take()
                k2, v2, p2 = self.take()
                if k2 == "op" and v2 == "-":
                    raise ParseError("negative exponent", p2)
                if k2 != "num":
                    raise ParseError("expected integer exponent", p2)
                k = int(v2)
            e = [0] * len(self.vars)
            e[idx] = k
            return Polynomial.monomial(e, self.vars)
        if kind == "op" and val == "(":
            inner = self.poly()
            self.expect(")")
            if not inner.is_constant():
                raise ParseError("parentheses may only enclose coefficients", pos)
            return inner
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse_polynomial(text: str, vars: Sequence[str]) -> Polynomial:
    """Parse ``text`` into a :class:`Polynomial` over ``vars``.

    >>> str(parse_polynomial("x^2 + x*y", ("x", "y")))
    'x^2 + x*y'
    """
    p = _Parser(text, vars)
    out = p.poly()
    t = p.peek()
    if t[0] != "end":
        raise ParseError(f"unexpected token {t[1]!r}", t[2])
    return out


# --------------------------------------------------------------------------
# tuples and evaluation

@dataclass(frozen=True)
class PolyTuple:
    """Nonempty tuple of polynomials over shared variables (the map ``f``)."""

    entries: tuple[Polynomial, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        if not entries:
            raise ValueError("PolyTuple must be nonempty")
        vs = entries[0].vars
        if any(p.vars != vs for p in entries):
            raise ValueError("all entries must share the same variables")
        if all(p.is_zero() for p in entries):
            raise ValueError("PolyTuple entries are all zero")

    @classmethod
    def parse(cls, texts: Sequence[str], vars: Sequence[str]) -> "PolyTuple":
        return cls(tuple(parse_polynomial(t, vars) for t in texts))

    @property
    def vars(self) -> tuple[str, ...]:
        return self.entries[0].vars

    @property
    def nvars(self) -> int:
        return len(self.vars)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def compile(self) -> "CompiledTuple":
        return CompiledTuple.from_tuple(self)


def _to_gauss_vector(z, n: int) -> list[GaussianRational]:
    z = list(np.atleast_1d(np.asarray(z, dtype=complex)))
    if len(z) != n:
        raise ValueError(f"point has dimension {len(z)}, expected {n}")
    return [GaussianRational.coerce(complex(v)) for v in z]


def evaluate_exact(p: Polynomial, z: Sequence[GaussianRational]) -> GaussianRational:
    acc = GaussianRational(0)
    for e, c in p.terms.items():
        t = c
        for v, a in zip(z, e):
            if a:
                t = t * v ** a
        acc = acc + t
    return acc


def evaluate(f: PolyTuple | Polynomial, z) -> np.ndarray:
    """Evaluate ``f`` at ``z`` exactly, then round once to complex floats."""
    if isinstance(f, Polynomial):
        f = PolyTuple((f,))
    zz = _to_gauss_vector(z, f.nvars)
    return np.array([complex(evaluate_exact(p, zz)) for p in f], dtype=complex)


def partial_derivative(p: Polynomial, var_index: int) -> Polynomial:
    if not 0 <= var_index < p.nvars:
        raise IndexError(f"variable index {var_index} out of range for {p.nvars} variables")
    out = {}
    for e, c in p.terms.items():
        a = e[var_index]
        if a:
            e2 = list(e)
            e2[var_index] = a - 1
            out[tuple(e2)] = c * a
    return Polynomial(out, p.vars)


def order_at_zero(p: Polynomial) -> int | float:
    """Lowest total degree of a term; ``math.inf`` for the zero polynomial."""
    if p.is_zero():
        return INFINITY
    return min(sum(e) for e in p.terms)


# --------------------------------------------------------------------------
# resultants

def _coefficients_in(p: Polynomial, var_index: int) -> list[Polynomial]:
    """Coefficients of ``p`` as a polynomial in one variable, lowest first."""
    d = p.degree_in(var_index)
    coeffs = [dict() for _ in range(d + 1)]
    for e, c in p.terms.items():
        e2 = list(e)
        k = e2[var_index]
        e2[var_index] = 0
        coeffs[k][tuple(e2)] = c
    return [Polynomial(cf, p.vars) for cf in coeffs]


def sylvester_matrix(p: Polynomial, q: Polynomial, var_index: int) -> list[list[Polynomial]]:
    a = _coefficients_in(p, var_index)[::-1]  # highest first
    b = _coefficients_in(q, var_index)[::-1]
    m, n = len(a) - 1, len(b) - 1
    size = m + n
    zero = Polynomial.zero(p.vars)
    rows = []
    for i in range(n):
        rows.append([zero] * i + a + [zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([zero] * i + b + [zero] * (size - n - 1 - i))
    return rows


def bareiss_determinant(mat: list[list[Polynomial]]) -> Polynomial:
    """Fraction-free determinant over a polynomial ring (exact divisions)."""
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix")
    vars = mat[0][0].vars
    M = [row[:] for row in mat]
    sign = 1
    prev = Polynomial.constant(1, vars)
    for k in range(n - 1):
        if M[k][k].is_zero():
            swap = next((i for i in range(k + 1, n) if not M[i][k].is_zero()), None)
            if swap is None:
                return Polynomial.zero(vars)
            M[k], M[swap] = M[swap], M[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = M[i][j] * M[k][k] - M[i][k] * M[k][j]
                M[i][j] = num.divide_exact(prev)
        prev = M[k][k]
    det = M[n - 1][n - 1]
    return det if sign > 0 else -det


def resultant_eliminating(p: Polynomial, q: Polynomial, var_index: int) -> Polynomial:
    """Sylvester resultant of bivariate ``p``, ``q`` with respect to one variable."""
    if p.vars != q.vars:
        raise ValueError("resultant needs polynomials over the same variables")
    if p.nvars > 2:
        raise ValueError("resultant_eliminating supports at most 2 variables")
    if not 0 <= var_index < p.nvars:
        raise IndexError(f"variable index {var_index} out of range")
    if p.degree_in(var_index) < 1 or q.degree_in(var_index) < 1:
        raise ValueError("both polynomials need positive degree in the eliminated variable")
    return bareiss_determinant(sylvester_matrix(p, q, var_index))


# --------------------------------------------------------------------------
# numeric compilation

@dataclass(frozen=True)
class _CompiledPolys:
    exponents: np.ndarray  # (T, n) int
    coefs: np.ndarray      # (T,) complex
    owner: np.ndarray      # (T,) int, which tuple entry
    count: int

    @classmethod
    def build(cls, polys: Sequence[Polynomial], n: int) -> "_CompiledPolys":
        ex, cf, ow = [], [], []
        for i, p in enumerate(polys):
            for e, c in p.terms.items():
                ex.append(e)
                cf.append(complex(c))
                ow.append(i)
        return cls(np.array(ex, dtype=np.int64).reshape(-1, n),
                   np.array(cf, dtype=complex), np.array(ow, dtype=np.int64), len(polys))

    def __call__(self, Z: np.ndarray) -> np.ndarray:
        N = Z.shape[0]
        out = np.zeros((N, self.count), dtype=complex)
        if len(self.coefs) == 0:
            return out
        mons = np.prod(Z[:, None, :] ** self.exponents[None, :, :], axis=2) * self.coefs
        for i in range(self.count):
            sel = self.owner == i
            if sel.any():
                out[:, i] = mons[:, sel].sum(axis=1)
        return out


@dataclass(frozen=True)
class CompiledTuple:
    """Vectorized float evaluator of a tuple and its exact Jacobian."""

    values: _CompiledPolys
    jacobian: tuple[_CompiledPolys, ...]  # one per variable
    nvars: int

    @classmethod
    def from_tuple(cls, f: PolyTuple) -> "CompiledTuple":
        n = f.nvars
        vals = _CompiledPolys.build(f.entries, n)
        jac = tuple(_CompiledPolys.build([partial_derivative(p, j) for p in f.entries], n)
                    for j in range(n))
        return cls(vals, jac, n)

    def __call__(self, Z: np.ndarray):
        """Return ``(F, D)`` with ``F[N, m]`` values and ``D[N, m, n]`` derivatives."""
        Z = np.asarray(Z, dtype=complex)
        F = self.values(Z)
        D = np.stack([J(Z) for J in self.jacobian], axis=2)
        return F, D
