"""Input files, deterministic JSON and CSV output, and the shipped JSON schemas.

Ideal files are UTF-8 text::

    # comment
    label: cusp-like example
    vars: x y
    gen: x^2
    gen: x*y

``vars`` appears once, ``gen`` one or more times; ``label`` and ``name`` are
free-form metadata.
"""

from __future__ import annotations

import csv
import io
import json
import sys
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

from .algebra import ParseError, PolyTuple, parse_polynomial
from .macurrent.quadrature import QuadratureConfig
from .newton import MonomialIdeal

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - exercised on 3.10 only
    import tomli as tomllib

META_KEYS = ("label", "name")


class InputError(ValueError):
    """Malformed input file; ``line`` and ``column`` are 1-based."""

    def __init__(self, message: str, path: str | None = None, line: int | None = None,
                 column: int | None = None):
        self.path, self.line, self.column = path, line, column
        where = ":".join(str(x) for x in (path, line, column) if x is not None)
        super().__init__(f"{where}: {message}" if where else message)


@dataclass
class IdealSpec:
    vars: tuple[str, ...]
    generators: list[str]
    metadata: dict[str, list[str]] = field(default_factory=dict)
    path: str | None = None
    # (line, column) of each generator text, for error messages
    positions: list[tuple[int, int]] = field(default_factory=list, repr=False)

    def polynomials(self):
        out = []
        for text, (ln, col) in zip(self.generators, self.positions or [(None, None)] * len(self.generators)):
            try:
                out.append(parse_polynomial(text, self.vars))
            except ParseError as exc:
                c = None if col is None else col + (exc.pos or 0)
                raise InputError(f"cannot parse generator {text!r}: {exc}", self.path, ln, c) from None
        return out

    def poly_tuple(self) -> PolyTuple:
        try:
            return PolyTuple(tuple(self.polynomials()))
        except ValueError as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(str(exc), self.path) from None

    def monomial_ideal(self) -> MonomialIdeal:
        polys = self.polynomials()
        for p, text, (ln, col) in zip(polys, self.generators, self.positions or [(None, None)] * len(polys)):
            if not p.is_zero() and not p.is_monomial():
                raise InputError(f"generator {text!r} is not a monomial; symbolic commands need a "
                                 "monomial ideal", self.path, ln, col)
        if all(p.is_zero() for p in polys):
            raise InputError("all generators are zero", self.path)
        return MonomialIdeal.from_polynomials([p for p in polys if not p.is_zero()])

    def to_json(self) -> dict:
        return {"vars": list(self.vars), "generators": list(self.generators),
                "metadata": {k: list(v) for k, v in sorted(self.metadata.items())}}


def parse_ideal_text(text: str, path: str | None = None) -> IdealSpec:
    vars_: tuple[str, ...] | None = None
    gens, pos, meta = [], [], {}
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        if ":" not in line:
            col = len(line) - len(line.lstrip()) + 1
            raise InputError("expected 'key: value'", path, ln, col)
        key, _, value = line.partition(":")
        k = key.strip()
        vcol = len(key) + 2 + (len(value) - len(value.lstrip()))
        value = value.strip()
        if k == "vars":
            if vars_ is not None:
                raise InputError("duplicate 'vars' line", path, ln, 1)
            names = value.replace(",", " ").split()
            if not names:
                raise InputError("'vars' needs at least one name", path, ln, vcol)
            for name in names:
                if not name.isidentifier() or name == "i":
                    raise InputError(f"invalid variable name {name!r}", path, ln, vcol + value.find(name))
            if len(set(names)) != len(names):
                raise InputError("repeated variable name", path, ln, vcol)
            vars_ = tuple(names)
        elif k == "gen":
            if not value:
                raise InputError("empty generator", path, ln, vcol)
            gens.append(value)
            pos.append((ln, vcol))
        elif k in META_KEYS:
            meta.setdefault(k, []).append(value)
        else:
            raise InputError(f"unknown key {k!r} (expected vars, gen, label or name)", path, ln,
                             len(key) - len(key.lstrip()) + 1)
    if vars_ is None:
        raise InputError("missing 'vars' line", path)
    if not gens:
        raise InputError("no 'gen' lines", path)
    spec = IdealSpec(vars_, gens, meta, path, pos)
    spec.polynomials()  # surface parse errors early, with positions
    return spec


def read_ideal(path: str | Path) -> IdealSpec:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read file: {exc}", str(path)) from None
    return parse_ideal_text(text, str(path))


def read_config(path: str | Path | None) -> QuadratureConfig:
    """Quadrature settings from a TOML file of ``key = value`` lines."""
    if path is None:
        return QuadratureConfig()
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read config: {exc}", str(path)) from None
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"invalid config: {exc}", str(path)) from None
    try:
        return QuadratureConfig.from_mapping(data)
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid config: {exc}", str(path)) from None


def parse_point(text: str, n: int) -> tuple[complex, ...]:
    """``"0.5+0.1,0-0.2"`` -> ``(0.5+0.1j, -0.2j)``: comma-separated ``re+im`` pairs."""
    from .macurrent.quadrature import parse_complex

    parts = [t for t in text.split(",") if t.strip()]
    if len(parts) != n:
        raise InputError(f"--point needs {n} comma-separated coordinates, got {len(parts)}")
    out = []
    for t in parts:
        t = t.strip()
        if any(c in t for c in "ij"):
            out.append(parse_complex(t))
            continue
        # bare "re+im" / "re-im": split at the last sign that is not an exponent sign
        cut = None
        for idx in range(len(t) - 1, 0, -1):
            if t[idx] in "+-" and t[idx - 1] not in "eE":
                cut = idx
                break
        try:
            out.append(complex(float(t), 0.0) if cut is None else complex(float(t[:cut]), float(t[cut:])))
        except ValueError:
            raise InputError(f"bad coordinate {t!r} in --point") from None
    return tuple(out)


# --------------------------------------------------------------------------
# output

def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, fixed indentation, no timestamps."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in r])
    return buf.getvalue()


def load_schema(name: str) -> dict:
    """One of ``segre_report``, ``lelong_estimate``, ``king_report``."""
    text = resources.files("segrenum").joinpath("schemas", f"{name}.schema.json").read_text(encoding="utf-8")
    return json.loads(text)


class SchemaViolation(RuntimeError):
    """An output document does not match its shipped schema."""


def validate(obj, name: str) -> None:
    """Raise ``SchemaViolation`` if ``obj`` does not match the named schema."""
    import jsonschema

    try:
        jsonschema.validate(obj, load_schema(name))
    except jsonschema.ValidationError as exc:
        raise SchemaViolation(f"{name} output violates its schema: {exc.message}") from None
