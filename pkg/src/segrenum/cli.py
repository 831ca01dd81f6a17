"""Command-line front end.

Subcommands: ``ideal-info``, ``segre``, ``vogel``, ``ma``, ``king-check``.
Exit codes: 0 success, 1 hard error or failed check, 2 numeric non-convergence.
"""

from __future__ import annotations

import argparse
import logging
import sys
from fractions import Fraction

from . import __version__
from .io import (InputError, SchemaViolation, csv_text, dumps, parse_point, read_config, read_ideal, validate,
                 write_text)
from .king import FAIL, king_check
from .macurrent import lelong_estimate
from .multiplicity import BudgetExceeded, SiuInvariantError, multiplicity_sequence, siu_report
from .newton import (DimensionError, codim_zero_set, covolume, distinguished_varieties, minimal_primes,
                     newton_polyhedron)
from .vogel import VogelError, vogel_statistics

log = logging.getLogger("segrenum")

EXIT_OK, EXIT_FAIL, EXIT_SOFT = 0, 1, 2


def _err(msg: str) -> None:
    print(f"error: {msg}", file=sys.stderr)


def _fraction_str(x) -> str | None:
    if isinstance(x, Fraction):
        return str(x)
    return None  # infinite covolume


def cmd_ideal_info(args) -> int:
    spec = read_ideal(args.path)
    J = spec.monomial_ideal()
    names = J.vars
    info = {"ideal": spec.to_json(), "normalized": str(J), "n": J.n,
            "generators": [str(p) for p in J.polynomials()]}
    if J.is_unit:
        info.update(vertices=[], facets=[], minimal_primes=[], codimZ=None, distinguished=[], covolume="0")
    else:
        NP = newton_polyhedron(J)
        info.update(
            vertices=[list(v) for v in NP.vertices],
            facets=[{"normal": list(f.normal), "offset": f.offset} for f in NP.facets],
            minimal_primes=[P.names(names) for P in minimal_primes(J)],
            codimZ=codim_zero_set(J),
            distinguished=[{"S": d.subspace.names(names), "codim": d.codim, "order": d.order}
                           for d in distinguished_varieties(J)],
            covolume=_fraction_str(covolume(NP)),
        )
    if args.json_out:
        write_text(args.json_out, dumps(info))
    lines = [f"ideal        {info['normalized']}  (n = {J.n})",
             f"generators   {', '.join(info['generators'])}"]
    if J.is_unit:
        lines.append("zero set     empty (unit ideal)")
    else:
        lines.append("vertices     " + " ".join(str(tuple(v)) for v in info["vertices"]))
        for f in info["facets"]:
            lines.append(f"facet        <{tuple(f['normal'])}, a> >= {f['offset']}")
        lines.append("min primes   " + " ".join("{" + ",".join(P) + "}" for P in info["minimal_primes"]))
        lines.append(f"codim Z      {info['codimZ']}")
        cov = info["covolume"]
        lines.append(f"covolume     {cov if cov is not None else 'infinite (not primary to the origin)'}")
    dist = info["distinguished"]
    lines.append("distinguished " + (" ".join("{" + ",".join(d["S"]) + f"}}({d['order']})" for d in dist)
                                     if dist else "none"))
    if args.json_out != "-":
        print("\n".join(lines))
    return EXIT_OK


def cmd_segre(args) -> int:
    J = read_ideal(args.path).monomial_ideal()
    try:
        rep = siu_report(J, strict=True)
    except SiuInvariantError as exc:
        _err("Segre decomposition violates a structural invariant")
        sys.stderr.write(dumps({"discrepancies": exc.discrepancies, "report": exc.report.to_json()}))
        return EXIT_FAIL
    out = rep.to_json()
    validate(out, "segre_report")
    write_text(args.json_out, dumps(out))
    return EXIT_OK


def cmd_vogel(args) -> int:
    J = read_ideal(args.path).monomial_ideal()
    if J.n != 2:
        print(f"SKIPPED: Vogel recursion is implemented for n = 2 only (got n = {J.n})")
        return EXIT_OK
    st = vogel_statistics(J, args.trials, args.seed)
    rows = [o.row() for o in st.outcomes]
    table = csv_text(["seed", "e0", "e1", "e2", "m0", "m1", "m2"], rows)
    e_sym = tuple(multiplicity_sequence(J).c)
    agree = tuple(st.generic_e) == e_sym
    summary = {"trials": st.trials, "base_seed": args.seed, "generic_e": list(st.generic_e),
               "generic_m": list(st.generic_m), "generic_count": st.generic_count,
               "segre_e": list(e_sym), "agrees_with_segre": agree,
               "conserved": all(o.conserved for o in st.outcomes)}
    if args.csv_out:
        write_text(args.csv_out, table)
    else:
        sys.stdout.write(table)
    if args.json_out:
        write_text(args.json_out, dumps(summary))
    print(f"# generic e={st.generic_e} m={st.generic_m} in {st.generic_count}/{st.trials} trials; "
          f"{'agrees' if agree else 'DISAGREES'} with Segre numbers {e_sym}",
          file=sys.stdout if args.csv_out else sys.stderr)
    return EXIT_OK if agree else EXIT_FAIL


def cmd_ma(args) -> int:
    spec = read_ideal(args.path)
    f = spec.poly_tuple()
    cfg = read_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_(rng_seed=args.seed)
    n = f.nvars
    k = n if args.k is None else args.k
    if not 0 <= k <= n:
        raise InputError(f"--k must lie in 0..{n}")
    x = parse_point(args.point, n) if args.point else None
    est = lelong_estimate(f, None, k, x, cfg)
    out = est.to_json(cfg)
    validate(out, "lelong_estimate")
    write_text(args.json_out, dumps(out))
    if args.csv_out:
        rows = [[r["r"], r["eps"], r["mass"], r["stderr"], r["nu_hat"]] for r in est.csv_rows()]
        write_text(args.csv_out, csv_text(["r", "eps", "mass", "stderr", "nu_hat"], rows))
    if not est.converged:
        _err(f"Lelong extrapolation did not converge ({est.method}; flags: {', '.join(est.flags)})")
        return EXIT_SOFT
    return EXIT_OK


def cmd_king_check(args) -> int:
    spec = read_ideal(args.path)
    cfg = read_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_(rng_seed=args.seed)
    rep = king_check(spec, cfg, trials=args.trials, seed=args.seed or 0)
    out = rep.to_json()
    validate(out, "king_report")
    write_text(args.json_out, dumps(out))
    for c in rep.checks:
        tail = f" ({c.reason})" if c.reason else ""
        print(f"{c.verdict:8s} {c.name}{tail}", file=sys.stderr)
    if rep.verdict == FAIL:
        return EXIT_FAIL
    return EXIT_OK if rep.converged else EXIT_SOFT


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="segrenum", description="Segre numbers, Vogel cycles and "
                                "Monge-Ampere masses of monomial ideals.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("path", help="ideal file (vars:/gen: lines)")
        sp.add_argument("--json-out", metavar="FILE", help="write JSON here ('-' for stdout)")
        sp.set_defaults(func=fn)
        return sp

    sp = add("ideal-info", cmd_ideal_info, "Newton polyhedron, primes and distinguished varieties")
    sp = add("segre", cmd_segre, "Segre numbers and their fixed/moving decomposition (JSON)")
    sp = add("vogel", cmd_vogel, "seeded Vogel recursion trials in the plane (CSV)")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--csv-out", metavar="FILE")
    sp = add("ma", cmd_ma, "Monte Carlo Lelong number of (dd^c log|f|)^k")
    sp.add_argument("--k", type=int, help="degree k (default n)")
    sp.add_argument("--point", help="comma-separated complex coordinates re+im (default origin)")
    sp.add_argument("--config", metavar="FILE", help="quadrature settings, key = value (TOML)")
    sp.add_argument("--seed", type=int, help="override rng_seed from the config")
    sp.add_argument("--csv-out", metavar="FILE", help="per-radius trace r,eps,mass,stderr,nu_hat")
    sp = add("king-check", cmd_king_check, "cross-check symbolic, Vogel and numeric engines")
    sp.add_argument("--config", metavar="FILE")
    sp.add_argument("--trials", type=int, default=100)
    sp.add_argument("--seed", type=int, help="base seed for Vogel trials and sampling")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    for attr in ("trials",):
        if getattr(args, attr, 1) is not None and getattr(args, attr, 1) < 1:
            _err(f"--{attr} must be >= 1")
            return EXIT_FAIL
    try:
        return args.func(args)
    except InputError as exc:
        _err(str(exc))
    except (BudgetExceeded, DimensionError, VogelError, SchemaViolation) as exc:
        _err(f"{type(exc).__name__}: {exc}")
    except ValueError as exc:
        _err(str(exc))
    return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
