"""End-to-end cross-check of the three engines for a monomial ideal at the origin.

The Lelong number at 0 of ``(dd^c log|f|)^k`` should equal ``e_k + m_k``:
Segre number plus polar multiplicity.  ``e_k`` comes from the Hilbert-function
engine; ``m_k`` from the Vogel recursion when ``n = 2``.  For ``n >= 3`` only
the ends of the range have a symbolic target:

* ``k = 0``: ``e_0 + m_0 = 0 + mult_0 C^n = 1``,
* ``k = 1``: the Lelong number of ``log|f|``, i.e. the least generator degree,
* ``k = n``: ``m_n = 0`` since ``X_n`` off ``Z`` misses the origin, so the target is ``e_n``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

from .io import IdealSpec
from .macurrent import QuadratureConfig, lelong_estimates
from .multiplicity import BudgetExceeded, check_report, siu_report
from .newton import DimensionError, MonomialIdeal
from .vogel import VogelError, vogel_statistics

log = logging.getLogger(__name__)

PASS, FAIL, SKIPPED = "PASS", "FAIL", "SKIPPED"
REL_TOL = 0.15


@dataclass
class Check:
    name: str
    verdict: str
    reason: str | None = None
    detail: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "verdict": self.verdict, "reason": self.reason, "detail": self.detail}


@dataclass
class KingReport:
    ideal: dict
    segre: dict | None
    vogel: dict
    lelong: list[dict]
    checks: list[Check]
    config: dict

    @property
    def verdict(self) -> str:
        return FAIL if any(c.verdict == FAIL for c in self.checks) else PASS

    @property
    def converged(self) -> bool:
        return all(entry["estimate"] is None or entry["estimate"]["converged"] for entry in self.lelong)

    def to_json(self) -> dict:
        return {"ideal": self.ideal, "segre": self.segre, "vogel": self.vogel, "lelong": self.lelong,
                "checks": [c.to_json() for c in self.checks], "config": self.config, "verdict": self.verdict}


def tolerance(target: float, stderr: float) -> float:
    return REL_TOL * max(abs(target), 1.0) + 3 * stderr


def numeric_targets(J: MonomialIdeal, e, m=None) -> dict[int, tuple[int | None, str | None]]:
    """Per ``k``: ``(target, reason)``; ``target`` is None when no symbolic value exists."""
    n = J.n
    out = {}
    for k in range(n + 1):
        if m is not None:
            out[k] = (e[k] + m[k], None)
        elif J.is_unit:
            out[k] = (1 if k == 0 else 0, None)
        elif k == 0:
            out[k] = (1, None)
        elif k == 1:
            out[k] = (min(sum(g) for g in J.generators), None)
        elif k == n:
            out[k] = (e[n], None)
        else:
            out[k] = (None, f"polar multiplicity m_{k} has no symbolic value for n = {n}")
    return out


def king_check(spec: IdealSpec | MonomialIdeal, cfg: QuadratureConfig | None = None,
               trials: int = 100, seed: int = 0) -> KingReport:
    cfg = cfg or QuadratureConfig()
    if isinstance(spec, MonomialIdeal):
        J = spec
        echo = {"vars": list(J.vars), "generators": [str(p) for p in J.polynomials()], "metadata": {}}
    else:
        J = spec.monomial_ideal()
        echo = spec.to_json()
    echo["normalized"] = str(J)
    checks: list[Check] = []

    # symbolic
    rep = None
    try:
        rep = siu_report(J, strict=False)
        bad = check_report(rep)
        checks.append(Check("segre-invariants", FAIL if bad else PASS,
                            "structural invariant violated" if bad else None, {"discrepancies": bad}))
    except (BudgetExceeded, DimensionError) as exc:
        checks.append(Check("segre-invariants", FAIL, f"symbolic engine failed: {exc}"))

    # Vogel
    m = None
    if J.n != 2:
        vogel = {"verdict": SKIPPED, "reason": "Vogel recursion is implemented for n = 2 only"}
        checks.append(Check("vogel-vs-segre", SKIPPED, vogel["reason"]))
    else:
        try:
            st = vogel_statistics(J, trials, seed)
            m = st.generic_m
            vogel = {"trials": st.trials, "base_seed": seed, "generic_e": list(st.generic_e),
                     "generic_m": list(st.generic_m), "generic_count": st.generic_count,
                     "conserved": all(o.conserved for o in st.outcomes)}
            if rep is None:
                checks.append(Check("vogel-vs-segre", SKIPPED, "no symbolic Segre numbers"))
            else:
                ok = tuple(st.generic_e) == tuple(rep.e.c)
                checks.append(Check("vogel-vs-segre", PASS if ok else FAIL,
                                    None if ok else "generic Vogel e differs from Hilbert-function e",
                                    {"vogel_e": list(st.generic_e), "segre_e": list(rep.e.c)}))
        except VogelError as exc:
            vogel = {"verdict": FAIL, "reason": str(exc)}
            checks.append(Check("vogel-vs-segre", FAIL, f"Vogel engine failed: {exc}"))

    # numeric
    lelong = []
    targets = numeric_targets(J, rep.e.c, m) if rep is not None else {}
    try:
        est = lelong_estimates(J.polynomials(), None, range(J.n + 1), (0j,) * J.n, cfg)
    except (ValueError, ArithmeticError) as exc:
        est = None
        checks.append(Check("lelong", FAIL, f"numeric engine failed: {exc}"))
    if est is not None:
        for k in range(J.n + 1):
            e_k = est[k]
            target, reason = targets.get(k, (None, "no symbolic Segre numbers"))
            entry = {"k": k, "estimate": e_k.to_json(), "target": target, "tolerance": None}
            if target is None:
                verdict = SKIPPED
                entry["reason"] = reason
            else:
                tol = tolerance(target, e_k.stderr)
                entry["tolerance"] = tol
                verdict = PASS if abs(e_k.value - target) <= tol else FAIL
                reason = None if verdict == PASS else f"|{e_k.value:.4g} - {target}| > {tol:.4g}"
                entry["reason"] = reason
            entry["verdict"] = verdict
            lelong.append(entry)
            checks.append(Check(f"lelong-k{k}", verdict, reason,
                                {"value": e_k.value, "stderr": e_k.stderr, "target": target,
                                 "converged": e_k.converged, "flags": list(e_k.flags)}))
    return KingReport(echo, rep.to_json() if rep is not None else None, vogel, lelong, checks, cfg.to_json())
