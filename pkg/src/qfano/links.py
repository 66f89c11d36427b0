"""Diophantine side of Sarkisov links starting from a Q-Fano of index q.

Notation.  f: X~ -> X is a divisorial extraction with exceptional divisor E,
K_X~ = f*K_X + alpha E, and M_k = |kA| pulls back as f*M_k = M~_k + beta_k E.
After the two-ray game the link ends either in a Fano X^ with
Cl(X^)/tors = Z Theta and -K = q^ Theta (birational branch), or in a
fibration with fibre degree q^ in {1, 2, 3} (fiber branch).  Writing
E^ ~ e Theta and M^_k ~ s_k Theta one gets, for every k,

    k q^ = q s_k + (q beta_k - k alpha) e.

The solver enumerates (q^, e, s_k, m_k) with beta_k = frac_k + m_k, then
applies the numeric filters in order:

1. movability: s_k >= 1 whenever dim|kA| >= 1 (birational branch only);
2. target dimensions: for q^ >= 9 some enumerated candidate T of index q^
   must have dim|eTheta| >= 0 and dim|s_k Theta| >= dim|kA| when s_k >= 1;
3. torsion: s_1 = 0 forces e = 1;
4. high-dimensional bound: s_k = 1 with dim|kA| >= 3 needs dim|Theta| >= 3,
   possible only for q^ <= 4 once Cl(X^) is torsion free.

Whatever is left is reported as numerically feasible.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional

from .candidates import ALLOWED_Q, FanoCandidate, FilterConfig, enumerate_candidates
from .rr import local_class

__all__ = [
    "LinkError",
    "MissingTargetTable",
    "BlowupCenter",
    "Threshold",
    "Caps",
    "LinkScenario",
    "LinkSolution",
    "Rejection",
    "CaseReport",
    "BirationalRelations",
    "FEASIBLE",
    "beta_fraction",
    "beta_offset",
    "threshold_constraints",
    "solve_main_equation",
    "implied_q_hat",
    "q_hat_lower_bounds",
    "target_dimension_filter",
    "torsion_filter",
    "high_dim_filter",
    "birational_relations",
    "relations_in_delta",
    "torsion_structure",
    "difficulty_prune",
    "weights_for_discrepancy",
    "target_tables",
    "case_defaults",
    "make_scenario",
    "analyze_case",
]

FIBER_Q = (1, 2, 3)
TABLE_MIN_INDEX = 9  # Cl(X^) = Z is automatic from here on
HIGH_DIM_MAX_Q = 4  # dim|Theta| >= 3 only occurs for q^ <= 4
FEASIBLE = "numerically feasible; geometric argument required"


class LinkError(ValueError):
    pass


class MissingTargetTable(LinkError):
    pass


@dataclass(frozen=True)
class BlowupCenter:
    """Centre of the extraction: a quotient point of index r, or the Gorenstein locus."""

    kind: str
    alpha: Fraction
    r: Optional[int] = None

    def __post_init__(self):
        alpha = Fraction(self.alpha)
        object.__setattr__(self, "alpha", alpha)
        if self.kind == "quotient":
            if self.r is None or self.r < 2:
                raise LinkError("quotient centre needs an index r >= 2")
            ok = {Fraction(1, self.r)} | ({Fraction(2, 3)} if self.r == 3 else set())
            if alpha not in ok:
                raise LinkError(f"alpha={alpha} is not admissible at an index-{self.r} point")
        elif self.kind == "gorenstein":
            if self.r is not None:
                raise LinkError("Gorenstein centre has no index")
            if alpha.denominator != 1 or alpha < 1:
                raise LinkError("Gorenstein discrepancy must be a positive integer")
        else:
            raise LinkError(f"unknown centre kind {self.kind!r}")

    @classmethod
    def quotient(cls, r: int, alpha=None) -> "BlowupCenter":
        return cls("quotient", Fraction(1, r) if alpha is None else Fraction(alpha), r)

    @classmethod
    def gorenstein(cls, alpha=1) -> "BlowupCenter":
        return cls("gorenstein", Fraction(alpha))

    @classmethod
    def parse(cls, spec: str) -> "BlowupCenter":
        """``r=10``, ``r=3:alpha=2/3`` or ``gorenstein:1``."""
        spec = spec.strip()
        m = re.fullmatch(r"gorenstein(?::(\d+))?", spec)
        if m:
            return cls.gorenstein(int(m.group(1) or 1))
        m = re.fullmatch(r"r=(\d+)(?::alpha=(\d+/\d+|\d+))?", spec)
        if m:
            return cls.quotient(int(m.group(1)), m.group(2) and Fraction(m.group(2)))
        raise LinkError(f"bad centre spec {spec!r}")

    def __str__(self):
        if self.kind == "gorenstein":
            return f"gorenstein:{self.alpha}"
        if self.alpha == Fraction(1, self.r):
            return f"r={self.r}"
        return f"r={self.r}:alpha={self.alpha}"


@dataclass(frozen=True)
class Threshold:
    """Canonical threshold bound c <= 1/m (or c < 1/m if strict) for M = |k0 A|.

    ``r`` is the index of the point where M ~ -mK_X; None means the bound
    is the global assumption that (X, M) is not canonical (m = 1, strict).
    """

    k0: int
    m: int
    strict: bool = False
    r: Optional[int] = None


@dataclass(frozen=True)
class Caps:
    e: int = 12
    s: int = 40
    m: int = 12


@dataclass(frozen=True)
class LinkScenario:
    source: FanoCandidate
    center: BlowupCenter
    mobile_ks: tuple  # ((k, dim|kA|), ...)
    threshold: Threshold

    def __post_init__(self):
        q = self.source.q
        if self.center.kind == "quotient" and self.center.r not in self.source.indices:
            raise LinkError(f"no point of index {self.center.r} in the basket {self.source.indices}")
        t = self.threshold
        if t.r is not None:
            if t.r not in self.source.indices:
                raise LinkError(f"threshold point of index {t.r} not in the basket")
            if local_class(q, t.k0, t.r) != t.m:
                raise LinkError(f"m={t.m} differs from local_class({q}, {t.k0}, {t.r})")
        if not self.mobile_ks:
            raise LinkError("at least one k is required")

    @property
    def q(self) -> int:
        return self.source.q

    @property
    def ks(self) -> tuple:
        return tuple(k for k, _ in self.mobile_ks)

    def dim(self, k: int) -> int:
        return dict(self.mobile_ks)[k]

    def to_json(self) -> dict:
        t = self.threshold
        return {
            "source": {"q": self.q, "basket": str(self.source.basket), "a3": str(self.source.a3),
                       "no": self.source.number},
            "center": str(self.center),
            "alpha": str(self.center.alpha),
            "mobile": [{"k": k, "dim": d} for k, d in self.mobile_ks],
            "threshold": {"k0": t.k0, "m": t.m, "strict": t.strict, "r": t.r},
        }


@dataclass(frozen=True, order=True)
class LinkSolution:
    fiber_type: bool
    q_hat: int
    e: int
    records: tuple  # ((k, s_k, m_k), ...)
    betas: tuple = field(compare=False, default=())  # ((k, beta_k), ...)

    def s(self, k: int) -> int:
        return next(s for kk, s, _ in self.records if kk == k)

    def m(self, k: int) -> int:
        return next(m for kk, _, m in self.records if kk == k)

    def beta(self, k: int) -> Fraction:
        return dict(self.betas)[k]

    def project(self, *ks) -> tuple:
        return (self.q_hat, self.e) + tuple(self.s(k) for k in ks)

    def residue(self, scenario: LinkScenario, k: int) -> Fraction:
        """k q^ - q s_k - (q beta_k - k alpha) e (zero for valid solutions)."""
        q, a = scenario.q, scenario.center.alpha
        return k * self.q_hat - q * self.s(k) - (q * self.beta(k) - k * a) * self.e

    def to_json(self) -> dict:
        return {
            "q_hat": self.q_hat,
            "e": self.e,
            "fiber": self.fiber_type,
            "s": {str(k): s for k, s, _ in self.records},
            "m": {str(k): m for k, _, m in self.records},
            "beta": {str(k): str(b) for k, b in self.betas},
        }

    def __str__(self):
        kind = "fiber" if self.fiber_type else "birational"
        ss = ",".join(f"s{k}={s}" for k, s, _ in self.records)
        return f"{kind} q^={self.q_hat} e={self.e} {ss}"


# -- beta and threshold ----------------------------------------------------

def beta_fraction(q: int, k: int, r: int) -> Fraction:
    """Fractional part of beta_k for a Kawamata blowup of an index-r point."""
    return Fraction(local_class(q, k, r), r)


def beta_offset(q: int, k: int, center: BlowupCenter) -> Fraction:
    """beta_k mod 1: M_k ~ -cK_X locally gives beta_k = c*alpha mod 1."""
    if center.kind == "gorenstein":
        return Fraction(0)
    return (local_class(q, k, center.r) * center.alpha) % 1


@dataclass(frozen=True)
class ThresholdInequality:
    k: int
    bound: Fraction  # beta_k >= bound (or > when strict)
    strict: bool

    def holds(self, beta: Fraction) -> bool:
        return beta > self.bound if self.strict else beta >= self.bound

    def min_m(self, offset: Fraction) -> int:
        """Smallest m >= 0 with offset + m satisfying the inequality."""
        m = max(0, math.ceil(self.bound - offset))
        while not self.holds(offset + m):
            m += 1
        return m

    def __str__(self):
        return f"beta_{self.k} {'>' if self.strict else '>='} {self.bound}"


def threshold_constraints(scenario: LinkScenario) -> list:
    """beta_k0 >= m alpha, and beta_k >= (k/k0) m alpha for k | k0.

    c = alpha / beta_k0 <= 1/m gives the first bound.  For k dividing k0,
    (k0/k) M_k lies in M_k0, so beta_k0 <= (k0/k) beta_k.
    """
    t, a = scenario.threshold, scenario.center.alpha
    out = [ThresholdInequality(t.k0, t.m * a, t.strict)]
    for k in scenario.ks:
        if k != t.k0 and t.k0 % k == 0:
            out.append(ThresholdInequality(k, Fraction(k, t.k0) * t.m * a, t.strict))
    return out


# -- the master relation ---------------------------------------------------

def _m_min(scenario, k):
    off = beta_offset(scenario.q, k, scenario.center)
    lo = 0
    for ineq in threshold_constraints(scenario):
        if ineq.k == k:
            lo = max(lo, ineq.min_m(off))
    return lo


def solve_main_equation(scenario: LinkScenario, caps: Caps = Caps()) -> list:
    """All (q^, e, s_k, m_k) within caps solving the master relation for every k.

    Birational solutions have q^ in the allowed index set, fiber solutions
    q^ in {1, 2, 3}; q^ <= 3 is reported in both forms.
    """
    q, alpha = scenario.q, scenario.center.alpha
    targets = set(ALLOWED_Q) | set(FIBER_Q)
    offs = {k: beta_offset(q, k, scenario.center) for k in scenario.ks}
    mins = {k: _m_min(scenario, k) for k in scenario.ks}
    sols = []
    for e in range(1, caps.e + 1):
        options = []
        for k in scenario.ks:
            opt = {}
            for m in range(mins[k], caps.m + 1):
                beta = offs[k] + m
                for s in range(caps.s + 1):
                    qh = (q * s + (q * beta - k * alpha) * e) / k
                    if qh.denominator == 1 and qh.numerator in targets:
                        opt.setdefault(qh.numerator, []).append((s, m))
            options.append(opt)
        common = set.intersection(*(set(o) for o in options))
        for qh in sorted(common):
            for combo in product(*(o[qh] for o in options)):
                recs = tuple((k, s, m) for k, (s, m) in zip(scenario.ks, combo))
                betas = tuple((k, offs[k] + m) for k, (_, m) in zip(scenario.ks, combo))
                if qh in ALLOWED_Q:
                    sols.append(LinkSolution(False, qh, e, recs, betas))
                if qh in FIBER_Q:
                    sols.append(LinkSolution(True, qh, e, recs, betas))
    return sorted(sols)


def implied_q_hat(scenario: LinkScenario, k: int, s: int, m: int, e: int) -> Fraction:
    """q^ determined by the k-th relation for given (s_k, m_k, e)."""
    q, alpha = scenario.q, scenario.center.alpha
    beta = beta_offset(q, k, scenario.center) + m
    return (q * s + (q * beta - k * alpha) * e) / k


def q_hat_lower_bounds(scenario: LinkScenario) -> dict:
    """Smallest q^ each relation allows (s_k = 0, e = 1, minimal m_k)."""
    q, alpha = scenario.q, scenario.center.alpha
    out = {}
    for k in scenario.ks:
        beta = beta_offset(q, k, scenario.center) + _m_min(scenario, k)
        s0 = 1 if scenario.dim(k) >= 1 else 0
        out[k] = {"fiber": (q * beta - k * alpha) / k, "birational": (q * s0 + q * beta - k * alpha) / k}
    return out


# -- filters ----------------------------------------------------------------

@dataclass(frozen=True)
class Rejection:
    solution: LinkSolution
    filter: str
    detail: str

    def to_json(self) -> dict:
        return {"solution": self.solution.to_json(), "filter": self.filter, "detail": self.detail}


def _target_violations(sol: LinkSolution, scenario: LinkScenario, t: FanoCandidate) -> list:
    bad = []
    if t.dim(sol.e) < 0:
        bad.append(f"dim|{sol.e}Theta| = {t.dim(sol.e)} < 0 (E^ ~ {sol.e}Theta is effective)")
    for k, s, _ in sol.records:
        if s >= 1 and t.dim(s) < scenario.dim(k):
            bad.append(f"dim|{s}Theta| = {t.dim(s)} < dim|{k}A| = {scenario.dim(k)} (s_{k} = {s})")
    return bad


def target_dimension_filter(solutions, scenario: LinkScenario, tables: dict,
                            min_table_index: int = TABLE_MIN_INDEX):
    """Movability and target-table check.  Returns ``(kept, rejections)``."""
    kept, rejected = [], []
    for sol in solutions:
        if sol.fiber_type:
            kept.append(sol)
            continue
        fixed = [k for k, s, _ in sol.records if s == 0 and scenario.dim(k) >= 1]
        if fixed:
            k = fixed[0]
            rejected.append(Rejection(sol, "movability",
                                      f"s_{k} = 0 but dim|{k}A| = {scenario.dim(k)} >= 1"))
            continue
        if sol.q_hat < min_table_index:
            kept.append(sol)
            continue
        if sol.q_hat not in tables:
            raise MissingTargetTable(f"no candidate table for index {sol.q_hat}")
        reasons = []
        for t in tables[sol.q_hat]:
            bad = _target_violations(sol, scenario, t)
            if not bad:
                break
            reasons.append(f"[{t.basket}] " + "; ".join(bad))
        else:
            detail = "; ".join(reasons) if reasons else f"no candidate of index {sol.q_hat}"
            rejected.append(Rejection(sol, "target-dimension", f"q^={sol.q_hat}: {detail}"))
            continue
        kept.append(sol)
    return kept, rejected


def _s1_zero(sol, scenario):
    return 1 in scenario.ks and sol.s(1) == 0


def torsion_filter(solutions, scenario: LinkScenario):
    """s_1 = 0 (M_1 contracted) makes Cl(X^) torsion free with e = 1."""
    kept, rejected = [], []
    for sol in solutions:
        if not sol.fiber_type and _s1_zero(sol, scenario) and sol.e != 1:
            rejected.append(Rejection(sol, "torsion", f"s_1 = 0 forces e = 1, got e = {sol.e}"))
        else:
            kept.append(sol)
    return kept, rejected


def high_dim_filter(solutions, scenario: LinkScenario, max_q: int = HIGH_DIM_MAX_Q):
    """s_k = 1 with dim|kA| >= 3 needs dim|Theta| >= 3, impossible for q^ > max_q."""
    kept, rejected = [], []
    for sol in solutions:
        torsion_free = sol.q_hat >= TABLE_MIN_INDEX or _s1_zero(sol, scenario)
        hit = [k for k, s, _ in sol.records if s == 1 and scenario.dim(k) >= 3]
        if not sol.fiber_type and torsion_free and sol.q_hat > max_q and hit:
            k = hit[0]
            rejected.append(Rejection(sol, "high-dim", f"s_{k} = 1 gives dim|Theta| >= "
                                      f"dim|{k}A| = {scenario.dim(k)} >= 3, needs q^ <= {max_q}"))
        else:
            kept.append(sol)
    return kept, rejected


# -- birational relations --------------------------------------------------

@dataclass(frozen=True)
class BirationalRelations:
    b: Fraction
    delta: Fraction
    gamma: tuple  # ((k, gamma_k), ...)
    d: int
    n: Optional[int]
    integral: bool

    def gamma_k(self, k: int) -> Fraction:
        return dict(self.gamma)[k]


def birational_relations(q: int, q_hat: int, e: int, d: int, s: dict, delta) -> BirationalRelations:
    """Solve -eq = (be - q^ delta) d and -s_k q + k q^ = (b s_k - q^ gamma_k) d.

    ``integral`` is False when b, delta or some gamma_k is not an integer,
    which rules out contracting F to a smooth point.
    """
    if e < 1 or d < 1:
        raise LinkError("need e >= 1 and d >= 1")
    delta = Fraction(delta)
    b = (q_hat * delta - Fraction(e * q, d)) / e
    gamma = tuple((k, (b * sk - Fraction(k * q_hat - sk * q, d)) / q_hat) for k, sk in sorted(s.items()))
    vals = [b, delta] + [g for _, g in gamma]
    n = d // e if d % e == 0 else None
    return BirationalRelations(b, delta, gamma, d, n, all(v.denominator == 1 for v in vals))


def relations_in_delta(q: int, q_hat: int, e: int, s: dict) -> dict:
    """Torsion-free case d = e: b and gamma_k as (slope, intercept) in delta."""
    out = {"b": (Fraction(q_hat, e), Fraction(-q, e))}
    for k, sk in sorted(s.items()):
        out[f"gamma_{k}"] = (Fraction(sk, e), Fraction(-k, e))
    return out


def torsion_structure(d: int, e: int) -> int:
    """Order n of the torsion of Cl(X^), d = n e."""
    if e < 1 or d % e:
        raise LinkError(f"e={e} does not divide d={d}")
    return d // e


def difficulty_prune(source_difficulty: int, q_hat: int, e: int, q: int, base: int) -> list:
    """All delta >= 1 with base + (q^ delta - q)/e <= source_difficulty.

    The difficulty strictly drops under the link, so the new points
    (contributing b = w1 + w2 on top of ``base``) must fit in the old one.
    """
    if source_difficulty <= 0:
        return []
    out = []
    delta = 1
    while base + Fraction(q_hat * delta - q, e) <= source_difficulty:
        out.append(delta)
        delta += 1
    return out


def weights_for_discrepancy(b: int) -> list:
    """Coprime weight pairs (w1 <= w2) with w1 + w2 = b."""
    return [(w, b - w) for w in range(1, b // 2 + 1) if math.gcd(w, b - w) == 1]


# -- case analysis ---------------------------------------------------------

@lru_cache(maxsize=None)
def _tables(qs: tuple, cfg: FilterConfig) -> dict:
    return {q: tuple(enumerate_candidates(q, cfg)) for q in qs}


def target_tables(min_index: int = TABLE_MIN_INDEX, cfg: FilterConfig = FilterConfig()) -> dict:
    """Enumerated candidates for every allowed index >= min_index."""
    return _tables(tuple(sorted(q for q in ALLOWED_Q if q >= min_index)), cfg)


# ks and thresholds for the three q = 7 cases analysed in detail
_CASE_DEFAULTS = {
    (2, 3, 3, 11): ((1, 2), Threshold(2, 5, False, 11)),
    (2, 2, 5, 10): ((1, 2, 3), Threshold(3, 9, False, 10)),
    (2, 3, 3, 4): ((1, 3), Threshold(3, 1, True, None)),
}


def case_defaults(source: FanoCandidate):
    """Default (ks, threshold) for a source candidate."""
    if source.q == 7 and source.indices in _CASE_DEFAULTS:
        return _CASE_DEFAULTS[source.indices]
    mobile = [k for k in range(1, source.q + 1) if source.dim(k) >= 1]
    k0 = mobile[0] if mobile else 1
    return ((k0,), Threshold(k0, 1, True, None))


def make_scenario(source, center, ks=None, threshold=None) -> LinkScenario:
    dks, dth = case_defaults(source)
    ks = tuple(ks) if ks is not None else dks
    threshold = threshold or dth
    return LinkScenario(source, center, tuple((k, source.dim(k)) for k in ks), threshold)


@dataclass
class CaseReport:
    scenario: LinkScenario
    raw_solutions: list
    eliminations: list
    survivors: list
    stages: dict  # stage name -> solutions remaining after it
    notes: list

    def after(self, stage: str) -> list:
        return self.stages[stage]

    def to_json(self) -> dict:
        return {
            "scenario": self.scenario.to_json(),
            "raw_solutions": [s.to_json() for s in self.raw_solutions],
            "eliminations": [r.to_json() for r in self.eliminations],
            "survivors": [dict(s.to_json(), status=FEASIBLE) for s in self.survivors],
            "notes": list(self.notes),
        }


def analyze_case(source: FanoCandidate, center: BlowupCenter, tables: Optional[dict] = None,
                 ks=None, threshold: Optional[Threshold] = None, caps: Caps = Caps(),
                 min_table_index: int = TABLE_MIN_INDEX) -> CaseReport:
    scenario = make_scenario(source, center, ks, threshold)
    if tables is None:
        tables = target_tables(min_table_index)
    raw = solve_main_equation(scenario, caps)
    stages = {"raw": raw}
    elim = []
    cur, rej = target_dimension_filter(raw, scenario, tables, min_table_index)
    stages["target-dimension"] = cur
    elim += rej
    cur, rej = torsion_filter(cur, scenario)
    stages["torsion"] = cur
    elim += rej
    cur, rej = high_dim_filter(cur, scenario)
    stages["high-dim"] = cur
    elim += rej
    notes = [str(ineq) for ineq in threshold_constraints(scenario)]
    if not raw:
        for k, b in q_hat_lower_bounds(scenario).items():
            notes.append(f"k={k}: q^ >= {b['birational']} (birational), "
                         f"q^ >= {b['fiber']} (fiber); no admissible value within caps")
    if any(s.fiber_type for s in cur):
        notes.append("fiber branch: q^ <= 2 if the base is a surface")
    return CaseReport(scenario, raw, elim, cur, stages, notes)
