"""Enumeration of numerical Q-Fano threefold candidates of a given index.

A candidate is a triple (q, decorated basket, A^3) such that chi(kA) is an
integer for every k, together with the filters collected in FilterConfig.
Baskets are searched depth-first over multisets of points 1/r(1, a, r-a)
with gcd(r, q) = 1 and sum (r - 1/r) < 24.

Two filters beyond the minimal ladder are enabled by default, because
without them the q = 7 search does not reproduce the reference table:

* ``require_vanishing``: chi(-tA) = 0 for 0 < t < q (Kawamata-Viehweg
  vanishing, since -tA - K = (q - t)A is ample).  For q >= 3 the case t = 1
  determines A^3 uniquely.
* ``require_bogomolov_kawamata``: (4q^2 - 3q) A^3 <= 4q A.c2, Kawamata's
  Bogomolov-type bound for Q-Fano threefolds with Cl = Z A.
"""
from __future__ import annotations

import importlib.resources
import json
import math
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .basket import Basket, QuotientPoint, gorenstein_index, kawamata_sum
from .rr import FanoNumerics, _contribution, _evaluator, genus as _genus, linear_system_dim

__all__ = [
    "ALLOWED_Q",
    "STATUSES",
    "FilterConfig",
    "FanoCandidate",
    "StatusError",
    "allowed_q_values",
    "quotient_points",
    "iter_baskets",
    "admissible_degrees",
    "enumerate_candidates",
    "load_status_table",
    "attach_status",
    "high_dim_survey",
    "candidate_to_json",
]

ALLOWED_Q = frozenset({1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 13, 17, 19})
STATUSES = ("exists-and-classified", "exists", "excluded", "open")
MAX_INDEX = 24
ASSET_NAME = "table_q7.json"


def allowed_q_values() -> frozenset:
    """Fano indices realised by Q-Fano threefolds."""
    return ALLOWED_Q


@dataclass(frozen=True)
class FilterConfig:
    max_anticanonical_cube: Fraction = Fraction(100)
    integrality_scan_multiplier: int = 12
    require_nonneg: bool = True
    require_monotone_when_effective: bool = True
    require_vanishing: bool = True
    require_bogomolov_kawamata: bool = True

    def __post_init__(self):
        object.__setattr__(self, "max_anticanonical_cube", Fraction(self.max_anticanonical_cube))
        if self.max_anticanonical_cube <= 0 or self.integrality_scan_multiplier <= 0:
            raise ValueError("filter bounds must be positive")


@dataclass(frozen=True)
class FanoCandidate:
    numerics: FanoNumerics
    genus: int
    dims: tuple
    status: Optional[str] = None
    note: str = ""
    decorations: tuple = ()
    number: Optional[int] = None

    @property
    def q(self) -> int:
        return self.numerics.q

    @property
    def a3(self) -> Fraction:
        return self.numerics.degree_a3

    @property
    def basket(self) -> Basket:
        return self.numerics.basket

    @property
    def indices(self) -> tuple:
        return self.numerics.basket.indices

    def dim(self, k: int) -> int:
        """dim|kA| for any k >= 0 (recomputed past the stored range)."""
        if 1 <= k <= len(self.dims):
            return self.dims[k - 1]
        return linear_system_dim(self.numerics, k)

    def key(self):
        return (self.q, self.indices, self.a3)


def _make_candidate(fn: FanoNumerics) -> FanoCandidate:
    dims = tuple(linear_system_dim(fn, k) for k in range(1, fn.q + 1))
    return FanoCandidate(fn, dims[-1] - 1, dims, decorations=(fn.basket,))


# -- basket search -------------------------------------------------------

def quotient_points(q: int, max_r: int = MAX_INDEX) -> list:
    """All point types 1/r(1,a,r-a) with gcd(r, q) = 1, ordered by (r, a)."""
    return [QuotientPoint(r, a)
            for r in range(2, max_r + 1) if math.gcd(r, q) == 1
            for a in range(1, r // 2 + 1) if math.gcd(a, r) == 1]


def iter_baskets(q: int):
    """Every decorated basket with sum (r - 1/r) < 24 and gcd(r, q) = 1."""
    pts = quotient_points(q)
    weights = [Fraction(p.r * p.r - 1, p.r) for p in pts]

    def rec(start, chosen, total):
        yield Basket(chosen)
        for i in range(start, len(pts)):
            t = total + weights[i]
            if t < 24:
                yield from rec(i, chosen + [pts[i]], t)

    yield from rec(0, [], Fraction(0))


def _vanishing_data(q, pts):
    """Per-point vectors u_P(t), t = 1..q-1, with chi(-tA) = 1 - 2t/q + c_t A^3 + sum u_P(t)."""
    out = []
    for p in pts:
        w = Fraction(p.r * p.r - 1, p.r)
        qi = pow(q, -1, p.r)
        out.append(tuple(t * w / (12 * q) + _contribution(p.r, p.a, (t * qi) % p.r)
                         for t in range(1, q)))
    return out


def _cubic(q, k):
    return Fraction(k * (k + q) * (2 * k + q), 12)


def _vanishing_a3(q: int, U) -> Optional[Fraction]:
    """A^3 forced by chi(-tA) = 0 for 0 < t < q, or None (q >= 3 only)."""
    c1 = _cubic(q, -1)
    a3 = -(1 - Fraction(2, q) + U[0]) / c1
    if a3 <= 0:
        return None
    for t in range(2, q):
        if 1 - Fraction(2 * t, q) + U[t - 1] + _cubic(q, -t) * a3 != 0:
            return None
    return a3


def _affine_chi(q, b, k):
    """chi(kA) = alpha + c * A^3 as a pair (alpha, c)."""
    ac2 = (24 - kawamata_sum(b)) / q
    alpha = 1 + k * ac2 / 12
    for p in b:
        alpha += _contribution(p.r, p.a, (-k * pow(q, -1, p.r)) % p.r)
    return alpha, _cubic(q, k)


def _solve_linear(a, b, m):
    """Solutions of a*n = b (mod m) as (residue, modulus), or None."""
    g = math.gcd(a, m)
    if b % g:
        return None
    m2 = m // g
    if m2 == 1:
        return (0, 1)
    return ((b // g) * pow(a // g, -1, m2) % m2, m2)


def _merge(c1, c2):
    (r1, m1), (r2, m2) = c1, c2
    g = math.gcd(m1, m2)
    if (r2 - r1) % g:
        return None
    l = m1 // g * m2
    if m2 // g == 1:
        return (r1 % l, l)
    t = ((r2 - r1) // g) * pow(m1 // g, -1, m2 // g) % (m2 // g)
    return ((r1 + m1 * t) % l, l)


def _congruence_degrees(q, b, n_max, N):
    """Numerators n in [1, n_max] passing chi(kA) in Z for small k."""
    cong = (0, 1)
    for k in range(-q - 1, N + q + 1):
        alpha, c = _affine_chi(q, b, k)
        x = c / N
        L = math.lcm(x.denominator, alpha.denominator)
        a = x.numerator * (L // x.denominator) % L
        rhs = -alpha.numerator * (L // alpha.denominator) % L
        sol = _solve_linear(a, rhs, L)
        if sol is None:
            return []
        cong = _merge(cong, sol)
        if cong is None:
            return []
    r, m = cong
    start = r if r > 0 else m
    return list(range(start, n_max + 1, m))


def _degree_ok(q, a3, cfg):
    return q ** 3 * a3 <= cfg.max_anticanonical_cube


def admissible_degrees(q: int, b: Basket, cfg: FilterConfig = FilterConfig()) -> list:
    """A^3 = n/N in (0, bound] with chi(kA) integral over the scan range.

    With ``cfg.require_vanishing`` the values must also satisfy
    chi(-tA) = 0 for 0 < t < q.
    """
    if not b.decorated:
        raise ValueError("admissible_degrees needs a decorated basket")
    for p in b:
        if math.gcd(p.r, q) != 1:
            raise ValueError(f"gcd(r={p.r}, q={q}) != 1")
    if not kawamata_sum(b) < 24:
        raise ValueError("basket violates sum (r - 1/r) < 24")
    N = gorenstein_index(b)
    if cfg.require_vanishing and q >= 3:
        U = [sum(col, Fraction(0)) for col in zip(*_vanishing_data(q, b))] or [Fraction(0)] * (q - 1)
        a3 = _vanishing_a3(q, U)
        if a3 is None or (a3 * N).denominator != 1 or not _degree_ok(q, a3, cfg):
            return []
        fn = FanoNumerics(q, b, a3)
        return [a3] if fn.is_integral(cfg.integrality_scan_multiplier) else []
    if cfg.require_vanishing:
        for t in range(1, q):
            alpha, c = _affine_chi(q, b, -t)
            if c != 0 or alpha != 0:  # for q = 2, c_{-1} = 0
                return []
    n_max = math.floor(cfg.max_anticanonical_cube * N / q ** 3)
    out = []
    for n in _congruence_degrees(q, b, n_max, N):
        fn = FanoNumerics(q, b, Fraction(n, N))
        if fn.is_integral(cfg.integrality_scan_multiplier):
            out.append(fn.degree_a3)
    return out


def _passes_filters(fn: FanoNumerics, cfg: FilterConfig) -> bool:
    q, N = fn.q, fn.gorenstein_index
    if cfg.require_bogomolov_kawamata:
        ac2 = (24 - kawamata_sum(fn.basket)) / q
        if (4 * q * q - 3 * q) * fn.degree_a3 > 4 * q * ac2:
            return False
    horizon = range(0, 2 * q + N + 1)
    chis = [fn.chi(k) for k in horizon]
    if cfg.require_nonneg and any(c < 0 for c in chis):
        return False
    if cfg.require_monotone_when_effective and chis[1] >= 1:
        if any(x > y for x, y in zip(chis, chis[1:])):
            return False
    return True


def _raw_numerics(q: int, cfg: FilterConfig):
    """Stream of FanoNumerics passing integrality and all filters."""
    if cfg.require_vanishing and q >= 3:
        yield from _raw_numerics_vanishing(q, cfg)
        return
    for b in iter_baskets(q):
        for a3 in admissible_degrees(q, b, cfg):
            fn = FanoNumerics(q, b, a3)
            if _passes_filters(fn, cfg):
                yield fn


def _raw_numerics_vanishing(q: int, cfg: FilterConfig):
    pts = quotient_points(q)
    weights = [Fraction(p.r * p.r - 1, p.r) for p in pts]
    vec = _vanishing_data(q, pts)
    zero = (Fraction(0),) * (q - 1)

    def rec(start, chosen, total, U, N):
        a3 = _vanishing_a3(q, U)
        if a3 is not None and (a3 * N).denominator == 1 and _degree_ok(q, a3, cfg):
            fn = FanoNumerics(q, Basket(chosen), a3)
            if fn.is_integral(cfg.integrality_scan_multiplier) and _passes_filters(fn, cfg):
                yield fn
        for i in range(start, len(pts)):
            t = total + weights[i]
            if t < 24:
                U2 = tuple(x + y for x, y in zip(U, vec[i]))
                yield from rec(i, chosen + [pts[i]], t, U2, math.lcm(N, pts[i].r))

    yield from rec(0, [], Fraction(0), zero, 1)


def _order_key(c: FanoCandidate):
    return (-c.genus, -len(c.indices), c.indices, c.a3,
            tuple(tuple(p.sort_key() for p in d) for d in c.decorations))


def enumerate_candidates(q: int, cfg: FilterConfig = FilterConfig()) -> list:
    """All numerical candidates of index q, in canonical order.

    Canonical order: genus descending, then number of basket points
    descending, then index multiset, then A^3.  Decorations of one index
    multiset giving identical (A^3, dims) are merged into one candidate.
    """
    if q < 1:
        raise ValueError("q must be positive")
    merged = {}
    for fn in _raw_numerics(q, cfg):
        c = _make_candidate(fn)
        k = (c.indices, c.a3, c.dims)
        if k in merged:
            old = merged[k]
            decs = tuple(sorted(set(old.decorations + c.decorations),
                                key=lambda d: tuple(p.sort_key() for p in d)))
            merged[k] = replace(old, numerics=FanoNumerics(q, decs[0], old.a3), decorations=decs)
        else:
            merged[k] = c
    return sorted(merged.values(), key=_order_key)


# -- status asset --------------------------------------------------------

class StatusError(ValueError):
    pass


def _asset_path() -> Path:
    env = os.environ.get("FANO_DATA_DIR")
    if env:
        return Path(env) / ASSET_NAME
    return Path(str(importlib.resources.files("qfano") / "data" / ASSET_NAME))


def load_status_table(path=None) -> dict:
    path = Path(path) if path is not None else _asset_path()
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    for row in doc["rows"]:
        if row["status"] not in STATUSES:
            raise StatusError(f"unknown status {row['status']!r} in row {row.get('no')}")
    return doc


def _asset_key(q, row):
    return (q, tuple(sorted(row["indices"])), Fraction(row["a3"]))


def attach_status(candidates, asset: dict):
    """Merge status rows into candidates.

    Returns ``(candidates, unmatched_rows)``.  Raises StatusError if a key
    occurs twice among the rows or among the candidates.
    """
    q = asset.get("q")
    rows = {}
    for row in asset["rows"]:
        k = _asset_key(row.get("q", q), row)
        if k in rows:
            raise StatusError(f"ambiguous asset key {k}")
        rows[k] = row
    seen = set()
    out = []
    for c in candidates:
        k = c.key()
        if k in seen:
            raise StatusError(f"ambiguous candidate key {k}")
        seen.add(k)
        row = rows.get(k)
        if row is not None:
            c = replace(c, status=row["status"], note=row.get("ref", ""), number=row.get("no"))
        out.append(c)
    unmatched = [row for k, row in rows.items() if k not in seen]
    return out, unmatched


# -- survey --------------------------------------------------------------

def high_dim_survey(qs, threshold: int, cfg: FilterConfig = FilterConfig()) -> dict:
    """Per-q count and minimal genus of candidates with dim|A| >= threshold."""
    if threshold < 0:
        raise ValueError("threshold must be non-negative")
    report = {}
    for q in qs:
        hits = [c for c in enumerate_candidates(q, cfg) if c.dims[0] >= threshold]
        report[q] = {
            "count": len(hits),
            "min_genus": min((c.genus for c in hits), default=None),
            "baskets": [str(c.basket) for c in hits],
        }
    return report


def candidate_to_json(c: FanoCandidate) -> dict:
    return {
        "no": c.number,
        "q": c.q,
        "indices": list(c.indices),
        "basket": str(c.basket),
        "decorations": [str(d) for d in c.decorations],
        "a3": str(c.a3),
        "genus": c.genus,
        "dims": list(c.dims),
        "status": c.status,
        "ref": c.note,
    }
