"""Orbifold Riemann-Roch for a numerical Fano triple (q, basket, A^3).

    chi(kA) = 1 + k(k+q)(2k+q) A^3 / 12 + k (A.c2) / 12 + sum_P c_P(kA)

with A.c2 = (24 - sum_P (r - 1/r)) / q.

Convention for the local correction (pinned by chi(O) = 1, chi(K) = -1 and
the published dim|kA| tables; see tests/test_rr.py):

* A point 1/r(1, a, r-a) is rewritten as 1/r(1, -1, b) with b = a^{-1} mod r
  (multiply the weights by a^{-1} and reorder).
* A divisor D with D ~ iK_X near P contributes
      c_P(i) = -i (r^2 - 1) / (12 r) + sum_{j=1}^{i-1} bj (r - bj) / (2 r),
  where bj means (b*j mod r).
* kA ~ -mK_X near P with m = local_class(q, k, r) = k q^{-1} mod r, so the
  index fed to c_P is i = -m mod r.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .basket import Basket, QuotientPoint, fill_unique_decorations, gorenstein_index, kawamata_sum

__all__ = [
    "RRError",
    "FanoNumerics",
    "C2Data",
    "local_class",
    "point_contribution",
    "euler_characteristic",
    "anticanonical_c2",
    "linear_system_dim",
    "genus",
    "dim_table",
]


class RRError(ValueError):
    pass


def local_class(q: int, k: int, r: int) -> int:
    """The m in [0, r) with kA ~ -mK near a point of index r (q m = k mod r)."""
    if math.gcd(q, r) != 1:
        raise RRError(f"q={q} is not invertible modulo r={r}")
    return (k * pow(q, -1, r)) % r


@lru_cache(maxsize=None)
def _contribution(r: int, a: int, i: int) -> Fraction:
    b = pow(a, -1, r)
    s = Fraction(-i * (r * r - 1), 12 * r)
    for j in range(1, i):
        x = (b * j) % r
        s += Fraction(x * (r - x), 2 * r)
    return s


def point_contribution(p: QuotientPoint, cls: int) -> Fraction:
    """Correction c_P(D) for D ~ cls*K_X near the point ``p``; periodic in cls."""
    if not p.decorated:
        raise RRError(f"point {p} is not decorated")
    return _contribution(p.r, p.a, cls % p.r)


class C2Data(NamedTuple):
    value: Fraction  # (-K).c2
    per_a: Fraction  # A.c2
    positive: bool


def anticanonical_c2(q: int, b: Basket) -> C2Data:
    """(-K).c2 = 24 - sum (r - 1/r), together with A.c2 and its positivity."""
    v = 24 - kawamata_sum(b)
    return C2Data(v, v / q, v > 0)


@dataclass(frozen=True)
class FanoNumerics:
    q: int
    basket: Basket
    degree_a3: Fraction

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 1:
            raise RRError(f"index must be a positive integer, got {self.q!r}")
        object.__setattr__(self, "basket", fill_unique_decorations(self.basket))
        if not self.basket.decorated:
            raise RRError("Riemann-Roch needs a decorated basket")
        a3 = Fraction(self.degree_a3)
        object.__setattr__(self, "degree_a3", a3)
        if a3 <= 0:
            raise RRError("A^3 must be positive")
        for p in self.basket:
            if math.gcd(p.r, self.q) != 1:
                raise RRError(f"gcd(r={p.r}, q={self.q}) != 1")
        if (a3 * gorenstein_index(self.basket)).denominator != 1:
            raise RRError(f"A^3 = {a3} is not a multiple of 1/N")

    @property
    def gorenstein_index(self) -> int:
        return gorenstein_index(self.basket)

    def chi(self, k: int) -> Fraction:
        return euler_characteristic(self, k)

    def scan_range(self, multiplier: int = 12) -> range:
        n = 12 * self.gorenstein_index * multiplier
        return range(-n, n + 1)

    def is_integral(self, multiplier: int = 12) -> bool:
        """Integrality certificate: chi(kA) in Z for k in [-12Nm, 12Nm]."""
        return _evaluator(self).integral_on(self.scan_range(multiplier))


class _Evaluator:
    """chi(kA) = P(k) / D with P integer-valued; used for fast scans."""

    __slots__ = ("q", "D", "cub", "lin", "N", "corr")

    def __init__(self, fn: FanoNumerics):
        q, a3, b = fn.q, fn.degree_a3, fn.basket
        N = gorenstein_index(b)
        D = 12 * q * N * a3.denominator
        self.q, self.D, self.N = q, D, N
        self.cub = a3.numerator * q * N
        C = (24 - kawamata_sum(b)) * N
        assert C.denominator == 1
        self.lin = C.numerator * a3.denominator
        corr = [D] * N
        for p in b:
            qi = pow(q, -1, p.r)
            for k in range(N):
                v = _contribution(p.r, p.a, (-k * qi) % p.r) * D
                corr[k] += v.numerator  # D * c_P is integral
        self.corr = corr

    def numerator(self, k: int) -> int:
        q = self.q
        return k * (k + q) * (2 * k + q) * self.cub + k * self.lin + self.corr[k % self.N]

    def chi(self, k: int) -> Fraction:
        return Fraction(self.numerator(k), self.D)

    def integral_on(self, ks) -> bool:
        D, num = self.D, self.numerator
        return all(num(k) % D == 0 for k in ks)


@lru_cache(maxsize=4096)
def _evaluator(fn: FanoNumerics) -> _Evaluator:
    return _Evaluator(fn)


def euler_characteristic(fn: FanoNumerics, k: int) -> Fraction:
    return _evaluator(fn).chi(k)


def linear_system_dim(fn: FanoNumerics, k: int) -> int:
    """dim|kA| = chi(kA) - 1 for k >= 0 (-1 means the system is empty)."""
    if k < 0:
        raise RRError("dim|kA| is only computed for k >= 0")
    c = euler_characteristic(fn, k)
    if c.denominator != 1:
        raise RRError(f"chi({k}A) = {c} is not an integer")
    return c.numerator - 1


def dim_table(fn: FanoNumerics, ks) -> list:
    return [linear_system_dim(fn, k) for k in ks]


def genus(fn: FanoNumerics) -> int:
    """g = dim|-K| - 1."""
    return linear_system_dim(fn, fn.q) - 1
