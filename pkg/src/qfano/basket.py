"""Terminal cyclic quotient points and baskets.

A point of type 1/r(1, a, r-a) is stored as ``QuotientPoint(r, a)`` with
``a <= r - a``.  Table-style baskets often list indices only; such points
carry ``a = None`` and the basket is then *undecorated*.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

__all__ = [
    "BasketError",
    "QuotientPoint",
    "Basket",
    "parse_basket",
    "format_basket",
    "basket_to_json",
    "basket_from_json",
    "kawamata_sum",
    "kawamata_ok",
    "shokurov_difficulty",
    "torsion_obstruction",
    "gorenstein_index",
    "kawamata_blowup_transform",
    "fill_unique_decorations",
]

KAWAMATA_BOUND = 24
TORSION_BOUND = 16


class BasketError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class QuotientPoint:
    r: int
    a: Optional[int] = None

    def __post_init__(self):
        if not isinstance(self.r, int) or self.r < 2:
            raise BasketError(f"index must be an integer >= 2, got {self.r!r}")
        if self.a is not None:
            a = self.a % self.r
            if math.gcd(a, self.r) != 1:
                raise BasketError(f"weight {self.a} is not coprime to {self.r}")
            object.__setattr__(self, "a", min(a, self.r - a))

    @property
    def decorated(self) -> bool:
        return self.a is not None

    def sort_key(self):
        return (self.r, 0 if self.a is None else self.a)

    def __str__(self):
        return str(self.r) if self.a is None else f"{self.r}:{self.a}"


class Basket:
    """Immutable multiset of quotient points, kept sorted by (r, a)."""

    __slots__ = ("_points",)

    def __init__(self, points: Iterable[QuotientPoint] = ()):
        pts = []
        for p in points:
            if isinstance(p, int):
                p = QuotientPoint(p)
            elif isinstance(p, tuple):
                p = QuotientPoint(*p)
            pts.append(p)
        self._points = tuple(sorted(pts, key=QuotientPoint.sort_key))

    @property
    def points(self) -> tuple:
        return self._points

    @property
    def decorated(self) -> bool:
        return all(p.decorated for p in self._points)

    @property
    def indices(self) -> tuple:
        return tuple(sorted(p.r for p in self._points))

    def __iter__(self):
        return iter(self._points)

    def __len__(self):
        return len(self._points)

    def __contains__(self, p):
        return p in self._points

    def __eq__(self, other):
        return isinstance(other, Basket) and self._points == other._points

    def __hash__(self):
        return hash(self._points)

    def __add__(self, other: "Basket") -> "Basket":
        return Basket(self._points + tuple(other))

    def __repr__(self):
        return f"Basket({format_basket(self)!r})"

    def __str__(self):
        return format_basket(self)

    def undecorated(self) -> "Basket":
        return Basket(QuotientPoint(p.r) for p in self._points)

    def remove(self, p: QuotientPoint) -> "Basket":
        pts = list(self._points)
        try:
            pts.remove(p)
        except ValueError:
            raise BasketError(f"point {p} not in basket {self}") from None
        return Basket(pts)


_ITEM = re.compile(r"^(\d+)(?::(\d+))?(?:\^(\d+))?$")


def parse_basket(text: str) -> Basket:
    """Parse ``"2^4,5,12"`` or ``"2,3:1,10:3"``; the empty string is the empty basket."""
    text = text.strip().strip("()[]{}")
    if not text.strip():
        return Basket()
    pts = []
    for item in text.split(","):
        m = _ITEM.match(item.strip())
        if not m:
            raise BasketError(f"malformed basket item {item!r}")
        r = int(m.group(1))
        a = int(m.group(2)) if m.group(2) is not None else None
        mult = int(m.group(3)) if m.group(3) is not None else 1
        if mult < 1:
            raise BasketError(f"multiplicity must be positive in {item!r}")
        pts.extend([QuotientPoint(r, a)] * mult)
    return Basket(pts)


def format_basket(b: Basket) -> str:
    """Canonical compact form, grouping repeated points as ``r^k``."""
    out = []
    pts = list(b)
    i = 0
    while i < len(pts):
        j = i
        while j < len(pts) and pts[j] == pts[i]:
            j += 1
        s = str(pts[i])
        out.append(s if j - i == 1 else f"{s}^{j - i}")
        i = j
    return ",".join(out)


def basket_to_json(b: Basket) -> dict:
    pts = []
    for p in b:
        d = {"r": p.r}
        if p.a is not None:
            d["a"] = p.a
        pts.append(d)
    return {"points": pts}


def basket_from_json(obj) -> Basket:
    if isinstance(obj, str):
        obj = json.loads(obj)
    try:
        return Basket(QuotientPoint(int(d["r"]), d.get("a")) for d in obj["points"])
    except (KeyError, TypeError) as exc:
        raise BasketError(f"bad basket JSON: {obj!r}") from exc


def kawamata_sum(b: Basket) -> Fraction:
    """Sum of r - 1/r over the basket."""
    return sum((Fraction(p.r * p.r - 1, p.r) for p in b), Fraction(0))


def kawamata_ok(b: Basket) -> bool:
    """Strict positivity of -K.c2, i.e. kawamata_sum < 24."""
    return kawamata_sum(b) < KAWAMATA_BOUND


def shokurov_difficulty(b: Basket) -> int:
    return sum(p.r - 1 for p in b)


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, math.isqrt(n) + 1))


def torsion_obstruction(b: Basket, n: int) -> bool:
    """True when n-torsion in the class group is numerically possible.

    This needs the indices divisible by n to add up to at least 16.
    Only primes n <= 7 are accepted.
    """
    if not _is_prime(n) or n > 7:
        raise BasketError(f"n must be a prime <= 7, got {n}")
    return sum(p.r for p in b if p.r % n == 0) >= TORSION_BOUND


def gorenstein_index(b: Basket) -> int:
    return math.lcm(1, *(p.r for p in b))


def kawamata_blowup_transform(b: Basket, target: QuotientPoint) -> Basket:
    """Basket after the weighted (1, a, r-a) blowup of ``target``.

    The point is replaced by index-only points of indices a and r-a;
    index-1 entries are smooth and dropped.
    """
    if not target.decorated:
        raise BasketError("blowup centre must be decorated")
    rest = b.remove(target)
    new = [QuotientPoint(i) for i in (target.a, target.r - target.a) if i > 1]
    return Basket(rest.points + tuple(new))


def fill_unique_decorations(b: Basket) -> Basket:
    """Decorate index-only points whose type is forced (r in {2, 3, 4, 6})."""
    pts = []
    for p in b:
        if p.a is None:
            choices = [a for a in range(1, p.r // 2 + 1) if math.gcd(a, p.r) == 1]
            if len(choices) == 1:
                p = QuotientPoint(p.r, choices[0])
        pts.append(p)
    return Basket(pts)
