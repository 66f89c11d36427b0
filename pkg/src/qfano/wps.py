"""Weighted projective spaces and quasi-homogeneous hypersurfaces.

``WeightedHypersurface(weights, degree, monomials)`` is the hypersurface of
the given degree in P(weights); degree 0 stands for the ambient space.
Monomials are exponent vectors.  Singularity types in the registry are
carried as annotations and are not computed here.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional

__all__ = [
    "WPSError",
    "WeightedHypersurface",
    "NormalForm",
    "TheoremModel",
    "form_invariants",
    "verify_form",
    "fano_index",
    "degree_a3",
    "verify_candidate",
    "surface_adjunction",
    "stratum_membership",
    "monomials_of_degree",
    "normal_form_registry",
    "theorem_models",
    "registry_to_json",
    "registry_from_json",
]


class WPSError(ValueError):
    pass


@dataclass(frozen=True)
class WeightedHypersurface:
    weights: tuple
    degree: int = 0
    monomials: Optional[tuple] = None

    def __post_init__(self):
        w = tuple(int(x) for x in self.weights)
        object.__setattr__(self, "weights", w)
        if not w or any(x < 1 for x in w):
            raise WPSError("weights must be positive integers")
        if math.gcd(*w) != 1:
            raise WPSError(f"weights {w} have a common factor")
        if self.degree < 0:
            raise WPSError("degree must be non-negative")
        if self.monomials is not None:
            mons = tuple(tuple(int(e) for e in m) for m in self.monomials)
            object.__setattr__(self, "monomials", mons)
            for m in mons:
                if len(m) != len(w):
                    raise WPSError(f"monomial {m} has wrong length")
                if sum(e * x for e, x in zip(m, w)) != self.degree:
                    raise WPSError(f"monomial {m} does not have degree {self.degree}")

    @property
    def is_ambient(self) -> bool:
        return self.degree == 0

    @property
    def dimension(self) -> int:
        return len(self.weights) - 1 - (0 if self.is_ambient else 1)

    def __str__(self):
        p = "P(" + ",".join(map(str, self.weights)) + ")"
        return p if self.is_ambient else f"X_{self.degree} in {p}"


def fano_index(wh: WeightedHypersurface) -> int:
    """Sum of weights minus the degree."""
    q = sum(wh.weights) - wh.degree
    if q <= 0:
        raise WPSError(f"{wh} is not Fano (index {q})")
    return q


def _fundamental_degree(wh: WeightedHypersurface) -> Fraction:
    return Fraction(1 if wh.is_ambient else wh.degree, math.prod(wh.weights))


def degree_a3(wh: WeightedHypersurface) -> Fraction:
    """A^3 for A = O(1): d / prod(w), or 1 / prod(w) for the ambient space."""
    if wh.dimension != 3:
        raise WPSError(f"{wh} has dimension {wh.dimension}, not 3")
    return _fundamental_degree(wh)


def surface_adjunction(wh: WeightedHypersurface, section: Optional[int] = None):
    """(K^2, -K . {x_section = 0}) for a surface hypersurface.

    -K = (sum w - d) O(1) and O(1)^2 = d / prod(w).  The section defaults to
    the coordinate of smallest weight.
    """
    if wh.is_ambient or len(wh.weights) != 4:
        raise WPSError("surface_adjunction needs a hypersurface in a 3-dimensional P(w)")
    i = wh.weights.index(min(wh.weights)) if section is None else section
    idx = sum(wh.weights) - wh.degree
    h2 = _fundamental_degree(wh)
    return idx * idx * h2, idx * wh.weights[i] * h2


def stratum_membership(wh: WeightedHypersurface, i: int):
    """Whether the i-th coordinate point lies on the hypersurface.

    Returns ``(on, witness)`` where witness is a pure power of x_i in the
    support (only when off).
    """
    if wh.monomials is None:
        raise WPSError("monomial support required")
    for m in wh.monomials:
        if all(e == 0 for j, e in enumerate(m) if j != i) and m[i] > 0:
            return False, m
    return True, None


def monomials_of_degree(weights, d: int) -> list:
    """All exponent vectors of weighted degree d, in lexicographic order."""
    ranges = [range(d // w + 1) for w in weights]
    return [m for m in product(*ranges) if sum(e * w for e, w in zip(m, weights)) == d]


# -- candidate verification ----------------------------------------------

def verify_candidate(wh: WeightedHypersurface, cand) -> dict:
    """Compare (index, A^3) of the model with a candidate, exactly."""
    fields = {}
    q = sum(wh.weights) - wh.degree
    fields["q"] = {"model": q, "candidate": cand.q, "ok": q == cand.q}
    try:
        a3 = degree_a3(wh)
        fields["a3"] = {"model": str(a3), "candidate": str(cand.a3), "ok": a3 == cand.a3}
    except WPSError as exc:
        fields["a3"] = {"model": str(exc), "candidate": str(cand.a3), "ok": False}
    return {
        "model": str(wh),
        "fields": fields,
        "ok": all(f["ok"] for f in fields.values()),
        "annotation": {"weights": list(wh.weights), "basket_indices": list(cand.indices)},
    }


# -- registry ------------------------------------------------------------

@dataclass(frozen=True)
class NormalForm:
    name: str
    kind: str  # "threefold" | "surface"
    variety: WeightedHypersurface
    variables: tuple
    annotation: tuple
    provenance: str = "published"
    expect: tuple = ()  # ((field, value-as-string), ...) checked by verify_form


def form_invariants(form: NormalForm) -> dict:
    """Computed numerics of a registry form, as strings."""
    wh = form.variety
    out = {"index": str(sum(wh.weights) - wh.degree)}
    if form.kind == "surface":
        k2, sec = surface_adjunction(wh)
        out["K2"], out["section_degree"] = str(k2), str(sec)
    else:
        out["a3"] = str(degree_a3(wh))
    return out


def verify_form(form: NormalForm) -> dict:
    got = form_invariants(form)
    fields = {k: {"expected": v, "computed": got.get(k), "ok": got.get(k) == v} for k, v in form.expect}
    return {"form": form.name, "kind": form.kind, "fields": fields,
            "ok": all(f["ok"] for f in fields.values()), "annotation": list(form.annotation)}


@dataclass(frozen=True)
class TheoremModel:
    name: str
    variety: WeightedHypersurface
    case: int  # row of the q = 7 table


def _mono(variables, **exps):
    return tuple(exps.get(v, 0) for v in variables)


def _threefold_form(name, lead, annotation):
    vars_ = ("y1", "y2", "y3", "y3p", "y4")
    w = (1, 2, 3, 3, 4)
    # y3p * phi(y1, y2, y3), phi of degree 3 with full support
    phi = [m for m in monomials_of_degree((1, 2, 3), 3)]
    mons = [_mono(vars_, **e) for e in lead]
    mons += [m + (1, 0) for m in phi]
    return NormalForm(name, "threefold", WeightedHypersurface(w, 6, tuple(mons)), vars_, annotation,
                      expect=(("a3", "1/12"), ("index", "7")))


def _surface_form(name, lead, annotation):
    vars_ = ("x1", "x2", "x3", "x4")
    mons = tuple(_mono(vars_, **e) for e in lead)
    return NormalForm(name, "surface", WeightedHypersurface((1, 2, 3, 4), 6, mons), vars_, annotation,
                      expect=(("K2", "4"), ("index", "4"), ("section_degree", "1")))


def normal_form_registry() -> list:
    """The two sextic threefold forms in P(1,2,3,3,4) and two sextic surfaces in P(1,2,3,4)."""
    return [
        _threefold_form("1.2", [dict(y2=1, y4=1), dict(y3=2), dict(y1=6)],
                        ("index-4 point: cyclic quotient 1/4(1,1,-1)",)),
        _threefold_form("1.3", [dict(y1=2, y4=1), dict(y3=2), dict(y2=3)],
                        ("index-4 point: terminal of type cAx/4",)),
        _surface_form("5.a", [dict(x2=1, x4=1), dict(x3=2), dict(x1=6)], ("A1", "A3")),
        _surface_form("5.b", [dict(x1=2, x4=1), dict(x3=2), dict(x2=3)], ("D5",)),
    ]


def theorem_models() -> list:
    """Models for the q = 7 cases that exist: rows 3, 9 and 12."""
    return [
        TheoremModel("P(1,1,2,3)", WeightedHypersurface((1, 1, 2, 3), 0), 3),
        TheoremModel("X6 in P(1,2,2,3,5)", WeightedHypersurface((1, 2, 2, 3, 5), 6), 9),
        TheoremModel("X6 in P(1,2,3,3,4)", WeightedHypersurface((1, 2, 3, 3, 4), 6), 12),
    ]


def _wh_json(wh):
    d = {"weights": list(wh.weights), "degree": wh.degree}
    if wh.monomials is not None:
        d["monomials"] = [list(m) for m in wh.monomials]
    return d


def registry_to_json(forms=None, models=None) -> dict:
    forms = normal_form_registry() if forms is None else forms
    models = theorem_models() if models is None else models
    return {
        "forms": [dict(name=f.name, kind=f.kind, variables=list(f.variables),
                       annotation=list(f.annotation), provenance=f.provenance,
                       expect=dict(f.expect), **_wh_json(f.variety))
                  for f in forms],
        "models": [dict(name=m.name, case=m.case, **_wh_json(m.variety)) for m in models],
    }


def registry_from_json(obj):
    if isinstance(obj, str):
        obj = json.loads(obj)

    def wh(d):
        mons = d.get("monomials")
        return WeightedHypersurface(tuple(d["weights"]), int(d["degree"]),
                                    None if mons is None else tuple(map(tuple, mons)))

    forms = [NormalForm(d["name"], d["kind"], wh(d), tuple(d["variables"]),
                        tuple(d["annotation"]), d.get("provenance", "published"),
                        tuple(sorted(d.get("expect", {}).items()))) for d in obj.get("forms", [])]
    models = [TheoremModel(d["name"], wh(d), int(d["case"])) for d in obj.get("models", [])]
    return forms, models
