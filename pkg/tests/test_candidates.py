from __future__ import annotations

import json
from dataclasses import replace
from fractions import Fraction

import pytest

from qfano.basket import parse_basket
from qfano.candidates import (
    FilterConfig,
    StatusError,
    admissible_degrees,
    allowed_q_values,
    attach_status,
    candidate_to_json,
    enumerate_candidates,
    iter_baskets,
    load_status_table,
)
from qfano.rr import linear_system_dim

Q8 = {
    ("3:1,9:2", "1/9"), ("3:1,5:1,11:4", "16/165"), ("11:3", "1/11"), ("7:2,11:4", "6/77"),
    ("3:1^2,5:1", "1/15"), ("3:1,7:2", "1/21"), ("3:1^2,5:2,9:2", "2/45"), ("7:3,13:5", "4/91"),
    ("5:2,7:3", "1/35"), ("3:1,5:2,11:3", "4/165"),
}
HIGH = {
    9: {("2:1,4:1,5:2", "1/20"), ("2:1^3,5:2,7:2", "1/70")},
    10: {("7:3,11:3", "2/77")},
    11: {("2:1,3:1,5:2", "1/30"), ("2:1,5:1,7:2", "1/70"), ("2:1^2,3:1,4:1,7:3", "1/84")},
    13: {("3:1,4:1,5:2", "1/60"), ("2:1,3:1^2,5:2,7:3", "1/210")},
    17: {("2:1,3:1,5:1,7:3", "1/210")},
    19: {("3:1,4:1,5:2,7:2", "1/420")},
}


def _set(cands):
    return {(str(c.basket), str(c.a3)) for c in cands}


def test_allowed_q_values():
    s = allowed_q_values()
    assert len(s) == 13 and 7 in s and 10 not in s and 19 in s and 20 not in s


def test_admissible_degrees_examples():
    assert Fraction(1, 12) in admissible_degrees(7, parse_basket("2:1,3:1,3:1,4:1"))
    assert Fraction(2, 9) in admissible_degrees(7, parse_basket("3:1,9:4"))
    assert Fraction(1, 6) in admissible_degrees(7, parse_basket("2:1,3:1"))


def test_admissible_degrees_without_vanishing():
    cfg = FilterConfig(require_vanishing=False)
    assert admissible_degrees(7, parse_basket("2:1,3:1,3:1,4:1"), cfg) == [Fraction(1, 12)]
    assert Fraction(1, 6) in admissible_degrees(7, parse_basket("2:1,3:1"), cfg)


def test_admissible_degrees_preconditions():
    with pytest.raises(ValueError):
        admissible_degrees(7, parse_basket("7:1"))
    with pytest.raises(ValueError):
        admissible_degrees(7, parse_basket("5"))
    with pytest.raises(ValueError):
        admissible_degrees(7, parse_basket("2^16"))


def test_q7_matches_asset(q7):
    rows = load_status_table()["rows"]
    assert [(c.indices, c.a3, c.genus) for c in q7] == \
        [(tuple(r["indices"]), Fraction(r["a3"]), r["genus"]) for r in rows]
    assert [c.number for c in q7] == list(range(1, 24))


def test_q7_decorations(q7):
    got = {c.number: str(c.basket) for c in q7}
    assert got[10] == "2:1,3:1^2,11:3"
    assert got[11] == "2:1^2,5:2,10:3"
    assert got[23] == "3:1,8:3,9:2"


def test_q8(by_q):
    assert _set(by_q(8)) == Q8


@pytest.mark.parametrize("q", range(9, 21))
def test_high_index(by_q, q):
    assert _set(by_q(q)) == HIGH.get(q, set())


def test_statuses(q7):
    st = {c.indices: c.status for c in q7}
    assert st[(2, 3, 3, 11)] == "excluded"
    assert st[(2, 3, 3, 4)] == "exists-and-classified"
    assert st[(2, 3, 13)] == "open"
    assert st[(2, 2, 3, 5)] == "exists"


def test_attach_status_errors(q7):
    asset = load_status_table()
    dup = dict(asset, rows=asset["rows"] + [asset["rows"][0]])
    with pytest.raises(StatusError):
        attach_status(q7, dup)
    with pytest.raises(StatusError):
        attach_status(q7 + q7[:1], asset)
    _, unmatched = attach_status(q7[1:], asset)
    assert [r["no"] for r in unmatched] == [1]


def test_status_env_override(tmp_path, monkeypatch, q7):
    doc = load_status_table()
    doc["rows"][0]["status"] = "open"
    (tmp_path / "table_q7.json").write_text(json.dumps(doc))
    monkeypatch.setenv("FANO_DATA_DIR", str(tmp_path))
    cands, _ = attach_status(q7, load_status_table())
    assert cands[0].status == "open"


def test_candidate_invariants(q7, by_q):
    for q in [7, 8, 9, 11, 13]:
        for c in (q7 if q == 7 else by_q(q)):
            fn = c.numerics
            assert c.genus == linear_system_dim(fn, q) - 1
            assert list(c.dims) == [linear_system_dim(fn, k) for k in range(1, q + 1)]
            assert (c.a3 * fn.gorenstein_index).denominator == 1
            assert fn.is_integral()


def test_filters_without_extra_flags_overshoot():
    # the minimal ladder alone admits far more than the 23 reference rows
    cfg = FilterConfig(require_bogomolov_kawamata=False)
    assert len(enumerate_candidates(7, cfg)) > 23


def test_determinism():
    a = [candidate_to_json(c) for c in enumerate_candidates(8)]
    b = [candidate_to_json(c) for c in enumerate_candidates(8)]
    assert json.dumps(a) == json.dumps(b)


def test_decoration_dedup(monkeypatch):
    # two decorations with identical numerics are merged, both recorded
    import qfano.candidates as cm
    from qfano.rr import FanoNumerics

    def fake_raw(q, cfg):
        yield FanoNumerics(q, parse_basket("7:3,11:3"), Fraction(2, 77))
        yield FanoNumerics(q, parse_basket("7:2,11:3"), Fraction(2, 77))

    def fake_make(fn):
        return cm.FanoCandidate(fn, 0, (1,) * fn.q, decorations=(fn.basket,))

    monkeypatch.setattr(cm, "_raw_numerics", fake_raw)
    monkeypatch.setattr(cm, "_make_candidate", fake_make)
    (c,) = cm.enumerate_candidates(10)
    assert [str(d) for d in c.decorations] == ["7:2,11:3", "7:3,11:3"]
    assert str(c.basket) == "7:2,11:3"


def test_iter_baskets_small():
    bs = list(iter_baskets(7))
    assert len(bs) == len(set(bs))
    assert all(sum(p.r - 1 / p.r for p in b) < 24 for b in bs[:2000])


def test_low_index_scan_path():
    # q = 2 goes through the congruence scan instead of the vanishing solve
    cfg = FilterConfig(max_anticanonical_cube=Fraction(40))
    degs = admissible_degrees(2, parse_basket("3:1"), cfg)
    from qfano.rr import FanoNumerics

    assert degs
    for a3 in degs:
        assert FanoNumerics(2, parse_basket("3:1"), a3).is_integral()
