"""Command-line interface: ``qfano enumerate|dims|links|verify-models|survey``.

Every command prints an envelope with the tool version, the command echo
and a deterministic payload, either as JSON or as TSV.  Rationals are
written as ``p/q`` strings.  Exit codes: 0 success, 1 verification
failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from . import __version__
from .basket import BasketError, parse_basket
from .candidates import (
    FilterConfig,
    attach_status,
    candidate_to_json,
    enumerate_candidates,
    high_dim_survey,
    load_status_table,
)
from .links import BlowupCenter, Caps, LinkError, Threshold, analyze_case, target_tables
from .rr import FanoNumerics, RRError, euler_characteristic, linear_system_dim
from .wps import WPSError, registry_from_json, registry_to_json, verify_candidate, verify_form

TOOL = "qfano"


class UsageError(Exception):
    pass


# -- payload tables (shared by JSON and TSV) ----------------------------

def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (list, tuple)):
        return ",".join(_cell(x) for x in v)
    if isinstance(v, dict):
        return ";".join(f"{k}={_cell(x)}" for k, x in v.items())
    return str(v)


def enumerate_rows(payload: dict):
    cols = ["no", "q", "indices", "basket", "decorations", "a3", "genus", "dims", "status", "ref"]
    return cols, [[_cell(c[k]) for k in cols] for c in payload["candidates"]]


def dims_rows(payload: dict):
    cols = ["k", "chi", "dim"]
    return cols, [[_cell(r[k]) for k in cols] for r in payload["table"]]


def links_rows(payload: dict):
    cols = ["fate", "filter", "q_hat", "e", "fiber", "s", "m", "beta", "detail"]
    rows = []
    for r in payload["eliminations"]:
        s = r["solution"]
        rows.append(["eliminated", r["filter"], s["q_hat"], s["e"], s["fiber"], s["s"], s["m"], s["beta"],
                     r["detail"]])
    for s in payload["survivors"]:
        rows.append(["survivor", "", s["q_hat"], s["e"], s["fiber"], s["s"], s["m"], s["beta"], s["status"]])
    return cols, [[_cell(x) for x in row] for row in rows]


def verify_rows(payload: dict):
    cols = ["item", "field", "expected", "computed", "ok"]
    rows = []
    for m in payload["models"]:
        for f, v in m["fields"].items():
            rows.append([m["name"], f, v["candidate"], v["model"], v["ok"]])
    for m in payload["forms"]:
        for f, v in m["fields"].items():
            rows.append([m["form"], f, v["expected"], v["computed"], v["ok"]])
    return cols, [[_cell(x) for x in row] for row in rows]


def survey_rows(payload: dict):
    cols = ["q", "count", "min_genus", "baskets"]
    return cols, [[_cell(r[k]) for k in cols] for r in payload["rows"]]


ROWS = {"enumerate": enumerate_rows, "dims": dims_rows, "links": links_rows,
        "verify-models": verify_rows, "survey": survey_rows}


def render(command: str, argv, payload: dict, fmt: str) -> str:
    if fmt == "json":
        env = {"tool": TOOL, "version": __version__, "command": [command] + list(argv), "payload": payload}
        return json.dumps(env, indent=1, ensure_ascii=False) + "\n"
    cols, rows = ROWS[command](payload)
    lines = [f"# {TOOL} {__version__}", "# " + " ".join([command] + list(argv)), "\t".join(cols)]
    lines += ["\t".join(r) for r in rows]
    return "\n".join(lines) + "\n"


def parse_tsv(text: str):
    """Inverse of the TSV rendering: (columns, rows) without the header comments."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    cols = lines[0].split("\t")
    return cols, [ln.split("\t") for ln in lines[1:]]


# -- commands --------------------------------------------------------------

def _cfg(args) -> FilterConfig:
    return FilterConfig(
        max_anticanonical_cube=Fraction(args.max_cube),
        integrality_scan_multiplier=args.scan_multiplier,
        require_nonneg=not args.no_nonneg,
        require_monotone_when_effective=not args.no_monotone,
        require_vanishing=not args.no_vanishing,
        require_bogomolov_kawamata=not args.no_bk,
    )


def _status_for(q):
    asset = load_status_table()
    return asset if asset.get("q") == q else None


def cmd_enumerate(args):
    cands = enumerate_candidates(args.index, _cfg(args))
    unmatched = []
    asset = _status_for(args.index)
    if asset is not None:
        cands, unmatched = attach_status(cands, asset)
    payload = {
        "q": args.index,
        "count": len(cands),
        "candidates": [candidate_to_json(c) for c in cands],
        "unmatched_status_rows": unmatched,
    }
    return payload, 0


def cmd_dims(args):
    try:
        fn = FanoNumerics(args.index, parse_basket(args.basket), Fraction(args.a3))
    except (BasketError, RRError, ValueError, ZeroDivisionError) as exc:
        raise UsageError(str(exc)) from exc
    table = []
    for k in range(args.min_k, args.max_k + 1):
        chi = euler_characteristic(fn, k)
        table.append({"k": k, "chi": str(chi), "dim": chi.numerator - 1 if chi.denominator == 1 else None})
    integral = fn.is_integral()
    payload = {"q": fn.q, "basket": str(fn.basket), "a3": str(fn.degree_a3), "integral": integral, "table": table}
    return payload, 0 if integral else 1


def _resolve_case(case: str, q: int):
    cands = enumerate_candidates(q)
    asset = _status_for(q)
    if asset is not None:
        cands, _ = attach_status(cands, asset)
    if case.isdigit():
        hits = [c for c in cands if c.number == int(case)]
    else:
        try:
            idx = parse_basket(case).indices
        except BasketError as exc:
            raise UsageError(str(exc)) from exc
        hits = [c for c in cands if c.indices == idx]
    if len(hits) != 1:
        raise UsageError(f"case {case!r} does not name exactly one candidate of index {q}")
    return hits[0]


def _threshold(spec):
    if spec is None:
        return None
    parts = spec.split(":")
    try:
        k0, m = int(parts[0]), int(parts[1])
        strict = "strict" in parts[2:]
        r = next((int(p[2:]) for p in parts[2:] if p.startswith("r=")), None)
    except (ValueError, IndexError) as exc:
        raise UsageError(f"bad threshold {spec!r}; use k0:m[:strict][:r=R]") from exc
    return Threshold(k0, m, strict, r)


def cmd_links(args):
    source = _resolve_case(args.case, args.index)
    try:
        center = BlowupCenter.parse(args.center)
        ks = [int(k) for k in args.ks.split(",")] if args.ks else None
        caps = Caps(*[int(x) for x in args.caps.split(",")]) if args.caps else Caps()
        rep = analyze_case(source, center, target_tables(args.min_table_index), ks=ks,
                           threshold=_threshold(args.threshold), caps=caps,
                           min_table_index=args.min_table_index)
    except (LinkError, ValueError, TypeError) as exc:
        raise UsageError(str(exc)) from exc
    return rep.to_json(), 0


def cmd_verify_models(args):
    if args.registry:
        try:
            with open(args.registry, encoding="utf-8") as fh:
                forms, models = registry_from_json(json.load(fh))
        except (OSError, ValueError, KeyError, WPSError) as exc:
            raise UsageError(f"cannot read registry: {exc}") from exc
    else:
        forms, models = registry_from_json(registry_to_json())
    cands, _ = attach_status(enumerate_candidates(7), load_status_table())
    by_no = {c.number: c for c in cands}
    model_reports = []
    for m in models:
        rep = verify_candidate(m.variety, by_no[m.case])
        model_reports.append(dict(rep, name=m.name, case=m.case))
    form_reports = []
    for f in forms:
        try:
            form_reports.append(verify_form(f))
        except WPSError as exc:
            form_reports.append({"form": f.name, "kind": f.kind, "ok": False, "annotation": list(f.annotation),
                                 "fields": {"error": {"expected": "", "computed": str(exc), "ok": False}}})
    ok = all(r["ok"] for r in model_reports + form_reports)
    return {"ok": ok, "models": model_reports, "forms": form_reports}, 0 if ok else 1


def cmd_survey(args):
    lo, _, hi = args.range.partition("-")
    qs = range(int(lo), int(hi or lo) + 1)
    rep = high_dim_survey(qs, args.threshold, _cfg(args))
    rows = [dict(q=q, **v) for q, v in rep.items()]
    return {"threshold": args.threshold, "rows": rows}, 0


# -- parser ----------------------------------------------------------------

def _filter_flags(p):
    g = p.add_argument_group("filters")
    g.add_argument("--max-cube", default="100", help="bound on q^3 A^3 (default 100)")
    g.add_argument("--scan-multiplier", type=int, default=12, help="integrality scan multiplier m")
    g.add_argument("--no-nonneg", action="store_true", help="drop chi(kA) >= 0 for k >= 0")
    g.add_argument("--no-monotone", action="store_true", help="drop monotonicity when A is effective")
    g.add_argument("--no-vanishing", action="store_true", help="drop chi(-tA) = 0 for 0 < t < q")
    g.add_argument("--no-bk", action="store_true", help="drop the Bogomolov-Kawamata bound")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog=TOOL, description="Numerics of Q-Fano threefolds of high Fano index.")
    p.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def fmt(sp):
        sp.add_argument("--format", choices=("json", "tsv"), default="json")

    e = sub.add_parser("enumerate", help="list numerical candidates of a given index")
    e.add_argument("--index", type=int, required=True)
    _filter_flags(e)
    fmt(e)

    d = sub.add_parser("dims", help="chi(kA) and dim|kA| for given numerics")
    d.add_argument("--index", type=int, required=True)
    d.add_argument("--basket", required=True, help='e.g. "2,3:1,3:1,4:1"')
    d.add_argument("--a3", required=True, help="A^3 as p/q")
    d.add_argument("--max-k", type=int, default=7)
    d.add_argument("--min-k", type=int, default=1)
    fmt(d)

    lk = sub.add_parser("links", help="link analysis for one case")
    lk.add_argument("--case", required=True, help="table number or index list, e.g. 12 or 2,3,3,4")
    lk.add_argument("--center", required=True, help="r=R, r=3:alpha=2/3 or gorenstein:A")
    lk.add_argument("--index", type=int, default=7)
    lk.add_argument("--ks", help="comma-separated k values (default per case)")
    lk.add_argument("--threshold", help="k0:m[:strict][:r=R] (default per case)")
    lk.add_argument("--caps", help="e,s,m caps (default 12,40,12)")
    lk.add_argument("--min-table-index", type=int, default=9)
    fmt(lk)

    v = sub.add_parser("verify-models", help="check model varieties against the candidates")
    v.add_argument("--registry", help="registry JSON (default: built in)")
    fmt(v)

    s = sub.add_parser("survey", help="candidates with dim|A| >= threshold")
    s.add_argument("--range", default="3-19", help="q range, e.g. 3-19")
    s.add_argument("--threshold", type=int, default=3)
    _filter_flags(s)
    fmt(s)
    return p


COMMANDS = {"enumerate": cmd_enumerate, "dims": cmd_dims, "links": cmd_links,
            "verify-models": cmd_verify_models, "survey": cmd_survey}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"{TOOL}: error: {exc}", file=sys.stderr)
        return 2
    sys.stdout.write(render(args.command, argv[1:], payload, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
