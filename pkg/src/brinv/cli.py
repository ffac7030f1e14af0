"""Command line interface: ``brinv compute | verify | oracle``."""

from __future__ import annotations

import argparse
import json
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .catalog import BUILTIN, GermSpecFile, SpecError
from .groebner import buchberger
from .invariants import IDENTITIES, PRINTED_R1, GermError, check_identities, validate_icis
from .local_algebra import DEFAULT_MAX_JET, local_colength, tor1_intersection, tor1_koszul
from .polyring import ParseError, format_polynomial, parse_polynomials

EXIT_OK = 0
EXIT_IDENTITY = 1
EXIT_INVALID = 2
EXIT_UNDETERMINED = 3


def run_entry(
    spec: GermSpecFile, max_jet: int | None = None, relation_sign: str = "resolved", escalate: bool = True
) -> dict:
    """Validate and evaluate one spec; always returns a JSON-ready record.

    An undetermined verdict triggers a single retry at twice the jet bound
    unless ``escalate`` is false.
    """
    bound = max_jet or spec.jet_bound
    start = time.perf_counter()
    record = {"label": spec.label, "spec": spec.to_dict(), "maxJetDegree": bound}
    try:
        germ, omega = spec.build()
        germ = validate_icis(germ, bound)
    except (SpecError, GermError) as exc:
        record.update(status="invalid", error=type(exc).__name__, message=str(exc))
        record["seconds"] = round(time.perf_counter() - start, 3)
        return record
    try:
        report = check_identities(germ, omega, bound, spec.label, relation_sign)
        if report.undetermined and escalate:
            record["escalatedFrom"] = bound
            bound *= 2
            record["maxJetDegree"] = bound
            report = check_identities(germ, omega, bound, spec.label, relation_sign)
    except Exception as exc:  # an engine fault must not abort a catalog run
        record.update(status="error", error=type(exc).__name__, message=str(exc))
        record["seconds"] = round(time.perf_counter() - start, 3)
        return record
    record["report"] = report.to_json()
    record["validation_certificate_degree"] = germ.validation.certificate_degree
    if report.failures():
        record["status"] = "failed"
    elif report.undetermined:
        record["status"] = "undetermined"
    else:
        record["status"] = "passed"
    record["seconds"] = round(time.perf_counter() - start, 3)
    return record


def _exit_code(statuses) -> int:
    statuses = list(statuses)
    if any(s in ("failed", "error") for s in statuses):
        return EXIT_IDENTITY
    if any(s == "invalid" for s in statuses):
        return EXIT_INVALID
    if any(s == "undetermined" for s in statuses):
        return EXIT_UNDETERMINED
    return EXIT_OK


# ---------------------------------------------------------------- output


def _fmt(v):
    return "-" if v is None else str(v)


def format_entry_table(record: dict) -> str:
    lines = [f"== {record['label']} [{record['status']}]"]
    if "report" not in record:
        lines.append(f"  {record.get('error')}: {record.get('message')}")
        return "\n".join(lines)
    rep = record["report"]
    for name, value in rep["invariants"].items():
        deg = rep["certificate_degrees"].get(name)
        lines.append(f"  {name:<24} {_fmt(value):>12}   cert d={_fmt(deg)}")
    for name, value in rep["residuals"].items():
        desc = PRINTED_R1 if (name == "R1" and rep["relation_sign"] == "printed") else IDENTITIES[name]
        lines.append(f"  {name:<4} {_fmt(value):>6}   {desc}")
    for name, cc in rep["cross_checks"].items():
        lines.append(f"  {name:<34} {_fmt(cc['first']):>6} {_fmt(cc['second']):>6}  agree={cc['agree']}")
    return "\n".join(lines)


def _emit(obj, fmt: str, table_text: str):
    if fmt == "json":
        print(json.dumps(obj, indent=2, sort_keys=False))
    else:
        print(table_text)


# -------------------------------------------------------------- commands


def cmd_compute(args) -> int:
    try:
        spec = GermSpecFile.load(args.input)
    except OSError as exc:
        print(f"error: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return EXIT_INVALID
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    record = run_entry(spec, args.max_jet, args.relation_sign, not args.no_escalate)
    if record["status"] == "invalid":
        print(f"error: {record['error']}: {record['message']}", file=sys.stderr)
    _emit(record, args.format, format_entry_table(record))
    return _exit_code([record["status"]])


def _load_dir(path: Path) -> list:
    items = []
    for p in sorted(path.glob("*.json")):
        try:
            items.append(GermSpecFile.load(p))
        except (OSError, SpecError) as exc:
            items.append({"label": p.stem, "status": "invalid", "error": type(exc).__name__, "message": str(exc)})
    return items


def cmd_verify(args) -> int:
    if args.catalog == "builtin":
        items = list(BUILTIN)
    else:
        path = Path(args.catalog)
        if not path.is_dir():
            print(f"error: catalog {args.catalog!r} is neither 'builtin' nor a directory", file=sys.stderr)
            return EXIT_INVALID
        items = _load_dir(path)
        if not items:
            print(f"error: no *.json spec files in {path}", file=sys.stderr)
            return EXIT_INVALID
    specs = [it for it in items if isinstance(it, GermSpecFile)]
    start = time.perf_counter()
    if args.parallel > 1 and len(specs) > 1:
        with ProcessPoolExecutor(max_workers=args.parallel) as pool:
            results = list(
                pool.map(
                    run_entry,
                    specs,
                    [args.max_jet] * len(specs),
                    [args.relation_sign] * len(specs),
                    [not args.no_escalate] * len(specs),
                )
            )
    else:
        results = [run_entry(s, args.max_jet, args.relation_sign, not args.no_escalate) for s in specs]
    it = iter(results)
    records = [next(it) if isinstance(item, GermSpecFile) else item for item in items]

    statuses = [r["status"] for r in records]
    r6 = {}
    for r in records:
        if "report" in r and r["report"]["k"] == 2:
            res = r["report"]["residuals"]["R6"]
            r6[r["label"]] = "undetermined" if res is None else ("pass" if res == 0 else "fail")
    summary = {
        "entries": len(records),
        "passed": statuses.count("passed"),
        "failed": statuses.count("failed") + statuses.count("error"),
        "undetermined": statuses.count("undetermined"),
        "invalid": statuses.count("invalid"),
        "R6": r6,
    }
    report = {
        "version": __version__,
        "catalog": args.catalog,
        "relation_sign": args.relation_sign,
        "maxJetDegree": args.max_jet or DEFAULT_MAX_JET,
        "summary": summary,
        "entries": records,
        "seconds": round(time.perf_counter() - start, 3),
    }
    table = "\n".join(format_entry_table(r) for r in records)
    table += (
        f"\n\n{summary['passed']} passed, {summary['failed']} failed, "
        f"{summary['undetermined']} undetermined, {summary['invalid']} invalid"
    )
    if r6:
        table += "\nR6 (report only): " + ", ".join(f"{k}={v}" for k, v in r6.items())
    _emit(report, args.format, table)
    return _exit_code(statuses)


def _infer_variables(*texts: str) -> list[str]:
    names = set()
    for t in texts:
        names.update(re.findall(r"[A-Za-z_][A-Za-z0-9_]*", t))
    return sorted(names)


def _vars_from(args, *texts):
    if args.vars:
        return [v.strip() for v in args.vars.split(",") if v.strip()]
    return _infer_variables(*texts)


def cmd_oracle(args) -> int:
    max_jet = args.max_jet or DEFAULT_MAX_JET
    try:
        if args.engine == "colength":
            variables = _vars_from(args, args.gens)
            gens = parse_polynomials(args.gens, variables)
            res = local_colength(gens, max_jet)
            out = {"colength": res.to_json(), "certificate_degree": res.degree, "bound": res.bound}
            text = str(res)
        elif args.engine == "tor":
            variables = _vars_from(args, args.phi, args.omega)
            phi = parse_polynomials(args.phi, variables)
            omega = parse_polynomials(args.omega, variables)
            inter = tor1_intersection(phi, omega, max_jet)
            kos = tor1_koszul(phi, omega, max_jet)
            out = {"intersection": inter.to_json(), "koszul": kos.to_json()}
            text = f"{inter.to_json()} / {kos.to_json()}  (intersection / Koszul)"
        else:
            variables = _vars_from(args, args.gens)
            gens = parse_polynomials(args.gens, variables)
            G = buchberger(gens)
            polys = [format_polynomial(p) for p in G.polynomials()]
            out = {"variables": variables, "order": "degrevlex", "basis": polys}
            text = "{" + ", ".join(polys) + "}"
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    _emit(out, args.format, text)
    if args.engine == "colength" and out["colength"] == "undetermined":
        return EXIT_UNDETERMINED
    return EXIT_OK


# ------------------------------------------------------------------ main


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="brinv",
        description="Bruce-Roberts numbers of 1-forms on ICIS germs, with identity verification.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, fmt_default="table"):
        p.add_argument("--max-jet", type=int, default=None, metavar="D", help="jet degree bound (default 32)")
        p.add_argument("--format", choices=("json", "table"), default=fmt_default)

    p = sub.add_parser("compute", help="evaluate one germ/1-form spec file")
    p.add_argument("--input", required=True, help="JSON spec file")
    p.add_argument("--relation-sign", choices=("resolved", "printed"), default="resolved")
    p.add_argument("--no-escalate", action="store_true", help="skip the retry at twice the jet bound")
    common(p)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="check all identities on a catalog")
    p.add_argument("--catalog", default="builtin", help="'builtin' or a directory of spec files")
    p.add_argument("--parallel", type=int, default=1, metavar="K")
    p.add_argument("--relation-sign", choices=("resolved", "printed"), default="resolved")
    p.add_argument("--no-escalate", action="store_true", help="skip the retry at twice the jet bound")
    common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="raw engines for independent recomputation")
    osub = p.add_subparsers(dest="engine", required=True)
    q = osub.add_parser("colength", help="local colength of an ideal")
    q.add_argument("gens", help="comma-separated generators")
    q.add_argument("--vars", help="comma-separated variable order (default: sorted names)")
    common(q)
    q.set_defaults(func=cmd_oracle)
    q = osub.add_parser("tor", help="dim Tor_1(O/<phi>, O/<omega>) by both routes")
    q.add_argument("phi")
    q.add_argument("omega")
    q.add_argument("--vars")
    common(q)
    q.set_defaults(func=cmd_oracle)
    q = osub.add_parser("gb", help="reduced degrevlex Gröbner basis")
    q.add_argument("gens")
    q.add_argument("--vars")
    common(q)
    q.set_defaults(func=cmd_oracle)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "max_jet", None) is not None and args.max_jet < 1:
        print("error: --max-jet must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
