"""Command-line front end: ``stringy <command> DATASET [options]``.

DATASET is a path to a JSON dataset file or the id of a shipped dataset.
Exit codes: 0 success, 1 a check failed, 2 the input could not be used.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .algebra import Element
from .builders import SHIPPED, BuildError, build_point_orbifold, build_symmetric_product, p1_input, point_input
from .dataset import DatasetError, load, load_shipped, serialize
from .findings import FAIL, CheckReport
from .group import Group, GroupError
from .kclass import Flavor
from .model import PresentationError, QuotientPresentation, validate
from .product import (
    RouteUnavailable,
    StringyProduct,
    check_obstructions,
    verify_axioms,
    verify_route_agreement,
    verify_excess_route,
)
from .symbolic import verify_formal_sections, verify_trivial_cocycle

EXIT_OK, EXIT_CHECK, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


class Report:
    """Findings plus optional tables, rendered as text or JSON."""

    def __init__(self, dataset: str, command: str):
        self.dataset = dataset
        self.command = command
        self.findings = CheckReport()
        self.tables: dict[str, list[dict[str, str]]] = {}

    @property
    def ok(self) -> bool:
        return self.findings.ok

    def as_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "command": self.command,
            "status": "ok" if self.ok else "fail",
            "findings": [{"check": f.check, "status": f.status, "witness": f.witness} for f in self.findings],
            "tables": self.tables,
        }

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return json.dumps(self.as_dict(), indent=2, ensure_ascii=False) + "\n"
        lines = [f"# {self.command} {self.dataset}"]
        lines += [str(f) for f in self.findings]
        for name, rows in self.tables.items():
            lines.append(f"## {name}")
            lines += [row["line"] for row in rows]
        fails = self.findings.count(FAIL)
        lines.append("status: ok" if self.ok else f"status: fail ({fails} failing)")
        return "\n".join(lines) + "\n"


def _open(spec: str, truncation: int | None) -> QuotientPresentation:
    path = Path(spec)
    try:
        if path.exists() or spec.endswith(".json"):
            p = load(path)
        elif spec in SHIPPED:
            p = load_shipped(spec)
        else:
            raise InputError(f"{spec}: no such file or shipped dataset (shipped: {', '.join(SHIPPED)})")
    except DatasetError as exc:
        raise InputError(str(exc) if exc.path == spec else f"{spec}: {exc}") from None
    if truncation is not None:
        if truncation < 0:
            raise InputError("--truncation must be nonnegative")
        p = p.with_truncation(truncation)
    return p


def _require_valid(p: QuotientPresentation, report: Report) -> bool:
    rep = validate(p)
    if not rep.ok:
        report.findings.extend(rep.failures)
    return rep.ok


def _cell(value: Element) -> str:
    return str(value)


def cmd_validate(p: QuotientPresentation, args) -> Report:
    report = Report(p.name, "validate")
    report.findings.extend(validate(p))
    return report


def cmd_table(p: QuotientPresentation, args) -> Report:
    report = Report(p.name, f"table --route {args.route}")
    if not _require_valid(p, report):
        return report
    try:
        prod = StringyProduct(p, args.route, args.section_set if args.route == "pushpull" else None)
        rows = prod.table()
    except (RouteUnavailable, PresentationError) as exc:
        report.findings.fail("route", str(exc))
        return report
    out = []
    for m1, b1, m2, b2, value in rows:
        m12 = p.group.mul(m1, m2)
        out.append({
            "left": f"{b1}_{m1}",
            "right": f"{b2}_{m2}",
            "sector": m12,
            "value": _cell(value),
            "line": f"{b1}_{m1} * {b2}_{m2} = ({_cell(value)})_{m12}",
        })
    report.tables["products"] = out
    report.findings.add("table", "pass", f"{len(out)} basis pairs")
    return report


def cmd_cocycles(p: QuotientPresentation, args) -> Report:
    report = Report(p.name, "cocycles")
    if not _require_valid(p, report):
        return report
    try:
        prod = StringyProduct(p, "pushpull", args.section_set)
        out = []
        for m1 in p.ordered_elements():
            for m2 in p.ordered_elements():
                prod.block(m1, m2)
                gamma_t, gamma = prod.gammas[(m1, m2)]
                out.append({
                    "m1": m1,
                    "m2": m2,
                    "series": str(gamma_t),
                    "value": _cell(gamma),
                    "line": f"gamma[{m1},{m2}] = {gamma}    gamma(t) = {gamma_t}",
                })
    except (RouteUnavailable, PresentationError) as exc:
        report.findings.fail("sections", str(exc))
        return report
    report.tables["cocycles"] = out
    report.findings.add("cocycles", "pass", f"{len(out)} pairs")
    return report


def cmd_verify(p: QuotientPresentation, args) -> Report:
    report = Report(p.name, "verify")
    if not _require_valid(p, report):
        return report
    report.findings.add("validate", "pass")
    report.findings.extend(check_obstructions(p))
    try:
        report.findings.extend(verify_axioms(p, args.route, args.section_set if args.route == "pushpull" else None))
    except (RouteUnavailable, PresentationError) as exc:
        report.findings.fail("route", str(exc))
    alternatives = [args.section_set] if args.section_set else ["last-pivot"]
    report.findings.extend(verify_route_agreement(p, alternatives))
    report.findings.extend(verify_trivial_cocycle(p))
    report.findings.extend(verify_excess_route(p))
    return report


def cmd_symbolic(p: QuotientPresentation, args) -> Report:
    report = Report(p.name, "symbolic-check")
    if not _require_valid(p, report):
        return report
    report.findings.extend(verify_formal_sections(p))
    report.findings.extend(verify_trivial_cocycle(p))
    return report


def cmd_build(args) -> tuple[int, str]:
    try:
        if args.kind == "point":
            p = build_point_orbifold(Group.from_spec(args.group), args.name)
        else:
            flavor = Flavor(args.flavor)
            Y = point_input() if args.input == "point" else p1_input(flavor)
            name = args.name or (f"sym{args.n}-{Y.name}" + ("-K" if flavor == Flavor.K else ""))
            p = build_symmetric_product(Y, args.n, name)
    except (BuildError, GroupError) as exc:
        raise InputError(str(exc)) from None
    return EXIT_OK, serialize(p)


COMMANDS = {
    "validate": cmd_validate,
    "table": cmd_table,
    "cocycles": cmd_cocycles,
    "verify": cmd_verify,
    "symbolic-check": cmd_symbolic,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stringy", description="Stringy products on global quotient presentations.")
    sub = parser.add_subparsers(dest="command", required=True)

    def dataset_command(name: str, help_text: str):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("dataset", help="dataset file or shipped id (" + ", ".join(SHIPPED) + ")")
        sp.add_argument("--truncation", type=int, default=None, help="override the series truncation T")
        sp.add_argument("--format", choices=("text", "json"), default="text")
        sp.add_argument("--section-set", default=None, help="first-pivot, last-pivot or a named set in the file")
        return sp

    dataset_command("validate", "structural checks")
    sp = dataset_command("table", "full basis product table")
    sp.add_argument("--route", choices=("pullpush", "pushpull"), default="pullpush")
    sp = dataset_command("verify", "run every verifier")
    sp.add_argument("--route", choices=("pullpush", "pushpull"), default="pullpush")
    dataset_command("cocycles", "cocycle table gamma(t) and its t^r coefficient")
    dataset_command("symbolic-check", "formal sections and the trivialized cocycle")

    sp = sub.add_parser("build", help="write a dataset file for a builder")
    kinds = sp.add_subparsers(dest="kind", required=True)
    pt = kinds.add_parser("point", help="point orbifold [pt/G]")
    pt.add_argument("--group", required=True, help="symmetric:n or cyclic:n")
    sym = kinds.add_parser("sym", help="symmetric product Y^n/S_n")
    sym.add_argument("--input", choices=("point", "P1"), default="P1")
    sym.add_argument("--n", type=int, required=True)
    sym.add_argument("--flavor", choices=("CH", "K"), default="CH")
    for b in (pt, sym):
        b.add_argument("--name", default=None)
        b.add_argument("-o", "--output", default=None, help="write here instead of stdout")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        if args.command == "build":
            code, text = cmd_build(args)
            if args.output:
                Path(args.output).write_text(text, encoding="utf-8")
            else:
                sys.stdout.write(text)
            return code
        p = _open(args.dataset, args.truncation)
        report = COMMANDS[args.command](p, args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(report.render(args.format))
    return EXIT_OK if report.ok else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())
