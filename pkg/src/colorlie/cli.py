"""Command-line interface: verify, extract, jacobi, weights, split, export.

Exit codes: 0 all checks passed, 1 discrepancies found (report on
stdout), 2 usage or parse errors (diagnostics on stderr).  The
``--jobs N`` flag (or the COLORLIE_JOBS environment variable) runs the
bracket-pair and Jacobi-triple sweeps in a worker pool; output is
byte-identical for every worker count because chunks are merged in
index order.
"""

from __future__ import annotations

import argparse
import multiprocessing
import os
import sys
from typing import Sequence, Union

from . import corpus
from .algebra import (BracketTable, DiscrepancyReport, NotEigenvector, Realization,
                      check_jacobi, extract_structure_constants, triangular_split,
                      verify_realization, weights)
from .io import ParseError, emit_definition, emit_report, emit_table, parse_definition

_FORMATS = ("text", "json", "latex")


class CliError(Exception):
    """Usage-level failure mapped to exit code 2."""


def _positive_jobs(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid jobs count {text!r}")
    if value < 1:
        raise argparse.ArgumentTypeError("jobs must be >= 1")
    return value


def _default_jobs() -> int:
    raw = os.environ.get("COLORLIE_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="colorlie",
        description="Exact checks for the graded algebras shipped in the corpus.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_source(p, realizations=True):
        p.add_argument("--algebra", choices=corpus.ALGEBRAS,
                       help="corpus algebra id")
        if realizations:
            p.add_argument("--realization", choices=("dmodule", "vectorfield"),
                           help="which corpus realization to use")
        p.add_argument("--file", help="definition file to use instead of the corpus")

    verify = sub.add_parser("verify", help="replay a realization against a table")
    add_source(verify)
    verify.add_argument("--table", help="table to check against: corpus id "
                                        "(contains a dot) or definition file path; "
                                        "defaults to the corpus table for corpus realizations")
    verify.add_argument("--format", choices=_FORMATS, default="text")
    verify.add_argument("--jobs", type=_positive_jobs, default=_default_jobs())

    extract = sub.add_parser("extract", help="re-derive structure constants from a realization")
    add_source(extract)
    extract.add_argument("--format", choices=_FORMATS, default="text")

    jacobi = sub.add_parser("jacobi", help="check the graded Jacobi identity on a table")
    jacobi.add_argument("--algebra", choices=corpus.ALGEBRAS)
    jacobi.add_argument("--basis", choices=("standard", "pm"), default="standard")
    jacobi.add_argument("--file", help="table definition file instead of the corpus")
    jacobi.add_argument("--format", choices=_FORMATS, default="text")
    jacobi.add_argument("--jobs", type=_positive_jobs, default=_default_jobs())

    weights_p = sub.add_parser("weights", help="grading-operator eigenvalues per basis element")
    weights_p.add_argument("--algebra", choices=corpus.ALGEBRAS, required=True)
    weights_p.add_argument("--basis", choices=("auto", "standard", "pm"), default="auto")
    weights_p.add_argument("--format", choices=("text", "json"), default="text")

    split = sub.add_parser("split", help="triangular split by weight signs")
    split.add_argument("--algebra", choices=corpus.ALGEBRAS, required=True)
    split.add_argument("--basis", choices=("auto", "standard", "pm"), default="auto")
    split.add_argument("--format", choices=("text", "json"), default="text")

    export = sub.add_parser("export", help="print a corpus entry in an interchange format")
    export.add_argument("--entry", required=True,
                        help="corpus entry id (see `export --list`)")
    export.add_argument("--format", choices=("definition", "text", "json", "latex"),
                        default="definition")
    return parser


def _load_definition_file(path: str):
    try:
        with open(path, "r", encoding="utf-8") as handle:
            text = handle.read()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    try:
        return parse_definition(text)
    except ParseError as exc:
        raise CliError(f"{path}:{exc.line}:{exc.col}: {exc.reason}") from exc


def _entry_table(entry, what: str) -> BracketTable:
    if entry.kind != "table":
        raise CliError(f"{what} is a {entry.kind} definition, expected a table")
    return entry.payload["table"]


def _entry_realization(entry, what: str) -> Realization:
    if entry.kind not in ("d-module", "vector-field"):
        raise CliError(f"{what} is a {entry.kind} definition, expected a realization")
    return entry.payload["realization"]


def _resolve_table_spec(spec: str) -> BracketTable:
    if "." in spec and not os.path.exists(spec):
        try:
            return _entry_table(corpus.load(spec), spec)
        except corpus.UnknownId:
            pass
    return _entry_table(_load_definition_file(spec), spec)


def _resolve_verify(args) -> tuple[Realization, BracketTable, str]:
    if args.file:
        real = _entry_realization(_load_definition_file(args.file), args.file)
        if not args.table:
            raise CliError("--file requires --table (corpus id or table file)")
        table = _resolve_table_spec(args.table)
        subject = f"{args.file} vs {args.table}"
    elif args.algebra and args.realization:
        real, table = corpus.realization(args.algebra, args.realization)
        if args.table:
            table = _resolve_table_spec(args.table)
            subject = f"{args.algebra} {args.realization} vs {args.table}"
        else:
            basis = "pm" if args.realization == "vectorfield" and args.algebra != "n1" else "standard"
            subject = f"{args.algebra} {args.realization} vs {args.algebra} table ({basis})"
    else:
        raise CliError("verify needs --algebra and --realization, or --file")
    if real.basis != table.basis:
        raise CliError("realization and table declare different bases")
    return real, table, subject


def _chunks(items: list, jobs: int) -> list[list]:
    count = min(jobs, len(items)) or 1
    size, extra = divmod(len(items), count)
    out = []
    start = 0
    for index in range(count):
        end = start + size + (1 if index < extra else 0)
        out.append(items[start:end])
        start = end
    return out


def _verify_chunk(payload) -> DiscrepancyReport:
    real, table, pairs = payload
    return verify_realization(real, table, pairs)


def _jacobi_chunk(payload) -> DiscrepancyReport:
    table, triples = payload
    return check_jacobi(table, triples)


def _run_parallel(worker, payloads: list, subject: str) -> DiscrepancyReport:
    report = DiscrepancyReport(subject=subject)
    if len(payloads) == 1:
        merged = worker(payloads[0])
        merged.subject = subject
        return report.merge(merged)
    with multiprocessing.Pool(len(payloads)) as pool:
        for partial in pool.map(worker, payloads):
            report = report.merge(partial)
    report.subject = subject
    return report


def _emit_pair_report(report: DiscrepancyReport, fmt: str, generators: int,
                      unit: str) -> str:
    if fmt == "text":
        if report.ok:
            head = (f"{report.subject}: {generators} generators, "
                    f"{report.checked} {unit} verified")
            return head + "\n"
        head = (f"{report.subject}: {generators} generators, "
                f"{report.checked} {unit} checked, "
                f"{len(report.entries)} discrepancies")
        lines = [head] + [f"  {item}" for item in report.entries]
        return "\n".join(lines) + "\n"
    return emit_report(report, fmt)


def _cmd_verify(args) -> int:
    real, table, subject = _resolve_verify(args)
    n = len(real.basis)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    payloads = [(real, table, chunk) for chunk in _chunks(pairs, args.jobs)]
    report = _run_parallel(_verify_chunk, payloads, subject)
    sys.stdout.write(_emit_pair_report(report, args.format, n, "unordered pairs"))
    return 0 if report.ok else 1


def _cmd_extract(args) -> int:
    if args.file:
        real = _entry_realization(_load_definition_file(args.file), args.file)
    elif args.algebra and args.realization:
        real, _ = corpus.realization(args.algebra, args.realization)
    else:
        raise CliError("extract needs --algebra and --realization, or --file")
    table = extract_structure_constants(real)
    sys.stdout.write(emit_table(table, args.format))
    return 0


def _cmd_jacobi(args) -> int:
    if args.file:
        table = _entry_table(_load_definition_file(args.file), args.file)
        subject = f"graded Jacobi on {args.file}"
    elif args.algebra:
        table = corpus.table(args.algebra, args.basis)
        subject = f"graded Jacobi on {args.algebra} table ({args.basis})"
    else:
        raise CliError("jacobi needs --algebra or --file")
    n = len(table.basis)
    triples = [(i, j, k) for i in range(n) for j in range(n) for k in range(n)]
    payloads = [(table, chunk) for chunk in _chunks(triples, args.jobs)]
    report = _run_parallel(_jacobi_chunk, payloads, subject)
    if args.format == "text":
        if report.ok:
            sys.stdout.write(f"{subject}: {report.checked} triples verified\n")
        else:
            lines = [f"{subject}: {report.checked} triples checked, "
                     f"{len(report.entries)} failures"]
            lines += [f"  {item}" for item in report.entries]
            sys.stdout.write("\n".join(lines) + "\n")
    else:
        sys.stdout.write(emit_report(report, args.format))
    return 0 if report.ok else 1


def _weights_basis(args) -> str:
    wanted = args.basis
    available = "standard" if args.algebra == "n1" else "pm"
    if wanted == "auto":
        return available
    if wanted != available:
        raise CliError(
            f"weights for {args.algebra} are defined in the {available} basis")
    return wanted


def _computed_weights(args):
    basis = _weights_basis(args)
    table = corpus.table(args.algebra, basis)
    grading = corpus.weights_entry(args.algebra).payload["grading_labels"]
    try:
        computed = weights(table, grading)
    except NotEigenvector as exc:
        raise CliError(str(exc)) from exc
    return basis, grading, table, computed


def _cmd_weights(args) -> int:
    basis, grading, table, computed = _computed_weights(args)
    if args.format == "text":
        lines = [f"{args.algebra} weights ({basis} basis) under ({', '.join(grading)})"]
        lines += [f"  {label} = ({', '.join(str(v) for v in computed[label])})"
                  for label, _ in table.basis]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        import json as _json
        payload = {
            "algebra": args.algebra, "basis": basis, "grading": list(grading),
            "weights": {label: [str(v) for v in computed[label]]
                        for label, _ in table.basis},
        }
        sys.stdout.write(_json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_split(args) -> int:
    basis, grading, table, computed = _computed_weights(args)
    split = triangular_split(computed)
    if args.format == "text":
        lines = [f"{args.algebra} triangular split ({basis} basis)"]
        lines += [f"  {key}: {' '.join(split[key])}"
                  for key in ("positive", "zero", "negative")]
        sys.stdout.write("\n".join(lines) + "\n")
    else:
        import json as _json
        payload = {"algebra": args.algebra, "basis": basis,
                   "split": {key: split[key] for key in ("positive", "zero", "negative")}}
        sys.stdout.write(_json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return 0


def _cmd_export(args) -> int:
    try:
        entry = corpus.load(args.entry)
    except corpus.UnknownId as exc:
        raise CliError(str(exc)) from exc
    if args.format == "definition":
        sys.stdout.write(emit_definition(entry))
        return 0
    table = _entry_table(entry, args.entry)
    sys.stdout.write(emit_table(table, args.format))
    return 0


_COMMANDS = {
    "verify": _cmd_verify,
    "extract": _cmd_extract,
    "jacobi": _cmd_jacobi,
    "weights": _cmd_weights,
    "split": _cmd_split,
    "export": _cmd_export,
}


def main(argv: Union[Sequence[str], None] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except corpus.UnknownId as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
