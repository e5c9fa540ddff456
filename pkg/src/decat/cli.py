"""Command line interface.

Single-invocation batch commands over schema/instance text files; exit
codes are the contract consumed by CI:

* 0: success (``verify``: every suite passed)
* 1: validation rejected the input, or a suite failed
* 2: a suite produced findings (``verify`` only)
* 3: operational error (missing file, bad format, oversized universe, bad
  command line)

Primary output on stdout is deterministic for fixed inputs and seed; logs
and timing go to stderr.  The environment variable ``DECAT_THREADS`` caps
internal parallelism (the current implementation runs sequentially, which
trivially respects any cap; outputs never depend on it).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import presets
from .canon import (
    canonical_form,
    canonical_relabeling,
    connected_components,
    normalize_bounds,
    raw_candidate_count,
)
from .core import Instance, Schema, validate_instance, validate_schema
from .exprs import ExprSyntaxError, UnknownIdentifier, eval_expr
from .harness import SUITES, run_suite
from .homs import count_homs, enumerate_homs
from .ring import NotAGroupError, build_basis, class_of, profile, table_of_marks
from .textio import (
    FormatError,
    detect_kind,
    format_instance,
    parse_instance_text,
    parse_schema_text,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_FINDING = 2
EXIT_ERROR = 3

UNIVERSE_GUARD = 1_000_000


class CliError(Exception):
    """Operational failure; message goes to stderr, exit code 3."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _schema_resolver(context_dir: Path | None):
    """Schemas resolve to a sibling ``<name>.schema`` file first, then to a
    bundled preset of that name."""

    def resolve(name: str) -> Schema:
        if context_dir is not None:
            candidate = context_dir / f"{name}.schema"
            if candidate.is_file():
                return parse_schema_text(
                    candidate.read_text(encoding="utf-8"), source=str(candidate)
                )
        try:
            return presets.load_schema(name)
        except KeyError:
            raise KeyError(name) from None

    return resolve


def _load_instance(path: str) -> Instance:
    text = _read(path)
    return parse_instance_text(
        text, _schema_resolver(Path(path).resolve().parent), source=path
    )


def _load_schema_arg(value: str) -> Schema:
    if Path(value).is_file():
        return parse_schema_text(_read(value), source=value)
    try:
        return presets.load_schema(value)
    except KeyError:
        raise CliError(
            f"{value!r} is neither a schema file nor a bundled schema "
            f"(bundled: {', '.join(presets.schema_names())})"
        ) from None


def _parse_bounds(text: str, schema: Schema) -> dict[str, int]:
    bounds: dict[str, int] = {}
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise CliError(f"bad bound {part!r}; expected NODE=N")
        node, _, num = part.partition("=")
        node, num = node.strip(), num.strip()
        if not num.isdigit():
            raise CliError(f"bad bound {part!r}; expected NODE=N")
        bounds[node] = int(num)
    try:
        return normalize_bounds(schema, bounds)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def _guard_universe(schema: Schema, bounds, force: bool) -> None:
    raw = raw_candidate_count(schema, bounds)
    if raw > UNIVERSE_GUARD and not force:
        raise CliError(
            f"universe has {raw} raw candidates (> {UNIVERSE_GUARD}); "
            "pass --force to enumerate anyway"
        )


def _labels(schema: Schema, extra: dict[str, Instance] | None = None) -> dict[bytes, str]:
    named: dict[bytes, str] = {}
    pool = dict(presets.instances_over(schema.name))
    pool.update(extra or {})
    for name in sorted(pool):
        inst = pool[name]
        if validate_instance(inst).ok:
            data = canonical_form(inst).data
            if data not in named or name < named[data]:
                named[data] = name
    return named


def _label_of(cf, labels: dict[bytes, str]) -> str:
    return labels.get(cf.data, f"cf:{cf.digest[:12]}")


def _load_defs(defs_dir: str | None) -> dict[str, Instance]:
    if defs_dir is None:
        return {name: presets.load_instance(name) for name in presets.instance_names()}
    root = Path(defs_dir)
    if not root.is_dir():
        raise CliError(f"--defs {defs_dir}: not a directory")
    resolver = _schema_resolver(root.resolve())
    out: dict[str, Instance] = {}
    for path in sorted(root.glob("*.inst")):
        inst = parse_instance_text(
            path.read_text(encoding="utf-8"), resolver, source=str(path)
        )
        if inst.name in out:
            raise CliError(f"instance name {inst.name!r} defined twice under {defs_dir}")
        out[inst.name] = inst
    return out


def _check_threads_env() -> None:
    raw = os.environ.get("DECAT_THREADS")
    if raw is None:
        return
    if not raw.isdigit() or int(raw) < 1:
        raise CliError(f"DECAT_THREADS={raw!r}: expected a positive integer")


# ---------------------------------------------------------------------------
# commands


def cmd_validate(args) -> int:
    text = _read(args.file)
    kind = detect_kind(text, source=args.file)
    if kind == "schema":
        result = validate_schema(parse_schema_text(text, source=args.file))
    else:
        inst = parse_instance_text(
            text, _schema_resolver(Path(args.file).resolve().parent), source=args.file
        )
        schema_result = validate_schema(inst.schema)
        if not schema_result.ok:
            for v in schema_result.violations:
                print(f"schema: {v}")
            return EXIT_FAIL
        result = validate_instance(inst)
    for v in result.violations:
        print(str(v))
    return EXIT_OK if result.ok else EXIT_FAIL


def _format_morphism_line(m) -> str:
    chunks = []
    for d in m.src.schema.nodes:
        pairs = " ".join(f"{x}->{m.components[d][x]}" for x in m.src.carriers[d])
        chunks.append(f"{d}: {pairs}".rstrip())
    return "; ".join(chunks)


def cmd_hom(args) -> int:
    C = _load_instance(args.source)
    A = _load_instance(args.target)
    if args.list:
        homs = enumerate_homs(C, A)
        for m in homs:
            print(_format_morphism_line(m))
        print(f"count {homs.count}")
    else:
        print(count_homs(C, A))
    return EXIT_OK


def cmd_decompose(args) -> int:
    F = _load_instance(args.file)
    labels = _labels(F.schema)
    counts: dict[bytes, tuple] = {}
    for part in connected_components(F).components:
        cf = canonical_form(part)
        entry = counts.get(cf.data)
        counts[cf.data] = (cf, (entry[1] + 1) if entry else 1)
    for data in sorted(counts):
        cf, mult = counts[data]
        print(f"{_label_of(cf, labels)} x{mult}")
    return EXIT_OK


def cmd_canon(args) -> int:
    F = _load_instance(args.file)
    cf, _ = canonical_relabeling(F)
    print(f"digest {cf.digest}")
    name = f"{F.name}_canon" if F.name else "canon"
    sys.stdout.write(format_instance(cf.representative, name=name))
    return EXIT_OK


def cmd_eval(args) -> int:
    defs = _load_defs(args.defs)
    schema = _load_schema_arg(args.schema) if args.schema else None
    try:
        result = eval_expr(args.expr, defs, schema=schema)
    except (ExprSyntaxError, UnknownIdentifier, ValueError) as exc:
        raise CliError(str(exc)) from exc
    if result.is_zero:
        print("0")
        return EXIT_OK
    labels = _labels(result.schema, {n: i for n, i in defs.items() if i.schema == result.schema})
    for cf, coeff in result.terms:
        print(f"{_label_of(cf, labels)} {coeff}")
    return EXIT_OK


def cmd_profile(args) -> int:
    F = _load_instance(args.file)
    bounds = _parse_bounds(args.upto, F.schema)
    _guard_universe(F.schema, bounds, args.force)
    basis = build_basis(F.schema, bounds)
    labels = _labels(F.schema)
    prof = profile(class_of(F), basis)
    for cf, count in zip(basis.forms, prof.counts):
        print(f"{_label_of(cf, labels)} {count}")
    return EXIT_OK


def cmd_enumerate(args) -> int:
    schema = _load_schema_arg(args.schema)
    bounds = _parse_bounds(args.upto, schema)
    _guard_universe(schema, bounds, args.force)
    from .canon import enumerate_instances

    for i, cf in enumerate(enumerate_instances(schema, bounds)):
        if i:
            print()
        sys.stdout.write(format_instance(cf.representative, name=f"cf_{cf.digest[:12]}"))
    return EXIT_OK


def cmd_marks(args) -> int:
    schema = _load_schema_arg(args.schema)
    bounds = _parse_bounds(args.upto, schema)
    _guard_universe(schema, bounds, args.force)
    try:
        marks = table_of_marks(schema, bounds)
    except NotAGroupError as exc:
        raise CliError(str(exc)) from exc
    for row in marks.rows:
        print(" ".join(str(v) for v in row))
    return EXIT_OK


def _applicable_suites(schema: Schema, bounds) -> list[str]:
    names = ["extensive", "decomposition", "connectedness", "hom_morphism",
             "combinatorial", "selftest"]
    if len(schema.nodes) == 1:
        try:
            table_of_marks(schema, bounds)
        except NotAGroupError:
            print(f"skipping burnside: {schema.name!r} is not group-like", file=sys.stderr)
        else:
            names.insert(5, "burnside")
    return names


def cmd_verify(args) -> int:
    schema = _load_schema_arg(args.schema)
    bounds = _parse_bounds(args.upto, schema)
    _guard_universe(schema, bounds, args.force)
    if args.suite == "all":
        names = _applicable_suites(schema, bounds)
    elif args.suite in SUITES:
        names = [args.suite]
    else:
        raise CliError(
            f"unknown suite {args.suite!r} (choose from {', '.join(SUITES)}, all)"
        )
    reports = []
    for name in names:
        report = run_suite(name, schema, bounds, seed=args.seed, trials=args.trials)
        reports.append(report)
        print(report.text())
        print(f"[{report.suite}] elapsed {report.elapsed:.2f}s", file=sys.stderr)
    if args.report:
        if len(reports) == 1:
            doc = reports[0].to_jsonable()
        else:
            doc = {"reports": [r.to_jsonable() for r in reports]}
        Path(args.report).write_text(
            json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    worst = EXIT_OK
    for r in reports:
        if r.status == "FAIL":
            worst = EXIT_FAIL
        elif r.status == "FINDING" and worst == EXIT_OK:
            worst = EXIT_FINDING
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="decat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate a schema or instance file")
    p.add_argument("file")
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("hom", help="count or list morphisms between two instances")
    p.add_argument("source")
    p.add_argument("target")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--count", action="store_true", default=True)
    group.add_argument("--list", action="store_true")
    p.set_defaults(fn=cmd_hom)

    p = sub.add_parser("decompose", help="connected components with multiplicities")
    p.add_argument("file")
    p.set_defaults(fn=cmd_decompose)

    p = sub.add_parser("canon", help="canonical digest and canonical relabeling")
    p.add_argument("file")
    p.set_defaults(fn=cmd_canon)

    p = sub.add_parser("eval", help="evaluate a class-ring expression")
    p.add_argument("expr")
    p.add_argument("--defs", help="directory of .inst files naming the identifiers")
    p.add_argument("--schema", help="schema for expressions without identifiers")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("profile", help="hom-count profile over a generated basis")
    p.add_argument("file")
    p.add_argument("--upto", required=True, help="carrier bounds, e.g. V=2,E=2")
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=cmd_profile)

    p = sub.add_parser("enumerate", help="list canonical representatives")
    p.add_argument("--schema", required=True)
    p.add_argument("--upto", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=cmd_enumerate)

    p = sub.add_parser("marks", help="table of marks of a group-like schema")
    p.add_argument("--schema", required=True)
    p.add_argument("--upto", required=True)
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=cmd_marks)

    p = sub.add_parser("verify", help="run law-verification suites")
    p.add_argument("--suite", required=True, help=f"{', '.join(SUITES)}, or all")
    p.add_argument("--schema", required=True)
    p.add_argument("--upto", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--report", help="write the machine-readable report here")
    p.add_argument("--force", action="store_true")
    p.set_defaults(fn=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_threads_env()
        return args.fn(args)
    except CliError as exc:
        print(f"decat: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FormatError as exc:
        print(f"decat: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
