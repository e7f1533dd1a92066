"""Command-line front end: ``triadkit VERB ...``.

Exit status is 0 on success, 1 when the input is rejected (diagnostics go
to stderr) and 2 on usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dsl
from .access import AccessPolicy, OrgPosition, READ, Target, WRITE, authorize
from .appraisal import AppraisalModel, Assignment
from .dsl import SourceDocument, parse_document, parse_expression
from .errors import AccessDenied, ParseError, TriadError, UnknownRole, UnknownUnit
from .events import Event, PersonnelEngine, replay
from .integrator import SchemaHistory, merge_component, rollback
from .integrity import verify_integrity
from .query import evaluate_expression, result_lines
from .report import build_report, render_figures
from .values import parse_number


class Output:
    """Plain tab-separated lines, or one JSON object per line."""

    def __init__(self, fmt: str, stream=None):
        self.fmt = fmt
        self.stream = stream or sys.stdout

    def row(self, text: str, **fields):
        if self.fmt == "json-lines":
            print(json.dumps(fields or {"line": text}, ensure_ascii=False), file=self.stream)
        else:
            print(text, file=self.stream)


def _error(message: str):
    print(message, file=sys.stderr)


def _load(path: str, resolve: bool = True):
    """Parse a file or report its diagnostics; returns None on failure."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        _error(f"{path}: {e.strerror}")
        return None
    result = parse_document(SourceDocument(text, path), resolve=resolve)
    for d in result.diagnostics:
        _error(str(d))
    return result.schema


# -- verbs -----------------------------------------------------------------------

def cmd_load(args, out: Output) -> int:
    status = 0
    for path in args.files:
        schema = _load(path)
        if schema is None:
            status = 1
            continue
        for line in dsl.print_canonical(schema).splitlines():
            out.row(line, file=path, declaration=line)
    return status


def cmd_eval(args, out: Output) -> int:
    schema = _load(args.schema)
    if schema is None:
        return 1
    if args.query is not None:
        expr, diags = parse_expression(args.query)
        if diags:
            for d in diags:
                _error(f"<query>:{d.line}:{d.column}: error: {d.message}")
            return 1
        exprs = [expr]
    else:
        exprs = list(schema.evals)
    status = 0
    for expr in exprs:
        try:
            lines = result_lines(schema, expr, evaluate_expression(schema, expr))
        except TriadError as e:
            _error(f"{expr.to_text()}: {type(e).__name__}: {e}")
            status = 1
            continue
        if len(exprs) > 1:
            out.row(f"# {expr.to_text()}", query=expr.to_text())
        for line in lines:
            out.row(line, query=expr.to_text(), result=line)
    return status


def cmd_verify(args, out: Output) -> int:
    schema = _load(args.schema, resolve=False)
    if schema is None:
        return 1
    issues = verify_integrity(schema)
    for issue in issues:
        line, col = schema.position(*issue.kind_key) or (1, 1)
        out.row(f"{args.schema}:{line}:{col}: {issue}", file=args.schema, line=line,
                column=col, category=issue.category, detail=issue.detail)
    if not issues:
        out.row("ok", status="ok")
    return 1 if issues else 0


def _history(args):
    return SchemaHistory.load(args.history) if args.history else None


def cmd_merge(args, out: Output) -> int:
    comp = _load(args.component)
    if comp is None:
        return 1
    history = _history(args)
    if args.base:
        base = _load(args.base)
        if base is None:
            return 1
    elif history is not None and history.current is not None:
        base = history.schema()
    else:
        _error("merge needs --base or a non-empty --history")
        return 2
    try:
        merged, report = merge_component(base, comp)
    except TriadError as e:
        _error(f"{args.component}: {type(e).__name__}: {e}")
        return 1
    for line in report.lines():
        out.row(line, entry=line)
    if not report.accepted:
        _error(f"merge rejected: {len(report.rejected)} unresolved conflict(s)")
        return 1
    out.row("no-op" if report.no_op else "merged", status="no-op" if report.no_op else "merged")
    if history is not None:
        if history.current is None or (args.base and history.text() != dsl.print_canonical(base)):
            history.commit(base, "base")
        if not report.no_op:
            label = comp.component.name if comp.component else Path(args.component).stem
            history.commit(merged, f"merge-{label}")
        history.save(args.history)
        out.row(f"version\t{history.current}", version=history.current)
    if args.output:
        Path(args.output).write_text(dsl.print_canonical(merged), encoding="utf-8")
    elif history is None:
        for line in dsl.print_canonical(merged).splitlines():
            out.row(line, declaration=line)
    return 0


def cmd_rollback(args, out: Output) -> int:
    history = SchemaHistory.load(args.history)
    try:
        rollback(history, args.version)
    except TriadError as e:
        _error(f"{args.history}: {type(e).__name__}: {e}")
        return 1
    history.save(args.history)
    out.row(f"version\t{history.current}\trollback-to-{args.version}",
            version=history.current, restored=args.version)
    return 0


def _session_for(schema, user: str | None, policy: AccessPolicy | None = None):
    if user is None:
        return None
    policy = policy or AccessPolicy.from_schema(schema)
    if user not in schema.users:
        raise UnknownRole(f"unknown user {user!r}")
    session, _ = policy.open_session(OrgPosition.from_decl(schema.users[user]))
    return session


def cmd_replay(args, out: Output) -> int:
    schema = _load(args.schema)
    if schema is None:
        return 1
    try:
        engine = PersonnelEngine(schema)
        session = _session_for(schema, args.user)
    except TriadError as e:
        _error(f"{type(e).__name__}: {e}")
        return 1
    lines = Path(args.events).read_text(encoding="utf-8").splitlines()
    events, status = [], 0
    for n, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            events.append((n, Event.parse(text)))
        except ValueError as e:
            _error(f"{args.events}:{n}: {e}")
            status = 1
    state = engine.initial_state()
    outcomes = replay(engine, state, [ev for _, ev in events], session)
    for (n, _), (ev, result, state) in zip(events, outcomes):
        if isinstance(result, Exception):
            _error(f"{args.events}:{n}: {ev}: {type(result).__name__}: {result}")
            out.row(f"{n}\t{ev}\tfailed\t{type(result).__name__}", line=n, event=str(ev),
                    status="failed", error=type(result).__name__)
            status = 1
        else:
            out.row(f"{n}\t{ev}\tok\tfired={len(result.fired)}", line=n, event=str(ev),
                    status="ok", fired=len(result.fired))
    for line in state.serialize().splitlines():
        out.row(line, state=line)
    return status


def cmd_simulate(args, out: Output) -> int:
    schema = _load(args.schema)
    if schema is None:
        return 1
    policy = AccessPolicy.from_schema(schema)
    sessions = {}
    status = 0
    lines = Path(args.ops).read_text(encoding="utf-8").splitlines()
    for n, raw in enumerate(lines, 1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        words = text.split()
        try:
            if words[0] in ("open", "close") and len(words) == 2:
                user = words[1]
                if words[0] == "open":
                    sessions[user] = _session_for(schema, user, policy)
                    result = f"opened {sessions[user].id}"
                else:
                    if user not in sessions:
                        raise UnknownRole(f"{user} has no session")
                    policy.close_session(sessions[user])
                    result = f"closed {sessions[user].id}"
            elif len(words) in (3, 4) and words[1] in (READ, WRITE):
                user, op, kind = words[0], words[1], words[2]
                unit = words[3] if len(words) == 4 else None
                if user not in sessions:
                    raise UnknownRole(f"{user} has no session")
                if unit is not None and unit not in schema.units:
                    raise UnknownUnit(f"unknown unit {unit!r}")
                result = str(authorize(sessions[user], Target(kind, unit), op))
            else:
                raise ValueError("expected 'open USER', 'close USER' or "
                                 "'USER read|write data|metadata [UNIT]'")
        except (TriadError, ValueError) as e:
            _error(f"{args.ops}:{n}: {type(e).__name__}: {e}")
            out.row(f"{n}\t{text}\terror", line=n, op=text, result="error")
            status = 1
            continue
        out.row(f"{n}\t{text}\t{result}", line=n, op=text, result=result)
    return status


def _parse_assignment(text: str) -> Assignment:
    expr, diags = parse_expression(f"F({text})")
    if diags or len(expr.steps) != 1:
        raise ValueError(f"bad assignment {text!r}; expected s={{...}} or p={{...}}")
    kind, values = expr.steps[0]
    return Assignment(kind, values)


def cmd_report(args, out: Output) -> int:
    schema = _load(args.schema)
    if schema is None:
        return 1
    try:
        model = AppraisalModel.from_schema(schema, args.functional)
        metrics = args.metrics.split(",") if args.metrics else sorted(schema.metrics)
        sequence = [_parse_assignment(a) for a in args.step]
        weights = {}
        for w in args.weight:
            name, _, value = w.partition("=")
            weights[name] = parse_number(value.strip())
        units = args.unit or None
        report = build_report(model, metrics, sequence, units, weights)
    except (TriadError, ValueError) as e:
        _error(f"{type(e).__name__}: {e}")
        return 1
    for line in report.lines():
        out.row(line, row=line.split("\t"))
    if args.figures:
        for path in render_figures(report, args.figures):
            _error(f"wrote {path}")
    return 0


# -- parser ----------------------------------------------------------------------

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="triadkit", description="Data object models: query, merge, replay.")
    p.add_argument("--format", choices=("text", "json-lines"), default="text")
    sub = p.add_subparsers(dest="verb", parser_class=_Parser)

    s = sub.add_parser("load", help="parse documents and print them canonically")
    s.add_argument("files", nargs="+")
    s.set_defaults(func=cmd_load)

    s = sub.add_parser("eval", help="run a query, or the document's eval statements")
    s.add_argument("--schema", required=True)
    s.add_argument("--query")
    s.set_defaults(func=cmd_eval)

    s = sub.add_parser("verify", help="report integrity problems")
    s.add_argument("--schema", required=True)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("merge", help="merge a component into a base schema")
    s.add_argument("--base")
    s.add_argument("--component", required=True)
    s.add_argument("--history", help="history directory to append the result to")
    s.add_argument("--output", help="write the merged schema here")
    s.set_defaults(func=cmd_merge)

    s = sub.add_parser("rollback", help="restore an earlier version as a new version")
    s.add_argument("--history", required=True)
    s.add_argument("--version", type=int, required=True)
    s.set_defaults(func=cmd_rollback)

    s = sub.add_parser("replay", help="dispatch personnel events from a file")
    s.add_argument("--schema", required=True)
    s.add_argument("--events", required=True)
    s.add_argument("--user", help="dispatch inside this user's session")
    s.set_defaults(func=cmd_replay)

    s = sub.add_parser("simulate-session", help="replay session operations, print decisions")
    s.add_argument("--schema", required=True)
    s.add_argument("--ops", required=True)
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("report", help="generalization analysis and unit scores")
    s.add_argument("--schema", required=True)
    s.add_argument("--functional")
    s.add_argument("--metrics", help="comma-separated metric names (default: all)")
    s.add_argument("--step", action="append", default=[],
                   help="assignment step such as 's={development,support}'; repeatable")
    s.add_argument("--unit", action="append", default=[], help="unit to score; repeatable")
    s.add_argument("--weight", action="append", default=[], help="METRIC=NUMBER; repeatable")
    s.add_argument("--figures", help="directory for PNG figures")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.verb is None:
        parser.print_usage(sys.stderr)
        return 2
    out = Output(args.format)
    try:
        return args.func(args, out)
    except ParseError as e:
        for d in e.diagnostics:
            _error(str(d))
        return 1
    except AccessDenied as e:
        _error(f"AccessDenied: {e}")
        return 1
    except OSError as e:
        _error(f"{e.filename}: {e.strerror}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
