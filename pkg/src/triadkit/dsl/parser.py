"""Recursive-descent parser for ``.tdk`` documents.

One token of lookahead.  On a syntax error the parser records a diagnostic,
rewinds to the start of the statement and skips to the next ``;`` at brace
depth zero, so one run can report several errors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..formula import (
    COMPARISONS, KIND_ALIASES, KINDS, And, Application, Attr, Compare, Comprehension,
    FrameAtom, HoldsQuery, Lit, Member, Not, Or, PredAtom, SetLit, Truth, Unique, Var,
)
from ..model import Sort
from ..schema import (
    BUILTIN_EVENTS, Component, ComponentDecl, ConceptDecl, CounterAction, FailAction,
    FrameAction, FunctionalDecl, IndividualDecl, MetaPredicate, Metric, OrgUnitDecl,
    Placeholder, RoleDecl, Schema, ScriptDecl, SetAction, UserDecl, VacancyAction,
)
from ..semnet import Frame
from ..values import SCALAR_KINDS, Const, is_number, parse_number
from .lexer import EOF, ERROR, IDENT, NUMBER, PLACEHOLDER, PUNCT, STRING, Token, tokenize

FORMULA_KEYWORDS = {"and", "or", "not", "in", "true", "false"}
PLACEHOLDERS = {"subject", "unit"}


@dataclass(frozen=True)
class SourceDocument:
    text: str
    origin: str = "<inline>"


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    message: str
    severity: str = "error"
    origin: str = "<inline>"

    def __str__(self):
        return f"{self.origin}:{self.line}:{self.column}: {self.severity}: {self.message}"


@dataclass
class ParseResult:
    schema: Schema | None
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.schema is not None

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


class _SyntaxError(Exception):
    def __init__(self, token: Token, message: str):
        super().__init__(message)
        self.token = token
        self.message = message


class _Builder:
    """Mutable accumulator for declarations; detects duplicates."""

    def __init__(self):
        self.sorts, self.concepts, self.relations = {}, {}, {}
        self.units, self.roles, self.individuals = {}, {}, {}
        self.predicates, self.metrics, self.functionals = {}, {}, {}
        self.users, self.governs, self.priorities = {}, {}, {}
        self.constants, self.events = set(), set()
        self.frames = set()
        self.scripts, self.evals = [], []
        self.component = None
        self.positions = {}

    def add(self, kind, key, table, decl, token, errors):
        if key in table:
            first = self.positions.get((kind, key))
            where = f" (first declared at line {first[0]})" if first else ""
            errors.append((token, f"duplicate {kind} {key!s}{where}"))
            return
        if isinstance(table, set):
            table.add(decl)
        else:
            table[key] = decl
        self.positions[(kind, key)] = (token.line, token.column)

    def build(self) -> Schema:
        # scripts are kept grouped by event; the relative order within an
        # event is the dispatch order and is preserved
        order = sorted(range(len(self.scripts)), key=lambda i: self.scripts[i].event)
        moved = {("script", old): self.positions.pop(("script", old))
                 for old in order if ("script", old) in self.positions}
        for new, old in enumerate(order):
            if ("script", old) in moved:
                self.positions[("script", new)] = moved[("script", old)]
        self.scripts = [self.scripts[i] for i in order]
        return Schema(
            sorts=self.sorts, constants=frozenset(self.constants), concepts=self.concepts,
            relations=self.relations, units=self.units, roles=self.roles,
            events=frozenset(self.events), individuals=self.individuals,
            frames=frozenset(self.frames), predicates=self.predicates, metrics=self.metrics,
            functionals=self.functionals, users=self.users, governs=self.governs,
            priorities=self.priorities, scripts=tuple(self.scripts), evals=tuple(self.evals),
            component=self.component, positions=self.positions,
        )


class Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    # -- token helpers ------------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.i + k, len(self.tokens) - 1)]

    def advance(self) -> Token:
        t = self.tok
        if t.kind == ERROR:
            raise _SyntaxError(t, t.text)
        if t.kind != EOF:
            self.i += 1
        return t

    def fail(self, expected: str):
        t = self.tok
        if t.kind == ERROR:
            raise _SyntaxError(t, t.text)
        raise _SyntaxError(t, f"expected {expected}, found {t}")

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind == PUNCT and t.text == text

    def at_word(self, word: str) -> bool:
        t = self.tok
        return t.kind == IDENT and t.text == word

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.advance()

    def expect_word(self, word: str) -> Token:
        if not self.at_word(word):
            self.fail(repr(word))
        return self.advance()

    def ident(self, what: str = "identifier") -> str:
        if self.tok.kind != IDENT:
            self.fail(what)
        return self.advance().text

    def integer(self, what: str = "integer") -> int:
        if self.tok.kind != NUMBER or "." in self.tok.text:
            self.fail(what)
        return int(self.advance().text)

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def accept_word(self, word: str) -> bool:
        if self.at_word(word):
            self.advance()
            return True
        return False

    def ident_list(self) -> list[str]:
        names = [self.ident()]
        while self.accept(","):
            names.append(self.ident())
        return names

    # -- values ---------------------------------------------------------

    def value(self):
        t = self.tok
        if t.kind == IDENT:
            self.advance()
            return Const(t.text)
        if t.kind == NUMBER:
            self.advance()
            return parse_number(t.text)
        if t.kind == STRING:
            self.advance()
            return t.value
        if self.at("-") and self.peek().kind == NUMBER:
            self.advance()
            return -parse_number(self.advance().text)
        self.fail("a value")

    def value_set(self) -> frozenset:
        """``{ v, ... }`` with duplicates rejected."""
        self.expect("{")
        items = []
        if not self.at("}"):
            start = self.tok
            items.append(self.value())
            while self.accept(","):
                start = self.tok
                v = self.value()
                if v in items:
                    raise _SyntaxError(start, "duplicate value in set")
                items.append(v)
        self.expect("}")
        return frozenset(items)

    def value_map(self) -> dict:
        self.expect("{")
        out = {}
        if not self.at("}"):
            while True:
                t = self.tok
                name = self.ident("attribute name")
                if name in out:
                    raise _SyntaxError(t, f"attribute {name} given twice")
                self.expect("=")
                out[name] = self.value()
                if not self.accept(","):
                    break
        self.expect("}")
        return out

    def number(self):
        v = self.value()
        if not is_number(v):
            self.fail("a number")
        return v

    # -- formulas ---------------------------------------------------------

    def formula(self, var: str):
        left = self.conjunction(var)
        while self.accept_word("or"):
            left = Or(left, self.conjunction(var))
        return left

    def conjunction(self, var: str):
        left = self.unary(var)
        while self.accept_word("and"):
            left = And(left, self.unary(var))
        return left

    def unary(self, var: str):
        if self.accept_word("not"):
            return Not(self.unary(var))
        if self.accept("("):
            inner = self.formula(var)
            self.expect(")")
            return inner
        return self.atom(var)

    def atom(self, var: str):
        t = self.tok
        nxt = self.peek()
        if t.kind == IDENT and t.text in ("true", "false") and not (
                nxt.kind == PUNCT and nxt.text in (".",) + COMPARISONS) and not (
                nxt.kind == IDENT and nxt.text == "in"):
            self.advance()
            return Truth(t.text == "true")
        if t.kind == IDENT and t.text != var and nxt.kind == PUNCT and nxt.text == "(":
            name = self.advance().text
            self.expect("(")
            first = self.term(var)
            if self.accept(","):
                second = self.term(var)
                self.expect(")")
                return FrameAtom(name, first, second)
            self.expect(")")
            return PredAtom(name, first)
        left = self.term(var)
        if self.accept_word("in"):
            if self.at("{"):
                return Member(left, SetLit(self.value_set()))
            return Member(left, self.term(var))
        for op in COMPARISONS:
            if self.at(op):
                self.advance()
                return Compare(op, left, self.term(var))
        self.fail("a comparison or 'in'")

    def term(self, var: str):
        t = self.tok
        if t.kind == IDENT:
            if t.text in FORMULA_KEYWORDS:
                self.fail("a term")
            self.advance()
            base = Var(t.text) if t.text == var else Lit(Const(t.text))
        else:
            base = Lit(self.value())
        while self.accept("."):
            base = Attr(base, self.ident("attribute name"))
        return base

    def domain(self):
        if self.at("{"):
            return SetLit(self.value_set())
        return self.ident("domain name")

    def comprehension(self) -> Comprehension:
        self.expect("{")
        var = self.ident("variable")
        if var in FORMULA_KEYWORDS:
            raise _SyntaxError(self.tokens[self.i - 1], f"{var!r} cannot name a variable")
        self.expect(":")
        dom = self.domain()
        self.expect("|")
        body = self.formula(var)
        self.expect("}")
        return Comprehension(var, dom, body)

    def expression(self):
        if self.accept_word("unique"):
            return Unique(self.comprehension())
        if self.at("{"):
            return self.comprehension()
        if self.accept_word("holds"):
            rel = self.ident("relation")
            self.expect("(")
            a = self.frame_value()
            self.expect(",")
            b = self.frame_value()
            self.expect(")")
            return HoldsQuery(rel, a, b)
        target = self.ident("functional or metric name")
        steps = []
        while self.accept("("):
            t = self.tok
            kind = self.ident("assignment kind")
            if kind not in KIND_ALIASES:
                raise _SyntaxError(t, f"unknown assignment kind {kind!r} (use s or p)")
            self.expect("=")
            values = self.value_set()
            self.expect(")")
            steps.append((KIND_ALIASES[kind], values))
        return Application(target, tuple(steps))

    def frame_value(self):
        t = self.tok
        v = self.value()
        if isinstance(v, str):
            raise _SyntaxError(t, "frame arguments are constants or integers")
        return v

    # -- statements ---------------------------------------------------------

    def statement(self, b: _Builder, errors: list):
        t = self.tok
        if t.kind != IDENT:
            self.fail("a declaration keyword")
        handler = getattr(self, f"_stmt_{t.text}", None)
        if handler is None:
            raise _SyntaxError(t, f"unknown statement {t.text!r}")
        self.advance()
        handler(t, b, errors)
        self.expect(";")

    def _stmt_sort(self, t, b, errors):
        name = self.ident("sort name")
        if name in SCALAR_KINDS:
            raise _SyntaxError(self.tokens[self.i - 1], f"{name!r} is a builtin sort")
        if self.accept(":"):
            kt = self.tok
            kind = self.ident("scalar kind")
            if kind not in SCALAR_KINDS:
                raise _SyntaxError(kt, f"unknown scalar kind {kind!r}")
            sort = Sort(name, kind=kind)
        else:
            self.expect("=")
            st = self.tok
            carrier = self.value_set()
            if not carrier:
                raise _SyntaxError(st, "a finite sort needs at least one value")
            sort = Sort(name, carrier=carrier)
        b.add("sort", name, b.sorts, sort, t, errors)

    def _stmt_constant(self, t, b, errors):
        for name in self.ident_list():
            b.add("constant", name, b.constants, name, t, errors)

    def _stmt_concept(self, t, b, errors):
        name = self.ident("concept name")
        self.expect("{")
        attrs = []
        if not self.at("}"):
            while True:
                at = self.tok
                attr = self.ident("attribute name")
                if attr in (a for a, _ in attrs):
                    raise _SyntaxError(at, f"attribute {attr} declared twice")
                self.expect(":")
                attrs.append((attr, self.ident("sort name")))
                if not self.accept(","):
                    break
        self.expect("}")
        b.add("concept", name, b.concepts, ConceptDecl(name, tuple(attrs)), t, errors)

    def _stmt_individual(self, t, b, errors):
        ident = self.ident("individual id")
        self.expect(":")
        concept = self.ident("concept name")
        key = self.value_map() if self.accept_word("key") else {}
        values = self.value_map() if self.accept_word("values") else {}
        b.add("individual", ident, b.individuals, IndividualDecl(ident, concept, key, values),
              t, errors)

    def _stmt_relation(self, t, b, errors):
        name = self.ident("relation name")
        self.expect("/")
        at = self.tok
        arity = self.integer("arity")
        if arity != 2:
            raise _SyntaxError(at, f"relation {name} has arity {arity}; relations are dyadic")
        b.add("relation", name, b.relations, 2, t, errors)

    def _stmt_frame(self, t, b, errors):
        rel = self.ident("relation name")
        self.expect("(")
        subj = self.frame_value()
        self.expect(",")
        obj = self.frame_value()
        self.expect(")")
        frame = Frame(rel, subj, obj)
        if frame not in b.frames:
            b.add("frame", frame, b.frames, frame, t, errors)

    def _stmt_level(self, t, b, errors):
        lt = self.tok
        level = self.integer("level number")
        if level < 1:
            raise _SyntaxError(lt, "predicate levels start at 1")
        self.expect_word("predicate")
        name = self.ident("predicate name")
        self.expect("=")
        comp = self.comprehension()
        pred = MetaPredicate(name, level, comp.var, comp.domain, comp.body)
        b.add("predicate", name, b.predicates, pred, t, errors)

    def _stmt_metric(self, t, b, errors):
        name = self.ident("metric name")
        depends = []
        if self.accept_word("depends"):
            self.expect_word("on")
            while True:
                kt = self.tok
                kind = self.ident("assignment kind")
                if kind not in KIND_ALIASES:
                    raise _SyntaxError(kt, f"unknown assignment kind {kind!r}")
                kind = KIND_ALIASES[kind]
                if kind in depends:
                    raise _SyntaxError(kt, f"{kind} listed twice")
                depends.append(kind)
                if not self.accept(","):
                    break
        table = {}
        if self.accept("{"):
            if not self.at("}"):
                while True:
                    et = self.tok
                    label = self.metric_label()
                    if len(label) != len(depends):
                        raise _SyntaxError(
                            et, f"label has {len(label)} values, metric depends on {len(depends)}")
                    self.expect("->")
                    cname = self.ident("component name")
                    value = self.number() if self.accept("=") else None
                    order = [depends.index(k) for k in KINDS if k in depends]
                    label = tuple(label[i] for i in order)
                    if label in table:
                        raise _SyntaxError(et, "duplicate metric label")
                    table[label] = Component(cname, value)
                    if not self.accept(","):
                        break
            self.expect("}")
        depends_sorted = tuple(k for k in KINDS if k in depends)
        b.add("metric", name, b.metrics, Metric(name, depends_sorted, table), t, errors)

    def metric_label(self) -> tuple:
        if self.accept("("):
            items = []
            if not self.at(")"):
                items.append(self.value())
                while self.accept(","):
                    items.append(self.value())
            self.expect(")")
            return tuple(items)
        return (self.value(),)

    def _stmt_org(self, t, b, errors):
        name = self.ident("unit name")
        parent = self.ident("parent unit") if self.accept_word("under") else None
        vac = self.integer() if self.accept_word("vacancies") else 0
        enr = self.integer() if self.accept_word("enrolled") else 0
        b.add("org", name, b.units, OrgUnitDecl(name, parent, vac, enr), t, errors)

    def _stmt_role(self, t, b, errors):
        name = self.ident("role name")
        metadata, writes, requires = "read", "unit", ()
        if self.accept_word("metadata"):
            mt = self.tok
            metadata = self.ident("none or read")
            if metadata not in ("none", "read"):
                raise _SyntaxError(mt, "role metadata rights are none or read")
        if self.accept_word("writes"):
            wt = self.tok
            writes = self.ident("unit or subtree")
            if writes not in ("unit", "subtree"):
                raise _SyntaxError(wt, "role write scope is unit or subtree")
        if self.accept_word("requires"):
            requires = tuple(sorted(set(self.ident_list())))
        b.add("role", name, b.roles, RoleDecl(name, metadata, writes, requires), t, errors)

    def _stmt_user(self, t, b, errors):
        name = self.ident("user name")
        self.expect_word("at")
        unit = self.ident("unit name")
        self.expect_word("role")
        role = self.ident("role name")
        admin = self.accept_word("admin")
        grants = tuple(sorted(set(self.ident_list()))) if self.accept_word("grant") else ()
        b.add("user", name, b.users, UserDecl(name, unit, role, admin, grants), t, errors)

    def _stmt_event(self, t, b, errors):
        et = self.tok
        name = self.ident("event name")
        if name in BUILTIN_EVENTS:
            raise _SyntaxError(et, f"{name} is a builtin event")
        b.add("event", name, b.events, name, t, errors)

    def _stmt_script(self, t, b, errors):
        self.expect_word("on")
        event = self.ident("event name")
        concept = self.ident("concept name") if self.accept_word("concept") else None
        unit = self.ident("unit name") if self.accept_word("unit") else None
        self.expect("{")
        actions = []
        while not self.at("}"):
            actions.append(self.action())
            if not self.accept(";"):
                break
        self.expect("}")
        if not actions:
            raise _SyntaxError(t, "a script needs at least one action")
        b.positions[("script", len(b.scripts))] = (t.line, t.column)
        b.scripts.append(ScriptDecl(event, concept, unit, tuple(actions)))

    def action(self):
        t = self.tok
        word = self.ident("action")
        if word == "set":
            attr = self.ident("attribute name")
            self.expect("=")
            return SetAction(attr, self.action_value())
        if word == "frame":
            rel = self.ident("relation name")
            self.expect("(")
            a = self.action_value()
            self.expect(",")
            c = self.action_value()
            self.expect(")")
            return FrameAction(rel, a, c)
        if word == "vacancy":
            unit = self.action_value()
            return VacancyAction(unit, self.delta())
        if word == "counter":
            name = self.ident("counter name")
            return CounterAction(name, self.delta())
        if word == "fail":
            if self.tok.kind != STRING:
                self.fail("a message string")
            return FailAction(self.advance().value)
        raise _SyntaxError(t, f"unknown action {word!r}")

    def action_value(self):
        t = self.tok
        if t.kind == PLACEHOLDER:
            if t.text not in PLACEHOLDERS:
                raise _SyntaxError(t, f"unknown placeholder ${t.text}")
            self.advance()
            return Placeholder(t.text)
        return self.value()

    def delta(self) -> int:
        if self.accept("+="):
            return self.integer()
        if self.accept("-="):
            return -self.integer()
        self.fail("'+=' or '-='")

    def _stmt_functional(self, t, b, errors):
        name = self.ident("functional name")
        self.expect_word("over")
        concept = self.ident("concept name")
        b.add("functional", name, b.functionals, FunctionalDecl(name, concept), t, errors)

    def _stmt_component(self, t, b, errors):
        name = self.ident("component name")
        requires = tuple(sorted(set(self.ident_list()))) if self.accept_word("requires") else ()
        if b.component is not None:
            raise _SyntaxError(t, "only one component statement per document")
        b.component = ComponentDecl(name, requires)
        b.positions[("component", name)] = (t.line, t.column)

    def _stmt_govern(self, t, b, errors):
        if self.accept("*"):
            name = "*"
        else:
            name = self.ident("declaration name or *")
        self.expect_word("by")
        unit = self.ident("unit name")
        b.add("govern", name, b.governs, unit, t, errors)

    def _stmt_priority(self, t, b, errors):
        unit = self.ident("unit name")
        self.expect("=")
        b.add("priority", unit, b.priorities, self.integer("rank"), t, errors)

    def _stmt_eval(self, t, b, errors):
        expr = self.expression()
        b.positions[("eval", len(b.evals))] = (t.line, t.column)
        b.evals.append(expr)

    # -- driver ---------------------------------------------------------------

    def recover(self, start: int):
        self.i = start
        depth = 0
        while self.tok.kind != EOF:
            t = self.tokens[self.i]
            self.i += 1
            if t.kind == PUNCT:
                if t.text == "{":
                    depth += 1
                elif t.text == "}":
                    depth = max(0, depth - 1)
                elif t.text == ";" and depth == 0:
                    return
        # consumed to EOF

    def parse(self) -> tuple[_Builder, list[tuple[Token, str]]]:
        b = _Builder()
        errors: list[tuple[Token, str]] = []
        while self.tok.kind != EOF:
            start = self.i
            try:
                self.statement(b, errors)
            except _SyntaxError as e:
                errors.append((e.token, e.message))
                self.recover(start)
                if self.i == start:  # pragma: no cover - recover always moves
                    self.i += 1
        return b, errors


def parse_expression(text: str):
    """Parse a standalone query expression (used by the CLI)."""
    p = Parser(text)
    try:
        expr = p.expression()
        p.accept(";")
        if p.tok.kind != EOF:
            p.fail("end of query")
    except _SyntaxError as e:
        return None, [Diagnostic(e.token.line, e.token.column, e.message)]
    return expr, []


def parse_document(doc: SourceDocument | str, *, resolve: bool = True) -> ParseResult:
    """Parse a document into a schema bundle or a list of diagnostics.

    With ``resolve`` the integrity checker runs as well and its findings
    become error diagnostics.  Documents carrying a ``component`` statement
    skip resolution: they legitimately reference declarations of the base
    they will be merged into.
    """
    if isinstance(doc, str):
        doc = SourceDocument(doc)
    parser = Parser(doc.text)
    builder, errors = parser.parse()
    diags = [Diagnostic(t.line, t.column, msg, "error", doc.origin) for t, msg in errors]
    if diags:
        return ParseResult(None, diags)
    schema = builder.build()
    if resolve and schema.component is None:
        from ..integrity import verify_integrity

        for issue in verify_integrity(schema):
            line, col = schema.position(issue.kind_key[0], issue.kind_key[1]) or (1, 1)
            diags.append(Diagnostic(line, col, str(issue), "error", doc.origin))
        if diags:
            diags.sort(key=lambda d: (d.line, d.column, d.message))
            return ParseResult(None, diags)
    return ParseResult(schema, [])
