"""Constituent patterns and the constraint expression language.

A pattern line is a tag followed by up to four datasets::

    NP, (Det, AdjP, N), (3, 3, 0), (det, mod, 0)
    Pron, (560), {C(TAG=CP) T(CAT=560) R(FNCT=obj)}
    *CP, (NP, V, Trace, CP), (2,0,4,2), (subj, v, robj, obj), {...} @formal

Parenthesised groups are, in order, sub-constituents, dependencies and
functions; a second group made only of integers is the dependency set.  The
braced group holds a constraint expression.  A leading ``*`` flags an
intermediate pattern and a trailing ``@label`` restricts the pattern to a
register.

Constraint expressions are built from ``Functor(Param Op Value)`` units, with
``Op`` one of ``=`` and ``#``, grouped as ``[C(..)] [T(..)] R(..)+`` and
combined with ``AND(...)`` / ``OR(...)``.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

log = logging.getLogger(__name__)

EMPTY_KINDS = ("pro", "trace", "gap")
FUNCTORS = ("C", "T", "R", "L", "DIR", "DIST")
LOCATORS = frozenset({"CT", "CAT", "TAG", "FNCT"})
# verbal mood is spelled three ways in hand-written grammars
_ALIASES = {"MDV": "VMD", "VDM": "VMD", "GEN": "GENDER", "NUM": "NUMBER", "PERS": "PERSON"}
MORPH_PARAMS = {"NUMBER": "number", "GENDER": "gender", "PERSON": "person",
                "VMD": "vmd", "TENSE": "tense", "CASE": "case"}
PARAMS = frozenset({"TAG", "CAT", "FNCT", "SEM", "CONN", "SUBJ", "OBJ", "LEMMA", "CT",
                    *MORPH_PARAMS})


class DSLError(ValueError):
    def __init__(self, message, text="", pos=None):
        self.text = text
        self.pos = pos
        if pos is not None:
            message = f"{message} at column {pos + 1}: {text!r}"
        super().__init__(message)


class Verdict(enum.Enum):
    SATISFIED = "satisfied"
    VIOLATED = "violated"
    PENDING = "pending"


def canonical_param(name: str) -> str:
    name = name.strip().upper()
    return _ALIASES.get(name, name)


def _clean_value(value: str) -> str:
    return value.strip().strip('"').strip("'")


def _bare(value: str) -> str:
    return value.strip("*").lower()


# -- constraint AST --------------------------------------------------------


@dataclass(frozen=True)
class Unit:
    functor: str
    param: str
    op: str
    value: str

    def to_text(self):
        v = self.value
        if re.search(r"[\s,()]", v):
            v = f'"{v}"'
        return f"{self.functor}({self.param}{self.op}{v})"


@dataclass(frozen=True)
class Group:
    context: Unit | None
    target: Unit | None
    restrictions: tuple
    others: tuple = ()

    def units(self):
        return tuple(u for u in (self.context, self.target) if u) + self.others + self.restrictions

    def to_text(self):
        parts = [u.to_text() for u in (self.context, self.target) if u]
        parts += [u.to_text() for u in self.others]
        parts.append(", ".join(u.to_text() for u in self.restrictions))
        return " ".join(parts)


@dataclass(frozen=True)
class Op:
    kind: str  # "AND" | "OR"
    children: tuple

    def to_text(self):
        return f"{self.kind}(" + ", ".join(c.to_text() for c in self.children) + ")"


Expr = Group | Op

_TOKEN = re.compile(r"""\s*(?:(?P<kw>AND|OR|DIST|DIR|C|T|R|L)\s*\(|(?P<close>\))|(?P<comma>,))""",
                    re.IGNORECASE)
_UNIT_BODY = re.compile(r"""\s*(?P<param>[A-Za-z_]+)\s*(?P<op>[=#])\s*(?P<value>"[^"]*"|'[^']*'|[^()]*?)\s*\)""")


class _ExprParser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise DSLError(msg, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and self.text[self.pos] in " \t\n,":
            self.pos += 1

    def at_end(self):
        self.skip()
        return self.pos >= len(self.text)

    def peek_kw(self):
        m = _TOKEN.match(self.text, self.pos)
        if m and m.group("kw"):
            return m.group("kw").upper()
        if m and m.group("close"):
            return ")"
        return None

    def parse(self) -> Expr:
        items = self.sequence(top=True)
        if not items:
            self.error("empty constraint expression")
        return items[0] if len(items) == 1 else Op("AND", tuple(items))

    def sequence(self, top=False):
        """Parse children until ')' (or end at top level)."""
        items = []
        group: list[Unit] = []

        def flush():
            if group:
                items.append(self.make_group(group))
                group.clear()

        while True:
            self.skip()
            if self.pos >= len(self.text):
                if not top:
                    self.error("unbalanced parentheses")
                break
            kw = self.peek_kw()
            if kw == ")":
                if top:
                    self.error("unbalanced parentheses")
                break
            if kw is None:
                self.error("unknown functor")
            if kw in ("AND", "OR"):
                flush()
                m = _TOKEN.match(self.text, self.pos)
                self.pos = m.end()
                children = self.sequence()
                self.expect_close()
                if not children:
                    self.error(f"empty {kw}")
                items.append(Op(kw, tuple(children)))
                continue
            # a C or T after an R starts a new group
            if kw in ("C", "T") and any(u.functor == "R" for u in group):
                flush()
            group.append(self.unit())
        flush()
        return items

    def expect_close(self):
        self.skip()
        if self.pos < len(self.text) and self.text[self.pos] == ")":
            self.pos += 1
        else:
            self.error("unbalanced parentheses")

    def unit(self) -> Unit:
        m = _TOKEN.match(self.text, self.pos)
        functor = m.group("kw").upper()
        self.pos = m.end()
        b = _UNIT_BODY.match(self.text, self.pos)
        if not b:
            self.error("missing operator in unit")
        param = canonical_param(b.group("param"))
        value = _clean_value(b.group("value"))
        if functor == "T" and param not in LOCATORS:
            self.error(f"target locator {param} not one of {sorted(LOCATORS)}")
        if functor in ("C", "T", "R") and param not in PARAMS:
            self.error(f"unknown parameter {param}")
        self.pos = b.end()
        return Unit(functor, param, b.group("op"), value)

    def make_group(self, units: Sequence[Unit]) -> Group:
        ctx = tgt = None
        rs, others = [], []
        for u in units:
            if u.functor == "C":
                if ctx is not None or tgt is not None or rs:
                    self.error("context unit must open its group")
                ctx = u
            elif u.functor == "T":
                if tgt is not None or rs:
                    self.error("target unit must precede restrictions")
                tgt = u
            elif u.functor == "R":
                rs.append(u)
            else:
                others.append(u)
        if not rs:
            self.error("constraint group without a restriction")
        return Group(ctx, tgt, tuple(rs), tuple(others))


def parse_constraint_expr(text: str) -> Expr:
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    return _ExprParser(text).parse()


# -- patterns -------------------------------------------------------------


@dataclass(frozen=True)
class ConstituentPattern:
    tag: str
    subs: tuple
    deps: tuple | None = None
    fncts: tuple | None = None
    constraints: Expr | None = None
    intermediate: bool = False
    register: str | None = None
    flagged: bool = False  # explicit '*' marker, kept for round-trips
    line: int | None = field(default=None, compare=False)

    @property
    def head_pos(self) -> int:
        """1-based head position."""
        if self.deps is None:
            return 1
        return self.deps.index(0) + 1

    def function(self, pos: int):
        """Function label of 1-based position, or None."""
        if self.fncts is None:
            return None
        f = self.fncts[pos - 1]
        return None if f == "0" else f

    @property
    def empty_kind(self):
        """The empty category this pattern derives, for patterns like ``NP, (pro)``."""
        if len(self.subs) == 1 and self.subs[0].lower() in EMPTY_KINDS:
            return self.subs[0].lower()
        return None

    def to_line(self) -> str:
        tag = ("*" if self.flagged else "") + self.tag
        parts = [tag, "(" + ", ".join(self.subs) + ")"]
        if self.deps is not None:
            parts.append("(" + ", ".join(str(d) for d in self.deps) + ")")
        if self.fncts is not None:
            parts.append("(" + ", ".join(self.fncts) + ")")
        if self.constraints is not None:
            parts.append("{" + self.constraints.to_text() + "}")
        line = ", ".join(parts)
        if self.register:
            line += f" @{self.register}"
        return line


def _split_top(text: str, lineno=None):
    """Split a pattern line into tag and bracketed datasets."""
    items = []
    i, n = 0, len(text)
    head = None
    while i < n:
        ch = text[i]
        if ch in " \t,":
            i += 1
            continue
        if ch in "({":
            close = ")" if ch == "(" else "}"
            depth, j = 0, i
            quote = None
            while j < n:
                c = text[j]
                if quote:
                    if c == quote:
                        quote = None
                elif c in "\"'":
                    quote = c
                elif c in "({":
                    depth += 1
                elif c in ")}":
                    depth -= 1
                    if depth == 0:
                        break
                j += 1
            if j >= n or text[j] != close:
                raise DSLError("unbalanced brackets", text, i)
            items.append((ch, text[i + 1:j], i))
            i = j + 1
            continue
        if head is None and not items:
            m = re.match(r"\*?[A-Za-z_][\w\-]*", text[i:])
            if not m:
                raise DSLError("pattern must start with a tag", text, i)
            head = m.group(0)
            i += m.end()
            continue
        raise DSLError("unexpected text", text, i)
    if head is None:
        raise DSLError("pattern must start with a tag", text, 0)
    return head, items


def parse_pattern_line(line: str, lineno=None) -> ConstituentPattern:
    text = line.strip()
    register = None
    m = re.search(r"@([\w\-]+)\s*$", text)
    if m:
        register = m.group(1)
        text = text[: m.start()].rstrip()
    head, items = _split_top(text, lineno)
    flagged = head.startswith("*")
    tag = head.lstrip("*")
    groups = [(body, pos) for kind, body, pos in items if kind == "("]
    braces = [(body, pos) for kind, body, pos in items if kind == "{"]
    if not groups:
        raise DSLError("pattern needs a sub-constituent dataset", text, len(text))
    if len(groups) > 3 or len(braces) > 1:
        raise DSLError("too many datasets", text, items[-1][2])
    if braces and items[-1][0] != "{":
        raise DSLError("constraint dataset must come last", text, braces[0][1])

    def elems(body):
        return tuple(e.strip() for e in body.split(",") if e.strip())

    subs = elems(groups[0][0])
    if not subs:
        raise DSLError("empty sub-constituent dataset", text, groups[0][1])
    deps = fncts = None
    rest = groups[1:]
    if rest and all(re.fullmatch(r"\d+", e) for e in elems(rest[0][0])):
        body, pos = rest.pop(0)
        deps = tuple(int(e) for e in elems(body))
        if len(deps) != len(subs):
            raise DSLError(f"{len(deps)} dependencies for {len(subs)} sub-constituents", text, pos)
        if len(subs) > 1 and deps.count(0) != 1:
            raise DSLError("exactly one dependency entry must be 0 (the head)", text, pos)
        for k, d in enumerate(deps, 1):
            if d and not 1 <= d <= len(subs):
                raise DSLError(f"dependency position {d} out of range", text, pos)
            if d == k:
                raise DSLError(f"position {k} depends on itself", text, pos)
    if rest:
        body, pos = rest.pop(0)
        fncts = elems(body)
        if len(fncts) != len(subs):
            raise DSLError(f"{len(fncts)} functions for {len(subs)} sub-constituents", text, pos)
    if rest:
        raise DSLError("unexpected dataset", text, rest[0][1])
    if len(subs) > 1 and deps is None:
        raise DSLError("multi-element pattern needs a dependency dataset", text, groups[0][1])
    constraints = None
    if braces:
        body, pos = braces[0]
        try:
            constraints = parse_constraint_expr(body)
        except DSLError as exc:
            raise DSLError(f"in constraints: {exc}", text, pos) from None
    intermediate = flagged or (len(subs) > 1 and any(s.lower() in ("trace", "gap") for s in subs))
    return ConstituentPattern(tag, subs, deps, fncts, constraints, intermediate, register,
                              flagged, lineno)


def parse_grammar(text: str) -> list[ConstituentPattern]:
    patterns = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if not s or s.startswith("#"):
            continue
        try:
            patterns.append(parse_pattern_line(s, lineno))
        except DSLError as exc:
            raise DSLError(f"line {lineno}: {exc}") from None
    return patterns


def load_grammar(path) -> list[ConstituentPattern]:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return parse_grammar(text)
    except DSLError as exc:
        raise DSLError(f"{path}: {exc}") from None


# -- evaluation -----------------------------------------------------------


@dataclass(frozen=True)
class Child:
    """What the evaluator can see of one sub-constituent."""

    tag: str
    fnct: str | None = None
    cat: str | None = None
    morph: dict = field(default_factory=dict)
    sem: frozenset = frozenset()
    lemma: str | None = None
    empty: str | None = None
    conn: str | None = None
    subj: "Child | None" = None
    obj: "Child | None" = None
    clause: bool = False


@dataclass(frozen=True)
class View:
    """A constituent seen as an evaluation context."""

    tag: str
    children: tuple
    whole: Child | None = None


def _locate(view: View, unit: Unit | None) -> Child | None:
    if unit is None:
        return view.whole
    v = unit.value
    if unit.param == "CT":
        try:
            k = int(v)
        except ValueError:
            return None
        return view.children[k - 1] if 1 <= k <= len(view.children) else None
    for ch in view.children:
        actual = {"CAT": ch.cat, "TAG": ch.tag, "FNCT": ch.fnct}[unit.param]
        hit = actual is not None and _bare(actual) == _bare(v)
        if hit == (unit.op == "="):
            return ch
    return None


def _clause_filler(ch: Child, which: str):
    if not ch.clause:
        return False, None
    return True, getattr(ch, which)


def _check(target: Child, unit: Unit) -> bool:
    p, want = unit.param, unit.value
    eq = unit.op == "="
    if p in ("SUBJ", "OBJ"):
        is_clause, filler = _clause_filler(target, p.lower())
        if not is_clause:
            return False
        if filler is None:
            got = False
        elif _bare(want) in EMPTY_KINDS:
            got = filler.empty == _bare(want)
        else:
            got = _bare(want) in {_bare(x) for x in (filler.lemma, filler.tag, filler.cat) if x}
        return got == eq
    if p in MORPH_PARAMS:
        vals = target.morph.get(MORPH_PARAMS[p])
        got = vals is not None and _bare(want) in {_bare(x) for x in vals}
        return got == eq
    if p == "SEM":
        got = want.upper() in {t.upper() for t in target.sem}
        return got == eq
    actual = {"TAG": target.tag, "CAT": target.cat, "FNCT": target.fnct,
              "CONN": target.conn, "LEMMA": target.lemma}.get(p)
    got = actual is not None and _bare(actual) == _bare(want)
    return got == eq


def evaluate(expr: Expr, ctx: View) -> Verdict:
    if isinstance(expr, Op):
        verdicts = [evaluate(c, ctx) for c in expr.children]
        return kleene(expr.kind, verdicts)
    if expr.context is not None and not _check(Child(tag=ctx.tag), expr.context):
        return Verdict.PENDING
    for u in expr.others:
        log.warning("functor %s has no defined semantics; treated as satisfied", u.functor)
    target = _locate(ctx, expr.target)
    if target is None:
        return Verdict.VIOLATED
    ok = all(_check(target, r) for r in expr.restrictions)
    return Verdict.SATISFIED if ok else Verdict.VIOLATED


def kleene(kind: str, verdicts: Iterable[Verdict]) -> Verdict:
    verdicts = list(verdicts)
    if kind == "AND":
        if any(v is Verdict.VIOLATED for v in verdicts):
            return Verdict.VIOLATED
        if all(v is Verdict.SATISFIED for v in verdicts):
            return Verdict.SATISFIED
        return Verdict.PENDING
    if any(v is Verdict.SATISFIED for v in verdicts):
        return Verdict.SATISFIED
    if all(v is Verdict.VIOLATED for v in verdicts):
        return Verdict.VIOLATED
    return Verdict.PENDING
