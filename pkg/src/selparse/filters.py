"""Argument-structure, constraint and co-reference filters.

Filters are pure: they look at a freshly built record (and its children) and
return a :class:`FilterOutcome`; the engine applies outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .pattern_dsl import Verdict, evaluate, parse_constraint_expr
from .records import (ANTECEDENT_FUNCTIONS, EmptyLeaf, PendingConstraint, Record,
                      head_reading, record_view)
from .resources import ArgSlot, ResourceBundle

KEEP = "keep"
INHIBIT = "inhibit"

NP_AGREEMENT = ("number", "gender")
SUBJ_AGREEMENT = ("person", "number")


@dataclass
class FilterOutcome:
    record_id: int
    verdict: str = KEEP
    mng_deletions: list = field(default_factory=list)
    newly_pending: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    assignments: dict = field(default_factory=dict)
    links: list = field(default_factory=list)

    def inhibit(self, note):
        self.verdict = INHIBIT
        self.notes.append(note)
        self.mng_deletions.clear()


@lru_cache(maxsize=None)
def compiled(text: str):
    return parse_constraint_expr(text)


# -- argument structure -----------------------------------------------------


@dataclass(frozen=True)
class ArgPosition:
    """One argument sub-constituent as seen by the valency check."""

    pos: int
    fnct: str
    cat: str
    conn: str | None
    vmd: frozenset
    overt: bool


def argument_positions(rec: Record, arg_functions) -> list[ArgPosition]:
    out = []
    for k, child in enumerate(rec.children, 1):
        f = rec.function(k)
        if f is None or f not in arg_functions:
            continue
        if isinstance(child, EmptyLeaf):
            out.append(ArgPosition(k, f, rec.pattern.subs[k - 1], None, frozenset(), False))
            continue
        r = head_reading(child)
        vmd = frozenset(r.morph.get("vmd", ())) if r is not None else frozenset()
        overt = not isinstance(child.head_terminal, EmptyLeaf)
        out.append(ArgPosition(k, f, child.tag, child.connective, vmd, overt))
    return out


def alt_matches(alt: ArgSlot, p: ArgPosition) -> bool:
    if alt.fnct != p.fnct:
        return False
    if alt.cat is not None and alt.cat != p.cat:
        return False
    if alt.conn is None:
        if p.conn is not None:
            return False
    elif p.conn != alt.conn.casefold():
        return False
    if alt.vmd is not None and alt.vmd not in p.vmd:
        return False
    return True


def match_valency(slots, positions, head_vmd=frozenset()):
    """Assign every argument position to a distinct valency slot.

    Returns a tuple of (position, ArgSlot) pairs, or None when no assignment
    covers all positions and all non-optional slots.
    """
    head = [s for s in slots if s.fnct == "v"]
    if head and not any(s.vmd is None or s.vmd in head_vmd for s in head):
        return None
    by_slot = {}
    for s in slots:
        if s.fnct != "v":
            by_slot.setdefault(s.slot, []).append(s)
    order = sorted(by_slot)

    def search(i, used, acc):
        if i == len(positions):
            for idx in order:
                if idx not in used and not any(a.opt for a in by_slot[idx]):
                    return None
            return tuple(acc)
        p = positions[i]
        for idx in order:
            if idx in used:
                continue
            for alt in by_slot[idx]:
                if alt_matches(alt, p):
                    found = search(i + 1, used | {idx}, acc + [(p.pos, alt)])
                    if found is not None:
                        return found
        return None

    return search(0, frozenset(), [])


def clause_head(rec: Record):
    """(position, terminal) of the ``v`` sub-constituent, or None."""
    fn = rec.pattern.fncts if rec.pattern else None
    if not fn or "v" not in fn:
        return None
    k = fn.index("v") + 1
    child = rec.children[k - 1]
    t = child.head_terminal if isinstance(child, Record) else child
    return k, t


def argument_structure_filter(rec: Record, bundle: ResourceBundle, arg_functions=None) -> FilterOutcome:
    out = FilterOutcome(rec.id)
    ch = clause_head(rec)
    if ch is None:
        return out
    _, term = ch
    if not isinstance(term, Record) or term.reading is None:
        return out
    tok = term.token
    senses = rec.mng_sets.get(tok, frozenset())
    if not senses:
        return out
    if arg_functions is None:
        arg_functions = bundle.argument_functions()
    positions = argument_positions(rec, arg_functions)
    head_vmd = frozenset(term.reading.morph.get("vmd", ()))
    for mng in sorted(senses):
        slots = bundle.slots.get(mng, ())
        if not slots:
            out.assignments[mng] = ()
            continue
        found = match_valency(slots, positions, head_vmd)
        if found is None:
            out.mng_deletions.append((tok, mng))
            out.notes.append(f"argstruct: {mng} does not project {rec.pattern.to_line()}")
        else:
            out.assignments[mng] = found
    if not out.assignments:
        out.inhibit(f"argstruct: no sense of token {tok} fits the pattern")
    return out


# -- constraints ------------------------------------------------------------


def initial_pending(rec: Record, bundle: ResourceBundle) -> list:
    """Lexical and sense constraints a terminal record brings with it."""
    r = rec.reading
    items = []
    if r is None or r.lex_id is None:
        return items
    lex = bundle.lexemes[r.lex_id]
    if lex.lexical_constraints:
        items.append(PendingConstraint(compiled(lex.lexical_constraints), "lexical",
                                       lex.lexical_constraints, rec.token))
    for mng in sorted(r.mng_set):
        text = bundle.meanings[mng].sense_constraints
        if text:
            items.append(PendingConstraint(compiled(text), "sense", text, rec.token, mng))
    return items


def incoming_constraints(rec: Record) -> list:
    items = []
    for c in rec.children:
        if isinstance(c, Record):
            items.extend(c.pending)
    if rec.pattern is not None and rec.pattern.constraints is not None:
        items.append(PendingConstraint(rec.pattern.constraints, "pattern",
                                       rec.pattern.constraints.to_text()))
    return items


def _agree(a, b, features):
    if a is None or b is None:
        return True
    for f in features:
        x, y = a.morph.get(f), b.morph.get(f)
        if x and y and not (set(x) & set(y)):
            return False
    return True


def builtin_violations(rec: Record) -> list[str]:
    if rec.pattern is None or rec.pattern.fncts is None:
        return []
    fn = rec.pattern.fncts
    by_fn = {}
    for k, f in enumerate(fn):
        by_fn.setdefault(f, []).append(rec.children[k])
    bad = []
    if rec.tag == "NP":
        head = head_reading(rec.head_child)
        for f in ("det", "mod"):
            for c in by_fn.get(f, ()):
                if not _agree(head, head_reading(c), NP_AGREEMENT):
                    bad.append(f"NP agreement: {f} vs head")
    subj = by_fn.get("subj", [None])[0]
    if subj is not None:
        s = head_reading(subj)
        for v in by_fn.get("v", ()):
            if not _agree(s, head_reading(v), SUBJ_AGREEMENT):
                bad.append("subject-verb agreement")
        for d in by_fn.get("do", ()):
            if not _agree(s, head_reading(d), SUBJ_AGREEMENT):
                bad.append("do agreement")
    return bad


def constraints_filter(rec: Record, bundle: ResourceBundle, items=None) -> FilterOutcome:
    out = FilterOutcome(rec.id)
    for note in builtin_violations(rec):
        out.inhibit(f"constraint (built-in): {note}")
    if out.verdict == INHIBIT:
        return out
    if items is None:
        items = incoming_constraints(rec)
    view = record_view(rec, bundle)
    deleted = set()
    for item in items:
        if item.level == "sense" and (item.mng not in rec.mng_sets.get(item.token, ())
                                      or (item.token, item.mng) in deleted):
            continue
        verdict = evaluate(item.expr, view)
        if verdict is Verdict.PENDING:
            out.newly_pending.append(item)
        elif verdict is Verdict.VIOLATED:
            if item.level == "sense":
                deleted.add((item.token, item.mng))
                out.mng_deletions.append((item.token, item.mng))
                out.notes.append(f"constraint (sense {item.mng}) violated: {item.source}")
            else:
                out.inhibit(f"constraint ({item.level}) violated: {item.source}")
                return out
    for tok in {t for t, _ in deleted}:
        left = rec.mng_sets.get(tok, frozenset()) - {m for t, m in deleted if t == tok}
        if not left:
            out.inhibit(f"constraint: every sense of token {tok} violated")
            break
    return out


# -- co-reference -----------------------------------------------------------


def _first_open(child):
    """Leaf key of the first trace/gap in ``child`` still lacking an antecedent."""
    if isinstance(child, EmptyLeaf):
        return child.key if child.kind in ("trace", "gap") else None
    open_ = child.unsaturated()
    return open_[0].key if open_ else None


def _effective_ctrl(bundle: ResourceBundle, assignments, pos, child):
    """Control values the surviving senses assign to the clause at ``pos``.

    A slot's own CTRL wins; otherwise a non-finite dependent clause inherits
    the CTRL of the head (v) slot.
    """
    r = head_reading(child)
    nonfinite = r is not None and "non-finite" in r.morph.get("vmd", ())
    for mng, pairs in assignments.items():
        for p, alt in pairs:
            if p != pos:
                continue
            if alt.ctrl is not None:
                yield alt.ctrl
            elif nonfinite:
                v = next((s for s in bundle.slots.get(mng, ()) if s.fnct == "v"), None)
                yield None if v is None else v.ctrl


def coref_filter(rec: Record, cycle: int, bundle: ResourceBundle, assignments=None) -> FilterOutcome:
    """Bind antecedents and controlled subjects; enforce the one-cycle grace."""
    out = FilterOutcome(rec.id)
    if rec.is_terminal:
        return out
    if cycle == rec.birth:
        pat = rec.pattern
        for k, child in enumerate(rec.children, 1):
            f = rec.function(k)
            if f not in ANTECEDENT_FUNCTIONS or not pat.deps or not pat.deps[k - 1]:
                continue
            gov = rec.children[pat.deps[k - 1] - 1]
            target = _first_open(gov)
            if target is None:
                continue
            ante = child.key if isinstance(child, EmptyLeaf) else child.head_key
            out.links.append((ante, target))
        assignments = rec.assignments if assignments is None else assignments
        subj = rec.children[pat.fncts.index("subj")] if pat.fncts and "subj" in pat.fncts else None
        if subj is not None and assignments:
            for k, child in enumerate(rec.children, 1):
                if not isinstance(child, Record) or not child.is_clause:
                    continue
                ctrls = set(_effective_ctrl(bundle, assignments, k, child))
                if True not in ctrls:
                    continue
                inner = child.argument("subj")
                if isinstance(inner, Record):
                    inner = inner.head_terminal
                if not isinstance(inner, EmptyLeaf) or inner.kind != "pro":
                    continue
                if any(kk[0] == "t" for kk in child.chain_of(inner.key)):
                    continue
                ante = subj.key if isinstance(subj, EmptyLeaf) else subj.head_key
                out.links.append((ante, inner.key))
                out.notes.append(f"control: pro at {inner.pos} bound to subject")
    pending_links = out.links if cycle == rec.birth else ()
    open_ = rec.unsaturated(pending_links)
    if open_ and cycle > rec.birth:
        out.inhibit(f"coref: {len(open_)} empty categories unbound after grace cycle")
    return out
