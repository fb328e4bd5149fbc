"""Bottom-up generation cycles over the constituent stack."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable

from . import disambiguation as amb
from .filters import (INHIBIT, argument_structure_filter, constraints_filter, coref_filter,
                      incoming_constraints, initial_pending)
from .pattern_dsl import EMPTY_KINDS, ConstituentPattern
from .records import ConstituentStack, EmptyLeaf, Record
from .resources import ResourceBundle
from .tagger import TaggedToken

log = logging.getLogger(__name__)

# where a pattern may receive an empty category it does not spell out
EMPTY_SITES = {
    "pro": frozenset({"subj"}),
    "trace": frozenset({"obj", "iobj", "pobj"}),
    "gap": frozenset({"obj", "iobj", "pobj"}),
}


class MaxCyclesExceeded(RuntimeError):
    def __init__(self, cycles, stack):
        self.cycles = cycles
        self.stack = stack
        super().__init__(f"no fixpoint after {cycles} cycles (grammar loop?)")


@dataclass(frozen=True)
class ParserConfig:
    csbs: bool = True
    register: frozenset = frozenset()
    wsd_strength: str = amb.STRICT
    max_cycles: int = 50
    trace: bool = False

    def __post_init__(self):
        if self.wsd_strength not in (amb.STRICT, amb.LENIENT):
            raise ValueError(f"wsd_strength must be strict or lenient, not {self.wsd_strength!r}")
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be positive")
        object.__setattr__(self, "register", frozenset(self.register))


@dataclass
class ParseResult:
    tagged: list
    stack: ConstituentStack
    cycles: int
    parses: list = field(default_factory=list)
    full: bool = False
    diagnostics: list = field(default_factory=list)

    @property
    def top(self):
        return self.parses[0] if self.parses else None

    @property
    def n_tokens(self):
        return len(self.tagged)


class Grammar:
    """Patterns split into generative patterns and empty-category derivations."""

    def __init__(self, patterns):
        self.patterns = list(patterns)
        self.generative = []
        self.empty_tags: dict[str, set] = {}
        for p in self.patterns:
            if p.empty_kind:
                self.empty_tags.setdefault(p.tag, set()).add(p.empty_kind)
            else:
                self.generative.append(p)

    def active(self, cfg: ParserConfig):
        return [p for p in self.generative if p.register is None or p.register in cfg.register]

    def empty_options(self, pattern: ConstituentPattern, k: int) -> list[str]:
        """Empty kinds that may fill 1-based position ``k`` of ``pattern``."""
        sub = pattern.subs[k - 1]
        if sub.lower() in EMPTY_KINDS:
            return [sub.lower()]
        f = pattern.function(k)
        if f is None:
            return []
        return [kind for kind in EMPTY_KINDS
                if kind in self.empty_tags.get(sub, ()) and f in EMPTY_SITES[kind]]


def _as_grammar(grammar) -> Grammar:
    return grammar if isinstance(grammar, Grammar) else Grammar(grammar)


class Parser:
    """One parse: an isolated stack driven cycle by cycle."""

    def __init__(self, tagged, grammar, bundle: ResourceBundle, cfg: ParserConfig,
                 observer: Callable | None = None):
        self.tagged = list(tagged)
        self.grammar = _as_grammar(grammar)
        self.bundle = bundle
        self.cfg = cfg
        self.observer = observer
        self.stack = ConstituentStack()
        self.diagnostics = []
        self.arg_functions = bundle.argument_functions()
        self.eligible: set[int] | None = None
        self.cycle = 0

    def emit(self, event, **data):
        if self.cfg.trace:
            self.diagnostics.append({"cycle": self.cycle, "event": event, **data})

    # -- cycle 0 -----------------------------------------------------------

    def seed(self):
        for i, tt in enumerate(self.tagged):
            for j, reading in enumerate(tt.readings):
                rec = Record(id=len(self.stack), tag=reading.category, span=(i, i + 1), birth=0,
                             token=i, reading=reading, reading_index=j,
                             mng_sets={i: reading.mng_set})
                rec.pending = initial_pending(rec, self.bundle)
                rec.card = amb.score_record(rec, self.bundle)
                self.stack.add(rec)
        self.emit("seed", records=len(self.stack))

    # -- generation --------------------------------------------------------

    def available(self, rec: Record) -> bool:
        if rec.inhibited or rec.birth >= self.cycle:
            return False
        return self.eligible is None or rec.id in self.eligible

    def generate_cycle(self) -> list[Record]:
        new = []
        c = self.cycle
        n = len(self.tagged)
        for pat in self.grammar.active(self.cfg):
            m = len(pat.subs)

            def dfs(k, pos, start, chosen, budget, fresh):
                if k == m:
                    overt = [x for x in chosen if isinstance(x, Record)]
                    if not overt or not fresh:
                        return
                    self._make(pat, tuple(chosen), (start, pos), new)
                    return
                sub = pat.subs[k]
                for kind in self.grammar.empty_options(pat, k + 1):
                    if kind in budget:
                        continue
                    dfs(k + 1, pos, start, chosen + [("empty", kind, pos)], budget | {kind}, fresh)
                if sub.lower() in EMPTY_KINDS:
                    return
                for rec in self.stack.starting_at(pos):
                    if rec.tag != sub or not self.available(rec):
                        continue
                    dfs(k + 1, rec.span[1], start, chosen + [rec], budget, fresh or rec.birth == c - 1)

            for start in range(n):
                dfs(0, start, start, [], frozenset(), False)
        return new

    def _make(self, pat, chosen, span, new):
        key = (pat.tag, tuple(x if isinstance(x, tuple) else x.id for x in chosen))
        if self.stack.seen(key):
            return
        children = tuple(self.stack.new_empty(x[1], x[2]) if isinstance(x, tuple) else x
                         for x in chosen)
        overt = [c for c in children if isinstance(c, Record)]
        span = (overt[0].span[0], overt[-1].span[1])
        mng_sets = {}
        for c in overt:
            mng_sets.update(c.mng_sets)
        rec = Record(id=len(self.stack), tag=pat.tag, span=span, birth=self.cycle, pattern=pat,
                     children=children, mng_sets=mng_sets)
        assert rec.dedup_key == key
        self.stack.add(rec)
        new.append(rec)

    # -- filtering ---------------------------------------------------------

    def _inhibit(self, rec, reason):
        if not rec.inhibited:
            rec.inhibited = True
            rec.inhibited_at = self.cycle
            rec.reason = reason
            self.emit("inhibit", record=rec.id, tag=rec.tag, span=list(rec.span), reason=reason)

    def _narrow(self, rec, deletions, why):
        for tok, mng in deletions:
            before = rec.mng_sets.get(tok, frozenset())
            if mng in before:
                rec.mng_sets[tok] = before - {mng}
                self.emit("mng-delete", record=rec.id, token=tok, mng=mng, by=why)

    def filter_new(self, rec: Record):
        """Run the filter chain on a freshly generated record."""
        out = argument_structure_filter(rec, self.bundle, self.arg_functions)
        if out.verdict == INHIBIT:
            return self._reject(rec, out.notes[-1])
        self._narrow(rec, out.mng_deletions, "argstruct")
        rec.assignments = dict(out.assignments)

        items = incoming_constraints(rec)
        out = constraints_filter(rec, self.bundle, items)
        if out.verdict == INHIBIT:
            return self._reject(rec, out.notes[-1])
        self._narrow(rec, out.mng_deletions, "constraints")
        for tok, mng in out.mng_deletions:
            rec.assignments.pop(mng, None)
        rec.pending = list(out.newly_pending)
        self.emit("pending", record=rec.id, incoming=len(items), outgoing=len(rec.pending))

        out = coref_filter(rec, self.cycle, self.bundle)
        rec.links = list(out.links)
        rec.open_empties = len(rec.unsaturated())
        for note in out.notes:
            self.emit("coref", record=rec.id, note=note)

        dels = amb.wsd_deletions(rec, self.bundle, self.cfg.wsd_strength)
        self._narrow(rec, dels, "wsd")
        for tok, mng in dels:
            rec.assignments.pop(mng, None)
        rec.card = amb.score_record(rec, self.bundle)
        self.emit("score", record=rec.id, tag=rec.tag, span=list(rec.span),
                  points=dict(rec.card.test_points), total=rec.card.total)

    def _reject(self, rec, reason):
        rec.admitted = False
        self._inhibit(rec, reason)

    def purge_intermediates(self, final=False) -> int:
        """Inhibit intermediate records whose absorption window has closed."""
        count = 0
        for rec in self.stack:
            if rec.inhibited or not rec.intermediate:
                continue
            if rec.birth < self.cycle or final:
                self._inhibit(rec, "intermediate purged")
                count += 1
        return count

    def expire_unsaturated(self, final=False):
        """Inhibit records whose traces or gaps stayed unbound past their grace cycle."""
        for rec in self.stack:
            if rec.inhibited or rec.is_terminal or not rec.open_empties:
                continue
            if final or rec.birth == self.cycle - 1:
                out = coref_filter(rec, max(self.cycle, rec.birth + 1), self.bundle)
                if out.verdict == INHIBIT:
                    self._inhibit(rec, out.notes[-1])

    def update_eligibility(self):
        if not self.cfg.csbs:
            self.eligible = None
            return
        eligible = {r.id for r in self.stack if r.admitted}
        for group in amb.find_competitors(self.stack):
            cards = amb.score_group(group, self.stack, self.bundle)
            keep = amb.select_by_score(group, cards, True)
            eligible -= set(group.members) - keep
            if len(keep) < len(group.members):
                self.emit("csbs", tag=group.tag, span=list(group.span),
                          kept=sorted(keep), dropped=sorted(set(group.members) - keep))
        self.eligible = eligible

    # -- driver ------------------------------------------------------------

    def run(self) -> ParseResult:
        self.seed()
        if self.observer:
            self.observer(0, self.stack)
        while True:
            self.cycle += 1
            if self.cycle > self.cfg.max_cycles:
                raise MaxCyclesExceeded(self.cfg.max_cycles, self.stack)
            self.update_eligibility()
            new = self.generate_cycle()
            self.emit("generate", created=len(new))
            for rec in new:
                self.filter_new(rec)
            self.purge_intermediates()
            self.expire_unsaturated()
            if self.observer:
                self.observer(self.cycle, self.stack)
            if not new:
                break
        self.purge_intermediates(final=True)
        self.expire_unsaturated(final=True)
        return self.result()

    def result(self) -> ParseResult:
        res = ParseResult(self.tagged, self.stack, self.cycle, diagnostics=self.diagnostics)
        res.parses, res.full = select_parses(self.stack, len(self.tagged))
        return res


def select_parses(stack, n_tokens):
    """Maximal surviving records: full-span tops if any, else a partial cover."""
    live = [r for r in stack if not r.inhibited]
    if not live:
        return [], False
    key = lambda r: (-(r.card.total if r.card else 0), r.id)  # noqa: E731
    full = [r for r in live if r.span == (0, n_tokens)]
    if full:
        inside = set()
        for r in full:
            inside.update(d.id for d in r.descendants())
        tops = [r for r in full if r.id not in inside]
        return sorted(tops, key=key), True
    inside = set()
    for r in live:
        inside.update(d.id for d in r.descendants())
    tops = [r for r in live if r.id not in inside]
    maximal = [r for r in tops
               if not any(o is not r and o.span[0] <= r.span[0] and r.span[1] <= o.span[1]
                          and (o.span != r.span) for o in tops)]
    return sorted(maximal, key=lambda r: (r.span[0], key(r))), False


def run_parse(tagged: list[TaggedToken], grammar, bundle: ResourceBundle,
              cfg: ParserConfig | None = None, observer=None) -> ParseResult:
    return Parser(tagged, grammar, bundle, cfg or ParserConfig(), observer).run()
