"""Constituent records, empty leaves and the constituent stack."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .pattern_dsl import Child, ConstituentPattern, View
from .resources import ResourceBundle
from .tagger import Reading

CONNECTIVE_FUNCTIONS = frozenset({"conn", "to"})
ANTECEDENT_FUNCTIONS = frozenset({"robj", "rsubj", "riobj"})


@dataclass(eq=False)
class EmptyLeaf:
    """A zero-width pro, trace or gap."""

    id: int
    kind: str
    pos: int

    @property
    def key(self):
        return ("e", self.id)

    @property
    def span(self):
        return (self.pos, self.pos)


@dataclass(frozen=True)
class PendingConstraint:
    expr: object
    level: str  # lexical | sense | pattern
    source: str
    token: int | None = None
    mng: str | None = None


@dataclass(eq=False)
class Record:
    id: int
    tag: str
    span: tuple[int, int]
    birth: int
    pattern: ConstituentPattern | None = None
    children: tuple = ()
    token: int | None = None
    reading: Reading | None = None
    reading_index: int | None = None
    mng_sets: dict = field(default_factory=dict)
    pending: list = field(default_factory=list)
    links: list = field(default_factory=list)
    assignments: dict = field(default_factory=dict)
    card: object = None
    open_empties: int = 0
    inhibited: bool = False
    inhibited_at: int | None = None
    reason: str | None = None
    admitted: bool = True

    def __repr__(self):
        state = " inhibited" if self.inhibited else ""
        return f"<{self.tag}{list(self.span)} #{self.id}{state}>"

    # -- structure -------------------------------------------------------

    @property
    def is_terminal(self):
        return self.pattern is None

    @property
    def head_pos(self) -> int | None:
        return None if self.is_terminal else self.pattern.head_pos

    @property
    def head_child(self):
        if self.is_terminal:
            return None
        return self.children[self.pattern.head_pos - 1]

    @property
    def intermediate(self):
        return self.pattern is not None and self.pattern.intermediate

    def function(self, pos: int):
        return self.pattern.function(pos)

    @cached_property
    def head_terminal(self):
        """Terminal record or EmptyLeaf at the bottom of the head chain."""
        node = self
        while isinstance(node, Record) and not node.is_terminal:
            node = node.head_child
        return node

    @property
    def head_key(self):
        t = self.head_terminal
        return t.key if isinstance(t, EmptyLeaf) else ("t", t.token)

    @cached_property
    def struct_key(self):
        """Identity independent of record ids (used to compare runs)."""
        if self.is_terminal:
            return ("term", self.token, self.reading_index)
        return (self.tag, self.span, tuple(
            ("empty", c.kind, c.pos) if isinstance(c, EmptyLeaf) else c.struct_key
            for c in self.children))

    @cached_property
    def dedup_key(self):
        return (self.tag, tuple(
            ("empty", c.kind, c.pos) if isinstance(c, EmptyLeaf) else c.id
            for c in self.children))

    def leaves(self):
        """Terminal records and empty leaves in surface order."""
        if self.is_terminal:
            return [self]
        out = []
        for c in self.children:
            out.extend([c] if isinstance(c, EmptyLeaf) else c.leaves())
        return out

    def empties(self):
        return [x for x in self.leaves() if isinstance(x, EmptyLeaf)]

    def descendants(self):
        for c in self.children:
            if isinstance(c, Record):
                yield c
                yield from c.descendants()

    def all_links(self):
        out = list(self.links)
        for c in self.children:
            if isinstance(c, Record):
                out.extend(c.all_links())
        return out

    def chains(self, extra=()):
        """Co-reference chains over leaf keys, as a list of frozensets."""
        parent = {}

        def find(x):
            parent.setdefault(x, x)
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in [*self.all_links(), *extra]:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
        groups = {}
        for x in list(parent):
            groups.setdefault(find(x), set()).add(x)
        return [frozenset(g) for g in groups.values()]

    def chain_of(self, key, extra=()):
        for ch in self.chains(extra):
            if key in ch:
                return ch
        return frozenset({key})

    def unsaturated(self, extra=()):
        """Trace/gap leaves whose chain has no overt member."""
        bad = []
        chains = self.chains(extra)
        for e in self.empties():
            if e.kind not in ("trace", "gap"):
                continue
            ch = next((c for c in chains if e.key in c), frozenset({e.key}))
            if not any(k[0] == "t" for k in ch):
                bad.append(e)
        return bad

    # -- linguistic views -------------------------------------------------

    @property
    def is_clause(self):
        node = self
        while isinstance(node, Record) and not node.is_terminal:
            if node.pattern.fncts and "v" in node.pattern.fncts:
                return True
            node = node.head_child
        return False

    def argument(self, fnct: str):
        """Child carrying ``fnct`` in this clause, following the head chain."""
        node = self
        while isinstance(node, Record) and not node.is_terminal:
            if node.pattern.fncts and fnct in node.pattern.fncts:
                return node.children[node.pattern.fncts.index(fnct)]
            node = node.head_child
        return None

    @property
    def connective(self):
        node = self
        while isinstance(node, Record) and not node.is_terminal:
            for k, c in enumerate(node.children, 1):
                if node.function(k) in CONNECTIVE_FUNCTIONS and isinstance(c, Record):
                    t = c.head_terminal
                    if isinstance(t, Record) and t.reading is not None:
                        return (t.reading.lemma or "").casefold()
            node = node.head_child
        return None

    def word_senses(self, token: int):
        return self.mng_sets.get(token, frozenset())


def head_reading(node):
    t = node.head_terminal if isinstance(node, Record) else node
    return t.reading if isinstance(t, Record) else None


def node_sem(node, bundle: ResourceBundle) -> frozenset:
    """Semantic tags of a node's lexical head, limited to surviving senses."""
    t = node.head_terminal if isinstance(node, Record) else node
    if not isinstance(t, Record) or t.reading is None:
        return frozenset()
    reading = t.reading
    if reading.lex_id is None:
        return reading.sem_tags
    senses = node.word_senses(t.token) if isinstance(node, Record) else reading.mng_set
    tags = set()
    for m in senses:
        tags |= bundle.sense_tags(m)
    return frozenset(tags)


def child_view(node, fnct, bundle: ResourceBundle, depth=0) -> Child:
    if isinstance(node, EmptyLeaf):
        return Child(tag=node.kind, fnct=fnct, cat=node.kind, empty=node.kind)
    t = node.head_terminal
    if isinstance(t, EmptyLeaf):
        cat, morph, lemma, empty = t.kind, {}, None, t.kind
    else:
        r = t.reading
        cat, morph, lemma, empty = r.category, dict(r.morph), r.lemma, None
    subj = obj = None
    clause = node.is_clause
    if clause and depth == 0:
        s, o = node.argument("subj"), node.argument("obj")
        subj = child_view(s, "subj", bundle, 1) if s is not None else None
        obj = child_view(o, "obj", bundle, 1) if o is not None else None
    return Child(tag=node.tag, fnct=fnct, cat=cat, morph=morph, sem=node_sem(node, bundle),
                 lemma=lemma, empty=empty, conn=node.connective, subj=subj, obj=obj,
                 clause=clause)


def record_view(rec: Record, bundle: ResourceBundle) -> View:
    kids = tuple(child_view(c, rec.function(k), bundle) for k, c in enumerate(rec.children, 1))
    return View(rec.tag, kids, child_view(rec, None, bundle))


class ConstituentStack:
    """Append-only store of records with lookup by start position."""

    def __init__(self):
        self.records: list[Record] = []
        self._by_start: dict[int, list[Record]] = {}
        self._keys: set = set()
        self._next_empty = 0

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def add(self, rec: Record):
        self.records.append(rec)
        self._by_start.setdefault(rec.span[0], []).append(rec)
        if not rec.is_terminal:
            self._keys.add(rec.dedup_key)

    def seen(self, key) -> bool:
        return key in self._keys

    def starting_at(self, pos: int):
        return self._by_start.get(pos, ())

    def new_empty(self, kind, pos) -> EmptyLeaf:
        self._next_empty += 1
        return EmptyLeaf(self._next_empty, kind, pos)

    def live(self):
        return [r for r in self.records if not r.inhibited]

    def get(self, rid):
        return self.records[rid]
