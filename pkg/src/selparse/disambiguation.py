"""Ambiguity solver and anaphora solver.

Competitors are live records sharing tag and span.  Each record gets a score
card from a registry of tests; with selection-by-score on, only the top
scorers of a group feed the next generation cycle.  Semantic congruence
between a sense's predicted argument tags and the fillers' tags also narrows
the head's sense set (strict mode).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .records import EmptyLeaf, Record, head_reading, node_sem
from .resources import Match, ResourceBundle

STRICT = "strict"
LENIENT = "lenient"


@dataclass(frozen=True)
class CompetitorGroup:
    tag: str
    span: tuple[int, int]
    members: tuple


@dataclass(frozen=True)
class ScoreCard:
    record_id: int
    test_points: tuple = ()

    @property
    def total(self):
        return sum(p for _, p in self.test_points)

    def points(self, test):
        return sum(p for t, p in self.test_points if t == test)


def _filler_points(bundle: ResourceBundle, filler, vsem: str) -> int:
    if isinstance(filler, EmptyLeaf):
        return 0
    grade = bundle.sem_matches(node_sem(filler, bundle), vsem)
    w = bundle.weights
    if grade is Match.EXACT:
        return w.exact("semantic")
    if grade is Match.GENERAL:
        return w.general("semantic")
    return 0


def sense_points(rec: Record, bundle: ResourceBundle, mng: str) -> int:
    """Semantic congruence of one head sense with the record's fillers."""
    total = 0
    for pos, slot in rec.assignments.get(mng, ()):
        if slot.vsem is None:
            continue
        total += _filler_points(bundle, rec.children[pos - 1], slot.vsem)
    return total


def _head_token(rec: Record):
    fn = rec.pattern.fncts if rec.pattern else None
    if not fn or "v" not in fn:
        return None
    child = rec.children[fn.index("v")]
    t = child.head_terminal if isinstance(child, Record) else child
    return t.token if isinstance(t, Record) else None


def wsd_deletions(rec: Record, bundle: ResourceBundle, strength: str = STRICT) -> list:
    """(token, mng) pairs semantic scoring removes from a clause head.

    Strict mode keeps the best-scoring senses; nothing is removed when every
    sense scores zero, so the head's set never empties.
    """
    tok = _head_token(rec)
    if strength != STRICT or tok is None:
        return []
    senses = sorted(m for m in rec.mng_sets.get(tok, ()) if m in rec.assignments)
    if len(senses) < 2:
        return []
    pts = {m: sense_points(rec, bundle, m) for m in senses}
    best = max(pts.values())
    if best <= 0:
        return []
    return [(tok, m) for m in senses if pts[m] < best]


# -- scoring tests ----------------------------------------------------------


def _best_sense(rec: Record, bundle):
    tok = _head_token(rec)
    if tok is None:
        return None
    senses = sorted(m for m in rec.mng_sets.get(tok, ()) if m in rec.assignments)
    if not senses:
        return None
    return max(senses, key=lambda m: (sense_points(rec, bundle, m), -senses.index(m)))


def test_semantic(rec, bundle, ctx):
    m = ctx["sense"]
    return 0 if m is None else sense_points(rec, bundle, m)


def test_named_entity(rec, bundle, ctx):
    m = ctx["sense"]
    if m is None:
        return 0
    pts = 0
    for pos, slot in rec.assignments.get(m, ()):
        if slot.vsem is None:
            continue
        r = head_reading(rec.children[pos - 1])
        if r is not None and r.lex_id is None and slot.vsem in r.sem_tags:
            pts += bundle.weights.exact("named_entity")
    return pts


def test_saturation(rec, bundle, ctx):
    if rec.is_terminal:
        return bundle.weights.exact("saturation")
    return 0 if rec.unsaturated() else bundle.weights.exact("saturation")


def test_completeness(rec, bundle, ctx):
    m = ctx["sense"]
    if m is None:
        return 0
    pts = 0
    for pos, slot in rec.assignments.get(m, ()):
        child = rec.children[pos - 1]
        overt = isinstance(child, Record) and not isinstance(child.head_terminal, EmptyLeaf)
        if overt and not slot.opt:
            pts += bundle.weights.exact("completeness")
    return pts


TESTS: dict[str, Callable] = {
    "semantic": test_semantic,
    "named_entity": test_named_entity,
    "saturation": test_saturation,
    "completeness": test_completeness,
}
# tests that look at the clause head; non-clause records inherit them from their head child
HEAD_TESTS = frozenset({"semantic", "named_entity", "completeness"})


def score_record(rec: Record, bundle: ResourceBundle, cards=None) -> ScoreCard:
    ctx = {"sense": _best_sense(rec, bundle)}
    clause_head = ctx["sense"] is not None or _head_token(rec) is not None
    inherited = None
    if not clause_head and not rec.is_terminal:
        hc = rec.head_child
        if isinstance(hc, Record):
            inherited = hc.card if cards is None else cards.get(hc.id, hc.card)
    points = []
    for name, fn in TESTS.items():
        if name in HEAD_TESTS and inherited is not None:
            points.append((name, inherited.points(name)))
        else:
            points.append((name, fn(rec, bundle, ctx)))
    return ScoreCard(rec.id, tuple(points))


def find_competitors(records) -> list[CompetitorGroup]:
    groups = {}
    for r in records:
        if r.admitted:
            groups.setdefault((r.tag, r.span), []).append(r.id)
    return [CompetitorGroup(tag, span, tuple(ids))
            for (tag, span), ids in sorted(groups.items(), key=lambda kv: (kv[0][1], kv[0][0]))
            if len(ids) > 1]


def score_group(group: CompetitorGroup, stack, bundle: ResourceBundle) -> list[ScoreCard]:
    out = []
    for rid in group.members:
        rec = stack.get(rid)
        out.append(rec.card if rec.card is not None else score_record(rec, bundle))
    return out


def select_by_score(group: CompetitorGroup, cards, csbs: bool) -> frozenset:
    """Ids of group members eligible as children in the next cycle."""
    if not csbs or not cards:
        return frozenset(group.members)
    best = max(c.total for c in cards)
    return frozenset(c.record_id for c in cards if c.total == best)


# -- anaphora ---------------------------------------------------------------


@dataclass(frozen=True)
class AnaphoraConfig:
    window: int = 2
    pronoun_categories: frozenset = frozenset({"550"})
    possessive_categories: frozenset = frozenset({"530"})
    candidate_tags: frozenset = frozenset({"NP"})
    agreement: tuple = ("person", "number", "gender")
    # a possessive agrees with the possessed noun, so only person constrains its antecedent
    possessive_agreement: tuple = ("person",)


@dataclass
class CorefIndex:
    index: str
    antecedent: tuple | None  # (sentence, token) or None when unbound
    anaphors: list = field(default_factory=list)  # (sentence, kind, position)

    @property
    def bound(self):
        return self.antecedent is not None


@dataclass(frozen=True)
class _Candidate:
    sentence: int
    token: int
    morph: dict
    sem: frozenset


def _features_agree(a: dict, b: dict, feats) -> bool:
    for f in feats:
        x, y = a.get(f), b.get(f)
        if x and y and not (set(x) & set(y)):
            return False
    return True


def _candidates(si, parse, bundle, cfg):
    out = []
    top = parse.top
    if top is None:
        return out
    seen = set()
    for node in [top, *top.descendants()]:
        if node.tag not in cfg.candidate_tags:
            continue
        t = node.head_terminal
        if not isinstance(t, Record) or t.token in seen:
            continue
        if t.reading.category in cfg.possessive_categories:
            continue
        seen.add(t.token)
        out.append(_Candidate(si, t.token, dict(t.reading.morph), node_sem(node, bundle)))
    return sorted(out, key=lambda c: c.token)


def _anaphors(si, parse, cfg):
    """(kind, position, features, predicted_sem) for every unresolved anaphor."""
    top = parse.top
    if top is None:
        return []
    out = []
    chains = top.chains()
    reported = set()
    # unbound pro subjects: take features from their clause's verb
    for node in [top, *top.descendants()]:
        fn = node.pattern.fncts if node.pattern else None
        if not fn or "subj" not in fn or "v" not in fn:
            continue
        s = node.children[fn.index("subj")]
        if not isinstance(s, EmptyLeaf):
            s = s.head_terminal if isinstance(s, Record) else s
        if not isinstance(s, EmptyLeaf) or s.kind != "pro":
            continue
        ch = next((c for c in chains if s.key in c), frozenset({s.key}))
        if any(k[0] == "t" for k in ch) or ch in reported:
            continue
        # a controlled pro shares its controller's chain; report the chain once
        reported.add(ch)
        v = head_reading(node.children[fn.index("v")])
        feats = {k: v.morph[k] for k in ("person", "number") if v is not None and k in v.morph}
        vsem = None
        tok = _head_token(node)
        for m in sorted(node.mng_sets.get(tok, ())):
            for pos, slot in node.assignments.get(m, ()):
                if slot.fnct == "subj" and slot.vsem:
                    vsem = slot.vsem
        out.append(("pro", ("e", s.id), s.pos, feats, vsem))
    for leaf in top.leaves():
        if isinstance(leaf, EmptyLeaf):
            continue
        cat = leaf.reading.category
        if cat in cfg.pronoun_categories:
            out.append(("pronoun", ("t", leaf.token), leaf.token, dict(leaf.reading.morph), None))
        elif cat in cfg.possessive_categories:
            out.append(("possessive", ("t", leaf.token), leaf.token, dict(leaf.reading.morph), None))
    return sorted(out, key=lambda a: (a[2], a[0]))


def resolve_anaphora(parses, bundle: ResourceBundle, cfg: AnaphoraConfig | None = None) -> list[CorefIndex]:
    """Bind pro subjects, pronouns and possessives across sentences.

    ``parses`` is a document-ordered list of sentence results exposing
    ``top`` (the selected record or None).  Candidates are scanned from the
    anaphor leftwards through the current sentence, then through up to
    ``cfg.window`` previous sentences, most recent first.
    """
    cfg = cfg or AnaphoraConfig()
    cands = [_candidates(i, p, bundle, cfg) for i, p in enumerate(parses)]
    out = []
    n = 0
    for si, p in enumerate(parses):
        for kind, key, pos, feats, vsem in _anaphors(si, p, cfg):
            pool = [c for c in cands[si] if c.token < pos and ("t", c.token) != key]
            pool.sort(key=lambda c: -c.token)
            for back in range(1, cfg.window + 1):
                if si - back < 0:
                    break
                pool.extend(sorted(cands[si - back], key=lambda c: -c.token))
            found = None
            for c in pool:
                feats_checked = cfg.possessive_agreement if kind == "possessive" else cfg.agreement
                if not _features_agree(feats, c.morph, feats_checked):
                    continue
                if vsem and bundle.known_tag(vsem) and bundle.sem_matches(c.sem, vsem) is Match.NONE:
                    continue
                found = c
                break
            n += 1
            idx = CorefIndex(f"a{n}", None if found is None else (found.sentence, found.token),
                             [(si, kind, pos)])
            out.append(idx)
    return out
