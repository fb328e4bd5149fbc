"""Shared fixtures paths, oracles and hypothesis strategies for the test suite."""

from __future__ import annotations

import itertools
from functools import lru_cache
from pathlib import Path

from hypothesis import strategies as st

from selparse.engine import Grammar, ParserConfig, run_parse
from selparse.pattern_dsl import load_grammar, parse_grammar
from selparse.pipeline import parse_sentence
from selparse.records import EmptyLeaf, Record
from selparse.resources import load_resources
from selparse.tagger import tag, tokenize

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "fixtures"

INTERROGATIVE = "Whom do you think John wants to invite?"

AMARE_SENTENCES = {
    "a": "Paolo ama l'insalata",
    "b": "Paolo ama cantare",
    "c": "Paolo ama che gli amici lo lodino",
    "d": "Paolo amava di cantare ogni giorno per qualche ora",
    "e": "Paolo amerebbe che gli dicessero la verità",
}

IT_CORPUS = [
    *AMARE_SENTENCES.values(),
    "Paolo ama la madre",
    "Paolo ama il lavoro",
    "Paolo ama il cavallo",
    "Paolo ama sua madre",
    "Paolo ama il paese",
    "Luca ama ballare",
    "ama cantare",
    "gli amici amano Maria",
]
EN_CORPUS = [INTERROGATIVE, "John loves Mary", "he loves the friend", "you think John loves Mary"]


@lru_cache(maxsize=None)
def bundle(name):
    return load_resources(FIXTURES / name)


@lru_cache(maxsize=None)
def grammar(name, file="patterns.txt"):
    return Grammar(load_grammar(FIXTURES / name / file))


def parse(name, text, file="patterns.txt", **cfg):
    return parse_sentence(text, grammar(name, file), bundle(name), ParserConfig(**cfg))


def token_of(result, surface):
    for i, tt in enumerate(result.tagged):
        if tt.surface == surface:
            return i
    raise KeyError(surface)


def head_senses(result, surface, parse=None):
    rec = parse if parse is not None else result.top
    return set(rec.mng_sets[token_of(result, surface)])


def clause_records(stack):
    return [r for r in stack if not r.is_terminal and r.pattern.fncts and "v" in r.pattern.fncts]


# -- independent valency oracle ---------------------------------------------


def oracle_positions(rec: Record, arg_functions):
    """(position, fnct, cat, conn, vmd set) for every argument sub-constituent."""
    out = []
    for k, child in enumerate(rec.children, 1):
        f = rec.pattern.fncts[k - 1]
        if f not in arg_functions:
            continue
        if isinstance(child, EmptyLeaf):
            out.append((k, f, rec.pattern.subs[k - 1], None, frozenset()))
            continue
        node = child
        while not node.is_terminal and not isinstance(node, EmptyLeaf):
            node = node.children[node.pattern.head_pos - 1]
        vmd = frozenset() if isinstance(node, EmptyLeaf) else frozenset(node.reading.morph.get("vmd", ()))
        out.append((k, f, child.tag, child.connective, vmd))
    return out


def oracle_fits(slots, positions, head_vmd) -> bool:
    """Enumerate every map from positions to slot alternatives."""
    heads = [s for s in slots if s.fnct == "v"]
    if heads and all(s.vmd is not None and s.vmd not in head_vmd for s in heads):
        return False
    alts = [s for s in slots if s.fnct != "v"]

    def ok(alt, pos):
        _, f, cat, conn, vmd = pos
        if alt.fnct != f:
            return False
        if alt.cat is not None and alt.cat != cat:
            return False
        want = None if alt.conn is None else alt.conn.lower()
        if want != (None if conn is None else conn.lower()):
            return False
        return alt.vmd is None or alt.vmd in vmd

    for combo in itertools.product(alts, repeat=len(positions)):
        chosen = [a.slot for a in combo]
        if len(set(chosen)) != len(chosen):
            continue
        if not all(ok(a, p) for a, p in zip(combo, positions)):
            continue
        # a slot is optional as soon as one of its alternatives is
        required = {a.slot for a in alts} - {a.slot for a in alts if a.opt}
        if required <= set(chosen):
            return True
    return False


# -- random grammars ----------------------------------------------------------

TERMINALS = ["noun", "verb", "det"]
LEVELS = [["N", "V", "D"], ["NP", "NP", "VP"], ["CP", "CP", "XP"]]
OTHER_FUNCS = ["subj", "subj", "obj", "obj", "det", "mod"]
CONSTRAINTS = [
    "{T(CT=1) R(NUM=sing)}",
    "{OR(T(FNCT=det) R(NUM=plur), T(CT=1) R(SEM=PERSON))}",
    "{C(TAG=CP) T(FNCT=subj) R(PERS=3)}",
    "{T(FNCT=v) R(VMD#non-finite)}",
    "{AND(T(CT=1) R(CAT#pro), T(CT=1) R(TAG#V))}",
]
TOY_WORDS = ["ka", "lo", "mi", "ri", "ta", "su", "ne", "Ko", "zz"]


WRAPPERS = ["N, (noun)", "V, (verb)", "D, (det)"]


@st.composite
def pattern_lines(draw):
    level = draw(st.integers(1, 2))
    tag = draw(st.sampled_from(LEVELS[level]))
    # mostly build on the level just below, sometimes reach further down
    lower = LEVELS[level - 1] * 3 + [t for lv in LEVELS[:level - 1] for t in lv] + TERMINALS
    kind = draw(st.sampled_from(["unary", "multi", "multi", "multi", "recursive"]))
    if kind == "unary":
        return f"{tag}, ({draw(st.sampled_from(lower))})"
    if kind == "recursive":
        other = draw(st.sampled_from(lower))
        if draw(st.booleans()):
            return f"{tag}, ({tag}, {other}), (0,1), (0,mod)"
        return f"{tag}, ({other}, {tag}), (2,0), (mod,0)"
    n = draw(st.integers(2, 3))
    pool = lower + ["pro", "Trace"] if level == 2 else lower
    subs = [draw(st.sampled_from(pool)) for _ in range(n)]
    overt = [i for i, s in enumerate(subs) if s not in ("pro", "Trace")]
    if not overt:
        subs[0] = lower[0]
        overt = [0]
    h = draw(st.sampled_from(overt))
    deps = [0 if i == h else h + 1 for i in range(n)]
    head_f = draw(st.sampled_from(["v", "v", "0"]))
    fncts = [head_f if i == h else draw(st.sampled_from(OTHER_FUNCS)) for i in range(n)]
    line = f"{tag}, ({', '.join(subs)}), ({','.join(map(str, deps))}), ({','.join(fncts)})"
    if draw(st.integers(0, 3)) == 0:
        line += " " + draw(st.sampled_from(CONSTRAINTS))
    return line


@st.composite
def grammars(draw):
    """At most ten patterns: three terminal wrappers, up to five random
    patterns over a tag hierarchy (half the time seeded with a transitive
    clause pattern), and optional pro/trace derivations."""
    lines = list(WRAPPERS)
    if draw(st.booleans()):
        lines += ["NP, (N)", "VP, (NP, V, NP), (2,0,2), (subj,v,obj)"]
    lines += draw(st.lists(pattern_lines(), min_size=1, max_size=8 - len(lines)))
    for empty in ("pro", "trace"):
        if draw(st.booleans()):
            lines.append(f"NP, ({empty})")
    return parse_grammar("\n".join(lines))


sentences = st.lists(st.sampled_from(TOY_WORDS), min_size=1, max_size=8).map(" ".join)


def check_contiguity(stack):
    """Return a list of records violating contiguity (empty when all hold)."""
    bad = []
    for r in stack:
        if r.is_terminal:
            if r.span != (r.token, r.token + 1):
                bad.append(r)
            continue
        pos = None
        start = None
        for c in r.children:
            a, b = c.span
            if pos is not None and a != pos:
                bad.append(r)
                break
            if start is None and isinstance(c, Record):
                start = a
            pos = b if isinstance(c, Record) else (a if pos is None else pos)
        else:
            overt = [c for c in r.children if isinstance(c, Record)]
            if r.span != (overt[0].span[0], overt[-1].span[1]):
                bad.append(r)
    return bad


def check_no_duplicates(stack):
    keys = [r.dedup_key for r in stack if not r.is_terminal]
    return len(keys) == len(set(keys))


# -- engine invariants --------------------------------------------------------

TOY = "toy"
# two noun readings of "ka" give same-span competitors with different scores
AMBIGUOUS_GRAMMAR = ("N, (noun)\nV, (verb)\nNP, (N)\nVP, (NP, V, NP), (2,0,2), (subj,v,obj)\n"
                     "CP, (VP)\nCP, (CP, NP), (0,1), (0,mod)")


def run_toy(g, text, observer=None, **cfg):
    b = bundle(TOY)
    return run_parse(tag(tokenize(text), b), Grammar(g), b, ParserConfig(**cfg), observer)


class Snapshots:
    """Observer collecting per-cycle sense sets of every record."""

    def __init__(self):
        self.cycles = []

    def __call__(self, cycle, stack):
        self.cycles.append({r.id: {t: frozenset(m) for t, m in r.mng_sets.items()} for r in stack})


def check_run(g, text):
    snaps = Snapshots()
    on = run_toy(g, text, snaps, csbs=True)
    off = run_toy(g, text, csbs=False)
    assert not check_contiguity(on.stack)
    assert not check_contiguity(off.stack)
    assert check_no_duplicates(on.stack) and check_no_duplicates(off.stack)
    # sense sets only shrink from one cycle to the next
    for before, after in zip(snaps.cycles, snaps.cycles[1:]):
        for rid, sets in before.items():
            for tok, mngs in sets.items():
                assert after[rid][tok] <= mngs
    # a record never knows more senses than its children did
    for r in on.stack:
        for c in r.children:
            if not isinstance(c, EmptyLeaf):
                for tok, mngs in r.mng_sets.items():
                    if tok in c.mng_sets:
                        assert mngs <= c.mng_sets[tok]
    keys_on = {r.struct_key for r in on.stack}
    keys_off = {r.struct_key for r in off.stack}
    assert keys_on <= keys_off
    live_on = {r.struct_key for r in on.stack if not r.inhibited}
    live_off = {r.struct_key for r in off.stack if not r.inhibited}
    assert live_on <= live_off
    assert on.cycles <= 50 and off.cycles <= 50
