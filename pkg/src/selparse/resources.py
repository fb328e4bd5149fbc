"""Lexical, valency and semantic resources.

A resource directory holds tab-separated UTF-8 files, one record per row,
``#`` comment lines allowed:

    lemma.tsv      lex_id, lemma, category, aliases, constraints
    forms.tsv      surface, lex_id, morph
    meanings.tsv   mng, lex_id, gloss, sem_tags, domains, constraints
    argstruct.tsv  mng, arg_index, fnct, cat, conn, vmd, ctrl, opt, vsem
    semnet.tsv     node rows (mng, path, tags) or relation rows (src, rel, dst)
    gazetteer.tsv  surface, sem_tag
    taghier.tsv    tag, parent_tag
    weights.tsv    test, exact, general   (optional)

List fields are ``;``-joined, morph is ``key=value;key=value`` and a value may
list alternatives with ``|`` (``person=1|2``).  ``NIL`` and the empty field
both mean "absent".
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterator, Mapping

MORPH_KEYS = frozenset({"number", "gender", "person", "tense", "vmd", "case"})
NE_TAGS = frozenset({"person", "place", "org"})

RELATIONS = (
    "token_of",
    "part_of",
    "has_part",
    "has_quality",
    "has_agent",
    "has_object",
    "has_cause",
    "instrument_of",
)
_INVERSE = {
    "part_of": "has_part",
    "has_agent": "agent_of",
    "has_object": "object_of",
    "has_cause": "cause_of",
    "has_quality": "quality_of",
    "instrument_of": "has_instrument",
    "token_of": "has_token",
}
_INVERSE.update({v: k for k, v in list(_INVERSE.items())})

REQUIRED_FILES = (
    "lemma.tsv",
    "forms.tsv",
    "meanings.tsv",
    "argstruct.tsv",
    "semnet.tsv",
    "gazetteer.tsv",
    "taghier.tsv",
)

Morph = Mapping[str, frozenset]


class ResourceError(Exception):
    """Malformed resource file; carries file name and line number."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{Path(path).name}:{line}: " if line else f"{Path(path).name}: "
        super().__init__(where + message)


class IntegrityError(ResourceError):
    """A row points at a lex_id or mng that does not exist."""


class UnknownSense(KeyError):
    pass


class Match(enum.Enum):
    EXACT = "exact"
    GENERAL = "general"
    NONE = "none"


@dataclass(frozen=True)
class Lexeme:
    lex_id: str
    lemma: str
    category: str
    aliases: tuple = ()
    lexical_constraints: str | None = None


@dataclass(frozen=True)
class WordForm:
    surface: str
    lex_id: str
    morph: Morph


@dataclass(frozen=True)
class Meaning:
    mng: str
    lex_id: str
    gloss: str = ""
    sem_tags: frozenset = frozenset()
    domain_tags: frozenset = frozenset()
    sense_constraints: str | None = None


@dataclass(frozen=True)
class ArgSlot:
    mng: str
    slot: int
    alt: int
    fnct: str
    cat: str | None
    conn: str | None = None
    vmd: str | None = None
    ctrl: bool | None = None
    opt: bool = False
    vsem: str | None = None

    @property
    def arg_index(self):
        return f"{self.slot};{self.alt}"


@dataclass(frozen=True)
class SemNode:
    mng: str
    predicate_path: tuple
    tags: frozenset


@dataclass(frozen=True)
class SemRelation:
    source: str
    relation: str
    target: str


@dataclass(frozen=True)
class GazetteerEntry:
    surface: str
    sem_tag: str


def invert_relation(rel: str) -> str:
    """Inverse of a semantic-net relation; involutive."""
    try:
        return _INVERSE[rel]
    except KeyError:
        raise ValueError(f"unknown relation {rel!r}") from None


def nil(value):
    """Normalise the NIL / empty encoding to None."""
    if value is None:
        return None
    value = value.strip()
    if value == "" or value.upper() == "NIL":
        return None
    return value.strip('"')


def split_list(value):
    value = nil(value)
    if value is None:
        return ()
    return tuple(v.strip() for v in value.split(";") if v.strip())


def parse_flag(value):
    value = nil(value)
    if value is None:
        return None
    v = value.lower()
    if v in ("t", "true", "1", "yes"):
        return True
    if v in ("f", "false", "0", "no"):
        return False
    raise ValueError(f"bad flag {value!r}")


def parse_morph(text) -> dict:
    morph = {}
    for item in split_list(text):
        if "=" not in item:
            raise ValueError(f"morph item {item!r} is not key=value")
        key, value = (s.strip() for s in item.split("=", 1))
        key = key.lower()
        if key not in MORPH_KEYS:
            raise ValueError(f"unknown morph feature {key!r}")
        morph[key] = frozenset(v.strip() for v in value.split("|") if v.strip())
    return morph


def _rows(path: Path) -> Iterator[tuple[int, list[str]]]:
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter="\t", quoting=csv.QUOTE_NONE), 1):
            if not row or not "".join(row).strip():
                continue
            if row[0].lstrip().startswith("#"):
                continue
            yield lineno, row


def _pad(row, n):
    return list(row) + [""] * (n - len(row))


def _upper_tags(values):
    return frozenset(v.upper() for v in values)


@dataclass(frozen=True)
class Weights:
    """Points per scoring test: (exact, general)."""

    table: Mapping[str, tuple[int, int]] = field(
        default_factory=lambda: MappingProxyType(
            {
                "semantic": (2, 1),
                "named_entity": (1, 0),
                "saturation": (1, 0),
                "completeness": (1, 0),
            }
        )
    )

    def exact(self, test):
        return self.table.get(test, (0, 0))[0]

    def general(self, test):
        return self.table.get(test, (0, 0))[1]


@dataclass(frozen=True)
class ResourceBundle:
    """Cross-indexed, read-only view of one language's resources."""

    lexemes: Mapping[str, Lexeme]
    forms: tuple
    meanings: Mapping[str, Meaning]
    slots: Mapping[str, tuple]
    nodes: Mapping[str, SemNode]
    relations: tuple
    gazetteer: Mapping[str, GazetteerEntry]
    parents: Mapping[str, str | None]
    weights: Weights = field(default_factory=Weights)
    _forms_by_surface: Mapping[str, tuple] = field(default=None, repr=False)
    _lex_by_name: Mapping[str, tuple] = field(default=None, repr=False)
    _senses_by_lex: Mapping[str, tuple] = field(default=None, repr=False)

    def __post_init__(self):
        by_surface = {}
        for wf in self.forms:
            by_surface.setdefault(wf.surface.casefold(), []).append(wf)
        by_name = {}
        for lex in self.lexemes.values():
            for name in (lex.lemma, *lex.aliases):
                by_name.setdefault(name.casefold(), []).append(lex.lex_id)
        senses = {}
        for m in self.meanings.values():
            senses.setdefault(m.lex_id, []).append(m.mng)
        object.__setattr__(self, "_forms_by_surface",
                           MappingProxyType({k: tuple(v) for k, v in by_surface.items()}))
        object.__setattr__(self, "_lex_by_name",
                           MappingProxyType({k: tuple(v) for k, v in by_name.items()}))
        object.__setattr__(self, "_senses_by_lex",
                           MappingProxyType({k: tuple(sorted(v)) for k, v in senses.items()}))

    # -- lexicon ---------------------------------------------------------

    def lookup_forms(self, surface: str) -> list[tuple[str, Morph, str]]:
        """All (lex_id, morph, category) readings of an exact surface string.

        Inflected forms come from the Forms table; lemmas and aliases without
        a matching Forms row are returned with empty morphology.
        """
        key = surface.casefold()
        out = []
        seen = set()
        for wf in self._forms_by_surface.get(key, ()):
            out.append((wf.lex_id, wf.morph, self.lexemes[wf.lex_id].category))
            seen.add(wf.lex_id)
        for lex_id in self._lex_by_name.get(key, ()):
            if lex_id not in seen:
                out.append((lex_id, MappingProxyType({}), self.lexemes[lex_id].category))
                seen.add(lex_id)
        return out

    def senses(self, lex_id: str) -> tuple:
        return self._senses_by_lex.get(lex_id, ())

    def arg_structure(self, mng: str) -> list[ArgSlot]:
        if mng not in self.meanings:
            raise UnknownSense(mng)
        return list(self.slots.get(mng, ()))

    def argument_functions(self) -> frozenset:
        """Function labels that name valency arguments (everything but the head)."""
        return frozenset(s.fnct for ss in self.slots.values() for s in ss if s.fnct != "v")

    # -- semantics -------------------------------------------------------

    def sense_tags(self, mng: str) -> frozenset:
        tags = set()
        m = self.meanings.get(mng)
        if m is not None:
            tags |= m.sem_tags
        node = self.nodes.get(mng)
        if node is not None:
            tags |= node.tags
        return frozenset(tags)

    def known_tag(self, tag: str) -> bool:
        return tag.upper() in self.parents

    def ancestors(self, tag: str) -> list[str]:
        chain = []
        cur = self.parents.get(tag.upper())
        while cur is not None and cur not in chain:
            chain.append(cur)
            cur = self.parents.get(cur)
        return chain

    def sem_matches(self, word_tags, required: str) -> Match:
        required = required.upper()
        if required not in self.parents:
            raise KeyError(f"unknown semantic tag {required!r}")
        tags = {t.upper() for t in word_tags}
        if required in tags:
            return Match.EXACT
        req_anc = set(self.ancestors(required))
        for t in tags:
            if required in self.ancestors(t) or t in req_anc:
                return Match.GENERAL
        return Match.NONE

    def related(self, mng: str, relation: str) -> list[str]:
        """Targets of ``mng`` under a relation or its inverse."""
        if relation in RELATIONS:
            return [r.target for r in self.relations if r.source == mng and r.relation == relation]
        base = invert_relation(relation)
        return [r.source for r in self.relations if r.target == mng and r.relation == base]


# -- loading -------------------------------------------------------------


def load_resources(resource_dir) -> ResourceBundle:
    """Load and cross-check every resource file of a directory."""
    root = Path(resource_dir)
    for name in REQUIRED_FILES:
        if not (root / name).is_file():
            raise ResourceError("missing resource file", root / name)

    lexemes = {}
    alias_owner = {}
    path = root / "lemma.tsv"
    for line, row in _rows(path):
        lex_id, lemma, category, aliases, constraints = _pad(row, 5)[:5]
        lex_id = lex_id.strip()
        if not lex_id or not lemma.strip() or not category.strip():
            raise ResourceError("lemma row needs lex_id, lemma and category", path, line)
        if lex_id in lexemes:
            raise ResourceError(f"duplicate lex_id {lex_id}", path, line)
        alias_list = split_list(aliases)
        for a in alias_list:
            if a.casefold() in alias_owner:
                raise ResourceError(f"alias {a!r} already belongs to {alias_owner[a.casefold()]}",
                                    path, line)
            alias_owner[a.casefold()] = lex_id
        lexemes[lex_id] = Lexeme(lex_id, lemma.strip(), category.strip(), alias_list, nil(constraints))

    forms = []
    path = root / "forms.tsv"
    for line, row in _rows(path):
        surface, lex_id, morph = _pad(row, 3)[:3]
        lex_id = lex_id.strip()
        if lex_id not in lexemes:
            raise IntegrityError(f"unknown lex_id {lex_id!r}", path, line)
        try:
            m = parse_morph(morph)
        except ValueError as exc:
            raise ResourceError(str(exc), path, line) from None
        forms.append(WordForm(surface.strip(), lex_id, MappingProxyType(m)))

    meanings = {}
    path = root / "meanings.tsv"
    for line, row in _rows(path):
        mng, lex_id, gloss, tags, domains, constraints = _pad(row, 6)[:6]
        mng, lex_id = mng.strip(), lex_id.strip()
        if not mng:
            raise ResourceError("meaning row needs mng", path, line)
        if mng in meanings:
            raise ResourceError(f"duplicate mng {mng}", path, line)
        if lex_id not in lexemes:
            raise IntegrityError(f"unknown lex_id {lex_id!r}", path, line)
        meanings[mng] = Meaning(mng, lex_id, gloss.strip(), _upper_tags(split_list(tags)),
                                frozenset(split_list(domains)), nil(constraints))

    slots = {}
    path = root / "argstruct.tsv"
    for line, row in _rows(path):
        mng, idx, fnct, cat, conn, vmd, ctrl, opt, vsem = _pad(row, 9)[:9]
        mng = mng.strip()
        if mng not in meanings:
            raise IntegrityError(f"unknown mng {mng!r}", path, line)
        try:
            i, j = (int(x) for x in idx.strip().split(";"))
            slot = ArgSlot(mng, i, j, fnct.strip(), nil(cat), nil(conn), nil(vmd),
                           parse_flag(ctrl), bool(parse_flag(opt)),
                           None if nil(vsem) is None else nil(vsem).upper())
        except ValueError as exc:
            raise ResourceError(f"bad argument row: {exc}", path, line) from None
        if not slot.fnct:
            raise ResourceError("argument row needs fnct", path, line)
        slots.setdefault(mng, []).append(slot)
    for mng, ss in slots.items():
        ss.sort(key=lambda s: (s.slot, s.alt))
        heads = {s.slot for s in ss if s.fnct == "v"}
        if len(heads) != 1:
            raise ResourceError(f"sense {mng} must have exactly one head (v) slot", root / "argstruct.tsv")

    nodes, relations = {}, []
    known_rel = set(_INVERSE)
    path = root / "semnet.tsv"
    for line, row in _rows(path):
        a, b, c = (x.strip() for x in _pad(row, 3)[:3])
        if b in known_rel:
            src, rel, dst = a, b, c
            if rel not in RELATIONS:
                src, rel, dst = dst, invert_relation(rel), src
            for ref in (src, dst):
                if ref not in meanings:
                    raise IntegrityError(f"unknown mng {ref!r}", path, line)
            relations.append(SemRelation(src, rel, dst))
        else:
            if a not in meanings:
                raise IntegrityError(f"unknown mng {a!r}", path, line)
            pred = tuple(p.strip() for p in b.split(">") if p.strip())
            if not pred:
                raise ResourceError("semantic node needs a predicate path", path, line)
            nodes[a] = SemNode(a, pred, _upper_tags(split_list(c)))

    gazetteer = {}
    path = root / "gazetteer.tsv"
    for line, row in _rows(path):
        surface, tag = (x.strip() for x in _pad(row, 2)[:2])
        if tag.lower() not in NE_TAGS:
            raise ResourceError(f"named-entity tag {tag!r} not in {sorted(NE_TAGS)}", path, line)
        gazetteer[surface] = GazetteerEntry(surface, tag.lower())

    parents = {}
    path = root / "taghier.tsv"
    for line, row in _rows(path):
        tag, parent = _pad(row, 2)[:2]
        tag = tag.strip().upper()
        parent = nil(parent)
        if not tag:
            raise ResourceError("tag row needs a tag", path, line)
        parents[tag] = parent.upper() if parent else None
        if parent:
            parents.setdefault(parent.upper(), None)

    for ss in slots.values():
        for s in ss:
            if s.vsem is not None and s.vsem not in parents:
                raise IntegrityError(f"VSEM {s.vsem!r} of {s.mng} is not in the tag hierarchy",
                                     root / "argstruct.tsv")

    weights = Weights()
    path = root / "weights.tsv"
    if path.is_file():
        weights = load_weights(path)

    return ResourceBundle(
        lexemes=MappingProxyType(lexemes),
        forms=tuple(forms),
        meanings=MappingProxyType(meanings),
        slots=MappingProxyType({k: tuple(v) for k, v in slots.items()}),
        nodes=MappingProxyType(nodes),
        relations=tuple(relations),
        gazetteer=MappingProxyType(gazetteer),
        parents=MappingProxyType(parents),
        weights=weights,
    )


def load_weights(path) -> Weights:
    table = dict(Weights().table)
    for line, row in _rows(Path(path)):
        name, exact, general = _pad(row, 3)[:3]
        try:
            table[name.strip()] = (int(exact), int(general or 0))
        except ValueError:
            raise ResourceError("weights need integer points", path, line) from None
    return Weights(MappingProxyType(table))
