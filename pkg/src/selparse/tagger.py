"""Tokenizer, sentence splitter and lexicon lookup."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from types import MappingProxyType

from .resources import ResourceBundle

NOUN = "noun"
UNKNOWN = "unknown"

# elided forms keep their apostrophe ("l'insalata" -> "l'" "insalata")
_TOKEN_RE = re.compile(r"\w+['’](?=\w)|\w+|[^\w\s]", re.UNICODE)
_SENTENCE_END = re.compile(r"[.!?]+(?=\s|$)")


@dataclass(frozen=True)
class Token:
    surface: str
    index: int
    char_span: tuple[int, int]

    @property
    def is_punct(self):
        return not any(c.isalnum() for c in self.surface)


@dataclass(frozen=True)
class Reading:
    category: str
    lex_id: str | None
    morph: MappingProxyType
    mng_set: frozenset
    lemma: str | None = None
    sem_tags: frozenset = frozenset()


@dataclass(frozen=True)
class TaggedToken:
    token: Token
    readings: tuple
    ne_tag: str | None = None
    flags: frozenset = field(default_factory=frozenset)

    @property
    def surface(self):
        return self.token.surface


def tokenize(text: str) -> list[Token]:
    return [Token(m.group(0), i, m.span()) for i, m in enumerate(_TOKEN_RE.finditer(text))]


def split_sentences(text: str) -> list[str]:
    """Split on runs of . ! ? followed by whitespace or end of text."""
    out, start = [], 0
    for m in _SENTENCE_END.finditer(text):
        chunk = text[start:m.end()].strip()
        if chunk:
            out.append(chunk)
        start = m.end()
    tail = text[start:].strip()
    if tail:
        out.append(tail)
    return out


def tag(tokens: list[Token], bundle: ResourceBundle) -> list[TaggedToken]:
    """Attach every lexicon reading (with its full sense set) to each token."""
    tagged = []
    for tok in tokens:
        readings = []
        for lex_id, morph, category in bundle.lookup_forms(tok.surface):
            mngs = frozenset(bundle.senses(lex_id))
            sem = frozenset().union(*(bundle.sense_tags(m) for m in mngs)) if mngs else frozenset()
            readings.append(Reading(category, lex_id, morph, mngs,
                                    bundle.lexemes[lex_id].lemma, sem))
        ne = bundle.gazetteer.get(tok.surface)
        flags = set()
        if ne is not None:
            readings.append(Reading(NOUN, None, MappingProxyType({}), frozenset(),
                                    tok.surface, frozenset({ne.sem_tag.upper()})))
        if not readings and not tok.is_punct:
            readings.append(Reading(NOUN, None, MappingProxyType({}), frozenset(), tok.surface))
            flags.add(UNKNOWN)
        tagged.append(TaggedToken(tok, tuple(readings), ne.sem_tag if ne else None,
                                  frozenset(flags)))
    return tagged
