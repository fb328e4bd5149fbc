"""Text in, parse results out: tokenize, tag, parse, and resolve anaphora."""

from __future__ import annotations

from dataclasses import dataclass, field

from .disambiguation import AnaphoraConfig, CorefIndex, resolve_anaphora
from .engine import Grammar, ParserConfig, ParseResult, run_parse
from .resources import ResourceBundle
from .tagger import split_sentences, tag, tokenize


@dataclass
class Document:
    sentences: list[str]
    results: list[ParseResult]
    anaphora: list[CorefIndex] = field(default_factory=list)


def parse_sentence(text: str, grammar: Grammar, bundle: ResourceBundle,
                   cfg: ParserConfig | None = None, observer=None) -> ParseResult:
    """Parse one sentence.  Punctuation is dropped before parsing, so a
    full-span parse covers every word token."""
    tokens = [t for t in tokenize(text) if not t.is_punct]
    return run_parse(tag(tokens, bundle), grammar, bundle, cfg, observer)


def parse_document(text_or_sentences, grammar: Grammar, bundle: ResourceBundle,
                   cfg: ParserConfig | None = None,
                   anaphora: AnaphoraConfig | None = None) -> Document:
    if isinstance(text_or_sentences, str):
        sentences = split_sentences(text_or_sentences)
    else:
        sentences = list(text_or_sentences)
    results = [parse_sentence(s, grammar, bundle, cfg) for s in sentences]
    return Document(sentences, results, resolve_anaphora(results, bundle, anaphora))
