"""Rule-based selective constituency parser with joint sense disambiguation."""

from .engine import Grammar, MaxCyclesExceeded, ParserConfig, ParseResult, run_parse
from .pattern_dsl import load_grammar, parse_constraint_expr, parse_pattern_line
from .resources import ResourceBundle, ResourceError, load_resources
from .tagger import split_sentences, tag, tokenize

__all__ = [
    "Grammar", "MaxCyclesExceeded", "ParserConfig", "ParseResult", "ResourceBundle",
    "ResourceError", "load_grammar", "load_resources", "parse_constraint_expr",
    "parse_pattern_line", "run_parse", "split_sentences", "tag", "tokenize",
]
