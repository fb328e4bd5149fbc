"""Command-line entry point.

    selparse --resources fixtures/it --grammar fixtures/it/patterns.txt \
        --format table sentences.txt

Input is one sentence per line (or free text split on sentence punctuation
with ``--split``).  ``--document`` treats the whole input as one text and
runs the anaphora solver across sentences.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import output
from .engine import Grammar, MaxCyclesExceeded, ParserConfig
from .pattern_dsl import DSLError, load_grammar
from .pipeline import parse_document, parse_sentence
from .resources import ResourceError, load_resources
from .tagger import split_sentences

RESOURCES_ENV = "SELPARSE_RESOURCES"

log = logging.getLogger("selparse")


@dataclass(frozen=True)
class CliConfig:
    resource_dir: Path
    grammar_path: Path
    register: frozenset = frozenset()
    csbs: bool = True
    wsd_strength: str = "strict"
    format: str = output.BRACKETED
    trace: int = 0
    max_cycles: int = 50
    labels: frozenset | None = None
    collapse_empty: bool = False
    document: bool = False
    split: bool = False

    def parser_config(self) -> ParserConfig:
        return ParserConfig(csbs=self.csbs, register=self.register,
                            wsd_strength=self.wsd_strength, max_cycles=self.max_cycles,
                            trace=self.trace > 0)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(output.EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_arg_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="selparse", description="Rule-based selective constituency parser.")
    p.add_argument("input", nargs="?", help="input file (default: stdin)")
    p.add_argument("--resources", default=os.environ.get(RESOURCES_ENV),
                   help=f"resource directory (default: ${RESOURCES_ENV})")
    p.add_argument("--grammar", help="pattern file (default: <resources>/patterns.txt)")
    p.add_argument("--register", action="append", default=[],
                   help="enable patterns labelled @REGISTER (repeatable)")
    p.add_argument("--csbs", choices=("on", "off"), default="on",
                   help="constituent selection by score")
    p.add_argument("--wsd", choices=("strict", "lenient"), default="strict",
                   help="word-sense disambiguation strength")
    p.add_argument("--format", choices=output.FORMATS, default=output.BRACKETED)
    p.add_argument("--labels", help="comma-separated labels to bracket (bracketed format)")
    p.add_argument("--collapse-empty", action="store_true",
                   help="drop empty categories from dependency output")
    p.add_argument("--trace", action="count", default=0,
                   help="record per-cycle diagnostics; twice also logs them to stderr")
    p.add_argument("--max-cycles", type=int, default=50)
    p.add_argument("--document", action="store_true",
                   help="resolve anaphora across all input sentences")
    p.add_argument("--split", action="store_true",
                   help="split input on sentence punctuation instead of lines")
    return p


def config_from_args(ns) -> CliConfig:
    if not ns.resources:
        raise ResourceError(f"no resource directory (use --resources or set {RESOURCES_ENV})")
    rdir = Path(ns.resources)
    if not rdir.is_dir():
        raise ResourceError("resource directory not found", rdir)
    grammar = Path(ns.grammar) if ns.grammar else rdir / "patterns.txt"
    if not grammar.is_file():
        raise ResourceError("grammar file not found", grammar)
    if ns.max_cycles < 1:
        raise ValueError("--max-cycles must be positive")
    labels = frozenset(x.strip() for x in ns.labels.split(",") if x.strip()) if ns.labels else None
    return CliConfig(rdir, grammar, frozenset(ns.register), ns.csbs == "on", ns.wsd,
                     ns.format, ns.trace, ns.max_cycles, labels, ns.collapse_empty,
                     ns.document, ns.split)


def read_sentences(text: str, split: bool) -> list[str]:
    if split:
        return split_sentences(text)
    return [line.strip() for line in text.splitlines() if line.strip()]


def _emit(out, result, cfg: CliConfig, text, anaphora=None, sentence=0):
    if cfg.format != output.STRUCTURED:
        out.write(f"# {sentence + 1}: {text}\n")
    out.write(output.serialize(result, cfg.format, labels=cfg.labels,
                               collapse_empty=cfg.collapse_empty, anaphora=anaphora,
                               sentence=sentence, text=text))
    out.write("\n")
    if cfg.trace > 1:
        for d in result.diagnostics:
            log.info("%s", d)


def run(cfg: CliConfig, text: str, out=None) -> int:
    out = out or sys.stdout
    bundle = load_resources(cfg.resource_dir)
    grammar = Grammar(load_grammar(cfg.grammar_path))
    pcfg = cfg.parser_config()
    sentences = read_sentences(text, cfg.split or cfg.document and "\n" not in text.strip())
    if cfg.document:
        doc = parse_document(sentences, grammar, bundle, pcfg)
        for i, (s, r) in enumerate(zip(doc.sentences, doc.results)):
            _emit(out, r, cfg, s, doc.anaphora, i)
        return output.exit_status(doc.results)
    results = []
    for i, s in enumerate(sentences):
        r = parse_sentence(s, grammar, bundle, pcfg)
        results.append(r)
        _emit(out, r, cfg, s, None, i)
    return output.exit_status(results)


def main(argv=None) -> int:
    ns = build_arg_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if ns.trace > 1 else logging.WARNING,
                        format="%(levelname)s %(message)s")
    try:
        cfg = config_from_args(ns)
        if ns.input:
            text = Path(ns.input).read_text(encoding="utf-8")
        else:
            text = sys.stdin.read()
        return run(cfg, text)
    except (ResourceError, DSLError, ValueError, OSError) as exc:
        print(f"selparse: {exc}", file=sys.stderr)
        return output.EXIT_ERROR
    except MaxCyclesExceeded as exc:
        print(f"selparse: {exc}", file=sys.stderr)
        return output.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
