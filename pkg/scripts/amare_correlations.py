"""Print the surviving senses of the head verb for the amare sentences.

    python scripts/amare_correlations.py [--wsd strict|lenient]
"""

import argparse
from pathlib import Path

from selparse import ParserConfig, load_grammar, load_resources
from selparse.engine import Grammar
from selparse.pipeline import parse_sentence

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

SENTENCES = [
    "Paolo ama l'insalata",
    "Paolo ama cantare",
    "Paolo ama che gli amici lo lodino",
    "Paolo amava di cantare ogni giorno per qualche ora",
    "Paolo amerebbe che gli dicessero la verità",
    "Paolo ama la madre",
    "Paolo ama il lavoro",
    "Paolo ama il cavallo",
]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--wsd", choices=("strict", "lenient"), default="lenient")
    ap.add_argument("--resources", default=str(FIXTURES / "it"))
    args = ap.parse_args()
    bundle = load_resources(args.resources)
    grammar = Grammar(load_grammar(Path(args.resources) / "patterns.txt"))
    cfg = ParserConfig(wsd_strength=args.wsd)
    for text in SENTENCES:
        res = parse_sentence(text, grammar, bundle, cfg)
        verb = res.tagged[1]
        senses = set()
        for p in res.parses:
            senses |= p.mng_sets.get(1, frozenset())
        status = "full" if res.full else "partial"
        print(f"{text:55s} {verb.surface:10s} {status:8s} {len(res.parses)} parse(s)  "
              f"{', '.join(sorted(senses)) or '-'}")


if __name__ == "__main__":
    main()
