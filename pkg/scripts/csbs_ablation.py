"""Compare record and parse counts with selection-by-score on and off.

Runs the Italian fixture corpus and a batch of random toy sentences over
an ambiguous grammar.

    python scripts/csbs_ablation.py [--n 200] [--seed 0]
"""

import argparse
import random
from pathlib import Path

from selparse import ParserConfig, load_grammar, load_resources, run_parse, tag, tokenize
from selparse.engine import Grammar
from selparse.pattern_dsl import parse_grammar
from selparse.pipeline import parse_sentence

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
IT = [
    "Paolo ama l'insalata",
    "Paolo ama cantare",
    "Paolo ama che gli amici lo lodino",
    "Paolo amava di cantare ogni giorno per qualche ora",
    "Paolo amerebbe che gli dicessero la verità",
]
TOY_GRAMMAR = """N, (noun)
V, (verb)
NP, (N)
VP, (NP, V, NP), (2,0,2), (subj,v,obj)
CP, (VP)
CP, (CP, NP), (0,1), (0,mod)"""
TOY_WORDS = ["ka", "lo", "mi", "ri", "su", "Ko"]


def counts(res):
    return len(res.stack), sum(1 for r in res.stack if not r.inhibited), len(res.parses)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    bundle = load_resources(FIXTURES / "it")
    grammar = Grammar(load_grammar(FIXTURES / "it" / "patterns.txt"))
    print(f"{'sentence':55s} {'records on/off':>15s} {'live':>9s} {'parses':>8s}")
    for text in IT:
        on = counts(parse_sentence(text, grammar, bundle, ParserConfig(csbs=True)))
        off = counts(parse_sentence(text, grammar, bundle, ParserConfig(csbs=False)))
        print(f"{text:55s} {on[0]:>7d}/{off[0]:<7d} {on[1]:>4d}/{off[1]:<4d} {on[2]:>3d}/{off[2]:<3d}")

    toy = load_resources(FIXTURES / "toy")
    g = Grammar(parse_grammar(TOY_GRAMMAR))
    rng = random.Random(args.seed)
    pruned = total_on = total_off = 0
    for _ in range(args.n):
        text = " ".join(rng.choice(TOY_WORDS) for _ in range(rng.randint(2, 6)))
        tagged = tag(tokenize(text), toy)
        on = run_parse(tagged, g, toy, ParserConfig(csbs=True))
        off = run_parse(tagged, g, toy, ParserConfig(csbs=False))
        total_on += len(on.stack)
        total_off += len(off.stack)
        pruned += len(on.stack) < len(off.stack)
    print(f"\nrandom toy sentences: {args.n}, pruned in {pruned}, "
          f"records {total_on} with selection vs {total_off} without")


if __name__ == "__main__":
    main()
