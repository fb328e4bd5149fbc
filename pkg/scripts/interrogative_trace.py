"""Parse the English interrogative and show what happens in each cycle.

    python scripts/interrogative_trace.py ["some sentence"]
"""

import sys
from collections import Counter
from pathlib import Path

from selparse import ParserConfig, load_grammar, load_resources
from selparse.engine import Grammar
from selparse.output import bracketed, to_constituency, to_dependency
from selparse.pipeline import parse_sentence

RES = Path(__file__).resolve().parent.parent / "fixtures" / "en"


def main():
    text = sys.argv[1] if len(sys.argv) > 1 else "Whom do you think John wants to invite?"
    bundle = load_resources(RES)
    grammar = Grammar(load_grammar(RES / "patterns.txt"))

    def observe(cycle, stack):
        live = Counter(r.tag for r in stack if not r.inhibited and r.birth == cycle)
        dead = sum(1 for r in stack if r.inhibited)
        print(f"cycle {cycle:2d}: born {dict(sorted(live.items()))}  inhibited so far {dead}")

    res = parse_sentence(text, grammar, bundle, ParserConfig(trace=True), observe)
    for d in res.diagnostics:
        if d["event"] == "inhibit":
            print(f"  cycle {d['cycle']}: #{d['record']} {d['reason']}")
    for p in res.parses:
        tree = to_constituency(p, res.tagged)
        print(bracketed(tree, labels={"CP"}))
        dt = to_dependency(tree, res.n_tokens)
        for dep, head, label in sorted(dt.edges):
            print(f"  {dt.nodes[dep].surface} -> {dt.nodes[head].surface} ({label})")


if __name__ == "__main__":
    main()
