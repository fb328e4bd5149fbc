"""Constituency and dependency trees built from surviving records, plus serializers."""

from __future__ import annotations

import json
import string
from dataclasses import dataclass, field

from .records import EmptyLeaf, Record

BRACKETED = "bracketed"
TABLE = "table"
STRUCTURED = "structured"
FORMATS = (BRACKETED, TABLE, STRUCTURED)

EMPTY_FOREST = "(empty forest)"

EXIT_FULL = 0
EXIT_PARTIAL = 1
EXIT_ERROR = 2

# i, j, k, ... then a..h for the unlikely long tail
_INDEX_LETTERS = string.ascii_lowercase[8:] + string.ascii_lowercase[:8]


class StructureError(ValueError):
    """The grammar produced a node the dependency converter cannot read."""


@dataclass
class TreeNode:
    label: str
    span: tuple
    function: str | None = None
    index: str | None = None
    children: list = field(default_factory=list)
    deps: tuple | None = None
    # leaves only
    token: int | None = None
    surface: str | None = None
    empty: str | None = None
    leaf_id: int | None = None
    record_id: int | None = None

    @property
    def is_leaf(self):
        return not self.children and (self.token is not None or self.empty is not None)

    def leaves(self):
        if self.is_leaf:
            return [self]
        out = []
        for c in self.children:
            out.extend(c.leaves())
        return out


@dataclass
class ConstituencyTree:
    root: TreeNode
    score: int = 0

    def leaves(self):
        return self.root.leaves()


@dataclass(frozen=True)
class DepNode:
    id: int
    surface: str
    token: int | None = None
    empty: str | None = None
    index: str | None = None


@dataclass
class DependencyTree:
    nodes: dict  # id -> DepNode
    edges: list  # (dependent, head, label)
    root: int

    def head_of(self, node_id):
        for d, h, lab in self.edges:
            if d == node_id:
                return h, lab
        return None

    def check(self):
        """Raise StructureError unless there is one root, one head per node and no cycle."""
        heads = {}
        for d, h, _ in self.edges:
            if d in heads:
                raise StructureError(f"node {d} has two heads")
            heads[d] = h
        roots = [n for n in self.nodes if n not in heads]
        if roots != [self.root]:
            raise StructureError(f"expected single root {self.root}, found {roots}")
        for n in self.nodes:
            seen = set()
            while n in heads:
                if n in seen:
                    raise StructureError("dependency cycle")
                seen.add(n)
                n = heads[n]
        return self


# -- constituency ------------------------------------------------------------


def coref_letters(rec: Record) -> dict:
    """Leaf key -> index letter for every chain of two or more leaves.

    Letters follow the surface order of each chain's first leaf.
    """
    order = {}
    for i, leaf in enumerate(rec.leaves()):
        key = leaf.key if isinstance(leaf, EmptyLeaf) else ("t", leaf.token)
        order.setdefault(key, i)
    chains = [c for c in rec.chains() if len(c) > 1]
    chains.sort(key=lambda c: min(order.get(k, 1 << 30) for k in c))
    out = {}
    for n, ch in enumerate(chains):
        letter = _INDEX_LETTERS[n % len(_INDEX_LETTERS)] + ("" if n < 26 else str(n // 26))
        for k in ch:
            out[k] = letter
    return out


def to_constituency(rec: Record, tagged) -> ConstituencyTree:
    letters = coref_letters(rec)

    def build(node, fnct):
        if isinstance(node, EmptyLeaf):
            return TreeNode(node.kind, node.span, fnct, letters.get(node.key), empty=node.kind,
                            leaf_id=node.id)
        if node.is_terminal:
            return TreeNode(node.tag, node.span, fnct, letters.get(("t", node.token)),
                            token=node.token, surface=tagged[node.token].surface,
                            record_id=node.id)
        kids = [build(c, node.function(k)) for k, c in enumerate(node.children, 1)]
        return TreeNode(node.tag, node.span, fnct, None, kids, node.pattern.deps,
                        record_id=node.id)

    return ConstituencyTree(build(rec, None), rec.card.total if rec.card else 0)


# -- dependency --------------------------------------------------------------


def _node_ids(tree: ConstituencyTree, n_tokens: int):
    ids, nxt = {}, n_tokens + 1
    for leaf in tree.leaves():
        if leaf.token is not None:
            ids[id(leaf)] = leaf.token + 1
        else:
            ids[id(leaf)] = nxt
            nxt += 1
    return ids


def to_dependency(tree: ConstituencyTree, n_tokens: int | None = None,
                  collapse_empty: bool = False) -> DependencyTree:
    """Head percolation: every non-head child's lexical head depends on the
    lexical head of the position its deps entry names.

    Overt tokens keep their 1-based token number as id; empty categories
    are numbered after the last token.
    """
    leaves = tree.leaves()
    if n_tokens is None:
        n_tokens = 1 + max((lf.token for lf in leaves if lf.token is not None), default=-1)
    ids = _node_ids(tree, n_tokens)
    nodes = {}
    for lf in leaves:
        nid = ids[id(lf)]
        surface = lf.surface if lf.token is not None else lf.empty
        nodes[nid] = DepNode(nid, surface, lf.token, lf.empty, lf.index)
    edges = []

    def head(node) -> int:
        if node.is_leaf:
            return ids[id(node)]
        if len(node.children) == 1:
            return head(node.children[0])
        if not node.deps:
            raise StructureError(f"{node.label}{list(node.span)} has several children but no deps")
        heads = [head(c) for c in node.children]
        top = node.deps.index(0)
        for k, (c, d) in enumerate(zip(node.children, node.deps)):
            if d == 0:
                continue
            edges.append((heads[k], heads[d - 1], c.function or "dep"))
        return heads[top]

    root = head(tree.root)
    dt = DependencyTree(nodes, edges, root)
    if collapse_empty:
        dt = _collapse(dt)
    return dt


def _collapse(dt: DependencyTree) -> DependencyTree:
    gone = {n for n, node in dt.nodes.items() if node.empty is not None}
    if dt.root in gone:
        raise StructureError("cannot collapse an empty root")
    heads = {d: (h, lab) for d, h, lab in dt.edges}

    def lift(h):
        while h in gone:
            h = heads[h][0]
        return h

    edges = [(d, lift(h), lab) for d, h, lab in dt.edges if d not in gone]
    nodes = {n: v for n, v in dt.nodes.items() if n not in gone}
    return DependencyTree(nodes, edges, dt.root)


# -- serialization -----------------------------------------------------------


def bracketed(tree: ConstituencyTree, labels=None) -> str:
    """Labelled brackets; with ``labels`` only those nodes are bracketed."""

    def leaf_text(lf):
        text = lf.surface if lf.token is not None else lf.empty
        return f"{text}_{lf.index}" if lf.index else text

    def walk(node):
        if node.is_leaf:
            return leaf_text(node)
        inner = " ".join(walk(c) for c in node.children)
        if labels is not None and node.label not in labels:
            return inner
        return f"[{node.label} {inner}]"

    return walk(tree.root)


def _forest(result):
    return [to_constituency(r, result.tagged) for r in result.parses]


def _fragments_line(result, trees, labels):
    """Partial parses: fragments in surface order, uncovered tokens bare."""
    parts, pos = [], 0
    for t in sorted(trees, key=lambda t: t.root.span):
        a, b = t.root.span
        if a < pos:
            continue
        parts.extend(result.tagged[i].surface for i in range(pos, a))
        parts.append(bracketed(t, labels))
        pos = b
    parts.extend(result.tagged[i].surface for i in range(pos, result.n_tokens))
    return " ".join(parts)


def _anaphora_marks(anaphora, sentence):
    """(kind, position) -> index letters for one sentence of a document."""
    marks = {}
    for ci in anaphora or ():
        if ci.antecedent is not None and ci.antecedent[0] == sentence:
            marks.setdefault(("t", ci.antecedent[1]), []).append(ci.index)
        for si, kind, pos in ci.anaphors:
            if si == sentence:
                key = ("e", "pro", pos) if kind == "pro" else ("t", pos)
                marks.setdefault(key, []).append(ci.index)
    return marks


def table(result, labels=None, collapse_empty=False, anaphora=None, sentence=0) -> str:
    """One row per token: index, surface, head, function, surviving senses, coref."""
    lines = []
    trees = _forest(result)
    if not trees:
        return EMPTY_FOREST
    marks = _anaphora_marks(anaphora, sentence)
    for n, (rec, tree) in enumerate(zip(result.parses, trees), 1):
        kind = "full" if result.full else "partial"
        lines.append(f"# parse {n} {kind} {rec.tag}[{rec.span[0]},{rec.span[1]}) score={tree.score}")
        dt = to_dependency(tree, result.n_tokens, collapse_empty)
        rows = sorted(dt.nodes.values(), key=lambda d: d.id)
        covered = {d.token for d in rows if d.token is not None}
        for d in rows:
            h = dt.head_of(d.id)
            head, lab = (h[0], h[1]) if h else (0, "root")
            if d.token is not None:
                mngs = ",".join(sorted(rec.mng_sets.get(d.token, ()))) or "_"
                extra = marks.get(("t", d.token), [])
            else:
                mngs = "_"
                extra = marks.get(("e", d.empty, _empty_pos(tree, d.id, result.n_tokens)), [])
            coref = ",".join(x for x in [d.index, *extra] if x) or "_"
            lines.append(f"{d.id}\t{d.surface}\t{head}\t{lab}\t{mngs}\t{coref}")
        for i, tt in enumerate(result.tagged):
            if i not in covered:
                lines.append(f"{i + 1}\t{tt.surface}\t_\t_\t_\t_")
    return "\n".join(lines)


def _empty_pos(tree, node_id, n_tokens):
    ids = _node_ids(tree, n_tokens)
    for lf in tree.leaves():
        if ids[id(lf)] == node_id:
            return lf.span[0]
    return None


def _tree_json(node: TreeNode):
    out = {"label": node.label, "span": list(node.span)}
    if node.function:
        out["function"] = node.function
    if node.index:
        out["index"] = node.index
    if node.is_leaf:
        if node.token is not None:
            out["token"] = node.token
            out["surface"] = node.surface
        else:
            out["empty"] = node.empty
        return out
    out["children"] = [_tree_json(c) for c in node.children]
    return out


def structured_dict(result, collapse_empty=False, anaphora=None, text=None) -> dict:
    parses = []
    for rec, tree in zip(result.parses, _forest(result)):
        dt = to_dependency(tree, result.n_tokens, collapse_empty)
        parses.append({
            "record": rec.id,
            "score": tree.score,
            "score_card": dict(rec.card.test_points) if rec.card else {},
            "constituency": _tree_json(tree.root),
            "dependency": {
                "root": dt.root,
                "nodes": [{"id": d.id, "surface": d.surface, "token": d.token,
                           "empty": d.empty, "index": d.index}
                          for d in sorted(dt.nodes.values(), key=lambda d: d.id)],
                "edges": [{"dependent": d, "head": h, "function": lab}
                          for d, h, lab in sorted(dt.edges)],
            },
            "senses": {str(t): sorted(m) for t, m in sorted(rec.mng_sets.items())},
        })
    doc = {
        "text": text,
        "tokens": [{"index": i, "surface": tt.surface,
                    "flags": sorted(tt.flags), "ne": tt.ne_tag}
                   for i, tt in enumerate(result.tagged)],
        "status": "full" if result.full else ("partial" if result.parses else "empty"),
        "cycles": result.cycles,
        "parses": parses,
        "diagnostics": result.diagnostics,
    }
    if anaphora is not None:
        doc["anaphora"] = [{"index": ci.index, "antecedent": ci.antecedent,
                            "anaphors": [list(a) for a in ci.anaphors]} for ci in anaphora]
    return doc


def serialize(result, fmt: str = BRACKETED, *, labels=None, collapse_empty=False,
              anaphora=None, sentence=0, text=None) -> str:
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}; choose from {', '.join(FORMATS)}")
    if fmt == STRUCTURED:
        return json.dumps(structured_dict(result, collapse_empty, anaphora, text),
                          ensure_ascii=False, sort_keys=True, indent=2)
    if fmt == TABLE:
        return table(result, labels, collapse_empty, anaphora, sentence)
    trees = _forest(result)
    if not trees:
        return EMPTY_FOREST
    if not result.full:
        return _fragments_line(result, trees, labels)
    return "\n".join(bracketed(t, labels) for t in trees)


def exit_status(results) -> int:
    """0 when every sentence has a full-span parse, 1 otherwise."""
    results = list(results)
    if results and all(r.full for r in results):
        return EXIT_FULL
    return EXIT_PARTIAL
