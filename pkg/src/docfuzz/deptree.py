"""Dependency parse trees and embedded-subtree patterns.

Trees are rooted, labeled, and ordered: children are ordered by surface
position, and node labels are the abstract token kinds (D_TYPE, ENUM, ...)
for abstract tokens and the lowercase lemma otherwise.

A :class:`Subtree` is a pattern over such trees.  Each pattern edge carries a
tag: DIRECT edges must map to parent-child pairs in the host tree, ANCESTOR
edges to ancestor-descendant paths of any length.  Sibling order is always
preserved.  :func:`enumerate_embedded_subtrees` produces the pattern of every
connected node subset with the tags the subset actually induces (DIRECT for
length-1 paths, ANCESTOR for longer ones); :func:`matches` checks the lenient
semantics in which ANCESTOR accepts paths of length >= 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator

from docfuzz.normalize import ABSTRACT_KINDS

__all__ = [
    "DIRECT",
    "ANCESTOR",
    "DepTree",
    "MalformedTreeError",
    "Subtree",
    "decode_pattern",
    "enumerate_embedded_subtrees",
    "find_embedding",
    "iter_embeddings",
    "matches",
    "pattern_subsumes",
]

DIRECT = "dir"
ANCESTOR = "anc"


class MalformedTreeError(ValueError):
    """Raised when a CoNLL-U block does not describe a single rooted tree."""


class DepTree:
    """An immutable dependency tree over one sentence's tokens.

    Node ``i`` corresponds to token ``i`` of the normalized sentence, so a
    matched pattern node leads straight back to the token payload.
    """

    __slots__ = (
        "labels",
        "forms",
        "lemmas",
        "deprels",
        "parent",
        "children",
        "root",
        "preorder",
        "order",
        "span_end",
        "depth",
    )

    def __init__(
        self,
        labels: tuple[str, ...],
        parent: tuple[int, ...],
        forms: tuple[str, ...] | None = None,
        lemmas: tuple[str, ...] | None = None,
        deprels: tuple[str, ...] | None = None,
        sent_id: str = "<tree>",
    ) -> None:
        n = len(labels)
        if len(parent) != n or n == 0:
            raise MalformedTreeError(f"{sent_id}: empty tree or length mismatch")
        roots = [i for i, p in enumerate(parent) if p == -1]
        if len(roots) != 1:
            raise MalformedTreeError(f"{sent_id}: expected exactly one root, found {len(roots)}")
        for i, p in enumerate(parent):
            if p != -1 and not (0 <= p < n):
                raise MalformedTreeError(f"{sent_id}: head of node {i} out of range")

        self.labels = labels
        self.forms = forms if forms is not None else labels
        self.lemmas = lemmas if lemmas is not None else labels
        self.deprels = deprels if deprels is not None else ("dep",) * n
        self.parent = parent
        self.root = roots[0]

        kids: list[list[int]] = [[] for _ in range(n)]
        for i, p in enumerate(parent):
            if p != -1:
                kids[p].append(i)
        self.children = tuple(tuple(sorted(c)) for c in kids)

        preorder = [-1] * n
        order: list[int] = []
        depth = [0] * n
        stack = [(self.root, 0)]
        while stack:
            node, d = stack.pop()
            preorder[node] = len(order)
            order.append(node)
            depth[node] = d
            for child in reversed(self.children[node]):
                stack.append((child, d + 1))
        if len(order) != n:
            raise MalformedTreeError(f"{sent_id}: head chain has a cycle or unreachable nodes")
        span_end = [0] * n
        for node in reversed(order):
            end = preorder[node]
            for child in self.children[node]:
                end = max(end, span_end[child])
            span_end[node] = end
        self.preorder = tuple(preorder)
        self.order = tuple(order)
        self.span_end = tuple(span_end)
        self.depth = tuple(depth)

    def __len__(self) -> int:
        return len(self.labels)

    def is_ancestor(self, u: int, v: int) -> bool:
        """True iff *u* is a strict ancestor of *v*."""
        return u != v and self.preorder[u] < self.preorder[v] <= self.span_end[u]

    def descendants(self, u: int) -> list[int]:
        lo, hi = self.preorder[u], self.span_end[u]
        return [self.order[k] for k in range(lo + 1, hi + 1)]


_ESCAPE = re.compile(r"[()%\s]")


def _esc(label: str) -> str:
    return _ESCAPE.sub(lambda m: f"%{ord(m.group(0)):02x}", label)


def _unesc(text: str) -> str:
    return re.sub(r"%([0-9a-f]{2})", lambda m: chr(int(m.group(1), 16)), text)


@dataclass(frozen=True)
class Subtree:
    """A pattern: labels in preorder, parent positions, and edge tags.

    ``parents[0] == -1`` and ``tags[0] == ""``; for every other node ``i``,
    ``parents[i] < i`` and ``tags[i]`` is DIRECT or ANCESTOR.  Sibling order in
    the pattern is preorder order, which matching preserves.
    """

    labels: tuple[str, ...]
    parents: tuple[int, ...]
    tags: tuple[str, ...]

    def __post_init__(self) -> None:
        n = len(self.labels)
        if not (len(self.parents) == len(self.tags) == n) or n == 0:
            raise ValueError("pattern arrays must be nonempty and aligned")
        if self.parents[0] != -1 or self.tags[0] != "":
            raise ValueError("pattern root must have parent -1 and empty tag")
        # A valid preorder layout attaches each node to the rightmost path of
        # its prefix; anything else would not round-trip through encode().
        rightmost = [0]
        for i in range(1, n):
            if self.parents[i] not in rightmost:
                raise ValueError("pattern nodes must be laid out in preorder")
            if self.tags[i] not in (DIRECT, ANCESTOR):
                raise ValueError(f"bad edge tag {self.tags[i]!r}")
            rightmost = rightmost[: rightmost.index(self.parents[i]) + 1] + [i]

    @property
    def size(self) -> int:
        return len(self.labels)

    def children_of(self, i: int) -> list[int]:
        return [j for j in range(1, self.size) if self.parents[j] == i]

    def encode(self) -> str:
        """Canonical string key; injective over labeled ordered tagged patterns."""
        parts: list[str] = []

        def emit(i: int) -> None:
            parts.append(_esc(self.labels[i]))
            for j in self.children_of(i):
                parts.append("(" + (">" if self.tags[j] == DIRECT else "~"))
                emit(j)
                parts.append(")")

        emit(0)
        return "".join(parts)

    @classmethod
    def single(cls, label: str) -> Subtree:
        return cls(labels=(label,), parents=(-1,), tags=("",))

    def extended(self, attach: int, label: str, tag: str) -> Subtree:
        """Return a copy with one new rightmost leaf under preorder node *attach*."""
        return Subtree(
            labels=self.labels + (label,),
            parents=self.parents + (attach,),
            tags=self.tags + (tag,),
        )

    def rightmost_path(self) -> list[int]:
        path = [0]
        while True:
            kids = self.children_of(path[-1])
            if not kids:
                return path
            path.append(kids[-1])


def decode_pattern(encoded: str) -> Subtree:
    """Inverse of :meth:`Subtree.encode`."""
    labels: list[str] = []
    parents: list[int] = []
    tags: list[str] = []

    def parse_node(pos: int, parent: int, tag: str) -> int:
        m = re.match(r"[^()]*", encoded[pos:])
        label = m.group(0)
        if not label:
            raise ValueError(f"bad pattern encoding at {pos}: {encoded!r}")
        me = len(labels)
        labels.append(_unesc(label))
        parents.append(parent)
        tags.append(tag)
        pos += len(label)
        while pos < len(encoded) and encoded[pos] == "(":
            edge = encoded[pos + 1]
            child_tag = DIRECT if edge == ">" else ANCESTOR
            pos = parse_node(pos + 2, me, child_tag)
            if pos >= len(encoded) or encoded[pos] != ")":
                raise ValueError(f"unbalanced pattern encoding: {encoded!r}")
            pos += 1
        return pos

    end = parse_node(0, -1, "")
    if end != len(encoded):
        raise ValueError(f"trailing garbage in pattern encoding: {encoded!r}")
    return Subtree(labels=tuple(labels), parents=tuple(parents), tags=tuple(tags))


def load_trees(path: str) -> dict[str, DepTree]:
    """Read a CoNLL-U bundle into one tree per ``# sent_id`` block.

    Only the ID, FORM, LEMMA, HEAD, and DEPREL columns are consumed.  Node
    labels are the form for abstract tokens and the lowercase lemma otherwise.

    Raises:
        MalformedTreeError: on blocks with zero/multiple roots or cyclic heads,
            naming the sentence id.
    """
    trees: dict[str, DepTree] = {}
    sent_id: str | None = None
    rows: list[tuple[str, str, int, str]] = []

    def finish() -> None:
        nonlocal sent_id, rows
        if not rows:
            sent_id = None
            return
        if sent_id is None:
            raise MalformedTreeError(f"{path}: sentence block without a sent_id comment")
        if sent_id in trees:
            raise MalformedTreeError(f"{path}: duplicate sent_id {sent_id!r}")
        forms = tuple(r[0] for r in rows)
        lemmas = tuple(r[1] for r in rows)
        heads = tuple(r[2] for r in rows)
        deprels = tuple(r[3] for r in rows)
        labels = tuple(
            form if form in ABSTRACT_KINDS else (lemma if lemma != "_" else form).lower()
            for form, lemma in zip(forms, lemmas)
        )
        parent = tuple(h - 1 for h in heads)
        trees[sent_id] = DepTree(
            labels=labels, parent=parent, forms=forms, lemmas=lemmas, deprels=deprels,
            sent_id=sent_id,
        )
        sent_id = None
        rows = []

    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip():
                finish()
                continue
            if line.startswith("#"):
                m = re.match(r"#\s*sent_id\s*=\s*(.+)$", line)
                if m:
                    sent_id = m.group(1).strip()
                continue
            cols = line.split("\t")
            if len(cols) != 10:
                raise MalformedTreeError(f"{path}:{lineno}: expected 10 columns, got {len(cols)}")
            if "-" in cols[0] or "." in cols[0]:
                continue
            try:
                head = int(cols[6])
            except ValueError as exc:
                raise MalformedTreeError(f"{path}:{lineno}: HEAD is not an integer") from exc
            rows.append((cols[1], cols[2], head, cols[7]))
    finish()
    return trees


def _candidates(tree: DepTree, pattern: Subtree, m: int, u: int, strict: bool) -> list[int]:
    """Host candidates for pattern node *m* whose parent mapped to tree node *u*."""
    tag = pattern.tags[m]
    if tag == DIRECT:
        nodes = list(tree.children[u])
    else:
        nodes = tree.descendants(u)
        if strict:
            min_depth = tree.depth[u] + 2
            nodes = [v for v in nodes if tree.depth[v] >= min_depth]
    return [v for v in nodes if tree.labels[v] == pattern.labels[m]]


def iter_embeddings(
    pattern: Subtree, tree: DepTree, strict: bool = False
) -> Iterator[tuple[int, ...]]:
    """Yield embeddings (pattern-preorder -> tree node) in leftmost-first order.

    With ``strict=True`` ANCESTOR edges require paths of length >= 2, i.e. the
    tags the embedding induces are exactly the pattern's tags; this is the
    membership test used when counting pattern occurrences.
    """
    n = pattern.size
    prev_sibling = [-1] * n
    last_child: dict[int, int] = {}
    for i in range(1, n):
        p = pattern.parents[i]
        prev_sibling[i] = last_child.get(p, -1)
        last_child[p] = i

    phi = [-1] * n

    def extend(m: int) -> Iterator[tuple[int, ...]]:
        if m == n:
            yield tuple(phi)
            return
        if m == 0:
            cands = [v for v in tree.order if tree.labels[v] == pattern.labels[0]]
        else:
            cands = _candidates(tree, pattern, m, phi[pattern.parents[m]], strict)
            sib = prev_sibling[m]
            if sib != -1:
                floor = tree.span_end[phi[sib]]
                cands = [v for v in cands if tree.preorder[v] > floor]
        cands.sort(key=lambda v: tree.preorder[v])
        for v in cands:
            phi[m] = v
            yield from extend(m + 1)
        phi[m] = -1

    yield from extend(0)


def find_embedding(pattern: Subtree, tree: DepTree, strict: bool = False) -> tuple[int, ...] | None:
    """Leftmost embedding of *pattern* in *tree*, or None."""
    return next(iter_embeddings(pattern, tree, strict=strict), None)


def matches(pattern: Subtree, tree: DepTree) -> bool:
    """True iff *pattern* embeds in *tree* (ANCESTOR edges accept length >= 1)."""
    return find_embedding(pattern, tree) is not None


def contains_induced(pattern: Subtree, tree: DepTree) -> bool:
    """True iff some node subset of *tree* induces exactly *pattern*."""
    return find_embedding(pattern, tree, strict=True) is not None


def enumerate_embedded_subtrees(tree: DepTree, max_size: int) -> set[Subtree]:
    """All patterns induced by connected node subsets of up to *max_size* nodes.

    A subset is connected when restricting the ancestor relation to it leaves
    a single root; its pattern keeps the subset's labels and sibling order and
    tags each edge DIRECT when the tree path has length 1, ANCESTOR otherwise.
    Cost grows combinatorially with tree size; intended for sentence-scale
    trees.
    """
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    found: set[Subtree] = set()
    for r in range(len(tree)):
        desc = sorted(tree.descendants(r), key=lambda v: tree.preorder[v])
        for k in range(0, min(max_size - 1, len(desc)) + 1):
            for combo in combinations(desc, k):
                found.add(_induced_pattern(tree, r, combo))
    return found


def _induced_pattern(tree: DepTree, root: int, rest: tuple[int, ...]) -> Subtree:
    nodes = [root, *rest]
    nodes.sort(key=lambda v: tree.preorder[v])
    index = {v: i for i, v in enumerate(nodes)}
    labels = tuple(tree.labels[v] for v in nodes)
    parents = [-1] * len(nodes)
    tags = [""] * len(nodes)
    for i, v in enumerate(nodes[1:], start=1):
        u = tree.parent[v]
        steps = 1
        while u not in index:
            u = tree.parent[u]
            steps += 1
        parents[i] = index[u]
        tags[i] = DIRECT if steps == 1 else ANCESTOR
    return Subtree(labels=labels, parents=tuple(parents), tags=tuple(tags))


def pattern_subsumes(small: Subtree, large: Subtree) -> bool:
    """True iff every tree matched by *large* is matched by *small*.

    Checked structurally: *small* embeds into *large* with DIRECT edges mapped
    onto single DIRECT edges of *large* and ANCESTOR edges onto any nonempty
    path, preserving sibling order.
    """
    n = small.size
    prev_sibling = [-1] * n
    last_child: dict[int, int] = {}
    for i in range(1, n):
        p = small.parents[i]
        prev_sibling[i] = last_child.get(p, -1)
        last_child[p] = i

    order = list(range(large.size))
    span_end = [0] * large.size
    for i in reversed(order):
        end = i
        for j in large.children_of(i):
            end = max(end, span_end[j])
        span_end[i] = end

    def descendants(u: int) -> list[int]:
        return list(range(u + 1, span_end[u] + 1))

    phi = [-1] * n

    def extend(m: int) -> bool:
        if m == n:
            return True
        if m == 0:
            cands = [v for v in range(large.size) if large.labels[v] == small.labels[0]]
        else:
            u = phi[small.parents[m]]
            if small.tags[m] == DIRECT:
                cands = [v for v in large.children_of(u) if large.tags[v] == DIRECT]
            else:
                cands = descendants(u)
            cands = [v for v in cands if large.labels[v] == small.labels[m]]
            sib = prev_sibling[m]
            if sib != -1:
                floor = span_end[phi[sib]]
                cands = [v for v in cands if v > floor]
        for v in cands:
            phi[m] = v
            if extend(m + 1):
                return True
        phi[m] = -1
        return False

    return extend(0)
