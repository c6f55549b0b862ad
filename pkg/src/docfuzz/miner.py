"""Frequent embedded-subtree mining over a forest of dependency trees.

Support is counted per document (a document is one parameter's set of
sentence trees): a pattern occurring five times in one document still counts
once.  Growth is apriori-style: a candidate of size k+1 is generated only by
extending a frequent pattern of size k with one new rightmost leaf, so every
pattern is derived exactly once from its preorder prefix.
"""

from __future__ import annotations

from dataclasses import dataclass

from docfuzz.deptree import ANCESTOR, DIRECT, DepTree, Subtree, contains_induced

__all__ = ["FrequentPattern", "dump_patterns", "mine"]


@dataclass(frozen=True)
class FrequentPattern:
    pattern: Subtree
    support: int
    occurrences: frozenset[str]


def mine(
    forest: dict[str, list[DepTree]],
    min_support: int,
    max_size: int,
    support_comparator: str = ">=",
) -> set[FrequentPattern]:
    """All patterns of size <= *max_size* embedded in enough documents.

    Args:
        forest: document id -> that document's parse trees.
        min_support: document-count threshold.
        max_size: maximum pattern node count.
        support_comparator: ">=" keeps patterns with support >= min_support
            (the default reading); ">" keeps strictly greater.

    Returns:
        The exact frequent set; empty when the forest is empty.
    """
    if min_support < 1:
        raise ValueError("min_support must be >= 1")
    if max_size < 1:
        raise ValueError("max_size must be >= 1")
    if support_comparator not in (">=", ">"):
        raise ValueError(f"unknown support comparator {support_comparator!r}")

    def frequent(count: int) -> bool:
        return count >= min_support if support_comparator == ">=" else count > min_support

    label_docs: dict[str, set[str]] = {}
    for doc_id, trees in forest.items():
        for label in {lab for tree in trees for lab in tree.labels}:
            label_docs.setdefault(label, set()).add(doc_id)
    freq_labels = sorted(lab for lab, docs in label_docs.items() if frequent(len(docs)))

    result: set[FrequentPattern] = set()
    level: list[tuple[Subtree, frozenset[str]]] = []
    for label in freq_labels:
        docs = frozenset(label_docs[label])
        level.append((Subtree.single(label), docs))
        result.add(FrequentPattern(Subtree.single(label), len(docs), docs))

    size = 1
    while level and size < max_size:
        next_level: list[tuple[Subtree, frozenset[str]]] = []
        for pattern, docs in level:
            for attach in pattern.rightmost_path():
                for label in freq_labels:
                    for tag in (DIRECT, ANCESTOR):
                        candidate = pattern.extended(attach, label, tag)
                        support = frozenset(
                            doc
                            for doc in docs
                            if any(contains_induced(candidate, t) for t in forest[doc])
                        )
                        if frequent(len(support)):
                            next_level.append((candidate, support))
                            result.add(FrequentPattern(candidate, len(support), support))
        level = next_level
        size += 1
    return result


def dump_patterns(patterns: set[FrequentPattern], path: str) -> None:
    """Write one ``encoding<TAB>support`` line per pattern, sorted for diffing."""
    lines = sorted(f"{p.pattern.encode()}\t{p.support}" for p in patterns)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + ("\n" if lines else ""))
