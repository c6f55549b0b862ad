"""Independent oracles the tests compare the real implementations against.

Each oracle is written directly from the contracts, by a different route than
the code under test: the validator re-derives verdicts with its own helpers,
pattern membership goes through exhaustive subset enumeration instead of the
backtracking matcher, and the miner oracle counts documents naively.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction

from docfuzz.deptree import ANCESTOR, DIRECT, DepTree, Subtree, enumerate_embedded_subtrees


# --- mining -------------------------------------------------------------------


def mine_oracle(forest: dict[str, list[DepTree]], min_support: int, max_size: int):
    """Enumerate every tree's patterns, then count distinct documents."""
    docs: dict[Subtree, set[str]] = defaultdict(set)
    for doc_id, trees in forest.items():
        for tree in trees:
            for pattern in enumerate_embedded_subtrees(tree, max_size):
                docs[pattern].add(doc_id)
    return {
        (pattern.encode(), len(ids))
        for pattern, ids in docs.items()
        if len(ids) >= min_support
    }


def occurrence_sets(sample, max_size: int) -> dict[Subtree, set[int]]:
    """Pattern -> indices of annotated parameters whose trees enumerate it."""
    occurrences: dict[Subtree, set[int]] = defaultdict(set)
    for i, param in enumerate(sample):
        for tree in param.trees:
            for pattern in enumerate_embedded_subtrees(tree, max_size):
                occurrences[pattern].add(i)
    return occurrences


def cond_prob_oracle(category, pattern: Subtree, sample) -> Fraction | None:
    """Direct set counting over enumeration-based membership."""
    containing = [
        i
        for i, param in enumerate(sample)
        if any(
            pattern in enumerate_embedded_subtrees(tree, pattern.size)
            for tree in param.trees
        )
    ]
    if not containing:
        return None
    hits = sum(1 for i in containing if category in sample[i].categories)
    return Fraction(hits, len(containing))


# --- embedding ----------------------------------------------------------------


def matches_oracle(pattern: Subtree, tree: DepTree, strict: bool = False) -> bool:
    """Try every injective node assignment and check the definition directly."""
    n = pattern.size
    candidates = [
        [v for v in range(len(tree)) if tree.labels[v] == pattern.labels[i]]
        for i in range(n)
    ]

    def ancestor_path_len(u: int, v: int) -> int | None:
        steps = 0
        node = v
        while node != -1:
            if node == u:
                return steps
            node = tree.parent[node]
            steps += 1
        return None

    def pattern_ancestor(i: int, j: int) -> bool:
        node = pattern.parents[j]
        while node != -1:
            if node == i:
                return True
            node = pattern.parents[node]
        return False

    def ok(phi: tuple[int, ...]) -> bool:
        if len(set(phi)) != n:
            return False
        for j in range(1, n):
            length = ancestor_path_len(phi[pattern.parents[j]], phi[j])
            if length is None or length < 1:
                return False
            if pattern.tags[j] == DIRECT and length != 1:
                return False
            if strict and pattern.tags[j] == ANCESTOR and length < 2:
                return False
        # Order and kinship must agree in both directions.
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                anc_p = pattern_ancestor(i, j)
                anc_t = tree.is_ancestor(phi[i], phi[j])
                if anc_p != anc_t:
                    return False
                if not anc_p and not pattern_ancestor(j, i):
                    if (i < j) != (tree.preorder[phi[i]] < tree.preorder[phi[j]]):
                        return False
        return True

    def assignments(i: int, phi: list[int]):
        if i == n:
            yield tuple(phi)
            return
        for v in candidates[i]:
            phi.append(v)
            yield from assignments(i + 1, phi)
            phi.pop()

    return any(ok(phi) for phi in assignments(0, []))


# --- validation ----------------------------------------------------------------


def validate_oracle(values: dict, constraints) -> dict[str, dict]:
    """Re-derived verdicts: {param: {"violations": [...], "unresolved": [...]}}."""
    out = {}
    for name, spec in values.items():
        c = constraints.params.get(name)
        violations: list[str] = []
        unresolved: list[str] = []
        if c is None:
            out[name] = {"violations": [], "unresolved": []}
            continue

        if c.dtypes:
            names = set()
            missing = False
            for d in c.dtypes:
                if d.startswith("&"):
                    target = d[1:].rsplit(".", 1)[0]
                    if target in values:
                        names.add(values[target].dtype)
                    else:
                        missing = True
                else:
                    names.add(d)
            if missing:
                unresolved.append("DTYPE")
            elif spec.dtype not in names:
                violations.append("DTYPE")

        if c.structures and spec.structure not in c.structures:
            violations.append("STRUCTURE")
        if c.ndims and len(spec.shape) not in c.ndims:
            violations.append("NDIM")

        if isinstance(c.shape, str):
            target = c.shape[1:].rsplit(".", 1)[0]
            if target not in values:
                unresolved.append("SHAPE")
            elif tuple(values[target].shape) != tuple(spec.shape):
                violations.append("SHAPE")
        elif c.shape is not None:
            verdict = _shape_terms_oracle(c.shape, spec, values, constraints.signature)
            if verdict == "unresolved":
                unresolved.append("SHAPE")
            elif verdict == "violated":
                violations.append("SHAPE")

        if c.range is not None:
            verdict = _range_oracle(c.range, spec, values)
            if verdict == "unresolved":
                unresolved.append("VALUE_RANGE")
            elif verdict == "violated":
                violations.append("VALUE_RANGE")

        if c.enum is not None:
            member = spec.structure == "scalar" and any(
                m == spec.value for m in c.enum if type(m) is type(spec.value)
            )
            if not member:
                violations.append("VALUE_ENUM")
        out[name] = {"violations": violations, "unresolved": unresolved}
    return out


def _shape_terms_oracle(terms, spec, values, signature) -> str:
    if len(spec.shape) != len(terms):
        return "violated"
    for dim, term in zip(spec.shape, terms):
        if isinstance(term, int):
            if dim != term:
                return "violated"
            continue
        if term in values:
            ref = values[term]
            if ref.structure != "scalar" or not isinstance(ref.value, int):
                return "unresolved"
            if dim != ref.value:
                return "violated"
        elif term in signature:
            return "unresolved"
    return "ok"


def _elements_oracle(spec) -> list:
    if spec.structure == "scalar":
        return [spec.value]
    if spec.structure in ("list", "tuple"):
        return list(spec.value or ())
    payload = spec.value or {}
    elems = [payload["fill"]] if payload.get("fill") is not None else []
    if payload.get("zeros"):
        elems.append(0)
    return elems


def _range_oracle(r, spec, values) -> str:
    def resolve(bound):
        if bound is None or isinstance(bound, (int, float)):
            return bound, True
        ref = values.get(bound[1:])
        if ref is None or ref.structure != "scalar" or not isinstance(ref.value, (int, float)):
            return None, False
        return ref.value, True

    low, low_ok = resolve(r.low)
    high, high_ok = resolve(r.high)
    if not low_ok or not high_ok:
        return "unresolved"
    for e in _elements_oracle(spec):
        if not isinstance(e, (int, float)) or isinstance(e, bool):
            return "violated"
        if low is not None and (e < low or (e == low and not r.low_inclusive)):
            return "violated"
        if high is not None and (e > high or (e == high and not r.high_inclusive)):
            return "violated"
    return "ok"
