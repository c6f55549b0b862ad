from __future__ import annotations

import random
from itertools import combinations

import pytest

from docfuzz.deptree import (
    ANCESTOR,
    DIRECT,
    DepTree,
    MalformedTreeError,
    Subtree,
    decode_pattern,
    enumerate_embedded_subtrees,
    find_embedding,
    load_trees,
    matches,
    pattern_subsumes,
)
from oracles import matches_oracle

OF_TYPE_DTYPE = decode_pattern("type(>of)(>D_TYPE)")


def conllu_block(sent_id: str, rows: list[tuple[str, int]]) -> str:
    lines = [f"# sent_id = {sent_id}"]
    for i, (form, head) in enumerate(rows, 1):
        lines.append("\t".join([str(i), form, form.lower(), "_", "_", "_", str(head), "dep", "_", "_"]))
    return "\n".join(lines) + "\n"


def write_trees(tmp_path, blocks: list[str]) -> str:
    path = tmp_path / "trees.conllu"
    path.write_text("\n".join(blocks), encoding="utf-8")
    return str(path)


FIVE_NODE = [("a", 2), ("D_STRUCTURE", 0), ("of", 4), ("type", 2), ("D_TYPE", 4)]


def test_load_five_node_tree(tmp_path):
    trees = load_trees(write_trees(tmp_path, [conllu_block("s1", FIVE_NODE)]))
    tree = trees["s1"]
    assert len(tree) == 5
    assert tree.labels[tree.root] == "D_STRUCTURE"
    # D_TYPE modifies the root through the "type" nominal.
    assert tree.is_ancestor(tree.root, 4)


def test_load_single_token_tree(tmp_path):
    trees = load_trees(write_trees(tmp_path, [conllu_block("s1", [("hello", 0)])]))
    assert len(trees["s1"]) == 1
    assert trees["s1"].root == 0


def test_cyclic_heads_rejected(tmp_path):
    block = conllu_block("bad", [("a", 2), ("b", 1), ("c", 0)])
    with pytest.raises(MalformedTreeError, match="bad"):
        load_trees(write_trees(tmp_path, [block]))


def test_multiple_roots_rejected(tmp_path):
    block = conllu_block("two-roots", [("a", 0), ("b", 0)])
    with pytest.raises(MalformedTreeError, match="two-roots"):
        load_trees(write_trees(tmp_path, [block]))


def test_missing_sent_id_rejected(tmp_path):
    path = tmp_path / "trees.conllu"
    path.write_text("1\ta\ta\t_\t_\t_\t0\rroot\t_\t_\n".replace("\r", "\t"), encoding="utf-8")
    with pytest.raises(MalformedTreeError, match="sent_id"):
        load_trees(str(path))


def make_tree(rows: list[tuple[str, int]]) -> DepTree:
    return DepTree(
        labels=tuple(r[0] for r in rows), parent=tuple(r[1] - 1 for r in rows)
    )


def test_enumerate_includes_expected_patterns():
    tree = make_tree(FIVE_NODE)
    got = enumerate_embedded_subtrees(tree, max_size=3)
    encodings = {p.encode() for p in got}
    assert "D_STRUCTURE(~D_TYPE)" in encodings  # ancestor through "type"
    assert "type(>D_TYPE)" in encodings
    assert OF_TYPE_DTYPE.encode() in encodings


def test_enumerate_single_node_tree():
    tree = make_tree([("x", 0)])
    assert enumerate_embedded_subtrees(tree, 3) == {Subtree.single("x")}


def random_tree(rng: random.Random, max_nodes: int = 6, labels: str = "abc") -> DepTree:
    n = rng.randint(1, max_nodes)
    parent = [-1] + [rng.randrange(i) for i in range(1, n)]
    return DepTree(
        labels=tuple(rng.choice(labels) for _ in range(n)), parent=tuple(parent)
    )


def subset_oracle(tree: DepTree, max_size: int) -> set[Subtree]:
    """All node subsets with a unique minimal element, with induced tags."""
    from docfuzz.deptree import _induced_pattern

    out: set[Subtree] = set()
    nodes = range(len(tree))
    for k in range(1, max_size + 1):
        for combo in combinations(nodes, k):
            roots = [
                v for v in combo
                if not any(u != v and tree.is_ancestor(u, v) for u in combo)
            ]
            if len(roots) != 1:
                continue
            rest = tuple(v for v in combo if v != roots[0])
            out.add(_induced_pattern(tree, roots[0], rest))
    return out


def test_enumerate_matches_subset_oracle():
    for seed in range(60):
        rng = random.Random(seed)
        tree = random_tree(rng)
        assert enumerate_embedded_subtrees(tree, 4) == subset_oracle(tree, 4)


def test_every_enumerated_pattern_matches():
    for seed in range(40):
        tree = random_tree(random.Random(seed))
        for pattern in enumerate_embedded_subtrees(tree, 4):
            assert matches(pattern, tree)


def sub_patterns(pattern: Subtree) -> set[Subtree]:
    """Connected sub-patterns with contracted paths tagged ANCESTOR."""
    out: set[Subtree] = set()
    n = pattern.size
    for k in range(1, n + 1):
        for combo in combinations(range(n), k):
            keep = set(combo)
            roots = []
            parents: dict[int, tuple[int, str]] = {}
            for v in combo:
                u = pattern.parents[v]
                steps = 0 if u == -1 else 1
                tag = pattern.tags[v]
                while u != -1 and u not in keep:
                    tag = ANCESTOR
                    u = pattern.parents[u]
                    steps += 1
                if u == -1:
                    roots.append(v)
                else:
                    parents[v] = (u, tag if steps == 1 else ANCESTOR)
            if len(roots) != 1:
                continue
            index = {v: i for i, v in enumerate(sorted(keep))}
            labels = tuple(pattern.labels[v] for v in sorted(keep))
            par = [-1] * k
            tags = [""] * k
            for v, (u, tag) in parents.items():
                par[index[v]] = index[u]
                tags[index[v]] = tag
            out.add(Subtree(labels=labels, parents=tuple(par), tags=tuple(tags)))
    return out


def test_enumeration_closed_under_sub_patterns():
    for seed in range(25):
        tree = random_tree(random.Random(seed), max_nodes=5)
        enumerated = enumerate_embedded_subtrees(tree, 5)
        for pattern in enumerated:
            assert sub_patterns(pattern) <= enumerated


def test_matches_on_value_tree(mock_prepared):
    prepared = mock_prepared.param("mocklib.pool3d", "data")
    assert matches(OF_TYPE_DTYPE, prepared.trees[0])


def test_pattern_larger_than_tree_never_matches():
    tree = make_tree([("a", 0), ("b", 1)])
    big = Subtree(labels=("a", "b", "c"), parents=(-1, 0, 0), tags=("", DIRECT, DIRECT))
    assert not matches(big, tree)


def random_pattern(rng: random.Random, labels: str = "abc") -> Subtree:
    n = rng.randint(1, 4)
    parents = [-1]
    rightmost = [0]
    for i in range(1, n):
        attach = rng.choice(rightmost)
        parents.append(attach)
        rightmost = rightmost[: rightmost.index(attach) + 1] + [i]
    tags = [""] + [rng.choice((DIRECT, ANCESTOR)) for _ in range(1, n)]
    return Subtree(
        labels=tuple(rng.choice(labels) for _ in range(n)),
        parents=tuple(parents),
        tags=tuple(tags),
    )


def test_matches_agrees_with_brute_force_oracle():
    hits = 0
    for seed in range(300):
        rng = random.Random(seed)
        tree = random_tree(rng, max_nodes=6)
        pattern = random_pattern(rng)
        want = matches_oracle(pattern, tree)
        hits += want
        assert matches(pattern, tree) == want
        assert (find_embedding(pattern, tree, strict=True) is not None) == matches_oracle(
            pattern, tree, strict=True
        )
    assert hits > 20  # the comparison actually exercised positive cases


def test_leftmost_embedding_is_minimal():
    tree = make_tree([("r", 0), ("x", 1), ("x", 1)])
    pattern = decode_pattern("r(>x)")
    assert find_embedding(pattern, tree) == (0, 1)


def test_encode_decode_round_trip():
    for seed in range(200):
        pattern = random_pattern(random.Random(seed), labels="ab c%()")
        assert decode_pattern(pattern.encode()) == pattern


def test_pattern_subsumes_is_semantically_sound():
    rng = random.Random(11)
    checked = 0
    for _ in range(400):
        small, large = random_pattern(rng), random_pattern(rng)
        if not pattern_subsumes(small, large):
            continue
        checked += 1
        for seed in range(12):
            tree = random_tree(random.Random(seed), max_nodes=6)
            if matches(large, tree):
                assert matches(small, tree)
    assert checked > 10


def test_pattern_validation():
    with pytest.raises(ValueError):
        Subtree(labels=("a", "b"), parents=(-1, 1), tags=("", DIRECT))
    with pytest.raises(ValueError):
        Subtree(labels=("a", "b"), parents=(-1, 0), tags=("", "sideways"))
