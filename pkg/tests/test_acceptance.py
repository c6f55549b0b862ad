"""Acceptance suite: one test per exit criterion, one pass/fail line each.

Every tolerance is pinned here.  The guided-vs-baseline comparison runs
against the in-process recorded-outcome stub harness, so this suite needs no
worker build; the same criterion re-runs against the real worker in the
harness package's integration tests.
"""

from __future__ import annotations

import filecmp
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest

import stub_worker
from conftest import StubEvaluator
from docfuzz.constraints import AbstractConstraint, Category, validate
from docfuzz.deptree import DepTree, decode_pattern
from docfuzz.extract import UNRESOLVED_DEPENDENCY, extract, extract_param
from docfuzz.fuzz import GeneratorConfig, campaign, generate, _api_rng
from docfuzz.miner import mine
from docfuzz.rulegen import ExtractionRule, cond_prob, construct_rules, score
from oracles import cond_prob_oracle, mine_oracle, occurrence_sets

BUGGY_APIS = sorted(stub_worker.INJECTED_BUGS)
CAMPAIGN_APIS = BUGGY_APIS + ["mocklib.identity"]


def report(line: str) -> None:
    print(f"\n[acceptance] {line}")


# --- criterion: miner equals the exhaustive oracle on 100 seeded forests ----


def random_tree(rng: random.Random) -> DepTree:
    n = rng.randint(1, 6)
    parent = [-1] + [rng.randrange(i) for i in range(1, n)]
    labels = tuple(rng.choice("abcd") for _ in range(n))
    return DepTree(labels=labels, parent=tuple(parent))


def test_miner_oracle_equivalence_on_100_seeded_forests():
    start = time.monotonic()
    for seed in range(100):
        rng = random.Random(seed)
        forest = {
            f"doc{i}": [random_tree(rng)] for i in range(rng.randint(2, 8))
        }
        got = {(fp.pattern.encode(), fp.support) for fp in mine(forest, 2, 4)}
        assert got == mine_oracle(forest, 2, 4), f"forest seed {seed}"
    elapsed = time.monotonic() - start
    assert elapsed < 60.0
    report(f"PASS miner-oracle-equivalence: 100 forests exact in {elapsed:.1f}s (< 60s)")


# --- criterion: conditional probabilities equal direct set counting ----------


def test_conditional_probability_exact_on_mini_corpus(mini_sample):
    assert len(mini_sample) == 40
    checked = 0
    for pattern in occurrence_sets(mini_sample, max_size=4):
        for category in Category:
            want = cond_prob_oracle(category, pattern, mini_sample)
            got = cond_prob(AbstractConstraint(category), pattern, mini_sample)
            assert isinstance(got, Fraction)
            assert got == want, (pattern.encode(), category)
            checked += 1
    report(
        f"PASS conditional-probability-oracle: {checked} (pattern, category) "
        "values match exact counting with zero tolerance"
    )


# --- criterion: rule recovery and instantiation on the annotated pair --------


def test_rule_recovery_and_instantiation_on_annotated_pair(pair_sample, pair_prepared):
    rules = construct_rules(pair_sample, min_support=2, min_confidence=0.9)
    wanted = decode_pattern("type(>of)(>D_TYPE)")
    matching = [r for r in rules if r.pattern == wanted and r.ac.category is Category.DTYPE]
    assert matching, "typed-pattern rule was not emitted"
    assert matching[0].confidence == 1.0

    # The two companion rules arrive as given: the two-sentence sample cannot
    # make counted-tensor patterns frequent at support 2 on its own.
    given = {
        ExtractionRule(
            decode_pattern("D_STRUCTURE(>a)(>d(>CONSTANT_NUM))"),
            AbstractConstraint(Category.STRUCTURE), 1.0, 2,
        ),
        ExtractionRule(
            decode_pattern("d(>CONSTANT_NUM)"), AbstractConstraint(Category.NDIM), 1.0, 2
        ),
    }
    result = extract(pair_prepared, rules | given)
    c = result.constraints[("tf.nn.atrous_conv2d", "value")]
    assert c.dtypes == frozenset({"float"})
    assert c.structures == frozenset({"tensor"})
    assert c.ndims == frozenset({4})
    report(
        "PASS rule-recovery: typed pattern emitted at confidence 1.0; "
        "instantiation yields dtype={float} structure={tensor} ndim={4}"
    )


# --- criterion: held-out extraction quality ----------------------------------

SPLIT_SEED = 2024


def test_extraction_f1_floor_on_held_out_split(mini_sample):
    order = list(mini_sample)
    random.Random(SPLIT_SEED).shuffle(order)
    train, held = order[:30], order[30:]
    assert len(train) == 30 and len(held) == 10
    rules = construct_rules(train, min_support=2, min_confidence=0.9, max_size=7)
    extracted = {p.key: extract_param(p.sentences, p.trees, rules)[0] for p in held}
    quality = score(extracted, {p.key: p.truth for p in held})
    assert quality.overall.f1 >= 0.85, quality.to_obj()
    report(
        f"PASS extraction-quality: held-out F1 {quality.overall.f1:.3f} >= 0.85 "
        f"(split seed {SPLIT_SEED}, hard floor)"
    )


# --- criterion: generator soundness over 1000 CIs and 1000 VIs ---------------


@pytest.fixture(scope="module")
def mock_constraints(mock_result):
    return mock_result.api_constraints


def test_generator_soundness_1000_cis(mock_constraints):
    cfg = GeneratorConfig(seed=101)
    apis = sorted(mock_constraints)
    per_api = -(-1000 // len(apis))  # ceil
    drawn = conforming = 0
    for api in apis:
        rng = _api_rng(cfg.seed, api, "acceptance-ci")
        for _ in range(per_api):
            gen = generate(mock_constraints[api], cfg, "CI", rng)
            drawn += 1
            verdicts = validate(gen.values, mock_constraints[api])
            conforming += all(v.conforms for v in verdicts.values())
    assert drawn >= 1000
    assert conforming == drawn
    report(f"PASS generator-ci-soundness: {conforming}/{drawn} conforming (100% required)")


def test_generator_soundness_1000_vis(mock_constraints):
    cfg = GeneratorConfig(seed=102)
    apis = sorted(mock_constraints)
    per_api = -(-1000 // len(apis))
    drawn = confined = 0
    for api in apis:
        rng = _api_rng(cfg.seed, api, "acceptance-vi")
        for _ in range(per_api):
            gen = generate(mock_constraints[api], cfg, "VI", rng)
            drawn += 1
            verdicts = validate(gen.values, mock_constraints[api])
            wrong = {p for p, v in verdicts.items() if not v.conforms}
            confined += wrong == {gen.violated_param}
    assert drawn >= 1000
    assert confined == drawn
    report(f"PASS generator-vi-single-fault: {confined}/{drawn} confined (100% required)")


# --- criterion: exact mode split and byte-identical findings -----------------


def test_campaign_split_and_determinism(mock_constraints, tmp_path):
    cfg = GeneratorConfig(max_iter=2000, conform_ratio=0.5, seed=33)

    def run(where: Path):
        return campaign(
            mock_constraints, cfg, StubEvaluator(),
            apis=["mocklib.pool3d"], findings_dir=str(where),
        )

    first = run(tmp_path / "a")
    modes = first.apis["mocklib.pool3d"].modes
    assert modes == {"CI": 1000, "VI": 1000}
    second = run(tmp_path / "b")
    assert first.to_obj() == second.to_obj()

    def assert_same(d: filecmp.dircmp):
        assert not d.left_only and not d.right_only and not d.diff_files
        for sub in d.subdirs.values():
            assert_same(sub)

    assert_same(filecmp.dircmp(tmp_path / "a", tmp_path / "b"))
    report(
        "PASS campaign-split-determinism: 1000 CI / 1000 VI exactly; "
        "two same-seed runs produced byte-identical findings"
    )


# --- criterion: rule count monotone in both thresholds ------------------------

GRID_SUPPORTS = (2, 3, 4, 5)
GRID_CONFIDENCES = (0.5, 0.7, 0.9, 1.0)


def test_rule_count_monotonicity_and_ablation(mini_sample):
    counts = {}
    for s in GRID_SUPPORTS:
        for c in GRID_CONFIDENCES:
            counts[(s, c)] = len(construct_rules(mini_sample, s, c, max_size=7))
    for s, c in counts:
        for s2, c2 in counts:
            if s2 >= s and c2 >= c:
                assert counts[(s2, c2)] <= counts[(s, c)], ((s, c), (s2, c2))
    unfiltered = len(construct_rules(mini_sample, 2, 0.0, max_size=7))
    selected = counts[(2, 0.9)]
    assert unfiltered > selected
    report(
        f"PASS rule-count-monotonicity: non-increasing over the {len(counts)}-point grid; "
        f"confidence 0 yields {unfiltered} rules > {selected} at the selected threshold"
    )


# --- criterion: guided campaigns beat the unguided baseline -------------------


def test_guided_vs_baseline_bug_discovery(mock_constraints):
    seeds = range(5)
    baseline_hits: set[str] = set()
    for seed in seeds:
        cfg = GeneratorConfig(seed=seed)
        guided = campaign(mock_constraints, cfg, StubEvaluator(), apis=CAMPAIGN_APIS)
        unguided = campaign(
            mock_constraints, cfg, StubEvaluator(), apis=CAMPAIGN_APIS, baseline=True
        )
        guided_found = {api for api in BUGGY_APIS if guided.apis[api].bugs}
        assert guided_found == set(BUGGY_APIS), f"seed {seed}: guided missed {set(BUGGY_APIS) - guided_found}"
        for api in BUGGY_APIS:
            signals = {b["signal"] for b in guided.apis[api].bugs}
            assert signals == {stub_worker.INJECTED_BUGS[api]}
        baseline_hits |= {api for api in BUGGY_APIS if unguided.apis[api].bugs}
        assert guided.passing_ratio() > unguided.passing_ratio(), f"seed {seed}"
    assert len(baseline_hits) <= 0.4 * len(BUGGY_APIS)
    report(
        f"PASS guided-vs-baseline: guided triggered all {len(BUGGY_APIS)} injected bugs on "
        f"every seed; baseline reached {len(baseline_hits)}/{len(BUGGY_APIS)} (<= 40%) over 5 seeds; "
        "guided passing ratio strictly higher on every seed"
    )


# --- criterion: dangling dependency reference is reported exactly once --------


def test_unresolved_dependency_doc_bug(mock_result):
    bugs = [b for b in mock_result.doc_bugs if b.kind == UNRESOLVED_DEPENDENCY]
    assert len(bugs) == 1
    bug = bugs[0]
    assert bug.api == "mocklib.moving_average"
    assert bug.names == ("value", "variable")
    report(
        "PASS doc-bug-detection: exactly one unresolved-dependency bug for the "
        "undocumented reference"
    )
