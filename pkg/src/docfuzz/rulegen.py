"""Rule construction from an annotated sample.

A rule maps a frequent parse-tree pattern to an abstract constraint category.
Candidate (pattern, category) pairs are the frequent patterns paired with
every category whose sample-space conditional probability clears
``min_confidence``; a pattern must contain the abstract token its category
instantiates from.  A dominance pass then prunes any rule whose category is
also predicted by a strictly smaller embedded pattern with strictly greater
support and at-least-equal confidence: the smaller pattern demonstrably
generalizes better, so the larger one adds nothing.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from docfuzz.constraints import (
    CATEGORY_SLOTS,
    AbstractConstraint,
    Category,
    ConcreteConstraint,
    derive_categories,
)
from docfuzz.deptree import DepTree, Subtree, contains_induced, decode_pattern, pattern_subsumes
from docfuzz.miner import mine
from docfuzz.normalize import NormalizedSentence

__all__ = [
    "AnnotatedParam",
    "ExtractionRule",
    "Metrics",
    "QualityReport",
    "ThresholdChoice",
    "UndefinedProbabilityError",
    "cond_prob",
    "construct_rules",
    "rules_from_obj",
    "rules_to_obj",
    "score",
    "select_thresholds",
]


class UndefinedProbabilityError(ValueError):
    """Raised when a pattern occurs in no annotated parameter."""


@dataclass(frozen=True)
class AnnotatedParam:
    """One annotated parameter: its parsed sentences plus ground truth."""

    api: str
    param: str
    sentences: tuple[NormalizedSentence, ...]
    trees: tuple[DepTree, ...]
    truth: ConcreteConstraint

    @property
    def key(self) -> tuple[str, str]:
        return (self.api, self.param)

    @property
    def categories(self) -> frozenset[Category]:
        return derive_categories(self.truth)


@dataclass(frozen=True)
class ExtractionRule:
    pattern: Subtree
    ac: AbstractConstraint
    confidence: float
    support: int


def cond_prob(
    ac: AbstractConstraint, pattern: Subtree, sample: Sequence[AnnotatedParam]
) -> Fraction:
    """Probability that a parameter carries *ac* given *pattern* occurs in it.

    Exact rational arithmetic over the annotated sample: the denominator is
    the number of parameters whose trees contain the pattern, the numerator
    the subset also annotated with the category.

    Raises:
        UndefinedProbabilityError: when the pattern occurs nowhere.
    """
    containing = [
        p for p in sample if any(contains_induced(pattern, t) for t in p.trees)
    ]
    if not containing:
        raise UndefinedProbabilityError(
            f"pattern {pattern.encode()!r} occurs in no annotated parameter"
        )
    hits = sum(1 for p in containing if ac.category in p.categories)
    return Fraction(hits, len(containing))


def construct_rules(
    sample: Sequence[AnnotatedParam],
    min_support: int,
    min_confidence: float,
    max_size: int = 7,
    support_comparator: str = ">=",
) -> set[ExtractionRule]:
    """Mine frequent patterns, pair them with confident categories, and prune.

    Returns the dominance-pruned rule set; may be empty.
    """
    if not sample:
        raise ValueError("annotated sample is empty")
    forest = {f"{p.api}::{p.param}": list(p.trees) for p in sample}
    categories_of = {f"{p.api}::{p.param}": p.categories for p in sample}
    frequent = mine(forest, min_support, max_size, support_comparator)

    candidates: list[tuple[Subtree, Category, int, Fraction]] = []
    for fp in frequent:
        labels = set(fp.pattern.labels)
        for category in Category:
            if not set(CATEGORY_SLOTS[category]) <= labels:
                continue
            hits = sum(1 for doc in fp.occurrences if category in categories_of[doc])
            if hits == 0:
                continue
            confidence = Fraction(hits, fp.support)
            if confidence >= Fraction(min_confidence).limit_denominator(10**9):
                candidates.append((fp.pattern, category, fp.support, confidence))

    kept = _prune_dominated(candidates)
    return {
        ExtractionRule(
            pattern=pattern,
            ac=AbstractConstraint(category),
            confidence=float(confidence),
            support=support,
        )
        for pattern, category, support, confidence in kept
    }


def _prune_dominated(
    candidates: list[tuple[Subtree, Category, int, Fraction]]
) -> list[tuple[Subtree, Category, int, Fraction]]:
    """Drop rules dominated by a smaller same-category rule.

    Dominance requires the smaller pattern to embed in the larger one, have
    strictly greater support, and at-least-equal confidence.  The strictness
    keeps rule counts monotone in both thresholds: any threshold that removes
    a dominating rule has already removed everything it dominated.
    """
    by_category: dict[Category, list[tuple[Subtree, Category, int, Fraction]]] = {}
    for cand in candidates:
        by_category.setdefault(cand[1], []).append(cand)

    kept: list[tuple[Subtree, Category, int, Fraction]] = []
    for group in by_category.values():
        group.sort(key=lambda c: (c[0].size, c[0].encode()))
        for i, (pattern, cat, support, conf) in enumerate(group):
            dominated = any(
                small.size < pattern.size
                and small_support > support
                and small_conf >= conf
                and pattern_subsumes(small, pattern)
                for small, _, small_support, small_conf in group[:i]
            )
            if not dominated:
                kept.append((pattern, cat, support, conf))
    return kept


# --- extraction quality ----------------------------------------------------


@dataclass(frozen=True)
class Metrics:
    n_extracted: int
    n_truth: int
    n_correct: int

    @property
    def precision(self) -> float | None:
        return None if self.n_extracted == 0 else self.n_correct / self.n_extracted

    @property
    def recall(self) -> float | None:
        return None if self.n_truth == 0 else self.n_correct / self.n_truth

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        if p is None or r is None or p + r == 0:
            return 0.0
        return 2 * p * r / (p + r)


@dataclass(frozen=True)
class QualityReport:
    overall: Metrics
    per_category: dict[str, Metrics]
    evaluated_params: int
    excluded_params: int

    def to_obj(self) -> dict:
        def metrics_obj(m: Metrics) -> dict:
            return {
                "extracted": m.n_extracted,
                "truth": m.n_truth,
                "correct": m.n_correct,
                "precision": m.precision,
                "recall": m.recall,
                "f1": m.f1,
            }

        return {
            "overall": metrics_obj(self.overall),
            "per_category": {k: metrics_obj(v) for k, v in sorted(self.per_category.items())},
            "evaluated_params": self.evaluated_params,
            "excluded_params": self.excluded_params,
        }


_OPTION_KEYS = ("dtype", "structure", "ndim", "shape", "range", "enum")


def _option_sets(c: ConcreteConstraint) -> dict[str, object]:
    """Comparable option set per category key; absent categories are omitted."""
    options: dict[str, object] = {}
    if c.dtypes:
        options["dtype"] = frozenset(c.dtypes)
    if c.structures:
        options["structure"] = frozenset(c.structures)
    if c.ndims:
        options["ndim"] = frozenset(c.ndims)
    if c.shape is not None:
        options["shape"] = c.shape if isinstance(c.shape, str) else tuple(c.shape)
    if c.range is not None:
        options["range"] = (c.range.low, c.range.high, c.range.low_inclusive, c.range.high_inclusive)
    if c.enum is not None:
        options["enum"] = frozenset(c.enum)
    return options


def score(
    extracted: Mapping[tuple[str, str], ConcreteConstraint],
    truth: Mapping[tuple[str, str], ConcreteConstraint],
) -> QualityReport:
    """Compare extracted constraints against ground truth.

    A category counts as correct only when its full option set matches the
    truth exactly.  Parameters whose truth carries no constraint in any
    category are excluded from both precision and recall.
    """
    evaluated = {key for key, c in truth.items() if _option_sets(c)}
    excluded = len(truth) - len(evaluated)

    per_key: dict[str, list[int]] = {k: [0, 0, 0] for k in _OPTION_KEYS}
    for key in sorted(evaluated):
        truth_options = _option_sets(truth[key])
        got = extracted.get(key)
        got_options = _option_sets(got) if got is not None else {}
        for cat in _OPTION_KEYS:
            t = truth_options.get(cat)
            g = got_options.get(cat)
            if g is not None:
                per_key[cat][0] += 1
            if t is not None:
                per_key[cat][1] += 1
            if g is not None and t is not None and g == t:
                per_key[cat][2] += 1

    per_category = {k: Metrics(*counts) for k, counts in per_key.items()}
    overall = Metrics(
        n_extracted=sum(m.n_extracted for m in per_category.values()),
        n_truth=sum(m.n_truth for m in per_category.values()),
        n_correct=sum(m.n_correct for m in per_category.values()),
    )
    return QualityReport(
        overall=overall,
        per_category=per_category,
        evaluated_params=len(evaluated),
        excluded_params=excluded,
    )


# --- threshold selection ---------------------------------------------------


@dataclass(frozen=True)
class ThresholdChoice:
    min_support: int
    min_confidence: float
    fold_seed: int
    trials: tuple[dict, ...] = ()


def select_thresholds(
    sample: Sequence[AnnotatedParam],
    support_grid: Iterable[int],
    confidence_grid: Iterable[float],
    max_size: int = 7,
    n_folds: int = 5,
    fold_seed: int = 0,
) -> ThresholdChoice:
    """Pick (min_support, min_confidence) by cross-validated held-out F1.

    Folds come from a seeded shuffle (recorded in the result); ties break
    toward larger support, then larger confidence.
    """
    from docfuzz.extract import extract_param

    sample = list(sample)
    if len(sample) < n_folds:
        raise ValueError(f"need at least {n_folds} annotated parameters")
    order = list(sample)
    random.Random(fold_seed).shuffle(order)
    folds: list[list[AnnotatedParam]] = [order[i::n_folds] for i in range(n_folds)]

    trials = []
    for min_support in support_grid:
        for min_confidence in confidence_grid:
            fold_f1s = []
            for held_out in folds:
                held_keys = {p.key for p in held_out}
                train = [p for p in order if p.key not in held_keys]
                rules = construct_rules(train, min_support, min_confidence, max_size)
                extracted = {
                    p.key: extract_param(p.sentences, p.trees, rules)[0] for p in held_out
                }
                truth = {p.key: p.truth for p in held_out}
                fold_f1s.append(score(extracted, truth).overall.f1)
            trials.append(
                {
                    "min_support": min_support,
                    "min_confidence": min_confidence,
                    "mean_f1": sum(fold_f1s) / len(fold_f1s),
                    "fold_f1": fold_f1s,
                }
            )

    best = max(trials, key=lambda t: (t["mean_f1"], t["min_support"], t["min_confidence"]))
    return ThresholdChoice(
        min_support=best["min_support"],
        min_confidence=best["min_confidence"],
        fold_seed=fold_seed,
        trials=tuple(trials),
    )


# --- rules file ------------------------------------------------------------


def rules_to_obj(rules: set[ExtractionRule]) -> list[dict]:
    entries = [
        {
            "pattern": r.pattern.encode(),
            "ac": {"category": str(r.ac.category), "slots": list(r.ac.slots)},
            "confidence": r.confidence,
            "support": r.support,
        }
        for r in rules
    ]
    entries.sort(key=lambda e: (e["pattern"], e["ac"]["category"]))
    return entries


def rules_from_obj(raw: Iterable[Mapping]) -> set[ExtractionRule]:
    return {
        ExtractionRule(
            pattern=decode_pattern(entry["pattern"]),
            ac=AbstractConstraint(Category(entry["ac"]["category"])),
            confidence=float(entry["confidence"]),
            support=int(entry["support"]),
        )
        for entry in raw
    }
