"""Estimator-style wrapper over rule construction and extraction.

Follows the scikit-learn parameter protocol (``get_params``/``set_params``,
``fit`` returning self) so the rule miner composes with grid-search style
tooling without pulling in a dependency: ``fit`` learns extraction rules from
an annotated sample, ``transform`` applies them to a prepared corpus.
"""

from __future__ import annotations

from typing import Sequence

from docfuzz.extract import ExtractionResult, extract, extract_param
from docfuzz.pipeline import PreparedCorpus
from docfuzz.rulegen import AnnotatedParam, construct_rules, score

__all__ = ["ConstraintMiner"]


class ConstraintMiner:
    """Learn tree-pattern extraction rules and apply them to corpora.

    Parameters
    ----------
    min_support : int
        Document-count threshold for frequent patterns.
    min_confidence : float
        Sample-space conditional probability threshold for rule selection.
    max_size : int
        Maximum pattern node count.
    """

    def __init__(self, min_support: int = 10, min_confidence: float = 0.9, max_size: int = 7):
        self.min_support = min_support
        self.min_confidence = min_confidence
        self.max_size = max_size

    def get_params(self, deep: bool = True) -> dict:
        return {
            "min_support": self.min_support,
            "min_confidence": self.min_confidence,
            "max_size": self.max_size,
        }

    def set_params(self, **params) -> ConstraintMiner:
        for key, value in params.items():
            if key not in self.get_params():
                raise ValueError(f"unknown parameter {key!r}")
            setattr(self, key, value)
        return self

    def fit(self, sample: Sequence[AnnotatedParam]) -> ConstraintMiner:
        self.rules_ = construct_rules(
            sample, self.min_support, self.min_confidence, self.max_size
        )
        return self

    def transform(self, prepared: PreparedCorpus) -> ExtractionResult:
        self._check_fitted()
        return extract(prepared, self.rules_)

    def fit_transform(
        self, sample: Sequence[AnnotatedParam], prepared: PreparedCorpus
    ) -> ExtractionResult:
        return self.fit(sample).transform(prepared)

    def score(self, sample: Sequence[AnnotatedParam]) -> float:
        """Overall F1 of extraction on *sample* against its own annotations."""
        self._check_fitted()
        extracted = {
            p.key: extract_param(p.sentences, p.trees, self.rules_)[0] for p in sample
        }
        return score(extracted, {p.key: p.truth for p in sample}).overall.f1

    def _check_fitted(self) -> None:
        if not hasattr(self, "rules_"):
            raise RuntimeError("ConstraintMiner is not fitted; call fit() first")
