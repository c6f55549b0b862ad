"""Constraint mining from API documentation, plus constraint-guided input generation.

The pipeline has three phases: rule construction (mine frequent dependency-parse
subtrees from an annotated sample and pair them with abstract constraints),
constraint extraction (apply the rules to full corpora and instantiate concrete
per-parameter constraints), and testing (generate conforming/violating/boundary
inputs and classify the outcomes of running them against a target).
"""

__version__ = "0.1.0"

from docfuzz.constraints import AbstractConstraint, Category, ConcreteConstraint
from docfuzz.corpus import ApiDoc, ParamDoc, ParamSig, Sentence, load_corpus
from docfuzz.deptree import DepTree, Subtree
from docfuzz.miner import FrequentPattern, mine
from docfuzz.rulegen import ExtractionRule, cond_prob, construct_rules

__all__ = [
    "AbstractConstraint",
    "ApiDoc",
    "Category",
    "ConcreteConstraint",
    "DepTree",
    "ExtractionRule",
    "FrequentPattern",
    "ParamDoc",
    "ParamSig",
    "Sentence",
    "Subtree",
    "cond_prob",
    "construct_rules",
    "load_corpus",
    "mine",
]
