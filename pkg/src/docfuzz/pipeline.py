"""Wiring between pipeline stages: corpus + keyword table + tree bundle.

A :class:`PreparedCorpus` holds, for every documented parameter, the
normalized sentences aligned with their externally parsed dependency trees.
Stages downstream of normalization (mining, rule construction, extraction)
consume prepared corpora rather than raw text.
"""

from __future__ import annotations

from dataclasses import dataclass

from docfuzz.constraints import ConcreteConstraint, annotations_from_obj
from docfuzz.corpus import ApiDoc, load_corpus
from docfuzz.deptree import DepTree, load_trees
from docfuzz.normalize import KeywordTable, NormalizedSentence, normalize

__all__ = ["PreparedCorpus", "PreparedParam", "load_annotated_sample", "prepare_corpus"]


@dataclass(frozen=True)
class PreparedParam:
    api: str
    param: str
    sentences: tuple[NormalizedSentence, ...]
    trees: tuple[DepTree, ...]


class PreparedCorpus:
    def __init__(self, docs: list[ApiDoc], params: dict[tuple[str, str], PreparedParam]):
        self._docs = {doc.api_name: doc for doc in docs}
        self._params = params

    def apis(self) -> list[str]:
        return sorted(self._docs)

    def doc(self, api: str) -> ApiDoc:
        return self._docs[api]

    def param(self, api: str, param: str) -> PreparedParam | None:
        return self._params.get((api, param))

    def all_params(self) -> list[PreparedParam]:
        return [self._params[k] for k in sorted(self._params)]


def prepare_corpus(
    corpus_path: str,
    keywords_path: str,
    trees_path: str,
    require_trees: bool = True,
) -> PreparedCorpus:
    """Load, normalize, and join a corpus with its parse-tree bundle.

    Raises:
        ValueError: when a sentence lacks its tree or the tree's tokens
            disagree with the normalized sentence (stale parse bundle).
    """
    docs = load_corpus(corpus_path)
    table = KeywordTable.from_file(keywords_path)
    trees = load_trees(trees_path)

    params: dict[tuple[str, str], PreparedParam] = {}
    for doc in docs:
        names = frozenset(doc.param_names)
        for param, pdoc in doc.param_docs.items():
            norm_sentences = []
            param_trees = []
            for sentence in pdoc.sentences:
                norm = normalize(sentence, table, names)
                tree = trees.get(sentence.tree_ref or "")
                if tree is None:
                    if require_trees:
                        raise ValueError(
                            f"no parse tree for sentence {sentence.tree_ref!r}; "
                            "regenerate the tree bundle"
                        )
                    continue
                if tuple(tree.forms) != norm.texts():
                    raise ValueError(
                        f"tree {sentence.tree_ref!r} tokens {list(tree.forms)} do not match "
                        f"normalized sentence {list(norm.texts())}"
                    )
                norm_sentences.append(norm)
                param_trees.append(tree)
            params[(doc.api_name, param)] = PreparedParam(
                api=doc.api_name,
                param=param,
                sentences=tuple(norm_sentences),
                trees=tuple(param_trees),
            )
    return PreparedCorpus(docs, params)


def load_annotated_sample(prepared: PreparedCorpus, annotations_path: str):
    """Join a prepared corpus with a ground-truth annotation file."""
    from docfuzz.artifacts import load_json
    from docfuzz.rulegen import AnnotatedParam

    truth = annotations_from_obj(load_json(annotations_path))
    sample = []
    for (api, param), constraint in sorted(truth.items()):
        prepared_param = prepared.param(api, param)
        if prepared_param is None:
            raise ValueError(f"annotation for unknown parameter {api}.{param}")
        sample.append(
            AnnotatedParam(
                api=api,
                param=param,
                sentences=prepared_param.sentences,
                trees=prepared_param.trees,
                truth=constraint,
            )
        )
    return sample


def truth_map(sample) -> dict[tuple[str, str], ConcreteConstraint]:
    return {p.key: p.truth for p in sample}
