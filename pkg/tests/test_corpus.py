from __future__ import annotations

import json
import re

import pytest
from hypothesis import given, strategies as st

from docfuzz.artifacts import canonical_json
from docfuzz.corpus import (
    CorpusError,
    corpus_to_obj,
    load_corpus,
    segment_sentences,
    tokenize,
)

ALNUM = re.compile(r"[^0-9a-zA-Z]")


def alnum(text: str) -> str:
    return ALNUM.sub("", text)


def write_corpus(tmp_path, records):
    path = tmp_path / "corpus.json"
    path.write_text(json.dumps(records), encoding="utf-8")
    return str(path)


MINI = [
    {"api": "lib.a", "params": [{"name": "x"}], "descriptions": {"x": "A `Tensor`."}},
    {"api": "lib.b", "params": [{"name": "y", "optional": True}], "descriptions": {}},
    {"api": "lib.c", "params": [], "descriptions": {}},
]


def test_load_preserves_count(tmp_path):
    docs = load_corpus(write_corpus(tmp_path, MINI))
    assert [d.api_name for d in docs] == ["lib.a", "lib.b", "lib.c"]
    assert docs[1].signature_params[0].optional


def test_load_atrous_example():
    docs = load_corpus("fixtures/pair/corpus.json")
    by_name = {d.api_name: d for d in docs}
    value_doc = by_name["tf.nn.atrous_conv2d"].param_docs["value"]
    assert value_doc.sentences[0].raw_text == "A 4-D `Tensor` of type `float`."
    assert value_doc.sentences[0].tree_ref == "tf.nn.atrous_conv2d::value::0"


def test_duplicate_api_rejected(tmp_path):
    records = [MINI[0], MINI[0]]
    with pytest.raises(CorpusError, match="duplicate api"):
        load_corpus(write_corpus(tmp_path, records))


def test_duplicate_param_rejected(tmp_path):
    records = [{"api": "lib.a", "params": [{"name": "x"}, {"name": "x"}], "descriptions": {}}]
    with pytest.raises(CorpusError, match="duplicate parameter"):
        load_corpus(write_corpus(tmp_path, records))


def test_schema_errors_are_located(tmp_path):
    with pytest.raises(CorpusError, match="record 1.*'api'"):
        load_corpus(write_corpus(tmp_path, [MINI[0], {"params": []}]))
    path = tmp_path / "broken.json"
    path.write_text("[{", encoding="utf-8")
    with pytest.raises(CorpusError, match="line"):
        load_corpus(str(path))


def test_segment_two_terminal_periods():
    got = segment_sentences("Must be 5-D. The size is unspecified.")
    assert [s.raw_text for s in got] == ["Must be 5-D.", "The size is unspecified."]


def test_segment_protects_brackets():
    # The period inside the bracketed span must not split; hand-derived from
    # the bracket-protection rule: only the two top-level periods terminate.
    got = segment_sentences("of shape [num_classes, dim]. Second.")
    assert [s.raw_text for s in got] == ["of shape [num_classes, dim].", "Second."]
    assert "[num_classes, dim]" in got[0].tokens


def test_segment_empty():
    assert segment_sentences("") == []


@given(st.text(max_size=200))
def test_segment_preserves_characters(text):
    parts = segment_sentences(text)
    joined = "".join(s.raw_text for s in parts)
    assert re.sub(r"\s", "", joined) == re.sub(r"\s", "", text)


@given(st.text(alphabet=st.characters(blacklist_categories=("Cs",)), max_size=120))
def test_tokens_preserve_alnum_content(text):
    for sentence in segment_sentences(text):
        assert alnum(" ".join(sentence.tokens)) == alnum(sentence.raw_text)


def test_dimension_shorthand_tokenization():
    assert tokenize("A 4-D `Tensor`.") == ("A", "4", "D", "`Tensor`", ".")
    assert tokenize("A 4D grid") == ("A", "4", "D", "grid")


def test_load_serialize_load_round_trip(tmp_path):
    docs = load_corpus("fixtures/mini/corpus.json")
    path = tmp_path / "again.json"
    path.write_text(canonical_json(corpus_to_obj(docs)), encoding="utf-8")
    again = load_corpus(str(path))
    assert [d.api_name for d in again] == [d.api_name for d in docs]
    for a, b in zip(docs, again):
        assert a.signature_params == b.signature_params
        assert {k: [s.raw_text for s in v.sentences] for k, v in a.param_docs.items()} == {
            k: [s.raw_text for s in v.sentences] for k, v in b.param_docs.items()
        }
