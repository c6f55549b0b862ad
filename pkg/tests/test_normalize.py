from __future__ import annotations

import pytest
from hypothesis import given, strategies as st

from docfuzz.corpus import Sentence, tokenize
from docfuzz.normalize import (
    ABSTRACT_KINDS,
    KeywordTable,
    NormalizedSentence,
    normalize,
)

TABLE = KeywordTable.from_file("fixtures/keywords.json")


def norm(text: str, params=()) -> NormalizedSentence:
    return normalize(Sentence(raw_text=text, tokens=tokenize(text)), TABLE, frozenset(params))


def test_dtype_list_collapses_to_one_token():
    got = norm("Must be of type `float16`, `float32`, or `float64`.")
    assert got.texts() == ("must", "be", "of", "type", "D_TYPE", ".")
    (dtype,) = [t for t in got.tokens if t.kind == "D_TYPE"]
    assert set(dtype.payload) == {"float16", "float32", "float64"}


def test_quoted_enumerands():
    got = norm("'NWC' and 'NCW' are supported.")
    assert got.texts() == ("ENUM", "are", "supported", ".")
    assert set(got.tokens[0].payload) == {"NWC", "NCW"}


def test_shape_span():
    got = norm("A Tensor of shape [num_classes,dim]")
    assert got.texts() == ("a", "D_STRUCTURE", "of", "shape", "SHAPE")
    assert got.tokens[-1].payload == (("num_classes", "dim"),)


def test_dimension_count_phrase():
    got = norm("A 4-D `Tensor` of type `float`")
    assert got.texts() == ("a", "CONSTANT_NUM", "d", "D_STRUCTURE", "of", "type", "D_TYPE")
    assert got.tokens[1].payload == (4,)
    assert got.tokens[-1].payload == ("float",)


@pytest.mark.parametrize("text", ["A 4-D `Tensor`", "A 4D `Tensor`", "A 4 dimensional `Tensor`"])
def test_dimension_shorthand_variants(text):
    assert norm(text).texts() == ("a", "CONSTANT_NUM", "d", "D_STRUCTURE")


def test_rexpr_symbol_and_word_forms():
    assert norm("Must be >= 1.").tokens[2].payload == ((">=", ("num", 1)),)
    assert norm("Must be at least 0.").tokens[2].payload == ((">=", ("num", 0)),)
    assert norm("Must be at most 4.").tokens[2].payload == (("<=", ("num", 4)),)
    got = norm("Must be greater than `clip_min`.", params={"clip_min"})
    assert got.tokens[2].payload == ((">", ("ref", "clip_min")),)


def test_param_names_and_unknown_backquoted_identifiers():
    got = norm("Must have the same type as `x`.", params={"x"})
    assert got.texts() == ("must", "have", "the", "same", "type", "as", "PARAM", ".")
    # Unknown backquoted identifiers still become PARAM so dangling
    # references surface as documentation bugs downstream.
    got = norm("Must have the same shape as `variable`.")
    assert got.tokens[-2].kind == "PARAM"
    assert got.tokens[-2].payload == ("variable",)


def test_keyword_shadows_enum_and_param():
    got = norm("'float32' values", params={"float32"})
    assert got.tokens[0].kind == "D_TYPE"
    assert any("collides" in w for w in got.warnings)


def test_hyphen_and_space_insensitive_keywords():
    assert norm("float 32 input").texts()[0] == "D_TYPE"
    assert norm("float-32 input").texts()[0] == "D_TYPE"


def test_constant_variants():
    assert norm("Defaults to `0`.").tokens[-2].kind == "CONSTANT_NUM"
    assert norm("about 0.5 of them").tokens[1].kind == "CONSTANT_FLOAT"
    assert norm("set to True always").tokens[2].kind == "CONSTANT_BOOL"


def test_numeric_enum_collapse_keeps_all_values():
    got = norm("can only be 1, 2 or 3")
    nums = [t for t in got.tokens if t.kind == "CONSTANT_NUM"]
    assert len(nums) == 1 and set(nums[0].payload) == {1, 2, 3}


def test_no_adjacent_same_abstract_kind_on_fixture_corpus(mini_prepared):
    for prepared in mini_prepared.all_params():
        for sentence in prepared.sentences:
            kinds = [t.kind for t in sentence.tokens]
            for a, b in zip(kinds, kinds[1:]):
                assert not (a == b and a in ABSTRACT_KINDS)


def test_payload_completeness(mini_prepared):
    # Every dtype keyword in the raw text must survive into some D_TYPE payload.
    raw = "A `Tensor` of type `int32` or `int64`."
    got = norm(raw)
    payloads = {v for t in got.tokens if t.kind == "D_TYPE" for v in t.payload}
    assert payloads == {"int32", "int64"}


@given(
    st.lists(
        st.sampled_from(
            ["`float32`", "`int32`", "tensor", "list", "'A'", "or", ",", "and",
             "must", "be", "of", "type", "4", "0.5", "True", ">=", "7", "[a, b]", "`x`"]
        ),
        max_size=12,
    )
)
def test_collapse_leaves_no_adjacent_duplicates(tokens):
    text = " ".join(tokens)
    got = normalize(Sentence(raw_text=text, tokens=tokenize(text)), TABLE, frozenset({"x"}))
    kinds = [t.kind for t in got.tokens]
    for a, b in zip(kinds, kinds[1:]):
        assert not (a == b and a in ABSTRACT_KINDS)


@given(
    st.lists(
        st.sampled_from(
            ["`float32`", "tensor", "'A'", "or", "must", "type", "4", "d", ">=", "2", "`x`"]
        ),
        max_size=10,
    )
)
def test_normalization_idempotent_on_kinds(tokens):
    text = " ".join(tokens)
    first = normalize(Sentence(raw_text=text, tokens=tokenize(text)), TABLE, frozenset({"x"}))
    rendered = first.render()
    second = normalize(
        Sentence(raw_text=rendered, tokens=tokenize(rendered)), TABLE, frozenset({"x"})
    )
    assert [t.kind for t in second.tokens] == [t.kind for t in first.tokens]


def test_empty_table_rejected():
    with pytest.raises(ValueError):
        KeywordTable(dtype_map={}, structure_map={})
    with pytest.raises(ValueError, match="overlap"):
        KeywordTable(dtype_map={"x": "x"}, structure_map={"x": "x"})
