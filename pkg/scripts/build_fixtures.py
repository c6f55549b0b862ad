#!/usr/bin/env python3
"""Regenerate the bundled fixture corpora and their parse-tree bundles.

The pipeline consumes dependency trees produced by an external parser; for
the bundled fixtures this script plays that parser's role with a fixed table
of head/deprel templates keyed on the normalized token sequence.  Outputs are
committed, so rerunning this script must be byte-stable.

Usage: python3 scripts/build_fixtures.py
"""

from __future__ import annotations

import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "src"))

from docfuzz.artifacts import canonical_json
from docfuzz.corpus import load_corpus, sentence_id
from docfuzz.normalize import KeywordTable, normalize

# --- keyword table -----------------------------------------------------------

KEYWORDS = {
    "dtypes": [
        {"surface": s, "canonical": c}
        for s, c in [
            ("float16", "float16"),
            ("float32", "float32"),
            ("float64", "float64"),
            ("float", "float"),
            ("floats", "float"),
            ("double", "float64"),
            ("int8", "int8"),
            ("int32", "int32"),
            ("int64", "int64"),
            ("uint8", "uint8"),
            ("int", "int"),
            ("ints", "int"),
            ("integer", "int"),
            ("integers", "int"),
            ("bool", "bool"),
            ("boolean", "bool"),
            ("booleans", "bool"),
            ("string", "string"),
            ("strings", "string"),
            ("str", "string"),
            ("complex64", "complex64"),
        ]
    ],
    "structures": [
        {"surface": s, "canonical": c}
        for s, c in [
            ("tensor", "tensor"),
            ("tensors", "tensor"),
            ("ndarray", "ndarray"),
            ("array", "array"),
            ("arrays", "array"),
            ("list", "list"),
            ("lists", "list"),
            ("tuple", "tuple"),
            ("tuples", "tuple"),
            ("sequence", "sequence"),
            ("scalar", "scalar"),
            ("scalars", "scalar"),
        ]
    ],
}

# --- tree templates ----------------------------------------------------------
# Each template: (token pattern, 1-based heads, deprels).  "*" matches any
# single token.  Patterns are matched against the normalized token texts.

TEMPLATES: list[tuple[tuple[str, ...], tuple[int, ...], tuple[str, ...]]] = [
    (
        ("a", "D_STRUCTURE", "of", "type", "D_TYPE", "."),
        (2, 0, 4, 2, 4, 2),
        ("det", "root", "case", "nmod", "dep", "punct"),
    ),
    (
        ("a", "D_STRUCTURE", "of", "shape", "SHAPE", "."),
        (2, 0, 4, 2, 4, 2),
        ("det", "root", "case", "nmod", "dep", "punct"),
    ),
    (
        ("a", "CONSTANT_NUM", "d", "D_STRUCTURE", "of", "type", "D_TYPE", "."),
        (4, 3, 4, 0, 6, 4, 6, 4),
        ("det", "nummod", "amod", "root", "case", "nmod", "dep", "punct"),
    ),
    (
        ("a", "CONSTANT_NUM", "d", "D_STRUCTURE", "."),
        (4, 3, 4, 0, 4),
        ("det", "nummod", "amod", "root", "punct"),
    ),
    (
        ("must", "be", "of", "type", "D_TYPE", "."),
        (4, 4, 4, 0, 4, 4),
        ("aux", "cop", "case", "root", "dep", "punct"),
    ),
    (
        ("must", "be", "one", "of", "the", "following", "types", ":", "D_TYPE", "."),
        (3, 3, 0, 7, 7, 7, 3, 7, 7, 3),
        ("aux", "cop", "root", "case", "det", "amod", "nmod", "punct", "appos", "punct"),
    ),
    (
        ("ENUM", "are", "supported", "."),
        (3, 3, 0, 3),
        ("nsubj", "aux", "root", "punct"),
    ),
    (
        ("must", "be", "either", "ENUM", "."),
        (4, 4, 4, 0, 4),
        ("aux", "cop", "cc", "root", "punct"),
    ),
    (
        ("must", "have", "the", "same", "type", "as", "PARAM", "."),
        (2, 0, 5, 5, 2, 7, 5, 2),
        ("aux", "root", "det", "amod", "obj", "case", "nmod", "punct"),
    ),
    (
        ("must", "have", "the", "same", "shape", "as", "PARAM", "."),
        (2, 0, 5, 5, 2, 7, 5, 2),
        ("aux", "root", "det", "amod", "obj", "case", "nmod", "punct"),
    ),
    (
        ("the", "number", "of", "*", "."),
        (2, 0, 4, 2, 2),
        ("det", "root", "case", "nmod", "punct"),
    ),
    (
        ("must", "be", "REXPR", "."),
        (3, 3, 0, 3),
        ("aux", "cop", "root", "punct"),
    ),
    (
        ("a", "D_STRUCTURE", "."),
        (2, 0, 2),
        ("det", "root", "punct"),
    ),
    (
        ("a", "D_STRUCTURE", "of", "D_TYPE", "."),
        (2, 0, 4, 2, 2),
        ("det", "root", "case", "nmod", "punct"),
    ),
    (
        ("a", "D_TYPE", "D_STRUCTURE", "."),
        (3, 3, 0, 3),
        ("det", "amod", "root", "punct"),
    ),
    (
        ("the", "D_STRUCTURE", "is", "quantized", "to", "D_TYPE", "internally", "."),
        (2, 4, 4, 0, 6, 4, 4, 4),
        ("det", "nsubjpass", "aux", "root", "case", "obl", "advmod", "punct"),
    ),
    (
        ("defaults", "to", "CONSTANT_NUM", "."),
        (0, 3, 1, 1),
        ("root", "case", "obl", "punct"),
    ),
]


def match_template(texts: tuple[str, ...]):
    for pattern, heads, deprels in TEMPLATES:
        if len(pattern) == len(texts) and all(
            p == "*" or p == t for p, t in zip(pattern, texts)
        ):
            return heads, deprels
    raise SystemExit(f"no tree template for normalized sentence: {texts}")


# --- corpora ------------------------------------------------------------------

PAIR_CORPUS = [
    {
        "api": "tf.nn.conv2d",
        "params": [{"name": "filters", "optional": False, "default": None}],
        "descriptions": {
            "filters": "Must be of type `float16`, `float32`, or `float64`."
        },
    },
    {
        "api": "tf.nn.atrous_conv2d",
        "params": [{"name": "value", "optional": False, "default": None}],
        "descriptions": {"value": "A 4-D `Tensor` of type `float`."},
    },
]

PAIR_ANNOTATIONS = [
    {"api": "tf.nn.conv2d", "param": "filters", "dtype": ["float16", "float32", "float64"]},
    {
        "api": "tf.nn.atrous_conv2d",
        "param": "value",
        "dtype": ["float"],
        "structure": ["tensor"],
        "ndim": [4],
    },
]

MINI_CORPUS = [
    {
        "api": "minilib.conv2d",
        "params": [
            {"name": "input", "optional": False, "default": None},
            {"name": "filters", "optional": False, "default": None},
            {"name": "strides", "optional": False, "default": None},
            {"name": "padding", "optional": False, "default": None},
        ],
        "descriptions": {
            "input": "A 4-D `Tensor` of type `float32`.",
            "filters": "Must be of type `float16`, `float32`, or `float64`.",
            "strides": "A list of `int32`.",
            "padding": "Must be either 'SAME' or 'VALID'.",
        },
    },
    {
        "api": "minilib.pool3d",
        "params": [
            {"name": "value", "optional": False, "default": None},
            {"name": "ksize", "optional": False, "default": None},
            {"name": "padding", "optional": False, "default": None},
        ],
        "descriptions": {
            "value": "A 5-D `Tensor` of type `float32`.",
            "ksize": "A list of `int32`.",
            "padding": "'VALID' and 'SAME' are supported.",
        },
    },
    {
        "api": "minilib.one_hot",
        "params": [
            {"name": "indices", "optional": False, "default": None},
            {"name": "depth", "optional": False, "default": None},
            {"name": "on_value", "optional": True, "default": None},
            {"name": "off_value", "optional": True, "default": None},
        ],
        "descriptions": {
            "indices": "A `Tensor` of type `int32` or `int64`.",
            "depth": "The number of classes.",
            "on_value": "Must have the same type as `off_value`.",
            "off_value": "A `float32` scalar.",
        },
    },
    {
        "api": "minilib.softmax_loss",
        "params": [
            {"name": "weights", "optional": False, "default": None},
            {"name": "biases", "optional": False, "default": None},
            {"name": "labels", "optional": False, "default": None},
            {"name": "num_classes", "optional": False, "default": None},
            {"name": "dim", "optional": False, "default": None},
        ],
        "descriptions": {
            "weights": "A `Tensor` of shape [num_classes, dim].",
            "biases": "A `Tensor` of shape [num_classes].",
            "labels": "A `Tensor` of type `int64`.",
            "num_classes": "The number of classes.",
            "dim": "The number of features.",
        },
    },
    {
        "api": "minilib.clip",
        "params": [
            {"name": "value", "optional": False, "default": None},
            {"name": "clip_min", "optional": False, "default": None},
            {"name": "clip_max", "optional": False, "default": None},
            {"name": "mode", "optional": True, "default": "CLIP"},
        ],
        "descriptions": {
            "value": "A `Tensor` of type `float32`.",
            "clip_min": "A `float32` scalar.",
            "clip_max": "Must be greater than `clip_min`.",
            "mode": "Must be either 'CLIP' or 'WRAP'.",
        },
    },
    {
        "api": "minilib.resize",
        "params": [
            {"name": "images", "optional": False, "default": None},
            {"name": "size", "optional": False, "default": None},
            {"name": "offsets", "optional": False, "default": None},
            {"name": "scale", "optional": True, "default": "1.0"},
            {"name": "align", "optional": True, "default": "False"},
        ],
        "descriptions": {
            "images": "A 4-D `Tensor` of type `uint8`.",
            "size": "A list of `int32`.",
            "offsets": "Must have the same shape as `size`.",
            "scale": "A `float32` scalar. Must be at least 0.",
            "align": "A `bool` scalar.",
        },
    },
    {
        "api": "minilib.segment_sum",
        "params": [
            {"name": "data", "optional": False, "default": None},
            {"name": "segment_ids", "optional": False, "default": None},
            {"name": "num_segments", "optional": False, "default": None},
        ],
        "descriptions": {
            "data": "A `Tensor` of type `float32` or `float64`.",
            "segment_ids": "A 1-D `Tensor` of type `int32`.",
            "num_segments": "The number of segments.",
        },
    },
    {
        "api": "minilib.norm",
        "params": [
            {"name": "tensor_in", "optional": False, "default": None},
            {"name": "epsilon", "optional": True, "default": "0.001"},
            {"name": "scale_factor", "optional": True, "default": None},
            {"name": "data_format", "optional": True, "default": "NWC"},
        ],
        "descriptions": {
            "tensor_in": "A `Tensor` of type `float32`.",
            "epsilon": "A `float32` scalar. Must be greater than 0.",
            "scale_factor": "Must have the same type as `tensor_in`.",
            "data_format": "'NWC' and 'NCW' are supported.",
        },
    },
    {
        "api": "minilib.pad",
        "params": [
            {"name": "input_t", "optional": False, "default": None},
            {"name": "paddings", "optional": False, "default": None},
            {"name": "pad_values", "optional": False, "default": None},
            {"name": "pad_mode", "optional": True, "default": "CONSTANT"},
            {"name": "constant_value", "optional": True, "default": "0"},
        ],
        "descriptions": {
            "input_t": "A `Tensor`.",
            "paddings": "A `Tensor` of shape [n, 2].",
            "pad_values": "Must have the same shape as `paddings`.",
            "pad_mode": "Must be either 'CONSTANT' or 'REFLECT'.",
            "constant_value": "Defaults to `0`.",
        },
    },
    {
        "api": "minilib.quantize_info",
        "params": [
            {"name": "summary_in", "optional": False, "default": None},
            {"name": "axis_q", "optional": True, "default": "0"},
            {"name": "bits", "optional": False, "default": None},
        ],
        "descriptions": {
            "summary_in": "The `Tensor` is quantized to `uint8` internally.",
            "axis_q": "Must be at most 4.",
            "bits": "The number of bits.",
        },
    },
]

MINI_ANNOTATIONS = [
    {"api": "minilib.conv2d", "param": "input",
     "dtype": ["float32"], "structure": ["tensor"], "ndim": [4]},
    {"api": "minilib.conv2d", "param": "filters",
     "dtype": ["float16", "float32", "float64"]},
    {"api": "minilib.conv2d", "param": "strides", "dtype": ["int32"], "structure": ["list"]},
    {"api": "minilib.conv2d", "param": "padding", "enum": ["SAME", "VALID"]},
    {"api": "minilib.pool3d", "param": "value",
     "dtype": ["float32"], "structure": ["tensor"], "ndim": [5]},
    {"api": "minilib.pool3d", "param": "ksize", "dtype": ["int32"], "structure": ["list"]},
    {"api": "minilib.pool3d", "param": "padding", "enum": ["VALID", "SAME"]},
    {"api": "minilib.one_hot", "param": "indices",
     "dtype": ["int32", "int64"], "structure": ["tensor"]},
    {"api": "minilib.one_hot", "param": "depth",
     "dtype": ["int"], "ndim": [0], "range": {"low": 0, "high": None}},
    {"api": "minilib.one_hot", "param": "on_value", "dtype": ["&off_value.dtype"]},
    {"api": "minilib.one_hot", "param": "off_value",
     "dtype": ["float32"], "structure": ["scalar"]},
    {"api": "minilib.softmax_loss", "param": "weights",
     "structure": ["tensor"], "shape": ["num_classes", "dim"]},
    {"api": "minilib.softmax_loss", "param": "biases",
     "structure": ["tensor"], "shape": ["num_classes"]},
    {"api": "minilib.softmax_loss", "param": "labels",
     "dtype": ["int64"], "structure": ["tensor"]},
    {"api": "minilib.softmax_loss", "param": "num_classes",
     "dtype": ["int"], "ndim": [0], "range": {"low": 0, "high": None}},
    {"api": "minilib.softmax_loss", "param": "dim",
     "dtype": ["int"], "ndim": [0], "range": {"low": 0, "high": None}},
    {"api": "minilib.clip", "param": "value", "dtype": ["float32"], "structure": ["tensor"]},
    {"api": "minilib.clip", "param": "clip_min", "dtype": ["float32"], "structure": ["scalar"]},
    {"api": "minilib.clip", "param": "clip_max",
     "range": {"low": "&clip_min", "high": None, "low_inclusive": False}},
    {"api": "minilib.clip", "param": "mode", "enum": ["CLIP", "WRAP"]},
    {"api": "minilib.resize", "param": "images",
     "dtype": ["uint8"], "structure": ["tensor"], "ndim": [4]},
    {"api": "minilib.resize", "param": "size", "dtype": ["int32"], "structure": ["list"]},
    {"api": "minilib.resize", "param": "offsets", "shape": "&size.shape"},
    {"api": "minilib.resize", "param": "scale",
     "dtype": ["float32"], "structure": ["scalar"], "range": {"low": 0, "high": None}},
    {"api": "minilib.resize", "param": "align", "dtype": ["bool"], "structure": ["scalar"]},
    {"api": "minilib.segment_sum", "param": "data",
     "dtype": ["float32", "float64"], "structure": ["tensor"]},
    {"api": "minilib.segment_sum", "param": "segment_ids",
     "dtype": ["int32"], "structure": ["tensor"], "ndim": [1]},
    {"api": "minilib.segment_sum", "param": "num_segments",
     "dtype": ["int"], "ndim": [0], "range": {"low": 0, "high": None}},
    {"api": "minilib.norm", "param": "tensor_in",
     "dtype": ["float32"], "structure": ["tensor"]},
    {"api": "minilib.norm", "param": "epsilon",
     "dtype": ["float32"], "structure": ["scalar"],
     "range": {"low": 0, "high": None, "low_inclusive": False}},
    {"api": "minilib.norm", "param": "scale_factor", "dtype": ["&tensor_in.dtype"]},
    {"api": "minilib.norm", "param": "data_format", "enum": ["NWC", "NCW"]},
    {"api": "minilib.pad", "param": "input_t", "structure": ["tensor"]},
    {"api": "minilib.pad", "param": "paddings",
     "structure": ["tensor"], "shape": ["n", 2]},
    {"api": "minilib.pad", "param": "pad_values", "shape": "&paddings.shape"},
    {"api": "minilib.pad", "param": "pad_mode", "enum": ["CONSTANT", "REFLECT"]},
    {"api": "minilib.pad", "param": "constant_value"},
    {"api": "minilib.quantize_info", "param": "summary_in"},
    {"api": "minilib.quantize_info", "param": "axis_q",
     "range": {"low": None, "high": 4}},
    {"api": "minilib.quantize_info", "param": "bits",
     "dtype": ["int"], "ndim": [0], "range": {"low": 0, "high": None}},
]

MOCK_CORPUS = [
    {
        "api": "mocklib.pool3d",
        "params": [
            {"name": "data", "optional": False, "default": None},
            {"name": "ksize", "optional": False, "default": None},
            {"name": "strides", "optional": True, "default": "[1]"},
            {"name": "padding", "optional": False, "default": None},
        ],
        "descriptions": {
            "data": "A 5-D `Tensor` of type `float32`.",
            "ksize": "A list of `int32`.",
            "strides": "A list of `int32`.",
            "padding": "Must be either 'VALID' or 'SAME'.",
        },
    },
    {
        "api": "mocklib.scale",
        "params": [
            {"name": "data", "optional": False, "default": None},
            {"name": "alpha", "optional": False, "default": None},
            {"name": "mode", "optional": False, "default": None},
        ],
        "descriptions": {
            "data": "A `Tensor` of type `float32` or `float64`.",
            "alpha": "A `float32` scalar. Must be at least 0. Must be at most 1.",
            "mode": "'UP' and 'DOWN' are supported.",
        },
    },
    {
        "api": "mocklib.one_hot",
        "params": [
            {"name": "indices", "optional": False, "default": None},
            {"name": "depth", "optional": False, "default": None},
        ],
        "descriptions": {
            "indices": "A `Tensor` of type `int32`.",
            "depth": "The number of classes.",
        },
    },
    {
        "api": "mocklib.quantize",
        "params": [
            {"name": "data", "optional": False, "default": None},
            {"name": "axis", "optional": False, "default": None},
            {"name": "mode", "optional": False, "default": None},
        ],
        "descriptions": {
            "data": "A `Tensor` of type `float32`.",
            "axis": "A `int32` scalar. Must be at least -1.",
            "mode": "'HALF_UP' and 'HALF_EVEN' are supported.",
        },
    },
    {
        "api": "mocklib.residual_add",
        "params": [
            {"name": "x", "optional": False, "default": None},
            {"name": "y", "optional": False, "default": None},
        ],
        "descriptions": {
            "x": "A 2-D `Tensor` of type `float32`.",
            "y": "Must have the same shape as `x`. Must have the same type as `x`.",
        },
    },
    {
        "api": "mocklib.identity",
        "params": [{"name": "x", "optional": False, "default": None}],
        "descriptions": {"x": "A `Tensor`."},
    },
    {
        "api": "mocklib.slow_op",
        "params": [{"name": "data", "optional": False, "default": None}],
        "descriptions": {
            "data": "A `float32` scalar. Must be at least 0. Must be at most 1.",
        },
    },
    {
        "api": "mocklib.moving_average",
        "params": [
            {"name": "value", "optional": False, "default": None},
            {"name": "momentum", "optional": False, "default": None},
        ],
        "descriptions": {
            "value": "Must have the same shape as `variable`.",
            "momentum": "A `float32` scalar.",
        },
    },
    {
        "api": "mocklib.interp",
        "params": [
            {"name": "data", "optional": False, "default": None},
            {"name": "mode", "optional": True, "default": None},
        ],
        "descriptions": {
            "data": "A `Tensor`.",
            "mode": "",
        },
    },
]


def emit_conllu(corpus_path: Path, keywords_path: Path, out_path: Path) -> None:
    docs = load_corpus(str(corpus_path))
    table = KeywordTable.from_file(str(keywords_path))
    blocks: list[str] = []
    for doc in docs:
        names = frozenset(doc.param_names)
        for param in doc.param_names:
            pdoc = doc.param_docs.get(param)
            if pdoc is None:
                continue
            for idx, sentence in enumerate(pdoc.sentences):
                norm = normalize(sentence, table, names)
                texts = norm.texts()
                heads, deprels = match_template(texts)
                lines = [f"# sent_id = {sentence_id(doc.api_name, param, idx)}"]
                for i, text in enumerate(texts):
                    lines.append(
                        "\t".join(
                            [
                                str(i + 1), text, text, "_", "_", "_",
                                str(heads[i]), deprels[i], "_", "_",
                            ]
                        )
                    )
                blocks.append("\n".join(lines))
    out_path.write_text("\n\n".join(blocks) + "\n", encoding="utf-8")


def main() -> None:
    fixtures = ROOT / "fixtures"
    fixtures.mkdir(exist_ok=True)
    keywords_path = fixtures / "keywords.json"
    keywords_path.write_text(canonical_json(KEYWORDS), encoding="utf-8")

    for name, corpus, annotations in [
        ("pair", PAIR_CORPUS, PAIR_ANNOTATIONS),
        ("mini", MINI_CORPUS, MINI_ANNOTATIONS),
        ("mock", MOCK_CORPUS, None),
    ]:
        out = fixtures / name
        out.mkdir(exist_ok=True)
        (out / "corpus.json").write_text(canonical_json(corpus), encoding="utf-8")
        if annotations is not None:
            (out / "annotations.json").write_text(canonical_json(annotations), encoding="utf-8")
        emit_conllu(out / "corpus.json", keywords_path, out / "trees.conllu")
    print("fixtures written under", fixtures)


if __name__ == "__main__":
    main()
