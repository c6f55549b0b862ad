"""Structured API-documentation corpora.

A corpus file is a JSON list of API records::

    [{"api": "lib.op", "params": [{"name": "x", "optional": false, "default": null}],
      "descriptions": {"x": "A `Tensor` of type `float32`."}}, ...]

Loading validates the schema, splits each parameter description into
sentences, and tokenizes them.  Parse trees are not built here: sentences
carry a ``tree_ref`` identifier that an externally produced CoNLL-U bundle
resolves (see :mod:`docfuzz.deptree`).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field, replace

__all__ = [
    "ApiDoc",
    "CorpusError",
    "ParamDoc",
    "ParamSig",
    "Sentence",
    "corpus_to_obj",
    "load_corpus",
    "segment_sentences",
    "sentence_id",
    "tokenize",
]


class CorpusError(ValueError):
    """Raised for malformed corpus files (schema or uniqueness violations)."""


@dataclass(frozen=True)
class Sentence:
    raw_text: str
    tokens: tuple[str, ...]
    tree_ref: str | None = None


@dataclass(frozen=True)
class ParamSig:
    name: str
    optional: bool = False
    default_literal: str | None = None


@dataclass(frozen=True)
class ParamDoc:
    param_name: str
    sentences: tuple[Sentence, ...]


@dataclass(frozen=True)
class ApiDoc:
    api_name: str
    signature_params: tuple[ParamSig, ...]
    param_docs: dict[str, ParamDoc] = field(default_factory=dict)

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.signature_params)


# Spans kept whole during tokenization: backquoted, quoted, bracketed, and
# parenthesized runs each become a single token (they later normalize to a
# single abstract token, so splitting them would only fragment payloads).
_PROTECTED = re.compile(
    r"`[^`]*`"
    r"|'[^']*'"
    r"|\"[^\"]*\""
    r"|\[[^\]\[]*\]"
    r"|\([^)(]*\)"
)

_DIM_SHORTHAND = re.compile(r"^(\d+)[-]?[dD]$")
_TOKEN = re.compile(
    r"[+-]?\d+\.\d+(?:[eE][+-]?\d+)?"  # decimal literals survive the '.' split
    r"|[+-]?\d+[eE][+-]?\d+"
    r"|>=|<=|==|!="
    r"|[><]"
    r"|[,.:;!?]"
    r"|[^\s,.:;!?<>=]+"
)


def tokenize(text: str) -> tuple[str, ...]:
    """Split *text* into tokens, keeping protected spans intact.

    Dimension shorthands split into their parts ("4-D" -> "4", "D") so the
    normalizer can rewrite them uniformly.
    """
    tokens: list[str] = []
    pos = 0
    for m in _PROTECTED.finditer(text):
        tokens.extend(_split_plain(text[pos : m.start()]))
        tokens.append(m.group(0))
        pos = m.end()
    tokens.extend(_split_plain(text[pos:]))
    return tuple(tokens)


def _split_plain(chunk: str) -> list[str]:
    out: list[str] = []
    for piece in chunk.split():
        for part in _TOKEN.findall(piece):
            dim = _DIM_SHORTHAND.match(part)
            if dim:
                out.extend([dim.group(1), part[len(dim.group(1)) :].lstrip("-")])
            else:
                out.append(part)
    return out


_TERMINAL = frozenset(".!?")
_OPENERS = {"`": "`", "'": "'", '"': '"', "[": "]", "(": ")"}


def segment_sentences(description: str) -> list[Sentence]:
    """Split a raw description into sentences.

    A sentence ends at terminal punctuation that is not inside a backquoted,
    quoted, bracketed, or parenthesized span and not part of a number or
    dotted name.  Whitespace-only leftovers are dropped; order is preserved.
    """
    sentences: list[Sentence] = []
    buf: list[str] = []
    closer: str | None = None
    for i, ch in enumerate(description):
        buf.append(ch)
        if closer is not None:
            if ch == closer:
                closer = None
            continue
        if ch in _OPENERS:
            closer = _OPENERS[ch]
        elif ch in _TERMINAL:
            nxt = description[i + 1] if i + 1 < len(description) else " "
            if not nxt.isalnum():
                _flush(buf, sentences)
                buf = []
    _flush(buf, sentences)
    return sentences


def _flush(buf: list[str], sentences: list[Sentence]) -> None:
    raw = "".join(buf).strip()
    if raw:
        sentences.append(Sentence(raw_text=raw, tokens=tokenize(raw)))


def sentence_id(api: str, param: str, index: int) -> str:
    return f"{api}::{param}::{index}"


def load_corpus(path: str) -> list[ApiDoc]:
    """Load and validate a corpus file.

    Raises:
        CorpusError: on schema violations, naming the offending record and
            field, or when two records share an ``api`` name.
    """
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{path}: not valid JSON at line {exc.lineno}: {exc.msg}") from exc

    if not isinstance(raw, list):
        raise CorpusError(f"{path}: top level must be a list of API records")

    docs: list[ApiDoc] = []
    seen: set[str] = set()
    for i, record in enumerate(raw):
        doc = _parse_record(record, where=f"{path}: record {i}")
        if doc.api_name in seen:
            raise CorpusError(f"{path}: duplicate api {doc.api_name!r}")
        seen.add(doc.api_name)
        docs.append(doc)
    return docs


def _parse_record(record: object, where: str) -> ApiDoc:
    if not isinstance(record, dict):
        raise CorpusError(f"{where}: expected an object")
    api = record.get("api")
    if not isinstance(api, str) or not api:
        raise CorpusError(f"{where}: field 'api' must be a nonempty string")

    params_raw = record.get("params")
    if not isinstance(params_raw, list):
        raise CorpusError(f"{where} ({api}): field 'params' must be a list")
    params: list[ParamSig] = []
    names: set[str] = set()
    for j, p in enumerate(params_raw):
        if not isinstance(p, dict) or not isinstance(p.get("name"), str) or not p["name"]:
            raise CorpusError(f"{where} ({api}): params[{j}] needs a nonempty 'name'")
        if p["name"] in names:
            raise CorpusError(f"{where} ({api}): duplicate parameter {p['name']!r}")
        names.add(p["name"])
        default = p.get("default")
        params.append(
            ParamSig(
                name=p["name"],
                optional=bool(p.get("optional", False)),
                default_literal=None if default is None else str(default),
            )
        )

    descriptions = record.get("descriptions", {})
    if not isinstance(descriptions, dict):
        raise CorpusError(f"{where} ({api}): field 'descriptions' must be an object")
    param_docs: dict[str, ParamDoc] = {}
    for name, text in descriptions.items():
        if name in param_docs:
            raise CorpusError(f"{where} ({api}): duplicate description for {name!r}")
        if not isinstance(text, str):
            raise CorpusError(f"{where} ({api}): description of {name!r} must be a string")
        sentences = tuple(
            replace(s, tree_ref=sentence_id(api, name, k))
            for k, s in enumerate(segment_sentences(text))
        )
        param_docs[name] = ParamDoc(param_name=name, sentences=sentences)

    return ApiDoc(api_name=api, signature_params=tuple(params), param_docs=param_docs)


def corpus_to_obj(docs: list[ApiDoc]) -> list[dict]:
    """Rebuild the corpus-file object for canonical reserialization."""
    out = []
    for doc in docs:
        out.append(
            {
                "api": doc.api_name,
                "params": [
                    {
                        "name": p.name,
                        "optional": p.optional,
                        "default": p.default_literal,
                    }
                    for p in doc.signature_params
                ],
                "descriptions": {
                    name: " ".join(s.raw_text for s in pd.sentences)
                    for name, pd in sorted(doc.param_docs.items())
                },
            }
        )
    return out
