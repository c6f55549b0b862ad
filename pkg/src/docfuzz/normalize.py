"""Sentence normalization: rewrite tokens into abstract form before parsing.

Nine rewrite rules run in a fixed order over the token stream; earlier rules
shadow later ones on overlapping spans (a backquoted dtype becomes D_TYPE,
never ENUM):

1. dtype keywords          -> D_TYPE
2. structure keywords      -> D_STRUCTURE
3. integer literals        -> CONSTANT_NUM
4. float literals          -> CONSTANT_FLOAT
5. boolean literals        -> CONSTANT_BOOL
6. relational expressions  -> REXPR   (comparator + numeric/parameter operand)
7. parameter names         -> PARAM   (plus unknown backquoted identifiers,
                                       kept so extraction can flag doc bugs)
8. quoted enumerands       -> ENUM
9. bracketed shape spans   -> SHAPE

Afterwards, runs of same-kind abstract tokens (optionally joined by ``,``,
``or``, ``and``, ``/``) collapse into one token whose payload unions all
collapsed values.  Every abstract token keeps its originating surfaces so
extraction can instantiate constraints later.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from docfuzz.corpus import Sentence

__all__ = [
    "ABSTRACT_KINDS",
    "KeywordTable",
    "NormToken",
    "NormalizedSentence",
    "normalize",
]

LITERAL = "LITERAL"
D_TYPE = "D_TYPE"
D_STRUCTURE = "D_STRUCTURE"
CONSTANT_NUM = "CONSTANT_NUM"
CONSTANT_FLOAT = "CONSTANT_FLOAT"
CONSTANT_BOOL = "CONSTANT_BOOL"
REXPR = "REXPR"
PARAM = "PARAM"
ENUM = "ENUM"
SHAPE = "SHAPE"

ABSTRACT_KINDS = frozenset(
    {D_TYPE, D_STRUCTURE, CONSTANT_NUM, CONSTANT_FLOAT, CONSTANT_BOOL, REXPR, PARAM, ENUM, SHAPE}
)

_QUOTES = "`'\""
_INT = re.compile(r"^[+-]?\d+$")
_FLOAT = re.compile(r"^[+-]?(\d+\.\d*|\.\d+|\d+(\.\d*)?[eE][+-]?\d+)$")
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_SHAPE_SPAN = re.compile(r"^[\[(](.*)[\])]$")

_COMPARATORS = {">": ">", ">=": ">=", "<": "<", "<=": "<=", "==": "==", "!=": "!="}
_WORD_COMPARATORS = {
    ("at", "least"): ">=",
    ("at", "most"): "<=",
    ("greater", "than"): ">",
    ("less", "than"): "<",
}

# Dimension words after a count normalize to the single literal "d", so
# "4-D", "4D", and "4 dimensional" all yield CONSTANT_NUM d.
_DIM_WORDS = frozenset({"d", "dim", "dims", "dimension", "dimensions", "dimensional"})

_CONNECTORS = frozenset({",", "or", "and", "/"})


def _normkey(text: str) -> str:
    return re.sub(r"[-_\s]", "", text.strip(_QUOTES).lower())


@dataclass(frozen=True)
class KeywordTable:
    """Per-target dtype and structure keyword lists.

    Lookup is case-insensitive and ignores hyphens, underscores, and interior
    whitespace ("float 32" matches "float32").  The two sets must be disjoint.
    """

    dtype_map: dict[str, str]
    structure_map: dict[str, str]

    def __post_init__(self) -> None:
        overlap = set(self.dtype_map) & set(self.structure_map)
        if overlap:
            raise ValueError(f"keyword sets overlap: {sorted(overlap)}")
        if not self.dtype_map and not self.structure_map:
            raise ValueError("keyword table is empty")

    @classmethod
    def from_entries(
        cls,
        dtypes: list[dict[str, str]],
        structures: list[dict[str, str]],
    ) -> KeywordTable:
        return cls(
            dtype_map={_normkey(e["surface"]): e["canonical"] for e in dtypes},
            structure_map={_normkey(e["surface"]): e["canonical"] for e in structures},
        )

    @classmethod
    def from_file(cls, path: str) -> KeywordTable:
        from docfuzz.artifacts import load_json

        raw = load_json(path)
        return cls.from_entries(raw["dtypes"], raw["structures"])


@dataclass(frozen=True)
class NormToken:
    """One normalized token: an abstract kind or a literal word."""

    kind: str
    surfaces: tuple[str, ...]
    payload: tuple = ()

    @property
    def text(self) -> str:
        if self.kind == LITERAL:
            return self.surfaces[0]
        return self.kind


@dataclass(frozen=True)
class NormalizedSentence:
    tokens: tuple[NormToken, ...]
    warnings: tuple[str, ...] = field(default=())

    def texts(self) -> tuple[str, ...]:
        return tuple(t.text for t in self.tokens)

    def render(self) -> str:
        return " ".join(self.texts())


def normalize(
    sentence: Sentence,
    table: KeywordTable,
    param_names: frozenset[str] | set[str] = frozenset(),
) -> NormalizedSentence:
    """Apply the nine rewrite rules plus the collapse pass to *sentence*."""
    warnings: list[str] = []
    colliding = {n for n in param_names if _normkey(n) in table.dtype_map or _normkey(n) in table.structure_map}
    for name in sorted(colliding):
        warnings.append(f"parameter name {name!r} collides with a keyword; keyword rule wins")

    raw = list(sentence.tokens)
    out: list[NormToken] = []
    i = 0
    while i < len(raw):
        token, consumed = _classify(raw, i, table, frozenset(param_names))
        out.append(token)
        i += consumed

    return NormalizedSentence(tokens=tuple(_collapse(out)), warnings=tuple(warnings))


def _classify(
    raw: list[str], i: int, table: KeywordTable, param_names: frozenset[str]
) -> tuple[NormToken, int]:
    tok = raw[i]
    lower = tok.lower()

    # Re-normalizing an already normalized sentence is a no-op on kinds.
    if tok in ABSTRACT_KINDS:
        return NormToken(kind=tok, surfaces=(tok,)), 1

    # Rules 1-2: keyword windows, longest match first, dtypes before structures.
    for width in (3, 2, 1):
        if i + width > len(raw):
            continue
        key = _normkey("".join(raw[i : i + width]))
        if not key:
            continue
        if key in table.dtype_map:
            return (
                NormToken(D_TYPE, tuple(raw[i : i + width]), (table.dtype_map[key],)),
                width,
            )
        if key in table.structure_map:
            return (
                NormToken(D_STRUCTURE, tuple(raw[i : i + width]), (table.structure_map[key],)),
                width,
            )

    stripped = tok.strip(_QUOTES)

    # Rules 3-5: numeric and boolean literals.
    if _INT.match(stripped):
        return NormToken(CONSTANT_NUM, (tok,), (int(stripped),)), 1
    if _FLOAT.match(stripped):
        return NormToken(CONSTANT_FLOAT, (tok,), (float(stripped),)), 1
    if stripped.lower() in ("true", "false"):
        return NormToken(CONSTANT_BOOL, (tok,), (stripped.lower() == "true",)), 1

    # Rule 6: comparator followed by a numeric or parameter operand.
    rexpr = _match_rexpr(raw, i, param_names)
    if rexpr is not None:
        return rexpr

    # Rule 7: known parameter names; unknown backquoted identifiers are kept
    # as PARAM too so dangling references surface as documentation bugs.
    if stripped in param_names:
        return NormToken(PARAM, (tok,), (stripped,)), 1
    if tok.startswith("`") and tok.endswith("`") and _IDENT.match(stripped):
        return NormToken(PARAM, (tok,), (stripped,)), 1

    # Rule 8: quoted enumerands.
    if len(tok) >= 2 and tok[0] in "'\"" and tok[-1] == tok[0]:
        return NormToken(ENUM, (tok,), (stripped,)), 1

    # Rule 9: bracketed or parenthesized shape spans.
    shape = _parse_shape(tok)
    if shape is not None:
        return NormToken(SHAPE, (tok,), (shape,)), 1

    if lower in _DIM_WORDS and _prev_is_count(raw, i):
        return NormToken(LITERAL, ("d",)), 1
    return NormToken(LITERAL, (lower,)), 1


def _prev_is_count(raw: list[str], i: int) -> bool:
    if i == 0:
        return False
    prev = raw[i - 1]
    return prev == CONSTANT_NUM or bool(_INT.match(prev.strip(_QUOTES)))


def _match_rexpr(
    raw: list[str], i: int, param_names: frozenset[str]
) -> tuple[NormToken, int] | None:
    op = None
    width = 0
    if raw[i] in _COMPARATORS:
        op, width = _COMPARATORS[raw[i]], 1
    elif i + 1 < len(raw):
        pair = (raw[i].lower(), raw[i + 1].lower())
        if pair in _WORD_COMPARATORS:
            op, width = _WORD_COMPARATORS[pair], 2
    if op is None or i + width >= len(raw):
        return None

    operand_tok = raw[i + width]
    stripped = operand_tok.strip(_QUOTES)
    operand: tuple | None = None
    if _INT.match(stripped):
        operand = ("num", int(stripped))
    elif _FLOAT.match(stripped):
        operand = ("num", float(stripped))
    elif stripped in param_names or (
        operand_tok.startswith("`") and _IDENT.match(stripped)
    ):
        operand = ("ref", stripped)
    if operand is None:
        return None
    surfaces = tuple(raw[i : i + width + 1])
    return NormToken(REXPR, surfaces, ((op, operand),)), width + 1


def _parse_shape(tok: str) -> tuple | None:
    m = _SHAPE_SPAN.match(tok)
    if m is None:
        return None
    inner = m.group(1).strip()
    if not inner:
        return None
    terms: list[int | str] = []
    for piece in inner.split(","):
        piece = piece.strip().strip(_QUOTES)
        if _INT.match(piece):
            terms.append(int(piece))
        elif _IDENT.match(piece) or piece in ("?", "..."):
            terms.append(piece)
        else:
            return None
    return tuple(terms)


def _collapse(tokens: list[NormToken]) -> list[NormToken]:
    """Merge runs of same-kind abstract tokens, swallowing list connectors."""
    out: list[NormToken] = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        i += 1
        if tok.kind not in ABSTRACT_KINDS:
            out.append(tok)
            continue
        surfaces = list(tok.surfaces)
        payload = list(tok.payload)
        while i < len(tokens):
            j = i
            connectors: list[NormToken] = []
            while (
                j < len(tokens)
                and tokens[j].kind == LITERAL
                and tokens[j].text in _CONNECTORS
            ):
                connectors.append(tokens[j])
                j += 1
            if j < len(tokens) and tokens[j].kind == tok.kind:
                surfaces.extend(s for c in connectors for s in c.surfaces)
                surfaces.extend(tokens[j].surfaces)
                for item in tokens[j].payload:
                    if item not in payload:
                        payload.append(item)
                i = j + 1
            else:
                break
        out.append(NormToken(tok.kind, tuple(surfaces), tuple(payload)))
    return out
