"""Apply extraction rules to a prepared corpus and instantiate constraints.

Every rule whose pattern matches a sentence tree fires; the abstract token
the rule's category consumes is located through the leftmost embedding and
its payload (recorded during normalization) fills the concrete constraint.
Same-category results union across sentences.  Dependency references whose
target is not a signature parameter are dropped from the constraint and
reported as documentation bugs instead.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

from docfuzz.constraints import (
    ApiConstraints,
    Category,
    ConcreteConstraint,
    DependencyGraph,
    Range,
    constraint_to_obj,
)
from docfuzz.deptree import DepTree, find_embedding, iter_embeddings
from docfuzz.normalize import NormalizedSentence
from docfuzz.pipeline import PreparedCorpus
from docfuzz.rulegen import ExtractionRule

__all__ = [
    "DocBug",
    "ExtractionResult",
    "FORMATTING",
    "SIGNATURE_MISMATCH",
    "UNRESOLVED_DEPENDENCY",
    "detect_doc_bugs",
    "extract",
    "extract_param",
    "result_to_obj",
]

FORMATTING = "FORMATTING"
SIGNATURE_MISMATCH = "SIGNATURE_MISMATCH"
UNRESOLVED_DEPENDENCY = "UNRESOLVED_DEPENDENCY"

# Structure payloads that name the same container the generator builds.
_STRUCTURE_CANON = {"ndarray": "tensor", "array": "tensor", "sequence": "list"}

# Post-extraction default assumptions.  Each entry is independently
# disableable; "number_of" reads counting phrases as 0-dim non-negative ints.
DEFAULT_HEURISTICS = ("number_of",)


@dataclass(frozen=True)
class DocBug:
    api: str
    kind: str
    detail: str
    names: tuple[str, ...] = ()


@dataclass
class _Draft:
    """Mutable accumulator for one parameter's constraint."""

    dtypes: set[str] = field(default_factory=set)
    structures: set[str] = field(default_factory=set)
    ndims: set[int] = field(default_factory=set)
    shape: tuple[int | str, ...] | str | None = None
    range: Range | None = None
    enum: set[str] | None = None
    dep_refs: set[str] = field(default_factory=set)
    warnings: list[str] = field(default_factory=list)

    def finish(self, param: str) -> ConcreteConstraint:
        return ConcreteConstraint(
            param=param,
            dtypes=frozenset(self.dtypes),
            structures=frozenset(self.structures),
            ndims=frozenset(self.ndims),
            shape=self.shape,
            range=self.range,
            enum=None if self.enum is None else frozenset(self.enum),
        ).with_consistent_ndims()


def extract_param(
    sentences: Sequence[NormalizedSentence],
    trees: Sequence[DepTree],
    rules: Iterable[ExtractionRule],
    heuristics: tuple[str, ...] = DEFAULT_HEURISTICS,
) -> tuple[ConcreteConstraint, set[str], list[str]]:
    """Constraints for one parameter.

    Returns the constraint, the set of referenced parameter names, and any
    instantiation warnings.
    """
    draft = _Draft()
    ordered_rules = sorted(rules, key=lambda r: (r.pattern.encode(), str(r.ac.category)))
    for sentence, tree in zip(sentences, trees):
        for rule in ordered_rules:
            embedding = find_embedding(rule.pattern, tree)
            if embedding is None:
                continue
            _fire(rule, embedding, sentence, tree, draft)
    if "number_of" in heuristics:
        _apply_number_of(sentences, draft)
    return draft.finish(param=""), draft.dep_refs, draft.warnings


def _slot_payload(
    rule: ExtractionRule,
    embedding: tuple[int, ...],
    sentence: NormalizedSentence,
    tree: DepTree,
    draft: _Draft,
) -> tuple | None:
    slot_label = rule.ac.slots[0]
    slot_nodes = [i for i, lab in enumerate(rule.pattern.labels) if lab == slot_label]
    if not slot_nodes:
        return None
    token_idx = embedding[slot_nodes[0]]
    token = sentence.tokens[token_idx]
    if not token.payload:
        draft.warnings.append(
            f"rule {rule.pattern.encode()!r} matched a {slot_label} token without payload; skipped"
        )
        return None
    _warn_on_extra_occurrences(rule, sentence, tree, token_idx, slot_nodes[0], draft)
    return token.payload


def _warn_on_extra_occurrences(
    rule: ExtractionRule,
    sentence: NormalizedSentence,
    tree: DepTree,
    first_token: int,
    slot_node: int,
    draft: _Draft,
) -> None:
    for n, emb in enumerate(iter_embeddings(rule.pattern, tree)):
        if emb[slot_node] != first_token:
            draft.warnings.append(
                f"pattern {rule.pattern.encode()!r} fills its slot from multiple tokens "
                f"in {sentence.render()!r}; using the leftmost"
            )
            return
        if n >= 8:
            return


def _fire(
    rule: ExtractionRule,
    embedding: tuple[int, ...],
    sentence: NormalizedSentence,
    tree: DepTree,
    draft: _Draft,
) -> None:
    payload = _slot_payload(rule, embedding, sentence, tree, draft)
    if payload is None:
        return
    category = rule.ac.category
    if category is Category.DTYPE:
        draft.dtypes.update(payload)
    elif category is Category.STRUCTURE:
        draft.structures.update(_STRUCTURE_CANON.get(s, s) for s in payload)
    elif category is Category.NDIM:
        draft.ndims.update(int(v) for v in payload)
    elif category is Category.SHAPE:
        _set_shape(draft, tuple(payload[0]), sentence)
    elif category is Category.VALUE_ENUM:
        if draft.enum is None:
            draft.enum = set()
        draft.enum.update(payload)
    elif category is Category.VALUE_RANGE:
        for op, operand in payload:
            _merge_range(draft, op, operand)
    elif category is Category.DEP_DTYPE:
        for name in payload:
            draft.dtypes.add(f"&{name}.dtype")
            draft.dep_refs.add(name)
    elif category is Category.DEP_SHAPE:
        for name in payload:
            _set_shape(draft, f"&{name}.shape", sentence)
            draft.dep_refs.add(name)


def _set_shape(draft: _Draft, shape: tuple[int | str, ...] | str, sentence: NormalizedSentence) -> None:
    if draft.shape is not None and draft.shape != shape:
        draft.warnings.append(
            f"conflicting shapes {draft.shape!r} and {shape!r} in {sentence.render()!r}; keeping the first"
        )
        return
    draft.shape = shape


def _merge_range(draft: _Draft, op: str, operand: tuple) -> None:
    kind, raw = operand
    value: float | int | str = f"&{raw}" if kind == "ref" else raw
    r = draft.range or Range()
    try:
        if op in (">", ">="):
            r = replace(r, low=value, low_inclusive=(op == ">="))
        elif op in ("<", "<="):
            r = replace(r, high=value, high_inclusive=(op == "<="))
        elif op == "==":
            r = replace(r, low=value, high=value, low_inclusive=True, high_inclusive=True)
        else:
            draft.warnings.append(f"comparator {op!r} is not representable as a range; ignored")
            return
    except ValueError as exc:
        draft.warnings.append(f"inconsistent range bounds dropped: {exc}")
        return
    draft.range = r


def _apply_number_of(sentences: Sequence[NormalizedSentence], draft: _Draft) -> None:
    for sentence in sentences:
        texts = list(sentence.texts())
        if texts and texts[0] == "the":
            texts = texts[1:]
        if texts[:2] == ["number", "of"]:
            if not draft.ndims:
                draft.ndims.add(0)
            if not draft.dtypes:
                draft.dtypes.add("int")
            if draft.range is None:
                draft.range = Range(low=0)
            return


@dataclass(frozen=True)
class ExtractionResult:
    constraints: dict[tuple[str, str], ConcreteConstraint]
    api_constraints: dict[str, ApiConstraints]
    doc_bugs: tuple[DocBug, ...]
    warnings: tuple[str, ...]


def extract(
    prepared: PreparedCorpus,
    rules: Iterable[ExtractionRule],
    heuristics: tuple[str, ...] = DEFAULT_HEURISTICS,
    jobs: int = 1,
) -> ExtractionResult:
    """Run every rule over every parameter description and assemble results.

    Extraction is independent per API; ``jobs`` > 1 fans APIs out over a
    thread pool and merges deterministically by API name.
    """
    rules = list(rules)
    constraints: dict[tuple[str, str], ConcreteConstraint] = {}
    api_constraints: dict[str, ApiConstraints] = {}
    bugs: list[DocBug] = []
    warnings: list[str] = []

    apis = prepared.apis()
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            partials = list(
                pool.map(lambda a: _extract_api(prepared, a, rules, heuristics), apis)
            )
    else:
        partials = [_extract_api(prepared, api, rules, heuristics) for api in apis]

    for api, (ac, api_bugs, api_warnings) in zip(apis, partials):
        api_constraints[api] = ac
        for name, c in ac.params.items():
            constraints[(api, name)] = c
        bugs.extend(api_bugs)
        warnings.extend(api_warnings)

    return ExtractionResult(
        constraints=constraints,
        api_constraints=api_constraints,
        doc_bugs=tuple(bugs),
        warnings=tuple(warnings),
    )


def _extract_api(
    prepared: PreparedCorpus,
    api: str,
    rules: list[ExtractionRule],
    heuristics: tuple[str, ...],
) -> tuple[ApiConstraints, list[DocBug], list[str]]:
    doc = prepared.doc(api)
    bugs: list[DocBug] = []
    warnings: list[str] = []
    signature = doc.param_names
    known = set(signature)
    edges: set[tuple[str, str]] = set()
    params: dict[str, ConcreteConstraint] = {}
    dep_consumed: dict[str, set[str]] = {}

    for param in signature:
        prepared_param = prepared.param(api, param)
        if prepared_param is None or not prepared_param.sentences:
            continue
        constraint, refs, param_warnings = extract_param(
            prepared_param.sentences, prepared_param.trees, rules, heuristics
        )
        constraint = replace(constraint, param=param)
        dep_consumed[param] = set(refs)
        warnings.extend(f"{api}.{param}: {w}" for w in param_warnings)

        constraint, unresolved = _resolve_refs(constraint, refs, known)
        for target in sorted(unresolved):
            bugs.append(
                DocBug(
                    api=api,
                    kind=UNRESOLVED_DEPENDENCY,
                    detail=f"description of {param!r} depends on {target!r}, "
                    "which is not a documented parameter",
                    names=(param, target),
                )
            )
        for target in sorted((_value_refs(constraint) | refs) & known):
            edges.add((target, param))
        params[param] = constraint

    ac = ApiConstraints(
        api=api,
        signature=signature,
        optional=frozenset(p.name for p in doc.signature_params if p.optional),
        params=params,
        graph=DependencyGraph(params=signature, edges=frozenset(edges)),
    )
    bugs.extend(_doc_bugs_for_api(prepared, api, dep_consumed))
    return ac, bugs, warnings


def _resolve_refs(
    constraint: ConcreteConstraint, refs: set[str], known: set[str]
) -> tuple[ConcreteConstraint, set[str]]:
    """Strip dependency references to unknown parameters out of the constraint."""
    unresolved = {r for r in refs if r not in known}
    if not unresolved:
        return constraint, set()
    dtypes = frozenset(
        d for d in constraint.dtypes
        if not (d.startswith("&") and d[1 : -len(".dtype")] in unresolved)
    )
    shape = constraint.shape
    if isinstance(shape, str) and shape[1 : -len(".shape")] in unresolved:
        shape = None
    return replace(constraint, dtypes=dtypes, shape=shape), unresolved


def _value_refs(constraint: ConcreteConstraint) -> set[str]:
    refs: set[str] = set()
    for d in constraint.dtypes:
        if d.startswith("&"):
            refs.add(d[1 : -len(".dtype")])
    if isinstance(constraint.shape, str):
        refs.add(constraint.shape[1 : -len(".shape")])
    elif constraint.shape is not None:
        refs.update(t for t in constraint.shape if isinstance(t, str))
    if constraint.range is not None:
        for bound in (constraint.range.low, constraint.range.high):
            if isinstance(bound, str):
                refs.add(bound[1:])
    return refs


def _doc_bugs_for_api(
    prepared: PreparedCorpus, api: str, dep_consumed: dict[str, set[str]]
) -> list[DocBug]:
    doc = prepared.doc(api)
    known = set(doc.param_names)
    bugs: list[DocBug] = []

    for param in doc.param_names:
        prepared_param = prepared.param(api, param)
        if prepared_param is None or not prepared_param.sentences:
            bugs.append(
                DocBug(
                    api=api,
                    kind=FORMATTING,
                    detail=f"parameter {param!r} is in the signature but has no usable description",
                    names=(param,),
                )
            )

    for name in sorted(set(doc.param_docs) - known):
        bugs.append(
            DocBug(
                api=api,
                kind=SIGNATURE_MISMATCH,
                detail=f"description block for {name!r} has no matching signature parameter",
                names=(name,),
            )
        )

    for param in doc.param_names:
        prepared_param = prepared.param(api, param)
        if prepared_param is None:
            continue
        consumed = dep_consumed.get(param, set())
        mentioned: set[str] = set()
        for sentence in prepared_param.sentences:
            for token in sentence.tokens:
                if token.kind == "PARAM":
                    mentioned.update(token.payload)
        for name in sorted(mentioned - known - consumed):
            bugs.append(
                DocBug(
                    api=api,
                    kind=SIGNATURE_MISMATCH,
                    detail=f"description of {param!r} mentions {name!r}, "
                    "which is not in the API signature",
                    names=(param, name),
                )
            )
    return bugs


def detect_doc_bugs(prepared: PreparedCorpus, result: ExtractionResult) -> list[DocBug]:
    """The documentation bugs recorded in *result*, in a stable order."""
    return sorted(result.doc_bugs, key=lambda b: (b.api, b.kind, b.names))


def result_to_obj(result: ExtractionResult) -> dict:
    apis: dict[str, dict] = {}
    for api, ac in sorted(result.api_constraints.items()):
        apis[api] = {
            "signature": [
                {"name": name, "optional": name in ac.optional} for name in ac.signature
            ],
            "params": {
                name: constraint_to_obj(c) for name, c in sorted(ac.params.items())
            },
            "edges": sorted(list(e) for e in ac.graph_or_empty().edges),
        }
    return {"apis": apis}


def doc_bugs_to_obj(bugs: Iterable[DocBug]) -> list[dict]:
    return [
        {"api": b.api, "kind": b.kind, "detail": b.detail, "names": list(b.names)}
        for b in sorted(bugs, key=lambda b: (b.api, b.kind, b.names))
    ]


def api_constraints_from_obj(obj: Mapping) -> dict[str, ApiConstraints]:
    from docfuzz.constraints import constraint_from_obj

    out: dict[str, ApiConstraints] = {}
    for api, entry in obj["apis"].items():
        signature = tuple(p["name"] for p in entry["signature"])
        optional = frozenset(p["name"] for p in entry["signature"] if p.get("optional"))
        params = {
            name: constraint_from_obj(name, c) for name, c in entry["params"].items()
        }
        edges = frozenset((u, v) for u, v in entry.get("edges", []))
        out[api] = ApiConstraints(
            api=api,
            signature=signature,
            optional=optional,
            params=params,
            graph=DependencyGraph(params=signature, edges=edges),
        )
    return out
