"""Constraint model: abstract categories, concrete per-parameter constraints,
inter-parameter dependency graphs, and an independent input validator.

Abstract constraints name *what kind* of assertion a sentence makes (dtype,
structure, dimension count, shape, enumerated or ranged values, or a
dependency on another parameter).  Concrete constraints carry the instantiated
options.  Dependencies use ``&other.dtype`` / ``&other.shape`` references for
property copies and bare parameter names inside shapes for value references.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

__all__ = [
    "AbstractConstraint",
    "ApiConstraints",
    "Category",
    "ConcreteConstraint",
    "DependencyGraph",
    "Range",
    "TopoOrder",
    "ValueSpec",
    "Verdict",
    "annotations_from_obj",
    "annotations_to_obj",
    "constraint_from_obj",
    "constraint_to_obj",
    "derive_categories",
    "topo_order",
    "validate",
]


class Category(str, enum.Enum):
    DTYPE = "DTYPE"
    STRUCTURE = "STRUCTURE"
    NDIM = "NDIM"
    SHAPE = "SHAPE"
    VALUE_ENUM = "VALUE_ENUM"
    VALUE_RANGE = "VALUE_RANGE"
    DEP_DTYPE = "DEP_DTYPE"
    DEP_SHAPE = "DEP_SHAPE"

    def __str__(self) -> str:  # stable artifact keys
        return self.value


# Abstract token kind each category consumes when a rule is instantiated.
CATEGORY_SLOTS: dict[Category, tuple[str, ...]] = {
    Category.DTYPE: ("D_TYPE",),
    Category.STRUCTURE: ("D_STRUCTURE",),
    Category.NDIM: ("CONSTANT_NUM",),
    Category.SHAPE: ("SHAPE",),
    Category.VALUE_ENUM: ("ENUM",),
    Category.VALUE_RANGE: ("REXPR",),
    Category.DEP_DTYPE: ("PARAM",),
    Category.DEP_SHAPE: ("PARAM",),
}


@dataclass(frozen=True)
class AbstractConstraint:
    category: Category

    @property
    def slots(self) -> tuple[str, ...]:
        return CATEGORY_SLOTS[self.category]


@dataclass(frozen=True)
class Range:
    """Numeric bounds; an endpoint may be ``&param`` to copy another value."""

    low: float | int | str | None = None
    high: float | int | str | None = None
    low_inclusive: bool = True
    high_inclusive: bool = True

    def __post_init__(self) -> None:
        if (
            isinstance(self.low, (int, float))
            and isinstance(self.high, (int, float))
            and self.low > self.high
        ):
            raise ValueError(f"range low {self.low} exceeds high {self.high}")


@dataclass(frozen=True)
class ConcreteConstraint:
    """Instantiated constraints of one parameter.

    ``dtypes`` may contain ``&other.dtype`` references; ``shape`` is either a
    term list (ints, parameter value references, or free dimension names) or a
    whole-shape reference string ``&other.shape``.
    """

    param: str
    dtypes: frozenset[str] = frozenset()
    structures: frozenset[str] = frozenset()
    ndims: frozenset[int] = frozenset()
    shape: tuple[int | str, ...] | str | None = None
    range: Range | None = None
    enum: frozenset[str] | None = None

    def is_empty(self) -> bool:
        return not (
            self.dtypes or self.structures or self.ndims or self.shape is not None
            or self.range is not None or self.enum is not None
        )

    def with_consistent_ndims(self) -> ConcreteConstraint:
        """Fold a literal shape's length into ndims so the two stay consistent."""
        if isinstance(self.shape, tuple) and self.ndims and len(self.shape) not in self.ndims:
            return replace(self, ndims=self.ndims | {len(self.shape)})
        return self


def derive_categories(c: ConcreteConstraint) -> frozenset[Category]:
    """Abstract away a concrete constraint to the categories it asserts."""
    cats: set[Category] = set()
    if any(d.startswith("&") for d in c.dtypes):
        cats.add(Category.DEP_DTYPE)
    if any(not d.startswith("&") for d in c.dtypes):
        cats.add(Category.DTYPE)
    if c.structures:
        cats.add(Category.STRUCTURE)
    if c.ndims:
        cats.add(Category.NDIM)
    if isinstance(c.shape, str):
        cats.add(Category.DEP_SHAPE)
    elif c.shape is not None:
        cats.add(Category.SHAPE)
    if c.range is not None:
        cats.add(Category.VALUE_RANGE)
    if c.enum is not None:
        cats.add(Category.VALUE_ENUM)
    return frozenset(cats)


@dataclass(frozen=True)
class DependencyGraph:
    """Per-API graph: an edge u -> v records that v's constraint references u."""

    params: tuple[str, ...]
    edges: frozenset[tuple[str, str]] = frozenset()

    def __post_init__(self) -> None:
        known = set(self.params)
        for u, v in self.edges:
            if u not in known or v not in known:
                raise ValueError(f"edge ({u}, {v}) references unknown parameter")


@dataclass(frozen=True)
class TopoOrder:
    order: tuple[str, ...]
    dropped_edges: tuple[tuple[str, str], ...] = ()


def topo_order(g: DependencyGraph) -> TopoOrder:
    """Dependency-respecting parameter order.

    Sources precede targets; ties break by signature position.  Cycles never
    abort: the edge with the lexicographically largest (source, target) inside
    the stuck subgraph is dropped, recorded, and ordering continues.
    """
    position = {p: i for i, p in enumerate(g.params)}
    edges = set(g.edges)
    dropped: list[tuple[str, str]] = []

    while True:
        indeg = {p: 0 for p in g.params}
        for _, v in edges:
            indeg[v] += 1
        ready = sorted((p for p in g.params if indeg[p] == 0), key=position.__getitem__)
        order: list[str] = []
        remaining = set(edges)
        while ready:
            node = ready.pop(0)
            order.append(node)
            released = []
            for u, v in sorted(remaining):
                if u == node:
                    released.append((u, v))
                    indeg[v] -= 1
                    if indeg[v] == 0:
                        ready.append(v)
            remaining -= set(released)
            ready.sort(key=position.__getitem__)
        if len(order) == len(g.params):
            return TopoOrder(order=tuple(order), dropped_edges=tuple(dropped))
        victim = max(remaining)
        edges.discard(victim)
        dropped.append(victim)


@dataclass(frozen=True)
class ApiConstraints:
    """Everything extraction knows about one API's parameters."""

    api: str
    signature: tuple[str, ...]
    optional: frozenset[str] = frozenset()
    params: Mapping[str, ConcreteConstraint] = field(default_factory=dict)
    graph: DependencyGraph | None = None

    def graph_or_empty(self) -> DependencyGraph:
        return self.graph if self.graph is not None else DependencyGraph(params=self.signature)


@dataclass(frozen=True)
class ValueSpec:
    """A materializable value: structure + dtype + shape + contents.

    ``value`` holds the literal payload for scalars and 1-D sequences; tensor
    contents are a seeded-fill descriptor ``{"fill": x}`` optionally carrying
    ``{"zeros": [flat indices]}`` for boundary mutations.
    """

    param: str
    structure: str
    dtype: str
    shape: tuple[int, ...] = ()
    value: object = None

    def elements(self) -> list:
        if self.structure == "scalar":
            return [self.value]
        if self.structure in ("list", "tuple"):
            return list(self.value) if self.value is not None else []
        fill = (self.value or {}).get("fill")
        elems = [] if fill is None else [fill]
        if (self.value or {}).get("zeros"):
            elems.append(0)
        return elems

    def to_obj(self) -> dict:
        value = self.value
        if isinstance(value, tuple):
            value = list(value)
        return {
            "param": self.param,
            "structure": self.structure,
            "dtype": self.dtype,
            "shape": list(self.shape),
            "value": value,
        }

    @classmethod
    def from_obj(cls, obj: dict) -> ValueSpec:
        value = obj.get("value")
        if isinstance(value, list):
            value = tuple(value)
        return cls(
            param=obj["param"],
            structure=obj["structure"],
            dtype=obj["dtype"],
            shape=tuple(obj.get("shape", ())),
            value=value,
        )


@dataclass(frozen=True)
class Verdict:
    violations: tuple[Category, ...] = ()
    unresolved: tuple[Category, ...] = ()

    @property
    def conforms(self) -> bool:
        return not self.violations and not self.unresolved


def validate(
    values: Mapping[str, ValueSpec], constraints: ApiConstraints
) -> dict[str, Verdict]:
    """Independently check every assigned parameter against its constraints.

    Dependency references resolve against *values* itself; a reference whose
    target is not assigned yields an UNRESOLVED mark for that category rather
    than a violation.
    """
    verdicts: dict[str, Verdict] = {}
    for name, spec in values.items():
        c = constraints.params.get(name)
        if c is None or c.is_empty():
            verdicts[name] = Verdict()
            continue
        violations: list[Category] = []
        unresolved: list[Category] = []

        if c.dtypes:
            allowed, missing = _resolve_dtypes(c.dtypes, values)
            if missing:
                unresolved.append(Category.DTYPE)
            elif spec.dtype not in allowed:
                violations.append(Category.DTYPE)

        if c.structures and spec.structure not in c.structures:
            violations.append(Category.STRUCTURE)

        if c.ndims and len(spec.shape) not in c.ndims:
            violations.append(Category.NDIM)

        if c.shape is not None:
            ok = _check_shape(c.shape, spec, values, constraints.signature)
            if ok is None:
                unresolved.append(Category.SHAPE)
            elif not ok:
                violations.append(Category.SHAPE)

        if c.range is not None:
            ok = _check_range(c.range, spec, values)
            if ok is None:
                unresolved.append(Category.VALUE_RANGE)
            elif not ok:
                violations.append(Category.VALUE_RANGE)

        if c.enum is not None and not (
            spec.structure == "scalar"
            and isinstance(spec.value, (str, int, float, bool))
            and spec.value in c.enum
        ):
            violations.append(Category.VALUE_ENUM)

        verdicts[name] = Verdict(violations=tuple(violations), unresolved=tuple(unresolved))
    return verdicts


def _resolve_dtypes(
    dtypes: frozenset[str], values: Mapping[str, ValueSpec]
) -> tuple[set[str], bool]:
    allowed: set[str] = set()
    missing = False
    for d in dtypes:
        if d.startswith("&") and d.endswith(".dtype"):
            target = d[1 : -len(".dtype")]
            if target in values:
                allowed.add(values[target].dtype)
            else:
                missing = True
        else:
            allowed.add(d)
    return allowed, missing


def _check_shape(
    shape: tuple[int | str, ...] | str,
    spec: ValueSpec,
    values: Mapping[str, ValueSpec],
    signature: tuple[str, ...],
) -> bool | None:
    if isinstance(shape, str):
        target = shape[1 : -len(".shape")] if shape.endswith(".shape") else shape[1:]
        if target not in values:
            return None
        return spec.shape == values[target].shape
    if len(spec.shape) != len(shape):
        return False
    for got, term in zip(spec.shape, shape):
        if isinstance(term, int):
            if got != term:
                return False
        elif term in values:
            ref = values[term]
            if ref.structure != "scalar" or not isinstance(ref.value, int):
                return None
            if got != ref.value:
                return False
        elif term in signature:
            return None
        # Free dimension names constrain nothing.
    return True


def _check_range(
    r: Range, spec: ValueSpec, values: Mapping[str, ValueSpec]
) -> bool | None:
    low = _resolve_bound(r.low, values)
    high = _resolve_bound(r.high, values)
    if low is _UNRESOLVED or high is _UNRESOLVED:
        return None
    for element in spec.elements():
        if not isinstance(element, (int, float)) or isinstance(element, bool):
            return False
        if low is not None and (element < low or (element == low and not r.low_inclusive)):
            return False
        if high is not None and (element > high or (element == high and not r.high_inclusive)):
            return False
    return True


_UNRESOLVED = object()


def _resolve_bound(bound: float | int | str | None, values: Mapping[str, ValueSpec]):
    if bound is None or isinstance(bound, (int, float)):
        return bound
    target = bound[1:]
    ref = values.get(target)
    if ref is None or ref.structure != "scalar" or not isinstance(ref.value, (int, float)):
        return _UNRESOLVED
    return ref.value


# --- file schema -----------------------------------------------------------


def constraint_to_obj(c: ConcreteConstraint) -> dict:
    shape: object
    if isinstance(c.shape, tuple):
        shape = list(c.shape)
    else:
        shape = c.shape
    return {
        "dtype": sorted(c.dtypes),
        "structure": sorted(c.structures),
        "ndim": sorted(c.ndims),
        "shape": shape,
        "range": None
        if c.range is None
        else {
            "low": c.range.low,
            "high": c.range.high,
            "low_inclusive": c.range.low_inclusive,
            "high_inclusive": c.range.high_inclusive,
        },
        "enum": None if c.enum is None else sorted(c.enum),
    }


def constraint_from_obj(param: str, obj: Mapping) -> ConcreteConstraint:
    shape_raw = obj.get("shape")
    shape: tuple[int | str, ...] | str | None
    if isinstance(shape_raw, list):
        shape = tuple(shape_raw)
    else:
        shape = shape_raw
    range_raw = obj.get("range")
    return ConcreteConstraint(
        param=param,
        dtypes=frozenset(obj.get("dtype", ())),
        structures=frozenset(obj.get("structure", ())),
        ndims=frozenset(int(n) for n in obj.get("ndim", ())),
        shape=shape,
        range=None
        if range_raw is None
        else Range(
            low=range_raw.get("low"),
            high=range_raw.get("high"),
            low_inclusive=bool(range_raw.get("low_inclusive", True)),
            high_inclusive=bool(range_raw.get("high_inclusive", True)),
        ),
        enum=None if obj.get("enum") is None else frozenset(obj["enum"]),
    )


def annotations_to_obj(truth: Mapping[tuple[str, str], ConcreteConstraint]) -> list[dict]:
    out = []
    for (api, param), c in sorted(truth.items()):
        entry = {"api": api, "param": param}
        entry.update(constraint_to_obj(c))
        out.append(entry)
    return out


def annotations_from_obj(raw: Iterable[Mapping]) -> dict[tuple[str, str], ConcreteConstraint]:
    truth: dict[tuple[str, str], ConcreteConstraint] = {}
    for entry in raw:
        key = (entry["api"], entry["param"])
        if key in truth:
            raise ValueError(f"duplicate annotation for {key}")
        truth[key] = constraint_from_obj(entry["param"], entry)
    return truth
