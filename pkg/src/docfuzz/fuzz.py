"""Constraint-guided input generation and per-API fuzzing campaigns.

Conforming inputs (CI) satisfy every extracted constraint of every assigned
parameter; violating inputs (VI) break at least one constraint of exactly one
chosen parameter while everything else conforms.  Generation walks parameters
in dependency order so references resolve against already-drawn values.  A
baseline mode ignores constraints entirely except that array draws are
materialized as tensors.

All randomness derives from the configured seed: the (seed, constraints,
config) triple fully determines the generated sequence, independent of wall
clock or scheduling.
"""

from __future__ import annotations

import hashlib
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Mapping

from docfuzz.artifacts import dump_canonical
from docfuzz.constraints import (
    ApiConstraints,
    Category,
    ConcreteConstraint,
    Range,
    ValueSpec,
    topo_order,
    validate,
)
from docfuzz.evaluator import TIMEOUT, HarnessError, Outcome, is_bug

__all__ = [
    "BOUNDARY_MUTATORS",
    "CampaignReport",
    "GeneratedInput",
    "GenerationError",
    "GeneratorConfig",
    "campaign",
    "generate",
    "generate_baseline",
]

CI = "CI"
VI = "VI"
BASELINE = "BASELINE"

BOUNDARY_MUTATORS = (
    "CONSTRAINT_BOUNDARY",
    "NONE_VALUE",
    "ZERO",
    "ZERO_DIMENSION",
    "EMPTY_LIST",
    "EMPTY_STRING",
)

INT32_MIN, INT32_MAX = -(2**31), 2**31 - 1
_DTYPE_UNIVERSE = ("bool", "float32", "float64", "int32", "int64", "string")
_STRUCTURES = ("scalar", "tensor", "list", "tuple")
_STRING_ALPHABET = "abcdefgh0123"

_INT_DTYPES = frozenset({"int", "int8", "int32", "int64", "uint8"})
_FLOAT_DTYPES = frozenset({"float", "float16", "float32", "float64"})


class GenerationError(ValueError):
    """Raised when a parameter's constraints cannot be satisfied together."""


@dataclass(frozen=True)
class GeneratorConfig:
    max_iter: int = 2000
    conform_ratio: float = 0.5
    optional_ratio: float = 0.2
    mutation_p: float = 0.4
    seed: int = 0
    dims_range: tuple[int, int] = (0, 5)
    default_dtypes: tuple[str, ...] = ("float32", "float64", "int32", "int64", "bool", "string")
    timeout_ms: int = 10_000

    def __post_init__(self) -> None:
        for name in ("conform_ratio", "optional_ratio", "mutation_p"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        lo, hi = self.dims_range
        if not 0 <= lo <= hi:
            raise ValueError(f"dims_range must satisfy 0 <= lo <= hi, got {self.dims_range}")

    def to_obj(self) -> dict:
        return {
            "max_iter": self.max_iter,
            "conform_ratio": self.conform_ratio,
            "optional_ratio": self.optional_ratio,
            "mutation_p": self.mutation_p,
            "seed": self.seed,
            "dims_range": list(self.dims_range),
            "default_dtypes": list(self.default_dtypes),
            "timeout_ms": self.timeout_ms,
        }


@dataclass(frozen=True)
class GeneratedInput:
    api: str
    values: dict[str, ValueSpec]
    mode: str
    violated_param: str | None = None
    mutator_applied: str | None = None

    def to_record(self) -> dict:
        return {
            "api": self.api,
            "values": [self.values[name].to_obj() for name in self.values],
        }

    def to_obj(self) -> dict:
        return {
            "api": self.api,
            "mode": self.mode,
            "violated_param": self.violated_param,
            "mutator": self.mutator_applied,
            "values": [self.values[name].to_obj() for name in self.values],
        }


def _api_rng(seed: int, api: str, flavor: str) -> random.Random:
    digest = hashlib.sha256(f"{seed}:{api}:{flavor}".encode()).digest()
    return random.Random(int.from_bytes(digest[:8], "big"))


# --- primitive draws ---------------------------------------------------------


def _draw_int(rng: random.Random, low: int | None, high: int | None) -> int:
    lo = INT32_MIN if low is None else low
    hi = INT32_MAX if high is None else high
    if lo > hi:
        raise GenerationError(f"empty integer range [{lo}, {hi}]")
    # Extra mass on small and extreme values: boundary inputs find the bugs.
    if rng.random() < 0.10:
        specials = [v for v in (-1, 0, 1, lo, hi) if lo <= v <= hi]
        return rng.choice(specials)
    return rng.randint(lo, hi)


def _draw_float(rng: random.Random, low: float | None, high: float | None) -> float:
    if low is not None and high is not None:
        if rng.random() < 0.10:
            return rng.choice([low, high, (low + high) / 2.0])
        return low + rng.random() * (high - low)
    if rng.random() < 0.05:
        return rng.choice([0.0, 1.0, -1.0])
    magnitude = 10.0 ** rng.uniform(-38, 38)
    value = magnitude if rng.random() < 0.5 else -magnitude
    if low is not None and value < low:
        return low + abs(value) if abs(value) < 1e37 else low + 1.0
    if high is not None and value > high:
        return high - abs(value) if abs(value) < 1e37 else high - 1.0
    return value


def _draw_string(rng: random.Random) -> str:
    return "".join(rng.choice(_STRING_ALPHABET) for _ in range(rng.randint(0, 8)))


def _draw_scalar(rng: random.Random, dtype: str, bounds: tuple | None) -> object:
    low, high = bounds if bounds else (None, None)
    if dtype in _INT_DTYPES:
        ilow = None if low is None else _ceil_int(low)
        ihigh = None if high is None else _floor_int(high)
        return _draw_int(rng, ilow, ihigh)
    if dtype in _FLOAT_DTYPES:
        return _draw_float(rng, low, high)
    if dtype == "bool":
        return rng.random() < 0.5
    if dtype == "string":
        return _draw_string(rng)
    return _draw_float(rng, low, high)


def _ceil_int(v: float) -> int:
    return int(v) if float(v).is_integer() else int(v) + (1 if v > 0 else 0)


def _floor_int(v: float) -> int:
    return int(v) if float(v).is_integer() else int(v) - (1 if v < 0 else 0)


def _numeric_bounds(
    r: Range | None, values: Mapping[str, ValueSpec]
) -> tuple[float | None, float | None] | None:
    """Resolve range endpoints; exclusive endpoints nudge inward by one ulp-ish step."""
    if r is None:
        return None
    low = _bound_value(r.low, values)
    high = _bound_value(r.high, values)
    if low is not None and not r.low_inclusive:
        low = low + (1 if isinstance(low, int) else abs(low) * 1e-6 + 1e-9)
    if high is not None and not r.high_inclusive:
        high = high - (1 if isinstance(high, int) else abs(high) * 1e-6 + 1e-9)
    return (low, high)


def _bound_value(bound, values: Mapping[str, ValueSpec]):
    if bound is None or isinstance(bound, (int, float)):
        return bound
    ref = values.get(bound[1:])
    if ref is not None and ref.structure == "scalar" and isinstance(ref.value, (int, float)):
        return ref.value
    return None


# --- conforming generation ---------------------------------------------------


class _Generator:
    def __init__(self, constraints: ApiConstraints, cfg: GeneratorConfig, rng: random.Random):
        self.constraints = constraints
        self.cfg = cfg
        self.rng = rng

    def draw_dims(self, n: int) -> tuple[int, ...]:
        return tuple(self.rng.randint(0, 8) for _ in range(n))

    def included_params(self) -> list[str]:
        """Required params, optional ones by lot, plus forced dependency sources."""
        chosen = set()
        for name in self.constraints.signature:
            if name not in self.constraints.optional or self.rng.random() < self.cfg.optional_ratio:
                chosen.add(name)
        # Pull in everything a chosen parameter's constraints reference, so
        # dependency lookups always resolve.
        changed = True
        while changed:
            changed = False
            for name in list(chosen):
                c = self.constraints.params.get(name)
                if c is None:
                    continue
                for target in _reference_targets(c):
                    if target in self.constraints.params or target in self.constraints.signature:
                        if target not in chosen:
                            chosen.add(target)
                            changed = True
        order = topo_order(self.constraints.graph_or_empty()).order
        return [p for p in order if p in chosen]

    def conforming_spec(self, name: str, values: dict[str, ValueSpec]) -> ValueSpec:
        c = self.constraints.params.get(name)
        if c is None or c.is_empty():
            return self.unconstrained_spec(name)
        _reject_unsatisfiable(name, c)

        if c.enum is not None:
            return ValueSpec(
                param=name, structure="scalar", dtype="string", shape=(),
                value=self.rng.choice(sorted(c.enum)),
            )

        structure = self._choose_structure(c)
        dtype = self._choose_dtype(c, values, structure)
        shape = self._choose_shape(c, values, structure)
        bounds = _numeric_bounds(c.range, values)
        return self._fill(name, structure, dtype, shape, bounds)

    def unconstrained_spec(self, name: str) -> ValueSpec:
        structure = self.rng.choice(_STRUCTURES)
        dtype = self.rng.choice(self.cfg.default_dtypes)
        if structure == "scalar":
            shape: tuple[int, ...] = ()
        elif structure == "tensor":
            shape = self.draw_dims(self.rng.randint(*self.cfg.dims_range))
        else:
            shape = (self.rng.randint(1, 4),)
        return self._fill(name, structure, dtype, shape, None)

    def _choose_structure(self, c: ConcreteConstraint) -> str:
        if c.structures:
            return self.rng.choice(sorted(c.structures))
        if c.shape is not None or c.ndims - {0}:
            return "tensor"
        if c.range is not None or c.ndims == {0}:
            return "scalar"
        return self.rng.choice(_STRUCTURES)

    def _choose_dtype(
        self, c: ConcreteConstraint, values: Mapping[str, ValueSpec], structure: str
    ) -> str:
        options: list[str] = []
        for d in sorted(c.dtypes):
            if d.startswith("&") and d.endswith(".dtype"):
                ref = values.get(d[1 : -len(".dtype")])
                if ref is not None:
                    options.append(ref.dtype)
            else:
                options.append(d)
        if not options:
            options = list(self.cfg.default_dtypes)
            if c.range is not None:
                options = [d for d in options if d in _INT_DTYPES | _FLOAT_DTYPES] or ["float32"]
        return self.rng.choice(sorted(set(options)))

    def _choose_shape(
        self, c: ConcreteConstraint, values: Mapping[str, ValueSpec], structure: str
    ) -> tuple[int, ...]:
        if structure == "scalar":
            return ()
        if isinstance(c.shape, str):
            ref = values.get(c.shape[1 : -len(".shape")])
            if ref is not None:
                return ref.shape
            return self.draw_dims(self.rng.randint(*self.cfg.dims_range))
        if isinstance(c.shape, tuple):
            dims = []
            for term in c.shape:
                if isinstance(term, int):
                    dims.append(term)
                else:
                    ref = values.get(term)
                    if ref is not None and isinstance(ref.value, int):
                        dims.append(max(0, ref.value))
                    else:
                        dims.append(self.rng.randint(0, 8))
            return tuple(dims)
        if c.ndims:
            n = self.rng.choice(sorted(c.ndims))
            return self.draw_dims(n)
        if structure in ("list", "tuple"):
            return (self.rng.randint(1, 4),)
        return self.draw_dims(self.rng.randint(*self.cfg.dims_range))

    def _fill(
        self,
        name: str,
        structure: str,
        dtype: str,
        shape: tuple[int, ...],
        bounds: tuple | None,
    ) -> ValueSpec:
        if structure == "scalar":
            return ValueSpec(
                param=name, structure=structure, dtype=dtype, shape=(),
                value=_draw_scalar(self.rng, dtype, bounds),
            )
        if structure in ("list", "tuple"):
            length = shape[0] if shape else 0
            value = tuple(_draw_scalar(self.rng, dtype, bounds) for _ in range(length))
            return ValueSpec(
                param=name, structure=structure, dtype=dtype, shape=(len(value),), value=value
            )
        fill = _draw_scalar(self.rng, dtype, bounds)
        return ValueSpec(
            param=name, structure="tensor", dtype=dtype, shape=shape, value={"fill": fill}
        )

    # --- violations ----------------------------------------------------------

    def violating_spec(self, name: str, values: dict[str, ValueSpec]) -> ValueSpec:
        c = self.constraints.params[name]
        categories = sorted(
            cat.value
            for cat in _violable_categories(c)
        )
        target = self.rng.choice(categories)
        base = self.conforming_spec(name, values)

        if target == Category.DTYPE.value:
            allowed = {
                values[d[1 : -len(".dtype")]].dtype if d.startswith("&") else d
                for d in c.dtypes
                if not d.startswith("&") or d[1 : -len(".dtype")] in values
            }
            bad = [d for d in _DTYPE_UNIVERSE if d not in allowed]
            return replace(base, dtype=self.rng.choice(bad))
        if target == Category.STRUCTURE.value:
            bad = [s for s in _STRUCTURES if s not in c.structures]
            structure = self.rng.choice(bad)
            spec = self._fill(name, structure, base.dtype, base.shape or (2,), None)
            return spec
        if target == Category.NDIM.value:
            options = [n for n in range(0, 7) if n not in c.ndims]
            n = self.rng.choice(options)
            shape = self.draw_dims(n)
            if base.structure == "scalar":
                return self._fill(name, "tensor", base.dtype, shape, None)
            return replace(base, shape=shape, value={"fill": 1} if base.structure == "tensor" else tuple())
        if target == Category.SHAPE.value:
            shape = base.shape if base.shape else (1,)
            idx = self.rng.randrange(len(shape))
            bumped = tuple(d + 1 if i == idx else d for i, d in enumerate(shape))
            if base.structure in ("list", "tuple"):
                value = tuple(
                    _draw_scalar(self.rng, base.dtype, None) for _ in range(bumped[0])
                )
                return replace(base, shape=bumped, value=value)
            if base.structure == "scalar":
                return self._fill(name, "tensor", base.dtype, bumped, None)
            return replace(base, shape=bumped)
        if target == Category.VALUE_RANGE.value:
            bounds = _numeric_bounds(c.range, values) or (None, None)
            low, high = bounds
            candidates: list[object] = []
            if low is not None:
                candidates.append(low - 1 if isinstance(low, int) else low - max(1.0, abs(low)))
            if high is not None:
                candidates.append(high + 1 if isinstance(high, int) else high + max(1.0, abs(high)))
            if not candidates:
                candidates.append("#not-numeric")  # unbounded range: break the type instead
            bad_value = self.rng.choice(candidates)
            if base.structure == "scalar":
                return replace(base, value=bad_value)
            if base.structure in ("list", "tuple"):
                length = max(1, base.shape[0] if base.shape else 1)
                return replace(base, shape=(length,), value=tuple([bad_value] * length))
            return replace(base, value={"fill": bad_value})
        # VALUE_ENUM: anything outside the member set.
        assert c.enum is not None
        invalid = "#invalid"
        while invalid in c.enum:
            invalid += self.rng.choice(_STRING_ALPHABET)
        return ValueSpec(param=name, structure="scalar", dtype="string", shape=(), value=invalid)

    # --- boundary mutators ----------------------------------------------------

    def apply_mutator(
        self, spec: ValueSpec, mutator: str, c: ConcreteConstraint | None,
        values: Mapping[str, ValueSpec],
    ) -> ValueSpec | None:
        numeric = spec.dtype in _INT_DTYPES | _FLOAT_DTYPES
        if mutator == "CONSTRAINT_BOUNDARY":
            candidates: list[object] = []
            if c is not None and c.range is not None:
                bounds = _numeric_bounds(c.range, values)
                if bounds:
                    for b in bounds:
                        if b is not None:
                            candidates.extend([b, b + 1, b - 1])
            if spec.dtype in _INT_DTYPES:
                candidates.extend([INT32_MIN, 0, INT32_MAX])
            candidates = [v for v in candidates if isinstance(v, (int, float))]
            if not candidates or not numeric:
                return None
            value = self.rng.choice(sorted(set(map(float, candidates))))
            if spec.dtype in _INT_DTYPES:
                value = int(value)
            return _with_scalar(spec, value)
        if mutator == "NONE_VALUE":
            return ValueSpec(param=spec.param, structure="scalar", dtype="none", shape=(), value=None)
        if mutator == "ZERO":
            if not numeric:
                return None
            return _with_zero(spec, self.rng)
        if mutator == "ZERO_DIMENSION":
            if not spec.shape:
                return None
            idx = self.rng.randrange(len(spec.shape))
            shape = tuple(0 if i == idx else d for i, d in enumerate(spec.shape))
            if spec.structure in ("list", "tuple"):
                return replace(spec, shape=(0,), value=tuple())
            return replace(spec, shape=shape)
        if mutator == "EMPTY_LIST":
            if spec.structure not in ("list", "tuple"):
                return None
            return replace(spec, shape=(0,), value=tuple())
        if mutator == "EMPTY_STRING":
            if spec.dtype != "string" or spec.structure != "scalar":
                return None
            return replace(spec, value="")
        return None


def _with_scalar(spec: ValueSpec, value: object) -> ValueSpec:
    if spec.structure == "scalar":
        return replace(spec, value=value)
    if spec.structure in ("list", "tuple"):
        length = max(1, spec.shape[0] if spec.shape else 1)
        return replace(spec, shape=(length,), value=tuple([value] * length))
    return replace(spec, value={"fill": value})


def _with_zero(spec: ValueSpec, rng: random.Random) -> ValueSpec:
    zero = 0 if spec.dtype in _INT_DTYPES else 0.0
    if spec.structure == "scalar":
        return replace(spec, value=zero)
    if spec.structure in ("list", "tuple"):
        values = list(spec.value or (zero,))
        if not values:
            values = [zero]
        values[rng.randrange(len(values))] = zero
        return replace(spec, shape=(len(values),), value=tuple(values))
    total = 1
    for d in spec.shape:
        total *= d
    payload = dict(spec.value or {"fill": 1})
    if total > 0:
        payload["zeros"] = [rng.randrange(total)]
    else:
        payload["fill"] = zero
    return replace(spec, value=payload)


def _reference_targets(c: ConcreteConstraint) -> set[str]:
    targets: set[str] = set()
    for d in c.dtypes:
        if d.startswith("&") and d.endswith(".dtype"):
            targets.add(d[1 : -len(".dtype")])
    if isinstance(c.shape, str):
        targets.add(c.shape[1 : -len(".shape")])
    elif c.shape is not None:
        targets.update(t for t in c.shape if isinstance(t, str))
    if c.range is not None:
        for bound in (c.range.low, c.range.high):
            if isinstance(bound, str):
                targets.add(bound[1:])
    return targets


def _violable_categories(c: ConcreteConstraint) -> list[Category]:
    cats: list[Category] = []
    if c.dtypes:
        cats.append(Category.DTYPE)
    if c.structures:
        cats.append(Category.STRUCTURE)
    if c.ndims:
        cats.append(Category.NDIM)
    if c.shape is not None and not isinstance(c.shape, str):
        cats.append(Category.SHAPE)
    if c.range is not None:
        cats.append(Category.VALUE_RANGE)
    if c.enum is not None:
        cats.append(Category.VALUE_ENUM)
    return cats


def _reject_unsatisfiable(name: str, c: ConcreteConstraint) -> None:
    if c.enum is not None and c.range is not None:
        raise GenerationError(
            f"parameter {name!r}: enumerated string values cannot satisfy a numeric range"
        )
    if c.structures == {"scalar"} and (c.ndims - {0} or isinstance(c.shape, tuple) and c.shape):
        raise GenerationError(
            f"parameter {name!r}: scalar structure conflicts with a multi-dimensional shape"
        )


def _vi_candidates(constraints: ApiConstraints) -> list[str]:
    """Parameters eligible to carry the violation.

    Parameters whose *value* other constraints read (shape terms, range
    bounds) are excluded when alternatives exist, as are enum-only parameters
    (a violated enum is trivially rejected at the first check).
    """
    constrained = [
        name
        for name in constraints.signature
        if name in constraints.params
        and not constraints.params[name].is_empty()
        and _violable_categories(constraints.params[name])
    ]
    if not constrained:
        return []
    value_referenced: set[str] = set()
    for c in constraints.params.values():
        if isinstance(c.shape, tuple):
            value_referenced.update(t for t in c.shape if isinstance(t, str))
        if c.range is not None:
            for bound in (c.range.low, c.range.high):
                if isinstance(bound, str):
                    value_referenced.add(bound[1:])
    preferred = [
        name
        for name in constrained
        if name not in value_referenced
        and _violable_categories(constraints.params[name]) != [Category.VALUE_ENUM]
    ]
    return preferred or constrained


def generate(
    constraints: ApiConstraints,
    cfg: GeneratorConfig,
    mode: str,
    rng: random.Random | None = None,
) -> GeneratedInput:
    """Draw one input for *constraints* in the given mode (CI or VI)."""
    if rng is None:
        rng = _api_rng(cfg.seed, constraints.api, "single")
    gen = _Generator(constraints, cfg, rng)
    included = gen.included_params()

    violated: str | None = None
    if mode == VI:
        candidates = _vi_candidates(constraints)
        if not candidates:
            raise GenerationError(f"{constraints.api}: no constrained parameter to violate")
        violated = rng.choice(candidates)
        if violated not in included:
            included = [
                p
                for p in topo_order(constraints.graph_or_empty()).order
                if p in set(included) | {violated}
            ]

    values: dict[str, ValueSpec] = {}
    for name in included:
        if name == violated:
            values[name] = gen.violating_spec(name, values)
        else:
            values[name] = gen.conforming_spec(name, values)

    mutator: str | None = None
    if values and rng.random() < cfg.mutation_p:
        mutator = _mutate(gen, values, violated, mode, rng)

    ordered = {
        name: values[name] for name in constraints.signature if name in values
    }
    return GeneratedInput(
        api=constraints.api,
        values=ordered,
        mode=mode,
        violated_param=violated,
        mutator_applied=mutator,
    )


def _mutate(
    gen: _Generator,
    values: dict[str, ValueSpec],
    violated: str | None,
    mode: str,
    rng: random.Random,
) -> str | None:
    if mode == VI:
        # Keep the single-fault property: only the violated parameter may be
        # mutated, and the mutation must not cancel its violation.
        name = violated
        if name is None:
            return None
        order = rng.sample(BOUNDARY_MUTATORS, len(BOUNDARY_MUTATORS))
        for mutator in order:
            candidate = gen.apply_mutator(
                values[name], mutator, gen.constraints.params.get(name), values
            )
            if candidate is None:
                continue
            trial = dict(values)
            trial[name] = candidate
            verdicts = validate(trial, gen.constraints)
            others_ok = all(v.conforms for p, v in verdicts.items() if p != name)
            if not verdicts[name].conforms and others_ok:
                values[name] = candidate
                return mutator
        return None

    name = rng.choice(sorted(values))
    order = rng.sample(BOUNDARY_MUTATORS, len(BOUNDARY_MUTATORS))
    for mutator in order:
        candidate = gen.apply_mutator(
            values[name], mutator, gen.constraints.params.get(name), values
        )
        if candidate is None:
            continue
        trial = dict(values)
        trial[name] = candidate
        verdicts = validate(trial, gen.constraints)
        if all(v.conforms for v in verdicts.values()):
            values[name] = candidate
            return mutator
    return None


def generate_baseline(
    constraints: ApiConstraints,
    cfg: GeneratorConfig,
    rng: random.Random | None = None,
) -> GeneratedInput:
    """Unguided draw: random structure/dtype/shape/values for every parameter.

    The single concession is that array-valued draws become tensors, so the
    baseline is not trivially rejected by tensor-typed APIs.
    """
    if rng is None:
        rng = _api_rng(cfg.seed, constraints.api, "baseline-single")
    values: dict[str, ValueSpec] = {}
    for name in constraints.signature:
        if name in constraints.optional and rng.random() >= cfg.optional_ratio:
            continue
        ndim = rng.randint(*cfg.dims_range)
        dtype = rng.choice(cfg.default_dtypes)
        if ndim == 0:
            values[name] = ValueSpec(
                param=name, structure="scalar", dtype=dtype, shape=(),
                value=_draw_scalar(rng, dtype, None),
            )
        else:
            shape = tuple(rng.randint(0, 8) for _ in range(ndim))
            values[name] = ValueSpec(
                param=name, structure="tensor", dtype=dtype, shape=shape,
                value={"fill": _draw_scalar(rng, dtype, None)},
            )
    return GeneratedInput(api=constraints.api, values=values, mode=BASELINE)


# --- campaigns ---------------------------------------------------------------


@dataclass
class ApiCampaignResult:
    api: str
    counts: dict[str, int] = field(default_factory=dict)
    modes: dict[str, int] = field(default_factory=dict)
    bugs: list[dict] = field(default_factory=list)
    executed: int = 0
    passed: int = 0
    aborted: str | None = None

    @property
    def passing_ratio(self) -> float:
        return self.passed / self.executed if self.executed else 0.0

    def to_obj(self) -> dict:
        return {
            "api": self.api,
            "counts": dict(sorted(self.counts.items())),
            "modes": dict(sorted(self.modes.items())),
            "executed": self.executed,
            "passed": self.passed,
            "passing_ratio": self.passing_ratio,
            "bugs": self.bugs,
            "aborted": self.aborted,
        }


@dataclass
class CampaignReport:
    apis: dict[str, ApiCampaignResult]
    config: GeneratorConfig
    baseline: bool

    @property
    def total_bugs(self) -> int:
        return sum(len(r.bugs) for r in self.apis.values())

    def passing_ratio(self) -> float:
        executed = sum(r.executed for r in self.apis.values())
        passed = sum(r.passed for r in self.apis.values())
        return passed / executed if executed else 0.0

    def to_obj(self) -> dict:
        return {
            "baseline": self.baseline,
            "config": self.config.to_obj(),
            "apis": {api: r.to_obj() for api, r in sorted(self.apis.items())},
            "total_bugs": self.total_bugs,
            "passing_ratio": self.passing_ratio(),
        }


def campaign(
    constraints_by_api: Mapping[str, ApiConstraints],
    cfg: GeneratorConfig,
    evaluator,
    apis: Iterable[str] | None = None,
    baseline: bool = False,
    findings_dir: str | None = None,
    jobs: int = 1,
    harness_failure_limit: int = 5,
) -> CampaignReport:
    """Fuzz each API with ``cfg.max_iter`` inputs and classify every outcome.

    The CI/VI split is exactly ``round(conform_ratio * max_iter)`` conforming
    inputs, the remainder violating.  Bug-triggering inputs are archived under
    ``findings_dir/<api>/<iteration>`` with their seed, mode, and mutator.
    More than ``harness_failure_limit`` consecutive harness-level failures
    abort that API's campaign with a diagnostic.

    The ``evaluator`` is any harness handle exposing
    ``run(record, timeout_scale=1.0) -> Outcome``.
    """
    selected = sorted(apis) if apis is not None else sorted(constraints_by_api)

    def run_api(api: str) -> ApiCampaignResult:
        return _run_api_campaign(
            constraints_by_api[api], cfg, evaluator, baseline,
            findings_dir, harness_failure_limit,
        )

    results: dict[str, ApiCampaignResult] = {}
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            for api, result in zip(selected, pool.map(run_api, selected)):
                results[api] = result
    else:
        for api in selected:
            results[api] = run_api(api)
    return CampaignReport(apis=results, config=cfg, baseline=baseline)


def _run_api_campaign(
    constraints: ApiConstraints,
    cfg: GeneratorConfig,
    evaluator,
    baseline: bool,
    findings_dir: str | None,
    harness_failure_limit: int,
) -> ApiCampaignResult:
    flavor = "baseline" if baseline else "guided"
    rng = _api_rng(cfg.seed, constraints.api, flavor)
    result = ApiCampaignResult(api=constraints.api)

    n_ci = int(round(cfg.conform_ratio * cfg.max_iter))
    if baseline:
        modes = [BASELINE] * cfg.max_iter
    else:
        modes = [CI] * n_ci + [VI] * (cfg.max_iter - n_ci)

    consecutive_failures = 0
    for iteration, mode in enumerate(modes):
        if baseline:
            generated = generate_baseline(constraints, cfg, rng)
        else:
            generated = generate(constraints, cfg, mode, rng)
        result.modes[generated.mode] = result.modes.get(generated.mode, 0) + 1
        record = generated.to_record()
        try:
            outcome = evaluator.run(record)
            if outcome.kind == TIMEOUT:
                retry = evaluator.run(record, timeout_scale=10.0)
                outcome = (
                    replace(retry, after_retry=True) if retry.kind == TIMEOUT else retry
                )
            consecutive_failures = 0
        except HarnessError as exc:
            consecutive_failures += 1
            if consecutive_failures > harness_failure_limit:
                result.aborted = (
                    f"aborted after {consecutive_failures} consecutive harness failures: {exc}"
                )
                break
            continue

        result.executed += 1
        result.counts[outcome.kind] = result.counts.get(outcome.kind, 0) + 1
        if outcome.kind == "PASS":
            result.passed += 1
        if is_bug(outcome):
            bug = {
                "iteration": iteration,
                "mode": generated.mode,
                "mutator": generated.mutator_applied,
                "violated_param": generated.violated_param,
                "kind": outcome.kind,
                "signal": outcome.crash_signal,
            }
            result.bugs.append(bug)
            if findings_dir is not None:
                _persist_finding(findings_dir, constraints.api, iteration, cfg, generated, outcome)
    return result


def _persist_finding(
    findings_dir: str,
    api: str,
    iteration: int,
    cfg: GeneratorConfig,
    generated: GeneratedInput,
    outcome: Outcome,
) -> None:
    root = Path(findings_dir) / api / str(iteration)
    root.mkdir(parents=True, exist_ok=True)
    dump_canonical(generated.to_obj(), root / "input.json")
    dump_canonical(outcome.to_obj(), root / "outcome.json")
    dump_canonical(
        {
            "api": api,
            "iteration": iteration,
            "seed": cfg.seed,
            "mode": generated.mode,
            "mutator": generated.mutator_applied,
            "violated_param": generated.violated_param,
            "replay": generated.to_record(),
        },
        root / "meta.json",
    )
