// Turn value specs into concrete runtime values: scalars, strings, lists,
// tuples, and n-dimensional arrays of the exact declared shape and dtype.

import { FillDescriptor, ValueSpec } from "./protocol.js";

export const INT_DTYPES = new Set(["int", "int8", "int32", "int64", "uint8"]);
export const FLOAT_DTYPES = new Set(["float", "float16", "float32", "float64"]);

export class Tensor {
  readonly dtype: string;
  readonly shape: number[];
  readonly data: unknown[];

  constructor(dtype: string, shape: number[], data: unknown[]) {
    this.dtype = dtype;
    this.shape = shape;
    this.data = data;
  }

  get size(): number {
    return this.shape.reduce((a, b) => a * b, 1);
  }

  get ndim(): number {
    return this.shape.length;
  }

  nested(): unknown {
    const build = (dim: number, offset: number): unknown => {
      if (dim === this.shape.length) {
        return this.data[offset];
      }
      const stride = this.shape.slice(dim + 1).reduce((a, b) => a * b, 1);
      const out = [];
      for (let i = 0; i < this.shape[dim]; i++) {
        out.push(build(dim + 1, offset + i * stride));
      }
      return out;
    };
    return build(0, 0);
  }
}

export class Tuple {
  readonly items: unknown[];

  constructor(items: unknown[]) {
    this.items = items;
  }
}

function coerce(dtype: string, value: unknown): unknown {
  if (INT_DTYPES.has(dtype) && typeof value === "number") {
    return Math.trunc(value);
  }
  return value;
}

function fillData(dtype: string, shape: number[], descriptor: FillDescriptor): unknown[] {
  const total = shape.reduce((a, b) => a * b, 1);
  const data = new Array(total).fill(coerce(dtype, descriptor.fill));
  for (const index of descriptor.zeros ?? []) {
    if (index >= 0 && index < total) {
      data[index] = coerce(dtype, 0);
    }
  }
  return data;
}

export function materialize(spec: ValueSpec): unknown {
  switch (spec.structure) {
    case "scalar":
      return coerce(spec.dtype, spec.value);
    case "list":
      return (spec.value as unknown[] | null ?? []).map((v) => coerce(spec.dtype, v));
    case "tuple":
      return new Tuple((spec.value as unknown[] | null ?? []).map((v) => coerce(spec.dtype, v)));
    case "tensor": {
      const descriptor = (spec.value ?? { fill: 0 }) as FillDescriptor;
      return new Tensor(spec.dtype, spec.shape, fillData(spec.dtype, spec.shape, descriptor));
    }
    default:
      throw new Error(`unknown structure ${(spec as ValueSpec).structure}`);
  }
}

export function materializeAll(specs: ValueSpec[]): Map<string, unknown> {
  const out = new Map<string, unknown>();
  const dtypes = new Map<string, string>();
  for (const spec of specs) {
    out.set(spec.param, materialize(spec));
    dtypes.set(spec.param, spec.dtype);
  }
  return out;
}

export function dtypeOf(spec: ValueSpec): string {
  return spec.dtype;
}
