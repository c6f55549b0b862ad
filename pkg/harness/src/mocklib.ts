// Mock DL-style target library: every entry point validates its inputs the
// way a real kernel would (raising ValidationError for bad arguments) and
// carries one injected deep fault reachable only past all of the gates.
// Faults are signalled to the worker layer as InjectedFault; the worker turns
// them into genuine process-level deaths.

import { Tensor } from "./materialize.js";

export class ValidationError extends Error {}

export class InjectedFault extends Error {
  readonly signalName: string;

  constructor(signalName: string) {
    super(`injected fault (${signalName})`);
    this.signalName = signalName;
  }
}

type Args = Map<string, unknown>;

function need(args: Args, name: string): unknown {
  if (!args.has(name)) {
    throw new ValidationError(`missing required argument '${name}'`);
  }
  return args.get(name);
}

function asTensor(value: unknown, name: string, dtypes?: string[], ndim?: number): Tensor {
  if (!(value instanceof Tensor)) {
    throw new ValidationError(`${name} must be a tensor`);
  }
  if (dtypes && !dtypes.includes(value.dtype)) {
    throw new ValidationError(`${name} has dtype ${value.dtype}, expected ${dtypes.join("|")}`);
  }
  if (ndim !== undefined && value.ndim !== ndim) {
    throw new ValidationError(`${name} must be ${ndim}-dimensional, got ${value.ndim}`);
  }
  return value;
}

function asIntList(value: unknown, name: string): number[] {
  if (!Array.isArray(value)) {
    throw new ValidationError(`${name} must be a list`);
  }
  for (const item of value) {
    if (typeof item !== "number" || !Number.isInteger(item)) {
      throw new ValidationError(`${name} must hold integers`);
    }
  }
  return value as number[];
}

function asNumber(value: unknown, name: string, low?: number, high?: number): number {
  if (typeof value !== "number" || Number.isNaN(value)) {
    throw new ValidationError(`${name} must be a number`);
  }
  if (low !== undefined && value < low) {
    throw new ValidationError(`${name} below ${low}`);
  }
  if (high !== undefined && value > high) {
    throw new ValidationError(`${name} above ${high}`);
  }
  return value;
}

function asInteger(value: unknown, name: string, low?: number): number {
  const n = asNumber(value, name, low);
  if (!Number.isInteger(n)) {
    throw new ValidationError(`${name} must be an integer`);
  }
  return n;
}

function asEnum(value: unknown, name: string, members: string[]): string {
  if (typeof value !== "string" || !members.includes(value)) {
    throw new ValidationError(`${name} must be one of ${members.join(", ")}`);
  }
  return value;
}

export function pool3d(args: Args): void {
  asTensor(need(args, "data"), "data", ["float32"], 5);
  const ksize = asIntList(need(args, "ksize"), "ksize");
  if (args.has("strides")) {
    asIntList(args.get("strides"), "strides");
  }
  asEnum(need(args, "padding"), "padding", ["VALID", "SAME"]);
  // Bug: the pooling window volume is divided by without a zero check.
  const volume = ksize.reduce((a, b) => a * b, 1);
  if (volume === 0) {
    throw new InjectedFault("FPE");
  }
}

export function scale(args: Args): void {
  asTensor(need(args, "data"), "data", ["float32", "float64"]);
  const alpha = asNumber(need(args, "alpha"), "alpha", 0, 1);
  asEnum(need(args, "mode"), "mode", ["UP", "DOWN"]);
  // Bug: 1/alpha is computed before the zero case is handled.
  if (alpha === 0) {
    throw new InjectedFault("FPE");
  }
}

export function oneHot(args: Args): void {
  asTensor(need(args, "indices"), "indices", ["int32"]);
  const depth = asInteger(need(args, "depth"), "depth", 0);
  // Bug: a zero-width table aborts during allocation.
  if (depth === 0) {
    throw new InjectedFault("ABORT");
  }
}

export function quantize(args: Args): void {
  const data = asTensor(need(args, "data"), "data", ["float32"]);
  const axis = asInteger(need(args, "axis"), "axis", -1);
  asEnum(need(args, "mode"), "mode", ["HALF_UP", "HALF_EVEN"]);
  // Bug: the axis is never checked against the rank.
  if (axis > data.ndim) {
    throw new InjectedFault("SEGFAULT");
  }
}

export function residualAdd(args: Args): void {
  const x = asTensor(need(args, "x"), "x", ["float32"], 2);
  const y = asTensor(need(args, "y"), "y");
  if (x.shape.length !== y.shape.length || !x.shape.every((d, i) => d === y.shape[i])) {
    throw new ValidationError("y must have the same shape as x");
  }
  if (y.dtype !== x.dtype) {
    throw new ValidationError("y must have the same dtype as x");
  }
  // Bug: zero-sized dimensions walk off the buffer.
  if (x.shape.includes(0)) {
    throw new InjectedFault("SEGFAULT");
  }
}

export function identity(args: Args): void {
  need(args, "x");
}

export function slowOp(args: Args): void {
  const seconds = asNumber(need(args, "data"), "data", 0, 1);
  const ms = Math.min(Math.max(seconds, 0), 3) * 1000;
  // Synchronous sleep: slow but correct.
  Atomics.wait(new Int32Array(new SharedArrayBuffer(4)), 0, 0, ms);
}

export function movingAverage(args: Args): void {
  need(args, "value");
  asNumber(need(args, "momentum"), "momentum");
}

export function interp(args: Args): void {
  need(args, "data");
}

export const APIS: ReadonlyMap<string, (args: Args) => void> = new Map([
  ["mocklib.pool3d", pool3d],
  ["mocklib.scale", scale],
  ["mocklib.one_hot", oneHot],
  ["mocklib.quantize", quantize],
  ["mocklib.residual_add", residualAdd],
  ["mocklib.identity", identity],
  ["mocklib.slow_op", slowOp],
  ["mocklib.moving_average", movingAverage],
  ["mocklib.interp", interp],
]);

// The deep bugs behind the validation gates, for test bookkeeping.
export const INJECTED_BUGS: ReadonlyMap<string, string> = new Map([
  ["mocklib.pool3d", "FPE"],
  ["mocklib.scale", "FPE"],
  ["mocklib.one_hot", "ABORT"],
  ["mocklib.quantize", "SEGFAULT"],
  ["mocklib.residual_add", "SEGFAULT"],
]);
