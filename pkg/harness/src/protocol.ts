// Wire protocol v1: line-delimited JSON over stdin/stdout.
//
// worker -> supervisor, first line:   {"v": 1, "target": "<id>"}
// supervisor -> worker, per record:   {"v": 1, "api": "...", "values": [ValueSpec...]}
// worker -> supervisor, per record:   {"status": "pass"} | {"status": "exception", "message": "..."}

export const PROTOCOL_VERSION = 1;

export type Structure = "scalar" | "tensor" | "list" | "tuple";

export interface ValueSpec {
  param: string;
  structure: Structure;
  dtype: string;
  shape: number[];
  value: unknown;
}

export interface FillDescriptor {
  fill: number | string | boolean | null;
  zeros?: number[];
}

export interface Record {
  v: number;
  api: string;
  values: ValueSpec[];
}

export type StatusLine =
  | { status: "pass" }
  | { status: "exception"; message: string };

export function handshakeLine(target: string): string {
  return JSON.stringify({ v: PROTOCOL_VERSION, target });
}

export function statusLine(status: StatusLine): string {
  return JSON.stringify(status);
}

export function parseRecord(line: string): Record {
  const raw = JSON.parse(line);
  if (raw.v !== PROTOCOL_VERSION) {
    throw new Error(`PROTOCOL_MISMATCH: expected v${PROTOCOL_VERSION}, got ${raw.v}`);
  }
  if (typeof raw.api !== "string" || !Array.isArray(raw.values)) {
    throw new Error("malformed record: need api and values");
  }
  return raw as Record;
}
