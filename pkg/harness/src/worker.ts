// Worker entry point: handshake, then one status line per incoming record.
//
// Stateless across records by construction; a record that reaches an injected
// fault kills the process with a genuine signal (never an in-band string), so
// the supervisor classifies crashes from the exit status alone.

import * as readline from "node:readline";

import { materializeAll } from "./materialize.js";
import { APIS, InjectedFault, ValidationError } from "./mocklib.js";
import { handshakeLine, parseRecord, statusLine } from "./protocol.js";

function die(signalName: string): never {
  switch (signalName) {
    case "ABORT":
      process.abort();
      break;
    case "SEGFAULT":
      process.kill(process.pid, "SIGSEGV");
      break;
    case "FPE":
      process.kill(process.pid, "SIGFPE");
      break;
    case "BUS":
      process.kill(process.pid, "SIGBUS");
      break;
  }
  // Signal delivery is synchronous for self-signals; this is unreachable.
  throw new Error(`failed to raise ${signalName}`);
}

function emit(line: string): void {
  process.stdout.write(line + "\n");
}

function handle(line: string): void {
  if (!line.trim()) {
    return;
  }
  let record;
  try {
    record = parseRecord(line);
  } catch (err) {
    emit(statusLine({ status: "exception", message: String((err as Error).message) }));
    return;
  }
  const target = APIS.get(record.api);
  if (target === undefined) {
    emit(statusLine({ status: "exception", message: `UNKNOWN_API ${record.api}` }));
    return;
  }
  try {
    target(materializeAll(record.values));
  } catch (err) {
    if (err instanceof InjectedFault) {
      die(err.signalName);
    }
    if (err instanceof ValidationError) {
      emit(statusLine({ status: "exception", message: err.message.slice(0, 500) }));
      return;
    }
    throw err;
  }
  emit(statusLine({ status: "pass" }));
}

function main(): void {
  const targetId = process.argv.includes("--target")
    ? process.argv[process.argv.indexOf("--target") + 1]
    : "mocklib";
  if (targetId !== "mocklib") {
    process.stderr.write(`unknown target ${targetId}\n`);
    process.exit(2);
  }
  emit(handshakeLine(targetId));
  const rl = readline.createInterface({ input: process.stdin, terminal: false });
  rl.on("line", handle);
}

main();
