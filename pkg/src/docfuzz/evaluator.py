"""Target invocation supervision and outcome classification.

Wire protocol v1, line-delimited JSON over the worker's stdin/stdout:

* worker -> supervisor, first line: ``{"v": 1, "target": "<id>"}``
* supervisor -> worker, one record per invocation:
  ``{"v": 1, "api": "<name>", "values": [<ValueSpec>...]}``
* worker -> supervisor, per record: ``{"status": "pass"}`` or
  ``{"status": "exception", "message": "..."}``

Crash detection never trusts in-band messages: a worker process that dies by
signal is classified from its termination status.  The default evaluator
spawns one process per invocation so a crash can never contaminate the next
classification; a streaming variant amortizes process startup across records
(the worker contract requires statelessness across records) and respawns
after every crash or timeout.
"""

from __future__ import annotations

import json
import select
import signal
import subprocess
import time
from dataclasses import dataclass, replace

__all__ = [
    "HarnessError",
    "Outcome",
    "PROTOCOL_VERSION",
    "StreamingSubprocessEvaluator",
    "SubprocessEvaluator",
    "TargetProfile",
    "evaluate",
    "evaluate_with_retry",
    "is_bug",
]

PROTOCOL_VERSION = 1

PASS = "PASS"
EXCEPTION = "EXCEPTION"
TIMEOUT = "TIMEOUT"
CRASH = "CRASH"

_SIGNAL_NAMES = {
    signal.SIGSEGV: "SEGFAULT",
    signal.SIGFPE: "FPE",
    signal.SIGABRT: "ABORT",
    signal.SIGBUS: "BUS",
}

_MESSAGE_LIMIT = 500


class HarnessError(RuntimeError):
    """Worker missing, protocol desync, or other harness-level failure.

    Distinct from target outcomes: a harness error means the measurement
    apparatus broke, not that the target misbehaved.
    """


@dataclass(frozen=True)
class Outcome:
    kind: str
    crash_signal: str | None = None
    message: str = ""
    duration_ms: float = 0.0
    after_retry: bool = False
    raw_signal: int | None = None

    def __post_init__(self) -> None:
        if (self.kind == CRASH) != (self.crash_signal is not None):
            raise ValueError("crash_signal must be present exactly when kind is CRASH")

    def to_obj(self) -> dict:
        # Durations are deliberately excluded: findings must be byte-stable
        # across reruns with the same seed.
        return {
            "kind": self.kind,
            "crash_signal": self.crash_signal,
            "message": self.message,
            "after_retry": self.after_retry,
            "raw_signal": self.raw_signal,
        }


@dataclass(frozen=True)
class TargetProfile:
    target_id: str
    command: tuple[str, ...]
    abort_is_exception: bool = False
    timeout_ms: int = 10_000

    def __post_init__(self) -> None:
        if not self.command:
            raise ValueError("invocation command must be nonempty")


def classify_exit(returncode: int, profile: TargetProfile, duration_ms: float) -> Outcome:
    """Map a dead-by-signal exit status onto the crash taxonomy."""
    signum = -returncode
    name = _SIGNAL_NAMES.get(signum)
    if name == "ABORT" and profile.abort_is_exception:
        return Outcome(
            kind=EXCEPTION, message="abort treated as exception", duration_ms=duration_ms
        )
    if name is None:
        return Outcome(
            kind=CRASH,
            crash_signal="OTHER",
            message=f"killed by signal {signum}",
            duration_ms=duration_ms,
            raw_signal=signum,
        )
    return Outcome(
        kind=CRASH,
        crash_signal=name,
        message=f"killed by signal {signum} ({name})",
        duration_ms=duration_ms,
        raw_signal=signum,
    )


def _parse_status(stdout: str, profile: TargetProfile) -> Outcome:
    lines = [line for line in stdout.splitlines() if line.strip()]
    if len(lines) < 2:
        raise HarnessError(
            f"worker for {profile.target_id!r} exited cleanly without a status record"
        )
    try:
        handshake = json.loads(lines[0])
        status = json.loads(lines[1])
    except json.JSONDecodeError as exc:
        raise HarnessError(f"unparseable worker output: {exc}") from exc
    if handshake.get("v") != PROTOCOL_VERSION:
        raise HarnessError(
            f"protocol version mismatch: worker spoke {handshake.get('v')!r}, "
            f"supervisor expects {PROTOCOL_VERSION}"
        )
    kind = status.get("status")
    if kind == "pass":
        return Outcome(kind=PASS)
    if kind == "exception":
        return Outcome(kind=EXCEPTION, message=str(status.get("message", ""))[:_MESSAGE_LIMIT])
    raise HarnessError(f"unknown worker status {kind!r}")


def evaluate(record: dict, profile: TargetProfile, timeout_scale: float = 1.0) -> Outcome:
    """Run one invocation in a fresh worker process and classify the result."""
    request = json.dumps({"v": PROTOCOL_VERSION, **record}) + "\n"
    start = time.monotonic()
    try:
        proc = subprocess.Popen(
            list(profile.command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            stderr=subprocess.DEVNULL,
            text=True,
        )
    except OSError as exc:
        raise HarnessError(f"cannot start worker {profile.command[0]!r}: {exc}") from exc

    timeout_s = profile.timeout_ms * timeout_scale / 1000.0
    try:
        stdout, _ = proc.communicate(request, timeout=timeout_s)
    except subprocess.TimeoutExpired:
        proc.kill()
        proc.wait()
        duration = (time.monotonic() - start) * 1000
        return Outcome(
            kind=TIMEOUT,
            message=f"no verdict within {int(profile.timeout_ms * timeout_scale)} ms",
            duration_ms=duration,
        )
    duration = (time.monotonic() - start) * 1000

    if proc.returncode < 0:
        return classify_exit(proc.returncode, profile, duration)
    if proc.returncode != 0:
        raise HarnessError(
            f"worker exited with code {proc.returncode}; target exceptions must be "
            "caught and reported in-band"
        )
    outcome = _parse_status(stdout, profile)
    return replace(outcome, duration_ms=duration)


def evaluate_with_retry(record: dict, profile: TargetProfile) -> Outcome:
    """Like :func:`evaluate`, but retry a timeout once at 10x the budget.

    A run that completes within the extended budget keeps its real outcome;
    one that still times out is marked ``after_retry`` and counts as a bug.
    """
    outcome = evaluate(record, profile)
    if outcome.kind != TIMEOUT:
        return outcome
    retry = evaluate(record, profile, timeout_scale=10.0)
    if retry.kind == TIMEOUT:
        return replace(retry, after_retry=True)
    return retry


def is_bug(outcome: Outcome) -> bool:
    """Crashes are always bugs; timeouts only after the 10x retry also hangs."""
    if outcome.kind == CRASH:
        return True
    return outcome.kind == TIMEOUT and outcome.after_retry


class SubprocessEvaluator:
    """Process-per-invocation harness handle (strict crash isolation)."""

    def __init__(self, profile: TargetProfile):
        self.profile = profile

    def run(self, record: dict, timeout_scale: float = 1.0) -> Outcome:
        return evaluate(record, self.profile, timeout_scale=timeout_scale)

    def close(self) -> None:  # symmetry with the streaming variant
        pass


class StreamingSubprocessEvaluator:
    """Harness handle that streams records through one long-lived worker.

    Exactly one record is in flight at a time, so a process death is always
    attributable to the record just sent; the worker is respawned after every
    crash or timeout.  Valid only for stateless workers (the worker contract).
    """

    def __init__(self, profile: TargetProfile):
        self.profile = profile
        self._proc: subprocess.Popen | None = None

    def _spawn(self) -> subprocess.Popen:
        try:
            proc = subprocess.Popen(
                list(self.profile.command),
                stdin=subprocess.PIPE,
                stdout=subprocess.PIPE,
                stderr=subprocess.DEVNULL,
                text=True,
                bufsize=1,
            )
        except OSError as exc:
            raise HarnessError(f"cannot start worker: {exc}") from exc
        line = self._read_line(proc, self.profile.timeout_ms / 1000.0)
        if line is None:
            proc.kill()
            proc.wait()
            raise HarnessError("worker produced no handshake")
        try:
            handshake = json.loads(line)
        except json.JSONDecodeError as exc:
            raise HarnessError(f"bad handshake: {line!r}") from exc
        if handshake.get("v") != PROTOCOL_VERSION:
            raise HarnessError(f"protocol version mismatch: {handshake!r}")
        return proc

    @staticmethod
    def _read_line(proc: subprocess.Popen, timeout_s: float) -> str | None:
        deadline = time.monotonic() + timeout_s
        buf = ""
        stream = proc.stdout
        while True:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                return None
            ready, _, _ = select.select([stream], [], [], remaining)
            if not ready:
                return None
            chunk = stream.readline()
            if chunk == "":
                return buf or None if buf.endswith("\n") else None
            buf += chunk
            if buf.endswith("\n"):
                return buf

    def _kill(self) -> None:
        if self._proc is not None:
            self._proc.kill()
            self._proc.wait()
            self._proc = None

    def run(self, record: dict, timeout_scale: float = 1.0) -> Outcome:
        if self._proc is None or self._proc.poll() is not None:
            self._proc = self._spawn()
        proc = self._proc
        start = time.monotonic()
        try:
            proc.stdin.write(json.dumps({"v": PROTOCOL_VERSION, **record}) + "\n")
            proc.stdin.flush()
        except (BrokenPipeError, OSError):
            self._kill()
            raise HarnessError("worker pipe closed before the record was sent")

        timeout_s = self.profile.timeout_ms * timeout_scale / 1000.0
        line = self._read_line(proc, timeout_s)
        duration = (time.monotonic() - start) * 1000

        if line is None:
            rc = proc.poll()
            if rc is not None and rc < 0:
                self._proc = None
                return classify_exit(rc, self.profile, duration)
            if rc is None:
                self._kill()
                return Outcome(
                    kind=TIMEOUT,
                    message=f"no verdict within {int(self.profile.timeout_ms * timeout_scale)} ms",
                    duration_ms=duration,
                )
            # Exited cleanly without answering: wait for the real status the
            # pipe may still hold, otherwise report desync.
            self._proc = None
            raise HarnessError("worker exited without a status record")
        try:
            status = json.loads(line)
        except json.JSONDecodeError as exc:
            self._kill()
            raise HarnessError(f"unparseable status line {line!r}") from exc
        kind = status.get("status")
        if kind == "pass":
            return Outcome(kind=PASS, duration_ms=duration)
        if kind == "exception":
            return Outcome(
                kind=EXCEPTION,
                message=str(status.get("message", ""))[:_MESSAGE_LIMIT],
                duration_ms=duration,
            )
        self._kill()
        raise HarnessError(f"unknown worker status {kind!r}")

    def close(self) -> None:
        if self._proc is not None:
            try:
                self._proc.stdin.close()
            except OSError:
                pass
            self._proc.kill()
            self._proc.wait()
            self._proc = None
