"""Canonical artifact serialization and stale-input detection.

Every pipeline stage writes JSON artifacts through :func:`dump_canonical` so
that reruns with identical inputs are byte-identical (golden tests diff the
files directly).  Artifacts record a digest of the files they were derived
from; consumers call :func:`check_freshness` and warn when an input file has
changed since the artifact was produced.
"""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path
from typing import Any


def canonical_json(obj: Any) -> str:
    """Serialize *obj* with sorted keys and a trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def dump_canonical(obj: Any, path: str | os.PathLike[str]) -> None:
    Path(path).write_text(canonical_json(obj), encoding="utf-8")


def load_json(path: str | os.PathLike[str]) -> Any:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def file_digest(path: str | os.PathLike[str]) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def input_digests(paths: dict[str, str | os.PathLike[str]]) -> dict[str, dict[str, str]]:
    """Digest a named set of input files for embedding into an artifact."""
    return {
        name: {"path": str(path), "sha256": file_digest(path)}
        for name, path in sorted(paths.items())
    }


def check_freshness(artifact: dict[str, Any], artifact_name: str) -> list[str]:
    """Return one warning per recorded input that no longer matches its digest."""
    warnings = []
    for name, entry in artifact.get("input_digests", {}).items():
        path = entry["path"]
        if not os.path.exists(path):
            warnings.append(f"{artifact_name}: input {name} ({path}) is missing")
        elif file_digest(path) != entry["sha256"]:
            warnings.append(
                f"{artifact_name}: input {name} ({path}) changed since the artifact "
                "was produced; rerun the producing command"
            )
    return warnings
