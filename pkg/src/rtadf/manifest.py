"""Reproducibility envelope embedded in every CLI result file."""
from __future__ import annotations

import hashlib
import os
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .mc_critical import canonical_json


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def build_manifest(command: list[str], **fields) -> dict:
    """Manifest with a digest over everything it holds.

    Wall-clock timestamps are deliberately absent so equal runs produce
    byte-identical files; see :func:`timestamps`.
    """
    m = {"tool": "rtadf", "version": __version__, "command": command}
    m.update(fields)
    m["manifest_digest"] = hashlib.sha256(canonical_json(m).encode()).hexdigest()
    return m


def timestamps(started: datetime) -> dict:
    fmt = "%Y-%m-%dT%H:%M:%SZ"
    return {
        "started_utc": started.strftime(fmt),
        "finished_utc": datetime.now(timezone.utc).strftime(fmt),
    }


def write_files(outputs: dict) -> None:
    """Write ``{path: text}`` all-or-nothing: temp files first, then renames."""
    tmps = []
    try:
        for path, text in outputs.items():
            path = Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(f".{path.name}.tmp{os.getpid()}")
            tmp.write_text(text, encoding="utf-8")
            tmps.append((tmp, path))
        for tmp, path in tmps:
            os.replace(tmp, path)
    finally:
        for tmp, _ in tmps:
            if tmp.exists():
                tmp.unlink()
