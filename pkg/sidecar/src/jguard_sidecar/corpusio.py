"""Minimal JSON-lines corpus I/O matching the core's file format."""

from __future__ import annotations

import json
import os


def read_corpus(path: str | os.PathLike) -> list[dict]:
    """One record per nonempty line; each needs at least id and text."""
    records = []
    seen = set()
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            if "id" not in obj or "text" not in obj:
                raise ValueError(f"{path}: line {line_no} needs 'id' and 'text'")
            if obj["id"] in seen:
                raise ValueError(f"{path}: duplicate id {obj['id']!r} at line {line_no}")
            seen.add(obj["id"])
            records.append(obj)
    return records


def write_jsonl(records: list[dict], path: str | os.PathLike) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(rec, ensure_ascii=False) + "\n")
