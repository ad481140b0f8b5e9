"""Line-oriented JSON helpers shared by the corpus, span, and score loaders."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Iterable, Iterator


class FormatError(ValueError):
    """A malformed input file. Carries the 1-based line number when known."""

    def __init__(
        self,
        message: str,
        *,
        path: str | Path | None = None,
        line: int | None = None,
        field: str | None = None,
    ) -> None:
        detail = message
        if field is not None:
            detail = f"{detail} (field {field!r})"
        if line is not None:
            detail = f"{detail} at line {line}"
        if path is not None:
            detail = f"{detail} in {path}"
        super().__init__(detail)
        self.path = str(path) if path is not None else None
        self.line = line
        self.field = field


def read_jsonl(path: str | Path) -> Iterator[tuple[int, dict]]:
    """Yield (line_number, object) pairs; blank lines are skipped."""
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise FormatError(f"invalid JSON: {exc.msg}", path=path, line=lineno) from exc
            if not isinstance(obj, dict):
                raise FormatError("expected a JSON object", path=path, line=lineno)
            yield lineno, obj


def write_jsonl(path: str | Path, rows: Iterable[dict]) -> int:
    """Write one JSON object per line (UTF-8, non-ASCII kept verbatim)."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False))
            fh.write("\n")
            n += 1
    return n


def require(obj: dict, field: str, kind: str, *, path: str | Path, line: int) -> Any:
    """Fetch a typed field from a parsed JSONL object or raise FormatError.

    kind is one of "str", "int", "number".  bool is rejected for the numeric
    kinds (JSON true/false are not counts or scores).
    """
    if field not in obj:
        raise FormatError("missing required field", path=path, line=line, field=field)
    value = obj[field]
    if kind == "str":
        if not isinstance(value, str):
            raise FormatError("expected a string", path=path, line=line, field=field)
    elif kind == "int":
        if isinstance(value, bool) or not isinstance(value, int):
            raise FormatError("expected an integer", path=path, line=line, field=field)
    elif kind == "number":
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FormatError("expected a number", path=path, line=line, field=field)
    else:  # pragma: no cover - programming error
        raise ValueError(f"unknown kind {kind!r}")
    return value
