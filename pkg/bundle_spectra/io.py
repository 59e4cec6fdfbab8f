"""
CSV and JSON writers for experiment output.

Floats go to CSV with 17 significant digits. JSON uses the shortest
round-trip float representation and sorted keys. Both round-trip exactly.
"""

import csv
import io
import json
import math
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, TextIO, Union

import numpy as np


def format_float(value: float) -> str:
    return "%.17g" % value


def _cell(value: Any) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(float(value))
    if isinstance(value, (tuple, list)):
        return " ".join(_cell(v) for v in value)
    if value is None:
        return ""
    return str(value)


def timestamp_line() -> str:
    return "# generated " + datetime.now(timezone.utc).isoformat(timespec="seconds")


def render_csv(
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    timestamp: bool = False,
) -> str:
    """CSV text (RFC 4180, CRLF line ends) with an optional timestamp line."""
    buffer = io.StringIO()
    if timestamp:
        buffer.write(timestamp_line() + "\r\n")
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, tuples and dataclass-like dicts for json."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value) or math.isinf(value):
            return None
        return value
    return value


def render_json(data: Any) -> str:
    return json.dumps(to_jsonable(data), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def emit(text: str, path: Optional[Union[str, Path]] = None, stream: Optional[TextIO] = None) -> None:
    """Write ``text`` to ``path`` (UTF-8, no newline translation) or ``stream``."""
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    elif stream is not None:
        stream.write(text)
