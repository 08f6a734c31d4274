"""Grid-function files: CSV with a ``t,value`` header or JSON ``{"base": int, "values": [...]}``."""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

from .dfc import GridFunction


class SequenceFormatError(ValueError):
    pass


def parse_csv(text: str) -> GridFunction:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["t", "value"]:
        raise SequenceFormatError("CSV sequence needs the header 't,value'")
    ts, values = [], []
    for row in reader:
        try:
            t_raw = float(row["t"])
            values.append(float(row["value"]))
        except (TypeError, ValueError) as exc:
            raise SequenceFormatError(f"bad CSV row {row!r}") from exc
        if t_raw != int(t_raw):
            raise SequenceFormatError(f"t must be an integer, got {row['t']!r}")
        ts.append(int(t_raw))
    if not ts:
        raise SequenceFormatError("CSV sequence has no rows")
    if ts != list(range(ts[0], ts[0] + len(ts))):
        raise SequenceFormatError("t must be ascending and contiguous")
    return GridFunction(ts[0], tuple(values))


def parse_json(text: str) -> GridFunction:
    try:
        doc = json.loads(text)
        base, values = doc["base"], doc["values"]
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise SequenceFormatError("JSON sequence needs 'base' and 'values'") from exc
    if int(base) != base or not isinstance(values, list) or not values:
        raise SequenceFormatError("JSON sequence needs an integer base and a non-empty list")
    return GridFunction(int(base), tuple(float(v) for v in values))


def read_sequence(path: str | Path) -> GridFunction:
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".json":
        return parse_json(text)
    return parse_csv(text)


def to_csv(U: GridFunction) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "value"])
    for t in U.points():
        w.writerow([t, repr(U(t))])
    return buf.getvalue()


def to_json(U: GridFunction) -> str:
    return json.dumps({"base": U.base, "values": list(U.values)})
