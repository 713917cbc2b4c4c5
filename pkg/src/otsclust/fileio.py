"""Readers and writers for series files, label sidecars and partitions.

Series JSONL: an optional header ``{"format": "ots-jsonl", "version": 1,
"labels": [...]}`` followed by one ``{"id", "n", "states"}`` object per line.
Series CSV: columns ``id,n,states`` with space-separated state indices.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Optional, Sequence

from .core import OrdinalSeries, OTSError, validate_series

FORMAT = "ots-jsonl"
VERSION = 1


class FileFormatError(OTSError):
    """Malformed input file (maps to the IO exit code)."""


def dumps_series_jsonl(series: Sequence[OrdinalSeries], labels: Optional[Sequence[str]] = None) -> str:
    lines = []
    header = {"format": FORMAT, "version": VERSION}
    if labels is None and series and series[0].range.labels is not None:
        labels = series[0].range.labels
    if labels is not None:
        header["labels"] = list(labels)
    lines.append(json.dumps(header))
    for x in series:
        lines.append(json.dumps({"id": x.id, "n": x.n, "states": [int(v) for v in x.states]}))
    return "\n".join(lines) + "\n"


def loads_series_jsonl(text: str) -> list:
    out = []
    labels = None
    for k, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"line {k}: invalid JSON ({exc.msg})") from None
        if not isinstance(obj, dict):
            raise FileFormatError(f"line {k}: expected a JSON object")
        if "format" in obj:
            if obj["format"] != FORMAT or obj.get("version") != VERSION:
                raise FileFormatError(f"line {k}: unsupported header {obj}")
            labels = obj.get("labels")
            continue
        try:
            sid, n, states = obj["id"], obj["n"], obj["states"]
        except KeyError as exc:
            raise FileFormatError(f"line {k}: missing field {exc.args[0]!r}") from None
        out.append(validate_series(str(sid), states, int(n), labels))
    if not out:
        raise FileFormatError("no series found")
    return out


def loads_series_csv(text: str) -> list:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or not {"id", "n", "states"} <= set(reader.fieldnames):
        raise FileFormatError("CSV needs the columns id,n,states")
    out = []
    for row in reader:
        try:
            states = [int(v) for v in row["states"].split()]
            n = int(row["n"])
        except ValueError as exc:
            raise FileFormatError(f"series {row['id']!r}: {exc}") from None
        out.append(validate_series(row["id"], states, n))
    if not out:
        raise FileFormatError("no series found")
    return out


def dumps_series_csv(series: Sequence[OrdinalSeries]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["id", "n", "states"])
    for x in series:
        w.writerow([x.id, x.n, " ".join(str(int(v)) for v in x.states)])
    return buf.getvalue()


def read_series(path) -> list:
    """Load series from ``.jsonl``/``.json`` or ``.csv``; a directory means ``series.jsonl`` inside."""
    path = Path(path)
    if path.is_dir():
        path = path / "series.jsonl"
    text = path.read_text(encoding="utf-8")
    if path.suffix.lower() == ".csv":
        return loads_series_csv(text)
    return loads_series_jsonl(text)


def write_series(path, series, labels=None) -> None:
    path = Path(path)
    if path.suffix.lower() == ".csv":
        path.write_text(dumps_series_csv(series), encoding="utf-8")
    else:
        path.write_text(dumps_series_jsonl(series, labels), encoding="utf-8")


def write_labels(path, ids: Sequence[str], labels: Sequence[str], meta: Optional[dict] = None) -> None:
    doc = {"labels": dict(zip(ids, labels))}
    if meta:
        doc.update(meta)
    Path(path).write_text(json.dumps(doc, indent=1, sort_keys=True) + "\n", encoding="utf-8")


def read_labels(path, ids: Sequence[str]) -> list:
    """Ground-truth labels aligned to ``ids``."""
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        mapping = doc["labels"] if isinstance(doc, dict) and "labels" in doc else doc
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"labels file is not valid JSON: {exc.msg}") from None
    if isinstance(mapping, list):
        if len(mapping) != len(ids):
            raise FileFormatError("label list length differs from the number of series")
        return [str(v) for v in mapping]
    missing = [i for i in ids if i not in mapping]
    if missing:
        raise FileFormatError(f"no label for series {missing[:5]}")
    return [str(mapping[i]) for i in ids]


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}: invalid JSON ({exc.msg})") from None
