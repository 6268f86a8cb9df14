import csv
import io
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, TextIO

from PointingLab.plugins.config import RunConfig, echo_document
from PointingLab.settings import settings

logger = logging.getLogger(__name__)


@dataclass
class Table:
    """Rows produced by one command, plus an optional summary record."""

    header: List[str]
    rows: List[Sequence[Any]]
    summary: Dict[str, Any] = field(default_factory=dict)


def format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{settings.CSV_DIGITS}g}"
    return str(value)


def _json_value(value: Any) -> Any:
    if isinstance(value, float):
        if not math.isfinite(value):
            return format_value(value)
        return float(format_value(value))
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return value


def render_csv(table: Table) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(table.header)
    for row in table.rows:
        writer.writerow([format_value(v) for v in row])
    return buffer.getvalue()


def render_json(table: Table, cfg: Optional[RunConfig] = None) -> str:
    doc: Dict[str, Any] = {
        "header": table.header,
        "rows": [_json_value(list(row)) for row in table.rows],
    }
    if table.summary:
        doc["summary"] = _json_value(table.summary)
    if cfg is not None:
        doc["config"] = cfg.document()
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def render_summary(summary: Dict[str, Any]) -> str:
    return json.dumps(_json_value(summary), sort_keys=True, indent=2) + "\n"


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def emit(table: Table, cfg: RunConfig, fmt: str, out: Optional[str], stream: TextIO) -> Optional[Path]:
    """Write a command's table to ``out`` (or ``stream``) in the requested format.

    With a file destination the resolved configuration is written next to it
    as ``<out>.config.json`` and, for CSV, the summary as ``<out>.summary.json``.
    """
    text = render_json(table, cfg) if fmt == "json" else render_csv(table)
    if out is None:
        stream.write(text)
        return None
    path = Path(out)
    _write_text(path, text)
    _write_text(path.with_name(path.name + ".config.json"), echo_document(cfg))
    if fmt == "csv" and table.summary:
        _write_text(path.with_name(path.name + ".summary.json"), render_summary(table.summary))
    logger.info("Wrote %d rows to %s", len(table.rows), path)
    return path
