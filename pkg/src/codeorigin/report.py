"""Render evaluation reports as per-dataset tables (CSV, markdown) or JSON."""

from __future__ import annotations

import csv
import io
import json
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import InputError
from .extractor import PRESETS
from .metrics import EvalReport
from .snippet import CLASS_ORDER

FORMATS = ("csv", "md", "json")
METRICS = ("precision", "recall", "f1")
SUPPORT_COLUMN = "#"


def _row_keys() -> List[Tuple[str, str]]:
    rows = []
    for metric in METRICS:
        rows.extend((metric, c.value) for c in CLASS_ORDER)
        rows.append((metric, "macro avg"))
        rows.append((metric, "weighted avg"))
    rows.append(("accuracy", ""))
    return rows


def _value(report: EvalReport, metric: str, row: str) -> float:
    if metric == "accuracy":
        return report.accuracy
    if row == "macro avg":
        return getattr(report.macro_avg, metric)
    if row == "weighted avg":
        return getattr(report.weighted_avg, metric)
    return getattr(report.per_class[row], metric)


def _support(report: EvalReport, row: str) -> int:
    if row in report.per_class:
        return report.per_class[row].support
    return report.total_support


def _group(reports: Sequence[EvalReport]) -> Dict[str, Dict[str, EvalReport]]:
    """dataset -> config -> report, both in first-seen order."""
    grouped: Dict[str, Dict[str, EvalReport]] = {}
    for r in reports:
        grouped.setdefault(str(r.dataset or ""), {})[str(r.config or "")] = r
    return grouped


def table_rows(reports: Sequence[EvalReport]) -> Tuple[List[str], List[List[str]]]:
    """Header and body rows of the flat table (dataset, metric, row, configs..., support)."""
    grouped = _group(reports)
    configs: List[str] = []
    for by_config in grouped.values():
        configs.extend(c for c in by_config if c not in configs)
    if not configs:
        configs = list(PRESETS)
    header = ["dataset", "metric", "row"] + configs + [SUPPORT_COLUMN]
    body = []
    for dataset, by_config in grouped.items():
        first = next(iter(by_config.values()))
        for metric, row in _row_keys():
            cells = [f"{_value(by_config[c], metric, row):.2f}" if c in by_config else "" for c in configs]
            body.append([dataset, metric, row] + cells + [str(_support(first, row))])
    return header, body


def render_csv(reports: Sequence[EvalReport]) -> str:
    header, body = table_rows(reports)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(body)
    return buf.getvalue()


def _md_table(header: List[str], rows: Iterable[List[str]]) -> List[str]:
    lines = ["| " + " | ".join(header) + " |", "|" + "|".join("---" for _ in header) + "|"]
    lines.extend("| " + " | ".join(r) + " |" for r in rows)
    return lines


def render_markdown(reports: Sequence[EvalReport]) -> str:
    header, body = table_rows(reports)
    if not body:
        return "\n".join(_md_table(header[1:], [])) + "\n"
    lines: List[str] = []
    datasets = list(dict.fromkeys(r[0] for r in body))
    for dataset in datasets:
        if lines:
            lines.append("")
        lines.append(f"### {dataset}")
        lines.append("")
        lines.extend(_md_table(header[1:], (r[1:] for r in body if r[0] == dataset)))
    return "\n".join(lines) + "\n"


def render_json(reports: Sequence[EvalReport]) -> str:
    return json.dumps({"reports": [r.to_dict() for r in reports]}, indent=2) + "\n"


def parse_json(text: str) -> List[EvalReport]:
    data = json.loads(text)
    items = data["reports"] if isinstance(data, dict) and "reports" in data else data
    if isinstance(items, dict):
        items = [items]
    return [EvalReport.from_dict(d) for d in items]


def render_report(reports: Sequence[EvalReport], fmt: str) -> str:
    if fmt == "csv":
        return render_csv(reports)
    if fmt in ("md", "markdown"):
        return render_markdown(reports)
    if fmt == "json":
        return render_json(reports)
    raise InputError(f"unknown report format {fmt!r} (expected one of {', '.join(FORMATS)})")


def load_reports(paths: Sequence, order: Optional[Sequence[str]] = None) -> List[EvalReport]:
    """Read report JSON files (single reports or report lists)."""
    reports: List[EvalReport] = []
    for p in paths:
        with open(p, encoding="utf-8") as fh:
            try:
                reports.extend(parse_json(fh.read()))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise InputError(f"{p}: not a report file ({exc})") from None
    if order:
        rank = {c: i for i, c in enumerate(order)}
        reports.sort(key=lambda r: rank.get(str(r.config), len(rank)))
    return reports
