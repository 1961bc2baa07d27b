"""Issue and response-time ingestion, data quality, and categorization.

File formats (fixed):
  issues CSV header: id,kind,title,description,reported_release,resolved_release,
                     category,subcategory,impact,story_points,sign
  issues JSON-lines: one object per line, same keys
  RT samples CSV header: release,page,environment,sample_ms
"""

from __future__ import annotations

import csv
import io
import json
import re
from dataclasses import dataclass, field, asdict, replace
from typing import Iterable, Optional

from .errors import MissingDataError, ParameterError, ParseError

KINDS = ("fault", "enhancement")
CATEGORIES = ("server", "network", "database", "configuration", "other")
IMPACT_SCALES = ("critical", "major", "medium", "minor")
SIGNS = ("+", "-")
STORY_POINT_CLASSES = (1, 2, 3, 5, 8)

# Impact scale -> numeric factor (quarter multiples, <= 1.0).
IMPACT_FACTORS = {
    "critical": 1.0,
    "major": 0.75,
    "medium": 0.5,
    "minor": 0.25,
}

# Same table in integer quarter points, for exact CPV arithmetic.
IMPACT_QUARTERS = {
    "critical": 4,
    "major": 3,
    "medium": 2,
    "minor": 1,
}

ISSUE_COLUMNS = (
    "id", "kind", "title", "description", "reported_release",
    "resolved_release", "category", "subcategory", "impact",
    "story_points", "sign",
)

# Fields counted toward completeness unless the caller overrides.
DEFAULT_REQUIRED_FIELDS = (
    "id", "kind", "description", "reported_release", "impact_scale", "sign",
)


@dataclass(frozen=True)
class IssueRecord:
    """One fault or enhancement request."""

    id: str
    kind: str
    title: str = ""
    description: str = ""
    reported_release: str = ""
    resolved_release: Optional[str] = None
    category: str = "other"
    subcategory: str = "other"
    impact_scale: str = "medium"
    story_points: Optional[int] = None
    sign: str = "+"

    @property
    def resolved(self) -> bool:
        return self.resolved_release is not None


@dataclass(frozen=True)
class RtSampleSet:
    """One batch of response-time readings for a (release, page)."""

    release: str
    page: str
    environment: str
    samples: tuple

    def mean(self) -> float:
        if not self.samples:
            raise MissingDataError(
                f"empty sample set for release {self.release} page {self.page}")
        return sum(self.samples) / len(self.samples)


@dataclass
class QualityReport:
    completeness: float
    duplicate_ids: list
    empty_descriptions: list
    unknown_labels: list
    record_count: int

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CategoryRule:
    pattern: str
    category: str
    subcategory: str
    priority: int


# Keyword rules covering the stock subcategory vocabulary; lower priority
# number wins. The trailing catch-all cannot be removed.
DEFAULT_CATEGORY_RULES = (
    CategoryRule(r"overload|peak traffic|server (slow|busy|down)", "server", "overloaded server", 10),
    CategoryRule(r"\bserver\b|\bapache\b|\bcgi\b", "server", "server fault", 20),
    CategoryRule(r"sluggish|client (slow|freez)|\bui\b|interface|render", "server", "sluggish client", 30),
    CategoryRule(r"slow network|latency|network service", "network", "slow network services", 40),
    CategoryRule(r"\bnetwork\b|\bhttp\b|connection", "network", "network fault", 50),
    CategoryRule(r"\bquery\b|\bsql\b|\btable\b|database|innodb|myisam|oracle|postgres", "database", "database fault", 60),
    CategoryRule(r"config|install|upgrade|setting|parameter file", "configuration", "configuration fault", 70),
    CategoryRule(r".", "other", "other", 1_000_000),
)


class CategoryMatrix:
    """Ordered keyword rules mapping issue text to (category, subcategory)."""

    def __init__(self, rules: Iterable[CategoryRule] = DEFAULT_CATEGORY_RULES):
        rules = tuple(rules)
        priorities = [r.priority for r in rules]
        if len(set(priorities)) != len(priorities):
            raise ParameterError("category rule priorities must be unique")
        if not any(r.category == "other" and r.subcategory == "other" for r in rules):
            raise ParameterError("category matrix must contain the (other, other) default rule")
        self.rules = tuple(sorted(rules, key=lambda r: r.priority))
        self._compiled = [(re.compile(r.pattern, re.IGNORECASE), r) for r in self.rules]

    def match(self, text: str) -> CategoryRule:
        for regex, rule in self._compiled:
            if regex.search(text):
                return rule
        return self.rules[-1]


def _parse_row(row: dict, rownum: int) -> IssueRecord:
    def need(col):
        value = (row.get(col) or "").strip()
        if not value:
            raise ParseError("missing required value", row=rownum, field=col)
        return value

    issue_id = need("id")
    kind = need("kind")
    if kind not in KINDS:
        raise ParseError(f"unknown kind '{kind}'", row=rownum, field="kind")
    impact = need("impact")
    if impact not in IMPACT_SCALES:
        raise ParseError(f"unknown impact label '{impact}'", row=rownum, field="impact")
    sign = need("sign")
    if sign not in SIGNS:
        raise ParseError(f"sign must be '+' or '-', got '{sign}'", row=rownum, field="sign")

    sp_raw = (row.get("story_points") or "").strip() if not isinstance(row.get("story_points"), int) else row["story_points"]
    story_points = None
    if sp_raw not in ("", None):
        try:
            story_points = int(sp_raw)
        except (TypeError, ValueError):
            raise ParseError(f"story_points not an integer: {sp_raw!r}", row=rownum, field="story_points")
        if story_points not in STORY_POINT_CLASSES:
            raise ParseError(
                f"story_points {story_points} outside {STORY_POINT_CLASSES}",
                row=rownum, field="story_points")

    category = (row.get("category") or "").strip() or "other"
    if category not in CATEGORIES:
        raise ParseError(f"unknown category '{category}'", row=rownum, field="category")
    resolved = (row.get("resolved_release") or "").strip() or None

    return IssueRecord(
        id=issue_id,
        kind=kind,
        title=(row.get("title") or "").strip(),
        description=(row.get("description") or "").strip(),
        reported_release=need("reported_release"),
        resolved_release=resolved,
        category=category,
        subcategory=(row.get("subcategory") or "").strip() or "other",
        impact_scale=impact,
        story_points=story_points,
        sign=sign,
    )


def _as_text(source) -> io.TextIOBase:
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    if hasattr(source, "read"):
        data = source.read()
        if isinstance(data, bytes):
            data = data.decode("utf-8")
        return io.StringIO(data)
    raise ParseError(f"unreadable source of type {type(source).__name__}")


def load_issues(source, format: str = "csv"):
    """Parse an issue export; returns (records, QualityReport).

    Malformed rows raise ParseError naming the row and field rather than
    being dropped silently.
    """
    stream = _as_text(source)
    records = []
    if format == "csv":
        reader = csv.DictReader(stream)
        if reader.fieldnames is None:
            raise ParseError("empty CSV input")
        missing = [c for c in ISSUE_COLUMNS if c not in reader.fieldnames]
        if missing:
            raise ParseError(f"missing required column(s): {', '.join(missing)}",
                             field=missing[0])
        for rownum, row in enumerate(reader, start=2):
            records.append(_parse_row(row, rownum))
    elif format == "json-lines":
        for rownum, line in enumerate(stream, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid JSON: {exc}", row=rownum)
            if not isinstance(obj, dict):
                raise ParseError("line is not a JSON object", row=rownum)
            records.append(_parse_row(obj, rownum))
    else:
        raise ParseError(f"unknown format '{format}'")
    return records, quality_report(records)


def dump_issues(records: Iterable[IssueRecord], format: str = "csv") -> str:
    """Serialize records back to the canonical file format (round-trips)."""
    rows = []
    for rec in records:
        rows.append({
            "id": rec.id,
            "kind": rec.kind,
            "title": rec.title,
            "description": rec.description,
            "reported_release": rec.reported_release,
            "resolved_release": rec.resolved_release or "",
            "category": rec.category,
            "subcategory": rec.subcategory,
            "impact": rec.impact_scale,
            "story_points": "" if rec.story_points is None else rec.story_points,
            "sign": rec.sign,
        })
    if format == "csv":
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=ISSUE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        return out.getvalue()
    if format == "json-lines":
        return "\n".join(json.dumps(r, sort_keys=True) for r in rows) + ("\n" if rows else "")
    raise ParseError(f"unknown format '{format}'")


def quality_report(records, required_fields=DEFAULT_REQUIRED_FIELDS) -> QualityReport:
    """Completeness, duplicate and empty-description scan over parsed records."""
    records = list(records)
    present = 0
    required_total = len(records) * len(required_fields)
    seen, duplicates = set(), []
    empty_descriptions = []
    unknown_labels = []
    for rec in records:
        for fieldname in required_fields:
            value = getattr(rec, fieldname, None)
            if value not in (None, ""):
                present += 1
        if rec.id in seen and rec.id not in duplicates:
            duplicates.append(rec.id)
        seen.add(rec.id)
        if not rec.description:
            empty_descriptions.append(rec.id)
        if rec.impact_scale not in IMPACT_SCALES:
            unknown_labels.append(f"{rec.id}:impact:{rec.impact_scale}")
        if rec.kind not in KINDS:
            unknown_labels.append(f"{rec.id}:kind:{rec.kind}")
    completeness = present / required_total if required_total else 1.0
    return QualityReport(
        completeness=completeness,
        duplicate_ids=duplicates,
        empty_descriptions=empty_descriptions,
        unknown_labels=unknown_labels,
        record_count=len(records),
    )


def categorize(record: IssueRecord, matrix: Optional[CategoryMatrix] = None):
    """Highest-priority matching rule over title + description; total."""
    matrix = matrix or CategoryMatrix()
    rule = matrix.match(f"{record.title} {record.description}")
    return rule.category, rule.subcategory


def apply_categories(records, matrix: Optional[CategoryMatrix] = None):
    """Return records with category/subcategory filled from the matrix."""
    matrix = matrix or CategoryMatrix()
    out = []
    for rec in records:
        cat, sub = categorize(rec, matrix)
        out.append(replace(rec, category=cat, subcategory=sub))
    return out


def load_rt_samples(source) -> list:
    """Parse the RT samples CSV into per-(release, page, environment) sets."""
    stream = _as_text(source)
    reader = csv.DictReader(stream)
    expected = ("release", "page", "environment", "sample_ms")
    if reader.fieldnames is None:
        raise ParseError("empty RT samples input")
    missing = [c for c in expected if c not in reader.fieldnames]
    if missing:
        raise ParseError(f"missing required column(s): {', '.join(missing)}",
                         field=missing[0])
    groups: dict = {}
    for rownum, row in enumerate(reader, start=2):
        try:
            value = float(row["sample_ms"])
        except (TypeError, ValueError):
            raise ParseError(f"sample_ms not numeric: {row.get('sample_ms')!r}",
                             row=rownum, field="sample_ms")
        if value <= 0:
            raise ParseError(f"sample_ms must be > 0, got {value}",
                             row=rownum, field="sample_ms")
        key = (row["release"], row["page"], row["environment"])
        groups.setdefault(key, []).append(value)
    return [RtSampleSet(release=k[0], page=k[1], environment=k[2], samples=tuple(v))
            for k, v in groups.items()]


def aggregate_rt(sets, release: str) -> float:
    """Two-level average: per page, mean over its sets' means; then the
    unweighted mean across pages."""
    by_page: dict = {}
    for s in sets:
        if s.release != release:
            continue
        if not s.samples:
            raise MissingDataError(
                f"empty sample set for release {release} page {s.page}")
        by_page.setdefault(s.page, []).append(s.mean())
    if not by_page:
        raise MissingDataError(f"no RT samples for release {release}")
    page_means = [sum(m) / len(m) for m in by_page.values()]
    return sum(page_means) / len(page_means)


def version_key(version: str):
    """Sort key for dotted version strings; non-numeric parts sort lexically."""
    parts = []
    for chunk in version.split("."):
        parts.append((0, int(chunk)) if chunk.isdigit() else (1, chunk))
    return tuple(parts)
