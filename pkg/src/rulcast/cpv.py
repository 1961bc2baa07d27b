"""Signed, impact-weighted story-point fusion per release.

All arithmetic is carried out in integer quarter points (value * 4) so
sums like 36.5 or -0.75 are exact; floats appear only at the display
boundary.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .corpus import IMPACT_QUARTERS, IssueRecord
from .errors import ParameterError, SizingMissingError

QP_SCALE = 4


def to_quarter_points(value) -> int:
    """Convert a decimal CPV value to exact quarter points."""
    scaled = value * QP_SCALE
    rounded = round(scaled)
    if abs(scaled - rounded) > 1e-9:
        raise ParameterError(f"{value} is not a multiple of 0.25")
    return int(rounded)


def from_quarter_points(qp: int) -> float:
    return qp / QP_SCALE


def format_quarter_points(qp: int) -> str:
    """Decimal rendering with at most 2 fraction digits (e.g. 36.5, -0.75)."""
    text = f"{qp / QP_SCALE:.2f}"
    text = text.rstrip("0").rstrip(".")
    return text if text not in ("", "-") else "0"


def issue_contribution(issue: IssueRecord) -> int:
    """Signed SP * IF for a single issue, in quarter points."""
    if issue.story_points is None:
        raise SizingMissingError(issue.id)
    quarters = IMPACT_QUARTERS[issue.impact_scale]
    signed = -1 if issue.sign == "-" else 1
    return signed * issue.story_points * quarters


def release_delta(issues: Iterable[IssueRecord]) -> int:
    """Exact signed sum of SP * IF over a release's issues (quarter points)."""
    return sum(issue_contribution(issue) for issue in issues)


def cumulative_series(base: int, deltas: Iterable[int]) -> list:
    """Prefix sums from base, exact; length equals len(deltas)."""
    out = []
    running = base
    for delta in deltas:
        running += delta
        out.append(running)
    return out


@dataclass
class ReleaseRecord:
    """One release with its CPV bookkeeping (quarter-point units)."""

    version: str
    ordinal: int
    issue_ids: tuple = ()
    delta_qp: int = 0
    cumulative_qp: int = 0
    measured_rt_ms: Optional[float] = None

    @property
    def delta_cpv(self) -> float:
        return from_quarter_points(self.delta_qp)

    @property
    def cumulative_cpv(self) -> float:
        return from_quarter_points(self.cumulative_qp)


def build_release_records(issues, versions, base_qp: int = 0,
                          measured_rt=None) -> list:
    """Group resolved issues by release and accumulate CPV in version order.

    ``versions`` fixes the release order; an issue counts only in its
    resolved release. ``measured_rt`` optionally maps version -> ms.
    """
    by_release: dict = {v: [] for v in versions}
    for issue in issues:
        if issue.resolved_release in by_release:
            by_release[issue.resolved_release].append(issue)
    deltas = [release_delta(by_release[v]) for v in versions]
    cumulatives = cumulative_series(base_qp, deltas)
    records = []
    for ordinal, version in enumerate(versions):
        records.append(ReleaseRecord(
            version=version,
            ordinal=ordinal,
            issue_ids=tuple(i.id for i in by_release[version]),
            delta_qp=deltas[ordinal],
            cumulative_qp=cumulatives[ordinal],
            measured_rt_ms=None if measured_rt is None else measured_rt.get(version),
        ))
    return records
