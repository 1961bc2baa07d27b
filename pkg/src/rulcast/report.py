"""Deterministic CSV/JSON/SVG emission for CLI and service reports."""

from __future__ import annotations

import json
from typing import Sequence

from . import cpv
from .horizon import RulReport
from .pipeline import Snapshot

GENERATOR_COMMENT = "<!-- rulcast svg v1 -->"

RUL_CSV_HEADER = "combo,version,cumulative_cpv,cluster,predicted_rt_ms,extrapolated,crossed"


def cpv_series_csv(releases) -> str:
    lines = ["version,ordinal,delta_cpv,cumulative_cpv"]
    for rec in releases:
        lines.append(
            f"{rec.version},{rec.ordinal},"
            f"{cpv.format_quarter_points(rec.delta_qp)},"
            f"{cpv.format_quarter_points(rec.cumulative_qp)}")
    return "\n".join(lines) + "\n"


def cluster_csv(snapshot: Snapshot) -> str:
    lines = ["version,cluster"]
    for rec, a in zip(snapshot.releases, snapshot.cluster_model.assignments):
        lines.append(f"{rec.version},{a}")
    return "\n".join(lines) + "\n"


def wcss_csv(curve) -> str:
    lines = ["k,wcss"]
    for k, wcss in curve:
        lines.append(f"{k},{wcss:.6f}")
    return "\n".join(lines) + "\n"


def residuals_csv(model) -> str:
    lines = ["x,residual"]
    # Residuals are stored in training order alongside x via the model; the
    # caller passes (xs, residuals) pairs when x values are needed.
    for x, r in model:
        lines.append(f"{x},{r:.6f}")
    return "\n".join(lines) + "\n"


def rul_csv(reports: Sequence[RulReport]) -> str:
    lines = [RUL_CSV_HEADER]
    for report in reports:
        for proj in report.releases:
            lines.append(
                f"{report.label},{proj.version},"
                f"{cpv.format_quarter_points(proj.cumulative_qp)},"
                f"{proj.cluster},{proj.predicted_rt_ms:.3f},"
                f"{str(proj.extrapolated).lower()},{str(proj.crossed).lower()}")
    return "\n".join(lines) + "\n"


def rul_json(reports: Sequence[RulReport], snapshot: Snapshot) -> str:
    payload = {
        "snapshot_version": snapshot.version_stamp,
        "threshold_ms": snapshot.config.threshold_ms,
        "ranking": [r.label for r in reports],
        "combos": [r.to_dict() for r in reports],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def model_json(snapshot: Snapshot) -> str:
    payload = {
        "snapshot_version": snapshot.version_stamp,
        "k": snapshot.cluster_model.k,
        "suggested_k": snapshot.suggested_k,
        "wcss": snapshot.cluster_model.wcss,
        "wcss_curve": [[k, w] for k, w in snapshot.wcss_curve],
        "centroids": [list(c) for c in snapshot.cluster_model.centroids],
        "feature_means": list(snapshot.encoder.means),
        "feature_stds": list(snapshot.encoder.stds),
        "unfittable_clusters": snapshot.unfittable_clusters,
        "models": {str(j): m.to_dict() for j, m in snapshot.models.items()},
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _scale(value, lo, hi, out_lo, out_hi):
    if hi == lo:
        return (out_lo + out_hi) / 2
    return out_lo + (value - lo) * (out_hi - out_lo) / (hi - lo)


def rul_svg(snapshot: Snapshot, reports: Sequence[RulReport],
            width: int = 900, height: int = 480) -> str:
    """Self-contained chart: historical RT solid, combo projections dashed,
    horizontal threshold line."""
    margin = 60
    historical = [(r.ordinal, r.measured_rt_ms) for r in snapshot.releases]
    n_hist = len(historical)
    horizon_len = max((len(r.releases) for r in reports), default=0)
    xs = [p[0] for p in historical] + list(range(n_hist, n_hist + horizon_len))
    ys = [p[1] for p in historical] + [snapshot.config.threshold_ms]
    for report in reports:
        ys.extend(p.predicted_rt_ms for p in report.releases)
    x_lo, x_hi = min(xs), max(xs)
    y_lo, y_hi = 0.0, max(ys) * 1.05

    def px(x):
        return _scale(x, x_lo, x_hi, margin, width - margin)

    def py(y):
        return _scale(y, y_lo, y_hi, height - margin, margin)

    palette = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        GENERATOR_COMMENT,
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" '
        f'y2="{height - margin}" stroke="black"/>',
    ]
    ty = py(snapshot.config.threshold_ms)
    parts.append(
        f'<line x1="{margin}" y1="{ty:.2f}" x2="{width - margin}" y2="{ty:.2f}" '
        'stroke="#555555" stroke-width="1.5"/>')
    parts.append(
        f'<text x="{margin + 4}" y="{ty - 5:.2f}" font-size="12" fill="#555555">'
        f'threshold {snapshot.config.threshold_ms:g} ms</text>')

    hist_points = " ".join(f"{px(o):.2f},{py(rt):.2f}" for o, rt in historical)
    parts.append(
        f'<polyline points="{hist_points}" fill="none" stroke="black" '
        'stroke-width="2"/>')
    parts.append(
        f'<text x="{margin}" y="{margin - 10}" font-size="13">response time (ms) '
        'over release cycle</text>')

    for idx, report in enumerate(reports):
        color = palette[idx % len(palette)]
        pts = [(n_hist - 1, historical[-1][1])] if historical else []
        pts += [(n_hist + i, p.predicted_rt_ms)
                for i, p in enumerate(report.releases)]
        poly = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        parts.append(
            f'<polyline points="{poly}" fill="none" stroke="{color}" '
            'stroke-width="1.5" stroke-dasharray="6 4"/>')
        parts.append(
            f'<text x="{width - margin - 140}" y="{margin + 16 * idx}" '
            f'font-size="12" fill="{color}">{report.label} '
            f'(RUL {report.rul_releases}{"+" if report.censored else ""})</text>')

    for version, ordinal in [(r.version, r.ordinal) for r in snapshot.releases]:
        parts.append(
            f'<text x="{px(ordinal):.2f}" y="{height - margin + 16}" '
            f'font-size="9" text-anchor="middle">{version}</text>')
    if reports:
        for i, proj in enumerate(reports[0].releases):
            parts.append(
                f'<text x="{px(n_hist + i):.2f}" y="{height - margin + 16}" '
                f'font-size="9" text-anchor="middle">{proj.version}</text>')

    parts.append("</svg>")
    return "\n".join(parts) + "\n"
