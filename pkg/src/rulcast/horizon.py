"""Future release plans (combos), RT projection and RUL estimation."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import analogs, cpv, prognosis
from .errors import (ComparisonError, InsufficientDataError, ParameterError,
                     PlanValidationError)

DEFAULT_THRESHOLD_MS = 9000.0


@dataclass(frozen=True)
class PlannedRelease:
    """One future release: issue contents or a direct delta override."""

    version: str
    issue_ids: tuple = ()
    delta_override_qp: Optional[int] = None


@dataclass(frozen=True)
class ReleasePlan:
    label: str
    releases: tuple


@dataclass
class ReleaseProjection:
    version: str
    delta_qp: int
    cumulative_qp: int
    cluster: int
    predicted_rt_ms: float
    extrapolated: bool
    crossed: bool = False

    @property
    def cumulative_cpv(self) -> float:
        return cpv.from_quarter_points(self.cumulative_qp)


@dataclass
class RulReport:
    label: str
    releases: list              # ReleaseProjection per planned release
    threshold_ms: float
    first_crossing: Optional[int]   # 0-based index into releases
    rul_releases: int
    censored: bool

    def to_dict(self) -> dict:
        return {
            "combo": self.label,
            "threshold_ms": self.threshold_ms,
            "first_crossing": self.first_crossing,
            "rul_releases": self.rul_releases,
            "censored": self.censored,
            "releases": [
                {
                    "version": r.version,
                    "delta_cpv": cpv.from_quarter_points(r.delta_qp),
                    "cumulative_cpv": r.cumulative_cpv,
                    "cluster": r.cluster,
                    "predicted_rt_ms": r.predicted_rt_ms,
                    "extrapolated": r.extrapolated,
                    "crossed": r.crossed,
                }
                for r in self.releases
            ],
        }


def build_plan(plan: ReleasePlan, issues_by_id: dict, base_qp: int):
    """Per-release (delta, cumulative) CPV for a plan, exact quarter points.

    Every referenced issue must exist, be unresolved, be sized/signed, and
    appear at most once across the plan's releases.
    """
    seen = set()
    deltas = []
    for rel in plan.releases:
        if rel.delta_override_qp is not None:
            deltas.append(rel.delta_override_qp)
            continue
        total = 0
        for issue_id in rel.issue_ids:
            if issue_id in seen:
                raise PlanValidationError(
                    f"plan '{plan.label}': issue '{issue_id}' listed in more "
                    "than one release")
            seen.add(issue_id)
            issue = issues_by_id.get(issue_id)
            if issue is None:
                raise PlanValidationError(
                    f"plan '{plan.label}': unknown issue '{issue_id}'")
            if issue.resolved:
                raise PlanValidationError(
                    f"plan '{plan.label}': issue '{issue_id}' is already resolved")
            total += cpv.issue_contribution(issue)
        deltas.append(total)
    cumulatives = cpv.cumulative_series(base_qp, deltas)
    return list(zip(deltas, cumulatives))


def project_rt(plan: ReleasePlan, plan_cpv, encoder: analogs.FeatureEncoder,
               cluster_model: analogs.ClusterModel, models: dict,
               use_delta_feature: bool = False) -> list:
    """Assign each planned release to its nearest cluster and predict RT.

    ``plan_cpv`` is the (delta_qp, cumulative_qp) list from build_plan;
    ``models`` maps cluster index -> RegressionModel.
    """
    projections = []
    for rel, (delta_qp, cum_qp) in zip(plan.releases, plan_cpv):
        raw = [cpv.from_quarter_points(cum_qp)]
        if use_delta_feature:
            raw.append(cpv.from_quarter_points(delta_qp))
        point = encoder.encode(raw)
        cluster = analogs.assign(cluster_model, point)
        model = models.get(cluster)
        if model is None:
            raise InsufficientDataError(
                f"release {rel.version}: cluster {cluster} has no fitted "
                "regression model")
        x = cpv.from_quarter_points(cum_qp)
        projections.append(ReleaseProjection(
            version=rel.version,
            delta_qp=delta_qp,
            cumulative_qp=cum_qp,
            cluster=cluster,
            predicted_rt_ms=prognosis.predict_rt(model, x),
            extrapolated=prognosis.is_extrapolation(model, x),
        ))
    return projections


def estimate_rul(label: str, projections: Sequence[ReleaseProjection],
                 threshold_ms: float) -> RulReport:
    """First strict threshold crossing at release granularity.

    rul_releases counts planned releases strictly before the crossing;
    censored when the trajectory never exceeds the threshold.
    """
    if not projections:
        raise ParameterError("empty trajectory")
    if threshold_ms <= 0:
        raise ParameterError(f"threshold must be > 0, got {threshold_ms}")
    first_crossing = None
    for idx, proj in enumerate(projections):
        proj.crossed = proj.predicted_rt_ms > threshold_ms
        if proj.crossed and first_crossing is None:
            first_crossing = idx
    censored = first_crossing is None
    return RulReport(
        label=label,
        releases=list(projections),
        threshold_ms=threshold_ms,
        first_crossing=first_crossing,
        rul_releases=len(projections) if censored else first_crossing,
        censored=censored,
    )


def rank_combos(reports: Sequence[RulReport]) -> list:
    """Descending RUL; censored combos first; ties by lower final predicted
    RT, then by label."""
    reports = list(reports)
    if not reports:
        return []
    thresholds = {r.threshold_ms for r in reports}
    if len(thresholds) > 1:
        raise ComparisonError(
            f"reports use different thresholds: {sorted(thresholds)}")

    def key(report: RulReport):
        final_rt = report.releases[-1].predicted_rt_ms if report.releases else 0.0
        return (
            0 if report.censored else 1,
            -report.rul_releases,
            final_rt,
            report.label,
        )

    return sorted(reports, key=key)
