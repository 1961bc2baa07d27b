"""End-to-end wiring: inputs -> CPV series -> clusters -> per-cluster
regressions -> an immutable Snapshot served by the CLI and the HTTP API.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import analogs, cpv, horizon, nlp, prognosis
from .corpus import (IssueRecord, aggregate_rt, version_key)
from .errors import (DegenerateDataError, InsufficientDataError,
                     MissingDataError, ParameterError)
from .horizon import PlannedRelease, ReleasePlan


@dataclass(frozen=True)
class RunConfig:
    threshold_ms: float = 9000.0
    alpha: float = 1.0
    k: Optional[int] = None          # manual override; None = elbow suggestion
    k_max: int = 6
    seed: int = 42
    restarts: int = 10
    train_fraction: float = 0.8
    fold_count: int = 2
    cluster_features: str = "cumulative"   # or "cumulative+delta"
    base_cpv: float = 0.0
    issues: Optional[str] = None
    rt_samples: Optional[str] = None
    corpus: Optional[str] = None
    plans: Optional[str] = None
    category_matrix: Optional[str] = None
    stop_words: Optional[str] = None

    def __post_init__(self):
        if self.threshold_ms <= 0:
            raise ParameterError(f"threshold_ms must be > 0, got {self.threshold_ms}")
        if self.alpha <= 0:
            raise ParameterError(f"alpha must be > 0, got {self.alpha}")
        if self.k is not None and self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if self.restarts < 1:
            raise ParameterError(f"restarts must be >= 1, got {self.restarts}")
        if not 0 < self.train_fraction < 1:
            raise ParameterError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.fold_count < 2:
            raise ParameterError(f"fold_count must be >= 2, got {self.fold_count}")
        if self.cluster_features not in ("cumulative", "cumulative+delta"):
            raise ParameterError(
                f"unknown cluster_features '{self.cluster_features}'")

    @property
    def use_delta_feature(self) -> bool:
        return self.cluster_features == "cumulative+delta"


@dataclass
class Snapshot:
    """Immutable trained bundle; everything the planner queries."""

    config: RunConfig
    issues: list                      # all IssueRecords
    releases: list                    # historical ReleaseRecords, ordered
    encoder: analogs.FeatureEncoder
    cluster_model: analogs.ClusterModel
    wcss_curve: list                  # [(k, wcss)]
    suggested_k: int
    models: dict                      # cluster index -> RegressionModel
    unfittable_clusters: list
    sizing_model: Optional[nlp.SizingModel]
    version_stamp: str

    @property
    def base_qp(self) -> int:
        return self.releases[-1].cumulative_qp if self.releases else 0

    @property
    def issues_by_id(self) -> dict:
        return {i.id: i for i in self.issues}

    def cluster_of(self, version: str) -> int:
        for idx, rec in enumerate(self.releases):
            if rec.version == version:
                return self.cluster_model.assignments[idx]
        raise MissingDataError(f"unknown release {version}")


def _feature_rows(records, use_delta: bool):
    rows = []
    for rec in records:
        row = [rec.cumulative_cpv]
        if use_delta:
            row.append(rec.delta_cpv)
        rows.append(row)
    return rows


def _version_stamp(issues, rt_by_release, config: RunConfig) -> str:
    digest = hashlib.sha256()
    for issue in sorted(issues, key=lambda i: i.id):
        digest.update(repr(issue).encode())
    for version in sorted(rt_by_release):
        digest.update(f"{version}={rt_by_release[version]!r}".encode())
    digest.update(json.dumps({
        "threshold_ms": config.threshold_ms, "k": config.k,
        "seed": config.seed, "restarts": config.restarts,
        "cluster_features": config.cluster_features,
    }, sort_keys=True).encode())
    return digest.hexdigest()[:16]


def build_snapshot(issues: Sequence[IssueRecord], rt_sets,
                   config: RunConfig = RunConfig(),
                   sizing_model: Optional[nlp.SizingModel] = None) -> Snapshot:
    """Train the full pipeline over historical data.

    Historical releases are the resolved releases of the issue store, in
    version order; every one needs RT measurements.
    """
    issues = list(issues)
    versions = sorted({i.resolved_release for i in issues if i.resolved},
                      key=version_key)
    if not versions:
        raise MissingDataError("no resolved issues; cannot build release history")

    rt_by_release = {v: aggregate_rt(rt_sets, v) for v in versions}
    releases = cpv.build_release_records(
        issues, versions, base_qp=cpv.to_quarter_points(config.base_cpv),
        measured_rt=rt_by_release)

    rows = _feature_rows(releases, config.use_delta_feature)
    encoder = analogs.FeatureEncoder.fit(rows)
    points = encoder.encode_rows(rows)

    k_max = min(config.k_max, len(points))
    curve, suggested_k, _ = analogs.wcss_curve(
        points, k_max, seed=config.seed, restarts=config.restarts)
    k = config.k if config.k is not None else suggested_k
    if not 1 <= k <= len(points):
        raise ParameterError(
            f"k={k} out of range for {len(points)} historical releases")
    cluster_model = analogs.fit_kmeans_restarts(
        points, k, seed=config.seed, restarts=config.restarts)

    models = {}
    unfittable = []
    for j in range(cluster_model.k):
        member_idx = [i for i, a in enumerate(cluster_model.assignments) if a == j]
        xs = [releases[i].cumulative_cpv for i in member_idx]
        ys = [releases[i].measured_rt_ms for i in member_idx]
        try:
            models[j] = prognosis.fit_line(xs, ys, cluster=j)
        except (InsufficientDataError, DegenerateDataError):
            unfittable.append(j)

    return Snapshot(
        config=config,
        issues=issues,
        releases=releases,
        encoder=encoder,
        cluster_model=cluster_model,
        wcss_curve=curve,
        suggested_k=suggested_k,
        models=models,
        unfittable_clusters=unfittable,
        sizing_model=sizing_model,
        version_stamp=_version_stamp(issues, rt_by_release, config),
    )


def project_plan(snapshot: Snapshot, plan: ReleasePlan) -> horizon.RulReport:
    """build_plan -> project_rt -> estimate_rul against one snapshot."""
    plan_cpv = horizon.build_plan(plan, snapshot.issues_by_id, snapshot.base_qp)
    projections = horizon.project_rt(
        plan, plan_cpv, snapshot.encoder, snapshot.cluster_model,
        snapshot.models, use_delta_feature=snapshot.config.use_delta_feature)
    return horizon.estimate_rul(plan.label, projections,
                                snapshot.config.threshold_ms)


def project_plans(snapshot: Snapshot, plans: Sequence[ReleasePlan]) -> list:
    """RulReports for every plan, ranked best-first."""
    reports = [project_plan(snapshot, plan) for plan in plans]
    return horizon.rank_combos(reports)


def parse_plans(payload) -> list:
    """Parse the combos document (dict or JSON text) into ReleasePlans."""
    if isinstance(payload, (str, bytes)):
        payload = json.loads(payload)
    if not isinstance(payload, dict) or "combos" not in payload:
        raise ParameterError("plan document must be an object with a 'combos' list")
    plans = []
    for combo in payload["combos"]:
        label = combo.get("label")
        if not label:
            raise ParameterError("every combo needs a label")
        releases = []
        for rel in combo.get("releases", []):
            version = rel.get("version")
            if not version:
                raise ParameterError(f"combo '{label}': release without version")
            override = rel.get("delta_cpv")
            releases.append(PlannedRelease(
                version=version,
                issue_ids=tuple(rel.get("issues", ())),
                delta_override_qp=None if override is None
                else cpv.to_quarter_points(override),
            ))
        plans.append(ReleasePlan(label=label, releases=tuple(releases)))
    return plans
