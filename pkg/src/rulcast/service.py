"""HTTP planning service for interactive what-if combo exploration.

All reads hit one immutable Snapshot; /api/reload rebuilds from the input
files and swaps atomically (the old snapshot keeps serving on failure).
Planning is stateless server-side: clients submit whole combos per
request.
"""

from __future__ import annotations

import threading
from typing import List, Optional

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import corpus, nlp, pipeline
from .errors import ParameterError, RulcastError
from .pipeline import RunConfig, Snapshot


class ClassifyBody(BaseModel):
    text: str


class PlanRelease(BaseModel):
    version: str
    issues: List[str] = Field(default_factory=list)
    delta_cpv: Optional[float] = None


class PlanCombo(BaseModel):
    label: str
    releases: List[PlanRelease] = Field(default_factory=list)


class PlanBody(BaseModel):
    combos: List[PlanCombo]


class SnapshotHolder:
    """Atomic snapshot swap; readers always see one consistent version."""

    def __init__(self, snapshot: Snapshot, config: RunConfig):
        self._snapshot = snapshot
        self._config = config
        self._lock = threading.Lock()

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    def reload(self) -> Snapshot:
        with self._lock:
            fresh = _build_from_config(self._config)
            self._snapshot = fresh
            return fresh


def _build_from_config(config: RunConfig) -> Snapshot:
    from pathlib import Path
    if not config.issues or not config.rt_samples:
        raise ParameterError("service config needs issues and rt_samples paths")
    issues, _ = corpus.load_issues(Path(config.issues).read_text(), format="csv")
    rt_sets = corpus.load_rt_samples(Path(config.rt_samples).read_text())
    sizing = None
    if config.corpus:
        labeled = nlp.load_sizing_corpus(Path(config.corpus).read_text())
        sizing = nlp.train_sizer(labeled, alpha=config.alpha)
    return pipeline.build_snapshot(issues, rt_sets, config, sizing_model=sizing)


def create_app(config: Optional[RunConfig] = None,
               snapshot: Optional[Snapshot] = None,
               cors_origins=("*",)) -> FastAPI:
    """Build the API over a pre-built snapshot or from config paths."""
    if snapshot is None:
        if config is None:
            raise ParameterError("create_app needs a config or a snapshot")
        snapshot = _build_from_config(config)
    holder = SnapshotHolder(snapshot, config or snapshot.config)

    app = FastAPI(title="rulcast planning service", version="1")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RulcastError)
    async def domain_error(request: Request, exc: RulcastError):
        return JSONResponse(status_code=422, content={"error": str(exc)})

    @app.exception_handler(RequestValidationError)
    async def body_error(request: Request, exc: RequestValidationError):
        # Malformed bodies get a 400 with per-field messages; 422 is
        # reserved for domain errors raised by valid requests.
        details = [
            {"field": ".".join(str(p) for p in err.get("loc", ())),
             "message": err.get("msg", "invalid")}
            for err in exc.errors()
        ]
        return JSONResponse(status_code=400, content={"errors": details})

    @app.get("/api/releases")
    def releases():
        snap = holder.snapshot
        return {
            "snapshot_version": snap.version_stamp,
            "releases": [
                {
                    "version": rec.version,
                    "ordinal": rec.ordinal,
                    "delta_cpv": rec.delta_cpv,
                    "cumulative_cpv": rec.cumulative_cpv,
                    "measured_rt_ms": rec.measured_rt_ms,
                    "cluster": snap.cluster_model.assignments[idx],
                }
                for idx, rec in enumerate(snap.releases)
            ],
            "threshold_ms": snap.config.threshold_ms,
        }

    @app.get("/api/issues")
    def issues(status: Optional[str] = None):
        snap = holder.snapshot
        pool = snap.issues
        if status == "unresolved":
            pool = [i for i in pool if not i.resolved]
        elif status == "resolved":
            pool = [i for i in pool if i.resolved]
        out = []
        for issue in pool:
            predicted_sp = issue.story_points
            if predicted_sp is None and snap.sizing_model is not None:
                tokens = nlp.normalize(f"{issue.title} {issue.description}")
                predicted_sp = nlp.classify_sp(snap.sizing_model, tokens)
            out.append({
                "id": issue.id,
                "kind": issue.kind,
                "title": issue.title,
                "description": issue.description,
                "category": issue.category,
                "subcategory": issue.subcategory,
                "impact_scale": issue.impact_scale,
                "story_points": predicted_sp,
                "sign": issue.sign,
                "resolved_release": issue.resolved_release,
            })
        return {"snapshot_version": snap.version_stamp, "issues": out}

    @app.post("/api/classify")
    def classify(body: ClassifyBody):
        snap = holder.snapshot
        if snap.sizing_model is None:
            raise ParameterError("no sizing model in this snapshot")
        tokens = nlp.normalize(body.text)
        dist = nlp.posterior(snap.sizing_model, tokens)
        category, subcategory = corpus.categorize(
            corpus.IssueRecord(id="", kind="fault", title=body.text,
                               description=body.text))
        return {
            "snapshot_version": snap.version_stamp,
            "story_points": nlp.classify_sp(snap.sizing_model, tokens),
            "posterior": {str(c): p for c, p in dist.items()},
            "category": category,
            "subcategory": subcategory,
        }

    @app.post("/api/plan")
    def plan(body: PlanBody):
        snap = holder.snapshot
        plans = pipeline.parse_plans(body.model_dump())
        reports = pipeline.project_plans(snap, plans)
        return {
            "snapshot_version": snap.version_stamp,
            "ranking": [r.label for r in reports],
            "combos": [r.to_dict() for r in reports],
        }

    @app.get("/api/model")
    def model():
        snap = holder.snapshot
        return {
            "snapshot_version": snap.version_stamp,
            "k": snap.cluster_model.k,
            "suggested_k": snap.suggested_k,
            "wcss_curve": [[k, w] for k, w in snap.wcss_curve],
            "centroids": [list(c) for c in snap.cluster_model.centroids],
            "unfittable_clusters": snap.unfittable_clusters,
            "models": {str(j): m.to_dict() for j, m in snap.models.items()},
        }

    @app.post("/api/reload")
    def reload():
        fresh = holder.reload()
        return {"snapshot_version": fresh.version_stamp}

    return app
