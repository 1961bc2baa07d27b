"""Grouping releases into analogous clusters with seeded k-means.

Features default to the standardized cumulative CPV (1-D); the per-release
delta can be added as a second dimension. Standardization statistics come
from the historical releases only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateDataError, ParameterError


@dataclass(frozen=True)
class FeatureEncoder:
    """z-scores points with frozen (historical) means and stddevs."""

    means: tuple
    stds: tuple

    @property
    def dim(self) -> int:
        return len(self.means)

    def encode(self, raw: Sequence[float]) -> np.ndarray:
        raw = np.asarray(raw, dtype=float)
        if raw.shape != (self.dim,):
            raise ParameterError(
                f"expected {self.dim} feature value(s), got {raw.shape}")
        return (raw - np.array(self.means)) / np.array(self.stds)

    @classmethod
    def fit(cls, rows: Sequence[Sequence[float]]) -> "FeatureEncoder":
        data = np.asarray(rows, dtype=float)
        if data.ndim != 2:
            raise ParameterError("feature rows must be 2-D")
        means = data.mean(axis=0)
        stds = data.std(axis=0)
        if np.any(stds <= 0):
            raise DegenerateDataError("zero feature variance; cannot standardize")
        return cls(means=tuple(means), stds=tuple(stds))

    def encode_rows(self, rows) -> np.ndarray:
        return np.vstack([self.encode(r) for r in rows])


@dataclass
class ClusterModel:
    k: int
    centroids: np.ndarray       # (k, d)
    assignments: list           # point index -> cluster index
    wcss: float
    iterations: int
    seed: int
    wcss_history: list = field(default_factory=list)


def _as_points(points) -> np.ndarray:
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1:
        arr = arr[:, None]
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise ParameterError("points must be a non-empty 1-D or 2-D array")
    return arr


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.einsum("ijk,ijk->ij", diff, diff)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centroids = [points[rng.integers(n)]]
    for _ in range(1, k):
        d2 = _sq_dists(points, np.vstack(centroids)).min(axis=1)
        total = d2.sum()
        if total <= 0:
            centroids.append(points[rng.integers(n)])
            continue
        probs = d2 / total
        centroids.append(points[rng.choice(n, p=probs)])
    return np.vstack(centroids)


def fit_kmeans(points, k: int, seed: int = 42, max_iter: int = 100,
               tol: float = 1e-9, init_centroids=None) -> ClusterModel:
    """Lloyd iterations from a seeded k-means++ start.

    Stops when the largest centroid shift drops below tol or max_iter is
    reached; WCSS is non-increasing across iterations. Empty clusters are
    reseeded at the point farthest from its assigned centroid.
    """
    pts = _as_points(points)
    n = pts.shape[0]
    if not 1 <= k <= n:
        raise ParameterError(f"k must satisfy 1 <= k <= {n}, got {k}")
    if max_iter < 1:
        raise ParameterError(f"max_iter must be >= 1, got {max_iter}")
    if tol < 0:
        raise ParameterError(f"tol must be >= 0, got {tol}")

    rng = np.random.default_rng(seed)
    if init_centroids is not None:
        centroids = np.asarray(init_centroids, dtype=float).copy()
        if centroids.shape != (k, pts.shape[1]):
            raise ParameterError("init_centroids shape mismatch")
    else:
        centroids = _kmeans_pp_init(pts, k, rng)

    history = []
    assignments = np.zeros(n, dtype=int)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d2 = _sq_dists(pts, centroids)
        assignments = d2.argmin(axis=1)
        # Empty-cluster repair: move the centroid onto the worst-fit point.
        for j in range(k):
            if not np.any(assignments == j):
                worst = d2[np.arange(n), assignments].argmax()
                centroids[j] = pts[worst]
                d2 = _sq_dists(pts, centroids)
                assignments = d2.argmin(axis=1)
        history.append(float(d2[np.arange(n), assignments].sum()))
        new_centroids = centroids.copy()
        for j in range(k):
            members = pts[assignments == j]
            if len(members):
                new_centroids[j] = members.mean(axis=0)
        shift = np.abs(new_centroids - centroids).max()
        centroids = new_centroids
        if shift < tol:
            break

    d2 = _sq_dists(pts, centroids)
    assignments = d2.argmin(axis=1)
    wcss = float(d2[np.arange(n), assignments].sum())
    history.append(wcss)
    return ClusterModel(
        k=k,
        centroids=centroids,
        assignments=assignments.tolist(),
        wcss=wcss,
        iterations=iterations,
        seed=seed,
        wcss_history=history,
    )


def fit_kmeans_restarts(points, k: int, seed: int = 42, restarts: int = 10,
                        max_iter: int = 100, tol: float = 1e-9,
                        warm_start=None) -> ClusterModel:
    """Best-of-restarts fit; deterministic given (points, k, seed, restarts).

    ``warm_start`` optionally adds one run initialized from given centroids
    (used to keep the WCSS curve monotone in k). Ties keep the earlier run.
    """
    if restarts < 1:
        raise ParameterError(f"restarts must be >= 1, got {restarts}")
    best: Optional[ClusterModel] = None
    for r in range(restarts):
        model = fit_kmeans(points, k, seed=seed + r, max_iter=max_iter, tol=tol)
        if best is None or model.wcss < best.wcss:
            best = model
    if warm_start is not None:
        model = fit_kmeans(points, k, seed=seed, max_iter=max_iter, tol=tol,
                           init_centroids=warm_start)
        if model.wcss < best.wcss:
            best = model
    return best


def _split_warm_start(points: np.ndarray, model: ClusterModel) -> np.ndarray:
    """Previous best centroids plus the point farthest from its centroid."""
    pts = _as_points(points)
    d2 = _sq_dists(pts, model.centroids)
    per_point = d2[np.arange(pts.shape[0]), np.asarray(model.assignments)]
    extra = pts[per_point.argmax()]
    return np.vstack([model.centroids, extra])


def wcss_curve(points, k_max: int, seed: int = 42, restarts: int = 10):
    """(k, WCSS) for k = 1..k_max plus the suggested elbow k.

    Each k takes the best of ``restarts`` seeded runs plus a warm start
    that splits the previous best solution, which keeps the curve
    non-increasing. suggested_k maximizes the second-order difference at
    interior k; the caller may always override k manually.
    """
    pts = _as_points(points)
    if not 1 <= k_max <= pts.shape[0]:
        raise ParameterError(
            f"k_max must satisfy 1 <= k_max <= {pts.shape[0]}, got {k_max}")
    curve = []
    prev: Optional[ClusterModel] = None
    models = {}
    for k in range(1, k_max + 1):
        warm = _split_warm_start(pts, prev) if prev is not None else None
        # The warm start (previous centroids + one split point) cannot raise
        # J, so the curve is non-increasing in k by construction.
        model = fit_kmeans_restarts(pts, k, seed=seed * 1000 + k, restarts=restarts,
                                    warm_start=warm)
        curve.append((k, model.wcss))
        models[k] = model
        prev = model
    suggested_k = 1
    if len(curve) >= 3:
        second_diffs = {
            curve[i][0]: curve[i - 1][1] - 2 * curve[i][1] + curve[i + 1][1]
            for i in range(1, len(curve) - 1)
        }
        suggested_k = max(second_diffs, key=lambda k: (second_diffs[k], -k))
    return curve, suggested_k, models


def assign(model: ClusterModel, point) -> int:
    """Nearest centroid by squared Euclidean distance; ties to lower index."""
    pt = np.asarray(point, dtype=float)
    if pt.ndim == 0:
        pt = pt[None]
    if pt.shape != (model.centroids.shape[1],):
        raise ParameterError(
            f"point has dimension {pt.shape}, centroids are "
            f"{model.centroids.shape[1]}-dimensional")
    d2 = ((model.centroids - pt[None, :]) ** 2).sum(axis=1)
    return int(d2.argmin())
