"""Per-cluster simple linear regression of response time on cumulative CPV.

The slope p-value is the two-sided Student-t tail, evaluated through the
regularized incomplete beta function (continued fraction, ~1e-10 absolute
error) so no statistics library is required.
"""

from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

from .errors import DegenerateDataError, InsufficientDataError, ParameterError


@dataclass
class RegressionModel:
    cluster: Optional[int]
    slope: float                # ms per CPV unit
    intercept: float            # ms
    n: int
    pearson_r: float
    r_squared: float
    adjusted_r_squared: float
    slope_se: float
    t_statistic: float
    p_value: float
    residuals: list
    x_min: float
    x_max: float
    degenerate_target: bool = False

    def to_dict(self) -> dict:
        return {
            "cluster": self.cluster,
            "slope": self.slope,
            "intercept": self.intercept,
            "n": self.n,
            "pearson_r": self.pearson_r,
            "r_squared": self.r_squared,
            "adjusted_r_squared": self.adjusted_r_squared,
            "slope_se": self.slope_se,
            "t_statistic": self.t_statistic,
            "p_value": self.p_value,
            "x_min": self.x_min,
            "x_max": self.x_max,
            "degenerate_target": self.degenerate_target,
        }


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.8
    seed: int = 42
    fold_count: int = 2

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ParameterError(
                f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if self.fold_count < 2:
            raise ParameterError(f"fold_count must be >= 2, got {self.fold_count}")


def _log_beta(a: float, b: float) -> float:
    return math.lgamma(a) + math.lgamma(b) - math.lgamma(a + b)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (Lentz)."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, 300):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-12:
            break
    return h


def reg_incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized I_x(a, b), target absolute error ~1e-10."""
    if not 0.0 <= x <= 1.0:
        raise ParameterError(f"x must be in [0, 1], got {x}")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    front = math.exp(a * math.log(x) + b * math.log(1.0 - x) - _log_beta(a, b))
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def t_two_sided_p(t: float, df: int) -> float:
    """P(|T| >= |t|) for Student-t with df degrees of freedom."""
    if df < 1:
        raise ParameterError(f"degrees of freedom must be >= 1, got {df}")
    if math.isinf(t):
        return 0.0
    x = df / (df + t * t)
    return reg_incomplete_beta(df / 2.0, 0.5, x)


def pearson(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Sample correlation; requires n >= 2 and both variances > 0."""
    n = len(xs)
    if n != len(ys):
        raise ParameterError("xs and ys lengths differ")
    if n < 2:
        raise InsufficientDataError(f"need at least 2 points, got {n}")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    syy = sum((y - mean_y) ** 2 for y in ys)
    if sxx == 0 or syy == 0:
        raise DegenerateDataError("zero variance; correlation undefined")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    return sxy / math.sqrt(sxx * syy)


def fit_line(xs: Sequence[float], ys: Sequence[float],
             cluster: Optional[int] = None) -> RegressionModel:
    """Closed-form OLS with the full validation statistics block."""
    n = len(xs)
    if n != len(ys):
        raise ParameterError("xs and ys lengths differ")
    if n < 3:
        raise InsufficientDataError(f"need at least 3 points to fit, got {n}")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    syy = sum((y - mean_y) ** 2 for y in ys)
    if sxx == 0:
        raise DegenerateDataError("all x values equal; predictor is degenerate")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = mean_y - slope * mean_x
    residuals = [y - (slope * x + intercept) for x, y in zip(xs, ys)]
    ssr = sum(r * r for r in residuals)

    if syy == 0:
        # Flat target: the fit is exact (slope 0); R^2 is defined as 1.
        warnings.warn("target variance is zero; R^2 defined as 1", stacklevel=2)
        return RegressionModel(
            cluster=cluster, slope=slope, intercept=intercept, n=n,
            pearson_r=1.0, r_squared=1.0, adjusted_r_squared=1.0,
            slope_se=0.0, t_statistic=0.0, p_value=1.0, residuals=residuals,
            x_min=min(xs), x_max=max(xs), degenerate_target=True)

    r = sxy / math.sqrt(sxx * syy)
    r_squared = 1.0 - ssr / syy
    adjusted = 1.0 - (1.0 - r_squared) * (n - 1) / (n - 2)
    sigma2 = ssr / (n - 2)
    slope_se = math.sqrt(sigma2) / math.sqrt(sxx)
    t_stat = slope / slope_se if slope_se > 0 else math.inf * (1 if slope >= 0 else -1)
    p_value = t_two_sided_p(t_stat, n - 2)
    return RegressionModel(
        cluster=cluster, slope=slope, intercept=intercept, n=n,
        pearson_r=r, r_squared=r_squared, adjusted_r_squared=adjusted,
        slope_se=slope_se, t_statistic=t_stat, p_value=p_value,
        residuals=residuals, x_min=min(xs), x_max=max(xs))


def predict_rt(model: RegressionModel, cpv: float) -> float:
    """m * cpv + b; callers flag extrapolation outside [x_min, x_max]."""
    return model.slope * cpv + model.intercept


def is_extrapolation(model: RegressionModel, cpv: float) -> bool:
    return cpv < model.x_min or cpv > model.x_max


def train_test_split(data: Sequence, spec: SplitSpec = SplitSpec()):
    """Seeded shuffle then split; disjoint, exhaustive, deterministic."""
    data = list(data)
    n = len(data)
    n_train = round(spec.train_fraction * n)
    if n_train < 1 or n - n_train < 1:
        raise InsufficientDataError(
            f"cannot split {n} points at fraction {spec.train_fraction}: "
            "both parts need at least 1 element")
    order = list(range(n))
    random.Random(spec.seed).shuffle(order)
    train = [data[i] for i in order[:n_train]]
    test = [data[i] for i in order[n_train:]]
    return train, test


def kfold_cv(data: Sequence, k: int = 2, seed: int = 42):
    """Seeded k-fold cross validation; score = out-of-fold R^2 per fold.

    Returns (fold_scores, mean_score).
    """
    data = list(data)
    n = len(data)
    if k < 2:
        raise ParameterError(f"k must be >= 2, got {k}")
    if k > n:
        raise ParameterError(f"k={k} exceeds {n} data points")
    order = list(range(n))
    random.Random(seed).shuffle(order)
    base, extra = divmod(n, k)
    folds = []
    start = 0
    for i in range(k):
        size = base + (1 if i < extra else 0)
        folds.append(order[start:start + size])
        start += size
    scores = []
    for i, fold in enumerate(folds):
        hold = set(fold)
        train = [data[j] for j in order if j not in hold]
        if len(train) < 3:
            raise InsufficientDataError(
                f"fold {i}: only {len(train)} training points (need >= 3)")
        xs, ys = zip(*train)
        model = fit_line(list(xs), list(ys))
        vx = [data[j][0] for j in fold]
        vy = [data[j][1] for j in fold]
        mean_v = sum(vy) / len(vy)
        sst = sum((y - mean_v) ** 2 for y in vy)
        if sst == 0:
            raise DegenerateDataError(
                f"fold {i}: constant target in validation fold")
        sse = sum((y - predict_rt(model, x)) ** 2 for x, y in zip(vx, vy))
        scores.append(1.0 - sse / sst)
    return scores, sum(scores) / len(scores)
