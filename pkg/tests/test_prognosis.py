import math
import random

import numpy as np
import pytest
from scipy import integrate

from rulcast import prognosis
from rulcast.errors import (DegenerateDataError, InsufficientDataError,
                            ParameterError)
from rulcast.prognosis import (SplitSpec, fit_line, kfold_cv, pearson,
                               predict_rt, t_two_sided_p, train_test_split)


def t_p_oracle(t, df):
    """Two-sided tail by numerical integration of the t density."""
    def pdf(u):
        c = math.gamma((df + 1) / 2) / (math.sqrt(df * math.pi) * math.gamma(df / 2))
        return c * (1 + u * u / df) ** (-(df + 1) / 2)
    tail, _ = integrate.quad(pdf, abs(t), np.inf)
    return 2 * tail


def ols_oracle(xs, ys):
    """Independent coefficients via numpy least squares."""
    A = np.vstack([np.asarray(xs), np.ones(len(xs))]).T
    (slope, intercept), res, _, _ = np.linalg.lstsq(A, np.asarray(ys), rcond=None)
    return slope, intercept


def test_exact_line():
    model = fit_line([0, 1, 2], [1, 3, 5])
    assert model.slope == pytest.approx(2.0, abs=1e-12)
    assert model.intercept == pytest.approx(1.0, abs=1e-12)
    assert model.r_squared == pytest.approx(1.0, abs=1e-12)
    assert all(abs(r) < 1e-12 for r in model.residuals)


def test_hand_worked_fixture():
    model = fit_line([0, 1, 2], [0, 1, 1])
    assert model.slope == pytest.approx(0.5, abs=1e-12)
    assert model.intercept == pytest.approx(1 / 6, abs=1e-12)
    assert model.r_squared == pytest.approx(0.75, abs=1e-12)


def test_insufficient_and_degenerate():
    with pytest.raises(InsufficientDataError):
        fit_line([0, 1], [0, 1])
    with pytest.raises(DegenerateDataError):
        fit_line([2, 2, 2], [0, 1, 2])


def test_flat_target_r2_defined_as_one():
    with pytest.warns(UserWarning):
        model = fit_line([0, 1, 2], [5, 5, 5])
    assert model.degenerate_target
    assert model.r_squared == 1.0
    assert model.slope == pytest.approx(0.0)


def random_dataset(rnd, n=None):
    n = n or rnd.randint(5, 40)
    slope = rnd.uniform(-50, 50)
    intercept = rnd.uniform(-1000, 1000)
    xs = [rnd.uniform(-10, 10) for _ in range(n)]
    ys = [slope * x + intercept + rnd.gauss(0, rnd.uniform(0.1, 30))
          for x in xs]
    return xs, ys


def test_matches_oracles_on_random_data():
    rnd = random.Random(1234)
    for _ in range(200):
        xs, ys = random_dataset(rnd)
        model = fit_line(xs, ys)
        slope, intercept = ols_oracle(xs, ys)
        assert model.slope == pytest.approx(slope, abs=1e-9, rel=1e-9)
        assert model.intercept == pytest.approx(intercept, abs=1e-9, rel=1e-9)
        # R^2 and adjusted R^2 from definitions.
        yhat = [model.slope * x + model.intercept for x in xs]
        ybar = sum(ys) / len(ys)
        ssr = sum((y - f) ** 2 for y, f in zip(ys, yhat))
        sst = sum((y - ybar) ** 2 for y in ys)
        n = len(xs)
        assert model.r_squared == pytest.approx(1 - ssr / sst, abs=1e-9)
        assert model.adjusted_r_squared == pytest.approx(
            1 - (1 - model.r_squared) * (n - 1) / (n - 2), abs=1e-9)
        assert model.p_value == pytest.approx(
            t_p_oracle(model.t_statistic, n - 2), abs=1e-6)


def test_regression_invariants_on_random_data():
    rnd = random.Random(77)
    for _ in range(100):
        xs, ys = random_dataset(rnd)
        model = fit_line(xs, ys)
        n, max_y = len(xs), max(abs(y) for y in ys)
        tol = 1e-9 * n * max(max_y, 1.0)
        assert 0.0 <= model.r_squared <= 1.0 + 1e-12
        assert model.r_squared == pytest.approx(model.pearson_r ** 2, abs=1e-9)
        if n > 2:
            assert model.adjusted_r_squared <= model.r_squared + 1e-12
        assert abs(sum(model.residuals)) < tol
        assert abs(sum(r * x for r, x in zip(model.residuals, xs))) < tol * 10
        assert 0.0 < model.p_value <= 1.0


def test_ols_local_optimality():
    rnd = random.Random(3)
    for _ in range(20):
        xs, ys = random_dataset(rnd, n=15)
        model = fit_line(xs, ys)

        def ssr(m, b):
            return sum((y - (m * x + b)) ** 2 for x, y in zip(xs, ys))

        base = ssr(model.slope, model.intercept)
        em = 1e-4 * max(abs(model.slope), 1.0)
        eb = 1e-4 * max(abs(model.intercept), 1.0)
        for dm in (-em, 0.0, em):
            for db in (-eb, 0.0, eb):
                if dm == 0.0 and db == 0.0:
                    continue
                assert ssr(model.slope + dm, model.intercept + db) >= base - 1e-9


def test_scale_equivariance():
    rnd = random.Random(9)
    xs, ys = random_dataset(rnd, n=20)
    base = fit_line(xs, ys)
    s = 3.75
    scaled = fit_line(xs, [y * s for y in ys])
    assert scaled.slope == pytest.approx(base.slope * s, rel=1e-9)
    assert scaled.intercept == pytest.approx(base.intercept * s, rel=1e-9)
    for a, b in zip(scaled.residuals, base.residuals):
        assert a == pytest.approx(b * s, rel=1e-9, abs=1e-9)
    assert scaled.pearson_r == pytest.approx(base.pearson_r, abs=1e-9)
    assert scaled.r_squared == pytest.approx(base.r_squared, abs=1e-9)
    assert scaled.t_statistic == pytest.approx(base.t_statistic, rel=1e-9)
    assert scaled.p_value == pytest.approx(base.p_value, abs=1e-9)


def test_p_monotone_in_t():
    for df in (1, 2, 5, 10, 30):
        grid = [t_two_sided_p(t / 4, df) for t in range(0, 60)]
        assert all(a >= b for a, b in zip(grid, grid[1:]))
        assert grid[0] == pytest.approx(1.0, abs=1e-12)


def test_t_tail_against_quadrature():
    for df in (1, 3, 8, 28):
        for t in (0.1, 0.5, 1.0, 2.0, 4.5, 10.0):
            assert t_two_sided_p(t, df) == pytest.approx(
                t_p_oracle(t, df), abs=1e-8)


def test_predict_direct():
    model = fit_line([0, 1, 2], [1000, 1100, 1200])
    model.slope, model.intercept = 100.0, 1000.0
    assert predict_rt(model, 40) == 5000.0
    assert predict_rt(model, 0) == 1000.0


def test_predict_interpolates_perfect_fit():
    model = fit_line([0, 1, 2], [1, 3, 5])
    assert predict_rt(model, 1) == pytest.approx(3.0, abs=1e-12)


def test_pearson_limits():
    xs = [1.0, 2.0, 3.0, 4.0]
    assert pearson(xs, xs) == pytest.approx(1.0)
    assert pearson(xs, [-x for x in xs]) == pytest.approx(-1.0)
    assert pearson([0, 1, 2], [0, 1, 1]) == pytest.approx(math.sqrt(0.75), abs=1e-12)
    with pytest.raises(DegenerateDataError):
        pearson([1, 1, 1], [1, 2, 3])


def test_split_sizes_and_determinism():
    data = list(range(10))
    train, test = train_test_split(data, SplitSpec(train_fraction=0.8, seed=5))
    assert len(train) == 8 and len(test) == 2
    assert sorted(train + test) == data
    train2, test2 = train_test_split(data, SplitSpec(train_fraction=0.8, seed=5))
    assert (train, test) == (train2, test2)
    half, rest = train_test_split(list(range(4)), SplitSpec(train_fraction=0.5, seed=0))
    assert len(half) == 2 and len(rest) == 2


def test_split_too_small():
    with pytest.raises(InsufficientDataError):
        train_test_split([1, 2], SplitSpec(train_fraction=0.8))


def test_kfold_perfect_line():
    data = [(x, 2 * x + 1) for x in range(10)]
    scores, mean = kfold_cv(data, k=2, seed=1)
    assert all(s == pytest.approx(1.0, abs=1e-9) for s in scores)
    assert mean == pytest.approx(1.0, abs=1e-9)


def test_kfold_degenerate_validation_fold():
    # Constant target in every validation fold: no out-of-fold variance.
    data = [(float(i), 5.0) for i in range(8)]
    with pytest.warns(UserWarning):
        with pytest.raises(DegenerateDataError):
            kfold_cv(data, k=2, seed=0)


def test_kfold_mean_is_average_and_recomputable():
    rnd = random.Random(21)
    data = [(float(i), 80.0 * i + 300 + rnd.gauss(0, 15)) for i in range(10)]
    scores, mean = kfold_cv(data, k=2, seed=42)
    assert mean == pytest.approx(sum(scores) / len(scores), abs=1e-12)
    assert min(scores) - 1e-12 <= mean <= max(scores) + 1e-12
    # Recompute the folds independently from the same seeded shuffle.
    order = list(range(10))
    random.Random(42).shuffle(order)
    folds = [order[:5], order[5:]]
    for fold, reported in zip(folds, scores):
        hold = set(fold)
        train = [data[j] for j in order if j not in hold]
        model = fit_line([x for x, _ in train], [y for _, y in train])
        vy = [data[j][1] for j in fold]
        vx = [data[j][0] for j in fold]
        ybar = sum(vy) / len(vy)
        sse = sum((y - predict_rt(model, x)) ** 2 for x, y in zip(vx, vy))
        sst = sum((y - ybar) ** 2 for y in vy)
        assert reported == pytest.approx(1 - sse / sst, abs=1e-12)


def test_kfold_parameter_checks():
    data = [(float(i), float(i)) for i in range(10)]
    with pytest.raises(ParameterError):
        kfold_cv(data, k=1)
    with pytest.raises(InsufficientDataError):
        kfold_cv(data[:4], k=2)
