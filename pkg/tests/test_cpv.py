import pytest
from hypothesis import given, strategies as st

from rulcast import cpv
from rulcast.corpus import IMPACT_FACTORS, IMPACT_QUARTERS, IssueRecord
from rulcast.errors import ParameterError, SizingMissingError


def issue(sign, sp, impact, issue_id="X"):
    return IssueRecord(id=issue_id, kind="fault", impact_scale=impact,
                       story_points=sp, sign=sign)


def test_impact_table_matches_quarters():
    assert IMPACT_FACTORS == {"critical": 1.0, "major": 0.75,
                              "medium": 0.5, "minor": 0.25}
    for scale, factor in IMPACT_FACTORS.items():
        assert IMPACT_QUARTERS[scale] == factor * 4


def test_quarter_point_round_trip():
    for value in (-0.75, 0, 0.25, 36.5, 37.75, 19, -4.25):
        assert cpv.from_quarter_points(cpv.to_quarter_points(value)) == value


def test_non_quarter_value_rejected():
    with pytest.raises(ParameterError):
        cpv.to_quarter_points(0.1)


def test_empty_release_delta_is_zero():
    assert cpv.release_delta([]) == 0


def test_single_improving_major_sp1():
    # One improving SP-1 issue at major impact: -0.75.
    delta = cpv.release_delta([issue("-", 1, "major")])
    assert cpv.from_quarter_points(delta) == -0.75


def test_mixed_release_delta():
    issues = [issue("+", 3, "critical", "a"), issue("+", 5, "medium", "b"),
              issue("-", 2, "minor", "c")]
    assert cpv.from_quarter_points(cpv.release_delta(issues)) == 5.0


def test_missing_story_points_named():
    with pytest.raises(SizingMissingError) as err:
        cpv.release_delta([IssueRecord(id="B-9", kind="fault", sign="+",
                                       impact_scale="major")])
    assert "B-9" in str(err.value)


def test_cumulative_single():
    assert cpv.cumulative_series(0, [cpv.to_quarter_points(5)]) == [20]


def test_cumulative_paper_anchor_values():
    base = cpv.to_quarter_points(37.75)
    deltas = [cpv.to_quarter_points(d) for d in (-0.75, -0.5)]
    series = cpv.cumulative_series(base, deltas)
    assert [cpv.from_quarter_points(v) for v in series] == [37.0, 36.5]


def test_cumulative_combo_series():
    base = cpv.to_quarter_points(36.5)
    deltas = [cpv.to_quarter_points(d) for d in (19, -4.25, 4, 2, 3, 16.75)]
    series = [cpv.from_quarter_points(v) for v in cpv.cumulative_series(base, deltas)]
    assert series == [55.5, 51.25, 55.25, 57.25, 60.25, 77.0]


issues_strategy = st.lists(
    st.builds(
        issue,
        st.sampled_from(["+", "-"]),
        st.sampled_from([1, 2, 3, 5, 8]),
        st.sampled_from(list(IMPACT_FACTORS)),
        st.text(min_size=1, max_size=4),
    ),
    max_size=12,
)


@given(issues_strategy, issues_strategy)
def test_additivity(a, b):
    assert cpv.release_delta(a + b) == cpv.release_delta(a) + cpv.release_delta(b)


@given(issues_strategy)
def test_sign_flip_negates(items):
    flipped = [IssueRecord(id=i.id, kind=i.kind, impact_scale=i.impact_scale,
                           story_points=i.story_points,
                           sign="-" if i.sign == "+" else "+")
               for i in items]
    assert cpv.release_delta(flipped) == -cpv.release_delta(items)


@given(st.integers(-200, 200), st.lists(st.integers(-100, 100), max_size=20))
def test_cumulative_last_is_base_plus_sum(base, deltas):
    series = cpv.cumulative_series(base, deltas)
    assert len(series) == len(deltas)
    if deltas:
        assert series[-1] == base + sum(deltas)


@given(st.lists(st.integers(-40, 40), min_size=3, max_size=10),
       st.data())
def test_moving_issue_changes_only_span(deltas, data):
    # Moving one quarter-point unit from release i to j shifts only the
    # cumulative values in the half-open span between them.
    i = data.draw(st.integers(0, len(deltas) - 1))
    j = data.draw(st.integers(0, len(deltas) - 1))
    moved = list(deltas)
    moved[i] -= 1
    moved[j] += 1
    before = cpv.cumulative_series(0, deltas)
    after = cpv.cumulative_series(0, moved)
    lo, hi = min(i, j), max(i, j)
    for idx, (x, y) in enumerate(zip(before, after)):
        if lo <= idx < hi:
            assert x != y
        else:
            assert x == y
