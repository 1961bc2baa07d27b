"""Bundled demonstration dataset: 10 historical releases, an unresolved
issue pool, and four candidate future-release combos over 6 releases.

The release/cluster labels mirror the published case study; the numeric
feature values are constructed so the expected grouping and combo ranking
are reproducible from this fixture alone.
"""

from __future__ import annotations

import json
from pathlib import Path

from .corpus import IssueRecord, RtSampleSet
from .horizon import PlannedRelease, ReleasePlan

HISTORICAL_VERSIONS = (
    "3.6.3", "4.4.0", "4.4.9", "5.0.0", "5.0.1",
    "5.0.2", "5.0.3", "5.0.4", "5.0.5", "5.0.6",
)
FUTURE_VERSIONS = ("6.0.0", "6.5.0", "6.5.1", "7.0.0", "7.5.0", "7.5.1")

# Expected analogous-release grouping (k=2 over cumulative+delta features),
# keyed by version; future labels apply under the Combo-1 arrangement.
EXPECTED_CLUSTERS = {
    "3.6.3": "A", "4.4.0": "A", "4.4.9": "A", "5.0.0": "A", "5.0.1": "A",
    "5.0.2": "B", "5.0.3": "A", "5.0.4": "A", "5.0.5": "B", "5.0.6": "B",
    "6.0.0": "A", "6.5.0": "B", "6.5.1": "A", "7.0.0": "A", "7.5.0": "A",
    "7.5.1": "A",
}

# (id, kind, title, release, impact, story_points, sign)
_HISTORICAL_ISSUES = (
    ("H1a", "fault", "Server overloaded under peak traffic on the home page", "3.6.3", "critical", 8, "+"),
    ("H1b", "fault", "Login page renders slowly for guest accounts", "3.6.3", "minor", 8, "+"),
    ("H2a", "fault", "Search query scans the full bugs table", "4.4.0", "critical", 8, "+"),
    ("H3a", "fault", "Attachment storage fills the database volume", "4.4.9", "critical", 5, "+"),
    ("H3b", "enhancement", "Add audit columns to the activity table", "4.4.9", "minor", 8, "+"),
    ("H4a", "fault", "Apache workers exhaust memory under report load", "5.0.0", "major", 8, "+"),
    ("H5a", "fault", "Slow network services when mail queue backs up", "5.0.1", "critical", 5, "+"),
    ("H5b", "enhancement", "New dashboard widgets on the index page", "5.0.1", "critical", 2, "+"),
    ("H6a", "enhancement", "Drop the graphical report feature", "5.0.2", "critical", 8, "-"),
    ("H6b", "enhancement", "Trim unused columns from the profiles table", "5.0.2", "medium", 2, "-"),
    ("H7a", "fault", "Configuration parser re-reads parameter file per request", "5.0.3", "major", 8, "+"),
    ("H7b", "enhancement", "Extend search syntax with quoted phrases", "5.0.3", "medium", 2, "+"),
    ("H8a", "fault", "Browse page duplicates component lookups", "5.0.4", "critical", 3, "+"),
    ("H8b", "fault", "Preferences page revalidates every session token", "5.0.4", "critical", 3, "+"),
    ("H9a", "enhancement", "Reformat code and move bugs_fulltext to InnoDB", "5.0.5", "major", 8, "-"),
    ("H9b", "enhancement", "Cache category matrix lookups", "5.0.5", "critical", 3, "-"),
    ("H10a", "enhancement", "Remove legacy chart rendering from the server", "5.0.6", "critical", 8, "-"),
    ("H10b", "enhancement", "Compress static assets at install time", "5.0.6", "medium", 1, "-"),
)

# Unresolved pool used by the combos; ids are stable plan references.
_UNRESOLVED_ISSUES = (
    ("U1", "fault", "JSON parsing error returns malformed response", "5.0.4", "critical", 8, "+"),
    ("U2", "fault", "Query returns more comments than requested", "5.0.4", "critical", 8, "+"),
    ("U3", "fault", "Components appear twice in the component list", "5.0.5", "critical", 3, "+"),
    ("U4", "enhancement", "Improve query.cgi loading time with many products", "5.0.5", "major", 5, "-"),
    ("U5", "enhancement", "Cache static assets to trim page load", "5.0.5", "minor", 2, "-"),
    ("U6", "enhancement", "Enhanced user interface for the bug entry form", "5.0.5", "medium", 8, "+"),
    ("U7", "enhancement", "Rework the system message architecture", "5.0.6", "minor", 8, "+"),
    ("U8", "enhancement", "Move all JavaScript into separate files", "5.0.6", "critical", 3, "+"),
    ("U9", "fault", "Report charts time out on large installations", "5.0.6", "critical", 8, "+"),
    ("U10", "fault", "Attachment uploads block the request queue", "5.0.6", "critical", 8, "+"),
    ("U11", "enhancement", "Polish the login form layout", "5.0.6", "minor", 3, "+"),
)

# Issue-id groups whose deltas are 19, -4.25, 4, 2, 3, 16.75.
_GROUPS = {
    "G1": ("U1", "U2", "U3"),
    "G2": ("U4", "U5"),
    "G3": ("U6",),
    "G4": ("U7",),
    "G5": ("U8",),
    "G6": ("U9", "U10", "U11"),
}

_COMBO_ORDERS = {
    "Combo-1": ("G1", "G2", "G3", "G4", "G5", "G6"),
    "Combo-2": ("G1", "G6", "G2", "G3", "G4", "G5"),
    "Combo-3": ("G6", "G3", "G1", "G5", "G4", "G2"),
    "Combo-4": ("G2", "G3", "G1", "G4", "G6", "G5"),
}

# Overall measured RT per historical release (ms); samples below average
# back to these exactly.
_RT_TARGETS = {
    "3.6.3": 2620, "4.4.0": 3850, "4.4.9": 5025, "5.0.0": 5945,
    "5.0.1": 7090, "5.0.2": 3425, "5.0.3": 6740, "5.0.4": 7730,
    "5.0.5": 3760, "5.0.6": 3000,
}

_SIZING_CORPUS = (
    ("Fix typo in help text", 1),
    ("Correct label spelling on the login form", 1),
    ("Update footer copyright year", 1),
    ("Adjust default sort order on browse page", 2),
    ("Add missing index to the comments table", 2),
    ("Cache static assets to trim page load", 2),
    ("Rework search result pagination", 3),
    ("Move all JavaScript into separate files", 3),
    ("Components appear twice in the component list", 3),
    ("Improve query.cgi loading time with many products", 5),
    ("Attachment storage fills the database volume", 5),
    ("Slow network services when mail queue backs up", 5),
    ("Rewrite the report charting engine", 8),
    ("Query returns more comments than requested", 8),
    ("Rework the system message architecture", 8),
)


def _make_issue(row, resolved: bool) -> IssueRecord:
    issue_id, kind, title, release, impact, sp, sign = row
    return IssueRecord(
        id=issue_id,
        kind=kind,
        title=title,
        description=title,
        reported_release=release,
        resolved_release=release if resolved else None,
        impact_scale=impact,
        story_points=sp,
        sign=sign,
    )


def fixture_issues() -> list:
    resolved = [_make_issue(r, resolved=True) for r in _HISTORICAL_ISSUES]
    pool = [_make_issue(r, resolved=False) for r in _UNRESOLVED_ISSUES]
    return resolved + pool


def fixture_rt_sets() -> list:
    sets = []
    for version, target in _RT_TARGETS.items():
        for page, offset in (("Home", -100), ("Search", 100)):
            mean = target + offset
            samples = (mean - 30, mean - 10, mean + 10, mean + 30)
            sets.append(RtSampleSet(release=version, page=page,
                                    environment="64-bit", samples=samples))
    return sets


def fixture_combos() -> list:
    plans = []
    for label, order in _COMBO_ORDERS.items():
        releases = tuple(
            PlannedRelease(version=v, issue_ids=_GROUPS[g])
            for v, g in zip(FUTURE_VERSIONS, order)
        )
        plans.append(ReleasePlan(label=label, releases=releases))
    return plans


def fixture_sizing_corpus() -> list:
    return list(_SIZING_CORPUS)


def fixture_issues_csv() -> str:
    from .corpus import dump_issues
    return dump_issues(fixture_issues(), format="csv")


def fixture_rt_csv() -> str:
    lines = ["release,page,environment,sample_ms"]
    for s in fixture_rt_sets():
        for value in s.samples:
            lines.append(f"{s.release},{s.page},{s.environment},{value}")
    return "\n".join(lines) + "\n"


def fixture_combos_json() -> str:
    payload = {
        "combos": [
            {
                "label": label,
                "releases": [
                    {"version": v, "issues": list(_GROUPS[g])}
                    for v, g in zip(FUTURE_VERSIONS, order)
                ],
            }
            for label, order in _COMBO_ORDERS.items()
        ]
    }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def fixture_sizing_corpus_csv() -> str:
    lines = ["text,story_points"]
    for text, sp in _SIZING_CORPUS:
        quoted = '"%s"' % text.replace('"', '""')
        lines.append(f"{quoted},{sp}")
    return "\n".join(lines) + "\n"


def fixture_config_toml() -> str:
    return (
        "threshold_ms = 9000\n"
        "alpha = 1\n"
        "k = 2\n"
        "k_max = 6\n"
        "seed = 42\n"
        "restarts = 10\n"
        "train_fraction = 0.8\n"
        "fold_count = 2\n"
        'cluster_features = "cumulative+delta"\n'
        'issues = "issues.csv"\n'
        'rt_samples = "rt_samples.csv"\n'
        'corpus = "corpus.csv"\n'
        'plans = "combos.json"\n'
    )


def write_fixture(directory) -> list:
    """Materialize the bundled dataset as input files; returns paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    files = {
        "issues.csv": fixture_issues_csv(),
        "rt_samples.csv": fixture_rt_csv(),
        "combos.json": fixture_combos_json(),
        "corpus.csv": fixture_sizing_corpus_csv(),
        "run.toml": fixture_config_toml(),
    }
    paths = []
    for name, content in files.items():
        path = directory / name
        path.write_text(content)
        paths.append(path)
    return paths
