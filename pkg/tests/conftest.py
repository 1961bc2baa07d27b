import sys

import pytest

from rulcast import fixtures, nlp, pipeline
from rulcast.pipeline import RunConfig


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion."""
    module = next((m for name, m in sys.modules.items()
                   if name.endswith("test_acceptance")), None)
    if module is None:
        return
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.getreports(outcome):
            if "test_acceptance" not in rep.nodeid or rep.when != "call":
                continue
            func = getattr(module, rep.nodeid.rsplit("::", 1)[-1], None)
            name = getattr(func, "criterion_name", None)
            if name:
                verdict = "PASS" if outcome == "passed" else "FAIL"
                lines.append((rep.nodeid, f"{verdict}  {name}"))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def fixture_snapshot():
    corpus = [(nlp.normalize(text), cls)
              for text, cls in fixtures.fixture_sizing_corpus()]
    sizing = nlp.train_sizer(corpus, alpha=1.0)
    return pipeline.build_snapshot(
        fixtures.fixture_issues(),
        fixtures.fixture_rt_sets(),
        RunConfig(k=2, cluster_features="cumulative+delta"),
        sizing_model=sizing,
    )


@pytest.fixture(scope="session")
def two_class_model():
    # Two documents, five distinct tokens, alpha = 1.
    corpus = [(["typo", "fix"], 1), (["rewrite", "database", "engine"], 8)]
    return nlp.train_sizer(corpus, alpha=1.0)
