"""Command-line entry point.

Exit codes: 0 success, 1 domain error, 2 usage error. All randomness is
derived from --seed; identical inputs plus seed give byte-identical
outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields as dc_fields
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import corpus, cpv, fixtures, nlp, pipeline, prognosis, report
from .errors import InsufficientDataError, ParameterError, RulcastError
from .pipeline import RunConfig

USAGE_EXIT = 2
DOMAIN_EXIT = 1

_CONFIG_KEYS = {f.name for f in dc_fields(RunConfig)}


def _load_config(path) -> dict:
    raw = Path(path).read_bytes()
    data = tomllib.loads(raw.decode("utf-8"))
    unknown = set(data) - _CONFIG_KEYS
    if unknown:
        raise ParameterError(f"unknown config key(s): {', '.join(sorted(unknown))}")
    base = Path(path).parent
    for key in ("issues", "rt_samples", "corpus", "plans", "category_matrix",
                "stop_words"):
        if data.get(key):
            data[key] = str((base / data[key]).resolve())
    return data


def _merge_config(args) -> RunConfig:
    values: dict = {}
    if getattr(args, "config", None):
        values.update(_load_config(args.config))
    overrides = {
        "threshold_ms": getattr(args, "threshold", None),
        "alpha": getattr(args, "alpha", None),
        "k": getattr(args, "k", None),
        "k_max": getattr(args, "k_max", None),
        "seed": getattr(args, "seed", None),
        "restarts": getattr(args, "restarts", None),
        "train_fraction": getattr(args, "train_fraction", None),
        "fold_count": getattr(args, "fold_count", None),
        "cluster_features": getattr(args, "features", None),
        "issues": getattr(args, "issues", None),
        "rt_samples": getattr(args, "rt_samples", None),
        "corpus": getattr(args, "corpus", None),
        "plans": getattr(args, "plans", None),
    }
    values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(**values)


def _read(path, what):
    p = Path(path) if path else None
    if p is None:
        raise ParameterError(f"no {what} file given (flag or config)")
    if not p.exists():
        raise FileNotFoundError(f"{what} file not found: {p}")
    return p.read_text()


def _write(path: Path, content: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content)
    print(path)


def _load_snapshot(config: RunConfig) -> pipeline.Snapshot:
    issues, _ = corpus.load_issues(_read(config.issues, "issues"), format="csv")
    rt_sets = corpus.load_rt_samples(_read(config.rt_samples, "RT samples"))
    sizing = None
    if config.corpus:
        train = nlp.load_sizing_corpus(_read(config.corpus, "sizing corpus"))
        sizing = nlp.train_sizer(train, alpha=config.alpha)
    return pipeline.build_snapshot(issues, rt_sets, config, sizing_model=sizing)


def cmd_ingest(args) -> int:
    config = _merge_config(args)
    issues, quality = corpus.load_issues(_read(config.issues, "issues"),
                                         format=args.format)
    out = Path(args.out)
    _write(out / "issues_normalized.csv", corpus.dump_issues(issues))
    _write(out / "quality.json",
           json.dumps(quality.to_dict(), sort_keys=True, indent=2) + "\n")
    if config.rt_samples:
        rt_sets = corpus.load_rt_samples(_read(config.rt_samples, "RT samples"))
        releases = sorted({s.release for s in rt_sets}, key=corpus.version_key)
        lines = ["release,mean_rt_ms"]
        for release in releases:
            lines.append(f"{release},{corpus.aggregate_rt(rt_sets, release):.3f}")
        _write(out / "rt_aggregate.csv", "\n".join(lines) + "\n")
    return 0


def cmd_train_sizer(args) -> int:
    config = _merge_config(args)
    train = nlp.load_sizing_corpus(_read(config.corpus, "sizing corpus"))
    model = nlp.train_sizer(train, alpha=config.alpha)
    _write(Path(args.out), nlp.save_model(model) + "\n")
    return 0


def cmd_size(args) -> int:
    config = _merge_config(args)
    model = nlp.load_model(_read(args.model, "sizing model"))
    issues, _ = corpus.load_issues(_read(config.issues, "issues"), format="csv")
    sized = []
    for issue in issues:
        if issue.story_points is None:
            tokens = nlp.normalize(f"{issue.title} {issue.description}")
            from dataclasses import replace
            issue = replace(issue, story_points=nlp.classify_sp(model, tokens))
        sized.append(issue)
    _write(Path(args.out), corpus.dump_issues(sized))
    return 0


def cmd_cpv(args) -> int:
    config = _merge_config(args)
    issues, _ = corpus.load_issues(_read(config.issues, "issues"), format="csv")
    versions = sorted({i.resolved_release for i in issues if i.resolved},
                      key=corpus.version_key)
    records = cpv.build_release_records(
        issues, versions, base_qp=cpv.to_quarter_points(config.base_cpv))
    _write(Path(args.out), report.cpv_series_csv(records))
    return 0


def cmd_cluster(args) -> int:
    config = _merge_config(args)
    snapshot = _load_snapshot(config)
    out = Path(args.out)
    _write(out / "clusters.csv", report.cluster_csv(snapshot))
    _write(out / "wcss.csv", report.wcss_csv(snapshot.wcss_curve))
    return 0


def cmd_fit(args) -> int:
    config = _merge_config(args)
    snapshot = _load_snapshot(config)
    wanted = None
    if args.cluster is not None:
        wanted = _cluster_index(args.cluster)
        if wanted in snapshot.unfittable_clusters:
            raise InsufficientDataError(
                f"cluster {args.cluster}: insufficient data to fit")
        if wanted not in snapshot.models:
            raise ParameterError(f"no such cluster: {args.cluster}")
    out = Path(args.out)
    _write(out / "model.json", report.model_json(snapshot))
    for j, model in sorted(snapshot.models.items()):
        if wanted is not None and j != wanted:
            continue
        member_idx = [i for i, a in enumerate(snapshot.cluster_model.assignments)
                      if a == j]
        xs = [snapshot.releases[i].cumulative_cpv for i in member_idx]
        _write(out / f"residuals_{j}.csv",
               report.residuals_csv(zip(xs, model.residuals)))
    return 0


def cmd_evaluate(args) -> int:
    config = _merge_config(args)
    labeled = nlp.load_sizing_corpus(_read(config.corpus, "sizing corpus"))
    spec = prognosis.SplitSpec(train_fraction=config.train_fraction,
                               seed=config.seed, fold_count=config.fold_count)
    train, test = prognosis.train_test_split(labeled, spec)
    model = nlp.train_sizer(train, alpha=config.alpha)
    matrix = nlp.evaluate(model, test)
    payload = {
        "classes": list(matrix.classes),
        "matrix": matrix.to_rows(),
        "accuracy": matrix.accuracy,
    }
    if config.issues and config.rt_samples:
        snapshot = _load_snapshot(config)
        cv = {}
        for j, m in sorted(snapshot.models.items()):
            member_idx = [i for i, a in
                          enumerate(snapshot.cluster_model.assignments) if a == j]
            data = [(snapshot.releases[i].cumulative_cpv,
                     snapshot.releases[i].measured_rt_ms) for i in member_idx]
            if len(data) >= config.fold_count + 2:
                scores, mean = prognosis.kfold_cv(data, k=config.fold_count,
                                                  seed=config.seed)
                cv[str(j)] = {"fold_scores": scores, "mean": mean}
        payload["cross_validation"] = cv
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if args.out:
        _write(Path(args.out), text)
    else:
        print(text, end="")
    return 0


def cmd_plan(args) -> int:
    config = _merge_config(args)
    snapshot = _load_snapshot(config)
    plans = pipeline.parse_plans(_read(config.plans, "plans"))
    for plan in plans:
        from .horizon import build_plan
        build_plan(plan, snapshot.issues_by_id, snapshot.base_qp)
        print(f"{plan.label}: ok ({len(plan.releases)} releases)")
    return 0


def cmd_rul(args) -> int:
    config = _merge_config(args)
    snapshot = _load_snapshot(config)
    plans = pipeline.parse_plans(_read(config.plans, "plans"))
    reports = pipeline.project_plans(snapshot, plans)
    out = Path(args.out)
    _write(out / "rul.csv", report.rul_csv(reports))
    _write(out / "rul.json", report.rul_json(reports, snapshot))
    _write(out / "rul.svg", report.rul_svg(snapshot, reports))
    return 0


def cmd_fixture(args) -> int:
    for path in fixtures.write_fixture(args.out):
        print(path)
    return 0


def cmd_serve(args) -> int:
    import uvicorn
    from .service import create_app
    config = _merge_config(args)
    app = create_app(config)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cluster_index(label: str) -> int:
    if label.isdigit():
        return int(label)
    if len(label) == 1 and label.isalpha():
        return ord(label.upper()) - ord("A")
    raise ParameterError(f"cluster must be an index or letter, got '{label}'")


def _add_common(parser):
    parser.add_argument("--config", help="TOML config file; flags override it")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--issues")
    parser.add_argument("--rt-samples", dest="rt_samples")
    parser.add_argument("--corpus")
    parser.add_argument("--threshold", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--k", type=int)
    parser.add_argument("--k-max", dest="k_max", type=int)
    parser.add_argument("--restarts", type=int)
    parser.add_argument("--train-fraction", dest="train_fraction", type=float)
    parser.add_argument("--fold-count", dest="fold_count", type=int)
    parser.add_argument("--features", choices=["cumulative", "cumulative+delta"])


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rulcast",
        description="Remaining-useful-life forecasting over release cycles")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse issues/RT files, emit quality report")
    _add_common(p)
    p.add_argument("--format", choices=["csv", "json-lines"], default="csv")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("train-sizer", help="train the story-point classifier")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train_sizer)

    p = sub.add_parser("size", help="classify story points for unsized issues")
    _add_common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_size)

    p = sub.add_parser("cpv", help="export the release CPV series")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cpv)

    p = sub.add_parser("cluster", help="cluster releases and export the elbow curve")
    _add_common(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("fit", help="per-cluster regression with statistics")
    _add_common(p)
    p.add_argument("--cluster")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("evaluate", help="confusion matrix and CV scores")
    _add_common(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("plan", help="validate release plans")
    _add_common(p)
    p.add_argument("--plans")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("rul", help="full projection, report and plot")
    _add_common(p)
    p.add_argument("--plans")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_rul)

    p = sub.add_parser("fixture", help="write the bundled demo dataset")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fixture)

    p = sub.add_parser("serve", help="start the planning HTTP service")
    _add_common(p)
    p.add_argument("--plans")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParameterError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except FileNotFoundError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except RulcastError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DOMAIN_EXIT


if __name__ == "__main__":
    sys.exit(main())
