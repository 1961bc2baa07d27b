"""Text normalization and story-point sizing via multinomial naive Bayes.

Counts are kept as exact integers; classification runs in log space with
Lidstone smoothing (default alpha = 1). A saved model round-trips
bit-for-bit because only integers and the alpha constant are persisted.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .corpus import STORY_POINT_CLASSES
from .errors import ParseError, TrainingError

MODEL_FORMAT_VERSION = 1

# Bundled English function-word list; override via normalize(stop_words=...).
STOP_WORDS = frozenset("""
a about above after again against all am an and any are aren as at be because
been before being below between both but by can cannot could couldn did didn
do does doesn doing don down during each few for from further had hadn has
hasn have haven having he her here hers herself him himself his how i if in
into is isn it its itself just me might more most must mustn my myself no nor
not now of off on once only or other our ours ourselves out over own same
shall she should shouldn so some such than that the their theirs them
themselves then there these they this those through to too under until up
very was wasn we were weren what when where which while who whom why will
with won would wouldn you your yours yourself yourselves
""".split())

_SUFFIXES = ("ing", "ed", "es", "s")
_MIN_STEM = 3


def _strip_suffixes(token: str) -> str:
    # Iterate to a fixpoint so normalize is idempotent.
    changed = True
    while changed:
        changed = False
        for suffix in _SUFFIXES:
            if token.endswith(suffix) and len(token) - len(suffix) >= _MIN_STEM:
                token = token[:-len(suffix)]
                changed = True
                break
    return token


def normalize(text: str, stop_words=STOP_WORDS) -> list:
    """lowercase -> strip punctuation -> tokenize -> drop stop words ->
    suffix-strip lemmatize. Deterministic and idempotent."""
    cleaned = [ch if ch.isalnum() else " " for ch in text.lower()]
    tokens = "".join(cleaned).split()
    out = []
    for token in tokens:
        if token in stop_words:
            continue
        token = _strip_suffixes(token)
        if token and token not in stop_words:
            out.append(token)
    return out


@dataclass(frozen=True)
class SizingModel:
    """Trained multinomial naive Bayes over story-point classes."""

    classes: tuple
    alpha: float
    doc_counts: dict            # class -> training document count
    token_counts: dict          # class -> {token: count}
    class_totals: dict          # class -> total token count
    vocabulary: frozenset

    @property
    def priors(self) -> dict:
        total = sum(self.doc_counts.values())
        return {c: self.doc_counts[c] / total for c in self.classes}

    def log_likelihood(self, token: str, cls) -> float:
        count = self.token_counts[cls].get(token, 0)
        denom = self.class_totals[cls] + self.alpha * len(self.vocabulary)
        return math.log((count + self.alpha) / denom)


def train_sizer(corpus: Sequence, alpha: float = 1.0) -> SizingModel:
    """Fit priors and smoothed token likelihoods from (tokens, class) pairs."""
    corpus = list(corpus)
    if not corpus:
        raise TrainingError("training corpus is empty")
    if alpha <= 0:
        raise TrainingError(f"smoothing constant must be > 0, got {alpha}")
    for _, cls in corpus:
        if cls not in STORY_POINT_CLASSES:
            raise TrainingError(
                f"class {cls!r} outside story-point classes {STORY_POINT_CLASSES}")
    classes = tuple(sorted({cls for _, cls in corpus}))
    doc_counts = {c: 0 for c in classes}
    token_counts = {c: {} for c in classes}
    vocabulary = set()
    for tokens, cls in corpus:
        doc_counts[cls] += 1
        counts = token_counts[cls]
        for token in tokens:
            counts[token] = counts.get(token, 0) + 1
            vocabulary.add(token)
    class_totals = {c: sum(token_counts[c].values()) for c in classes}
    return SizingModel(
        classes=classes,
        alpha=alpha,
        doc_counts=doc_counts,
        token_counts=token_counts,
        class_totals=class_totals,
        vocabulary=frozenset(vocabulary),
    )


def posterior(model: SizingModel, doc: Sequence[str]) -> dict:
    """P(class | doc) via log-space scores, normalized to sum to 1.

    Out-of-vocabulary tokens get the alpha-smoothed unseen likelihood;
    an empty document returns the priors.
    """
    priors = model.priors
    log_scores = {}
    for cls in model.classes:
        score = math.log(priors[cls]) if priors[cls] > 0 else -math.inf
        for token in doc:
            score += model.log_likelihood(token, cls)
        log_scores[cls] = score
    peak = max(log_scores.values())
    unnorm = {c: math.exp(s - peak) for c, s in log_scores.items()}
    total = sum(unnorm.values())
    return {c: v / total for c, v in unnorm.items()}


def classify_sp(model: SizingModel, doc: Sequence[str]):
    """Argmax of the posterior; exact ties go to the smallest class."""
    dist = posterior(model, doc)
    best = max(dist.values())
    return min(c for c, p in dist.items() if p == best)


@dataclass
class ConfusionMatrix:
    classes: tuple
    counts: dict                # (actual, predicted) -> count

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def accuracy(self) -> float:
        return sum(v for (a, p), v in self.counts.items() if a == p) / self.total

    def to_rows(self) -> list:
        return [[self.counts.get((a, p), 0) for p in self.classes]
                for a in self.classes]


def evaluate(model: SizingModel, test_set: Sequence) -> ConfusionMatrix:
    """Confusion matrix of (actual, predicted) over a labeled test set."""
    test_set = list(test_set)
    if not test_set:
        raise TrainingError("evaluation set is empty")
    classes = tuple(sorted(set(model.classes) | {cls for _, cls in test_set}))
    counts: dict = {}
    for tokens, actual in test_set:
        predicted = classify_sp(model, tokens)
        counts[(actual, predicted)] = counts.get((actual, predicted), 0) + 1
    return ConfusionMatrix(classes=classes, counts=counts)


def save_model(model: SizingModel) -> str:
    """Versioned flat-file serialization (exact integers, stable ordering)."""
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "alpha": model.alpha,
        "classes": list(model.classes),
        "doc_counts": {str(c): model.doc_counts[c] for c in model.classes},
        "token_counts": {str(c): dict(sorted(model.token_counts[c].items()))
                         for c in model.classes},
        "vocabulary": sorted(model.vocabulary),
    }
    return json.dumps(payload, sort_keys=True, indent=0)


def load_model(text: str) -> SizingModel:
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid model file: {exc}")
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ParseError(
            f"unsupported model format version {payload.get('format_version')}")
    classes = tuple(payload["classes"])
    token_counts = {c: dict(payload["token_counts"][str(c)]) for c in classes}
    return SizingModel(
        classes=classes,
        alpha=payload["alpha"],
        doc_counts={c: payload["doc_counts"][str(c)] for c in classes},
        token_counts=token_counts,
        class_totals={c: sum(token_counts[c].values()) for c in classes},
        vocabulary=frozenset(payload["vocabulary"]),
    )


def load_sizing_corpus(source, stop_words=STOP_WORDS) -> list:
    """Read the text,story_points training CSV and normalize each row."""
    if isinstance(source, (bytes, bytearray)):
        source = source.decode("utf-8")
    if hasattr(source, "read"):
        source = source.read()
        if isinstance(source, bytes):
            source = source.decode("utf-8")
    reader = csv.DictReader(io.StringIO(source))
    if reader.fieldnames is None or not {"text", "story_points"} <= set(reader.fieldnames):
        raise ParseError("corpus CSV requires columns text,story_points")
    corpus = []
    for rownum, row in enumerate(reader, start=2):
        try:
            cls = int(row["story_points"])
        except (TypeError, ValueError):
            raise ParseError(f"story_points not an integer: {row.get('story_points')!r}",
                             row=rownum, field="story_points")
        if cls not in STORY_POINT_CLASSES:
            raise ParseError(f"story_points {cls} outside {STORY_POINT_CLASSES}",
                             row=rownum, field="story_points")
        corpus.append((normalize(row["text"] or "", stop_words), cls))
    return corpus
