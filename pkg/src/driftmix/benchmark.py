"""Per-task metrics and the three summary scores over the eleven-task suite.

Task scores are the raw metric scaled by 100 (mean of accuracy and F1 for
the two dual-metric tasks).  Summaries: TMA averages all eleven tasks, PMA
averages the four per-platform means, TEMA averages the seven Twitter tasks.
"""

from __future__ import annotations

import json
import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Mapping, Sequence


class TaskPlatform(str, Enum):
    TWITTER = "twitter"
    CIVIL_COMMENTS = "civil_comments"
    YELP = "yelp"
    REDDIT = "reddit"


class MetricKind(str, Enum):
    MACRO_F1 = "macro_f1"
    BINARY_F1 = "binary_f1"
    MACRO_RECALL = "macro_recall"
    NONNEUTRAL_MACRO_F1 = "nonneutral_macro_f1"
    ACC_AND_F1 = "acc_and_f1"
    ROUGE1 = "rouge1"


# Labels excluded by the non-neutral macro-F1 variant.
_NEUTRAL_LABELS = {"neutral", "none"}

_GOEMOTIONS_LABELS = (
    "admiration", "amusement", "anger", "annoyance", "approval", "caring",
    "confusion", "curiosity", "desire", "disappointment", "disapproval",
    "disgust", "embarrassment", "excitement", "fear", "gratitude", "grief",
    "joy", "love", "nervousness", "optimism", "pride", "realization",
    "relief", "remorse", "sadness", "surprise", "neutral",
)


@dataclass(frozen=True)
class TaskSpec:
    name: str
    platform: TaskPlatform
    metric: MetricKind
    label_space: tuple[str, ...] = ()
    positive_label: str | None = None

    def __post_init__(self):
        if self.metric in (MetricKind.BINARY_F1, MetricKind.ACC_AND_F1):
            if self.positive_label is None or self.positive_label not in self.label_space:
                raise ValueError(f"task {self.name}: positive_label must be in label_space")
        if self.metric is not MetricKind.ROUGE1 and not self.label_space:
            raise ValueError(f"task {self.name}: classification task needs a label space")
        canonical = _CANONICAL_BY_NAME.get(self.name)
        if canonical is not None and (
            canonical[0] is not self.platform or canonical[1] is not self.metric
        ):
            raise ValueError(
                f"task {self.name} must use platform={canonical[0].value}, "
                f"metric={canonical[1].value}"
            )

    def to_json_dict(self) -> dict:
        out = {
            "name": self.name,
            "platform": self.platform.value,
            "metric": self.metric.value,
            "label_space": list(self.label_space),
        }
        if self.positive_label is not None:
            out["positive_label"] = self.positive_label
        return out

    @classmethod
    def from_json_dict(cls, obj: dict) -> "TaskSpec":
        return cls(
            name=obj["name"],
            platform=TaskPlatform(obj["platform"]),
            metric=MetricKind(obj["metric"]),
            label_space=tuple(obj.get("label_space", ())),
            positive_label=obj.get("positive_label"),
        )


# name -> (platform, metric); the authoritative eleven-task list
_CANONICAL_BY_NAME: dict[str, tuple[TaskPlatform, MetricKind]] = {
    "te_emoji": (TaskPlatform.TWITTER, MetricKind.MACRO_F1),
    "te_emotion": (TaskPlatform.TWITTER, MetricKind.MACRO_F1),
    "te_hate": (TaskPlatform.TWITTER, MetricKind.MACRO_F1),
    "te_irony": (TaskPlatform.TWITTER, MetricKind.BINARY_F1),
    "te_offense": (TaskPlatform.TWITTER, MetricKind.MACRO_F1),
    "te_sentiment": (TaskPlatform.TWITTER, MetricKind.MACRO_RECALL),
    "te_stance": (TaskPlatform.TWITTER, MetricKind.NONNEUTRAL_MACRO_F1),
    "cct": (TaskPlatform.CIVIL_COMMENTS, MetricKind.ACC_AND_F1),
    "yrp": (TaskPlatform.YELP, MetricKind.ACC_AND_F1),
    "rtifu": (TaskPlatform.REDDIT, MetricKind.ROUGE1),
    "ge": (TaskPlatform.REDDIT, MetricKind.MACRO_F1),
}


def canonical_tasks() -> tuple[TaskSpec, ...]:
    """The eleven benchmark tasks with their default label spaces."""
    return (
        TaskSpec("te_emoji", TaskPlatform.TWITTER, MetricKind.MACRO_F1,
                 tuple(str(i) for i in range(20))),
        TaskSpec("te_emotion", TaskPlatform.TWITTER, MetricKind.MACRO_F1,
                 ("anger", "joy", "optimism", "sadness")),
        TaskSpec("te_hate", TaskPlatform.TWITTER, MetricKind.MACRO_F1,
                 ("non_hate", "hate")),
        TaskSpec("te_irony", TaskPlatform.TWITTER, MetricKind.BINARY_F1,
                 ("non_irony", "irony"), positive_label="irony"),
        TaskSpec("te_offense", TaskPlatform.TWITTER, MetricKind.MACRO_F1,
                 ("non_offensive", "offensive")),
        TaskSpec("te_sentiment", TaskPlatform.TWITTER, MetricKind.MACRO_RECALL,
                 ("negative", "neutral", "positive")),
        TaskSpec("te_stance", TaskPlatform.TWITTER, MetricKind.NONNEUTRAL_MACRO_F1,
                 ("none", "against", "favor")),
        TaskSpec("cct", TaskPlatform.CIVIL_COMMENTS, MetricKind.ACC_AND_F1,
                 ("nontoxic", "toxic"), positive_label="toxic"),
        TaskSpec("yrp", TaskPlatform.YELP, MetricKind.ACC_AND_F1,
                 ("negative", "positive"), positive_label="positive"),
        TaskSpec("rtifu", TaskPlatform.REDDIT, MetricKind.ROUGE1),
        TaskSpec("ge", TaskPlatform.REDDIT, MetricKind.MACRO_F1, _GOEMOTIONS_LABELS),
    )


CANONICAL_TASK_NAMES = tuple(_CANONICAL_BY_NAME)


def load_registry(text: str) -> list[TaskSpec]:
    """Parse a JSON task registry (list of TaskSpec objects)."""
    data = json.loads(text)
    if not isinstance(data, list):
        raise ValueError("registry must be a JSON list")
    return [TaskSpec.from_json_dict(obj) for obj in data]


# ------------------------------------------------------------------ metrics


def _class_stats(golds, preds, label) -> tuple[int, int, int]:
    tp = fp = fn = 0
    for g, p in zip(golds, preds):
        if p == label and g == label:
            tp += 1
        elif p == label:
            fp += 1
        elif g == label:
            fn += 1
    return tp, fp, fn


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 0.0


def _recall(tp: int, fn: int) -> float:
    return tp / (tp + fn) if tp + fn else 0.0


def compute_metric(spec: TaskSpec, golds: Sequence[str], preds: Sequence[str]) -> dict[str, float]:
    """Raw metric values in [0, 1] for one task.

    Per-class F1/recall with a zero denominator counts as 0, which also makes
    classes absent from both golds and preds contribute 0 to macro averages.
    """
    if len(golds) != len(preds):
        raise ValueError(f"{len(golds)} golds vs {len(preds)} preds")
    if not golds:
        raise ValueError("empty predictions")
    if spec.metric is MetricKind.ROUGE1:
        return {"rouge1": corpus_rouge1(golds, preds)}

    labels = set(spec.label_space)
    for value in (*golds, *preds):
        if value not in labels:
            raise ValueError(f"label {value!r} not in label space of task {spec.name}")

    if spec.metric is MetricKind.MACRO_F1:
        per = [_f1(*_class_stats(golds, preds, c)) for c in spec.label_space]
        return {"macro_f1": sum(per) / len(per)}
    if spec.metric is MetricKind.BINARY_F1:
        return {"f1": _f1(*_class_stats(golds, preds, spec.positive_label))}
    if spec.metric is MetricKind.MACRO_RECALL:
        per = []
        for c in spec.label_space:
            tp, _, fn = _class_stats(golds, preds, c)
            per.append(_recall(tp, fn))
        return {"macro_recall": sum(per) / len(per)}
    if spec.metric is MetricKind.NONNEUTRAL_MACRO_F1:
        classes = [c for c in spec.label_space if c.lower() not in _NEUTRAL_LABELS]
        if not classes:
            raise ValueError(f"task {spec.name} has no non-neutral classes")
        per = [_f1(*_class_stats(golds, preds, c)) for c in classes]
        return {"nonneutral_macro_f1": sum(per) / len(per)}
    if spec.metric is MetricKind.ACC_AND_F1:
        correct = sum(1 for g, p in zip(golds, preds) if g == p)
        return {
            "accuracy": correct / len(golds),
            "f1": _f1(*_class_stats(golds, preds, spec.positive_label)),
        }
    raise ValueError(f"unhandled metric {spec.metric}")


_ROUGE_TOKEN = re.compile(r"[^\W_]+")


def rouge1(gold: str, pred: str) -> float:
    """Unigram-overlap F-measure with clipped counts.

    Lowercased, split on non-alphanumeric runs; no stemming or stopword
    removal.  Both sides empty scores 1, exactly one empty scores 0.
    """
    gtok = _ROUGE_TOKEN.findall(gold.lower())
    ptok = _ROUGE_TOKEN.findall(pred.lower())
    if not gtok and not ptok:
        return 1.0
    if not gtok or not ptok:
        return 0.0
    gcount = Counter(gtok)
    pcount = Counter(ptok)
    overlap = sum(min(c, pcount[t]) for t, c in gcount.items())
    precision = overlap / len(ptok)
    recall = overlap / len(gtok)
    if precision + recall == 0.0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def corpus_rouge1(golds: Sequence[str], preds: Sequence[str]) -> float:
    """Mean per-pair ROUGE-1 over a prediction file."""
    if len(golds) != len(preds) or not golds:
        raise ValueError("need equal, non-empty gold/pred lists")
    return sum(rouge1(g, p) for g, p in zip(golds, preds)) / len(golds)


# ------------------------------------------------------------------ scoring


@dataclass(frozen=True)
class TaskResult:
    task: TaskSpec
    raw_metrics: Mapping[str, float]
    performance_score: float


def task_score(spec: TaskSpec, raw_metrics: Mapping[str, float]) -> TaskResult:
    """Scale raw metrics into the 0..100 performance score."""
    if spec.metric is MetricKind.ACC_AND_F1:
        missing = {"accuracy", "f1"} - raw_metrics.keys()
        if missing:
            raise ValueError(f"task {spec.name}: missing metrics {sorted(missing)}")
        score = 100.0 * (raw_metrics["accuracy"] + raw_metrics["f1"]) / 2.0
    else:
        key = "f1" if spec.metric is MetricKind.BINARY_F1 else spec.metric.value
        if key not in raw_metrics:
            raise ValueError(f"task {spec.name}: missing metric {key!r}")
        score = 100.0 * raw_metrics[key]
    return TaskResult(task=spec, raw_metrics=dict(raw_metrics), performance_score=score)


@dataclass(frozen=True)
class SummaryScores:
    tema: float
    pma: float
    tma: float
    per_platform: Mapping[str, float]
    per_task: Mapping[str, float]

    def to_json_dict(self) -> dict:
        return {
            "tema": self.tema,
            "pma": self.pma,
            "tma": self.tma,
            "per_platform": dict(self.per_platform),
            "per_task": dict(self.per_task),
        }


def summarize(results: Sequence[TaskResult]) -> SummaryScores:
    """Aggregate exactly the eleven canonical task results."""
    names = [r.task.name for r in results]
    dupes = sorted({n for n in names if names.count(n) > 1})
    if dupes:
        raise ValueError(f"duplicate tasks: {dupes}")
    missing = sorted(set(CANONICAL_TASK_NAMES) - set(names))
    extra = sorted(set(names) - set(CANONICAL_TASK_NAMES))
    if missing or extra:
        raise ValueError(f"missing tasks: {missing}; unexpected tasks: {extra}")

    by_name = {r.task.name: r for r in results}
    per_task = {name: by_name[name].performance_score for name in CANONICAL_TASK_NAMES}
    platform_scores: dict[str, list[float]] = {}
    for r in results:
        platform_scores.setdefault(r.task.platform.value, []).append(r.performance_score)
    per_platform = {
        plat: sum(v) / len(v) for plat, v in sorted(platform_scores.items())
    }
    twitter = [
        r.performance_score for r in results if r.task.platform is TaskPlatform.TWITTER
    ]
    return SummaryScores(
        tema=sum(twitter) / len(twitter),
        pma=sum(per_platform.values()) / len(per_platform),
        tma=sum(per_task.values()) / len(per_task),
        per_platform=per_platform,
        per_task=per_task,
    )
