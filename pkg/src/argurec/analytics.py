"""Usage and questionnaire statistics.

Covers what can be computed from the artifacts this system produces:
interaction-option usage from event logs, Likert construct scores,
Cronbach's alpha (population-variance convention), Mann-Whitney U with the
normal approximation, and accuracy reporting for the aspect/sentiment
classifier against gold annotations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .aspect import AspectSentimentClassifier
from .corpus import RawSentence
from .explain import Interactivity

# The follow-up argument requests; the initial more_why request is available
# in every condition and does not count as an interaction option.
INTERACTION_OPTIONS = ("more_features", "what_reported", "fine_grained")


class UnknownConstruct(Exception):
    pass


class DegenerateInput(Exception):
    pass


class EmptyInput(Exception):
    pass


class NoGoldLabels(Exception):
    pass


@dataclass(frozen=True)
class QuestionnaireResponse:
    """Likert item scores (1..5) plus the construct -> item grouping."""

    session_id: str
    item_scores: dict[str, int]
    construct_map: dict[str, list[str]]

    def __post_init__(self):
        for item, score in self.item_scores.items():
            if not isinstance(score, int) or not 1 <= score <= 5:
                raise ValueError(f"score for {item!r} must be an integer in 1..5")
        for construct, items in self.construct_map.items():
            missing = [i for i in items if i not in self.item_scores]
            if missing:
                raise ValueError(f"construct {construct!r} references unknown items {missing}")


def construct_score(r: QuestionnaireResponse, construct: str) -> float:
    """Mean of the scores of the construct's items."""
    if construct not in r.construct_map:
        raise UnknownConstruct(construct)
    items = r.construct_map[construct]
    return sum(r.item_scores[i] for i in items) / len(items)


def read_questionnaires(path: str | Path) -> list[QuestionnaireResponse]:
    responses = []
    with open(path, encoding="utf-8") as f:
        for line in f:
            if not line.strip():
                continue
            obj = json.loads(line)
            responses.append(
                QuestionnaireResponse(
                    session_id=obj["session_id"],
                    item_scores=dict(obj["item_scores"]),
                    construct_map={k: list(v) for k, v in obj["construct_map"].items()},
                )
            )
    return responses


def _population_variance(values: Sequence[float]) -> float:
    mean = sum(values) / len(values)
    return sum((v - mean) ** 2 for v in values) / len(values)


def cronbach_alpha(items_by_respondent: Sequence[Sequence[float]]) -> float:
    """Cronbach's alpha of a k-items x n-respondents score matrix.

    Uses population variances (divide by n). Raises DegenerateInput when the
    summed scores have zero variance.
    """
    k = len(items_by_respondent)
    if k < 2:
        raise ValueError("alpha needs at least 2 items")
    n = len(items_by_respondent[0])
    if n < 2 or any(len(row) != n for row in items_by_respondent):
        raise ValueError("alpha needs at least 2 respondents and a rectangular matrix")
    item_variances = sum(_population_variance(row) for row in items_by_respondent)
    totals = [sum(row[j] for row in items_by_respondent) for j in range(n)]
    total_variance = _population_variance(totals)
    if total_variance == 0:
        raise DegenerateInput("variance of summed scores is zero")
    return k / (k - 1) * (1 - item_variances / total_variance)


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        midrank = (i + j) / 2 + 1  # ranks are 1-based
        for k in range(i, j + 1):
            ranks[order[k]] = midrank
        i = j + 1
    return ranks


def _normal_sf(x: float) -> float:
    return 0.5 * math.erfc(x / math.sqrt(2))


def mann_whitney_u(a: Sequence[float], b: Sequence[float]) -> dict:
    """Mann-Whitney U for group a (midranks over the pooled sample).

    U is reported for group a: U = R_a - n_a(n_a+1)/2, i.e. the number of
    (a, b) pairs won by a plus half the ties. z uses the normal approximation
    with tie correction and a 0.5 continuity correction toward the null; the
    approximation is inaccurate for samples smaller than ~8.
    """
    if not a or not b:
        raise EmptyInput("both samples must be non-empty")
    n_a, n_b = len(a), len(b)
    pooled = list(a) + list(b)
    ranks = _midranks(pooled)
    r_a = sum(ranks[:n_a])
    u = r_a - n_a * (n_a + 1) / 2
    total = n_a + n_b
    tie_sizes = {}
    for v in pooled:
        tie_sizes[v] = tie_sizes.get(v, 0) + 1
    tie_term = sum(t**3 - t for t in tie_sizes.values())
    variance = n_a * n_b / 12 * ((total + 1) - tie_term / (total * (total - 1)))
    if variance <= 0:
        z = 0.0  # every pooled value tied; no evidence either way
    else:
        diff = u - n_a * n_b / 2
        z = math.copysign(max(abs(diff) - 0.5, 0.0), diff) / math.sqrt(variance)
    p = min(1.0, 2 * _normal_sf(abs(z)))
    return {"U": u, "z": z, "p_two_sided": p}


@dataclass
class UsageStats:
    """Per-option, per-style usage fractions over high-interactivity sessions."""

    denominators: dict[str, int]
    options: dict[str, dict[str, float]]
    any_option: dict[str, float]

    def to_json(self) -> dict:
        return {
            "denominators": dict(self.denominators),
            "options": {k: dict(v) for k, v in self.options.items()},
            "any_option": dict(self.any_option),
        }


def _event_fields(event) -> tuple[str, str]:
    if isinstance(event, dict):
        return event["session_id"], event["kind"]
    return event.session_id, event.kind


def usage_stats(log: Iterable, sessions: Sequence) -> UsageStats:
    """Fractions of high-interactivity sessions that used each interaction
    option at least once, per presentation style and overall.

    Low-interactivity sessions are excluded from all denominators; styles
    with no high sessions are simply absent. Order of events is irrelevant.
    """
    high = {
        s.session_id: s.style.value
        for s in sessions
        if s.interactivity is Interactivity.HIGH
    }
    used: dict[str, set[str]] = {opt: set() for opt in INTERACTION_OPTIONS}
    for event in log:
        session_id, kind = _event_fields(event)
        if session_id in high and kind in used:
            used[kind].add(session_id)

    styles = sorted(set(high.values()))
    denominators = {style: sum(1 for v in high.values() if v == style) for style in styles}
    denominators["all"] = len(high)

    def fractions(session_ids: set[str]) -> dict[str, float]:
        out = {}
        for style in styles:
            out[style] = sum(1 for s in session_ids if high[s] == style) / denominators[style]
        if high:
            out["all"] = len(session_ids) / len(high)
        return out

    any_used = set().union(*used.values()) if used else set()
    return UsageStats(
        denominators=denominators,
        options={opt: fractions(ids) for opt, ids in used.items()},
        any_option=fractions(any_used),
    )


def _per_class_report(pairs: Sequence[tuple[str, str]]) -> dict:
    gold_classes = sorted({g for g, _ in pairs})
    per_class = {}
    f1s, precisions, recalls = [], [], []
    for cls in gold_classes:
        tp = sum(1 for g, p in pairs if g == cls and p == cls)
        fp = sum(1 for g, p in pairs if g != cls and p == cls)
        fn = sum(1 for g, p in pairs if g == cls and p != cls)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_class[cls] = {
            "precision": precision,
            "recall": recall,
            "f1": f1,
            "support": tp + fn,
        }
        precisions.append(precision)
        recalls.append(recall)
        f1s.append(f1)
    return {
        "per_class": per_class,
        "macro_precision": sum(precisions) / len(precisions),
        "macro_recall": sum(recalls) / len(recalls),
        "macro_f1": sum(f1s) / len(f1s),
        "n_scored": len(pairs),
    }


def classifier_report(
    sentences: Sequence[RawSentence], classifier: AspectSentimentClassifier
) -> dict:
    """Precision/recall/F1 per class plus macro averages, for the aspect and
    polarity tasks separately, against gold sentence annotations.

    For the aspect task the gold label is the general category of the gold
    fine-grained term; sentences whose gold term is not in the lexicon cannot
    be scored and are skipped. Macro averages run over classes present in
    the gold labels only.
    """
    aspect_pairs: list[tuple[str, str]] = []
    polarity_pairs: list[tuple[str, str]] = []
    for sentence in sentences:
        feature, polarity, _term = classifier.classify(sentence)
        if sentence.gold_aspect is not None:
            gold_feature = classifier.lexicon.lookup(sentence.gold_aspect)
            if gold_feature is not None:
                aspect_pairs.append(
                    (gold_feature.id, feature.id if feature is not None else "none")
                )
        if sentence.gold_polarity is not None:
            polarity_pairs.append((sentence.gold_polarity.value, polarity.value))
    if not aspect_pairs and not polarity_pairs:
        raise NoGoldLabels("no sentence carries usable gold annotations")
    report: dict[str, Optional[dict]] = {"aspect": None, "polarity": None}
    if aspect_pairs:
        report["aspect"] = _per_class_report(aspect_pairs)
    if polarity_pairs:
        report["polarity"] = _per_class_report(polarity_pairs)
    return report
