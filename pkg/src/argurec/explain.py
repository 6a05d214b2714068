"""Explanation dialog engine.

An explanation is a dialog: the system presents an argument for its
recommendation (claim, premises, backing, rebuttal, refutation) and the
user may request follow-up arguments at deeper levels of detail:

    L1 recommendation list
      -> more_why(item)     L2 overview: claim + per-feature opinion stats
        -> more_features      L2 expanded to all 10 features
        -> what_reported(f)  L3 report: excerpts + fine-grained terms for f
          -> fine_grained(t)  L4 statements on one fine-grained term only
    back pops one level.

Under low interactivity only the initial more_why request (and back) is
available; all deeper requests are rejected. The state machine is enforced
server-side so the gating cannot be bypassed by a client.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

from . import efm
from .corpus import ALL_CATEGORIES, FeatureCategory, Polarity, SentenceRecord
from .efm import EfmModel, ModelNotTrained, predict_rating, rating_to_circles

UNEXPANDED_PREMISES = 3
EXCERPT_CAP = 5
FINE_GRAINED_BUTTONS = 5

CLAIM_CODE = "predicted_rating_claim"
REFUTATION_CODE = "majority_positive"


class Interactivity(str, enum.Enum):
    LOW = "low"
    HIGH = "high"


class PresentationStyle(str, enum.Enum):
    TEXT = "text"
    TABLE = "table"
    BAR_CHART = "bar_chart"


class DialogLevel(str, enum.Enum):
    L1_LIST = "L1_list"
    L2_OVERVIEW = "L2_overview"
    L3_FEATURE_REPORT = "L3_feature_report"
    L4_FINE_GRAINED = "L4_fine_grained"


class MoveKind(str, enum.Enum):
    MORE_WHY = "more_why"
    MORE_FEATURES = "more_features"
    WHAT_REPORTED = "what_reported"
    FINE_GRAINED = "fine_grained"
    BACK = "back"


class MoveNotAllowed(Exception):
    def __init__(self, state: "DialogState", kind: MoveKind, interactivity: Interactivity):
        super().__init__(
            f"move {kind.value} not allowed at {state.level.value} "
            f"under {interactivity.value} interactivity"
        )
        self.state = state
        self.kind = kind
        self.interactivity = interactivity


class UnknownItem(Exception):
    pass


class UnknownFeature(Exception):
    pass


class NoSuchTerm(Exception):
    def __init__(self, item_id: str, feature: FeatureCategory, term: str):
        super().__init__(f"no sentences about {term!r} ({feature.id}) for item {item_id}")


class StyleMismatch(Exception):
    pass


@dataclass(frozen=True)
class DialogState:
    """Position in the explanation dialog for one session and item."""

    level: DialogLevel = DialogLevel.L1_LIST
    item_id: Optional[str] = None
    expanded: bool = False
    feature: Optional[FeatureCategory] = None
    term: Optional[str] = None

    def __post_init__(self):
        needs = {
            DialogLevel.L1_LIST: (False, False, False),
            DialogLevel.L2_OVERVIEW: (True, False, False),
            DialogLevel.L3_FEATURE_REPORT: (True, True, False),
            DialogLevel.L4_FINE_GRAINED: (True, True, True),
        }[self.level]
        have = (self.item_id is not None, self.feature is not None, self.term is not None)
        if have != needs:
            raise ValueError(f"inconsistent dialog state for {self.level.value}: {self}")
        if self.level is DialogLevel.L1_LIST and self.expanded:
            raise ValueError("expanded is only meaningful at L2 and deeper")

    def to_json(self) -> dict:
        return {
            "level": self.level.value,
            "item_id": self.item_id,
            "expanded": self.expanded,
            "feature": self.feature.id if self.feature is not None else None,
            "term": self.term,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "DialogState":
        feature = obj.get("feature")
        return cls(
            level=DialogLevel(obj["level"]),
            item_id=obj.get("item_id"),
            expanded=bool(obj.get("expanded", False)),
            feature=FeatureCategory.from_id(feature) if feature else None,
            term=obj.get("term"),
        )


@dataclass(frozen=True)
class Move:
    kind: MoveKind
    item_id: Optional[str] = None
    feature: Optional[FeatureCategory] = None
    term: Optional[str] = None


def allowed_moves(s: DialogState, i: Interactivity) -> set[MoveKind]:
    """Move kinds permitted at a state; the low condition allows only the
    initial request and navigating back from it."""
    if i is Interactivity.LOW:
        if s.level is DialogLevel.L1_LIST:
            return {MoveKind.MORE_WHY}
        if s.level is DialogLevel.L2_OVERVIEW:
            return {MoveKind.BACK}
        return set()
    if s.level is DialogLevel.L1_LIST:
        return {MoveKind.MORE_WHY}
    if s.level is DialogLevel.L2_OVERVIEW:
        moves = {MoveKind.WHAT_REPORTED, MoveKind.BACK}
        if not s.expanded:
            moves.add(MoveKind.MORE_FEATURES)
        return moves
    if s.level is DialogLevel.L3_FEATURE_REPORT:
        return {MoveKind.FINE_GRAINED, MoveKind.WHAT_REPORTED, MoveKind.BACK}
    return {MoveKind.FINE_GRAINED, MoveKind.BACK}


def apply_move(s: DialogState, m: Move, i: Interactivity) -> DialogState:
    """Successor state for a move, or MoveNotAllowed.

    Malformed moves (a required argument missing) raise ValueError.
    """
    if m.kind not in allowed_moves(s, i):
        raise MoveNotAllowed(s, m.kind, i)
    if m.kind is MoveKind.MORE_WHY:
        if not m.item_id:
            raise ValueError("more_why requires an item_id")
        return DialogState(DialogLevel.L2_OVERVIEW, item_id=m.item_id)
    if m.kind is MoveKind.MORE_FEATURES:
        return replace(s, expanded=True)
    if m.kind is MoveKind.WHAT_REPORTED:
        if m.feature is None:
            raise ValueError("what_reported requires a feature")
        return DialogState(
            DialogLevel.L3_FEATURE_REPORT,
            item_id=s.item_id,
            expanded=s.expanded,
            feature=m.feature,
        )
    if m.kind is MoveKind.FINE_GRAINED:
        if not m.term:
            raise ValueError("fine_grained requires a term")
        return DialogState(
            DialogLevel.L4_FINE_GRAINED,
            item_id=s.item_id,
            expanded=s.expanded,
            feature=s.feature,
            term=m.term.lower(),
        )
    # back: pop one level
    if s.level is DialogLevel.L4_FINE_GRAINED:
        return replace(s, level=DialogLevel.L3_FEATURE_REPORT, term=None)
    if s.level is DialogLevel.L3_FEATURE_REPORT:
        return DialogState(
            DialogLevel.L2_OVERVIEW, item_id=s.item_id, expanded=s.expanded
        )
    return DialogState(DialogLevel.L1_LIST)


@dataclass(frozen=True)
class FeatureStat:
    """Positive/negative opinion counts and percentages for one feature.

    Percentages are absent when there are no non-neutral sentences; otherwise
    pct_positive is rounded half up and pct_negative is its complement, so
    the two always sum to 100.
    """

    feature: FeatureCategory
    pos_count: int
    neg_count: int
    pct_positive: Optional[int]
    pct_negative: Optional[int]

    @property
    def has_data(self) -> bool:
        return self.pos_count + self.neg_count > 0

    @classmethod
    def from_counts(cls, feature: FeatureCategory, pos: int, neg: int) -> "FeatureStat":
        total = pos + neg
        if total == 0:
            return cls(feature, 0, 0, None, None)
        pct_pos = (200 * pos + total) // (2 * total)  # round_half_up(100*pos/total)
        return cls(feature, pos, neg, pct_pos, 100 - pct_pos)

    def to_json(self) -> dict:
        obj = {
            "feature": self.feature.id,
            "pos_count": self.pos_count,
            "neg_count": self.neg_count,
        }
        if self.has_data:
            obj["pct_positive"] = self.pct_positive
            obj["pct_negative"] = self.pct_negative
        else:
            obj["no_data"] = True
        return obj


def feature_stats(
    item_id: str,
    records: Sequence[SentenceRecord],
    known_items: Optional[set[str]] = None,
) -> list[FeatureStat]:
    """Per-feature opinion stats for an item, in feature-code order.

    Features with only neutral (or no) sentences are omitted. UnknownItem is
    raised when the item appears nowhere in the records (or, when a known-item
    set is supplied, is not in it).
    """
    if known_items is not None:
        if item_id not in known_items:
            raise UnknownItem(item_id)
    elif not any(rec.item_id == item_id for rec in records):
        raise UnknownItem(item_id)
    pos: dict[FeatureCategory, int] = {}
    neg: dict[FeatureCategory, int] = {}
    for rec in records:
        if rec.item_id != item_id or rec.feature is None:
            continue
        if rec.polarity is Polarity.POSITIVE:
            pos[rec.feature] = pos.get(rec.feature, 0) + 1
        elif rec.polarity is Polarity.NEGATIVE:
            neg[rec.feature] = neg.get(rec.feature, 0) + 1
    stats = []
    for feature in ALL_CATEGORIES:
        p, n = pos.get(feature, 0), neg.get(feature, 0)
        if p + n > 0:
            stats.append(FeatureStat.from_counts(feature, p, n))
    return stats


@dataclass
class ExplanationPayload:
    """One argumentation attempt, renderable in any presentation style."""

    level: DialogLevel
    item_id: str
    claim: dict
    premises: list[FeatureStat]
    backing: list[SentenceRecord]
    rebuttal: list[SentenceRecord]
    refutation: Optional[str]  # statement code, set under majority-positive framing
    style: PresentationStyle
    available_moves: set[MoveKind]
    expanded: bool = False
    feature: Optional[FeatureCategory] = None
    term: Optional[str] = None
    fine_grained_terms: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        obj = {
            "level": self.level.value,
            "item_id": self.item_id,
            "claim": dict(self.claim),
            "premises": [s.to_json() for s in self.premises],
            "backing": [_excerpt_json(r) for r in self.backing],
            "rebuttal": [_excerpt_json(r) for r in self.rebuttal],
            "style": self.style.value,
            "expanded": self.expanded,
            "available_moves": [k.value for k in MoveKind if k in self.available_moves],
        }
        if self.refutation is not None:
            obj["refutation"] = self.refutation
        if self.feature is not None:
            obj["feature"] = self.feature.id
        if self.term is not None:
            obj["term"] = self.term
        if self.fine_grained_terms:
            obj["fine_grained_terms"] = list(self.fine_grained_terms)
        return obj


def _excerpt_json(rec: SentenceRecord) -> dict:
    return {"text": rec.text, "review_id": rec.review_id, "polarity": rec.polarity.value}


class ExplanationEngine:
    """Builds explanation payloads from a trained model plus sentence records.

    Stateless over its immutable inputs; dialog state is owned by sessions.
    """

    def __init__(self, model: Optional[EfmModel], records: Sequence[SentenceRecord]):
        self.model = model
        self.records = list(records)
        self._review_rank: dict[str, int] = {}
        self._by_item: dict[str, list[tuple[int, SentenceRecord]]] = {}
        for position, rec in enumerate(self.records):
            self._review_rank.setdefault(rec.review_id, len(self._review_rank))
            self._by_item.setdefault(rec.item_id, []).append((position, rec))

    # -- helpers ---------------------------------------------------------

    def _require_model(self) -> EfmModel:
        if self.model is None:
            raise ModelNotTrained("no trained model loaded")
        return self.model

    def _item_index(self, item_id: str) -> int:
        model = self._require_model()
        index = model.item_ids.get(item_id)
        if index is None:
            raise UnknownItem(item_id)
        return index

    def ranked_features(self, user_index: int) -> list[FeatureCategory]:
        """All 10 features by predicted attention, descending; ties by code."""
        from .personalize import rank_features_for_user

        return rank_features_for_user(self._require_model(), user_index)

    def _stats_by_feature(self, item_id: str) -> dict[FeatureCategory, FeatureStat]:
        known = set(self._require_model().item_ids.ids)
        return {s.feature: s for s in feature_stats(item_id, self.records, known)}

    def _premises(self, session, item_id: str, expanded: bool) -> list[FeatureStat]:
        ranked = self.ranked_features(session.proxy_user_index)
        chosen = ranked if expanded else ranked[:UNEXPANDED_PREMISES]
        stats = self._stats_by_feature(item_id)
        return [
            stats.get(f, FeatureStat.from_counts(f, 0, 0)) for f in chosen
        ]

    def _claim(self, session, item_index: int) -> dict:
        circles = rating_to_circles(
            predict_rating(self._require_model(), session.proxy_user_index, item_index)
        )
        return {"predicted_rating_display": circles, "statement_code": CLAIM_CODE}

    def _recency_sorted(self, matches: list[tuple[int, SentenceRecord]]):
        # most recent review first; original sentence order within a review
        def key(entry):
            position, rec = entry
            rank = self._review_rank[rec.review_id]
            return (-rank, position)

        return [rec for _, rec in sorted(matches, key=key)]

    def _excerpts(self, item_id: str, feature: FeatureCategory, polarity: Polarity,
                  cap: int = EXCERPT_CAP) -> list[SentenceRecord]:
        matches = [
            (pos, rec)
            for pos, rec in self._by_item.get(item_id, [])
            if rec.feature is feature and rec.polarity is polarity
        ]
        return self._recency_sorted(matches)[:cap]

    def _dialog_expanded(self, session, item_id: str) -> bool:
        state = session.dialog
        return state.expanded if state.item_id == item_id else False

    def _refutation(self, stat: Optional[FeatureStat]) -> Optional[str]:
        if stat is not None and stat.has_data and stat.pct_positive >= 50:
            return REFUTATION_CODE
        return None

    # -- payload builders --------------------------------------------------

    def overview_explanation(self, session, item_id: str) -> ExplanationPayload:
        """L2: claim plus per-feature stats ordered by the proxy's attention."""
        item_index = self._item_index(item_id)
        expanded = self._dialog_expanded(session, item_id)
        premises = self._premises(session, item_id, expanded)
        focal = next((s for s in premises if s.has_data), None)
        state = DialogState(DialogLevel.L2_OVERVIEW, item_id=item_id, expanded=expanded)
        return ExplanationPayload(
            level=DialogLevel.L2_OVERVIEW,
            item_id=item_id,
            claim=self._claim(session, item_index),
            premises=premises,
            backing=[],
            rebuttal=[],
            refutation=self._refutation(focal),
            style=session.style,
            available_moves=allowed_moves(state, session.interactivity),
            expanded=expanded,
        )

    def feature_report(self, session, item_id: str,
                       feature: FeatureCategory) -> ExplanationPayload:
        """L3: positive and negative excerpts on one feature, plus the most
        frequent fine-grained terms as follow-up options."""
        if session.interactivity is not Interactivity.HIGH:
            state = DialogState(
                DialogLevel.L2_OVERVIEW,
                item_id=item_id,
                expanded=self._dialog_expanded(session, item_id),
            )
            raise MoveNotAllowed(state, MoveKind.WHAT_REPORTED, session.interactivity)
        if not isinstance(feature, FeatureCategory):
            raise UnknownFeature(repr(feature))
        item_index = self._item_index(item_id)
        expanded = self._dialog_expanded(session, item_id)
        premises = self._premises(session, item_id, expanded)
        stat = self._stats_by_feature(item_id).get(
            feature, FeatureStat.from_counts(feature, 0, 0)
        )
        state = DialogState(
            DialogLevel.L3_FEATURE_REPORT,
            item_id=item_id,
            expanded=expanded,
            feature=feature,
        )
        return ExplanationPayload(
            level=DialogLevel.L3_FEATURE_REPORT,
            item_id=item_id,
            claim=self._claim(session, item_index),
            premises=premises,
            backing=self._excerpts(item_id, feature, Polarity.POSITIVE),
            rebuttal=self._excerpts(item_id, feature, Polarity.NEGATIVE),
            refutation=self._refutation(stat),
            style=session.style,
            available_moves=allowed_moves(state, session.interactivity),
            expanded=expanded,
            feature=feature,
            fine_grained_terms=self.top_terms(item_id, feature),
        )

    def fine_grained_report(self, session, item_id: str, feature: FeatureCategory,
                            term: str) -> ExplanationPayload:
        """L4: statements mentioning one fine-grained term, positives first."""
        if session.interactivity is not Interactivity.HIGH:
            state = DialogState(
                DialogLevel.L2_OVERVIEW,
                item_id=item_id,
                expanded=self._dialog_expanded(session, item_id),
            )
            raise MoveNotAllowed(state, MoveKind.FINE_GRAINED, session.interactivity)
        if not term or not term.strip():
            raise ValueError("term must be non-empty")
        term = term.strip().lower()
        item_index = self._item_index(item_id)
        matches = [
            (pos, rec)
            for pos, rec in self._by_item.get(item_id, [])
            if rec.feature is feature and (rec.fine_grained_term or "").lower() == term
        ]
        if not matches:
            raise NoSuchTerm(item_id, feature, term)
        positive = [(p, r) for p, r in matches if r.polarity is Polarity.POSITIVE]
        negative = [(p, r) for p, r in matches if r.polarity is Polarity.NEGATIVE]
        expanded = self._dialog_expanded(session, item_id)
        stat = self._stats_by_feature(item_id).get(
            feature, FeatureStat.from_counts(feature, 0, 0)
        )
        state = DialogState(
            DialogLevel.L4_FINE_GRAINED,
            item_id=item_id,
            expanded=expanded,
            feature=feature,
            term=term,
        )
        return ExplanationPayload(
            level=DialogLevel.L4_FINE_GRAINED,
            item_id=item_id,
            claim=self._claim(session, item_index),
            premises=self._premises(session, item_id, expanded),
            backing=self._recency_sorted(positive),
            rebuttal=self._recency_sorted(negative),
            refutation=self._refutation(stat),
            style=session.style,
            available_moves=allowed_moves(state, session.interactivity),
            expanded=expanded,
            feature=feature,
            term=term,
            fine_grained_terms=self.top_terms(item_id, feature),
        )

    def top_terms(self, item_id: str, feature: FeatureCategory,
                  cap: int = FINE_GRAINED_BUTTONS) -> list[str]:
        """Most frequent fine-grained terms for (item, feature); ties break
        lexicographically."""
        counts: dict[str, int] = {}
        for _, rec in self._by_item.get(item_id, []):
            if rec.feature is feature and rec.fine_grained_term:
                term = rec.fine_grained_term.lower()
                counts[term] = counts.get(term, 0) + 1
        return sorted(counts, key=lambda t: (-counts[t], t))[:cap]


_FEATURE_SENTENCE = (
    "Around {pct_pos}% of guests who wrote about the {label} commented "
    "positively about it, although {pct_neg}% expressed complaints."
)
_NO_DATA_SENTENCE = "There is no feedback about the {label} yet."
_CLAIM_SENTENCE = "This hotel is recommended for you: predicted rating {circles} out of 5."
_REFUTATION_SENTENCE = "Still, most of the feedback about the {label} was positive."


def render_text(p: ExplanationPayload) -> str:
    """Render the claim and premises of a text-style payload.

    One claim sentence, then one sentence per premise with the positive share
    and an "although" rebuttal clause; a refutation sentence follows whenever
    at least half of the comments are positive.
    """
    if p.style is not PresentationStyle.TEXT:
        raise StyleMismatch(f"payload style is {p.style.value}, not text")
    parts = [_CLAIM_SENTENCE.format(circles=p.claim["predicted_rating_display"])]
    for stat in p.premises:
        label = stat.feature.label
        if not stat.has_data:
            parts.append(_NO_DATA_SENTENCE.format(label=label))
            continue
        parts.append(
            _FEATURE_SENTENCE.format(
                pct_pos=stat.pct_positive, pct_neg=stat.pct_negative, label=label
            )
        )
        if stat.pct_positive >= 50:
            parts.append(_REFUTATION_SENTENCE.format(label=label))
    return " ".join(parts)
