"""Review corpus parsing and feature-category mapping.

A corpus is a UTF-8 JSONL file, one review object per line:

    {"review_id": str, "item_id": str, "user_id": str, "rating": int,
     "sentences": [{"text": str, "gold_aspect": str?, "gold_polarity": str?}]}

Fine-grained feature mentions ("bedding", "front desk staff", ...) are mapped
onto 10 general hotel feature categories via an editable TSV lexicon.
"""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional


class FeatureCategory(enum.IntEnum):
    """The 10 general hotel feature categories, with stable codes 0..9."""

    ROOM = 0
    PRICE = 1
    STAFF = 2
    LOCATION = 3
    FACILITIES = 4
    BATHROOM = 5
    AMBIENCE = 6
    FOOD_AND_BEVERAGES = 7
    COMFORT = 8
    CHECKING = 9

    @property
    def id(self) -> str:
        return self.name.lower()

    @property
    def label(self) -> str:
        """Human-readable label, e.g. 'food and beverages'."""
        return self.name.lower().replace("_", " ")

    @classmethod
    def from_id(cls, s: str) -> "FeatureCategory":
        try:
            return cls[s.strip().upper()]
        except KeyError:
            raise ValueError(f"unknown feature category: {s!r}") from None


ALL_CATEGORIES = tuple(FeatureCategory)


class Polarity(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"
    NEUTRAL = "neutral"


class FormatError(Exception):
    """A malformed corpus line; parsing is aborted at the first offence."""

    def __init__(self, line_no: int, reason: str):
        super().__init__(f"line {line_no}: {reason}")
        self.line_no = line_no
        self.reason = reason


@dataclass(frozen=True)
class RawSentence:
    text: str
    gold_aspect: Optional[str] = None
    gold_polarity: Optional[Polarity] = None


@dataclass(frozen=True)
class Review:
    review_id: str
    item_id: str
    user_id: str
    rating: int
    sentences: tuple[RawSentence, ...]


@dataclass(frozen=True)
class SentenceRecord:
    """One review sentence with provenance, feature category and polarity.

    Records with ``feature is None`` are kept in the list but excluded from
    every downstream statistic.
    """

    review_id: str
    item_id: str
    user_id: str
    text: str
    feature: Optional[FeatureCategory]
    polarity: Polarity
    fine_grained_term: Optional[str] = None


_TOKEN_RE = re.compile(r"[a-z0-9]+")


def tokenize(text: str) -> list[str]:
    """Lowercase and split on non-alphanumeric characters."""
    return _TOKEN_RE.findall(text.lower())


@dataclass
class FineGrainedLexicon:
    """Map from fine-grained term (lowercased) to its general category.

    Multi-word terms are stored as single entries and matched as contiguous
    token sequences.
    """

    entries: dict[str, FeatureCategory] = field(default_factory=dict)

    def __post_init__(self):
        # keys are normalized to their token form so "check-in" == "check in"
        normalized = {}
        for term, cat in self.entries.items():
            key = " ".join(tokenize(term))
            if not key:
                raise ValueError(f"lexicon term {term!r} has no tokens")
            if key in normalized and normalized[key] != cat:
                raise ValueError(f"lexicon term {key!r} maps to two categories")
            normalized[key] = cat
        self.entries = normalized

    def lookup(self, term: str) -> Optional[FeatureCategory]:
        return self.entries.get(" ".join(tokenize(term)))

    @property
    def max_term_tokens(self) -> int:
        return max((t.count(" ") + 1 for t in self.entries), default=0)

    @classmethod
    def from_file(cls, path: str | Path) -> "FineGrainedLexicon":
        """Load a lexicon from a TSV file ("term<TAB>category", '#' comments)."""
        entries = {}
        with open(path, encoding="utf-8") as f:
            for line_no, line in enumerate(f, start=1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise FormatError(line_no, "expected 'term<TAB>category'")
                term, cat = parts
                entries[term.strip().lower()] = FeatureCategory.from_id(cat)
        return cls(entries)


def map_fine_to_general(term: str, lex: FineGrainedLexicon) -> Optional[FeatureCategory]:
    """Lowercased exact-match lookup of a fine-grained term; None when absent."""
    return lex.lookup(term)


def _parse_sentence(obj, line_no: int) -> RawSentence:
    if not isinstance(obj, dict):
        raise FormatError(line_no, "sentence must be an object")
    text = obj.get("text")
    if not isinstance(text, str) or not text.strip():
        raise FormatError(line_no, "sentence text must be a non-empty string")
    gold_aspect = obj.get("gold_aspect")
    if gold_aspect is not None and not isinstance(gold_aspect, str):
        raise FormatError(line_no, "gold_aspect must be a string")
    gold_polarity = obj.get("gold_polarity")
    if gold_polarity is not None:
        try:
            gold_polarity = Polarity(gold_polarity)
        except ValueError:
            raise FormatError(line_no, f"bad gold_polarity {gold_polarity!r}")
    return RawSentence(text=text, gold_aspect=gold_aspect, gold_polarity=gold_polarity)


def _parse_review(obj, line_no: int) -> Review:
    if not isinstance(obj, dict):
        raise FormatError(line_no, "review must be an object")
    for key in ("review_id", "item_id", "user_id"):
        v = obj.get(key)
        if not isinstance(v, str) or not v:
            raise FormatError(line_no, f"{key} must be a non-empty string")
    rating = obj.get("rating")
    if not isinstance(rating, int) or isinstance(rating, bool) or not 1 <= rating <= 5:
        raise FormatError(line_no, f"rating must be an integer in 1..5, got {rating!r}")
    sentences = obj.get("sentences")
    if not isinstance(sentences, list) or not sentences:
        raise FormatError(line_no, "sentences must be a non-empty list")
    return Review(
        review_id=obj["review_id"],
        item_id=obj["item_id"],
        user_id=obj["user_id"],
        rating=rating,
        sentences=tuple(_parse_sentence(s, line_no) for s in sentences),
    )


def parse_corpus(path: str | Path) -> list[Review]:
    """Parse a JSONL corpus file, failing fast on the first malformed line."""
    reviews = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                raise FormatError(line_no, "blank line")
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as e:
                raise FormatError(line_no, f"invalid JSON: {e.msg}") from None
            reviews.append(_parse_review(obj, line_no))
    return reviews


def review_to_json(review: Review) -> dict:
    sentences = []
    for s in review.sentences:
        obj = {"text": s.text}
        if s.gold_aspect is not None:
            obj["gold_aspect"] = s.gold_aspect
        if s.gold_polarity is not None:
            obj["gold_polarity"] = s.gold_polarity.value
        sentences.append(obj)
    return {
        "review_id": review.review_id,
        "item_id": review.item_id,
        "user_id": review.user_id,
        "rating": review.rating,
        "sentences": sentences,
    }


def write_corpus(reviews: Iterable[Review], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for r in reviews:
            f.write(json.dumps(review_to_json(r), ensure_ascii=False) + "\n")


def build_sentence_records(reviews, classifier) -> list[SentenceRecord]:
    """Classify every sentence of every review into a SentenceRecord.

    Feature, polarity and matched term come from the classifier; in
    gold-passthrough mode the classifier echoes gold annotations where
    present (see aspect.AspectSentimentClassifier).
    """
    records = []
    for review in reviews:
        for sentence in review.sentences:
            feature, polarity, term = classifier.classify(sentence)
            records.append(
                SentenceRecord(
                    review_id=review.review_id,
                    item_id=review.item_id,
                    user_id=review.user_id,
                    text=sentence.text,
                    feature=feature,
                    polarity=polarity,
                    fine_grained_term=term,
                )
            )
    return records


def record_to_json(rec: SentenceRecord) -> dict:
    return {
        "review_id": rec.review_id,
        "item_id": rec.item_id,
        "user_id": rec.user_id,
        "text": rec.text,
        "feature": rec.feature.id if rec.feature is not None else None,
        "polarity": rec.polarity.value,
        "fine_grained_term": rec.fine_grained_term,
    }


def record_from_json(obj: dict) -> SentenceRecord:
    feature = obj.get("feature")
    return SentenceRecord(
        review_id=obj["review_id"],
        item_id=obj["item_id"],
        user_id=obj["user_id"],
        text=obj["text"],
        feature=FeatureCategory.from_id(feature) if feature else None,
        polarity=Polarity(obj["polarity"]),
        fine_grained_term=obj.get("fine_grained_term"),
    )


def write_records(records: Iterable[SentenceRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as f:
        for rec in records:
            f.write(json.dumps(record_to_json(rec), ensure_ascii=False) + "\n")


def read_records(path: str | Path) -> list[SentenceRecord]:
    records = []
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                records.append(record_from_json(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as e:
                raise FormatError(line_no, str(e)) from None
    return records
