"""Aspect and sentiment classification for review sentences.

A pluggable classifier decides, per sentence, which of the 10 feature
categories it mainly addresses and whether the comment is positive,
negative or neutral. Two built-in implementations:

* ``gold_passthrough`` — echo gold annotations when present, falling back
  to the rule baseline for unannotated sentences;
* ``lexicon_rule`` — longest-match aspect lookup plus a counting sentiment
  rule with negation handling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .corpus import (
    FeatureCategory,
    FineGrainedLexicon,
    FormatError,
    Polarity,
    RawSentence,
    tokenize,
)

# A negation token within this many tokens before a sentiment term flips it.
NEGATION_WINDOW = 3


class ClassifierMode(str, enum.Enum):
    GOLD_PASSTHROUGH = "gold_passthrough"
    LEXICON_RULE = "lexicon_rule"


def load_sentiment_lexicon(path: str | Path) -> dict[str, Polarity]:
    """Load a sentiment TSV ("term<TAB>positive|negative", '#' comments)."""
    entries: dict[str, Polarity] = {}
    with open(path, encoding="utf-8") as f:
        for line_no, line in enumerate(f, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2 or parts[1] not in ("positive", "negative"):
                raise FormatError(line_no, "expected 'term<TAB>positive|negative'")
            entries[" ".join(tokenize(parts[0]))] = Polarity(parts[1])
    return entries


def load_negation_terms(path: str | Path) -> set[str]:
    """Load negation tokens (first TSV column; any label column is ignored)."""
    terms = set()
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            terms.add(line.split("\t")[0].strip().lower())
    return terms


def _find_term_matches(tokens: list[str], terms, max_len: int):
    """Yield (start, n_tokens, term) for every contiguous lexicon match."""
    n = len(tokens)
    for start in range(n):
        for length in range(1, min(max_len, n - start) + 1):
            candidate = " ".join(tokens[start : start + length])
            if candidate in terms:
                yield start, length, candidate


@dataclass
class AspectSentimentClassifier:
    """Rule-based stand-in for a learned sentence classifier.

    Immutable after construction; safe for concurrent use.
    """

    mode: ClassifierMode
    lexicon: FineGrainedLexicon
    sentiment_lexicon: dict[str, Polarity] = field(default_factory=dict)
    negation_terms: set[str] = field(default_factory=set)

    def __post_init__(self):
        if isinstance(self.mode, str):
            self.mode = ClassifierMode(self.mode)
        overlap = set(self.sentiment_lexicon) & self.negation_terms
        if overlap:
            raise ValueError(f"sentiment and negation terms overlap: {sorted(overlap)}")

    def classify(self, sentence: RawSentence):
        """Return (feature, polarity, matched_term) for one sentence."""
        if self.mode is ClassifierMode.GOLD_PASSTHROUGH:
            feature, term = self._gold_aspect(sentence)
            if sentence.gold_aspect is None:
                feature, term = classify_aspect(sentence.text, self)
            polarity = sentence.gold_polarity
            if polarity is None:
                polarity = classify_polarity(sentence.text, self)
            return feature, polarity, term
        feature, term = classify_aspect(sentence.text, self)
        return feature, classify_polarity(sentence.text, self), term

    def _gold_aspect(self, sentence: RawSentence):
        gold = sentence.gold_aspect
        if gold is None:
            return None, None
        feature = self.lexicon.lookup(gold)
        term = " ".join(tokenize(gold))
        # the record invariant requires the term to occur in the text
        if term and _occurs(term, sentence.text):
            return feature, term
        return feature, None


def _occurs(term: str, text: str) -> bool:
    term_tokens = term.split(" ")
    tokens = tokenize(text)
    k = len(term_tokens)
    return any(tokens[i : i + k] == term_tokens for i in range(len(tokens) - k + 1))


def classify_aspect(
    text: str, c: AspectSentimentClassifier
) -> tuple[Optional[FeatureCategory], Optional[str]]:
    """Pick the longest matching fine-grained lexicon term in the sentence.

    Ties on token length are broken by lowest category code, then earliest
    position, then term text, so the result is deterministic.
    """
    tokens = tokenize(text)
    if not tokens:
        return None, None
    best = None
    for start, length, term in _find_term_matches(
        tokens, c.lexicon.entries, c.lexicon.max_term_tokens
    ):
        key = (-length, int(c.lexicon.entries[term]), start, term)
        if best is None or key < best[0]:
            best = (key, term)
    if best is None:
        return None, None
    term = best[1]
    return c.lexicon.entries[term], term


def classify_polarity(text: str, c: AspectSentimentClassifier) -> Polarity:
    """Count positive minus negative sentiment terms, flipping a term's sign
    when a negation token occurs within the 3 preceding tokens."""
    tokens = tokenize(text)
    max_len = max((t.count(" ") + 1 for t in c.sentiment_lexicon), default=0)
    score = 0
    for start, length, term in _find_term_matches(tokens, c.sentiment_lexicon, max_len):
        sign = 1 if c.sentiment_lexicon[term] is Polarity.POSITIVE else -1
        window = tokens[max(0, start - NEGATION_WINDOW) : start]
        if any(tok in c.negation_terms for tok in window):
            sign = -sign
        score += sign
    if score > 0:
        return Polarity.POSITIVE
    if score < 0:
        return Polarity.NEGATIVE
    return Polarity.NEUTRAL
